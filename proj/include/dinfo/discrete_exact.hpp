#pragma once

#include <cstdint>
#include <vector>

namespace dinfo {

/// Explicit joint law of two finite-alphabet processes over a finite horizon.
/// Outcome (x_1..x_t, y_1..y_t) is stored row-major with x_1 the most
/// significant digit: linear index = ((x_1*ax + x_2)*ax + ...)*ay + ... + y_t.
///
/// Variable positions: 0..t-1 are x_1..x_t, t..2t-1 are y_1..y_t.
struct JointPmf {
    int t = 1;        // horizon
    int ax = 2;       // |X|
    int ay = 2;       // |Y|
    std::vector<double> probs;

    int x_pos(int i) const { return i - 1; }       // 1-based time index
    int y_pos(int i) const { return t + i - 1; }
    int card(int pos) const { return pos < t ? ax : ay; }
    std::size_t outcome_count() const { return probs.size(); }

    /// Checks nonnegativity, normalization within 1e-12, and the enumeration
    /// guard t*(log2|X| + log2|Y|) <= 24.
    void validate() const;
};

enum class Direction {
    XtoY,    // I(x -> y)
    YtoX,    // I(y -> x)
    DXtoY,   // I(Dx -> y): source delayed one step, zero-padded
    DYtoX,   // I(Dy -> x)
};

enum class Process { X, Y };

/// Shannon entropy (nats) of the marginal over an arbitrary set of variable
/// positions. Empty set gives 0.
double grouped_entropy(const JointPmf& pmf, const std::vector<int>& positions);

/// Conditional mutual information I(A; B | C) (nats) over disjoint groups of
/// variable positions. Empty C gives plain mutual information.
double grouped_cmi(const JointPmf& pmf, const std::vector<int>& a,
                   const std::vector<int>& b, const std::vector<int>& c);

/// I(x_{1:t}; y_{1:t}) in nats.
double mutual_information_exact(const JointPmf& pmf);

/// Directed information via the conditional-MI sum form,
/// I(x_{1:t} -> y_{1:t}) = sum_i I(x_{1:i}; y_i | y_{1:i-1}); delayed
/// directions replace the source window by its one-step-delayed version.
double directed_information_exact(const JointPmf& pmf, Direction dir);

/// Instantaneous information exchange
/// I(x -> y || Dx) = sum_i I(x_i; y_i | x_{1:i-1}, y_{1:i-1}); symmetric in
/// the two processes.
double instantaneous_exchange_exact(const JointPmf& pmf);

/// Causal conditional entropy H(target || source) =
/// sum_i H(target_i | source_{1:i}, target_{1:i-1}). Direction XtoY means
/// H(y || x).
double causal_cond_entropy_exact(const JointPmf& pmf, Direction dir);

/// Entropy of one process's full record, H(x_{1:t}) or H(y_{1:t}).
double sequence_entropy(const JointPmf& pmf, Process which);

}  // namespace dinfo
