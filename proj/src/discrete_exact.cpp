#include "dinfo/discrete_exact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dinfo/rng.hpp"

namespace dinfo {

namespace {

// Digits of a joint outcome, x_1..x_t then y_1..y_t, most significant first.
void decode(const JointPmf& pmf, std::size_t idx, int* digits) {
    const int n_vars = 2 * pmf.t;
    for (int v = n_vars - 1; v >= 0; --v) {
        const int c = pmf.card(v);
        digits[v] = static_cast<int>(idx % static_cast<std::size_t>(c));
        idx /= static_cast<std::size_t>(c);
    }
}

struct Group {
    std::vector<int> positions;     // sorted
    std::vector<std::size_t> stride;  // stride of each position in the table
    std::size_t table_size = 1;

    explicit Group(const JointPmf& pmf, std::vector<int> pos) : positions(std::move(pos)) {
        std::sort(positions.begin(), positions.end());
        if (std::adjacent_find(positions.begin(), positions.end()) != positions.end())
            throw std::invalid_argument("variable group contains a duplicate position");
        for (int p : positions)
            if (p < 0 || p >= 2 * pmf.t)
                throw std::invalid_argument("variable position out of range");
        stride.resize(positions.size());
        std::size_t s = 1;
        for (int i = static_cast<int>(positions.size()) - 1; i >= 0; --i) {
            stride[static_cast<std::size_t>(i)] = s;
            s *= static_cast<std::size_t>(pmf.card(positions[static_cast<std::size_t>(i)]));
        }
        table_size = s;
    }

    std::size_t key(const int* digits) const {
        std::size_t k = 0;
        for (std::size_t i = 0; i < positions.size(); ++i)
            k += static_cast<std::size_t>(digits[static_cast<std::size_t>(positions[i])]) * stride[i];
        return k;
    }
};

std::vector<double> marginal(const JointPmf& pmf, const Group& g) {
    std::vector<double> table(g.table_size, 0.0);
    int digits[2 * 16];
    for (std::size_t idx = 0; idx < pmf.outcome_count(); ++idx) {
        const double p = pmf.probs[idx];
        if (p == 0.0) continue;
        decode(pmf, idx, digits);
        table[g.key(digits)] += p;
    }
    return table;
}

void check_disjoint(const std::vector<int>& a, const std::vector<int>& b) {
    for (int x : a)
        for (int y : b)
            if (x == y) throw std::invalid_argument("variable groups must be disjoint");
}

std::vector<int> concat(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> u = a;
    u.insert(u.end(), b.begin(), b.end());
    return u;
}

std::vector<int> x_prefix(const JointPmf& pmf, int upto) {
    std::vector<int> v;
    for (int i = 1; i <= upto; ++i) v.push_back(pmf.x_pos(i));
    return v;
}

std::vector<int> y_prefix(const JointPmf& pmf, int upto) {
    std::vector<int> v;
    for (int i = 1; i <= upto; ++i) v.push_back(pmf.y_pos(i));
    return v;
}

}  // namespace

void JointPmf::validate() const {
    if (t < 1) throw std::invalid_argument("JointPmf horizon must be >= 1");
    if (t > 16) throw std::invalid_argument("JointPmf horizon exceeds supported maximum");
    if (ax < 1 || ay < 1) throw std::invalid_argument("alphabet sizes must be >= 1");
    const double bits = t * (std::log2(static_cast<double>(ax)) + std::log2(static_cast<double>(ay)));
    if (bits > 24.0 + 1e-9)
        throw std::invalid_argument("JointPmf exceeds the 2^24 enumeration guard");
    std::size_t n = 1;
    for (int i = 0; i < t; ++i) n *= static_cast<std::size_t>(ax) * static_cast<std::size_t>(ay);
    if (probs.size() != n) throw std::invalid_argument("JointPmf tensor has wrong size");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw std::invalid_argument("JointPmf entries must be >= 0");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("JointPmf entries must sum to 1 within 1e-12");
}

double grouped_entropy(const JointPmf& pmf, const std::vector<int>& positions) {
    pmf.validate();
    if (positions.empty()) return 0.0;
    Group g(pmf, positions);
    auto table = marginal(pmf, g);
    return blocked_sum_n(table.size(), [&](std::size_t i) {
        const double p = table[i];
        return p > 0.0 ? -p * std::log(p) : 0.0;
    });
}

double grouped_cmi(const JointPmf& pmf, const std::vector<int>& a,
                   const std::vector<int>& b, const std::vector<int>& c) {
    pmf.validate();
    check_disjoint(a, b);
    check_disjoint(a, c);
    check_disjoint(b, c);
    if (a.empty() || b.empty()) return 0.0;

    Group g_abc(pmf, concat(concat(a, b), c));
    Group g_ac(pmf, concat(a, c));
    Group g_bc(pmf, concat(b, c));
    Group g_c(pmf, c);

    auto t_abc = marginal(pmf, g_abc);
    auto t_ac = marginal(pmf, g_ac);
    auto t_bc = marginal(pmf, g_bc);
    auto t_c = c.empty() ? std::vector<double>{1.0} : marginal(pmf, g_c);

    // Iterate over the (A,B,C) table and project each cell onto the
    // sub-tables through shared digit positions.
    const int n_vars = 2 * pmf.t;
    std::vector<std::size_t> stride_abc_of_pos(static_cast<std::size_t>(n_vars), 0);
    for (std::size_t i = 0; i < g_abc.positions.size(); ++i)
        stride_abc_of_pos[static_cast<std::size_t>(g_abc.positions[i])] = g_abc.stride[i];

    auto subkey = [&](std::size_t abc_idx, const Group& sub) {
        std::size_t k = 0;
        for (std::size_t i = 0; i < sub.positions.size(); ++i) {
            const int pos = sub.positions[i];
            const std::size_t stride = stride_abc_of_pos[static_cast<std::size_t>(pos)];
            const std::size_t digit =
                (abc_idx / stride) % static_cast<std::size_t>(pmf.card(pos));
            k += digit * sub.stride[i];
        }
        return k;
    };

    return blocked_sum_n(t_abc.size(), [&](std::size_t i) {
        const double p = t_abc[i];
        if (p <= 0.0) return 0.0;
        const double pac = t_ac[subkey(i, g_ac)];
        const double pbc = t_bc[subkey(i, g_bc)];
        const double pc = c.empty() ? 1.0 : t_c[subkey(i, g_c)];
        return p * std::log(p * pc / (pac * pbc));
    });
}

double mutual_information_exact(const JointPmf& pmf) {
    return grouped_cmi(pmf, x_prefix(pmf, pmf.t), y_prefix(pmf, pmf.t), {});
}

double directed_information_exact(const JointPmf& pmf, Direction dir) {
    pmf.validate();
    const bool x_source = dir == Direction::XtoY || dir == Direction::DXtoY;
    const bool delayed = dir == Direction::DXtoY || dir == Direction::DYtoX;
    auto src = [&](int upto) { return x_source ? x_prefix(pmf, upto) : y_prefix(pmf, upto); };
    auto tgt = [&](int upto) { return x_source ? y_prefix(pmf, upto) : x_prefix(pmf, upto); };
    auto tgt_at = [&](int i) { return x_source ? pmf.y_pos(i) : pmf.x_pos(i); };

    double total = 0.0;
    for (int i = 1; i <= pmf.t; ++i) {
        const int src_upto = delayed ? i - 1 : i;
        if (src_upto == 0) continue;  // delayed source pads with a constant
        total += grouped_cmi(pmf, src(src_upto), {tgt_at(i)}, tgt(i - 1));
    }
    return total;
}

double instantaneous_exchange_exact(const JointPmf& pmf) {
    pmf.validate();
    double total = 0.0;
    for (int i = 1; i <= pmf.t; ++i)
        total += grouped_cmi(pmf, {pmf.x_pos(i)}, {pmf.y_pos(i)},
                             concat(x_prefix(pmf, i - 1), y_prefix(pmf, i - 1)));
    return total;
}

double causal_cond_entropy_exact(const JointPmf& pmf, Direction dir) {
    pmf.validate();
    if (dir != Direction::XtoY && dir != Direction::YtoX)
        throw std::invalid_argument("causal conditional entropy takes plain directions only");
    const bool x_source = dir == Direction::XtoY;
    auto src = [&](int upto) { return x_source ? x_prefix(pmf, upto) : y_prefix(pmf, upto); };
    auto tgt = [&](int upto) { return x_source ? y_prefix(pmf, upto) : x_prefix(pmf, upto); };
    auto tgt_at = [&](int i) { return x_source ? pmf.y_pos(i) : pmf.x_pos(i); };

    // H(tgt_i | src_{1:i}, tgt_{1:i-1}) = H(joint) - H(conditioner)
    double total = 0.0;
    for (int i = 1; i <= pmf.t; ++i) {
        const auto cond = concat(src(i), tgt(i - 1));
        total += grouped_entropy(pmf, concat(cond, {tgt_at(i)})) - grouped_entropy(pmf, cond);
    }
    return total;
}

double sequence_entropy(const JointPmf& pmf, Process which) {
    return grouped_entropy(pmf, which == Process::X ? x_prefix(pmf, pmf.t) : y_prefix(pmf, pmf.t));
}

}  // namespace dinfo
