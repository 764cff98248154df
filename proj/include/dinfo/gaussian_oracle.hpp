#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "dinfo/directed_measures.hpp"
#include "dinfo/graph_inference.hpp"
#include "dinfo/timeseries.hpp"

namespace dinfo {

/// Vector autoregression X_t = sum_k A_k X_{t-k} + e_t with Gaussian
/// innovations e_t ~ N(0, noise_cov). Directed structure lives in the
/// coefficients, instantaneous structure in the off-diagonal noise entries.
struct VarModel {
    std::vector<Eigen::MatrixXd> coeffs;  // A_1..A_p, each M x M
    Eigen::MatrixXd noise_cov;            // M x M, symmetric positive definite
    std::vector<std::string> names;

    int order() const { return static_cast<int>(coeffs.size()); }
    Eigen::Index channel_count() const { return noise_cov.rows(); }

    /// Companion-form transition matrix (Mp x Mp).
    Eigen::MatrixXd companion() const;
    double spectral_radius() const;

    /// Shape and symmetry/positive-definiteness checks; stationarity is
    /// checked separately where required.
    void validate() const;
    void require_stationary() const;
};

/// Autocovariance sequence Gamma(k) = E[X_t X_{t-k}^T] for k = 0..max_lag.
struct AutocovSequence {
    std::vector<Eigen::MatrixXd> gamma;

    Eigen::Index max_lag() const { return static_cast<Eigen::Index>(gamma.size()) - 1; }

    /// Cross-covariance of (channel c1 at t-l1) and (channel c2 at t-l2),
    /// using Gamma(-k) = Gamma(k)^T.
    double cov(Eigen::Index c1, int l1, Eigen::Index c2, int l2) const;
};

/// Simulates the model with a counter-based seeded stream: output is a pure
/// function of (model, T, seed, burn_in), and each (time, channel) innovation
/// has its own counter so channel streams are reproducible.
TimeSeriesSet simulate_var(const VarModel& model, Eigen::Index t_samples, std::uint64_t seed,
                           Eigen::Index burn_in);

/// Stationary autocovariances: Gamma(0..p-1) from the companion-form
/// Lyapunov fixed point (tolerance 1e-12, capped iterations), Gamma(k >= p)
/// from the Yule-Walker recursion Gamma(k) = sum_j A_j Gamma(k-j).
AutocovSequence stationary_autocov(const VarModel& model, int max_lag);

/// Gaussian conditional mutual information from a joint covariance:
/// 1/2 log(det S_xz det S_yz / (det S_z det S_xyz)) in nats, with
/// det S_empty = 1. Tiny negatives (> -1e-10) are clamped to zero.
double gaussian_cmi(const Eigen::MatrixXd& cov, const std::vector<Eigen::Index>& idx_x,
                    const std::vector<Eigen::Index>& idx_y, const std::vector<Eigen::Index>& idx_z);

/// Closed-form rate for the finite-lag embedding: builds the joint covariance
/// of the embedding blocks from the autocovariance sequence and evaluates
/// gaussian_cmi. DI = TE + IIE by construction.
double analytic_rate(const VarModel& model, MeasureKind kind, Eigen::Index source,
                     Eigen::Index target, const std::vector<Eigen::Index>& cond,
                     const EmbeddingSpec& spec);

/// Ground-truth mixed graph: directed edge i->j iff some |A_k(j,i)| > tol;
/// undirected edge i-j iff |precision(i,j)| > tol where precision is the
/// inverse noise covariance.
CausalityGraph true_graph(const VarModel& model, double tol);

}  // namespace dinfo
