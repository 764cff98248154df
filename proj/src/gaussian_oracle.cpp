#include "dinfo/gaussian_oracle.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <set>
#include <stdexcept>

#include "dinfo/rng.hpp"

namespace dinfo {

namespace {

constexpr int kMaxAnalyticLag = 64;
constexpr int kMaxLyapunovIterations = 100000;
constexpr double kLyapunovTol = 1e-12;

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& cov, const std::vector<Eigen::Index>& rows,
                          const std::vector<Eigen::Index>& cols) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cov(rows[i], cols[j]);
    return out;
}

/// log det of an SPD matrix via Cholesky; throws on non-SPD input.
double logdet_spd(const Eigen::MatrixXd& m, const char* what) {
    if (m.rows() == 0) return 0.0;  // det of the empty matrix is 1
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument(std::string(what) + ": covariance block is not positive definite");
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace

Eigen::MatrixXd VarModel::companion() const {
    const Eigen::Index m = channel_count();
    const int p = order();
    const Eigen::Index dim = m * std::max(p, 1);
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(dim, dim);
    for (int k = 0; k < p; ++k) f.block(0, m * k, m, m) = coeffs[static_cast<std::size_t>(k)];
    for (int k = 1; k < p; ++k)
        f.block(m * k, m * (k - 1), m, m) = Eigen::MatrixXd::Identity(m, m);
    return f;
}

double VarModel::spectral_radius() const {
    if (order() == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion(), false);
    return solver.eigenvalues().array().abs().maxCoeff();
}

void VarModel::validate() const {
    const Eigen::Index m = noise_cov.rows();
    if (m < 1 || noise_cov.cols() != m)
        throw std::invalid_argument("noise covariance must be square and nonempty");
    for (const auto& a : coeffs)
        if (a.rows() != m || a.cols() != m)
            throw std::invalid_argument("coefficient matrices must be M x M");
    if (names.size() != static_cast<std::size_t>(m))
        throw std::invalid_argument("channel name count must equal M");
    std::set<std::string> seen;
    for (const auto& n : names)
        if (!seen.insert(n).second) throw std::invalid_argument("duplicate channel name: " + n);
    if ((noise_cov - noise_cov.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("noise covariance must be symmetric within 1e-12");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(noise_cov);
    if (eig.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("noise covariance must be positive definite");
}

void VarModel::require_stationary() const {
    validate();
    const double rho = spectral_radius();
    if (!(rho < 1.0)) {
        throw std::invalid_argument("model is not stationary: companion spectral radius " +
                                    std::to_string(rho) + " >= 1");
    }
}

double AutocovSequence::cov(Eigen::Index c1, int l1, Eigen::Index c2, int l2) const {
    const int k = l2 - l1;
    if (k >= 0) return gamma[static_cast<std::size_t>(k)](c1, c2);
    return gamma[static_cast<std::size_t>(-k)](c2, c1);
}

TimeSeriesSet simulate_var(const VarModel& model, Eigen::Index t_samples, std::uint64_t seed,
                           Eigen::Index burn_in) {
    model.require_stationary();
    if (t_samples < 1) throw std::invalid_argument("sample count must be >= 1");
    if (burn_in < 0) throw std::invalid_argument("burn-in must be >= 0");

    const Eigen::Index m = model.channel_count();
    const int p = model.order();
    Eigen::LLT<Eigen::MatrixXd> llt(model.noise_cov);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("noise covariance has no Cholesky factor");
    const Eigen::MatrixXd chol = llt.matrixL();

    const CounterRng rng(seed);
    const Eigen::Index total = burn_in + t_samples;
    RowMatrix values(total, m);
    Eigen::VectorXd raw(m), x(m);
    for (Eigen::Index t = 0; t < total; ++t) {
        for (Eigen::Index c = 0; c < m; ++c)
            raw(c) = rng.normal(static_cast<std::uint64_t>(t) * static_cast<std::uint64_t>(m) +
                                static_cast<std::uint64_t>(c));
        x = chol * raw;
        for (int k = 1; k <= p; ++k) {
            if (t - k < 0) continue;
            x += model.coeffs[static_cast<std::size_t>(k - 1)] * values.row(t - k).transpose();
        }
        values.row(t) = x.transpose();
    }

    TimeSeriesSet out;
    out.values = values.bottomRows(t_samples);
    out.names = model.names;
    out.validate();
    return out;
}

AutocovSequence stationary_autocov(const VarModel& model, int max_lag) {
    model.require_stationary();
    if (max_lag < 0) throw std::invalid_argument("max_lag must be >= 0");

    const Eigen::Index m = model.channel_count();
    const int p = model.order();
    AutocovSequence seq;

    if (p == 0) {
        seq.gamma.assign(static_cast<std::size_t>(max_lag) + 1, Eigen::MatrixXd::Zero(m, m));
        seq.gamma[0] = model.noise_cov;
        return seq;
    }

    const Eigen::MatrixXd f = model.companion();
    const Eigen::Index dim = f.rows();
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(dim, dim);
    q.topLeftCorner(m, m) = model.noise_cov;

    // Fixed-point iteration S <- F S F^T + Q; contraction factor is the
    // squared spectral radius.
    Eigen::MatrixXd s = q;
    bool converged = false;
    for (int it = 0; it < kMaxLyapunovIterations; ++it) {
        Eigen::MatrixXd next = f * s * f.transpose() + q;
        const double residual = (next - s).cwiseAbs().maxCoeff();
        s = std::move(next);
        if (residual <= kLyapunovTol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw std::runtime_error("Lyapunov fixed-point iteration did not converge");
    s = 0.5 * (s + s.transpose());  // iteration preserves symmetry up to roundoff

    seq.gamma.resize(static_cast<std::size_t>(max_lag) + 1);
    for (int k = 0; k <= max_lag; ++k) {
        if (k < p) {
            seq.gamma[static_cast<std::size_t>(k)] = s.block(0, m * k, m, m);
        } else {
            Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
            for (int j = 1; j <= p; ++j)
                g += model.coeffs[static_cast<std::size_t>(j - 1)] *
                     seq.gamma[static_cast<std::size_t>(k - j)];
            seq.gamma[static_cast<std::size_t>(k)] = g;
        }
    }
    return seq;
}

double gaussian_cmi(const Eigen::MatrixXd& cov, const std::vector<Eigen::Index>& idx_x,
                    const std::vector<Eigen::Index>& idx_y,
                    const std::vector<Eigen::Index>& idx_z) {
    if (cov.rows() != cov.cols()) throw std::invalid_argument("covariance must be square");
    std::set<Eigen::Index> seen;
    for (const auto* set : {&idx_x, &idx_y, &idx_z})
        for (Eigen::Index i : *set) {
            if (i < 0 || i >= cov.rows())
                throw std::invalid_argument("covariance index out of range");
            if (!seen.insert(i).second)
                throw std::invalid_argument("index sets must be disjoint");
        }
    if (idx_x.empty() || idx_y.empty())
        throw std::invalid_argument("x and y index sets must be nonempty");

    auto join = [](const std::vector<Eigen::Index>& a, const std::vector<Eigen::Index>& b) {
        std::vector<Eigen::Index> u = a;
        u.insert(u.end(), b.begin(), b.end());
        return u;
    };
    const auto xz = join(idx_x, idx_z);
    const auto yz = join(idx_y, idx_z);
    const auto xyz = join(xz, idx_y);

    const double val = 0.5 * (logdet_spd(submatrix(cov, xz, xz), "gaussian_cmi xz") +
                              logdet_spd(submatrix(cov, yz, yz), "gaussian_cmi yz") -
                              logdet_spd(submatrix(cov, idx_z, idx_z), "gaussian_cmi z") -
                              logdet_spd(submatrix(cov, xyz, xyz), "gaussian_cmi xyz"));
    if (val < 0.0) {
        if (val < -1e-10)
            throw std::runtime_error("gaussian_cmi produced a negative value; covariance is "
                                     "numerically singular");
        return 0.0;
    }
    return val;
}

namespace {

struct LaggedVar {
    Eigen::Index channel;
    int lag;
};

double analytic_cmi_of_blocks(const VarModel& model, const std::vector<LaggedVar>& vx,
                              const std::vector<LaggedVar>& vy, const std::vector<LaggedVar>& vz) {
    int max_lag = 0;
    for (const auto* block : {&vx, &vy, &vz})
        for (const auto& v : *block) max_lag = std::max(max_lag, v.lag);
    const AutocovSequence autocov = stationary_autocov(model, max_lag);

    std::vector<LaggedVar> all = vx;
    all.insert(all.end(), vy.begin(), vy.end());
    all.insert(all.end(), vz.begin(), vz.end());
    const Eigen::Index d = static_cast<Eigen::Index>(all.size());
    Eigen::MatrixXd cov(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            cov(i, j) = autocov.cov(all[static_cast<std::size_t>(i)].channel,
                                    all[static_cast<std::size_t>(i)].lag,
                                    all[static_cast<std::size_t>(j)].channel,
                                    all[static_cast<std::size_t>(j)].lag);

    std::vector<Eigen::Index> ix, iy, iz;
    Eigen::Index next = 0;
    for (std::size_t i = 0; i < vx.size(); ++i) ix.push_back(next++);
    for (std::size_t i = 0; i < vy.size(); ++i) iy.push_back(next++);
    for (std::size_t i = 0; i < vz.size(); ++i) iz.push_back(next++);
    return gaussian_cmi(cov, ix, iy, iz);
}

}  // namespace

double analytic_rate(const VarModel& model, MeasureKind kind, Eigen::Index source,
                     Eigen::Index target, const std::vector<Eigen::Index>& cond,
                     const EmbeddingSpec& spec) {
    model.require_stationary();
    spec.validate();
    const Eigen::Index m = model.channel_count();
    if (source < 0 || source >= m || target < 0 || target >= m || source == target)
        throw std::invalid_argument("invalid source/target channels");
    for (Eigen::Index c : cond)
        if (c < 0 || c >= m || c == source || c == target)
            throw std::invalid_argument("invalid conditioning channel");
    if (spec.max_lag(!cond.empty()) > kMaxAnalyticLag)
        throw std::invalid_argument("embedding lags exceed the analytic lag budget");

    std::vector<LaggedVar> src_past, tgt_past, cond_block;
    for (int l = 1; l <= spec.source_past_lag; ++l) src_past.push_back({source, l});
    for (int l = 1; l <= spec.target_past_lag; ++l) tgt_past.push_back({target, l});
    for (Eigen::Index z : cond) {
        if (spec.cond_includes_present) cond_block.push_back({z, 0});
        for (int l = 1; l <= spec.cond_past_lag; ++l) cond_block.push_back({z, l});
    }
    auto join = [](std::vector<LaggedVar> a, const std::vector<LaggedVar>& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    };

    switch (kind) {
        case MeasureKind::TE:
            return analytic_cmi_of_blocks(model, src_past, {{target, 0}},
                                          join(tgt_past, cond_block));
        case MeasureKind::IIE:
            return analytic_cmi_of_blocks(model, {{source, 0}}, {{target, 0}},
                                          join(join(src_past, tgt_past), cond_block));
        case MeasureKind::DI:
            return analytic_rate(model, MeasureKind::TE, source, target, cond, spec) +
                   analytic_rate(model, MeasureKind::IIE, source, target, cond, spec);
    }
    throw std::logic_error("unknown measure kind");
}

CausalityGraph true_graph(const VarModel& model, double tol) {
    model.require_stationary();
    if (!(tol >= 0.0)) throw std::invalid_argument("tolerance must be >= 0");
    const Eigen::Index m = model.channel_count();

    CausalityGraph graph;
    graph.nodes = model.names;

    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
            if (i == j) continue;
            double strongest = 0.0;
            for (const auto& a : model.coeffs) strongest = std::max(strongest, std::abs(a(j, i)));
            if (strongest > tol) graph.directed.emplace_back(i, j);
        }

    // Zero precision entries are exactly the pairwise conditional
    // independences of the Gaussian innovations.
    const Eigen::MatrixXd precision =
        model.noise_cov.llt().solve(Eigen::MatrixXd::Identity(m, m));
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i + 1; j < m; ++j)
            if (std::abs(precision(i, j)) > tol) graph.undirected.emplace_back(i, j);

    return graph;
}

}  // namespace dinfo
