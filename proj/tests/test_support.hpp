#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dinfo/discrete_exact.hpp"
#include "dinfo/gaussian_oracle.hpp"
#include "dinfo/rng.hpp"
#include "dinfo/timeseries.hpp"

namespace testsup {

/// Random pmf over the joint outcome space: exponential draws, normalized.
inline dinfo::JointPmf random_pmf(int t, int ax, int ay, std::uint64_t seed) {
    dinfo::JointPmf pmf;
    pmf.t = t;
    pmf.ax = ax;
    pmf.ay = ay;
    std::size_t n = 1;
    for (int i = 0; i < t; ++i) n *= static_cast<std::size_t>(ax) * static_cast<std::size_t>(ay);
    pmf.probs.resize(n);
    dinfo::CounterRng rng(seed);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = -std::log(1.0 - rng.uniform(i));
        pmf.probs[i] = e;
        sum += e;
    }
    for (auto& p : pmf.probs) p /= sum;
    return pmf;
}

/// Feedback-free pmf: p(x,y) = prod_i p(x_i | x_past) p(y_i | x_{1:i}, y_past),
/// i.e. the feedforward-only factorization, so DI(x->y) = MI must hold.
inline dinfo::JointPmf feedback_free_pmf(int t, std::uint64_t seed) {
    dinfo::JointPmf pmf;
    pmf.t = t;
    pmf.ax = 2;
    pmf.ay = 2;
    const std::size_t n = std::size_t{1} << (2 * t);
    pmf.probs.assign(n, 0.0);
    dinfo::CounterRng rng(seed);
    std::uint64_t ctr = 0;

    // Kernels keyed by the conditioning prefix, values are P(symbol = 1).
    std::map<std::vector<int>, double> x_kernel, y_kernel;
    auto kernel_p1 = [&](std::map<std::vector<int>, double>& kernel, const std::vector<int>& key) {
        auto it = kernel.find(key);
        if (it == kernel.end())
            it = kernel.emplace(key, 0.05 + 0.9 * rng.uniform(ctr++)).first;
        return it->second;
    };

    for (std::size_t idx = 0; idx < n; ++idx) {
        std::vector<int> xs(static_cast<std::size_t>(t)), ys(static_cast<std::size_t>(t));
        std::size_t rem = idx;
        for (int v = 2 * t - 1; v >= 0; --v) {
            const int digit = static_cast<int>(rem % 2);
            rem /= 2;
            if (v < t)
                xs[static_cast<std::size_t>(v)] = digit;
            else
                ys[static_cast<std::size_t>(v - t)] = digit;
        }
        double p = 1.0;
        for (int i = 0; i < t; ++i) {
            std::vector<int> xkey(xs.begin(), xs.begin() + i);
            xkey.insert(xkey.begin(), 0);  // tag to separate the two kernel families
            const double px1 = kernel_p1(x_kernel, xkey);
            p *= xs[static_cast<std::size_t>(i)] == 1 ? px1 : 1.0 - px1;

            std::vector<int> ykey(xs.begin(), xs.begin() + i + 1);
            ykey.insert(ykey.end(), ys.begin(), ys.begin() + i);
            ykey.insert(ykey.begin(), 1);
            const double py1 = kernel_p1(y_kernel, ykey);
            p *= ys[static_cast<std::size_t>(i)] == 1 ? py1 : 1.0 - py1;
        }
        pmf.probs[idx] = p;
    }
    return pmf;
}

/// Product pmf p_x (x) p_y for t=1 alphabets.
inline dinfo::JointPmf product_pmf(const std::vector<double>& px, const std::vector<double>& py,
                                   int t, int ax, int ay) {
    dinfo::JointPmf pmf;
    pmf.t = t;
    pmf.ax = ax;
    pmf.ay = ay;
    pmf.probs.resize(px.size() * py.size());
    for (std::size_t i = 0; i < px.size(); ++i)
        for (std::size_t j = 0; j < py.size(); ++j) pmf.probs[i * py.size() + j] = px[i] * py[j];
    return pmf;
}

inline dinfo::VarModel ring_model(double a, double b, double c,
                                  const Eigen::MatrixXd& noise_cov) {
    // x <- z, y <- x, z <- y (each through one lag)
    dinfo::VarModel model;
    Eigen::MatrixXd a1 = Eigen::MatrixXd::Zero(3, 3);
    a1(0, 2) = a;
    a1(1, 0) = b;
    a1(2, 1) = c;
    model.coeffs = {a1};
    model.noise_cov = noise_cov;
    model.names = {"x", "y", "z"};
    return model;
}

/// Bivariate model: x white, y_t = b x_{t-1} + noise; unit noise variances.
inline dinfo::VarModel white_x_model(double b, double noise_corr = 0.0) {
    dinfo::VarModel model;
    Eigen::MatrixXd a1 = Eigen::MatrixXd::Zero(2, 2);
    a1(1, 0) = b;
    model.coeffs = {a1};
    model.noise_cov = Eigen::MatrixXd::Identity(2, 2);
    model.noise_cov(0, 1) = model.noise_cov(1, 0) = noise_corr;
    model.names = {"x", "y"};
    return model;
}

/// M independent white channels.
inline dinfo::VarModel white_model(int m) {
    dinfo::VarModel model;
    model.noise_cov = Eigen::MatrixXd::Identity(m, m);
    for (int i = 0; i < m; ++i) model.names.push_back("x" + std::to_string(i + 1));
    return model;
}

/// n x d standard normal cloud from the counter stream.
inline dinfo::RowMatrix gaussian_cloud(std::size_t n, std::size_t d, std::uint64_t seed) {
    dinfo::CounterRng rng(seed);
    dinfo::RowMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rng.normal(i * d + j);
    return m;
}

inline double binary_entropy_nats(double p) {
    return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

}  // namespace testsup
