#include "dinfo/fp_workspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dinfo/neighbors.hpp"
#include "dinfo/rng.hpp"

namespace dinfo {

namespace detail {

namespace {

constexpr std::size_t kSeg = 256;     // uniform segment width (positions)
constexpr int kQuantLevels = 65000;   // int16 buckets per dimension

struct SurvivorBuffers {
    std::vector<std::int32_t> lanes;                     // phase-1 survivors
    std::vector<std::pair<std::int32_t, double>> ball;   // (pos, exact z dist)
    std::vector<double> joint;                           // joint dists < r
};

}  // namespace

/// Search structure behind FpCmiWorkspace. Points are ordered by a kd
/// decomposition of the fixed-Z subspace and cut into uniform segments; per
/// segment the fixed-Z coordinates are mirrored as quantized int16 columns.
///
/// A query picks a radius r (a guess; any value gives exact results, only
/// speed varies), collects C = { j : zfix-dist < r } through a conservative
/// quantized prefilter plus exact confirmation, and accepts r if at least k
/// joint distances inside C fall below r — every point outside C has joint
/// distance >= r, so the k-th smallest inside C is then the global k-th
/// smallest. Counts follow from C because every z-ball member of radius
/// eps <= r lies in C. Failed guesses retry with a larger radius.
class JointBallIndex {
public:
    JointBallIndex(const RowMatrix& z_fixed, const RowMatrix& y, int /*leaf_size*/)
        : n_(static_cast<std::size_t>(z_fixed.rows())),
          dzf_(static_cast<std::size_t>(z_fixed.cols())),
          dy_(static_cast<std::size_t>(y.cols())) {
        if (dzf_ < 1) throw std::invalid_argument("index needs a nonempty fixed z block");
        if (n_ < 2) throw std::invalid_argument("index needs at least 2 samples");

        order_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) order_[i] = static_cast<std::int32_t>(i);
        kd_order(z_fixed, 0, static_cast<std::int32_t>(n_));
        pos_of_.resize(n_);
        for (std::size_t pos = 0; pos < n_; ++pos)
            pos_of_[static_cast<std::size_t>(order_[pos])] = static_cast<std::int32_t>(pos);

        fixed_.resize(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(dzf_ + dy_));
        for (std::size_t pos = 0; pos < n_; ++pos) {
            const Eigen::Index o = order_[pos];
            fixed_.row(static_cast<Eigen::Index>(pos)).head(static_cast<Eigen::Index>(dzf_)) =
                z_fixed.row(o);
            if (dy_ > 0)
                fixed_.row(static_cast<Eigen::Index>(pos)).tail(static_cast<Eigen::Index>(dy_)) =
                    y.row(o);
        }

        // per-dimension quantization of the fixed-Z block
        lo_.resize(dzf_);
        step_.resize(dzf_);
        for (std::size_t j = 0; j < dzf_; ++j) {
            const auto col = z_fixed.col(static_cast<Eigen::Index>(j));
            const double lo = col.minCoeff();
            const double hi = col.maxCoeff();
            lo_[j] = lo;
            step_[j] = hi > lo ? (hi - lo) / kQuantLevels : 1.0;
        }

        n_segments_ = (n_ + kSeg - 1) / kSeg;
        qsoa_.assign(n_segments_ * dzf_ * kSeg, 0);
        seg_lo_.assign(n_segments_ * dzf_, std::numeric_limits<double>::infinity());
        seg_hi_.assign(n_segments_ * dzf_, -std::numeric_limits<double>::infinity());
        for (std::size_t pos = 0; pos < n_; ++pos) {
            const std::size_t s = pos / kSeg;
            const std::size_t lane = pos % kSeg;
            for (std::size_t j = 0; j < dzf_; ++j) {
                const double v = fixed_(static_cast<Eigen::Index>(pos), static_cast<Eigen::Index>(j));
                qsoa_[(s * dzf_ + j) * kSeg + lane] = quantize(v, j);
                seg_lo_[s * dzf_ + j] = std::min(seg_lo_[s * dzf_ + j], v);
                seg_hi_[s * dzf_ + j] = std::max(seg_hi_[s * dzf_ + j], v);
            }
        }
    }

    struct Counts {
        double eps = 0.0;
        std::int64_t nz = 0, nxz = 0, nyz = 0;
    };

    std::size_t n() const { return n_; }

    void gather(const RowMatrix& m, std::vector<double>& out) const {
        const std::size_t cols = static_cast<std::size_t>(m.cols());
        out.resize(n_ * cols);
        for (std::size_t pos = 0; pos < n_; ++pos)
            std::memcpy(out.data() + pos * cols, m.row(order_[pos]).data(), cols * sizeof(double));
    }

    /// Exact k-th joint neighbor distance and FP counts for one query.
    /// radius_hint seeds the guess; any value is safe. Thread-safe.
    Counts query(std::size_t orig_idx, int k, const double* xg, std::size_t dx, const double* zvg,
                 std::size_t dzv, double radius_hint, SurvivorBuffers& buf) const {
        const std::size_t pos = static_cast<std::size_t>(pos_of_[orig_idx]);
        const double* qf = fixed_.row(static_cast<Eigen::Index>(pos)).data();
        const double* qx = xg + pos * dx;
        const double* qzv = dzv > 0 ? zvg + pos * dzv : nullptr;

        // Valid upper bound on the k-th joint distance from temporal
        // neighbors (embedded rows of nearby times share coordinates).
        double warm[64];
        int warm_count = 0;
        for (std::int64_t d = 1; d <= k + 2 && warm_count < 60; ++d) {
            for (const std::int64_t o : {static_cast<std::int64_t>(orig_idx) - d,
                                         static_cast<std::int64_t>(orig_idx) + d}) {
                if (o < 0 || o >= static_cast<std::int64_t>(n_)) continue;
                const std::size_t cp = static_cast<std::size_t>(pos_of_[static_cast<std::size_t>(o)]);
                warm[warm_count++] = joint_distance(cp, qf, qx, qzv, xg, zvg, dx, dzv);
            }
        }
        double tau0 = std::numeric_limits<double>::infinity();
        if (warm_count >= k) {
            std::nth_element(warm, warm + (k - 1), warm + warm_count);
            tau0 = std::nextafter(warm[k - 1], std::numeric_limits<double>::infinity());
        }

        double r = radius_hint > 0.0 ? std::min(radius_hint, tau0) : tau0;
        if (!(r > 0.0) || !std::isfinite(r)) r = std::isfinite(tau0) ? tau0 : 1.0;

        for (;;) {
            const bool exhaustive = !std::isfinite(r);
            if (exhaustive) {
                // degenerate fallback: scan everything
                r = std::numeric_limits<double>::max();
            }
            collect(pos, qf, qx, qzv, xg, zvg, dx, dzv, r, buf);
            if (static_cast<int>(buf.joint.size()) >= k) {
                std::nth_element(buf.joint.begin(), buf.joint.begin() + (k - 1), buf.joint.end());
                const double eps = buf.joint[static_cast<std::size_t>(k - 1)];
                Counts out;
                out.eps = eps;
                if (eps <= 0.0) return out;
                for (const auto& [cand_pos, dist_z] : buf.ball) {
                    if (dist_z >= eps) continue;
                    ++out.nz;
                    const std::size_t cp = static_cast<std::size_t>(cand_pos);
                    if (within_chebyshev(qx, xg + cp * dx, dx, eps)) ++out.nxz;
                    if (dy_ == 0 ||
                        within_chebyshev(qf + dzf_,
                                         fixed_.row(static_cast<Eigen::Index>(cp)).data() + dzf_,
                                         dy_, eps))
                        ++out.nyz;
                }
                return out;
            }
            if (exhaustive)
                throw std::logic_error("joint neighbor search failed on a full scan");
            // tau0 is a valid upper bound on the k-th distance, so the guess
            // ladder always terminates at or before it.
            r = std::min(r * 1.7, tau0);
        }
    }

private:
    std::uint16_t quantize(double v, std::size_t j) const {
        const double q = std::round((v - lo_[j]) / step_[j]);
        if (q <= 0.0) return 0;
        if (q >= kQuantLevels) return static_cast<std::uint16_t>(kQuantLevels);
        return static_cast<std::uint16_t>(q);
    }

    void kd_order(const RowMatrix& z_fixed, std::int32_t begin, std::int32_t end) {
        if (end - begin <= static_cast<std::int32_t>(kSeg) / 2) return;
        std::size_t split_dim = 0;
        double width = -1.0;
        for (std::size_t j = 0; j < dzf_; ++j) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (std::int32_t i = begin; i < end; ++i) {
                const double v =
                    z_fixed(order_[static_cast<std::size_t>(i)], static_cast<Eigen::Index>(j));
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (hi - lo > width) {
                width = hi - lo;
                split_dim = j;
            }
        }
        if (width <= 0.0) return;
        const std::int32_t mid = begin + (end - begin) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](std::int32_t a, std::int32_t b) {
                             return z_fixed(a, static_cast<Eigen::Index>(split_dim)) <
                                    z_fixed(b, static_cast<Eigen::Index>(split_dim));
                         });
        kd_order(z_fixed, begin, mid);
        kd_order(z_fixed, mid, end);
    }

    double joint_distance(std::size_t cand_pos, const double* qf, const double* qx,
                          const double* qzv, const double* xg, const double* zvg, std::size_t dx,
                          std::size_t dzv) const {
        const double* pf = fixed_.row(static_cast<Eigen::Index>(cand_pos)).data();
        double d = chebyshev(qf, pf, dzf_ + dy_);
        d = std::max(d, chebyshev(qx, xg + cand_pos * dx, dx));
        if (dzv > 0) d = std::max(d, chebyshev(qzv, zvg + cand_pos * dzv, dzv));
        return d;
    }

    // C = { j : zfix-dist(q, j) < r } with exact membership, plus the exact
    // z distance per member and every joint distance < r among them.
    void collect(std::size_t skip_pos, const double* qf, const double* qx, const double* qzv,
                 const double* xg, const double* zvg, std::size_t dx, std::size_t dzv, double r,
                 SurvivorBuffers& buf) const {
        buf.ball.clear();
        buf.joint.clear();

        std::int32_t t16[64];
        bool dim_active[64];
        std::uint16_t q16[64];
        for (std::size_t j = 0; j < dzf_; ++j) {
            const double t = std::ceil(r / step_[j]) + 1.0;
            dim_active[j] = t <= 65535.0;
            t16[j] = dim_active[j] ? static_cast<std::int32_t>(t) : 0;
            q16[j] = quantize(qf[j], j);
        }

        std::uint8_t pass[kSeg];
        for (std::size_t s = 0; s < n_segments_; ++s) {
            // segment box prune in exact arithmetic
            bool out_of_reach = false;
            const double* lo = seg_lo_.data() + s * dzf_;
            const double* hi = seg_hi_.data() + s * dzf_;
            for (std::size_t j = 0; j < dzf_; ++j) {
                if (lo[j] - qf[j] >= r || qf[j] - hi[j] >= r) {
                    out_of_reach = true;
                    break;
                }
            }
            if (out_of_reach) continue;

            const std::size_t seg_begin = s * kSeg;
            const std::size_t seg_len = std::min(kSeg, n_ - seg_begin);
            std::memset(pass, 1, seg_len);
            if (seg_len < kSeg) std::memset(pass + seg_len, 0, kSeg - seg_len);

            // conservative quantized prefilter, one dimension at a time
            for (std::size_t j = 0; j < dzf_; ++j) {
                if (!dim_active[j]) continue;
                const std::uint16_t* col = qsoa_.data() + (s * dzf_ + j) * kSeg;
                const std::uint16_t qv = q16[j];
                const std::int32_t t = t16[j];
                for (std::size_t l = 0; l < kSeg; ++l) {
                    const std::uint16_t d =
                        col[l] > qv ? static_cast<std::uint16_t>(col[l] - qv)
                                    : static_cast<std::uint16_t>(qv - col[l]);
                    pass[l] &= static_cast<std::uint8_t>(static_cast<std::int32_t>(d) < t);
                }
            }

            for (std::size_t l = 0; l < seg_len; ++l) {
                if (!pass[l]) continue;
                const std::size_t cp = seg_begin + l;
                if (cp == skip_pos) continue;
                const double* pf = fixed_.row(static_cast<Eigen::Index>(cp)).data();
                const double dzfix = chebyshev_bounded(qf, pf, dzf_, r);
                if (dzfix >= r) continue;
                double dist_z = dzfix;
                double d_joint = dzfix;
                bool joint_in = true;
                if (dzv > 0) {
                    const double dv = chebyshev_bounded(qzv, zvg + cp * dzv, dzv, r);
                    if (dv >= r) {
                        // outside the z ball and the joint ball alike
                        continue;
                    }
                    dist_z = std::max(dist_z, dv);
                    d_joint = dist_z;
                }
                buf.ball.emplace_back(static_cast<std::int32_t>(cp), dist_z);
                const double dxv = chebyshev_bounded(qx, xg + cp * dx, dx, r);
                if (dxv >= r) joint_in = false;
                if (joint_in && dy_ > 0) {
                    const double dyv = chebyshev_bounded(qf + dzf_, pf + dzf_, dy_, r);
                    if (dyv >= r)
                        joint_in = false;
                    else
                        d_joint = std::max(d_joint, dyv);
                }
                if (joint_in) buf.joint.push_back(std::max(d_joint, dxv));
            }
        }
    }

    std::size_t n_;
    std::size_t dzf_;
    std::size_t dy_;
    std::size_t n_segments_ = 0;
    std::vector<std::int32_t> order_;   // pos -> original index
    std::vector<std::int32_t> pos_of_;  // original index -> pos
    RowMatrix fixed_;                   // gathered [z_fixed | y], kd order
    std::vector<double> lo_, step_;     // per-dim quantization
    std::vector<std::uint16_t> qsoa_;   // segment-major quantized zfix
    std::vector<double> seg_lo_, seg_hi_;
};

}  // namespace detail

FpCmiWorkspace::FpCmiWorkspace(const RowMatrix& z_fixed, const RowMatrix& y,
                               const EstimatorConfig& cfg)
    : cfg_(cfg) {
    cfg.validate();
    if (z_fixed.cols() < 2)
        throw std::invalid_argument("FpCmiWorkspace needs at least 2 fixed z columns");
    if (y.rows() != z_fixed.rows())
        throw std::invalid_argument("FpCmiWorkspace: block row counts differ");
    if (!z_fixed.allFinite() || !y.allFinite())
        throw std::invalid_argument("FpCmiWorkspace: non-finite entries");
    if (z_fixed.cols() > 60 || y.cols() > 60)
        throw std::invalid_argument("FpCmiWorkspace: block dimension cap exceeded");
    index_ = std::make_unique<detail::JointBallIndex>(z_fixed, y, 64);
}

FpCmiWorkspace::~FpCmiWorkspace() = default;
FpCmiWorkspace::FpCmiWorkspace(FpCmiWorkspace&&) noexcept = default;
FpCmiWorkspace& FpCmiWorkspace::operator=(FpCmiWorkspace&&) noexcept = default;

Eigen::Index FpCmiWorkspace::sample_count() const {
    return static_cast<Eigen::Index>(index_->n());
}

double FpCmiWorkspace::evaluate(const RowMatrix& x, const RowMatrix& z_var) const {
    const std::size_t n = index_->n();
    if (static_cast<std::size_t>(x.rows()) != n || x.cols() < 1)
        throw std::invalid_argument("FpCmiWorkspace: x block shape mismatch");
    if (z_var.cols() > 0 && static_cast<std::size_t>(z_var.rows()) != n)
        throw std::invalid_argument("FpCmiWorkspace: z_var block shape mismatch");
    if (!x.allFinite() || !z_var.allFinite())
        throw std::invalid_argument("FpCmiWorkspace: non-finite entries");
    if (static_cast<std::size_t>(cfg_.k) >= n)
        throw std::invalid_argument("estimator k must be < sample count");

    const std::size_t dx = static_cast<std::size_t>(x.cols());
    const std::size_t dzv = static_cast<std::size_t>(z_var.cols());
    std::vector<double> xg, zvg;
    index_->gather(x, xg);
    if (dzv > 0) index_->gather(z_var, zvg);

    std::vector<std::int64_t> nz(n), nxz(n), nyz(n);
    std::vector<double> eps(n);
#pragma omp parallel
    {
        detail::SurvivorBuffers buf;
        double hint = 0.0;  // per-thread running guess; results do not depend on it
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
            const std::size_t qi = static_cast<std::size_t>(i);
            const auto counts = index_->query(qi, cfg_.k, xg.data(), dx,
                                              dzv > 0 ? zvg.data() : nullptr, dzv, hint, buf);
            hint = 1.25 * counts.eps;
            eps[qi] = counts.eps;
            nz[qi] = counts.nz;
            nxz[qi] = counts.nxz;
            nyz[qi] = counts.nyz;
        }
    }
    for (double e : eps)
        if (e <= 0.0)
            throw std::invalid_argument(
                "duplicate points after jitter: k-th neighbor distance is zero; "
                "increase jitter_scale");
    return detail::fp_combine(cfg_.k, nz, nxz, nyz);
}

}  // namespace dinfo
