#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "rea/errors.hpp"
#include "rea/state_vector.hpp"

namespace rea {

enum class NormTag { H, V };

// Finite subset of state space with flat row-major storage. Point order is
// part of the identity: selections (greedy nets, blends) are deterministic
// in input order, which stands in for the paper's measurable selection.
struct PointCloud {
    std::size_t dim = 0;
    NormTag norm_tag = NormTag::H;
    LambdaRef lambda;
    std::vector<double> data;

    PointCloud() = default;
    PointCloud(std::size_t d, NormTag tag, LambdaRef l)
        : dim(d), norm_tag(tag), lambda(std::move(l)) {
        if (dim == 0) fail(ErrorCode::config, "point cloud dimension must be positive");
        if (!lambda || lambda->size() != dim)
            fail(ErrorCode::config, "point cloud / eigenvalue size mismatch");
    }

    std::size_t size() const { return dim ? data.size() / dim : 0; }
    bool empty() const { return data.empty(); }

    std::span<const double> point(std::size_t i) const {
        return {data.data() + i * dim, dim};
    }

    void push(std::span<const double> p) {
        data.insert(data.end(), p.begin(), p.end());
    }
    void push(const StateVector& s) { push(std::span<const double>(s.coeffs)); }

    StateVector state(std::size_t i) const {
        auto p = point(i);
        return StateVector(std::vector<double>(p.begin(), p.end()), lambda);
    }

    double metric_weight(std::size_t j) const {
        return norm_tag == NormTag::V ? (*lambda)[j] : 1.0;
    }

    double distance(std::span<const double> a, std::span<const double> b) const {
        double acc = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            const double d = a[j] - b[j];
            acc += metric_weight(j) * d * d;
        }
        return std::sqrt(acc);
    }
};

inline PointCloud cloud_from_states(const std::vector<StateVector>& pts, NormTag tag) {
    if (pts.empty()) fail(ErrorCode::empty_input, "cloud_from_states: no points");
    PointCloud c(pts.front().size(), tag, pts.front().lambda);
    for (const auto& s : pts) c.push(s);
    return c;
}

namespace detail {

// Uniform-grid index over the first (up to) three metric-weighted
// coordinates; candidates from neighbouring cells are then checked with the
// exact distance. Query radius must not exceed the cell size.
class GridIndex {
public:
    GridIndex(const PointCloud& cloud, double cell)
        : cloud_(cloud), cell_(cell > 0 ? cell : 1.0), hashed_(std::min<std::size_t>(cloud.dim, 3)) {
        for (std::size_t j = 0; j < hashed_; ++j)
            w_.push_back(std::sqrt(cloud.metric_weight(j)));
    }

    void insert(std::size_t idx, std::span<const double> p) {
        buckets_[cell_key(p)].push_back(idx);
    }

    // Any indexed point within `radius` (radius <= cell size) of p?
    bool any_within(std::span<const double> p, double radius) const {
        std::int64_t base[3] = {0, 0, 0};
        for (std::size_t j = 0; j < hashed_; ++j)
            base[j] = static_cast<std::int64_t>(std::floor(w_[j] * p[j] / cell_));
        std::int64_t d0max = hashed_ > 0 ? 1 : 0;
        std::int64_t d1max = hashed_ > 1 ? 1 : 0;
        std::int64_t d2max = hashed_ > 2 ? 1 : 0;
        for (std::int64_t d0 = -d0max; d0 <= d0max; ++d0)
            for (std::int64_t d1 = -d1max; d1 <= d1max; ++d1)
                for (std::int64_t d2 = -d2max; d2 <= d2max; ++d2) {
                    const auto it = buckets_.find(pack(base[0] + d0, base[1] + d1, base[2] + d2));
                    if (it == buckets_.end()) continue;
                    for (std::size_t idx : it->second)
                        if (cloud_.distance(p, cloud_.point(idx)) <= radius) return true;
                }
        return false;
    }

private:
    std::uint64_t cell_key(std::span<const double> p) const {
        std::int64_t c[3] = {0, 0, 0};
        for (std::size_t j = 0; j < hashed_; ++j)
            c[j] = static_cast<std::int64_t>(std::floor(w_[j] * p[j] / cell_));
        return pack(c[0], c[1], c[2]);
    }

    static std::uint64_t pack(std::int64_t a, std::int64_t b, std::int64_t c) {
        const std::uint64_t h1 = static_cast<std::uint64_t>(a) * 0x9e3779b97f4a7c15ULL;
        const std::uint64_t h2 = static_cast<std::uint64_t>(b) * 0xc2b2ae3d27d4eb4fULL;
        const std::uint64_t h3 = static_cast<std::uint64_t>(c) * 0x165667b19e3779f9ULL;
        return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6)) ^ (h3 << 1);
    }

    const PointCloud& cloud_;
    double cell_;
    std::size_t hashed_;
    std::vector<double> w_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

} // namespace detail

} // namespace rea
