#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "rea/errors.hpp"
#include "rea/point_cloud.hpp"

namespace rea {

// Finite covering of a parent cloud with a certified radius. ln(#centers) is
// the empirical entropy of the parent at scale delta.
struct Net {
    PointCloud centers;
    double delta = 0.0;
    std::size_t parent_size = 0;
    std::vector<std::size_t> center_index; // positions in the parent (greedy nets)

    std::size_t size() const { return centers.size(); }
    double entropy() const { return std::log(static_cast<double>(centers.size())); }
};

// Deterministic greedy pass in point order: a point becomes a center iff it
// is not within delta of an existing center. Ties break by input index.
inline Net greedy_net(const PointCloud& cloud, double delta) {
    if (cloud.empty()) fail(ErrorCode::empty_input, "greedy_net: empty cloud");
    if (delta <= 0.0) fail(ErrorCode::domain, "greedy_net: delta must be positive");

    Net net;
    net.centers = PointCloud(cloud.dim, cloud.norm_tag, cloud.lambda);
    net.delta = delta;
    net.parent_size = cloud.size();

    detail::GridIndex index(net.centers, delta);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto p = cloud.point(i);
        if (index.any_within(p, delta)) continue;
        net.centers.push(p);
        index.insert(net.centers.size() - 1, net.centers.point(net.centers.size() - 1));
        net.center_index.push_back(i);
    }
    return net;
}

inline double entropy_estimate(const PointCloud& cloud, double eps) {
    return greedy_net(cloud, eps).entropy();
}

// Exact covering check: max over parent points of the distance to centers.
inline double covering_radius(const PointCloud& parent, const PointCloud& centers) {
    if (parent.empty() || centers.empty())
        fail(ErrorCode::empty_input, "covering_radius: empty input");
    double worst = 0.0;
    for (std::size_t i = 0; i < parent.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        const auto p = parent.point(i);
        for (std::size_t j = 0; j < centers.size(); ++j)
            best = std::min(best, parent.distance(p, centers.point(j)));
        worst = std::max(worst, best);
    }
    return worst;
}

struct Rect {
    double x0, x1, y0, y1;
};

// Area-ratio weights of Lemma-5.3 type for the rectangle with vertices
// (x0,y0), (x1,y0), (x1,y1), (x0,y1): each weight is the normalised area of
// the sub-rectangle opposite its vertex. Exact partition of unity and exact
// reproduction of A as a convex combination of the vertices.
inline std::array<double, 4> barycentric_weights(const Rect& r, double ax, double ay) {
    const double ex = r.x1 - r.x0, ey = r.y1 - r.y0;
    if (ex < 0 || ey < 0) fail(ErrorCode::domain, "barycentric_weights: inverted rectangle");
    const double tolx = 1e-12 * std::max(1.0, std::abs(ex));
    const double toly = 1e-12 * std::max(1.0, std::abs(ey));
    if (ax < r.x0 - tolx || ax > r.x1 + tolx || ay < r.y0 - toly || ay > r.y1 + toly)
        fail(ErrorCode::domain, "barycentric_weights: point outside rectangle");
    const double fx = ex > 0 ? std::clamp((ax - r.x0) / ex, 0.0, 1.0) : 0.0;
    const double fy = ey > 0 ? std::clamp((ay - r.y0) / ey, 0.0, 1.0) : 0.0;
    return {(1 - fx) * (1 - fy), fx * (1 - fy), fx * fy, (1 - fx) * fy};
}

namespace detail {

struct RowHash {
    std::size_t operator()(const std::vector<std::uint64_t>& row) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (auto x : row) {
            h ^= x;
            h *= 0x100000001b3ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

} // namespace detail

// [W_1,...,W_n]_theta^alpha: all convex combinations sum theta_i u_i over
// tuples with pairwise distance <= alpha in the clouds' metric. Enumeration
// is lexicographic in member indices; exact duplicates are dropped keeping
// the first occurrence.
inline PointCloud blend_nets(std::span<const PointCloud> W, std::span<const double> theta,
                             double alpha) {
    if (W.empty()) fail(ErrorCode::empty_input, "blend_nets: no sets");
    if (theta.size() != W.size()) fail(ErrorCode::domain, "blend_nets: weight count mismatch");
    double sum = 0.0;
    for (double t : theta) {
        if (t < -1e-12) fail(ErrorCode::domain, "blend_nets: negative weight");
        sum += t;
    }
    if (std::abs(sum - 1.0) > 1e-9) fail(ErrorCode::domain, "blend_nets: weights must sum to 1");

    const std::size_t n = W.size();
    const std::size_t dim = W[0].dim;
    PointCloud out(dim, W[0].norm_tag, W[0].lambda);
    if (n == 1) {
        out.data = W[0].data;
        return out;
    }

    std::vector<std::size_t> pick(n, 0);
    std::vector<double> value(dim);
    std::unordered_set<std::vector<std::uint64_t>, detail::RowHash> seen;

    // depth-first over tuples, pruning on the pairwise constraint
    std::function<void(std::size_t)> rec = [&](std::size_t level) {
        if (level == n) {
            for (std::size_t j = 0; j < dim; ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < n; ++i) acc += theta[i] * W[i].point(pick[i])[j];
                value[j] = acc;
            }
            std::vector<std::uint64_t> bits(dim);
            for (std::size_t j = 0; j < dim; ++j) {
                std::uint64_t u;
                static_assert(sizeof(double) == sizeof(std::uint64_t));
                std::memcpy(&u, &value[j], sizeof(u));
                bits[j] = u;
            }
            if (seen.insert(bits).second) out.push(value);
            return;
        }
        for (std::size_t c = 0; c < W[level].size(); ++c) {
            bool ok = true;
            for (std::size_t i = 0; i < level && ok; ++i)
                ok = W[0].distance(W[i].point(pick[i]), W[level].point(c)) <= alpha;
            if (!ok) continue;
            pick[level] = c;
            rec(level + 1);
        }
    };
    rec(0);
    return out;
}

// Family of clouds over a scalar parameter, Lipschitz with constant lip_C in
// the symmetric distance.
struct CloudFamily {
    double y_lo = 0.0, y_hi = 1.0;
    double lip_C = 1.0;
    std::function<PointCloud(double)> at;
};

// Dyadic parameter-net construction: bracket delta between levels 2^-k,
// bracket y on the grid of pitch nu_k < C^-1 2^-k-4, build greedy nets at the
// four (level, grid) corners, and blend them with the area weights over the
// rectangle [2^-k, 2^1-k] x [y_j, y_j+1] with alpha = 2^-k-1.
inline Net param_net(const CloudFamily& family, double delta, double y) {
    if (delta <= 0.0 || delta > 1.0) fail(ErrorCode::domain, "param_net: delta must be in (0,1]");
    if (y < family.y_lo - 1e-12 || y > family.y_hi + 1e-12)
        fail(ErrorCode::domain, "param_net: parameter outside family interval");
    const double C = std::max(1.0, family.lip_C);

    int k = 1;
    while (std::ldexp(1.0, -k) >= delta) ++k;
    const double lev_lo = std::ldexp(1.0, -k), lev_hi = std::ldexp(1.0, 1 - k);

    const double nu_bound = 1.0 / (C * std::ldexp(1.0, k + 4));
    const auto N_k = static_cast<std::uint64_t>(std::floor(1.0 / nu_bound)) + 1;
    const double nu = 1.0 / static_cast<double>(N_k);
    const auto j = static_cast<std::int64_t>(std::floor(y / nu));
    const double yj = static_cast<double>(j) * nu, yj1 = static_cast<double>(j + 1) * nu;

    const auto clamp_y = [&](double v) { return std::clamp(v, family.y_lo, family.y_hi); };
    const double rad_k = std::ldexp(1.0, -k - 3), rad_k1 = std::ldexp(1.0, -k - 4);

    const Net n1 = greedy_net(family.at(clamp_y(yj)), rad_k1);  // A1 = (2^-k,  yj)
    const Net n2 = greedy_net(family.at(clamp_y(yj)), rad_k);   // A2 = (2^1-k, yj)
    const Net n3 = greedy_net(family.at(clamp_y(yj1)), rad_k);  // A3 = (2^1-k, yj1)
    const Net n4 = greedy_net(family.at(clamp_y(yj1)), rad_k1); // A4 = (2^-k,  yj1)

    const auto theta = barycentric_weights(Rect{lev_lo, lev_hi, yj, yj1}, delta, y);
    const PointCloud W[4] = {n1.centers, n2.centers, n3.centers, n4.centers};
    const double alpha = std::ldexp(1.0, -k - 1);
    PointCloud blended = blend_nets(std::span<const PointCloud>(W, 4),
                                    std::span<const double>(theta.data(), 4), alpha);

    const PointCloud query = family.at(y);
    if (blended.empty())
        fail(ErrorCode::estimation, "param_net: empty blend; family sampling too sparse");

    Net net;
    net.centers = std::move(blended);
    net.delta = delta;
    net.parent_size = query.size();

    // certify (both directions) against the queried cloud
    const double fwd = covering_radius(query, net.centers);
    const double bwd = covering_radius(net.centers, query);
    if (std::max(fwd, bwd) > delta * (1.0 + 1e-9))
        fail(ErrorCode::estimation,
             "param_net: certification failed (measured " + std::to_string(std::max(fwd, bwd)) +
                 " > delta " + std::to_string(delta) + "); increase family sampling density");
    return net;
}

// Lattice sampling of the V-ball of radius R, certified within `tol` in the
// H metric: modes whose whole coefficient range fits in half the budget are
// pinned to zero, the rest carry a uniform grid.
inline PointCloud ball_cloud(double R, double tol, const LambdaRef& lambda,
                             std::size_t max_points = 2000000) {
    const std::size_t dim = lambda->size();
    PointCloud cloud(dim, NormTag::H, lambda);
    if (R <= 0.0) {
        cloud.data.assign(dim, 0.0);
        return cloud;
    }
    if (tol <= 0.0) fail(ErrorCode::domain, "ball_cloud: tolerance must be positive");

    std::vector<double> axis(dim);
    for (std::size_t j = 0; j < dim; ++j) axis[j] = R / std::sqrt((*lambda)[j]);

    // smallest active prefix whose dropped tail stays under half the budget
    std::size_t active = dim;
    double tail = 0.0;
    while (active > 0) {
        const double cand = tail + axis[active - 1] * axis[active - 1];
        if (cand > tol * tol / 2.0) break;
        tail = cand;
        --active;
    }
    const double pitch =
        active > 0 ? tol * std::sqrt(2.0 / static_cast<double>(active)) : tol;

    std::vector<double> point(dim, 0.0);
    std::function<void(std::size_t)> rec = [&](std::size_t j) {
        if (j == active) {
            // keep the lattice point iff it is the rounding of a ball point
            double s = 0.0;
            for (std::size_t i = 0; i < active; ++i) {
                const double inner = std::max(0.0, std::abs(point[i]) - pitch / 2.0);
                s += (*lambda)[i] * inner * inner;
            }
            if (s <= R * R * (1.0 + 1e-12)) cloud.push(point);
            return;
        }
        const auto half = static_cast<std::int64_t>(std::floor(axis[j] / pitch)) + 1;
        for (std::int64_t q = -half; q <= half; ++q) {
            point[j] = static_cast<double>(q) * pitch;
            rec(j + 1);
            if (cloud.size() > max_points)
                fail(ErrorCode::config, "ball_cloud: lattice exceeds max_points; coarsen delta");
        }
        point[j] = 0.0;
    };
    rec(0);
    return cloud;
}

// Net of B_V(R) in the H norm within delta, realised as the dyadic parameter
// construction applied to scaled canonical lattice clouds; deterministic and
// independent of any path. Lipschitz in R by construction.
inline Net ball_net(double R, double delta, const LambdaRef& lambda,
                    double cloud_tol_factor = 0.25) {
    if (delta <= 0.0 || delta > 1.0) fail(ErrorCode::domain, "ball_net: delta must be in (0,1]");
    if (R < 0.0) fail(ErrorCode::domain, "ball_net: negative radius");
    const std::size_t dim = lambda->size();
    if (R == 0.0) {
        Net net;
        net.centers = PointCloud(dim, NormTag::H, lambda);
        net.centers.data.assign(dim, 0.0);
        net.delta = delta;
        net.parent_size = 1;
        return net;
    }

    // unit cloud dense enough for the finest corner net the query can demand
    const double unit_tol = cloud_tol_factor * delta / (16.0 * std::max(R, 1.0));
    const PointCloud unit = ball_cloud(1.0, unit_tol, lambda);

    CloudFamily family;
    family.y_lo = 0.0;
    family.y_hi = std::max(R * 2.0, 1.0);
    double max_h = 0.0;
    for (std::size_t i = 0; i < unit.size(); ++i) {
        double s = 0.0;
        for (double c : unit.point(i)) s += c * c;
        max_h = std::max(max_h, std::sqrt(s));
    }
    family.lip_C = std::max(1.0, max_h);
    family.at = [unit, dim, lambda](double y) {
        PointCloud c(dim, NormTag::H, lambda);
        c.data = unit.data;
        for (double& v : c.data) v *= y;
        return c;
    };
    return param_net(family, delta, R);
}

// Net of union_v (v + K): translate a single net of the K cloud by every
// element of V. Substituting V translates the output, giving the exact
// distance identity d^s(out(V1), out(V2)) <= d^s(V1, V2).
inline Net minkowski_net(const PointCloud& V_set, const PointCloud& K_cloud, double delta) {
    if (V_set.empty() || K_cloud.empty())
        fail(ErrorCode::empty_input, "minkowski_net: empty input");
    if (V_set.dim != K_cloud.dim) fail(ErrorCode::domain, "minkowski_net: dimension mismatch");
    const Net kn = greedy_net(K_cloud, delta);

    Net net;
    net.centers = PointCloud(V_set.dim, V_set.norm_tag, V_set.lambda);
    net.delta = delta;
    net.parent_size = V_set.size() * K_cloud.size();
    std::vector<double> tmp(V_set.dim);
    for (std::size_t i = 0; i < V_set.size(); ++i) {
        const auto v = V_set.point(i);
        for (std::size_t q = 0; q < kn.size(); ++q) {
            const auto w = kn.centers.point(q);
            for (std::size_t j = 0; j < V_set.dim; ++j) tmp[j] = v[j] + w[j];
            net.centers.push(tmp);
        }
    }
    return net;
}

} // namespace rea
