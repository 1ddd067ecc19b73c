#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "rea/errors.hpp"
#include "rea/noise_path.hpp"
#include "rea/state_vector.hpp"

namespace rea {

// Stationary solution of du - a Laplace u dt = noise, evaluated per mode by
// the exact-exponential discrete convolution of the path increments. Values
// are cached on the absolute slot grid at construction (single writer) and
// read-only afterwards, so differently shifted views of the same path see
// bitwise-identical values at the same absolute time.
//
// The convolution starts at the sampled window edge, so every queryable time
// carries at least `burn_in` of history; the per-mode truncation error bound
// exp(-a lambda_j burn_in) b_j / sqrt(2 a lambda_j) then applies a fortiori.
class OuProcess {
public:
    OuProcess(NoisePath path, double a, double burn_in, double tolerance = 0.0)
        : path_(std::move(path)), a_(a), burn_in_(burn_in) {
        if (a_ <= 0.0) fail(ErrorCode::config, "OuProcess: diffusion must be positive");
        if (burn_in_ <= 0.0) fail(ErrorCode::config, "OuProcess: burn_in must be positive");
        burn_slots_ = detail::grid_slot(burn_in_, path_.dt, ErrorCode::config, "burn_in");
        if (tolerance > 0.0) {
            for (std::size_t j = 0; j < path_.modes; ++j)
                if (truncation_bound(j) > tolerance)
                    fail(ErrorCode::config,
                         "OuProcess: burn_in too short for tolerance at mode " +
                             std::to_string(j + 1));
        }
        build_cache();
    }

    const NoisePath& path() const { return path_; }
    double diffusion() const { return a_; }
    double burn_in() const { return burn_in_; }

    double truncation_bound(std::size_t mode) const {
        const double l = (*path_.lambda)[mode];
        return std::exp(-a_ * l * burn_in_) * path_.b[mode] / std::sqrt(2.0 * a_ * l);
    }

    std::int64_t first_valid_slot() const { return path_.table->lo + burn_slots_; }

    double value_at_slot(std::size_t mode, std::int64_t slot) const {
        return cache_[mode][static_cast<std::size_t>(slot - path_.table->lo)];
    }

    void require_slot(std::int64_t slot, const char* what) const {
        if (slot < first_valid_slot() || slot > path_.table->hi)
            fail(ErrorCode::window_exhausted,
                 std::string(what) + ": window does not cover the burn-in horizon");
    }

    // U(t) at grid-aligned local time t.
    StateVector at(double t) const {
        const std::int64_t s = path_.slot_of(t);
        require_slot(s, "ou_at");
        std::vector<double> c(path_.modes);
        for (std::size_t j = 0; j < path_.modes; ++j) c[j] = value_at_slot(j, s);
        return StateVector(std::move(c), path_.lambda);
    }

    // Monitored functional ||U(t)||_3^2 + |int_0^t ||U||_4^2 ds| - C (1+|t|).
    double stationarity_functional(double t, double C) const {
        const std::int64_t s = path_.slot_of(t);
        require_slot(s, "stationarity_functional");
        require_slot(path_.anchor, "stationarity_functional");
        const StateVector u = at(t);
        double integral = 0.0;
        const std::int64_t from = std::min(path_.anchor, s), to = std::max(path_.anchor, s);
        for (std::int64_t q = from + 1; q <= to; ++q) {
            double n4 = 0.0;
            for (std::size_t j = 0; j < path_.modes; ++j) {
                const double l = (*path_.lambda)[j];
                const double v = value_at_slot(j, q);
                n4 += l * l * l * l * v * v;
            }
            integral += n4 * path_.dt;
        }
        return u.hs_norm_sq(3.0) + std::abs(integral) - C * (1.0 + std::abs(t));
    }

private:
    void build_cache() {
        const auto& table = *path_.table;
        const std::size_t n = static_cast<std::size_t>(table.hi - table.lo) + 1;
        cache_.assign(path_.modes, std::vector<double>(n, 0.0));
        for (std::size_t j = 0; j < path_.modes; ++j) {
            const double decay = std::exp(-a_ * (*path_.lambda)[j] * path_.dt);
            const double bj = path_.b[j];
            auto& c = cache_[j];
            const auto& v = table.values[j];
            c[0] = 0.0;
            for (std::size_t i = 1; i < n; ++i)
                c[i] = decay * c[i - 1] + bj * (v[i] - v[i - 1]);
        }
    }

    NoisePath path_;
    double a_;
    double burn_in_;
    std::int64_t burn_slots_ = 0;
    std::vector<std::vector<double>> cache_;
};

} // namespace rea
