#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rea/errors.hpp"
#include "rea/rng.hpp"
#include "rea/state_vector.hpp"

namespace rea {

namespace detail {

// Rounds t to the nearest grid slot, failing if t is not grid-aligned.
inline std::int64_t grid_slot(double t, double dt, ErrorCode code, const char* what) {
    const double q = t / dt;
    const double r = std::round(q);
    if (std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q)))
        fail(code, std::string(what) + ": value " + std::to_string(t) +
                       " is not a multiple of dt = " + std::to_string(dt));
    return static_cast<std::int64_t>(r);
}

// Cumulative per-mode Brownian values on an absolute slot grid, anchored so
// that the value at absolute slot 0 is exactly zero. Shifted paths share the
// table, so overlapping evaluations are bitwise identical by construction.
struct WienerTable {
    std::uint64_t seed = 0;
    double dt = 0.0;
    double original_dt = 0.0; // dt at sampling time; keys refinement draws
    std::int64_t lo = 0, hi = 0; // inclusive slot range
    std::vector<std::vector<double>> values; // [mode][slot - lo]

    double at(std::size_t mode, std::int64_t slot) const {
        return values[mode][static_cast<std::size_t>(slot - lo)];
    }
};

inline std::shared_ptr<const WienerTable> build_table(std::uint64_t seed, double dt,
                                                      std::int64_t lo, std::int64_t hi,
                                                      std::size_t modes) {
    auto table = std::make_shared<WienerTable>();
    table->seed = seed;
    table->dt = dt;
    table->original_dt = dt;
    table->lo = lo;
    table->hi = hi;
    table->values.assign(modes, std::vector<double>(static_cast<std::size_t>(hi - lo) + 1));
    const double sdt = std::sqrt(dt);
    for (std::size_t m = 0; m < modes; ++m) {
        auto& v = table->values[m];
        const std::size_t i0 = static_cast<std::size_t>(-lo); // slot 0
        v[i0] = 0.0;
        for (std::int64_t s = 0; s + 1 <= hi; ++s) {
            const double inc = sdt * rng::gaussian(rng::key(seed, rng::kIncrement, m,
                                                            static_cast<std::uint64_t>(s)));
            v[static_cast<std::size_t>(s + 1 - lo)] = v[static_cast<std::size_t>(s - lo)] + inc;
        }
        for (std::int64_t s = 0; s - 1 >= lo; --s) {
            const double inc = sdt * rng::gaussian(rng::key(seed, rng::kIncrement, m,
                                                            static_cast<std::uint64_t>(s - 1)));
            v[static_cast<std::size_t>(s - 1 - lo)] = v[static_cast<std::size_t>(s - lo)] - inc;
        }
    }
    return table;
}

} // namespace detail

// Discretised two-sided Wiener path per spectral mode. Immutable after
// construction; shift/refine return new views or new tables. All values are
// pure functions of (seed, parameters).
struct NoisePath {
    std::uint64_t seed = 0;
    double dt = 0.0;
    std::size_t modes = 0;
    std::vector<double> b;
    LambdaRef lambda;

    std::shared_ptr<const detail::WienerTable> table;
    std::int64_t anchor = 0;         // absolute slot of local time 0
    std::int64_t lo = 0, hi = 0;     // absolute slot window

    double t_min() const { return static_cast<double>(lo - anchor) * dt; }
    double t_max() const { return static_cast<double>(hi - anchor) * dt; }

    std::int64_t slot_of(double t, ErrorCode code = ErrorCode::alignment) const {
        return anchor + detail::grid_slot(t, dt, code, "time");
    }

    bool in_window(std::int64_t slot) const { return slot >= lo && slot <= hi; }

    void require_window(std::int64_t slot, const char* what) const {
        if (!in_window(slot))
            fail(ErrorCode::window_exhausted,
                 std::string(what) + ": requested slot outside sampled window [" +
                     std::to_string(t_min()) + ", " + std::to_string(t_max()) + "]");
    }

    // beta_j at grid-aligned local time t.
    double value(std::size_t mode, double t) const {
        const std::int64_t s = slot_of(t, ErrorCode::alignment);
        require_window(s, "path value");
        return table->at(mode, s) - table->at(mode, anchor);
    }

    double value_at_slot(std::size_t mode, std::int64_t s) const {
        return table->at(mode, s) - table->at(mode, anchor);
    }

    // Tail budget of the truncated expansion: sum lambda_j^3 b_j^2.
    double b3_diagnostic() const {
        double acc = 0.0;
        for (std::size_t j = 0; j < modes; ++j) {
            const double l = (*lambda)[j];
            acc += l * l * l * b[j] * b[j];
        }
        return acc;
    }
};

struct Window {
    double t_min;
    double t_max;
};

inline NoisePath sample_path(std::uint64_t seed, Window window, double dt, std::size_t modes,
                             std::vector<double> b, std::vector<double> lambda_values) {
    if (modes == 0) fail(ErrorCode::config, "sample_path: at least one mode required");
    if (dt <= 0.0) fail(ErrorCode::config, "sample_path: dt must be positive");
    if (b.size() != modes || lambda_values.size() != modes)
        fail(ErrorCode::config, "sample_path: b and lambda must have length J");
    for (std::size_t j = 0; j < modes; ++j) {
        if (b[j] < 0.0) fail(ErrorCode::config, "sample_path: b_j must be non-negative");
        if (lambda_values[j] <= 0.0 || (j > 0 && lambda_values[j] <= lambda_values[j - 1]))
            fail(ErrorCode::config, "sample_path: lambda must be positive and strictly increasing");
    }
    if (!(window.t_min <= 0.0 && window.t_max >= 0.0))
        fail(ErrorCode::config, "sample_path: window must contain 0");
    const std::int64_t lo = detail::grid_slot(window.t_min, dt, ErrorCode::config, "window t_min");
    const std::int64_t hi = detail::grid_slot(window.t_max, dt, ErrorCode::config, "window t_max");
    if (hi <= lo) fail(ErrorCode::config, "sample_path: empty window");

    NoisePath p;
    p.seed = seed;
    p.dt = dt;
    p.modes = modes;
    p.b = std::move(b);
    p.lambda = make_lambda(std::move(lambda_values));
    p.table = detail::build_table(seed, dt, lo, hi, modes);
    p.anchor = 0;
    p.lo = lo;
    p.hi = hi;
    return p;
}

// (theta_tau omega)(s) = omega(tau + s) - omega(tau): translate the anchor.
inline NoisePath shift(const NoisePath& p, double tau) {
    const std::int64_t d = detail::grid_slot(tau, p.dt, ErrorCode::alignment, "shift tau");
    NoisePath q = p;
    q.anchor = p.anchor + d;
    if (q.anchor < p.lo || q.anchor > p.hi)
        fail(ErrorCode::window_exhausted, "shift: new origin falls outside the sampled window");
    return q;
}

// zeta(t) = sum_j b_j beta_j(t) e_j, as a coefficient vector.
inline StateVector zeta_at(const NoisePath& p, double t) {
    const std::int64_t s = p.slot_of(t);
    p.require_window(s, "zeta_at");
    std::vector<double> c(p.modes);
    for (std::size_t j = 0; j < p.modes; ++j) c[j] = p.b[j] * p.value_at_slot(j, s);
    return StateVector(std::move(c), p.lambda);
}

// Brownian-bridge conditional refinement; coarse-grid values are copied
// bitwise, interior draws are keyed by (seed, mode, fine index, ratio).
inline NoisePath refine(const NoisePath& p, double new_dt) {
    if (new_dt <= 0.0) fail(ErrorCode::config, "refine: new_dt must be positive");
    const double q = p.dt / new_dt;
    const double rq = std::round(q);
    if (std::abs(q - rq) > 1e-9 * std::max(1.0, q) || rq < 1.0)
        fail(ErrorCode::config, "refine: new_dt must divide dt");
    const auto m = static_cast<std::int64_t>(rq);
    if (m == 1) return p;

    const auto ratio_to_original =
        static_cast<std::uint64_t>(std::llround(p.table->original_dt / new_dt));
    const std::uint64_t salt = rng::splitmix(rng::kBridge ^ ratio_to_original);

    auto fine = std::make_shared<detail::WienerTable>();
    fine->seed = p.seed;
    fine->dt = new_dt;
    fine->original_dt = p.table->original_dt;
    fine->lo = p.table->lo * m;
    fine->hi = p.table->hi * m;
    fine->values.assign(p.modes,
                        std::vector<double>(static_cast<std::size_t>(fine->hi - fine->lo) + 1));

    for (std::size_t mode = 0; mode < p.modes; ++mode) {
        auto& v = fine->values[mode];
        for (std::int64_t cs = p.table->lo; cs < p.table->hi; ++cs) {
            const double left = p.table->at(mode, cs);
            const double right = p.table->at(mode, cs + 1);
            const std::int64_t base = cs * m - fine->lo;
            v[static_cast<std::size_t>(base)] = left;
            double rem = right - left;
            double acc = left;
            for (std::int64_t qi = 1; qi < m; ++qi) {
                const double nrem = static_cast<double>(m - qi + 1);
                const double mean = rem / nrem;
                const double var = new_dt * (nrem - 1.0) / nrem;
                const std::uint64_t fine_cell = static_cast<std::uint64_t>(cs * m + qi - 1);
                const double d =
                    mean + std::sqrt(var) * rng::gaussian(rng::key(p.seed, salt, mode, fine_cell));
                acc += d;
                rem -= d;
                v[static_cast<std::size_t>(base + qi)] = acc;
            }
        }
        v[static_cast<std::size_t>(p.table->hi * m - fine->lo)] =
            p.table->at(mode, p.table->hi);
    }

    NoisePath r = p;
    r.dt = new_dt;
    r.table = fine;
    r.anchor = p.anchor * m;
    r.lo = p.lo * m;
    r.hi = p.hi * m;
    return r;
}

inline void dump_path(const NoisePath& p, std::ostream& os) {
    os << "#noisepath v1 seed=" << p.seed << " tmin=" << p.t_min() << " tmax=" << p.t_max()
       << " dt=" << p.dt << " J=" << p.modes << "\n";
    char buf[32];
    for (std::int64_t s = p.lo; s <= p.hi; ++s) {
        const double t = static_cast<double>(s - p.anchor) * p.dt;
        std::snprintf(buf, sizeof(buf), "%.17g", t);
        os << buf;
        for (std::size_t j = 0; j < p.modes; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", p.value_at_slot(j, s));
            os << "," << buf;
        }
        os << "\n";
    }
}

inline NoisePath restore_path(std::istream& is, std::vector<double> b,
                              std::vector<double> lambda_values) {
    std::string header;
    if (!std::getline(is, header) || header.rfind("#noisepath v1 ", 0) != 0)
        fail(ErrorCode::io, "restore_path: missing #noisepath v1 header");
    std::uint64_t seed = 0;
    double tmin = 0, tmax = 0, dt = 0;
    std::size_t modes = 0;
    {
        std::istringstream hs(header.substr(14));
        std::string tok;
        while (hs >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) continue;
            const std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
            if (k == "seed") seed = std::stoull(v);
            else if (k == "tmin") tmin = std::stod(v);
            else if (k == "tmax") tmax = std::stod(v);
            else if (k == "dt") dt = std::stod(v);
            else if (k == "J") modes = std::stoul(v);
        }
    }
    if (modes == 0 || dt <= 0) fail(ErrorCode::io, "restore_path: bad header");
    if (b.size() != modes || lambda_values.size() != modes)
        fail(ErrorCode::config, "restore_path: b and lambda must have length J");

    const std::int64_t lo = detail::grid_slot(tmin, dt, ErrorCode::io, "restore tmin");
    const std::int64_t hi = detail::grid_slot(tmax, dt, ErrorCode::io, "restore tmax");
    auto table = std::make_shared<detail::WienerTable>();
    table->seed = seed;
    table->dt = dt;
    table->original_dt = dt;
    table->lo = lo;
    table->hi = hi;
    table->values.assign(modes, std::vector<double>(static_cast<std::size_t>(hi - lo) + 1));

    std::string line;
    std::int64_t s = lo;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (s > hi) fail(ErrorCode::io, "restore_path: more rows than grid points");
        std::istringstream ls(line);
        std::string cell;
        if (!std::getline(ls, cell, ',')) fail(ErrorCode::io, "restore_path: bad row");
        for (std::size_t j = 0; j < modes; ++j) {
            if (!std::getline(ls, cell, ',')) fail(ErrorCode::io, "restore_path: short row");
            table->values[j][static_cast<std::size_t>(s - lo)] = std::stod(cell);
        }
        ++s;
    }
    if (s != hi + 1) fail(ErrorCode::io, "restore_path: fewer rows than grid points");

    NoisePath p;
    p.seed = seed;
    p.dt = dt;
    p.modes = modes;
    p.b = std::move(b);
    p.lambda = make_lambda(std::move(lambda_values));
    p.table = table;
    p.anchor = 0;
    p.lo = lo;
    p.hi = hi;
    if (p.anchor < lo || p.anchor > hi)
        fail(ErrorCode::io, "restore_path: window does not contain t = 0");
    return p;
}

} // namespace rea
