#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rea/errors.hpp"
#include "rea/state_vector.hpp"

namespace rea {

// Flat `key = value` configuration; nested keys use dots. Unknown keys are
// preserved so experiment drivers can layer their own settings on top.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse(std::istream& is) {
        KeyValueConfig c;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                if (line.find_first_not_of(" \t\r") != std::string::npos)
                    fail(ErrorCode::config,
                         "config line " + std::to_string(lineno) + ": expected key = value");
                continue;
            }
            c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
        return c;
    }

    void set(const std::string& key, const std::string& value) {
        if (key.empty()) fail(ErrorCode::config, "config: empty key");
        values_[key] = value;
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument(key);
            return v;
        } catch (const std::exception&) {
            fail(ErrorCode::config, "config key '" + key + "': expected number, got '" +
                                        it->second + "'");
        }
    }

    std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            std::size_t pos = 0;
            const long long v = std::stoll(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument(key);
            return v;
        } catch (const std::exception&) {
            fail(ErrorCode::config, "config key '" + key + "': expected integer, got '" +
                                        it->second + "'");
        }
    }

    std::vector<double> get_list(const std::string& key,
                                 const std::vector<double>& fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        std::vector<double> out;
        std::istringstream ls(it->second);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            cell = trim(cell);
            if (cell.empty()) continue;
            try {
                out.push_back(std::stod(cell));
            } catch (const std::exception&) {
                fail(ErrorCode::config, "config key '" + key + "': bad list entry '" + cell + "'");
            }
        }
        return out;
    }

    const std::map<std::string, std::string>& entries() const { return values_; }

    // FNV-1a over the canonical (sorted) key=value rendering.
    std::uint64_t hash() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (const auto& [k, v] : values_) {
            for (char c : k + "=" + v + "\n") {
                h ^= static_cast<unsigned char>(c);
                h *= 0x100000001b3ULL;
            }
        }
        return h;
    }

private:
    static std::string trim(std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        if (a == std::string::npos) return "";
        return s.substr(a, b - a + 1);
    }

    std::map<std::string, std::string> values_;
};

// Parameters of one reaction-diffusion instance on D = (0, pi):
// du/dt - a u_xx + f(u) = h + eps * noise, Dirichlet boundary, Galerkin
// truncation at `modes` sine modes. f(u) = f_cubic u^3 + f_linear u.
struct SystemConfig {
    std::size_t modes = 16;
    double a = 1.0;
    double f_cubic = 1.0;
    double f_linear = -1.0;
    int p = 3;
    std::vector<double> h_coeffs;       // deterministic force, eigen coefficients
    double integrator_dt = 1e-3;
    std::size_t collocation_points = 0; // 0: choose 2(J+1), dealiases the cubic
    double epsilon = 0.0;
    double burn_in = 0.0;               // 0: choose from ou_tolerance
    double ou_tolerance = 1e-8;

    // Monitored-estimate constants; the underlying inequalities fix none of
    // these numerically, so they are configuration with documented defaults.
    double c1 = 1.0;
    double delta = 0.5;
    double C2 = 1.0;
    double C3 = 1.0;
    double C4 = 1.0;

    std::vector<double> noise_b; // empty: b_j = j^-4

    LambdaRef lambda_ref() const { return default_lambda(modes); }

    std::vector<double> lambda_values() const {
        std::vector<double> l(modes);
        for (std::size_t j = 0; j < modes; ++j) l[j] = static_cast<double>((j + 1) * (j + 1));
        return l;
    }

    std::vector<double> b_values() const {
        if (!noise_b.empty()) return noise_b;
        std::vector<double> b(modes);
        for (std::size_t j = 0; j < modes; ++j) b[j] = std::pow(static_cast<double>(j + 1), -4.0);
        return b;
    }

    std::size_t effective_collocation() const {
        return collocation_points ? collocation_points : 2 * (modes + 1);
    }

    // Burn-in horizon such that the per-mode stationary tail in V-norm is
    // below ou_tolerance for every mode (slowest mode dominates).
    double effective_burn_in() const {
        if (burn_in > 0.0) return burn_in;
        const double l1 = 1.0;
        double need = 1.0;
        const auto b = b_values();
        for (std::size_t j = 0; j < modes; ++j) {
            const double lj = static_cast<double>((j + 1) * (j + 1));
            const double amp = std::sqrt(lj) * b[j] / std::sqrt(2.0 * a * lj);
            if (amp <= 0.0) continue;
            const double t = std::log(std::max(amp / ou_tolerance, 1.0)) / (a * lj);
            need = std::max(need, t);
        }
        (void)l1;
        // round up to an integer number of time units
        return std::ceil(need);
    }

    static SystemConfig from(const KeyValueConfig& kv) {
        SystemConfig c;
        c.modes = static_cast<std::size_t>(kv.get_int("modes", 16));
        c.a = kv.get_double("a", 1.0);
        c.f_cubic = kv.get_double("f.cubic", 1.0);
        c.f_linear = kv.get_double("f.linear", -1.0);
        c.p = static_cast<int>(kv.get_int("p", 3));
        c.h_coeffs = kv.get_list("h.coeffs", {});
        c.integrator_dt = kv.get_double("dt", 1e-3);
        c.collocation_points = static_cast<std::size_t>(kv.get_int("collocation", 0));
        c.epsilon = kv.get_double("epsilon", 0.0);
        c.burn_in = kv.get_double("burn_in", 0.0);
        c.ou_tolerance = kv.get_double("ou_tolerance", 1e-8);
        c.c1 = kv.get_double("const.c1", 1.0);
        c.delta = kv.get_double("const.delta", 0.5);
        c.C2 = kv.get_double("const.C2", 1.0);
        c.C3 = kv.get_double("const.C3", 1.0);
        c.C4 = kv.get_double("const.C4", 1.0);
        c.noise_b = kv.get_list("noise.b", {});
        c.validate();
        return c;
    }

    // Growth and dissipativity checks for the odd cubic: f(u) u >= -C + c u^4
    // and f' bounded below force a positive leading coefficient; the growth
    // exponent of an odd cubic is p = 3.
    void validate() const {
        if (modes == 0) fail(ErrorCode::config, "modes must be >= 1");
        if (a <= 0.0) fail(ErrorCode::config, "diffusion a must be positive");
        if (integrator_dt <= 0.0) fail(ErrorCode::config, "dt must be positive");
        if (f_cubic <= 0.0)
            fail(ErrorCode::config, "f.cubic must be positive (dissipativity of the cubic)");
        if (p != 3) fail(ErrorCode::config, "growth exponent p must be 3 for a cubic f");
        if (!h_coeffs.empty() && h_coeffs.size() != modes)
            fail(ErrorCode::config, "h.coeffs must have `modes` entries");
        if (!noise_b.empty() && noise_b.size() != modes)
            fail(ErrorCode::config, "noise.b must have `modes` entries");
        if (epsilon < -1.0 || epsilon > 1.0)
            fail(ErrorCode::config, "epsilon must lie in [-1, 1]");
        if (delta <= 0.0 || c1 <= 0.0)
            fail(ErrorCode::config, "const.c1 and const.delta must be positive");
        if (ou_tolerance <= 0.0) fail(ErrorCode::config, "ou_tolerance must be positive");
    }

    StateVector h_state() const {
        std::vector<double> h = h_coeffs;
        h.resize(modes, 0.0);
        return StateVector(std::move(h), lambda_ref());
    }
};

} // namespace rea
