#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <vector>

#include "rea/config.hpp"
#include "rea/errors.hpp"
#include "rea/noise_path.hpp"
#include "rea/ou_process.hpp"
#include "rea/point_cloud.hpp"
#include "rea/state_vector.hpp"

namespace rea {

// Spectral-Galerkin reaction-diffusion system on D = (0, pi) with Dirichlet
// eigenbasis e_j = sqrt(2/pi) sin(jx). The linear part is propagated by the
// exact exponential; the odd cubic is evaluated pseudo-spectrally on a
// collocation grid with 2x oversampling, which dealiases the cubic exactly.
class GalerkinSystem {
public:
    explicit GalerkinSystem(SystemConfig cfg)
        : cfg_(std::move(cfg)), lambda_(cfg_.lambda_ref()), M_(cfg_.effective_collocation()) {
        cfg_.validate();
        if (M_ < cfg_.modes + 1)
            fail(ErrorCode::config, "collocation points must exceed the mode count");
        const std::size_t J = cfg_.modes, P = M_ - 1;
        synth_.resize(J * P);
        const double norm = std::sqrt(2.0 / std::numbers::pi);
        for (std::size_t j = 0; j < J; ++j)
            for (std::size_t m = 0; m < P; ++m)
                synth_[j * P + m] =
                    norm * std::sin(static_cast<double>((j + 1) * (m + 1)) * std::numbers::pi /
                                    static_cast<double>(M_));
        h_ = cfg_.h_coeffs;
        h_.resize(J, 0.0);
    }

    const SystemConfig& config() const { return cfg_; }
    const LambdaRef& lambda() const { return lambda_; }

    // Galerkin projection of f(u) for coefficient vector u.
    void nonlinearity(const std::vector<double>& u, std::vector<double>& out) const {
        const std::size_t J = cfg_.modes, P = M_ - 1;
        phys_.assign(P, 0.0);
        for (std::size_t j = 0; j < J; ++j) {
            const double c = u[j];
            if (c == 0.0) continue;
            const double* row = &synth_[j * P];
            for (std::size_t m = 0; m < P; ++m) phys_[m] += c * row[m];
        }
        for (std::size_t m = 0; m < P; ++m) {
            const double x = phys_[m];
            phys_[m] = cfg_.f_cubic * x * x * x + cfg_.f_linear * x;
        }
        out.assign(J, 0.0);
        const double w = std::numbers::pi / static_cast<double>(M_);
        for (std::size_t j = 0; j < J; ++j) {
            const double* row = &synth_[j * P];
            double acc = 0.0;
            for (std::size_t m = 0; m < P; ++m) acc += phys_[m] * row[m];
            out[j] = w * acc;
        }
    }

    const std::vector<double>& h() const { return h_; }

    double h_minus1_norm_sq() const {
        double acc = 0.0;
        for (std::size_t j = 0; j < cfg_.modes; ++j)
            acc += h_[j] * h_[j] / (*lambda_)[j];
        return acc;
    }

private:
    SystemConfig cfg_;
    LambdaRef lambda_;
    std::size_t M_;
    std::vector<double> synth_;
    std::vector<double> h_;
    mutable std::vector<double> phys_;
};

struct AbsorbingRadiusDetail {
    double radius = 0.0;
    double r1 = 0.0, r2 = 0.0, sup_term = 0.0;
    double weight_at_cut = 0.0; // exp(delta sigma) at the window truncation
};

// Galerkin system bound to one noise path, with the stationary process
// cached per absolute slot. All flows are pure functions of (config, path);
// composition at grid points is bitwise exact because the solver re-splits
// u = eps U + v at every step.
class BoundGalerkin {
public:
    BoundGalerkin(std::shared_ptr<const GalerkinSystem> sys, NoisePath path)
        : sys_(std::move(sys)), path_(std::move(path)),
          ou_(std::make_shared<OuProcess>(path_, sys_->config().a,
                                          sys_->config().effective_burn_in(),
                                          sys_->config().ou_tolerance)) {
        const double idt = sys_->config().integrator_dt;
        step_ratio_ = detail::grid_slot(idt, path_.dt, ErrorCode::config,
                                        "integrator dt vs path grid");
        if (step_ratio_ < 1)
            fail(ErrorCode::config, "integrator dt must be a multiple of the path grid step");
        const std::size_t J = sys_->config().modes;
        decay_.resize(J);
        for (std::size_t j = 0; j < J; ++j)
            decay_[j] = std::exp(-sys_->config().a * (*path_.lambda)[j] * idt);
    }

    const GalerkinSystem& system() const { return *sys_; }
    const NoisePath& path() const { return path_; }
    const OuProcess& ou() const { return *ou_; }
    const LambdaRef& lambda() const { return path_.lambda; }

    BoundGalerkin rebased(double tau) const {
        return BoundGalerkin(sys_, rea::shift(path_, tau));
    }

    // Full solution flow on [t0, t1] (grid-aligned local times).
    StateVector flow(double t0, double t1, const StateVector& u0) const {
        std::vector<double> u = u0.coeffs;
        flow_inplace(t0, t1, u);
        return StateVector(std::move(u), path_.lambda);
    }

    PointCloud flow_cloud(double t0, double t1, const PointCloud& in) const {
        PointCloud out(in.dim, in.norm_tag, in.lambda);
        out.data = in.data;
        const std::size_t n = out.size();
        auto [s0, nsteps] = step_range(t0, t1);
        const std::size_t J = sys_->config().modes;
        std::vector<double> g(J), v(J);
        for (std::int64_t step = 0; step < nsteps; ++step) {
            const std::int64_t sa = s0 + step * step_ratio_;
            const std::int64_t sb = sa + step_ratio_;
            for (std::size_t i = 0; i < n; ++i) {
                double* u = out.data.data() + i * J;
                advance_one(u, sa, sb, g, v);
            }
        }
        return out;
    }

    // The v-equation alone: dv/dt - a Laplace v + f(v + eps U) = h.
    StateVector evolve_v(const StateVector& v0, double t0, double t1) const {
        const double idt = sys_->config().integrator_dt;
        auto [s0, nsteps] = step_range(t0, t1);
        const std::size_t J = sys_->config().modes;
        std::vector<double> v = v0.coeffs, g(J), w(J);
        const double eps = sys_->config().epsilon;
        for (std::int64_t step = 0; step < nsteps; ++step) {
            const std::int64_t sa = s0 + step * step_ratio_;
            for (std::size_t j = 0; j < J; ++j) w[j] = v[j] + eps * ou_->value_at_slot(j, sa);
            sys_->nonlinearity(w, g);
            double hsq = 0.0;
            for (std::size_t j = 0; j < J; ++j) {
                v[j] = decay_[j] * (v[j] + idt * (sys_->h()[j] - g[j]));
                hsq += v[j] * v[j];
            }
            guard(hsq);
        }
        return StateVector(std::move(v), path_.lambda);
    }

    // (R_theta_t omega)^2 = 8 (1 + C3 + C4 R1 + C2 R2 + sup term), with the
    // pullback integrals truncated at the sampled window edge.
    AbsorbingRadiusDetail absorbing_radius_detail(double tau0, double t) const {
        const auto& cfg = sys_->config();
        const double dtg = path_.dt;
        const std::int64_t shift_slots =
            path_.slot_of(tau0 + t, ErrorCode::alignment) - path_.anchor;
        // sigma runs over grid points in [sigma_cut, 0]; U is read at
        // sigma + tau0 + t, so the cut is set by the OU validity edge.
        const std::int64_t lowest = ou_->first_valid_slot() - (path_.anchor + shift_slots);
        const std::int64_t cut = std::max<std::int64_t>(lowest, -(1 << 30));
        if (cut > 0)
            fail(ErrorCode::window_exhausted,
                 "absorbing_radius: window does not reach sigma = 0");

        const double pe = static_cast<double>(cfg.p) + 1.0;
        const double eps_pow = std::pow(std::abs(cfg.epsilon), pe);
        const double eps_sq = cfg.epsilon * cfg.epsilon;

        double r1 = 0.0, r2 = 0.0, sup = 0.0;
        for (std::int64_t q = cut + 1; q <= 0; ++q) {
            const double sigma = static_cast<double>(q) * dtg;
            const std::int64_t slot = path_.anchor + shift_slots + q;
            double n1 = 0.0, n2 = 0.0;
            for (std::size_t j = 0; j < cfg.modes; ++j) {
                const double l = (*path_.lambda)[j];
                const double u = ou_->value_at_slot(j, slot);
                n1 += l * u * u;
                n2 += l * l * u * u;
            }
            r1 += std::exp(cfg.delta * sigma) * std::pow(std::sqrt(n1), pe) * dtg;
            r2 += std::exp(cfg.delta * (sigma + 3.0)) * std::pow(std::sqrt(n2), pe) * dtg;
            sup = std::max(sup, std::exp(cfg.delta * (sigma + 2.0 * tau0)) * n1);
        }
        AbsorbingRadiusDetail out;
        out.r1 = eps_pow * r1;
        out.r2 = eps_pow * r2;
        out.sup_term = eps_sq * sup;
        out.weight_at_cut = std::exp(cfg.delta * static_cast<double>(cut) * dtg);
        out.radius = std::sqrt(8.0 * (1.0 + cfg.C3 + cfg.C4 * out.r1 + cfg.C2 * out.r2 +
                                      out.sup_term));
        return out;
    }

    double absorbing_radius(double tau0, double t) const {
        return absorbing_radius_detail(tau0, t).radius;
    }

    // e^{c1 t} ||v(t)||^2 minus the forcing integral, along a trajectory;
    // bounded by ||v0||^2 plus the monitored pullback quantity when the
    // configured constants are adequate.
    std::vector<std::pair<double, double>> dissipativity_witness(const StateVector& v0,
                                                                 double t_end) const {
        const auto& cfg = sys_->config();
        const double idt = cfg.integrator_dt;
        auto [s0, nsteps] = step_range(0.0, t_end);
        const std::size_t J = cfg.modes;
        std::vector<double> v = v0.coeffs, g(J), w(J);
        const double eps = cfg.epsilon;
        const double pe = static_cast<double>(cfg.p) + 1.0;
        std::vector<std::pair<double, double>> out;
        double forcing = 0.0;
        out.emplace_back(0.0, v0.h_norm_sq());
        for (std::int64_t step = 0; step < nsteps; ++step) {
            const std::int64_t sa = s0 + step * step_ratio_;
            double un1 = 0.0;
            for (std::size_t j = 0; j < J; ++j) {
                const double u = ou_->value_at_slot(j, sa);
                w[j] = v[j] + eps * u;
                un1 += (*path_.lambda)[j] * eps * eps * u * u;
            }
            sys_->nonlinearity(w, g);
            double hsq = 0.0;
            for (std::size_t j = 0; j < J; ++j) {
                v[j] = decay_[j] * (v[j] + idt * (sys_->h()[j] - g[j]));
                hsq += v[j] * v[j];
            }
            guard(hsq);
            const double t = static_cast<double>(step + 1) * idt;
            forcing += std::exp(cfg.c1 * (t - idt)) *
                       (1.0 + sys_->h_minus1_norm_sq() + std::pow(std::sqrt(un1), pe)) * idt;
            out.emplace_back(t, std::exp(cfg.c1 * t) * hsq - forcing);
        }
        return out;
    }

private:
    std::pair<std::int64_t, std::int64_t> step_range(double t0, double t1) const {
        const double idt = sys_->config().integrator_dt;
        const std::int64_t k0 = detail::grid_slot(t0, idt, ErrorCode::alignment, "flow t0");
        const std::int64_t k1 = detail::grid_slot(t1, idt, ErrorCode::alignment, "flow t1");
        if (k1 < k0) fail(ErrorCode::domain, "flow: t1 must be >= t0");
        const std::int64_t s0 = path_.anchor + k0 * step_ratio_;
        path_.require_window(s0, "flow start");
        path_.require_window(path_.anchor + k1 * step_ratio_, "flow end");
        ou_->require_slot(s0, "flow start");
        return {s0, k1 - k0};
    }

    void advance_one(double* u, std::int64_t sa, std::int64_t sb, std::vector<double>& g,
                     std::vector<double>& v) const {
        const auto& cfg = sys_->config();
        const std::size_t J = cfg.modes;
        const double eps = cfg.epsilon;
        const double idt = cfg.integrator_dt;
        sys_->nonlinearity(std::vector<double>(u, u + J), g); // f(v + eps U) = f(u)
        double hsq = 0.0;
        for (std::size_t j = 0; j < J; ++j) {
            v[j] = u[j] - eps * ou_->value_at_slot(j, sa);
            v[j] = decay_[j] * (v[j] + idt * (sys_->h()[j] - g[j]));
            u[j] = eps * ou_->value_at_slot(j, sb) + v[j];
            hsq += u[j] * u[j];
        }
        guard(hsq);
    }

    void flow_inplace(double t0, double t1, std::vector<double>& u) const {
        auto [s0, nsteps] = step_range(t0, t1);
        const std::size_t J = sys_->config().modes;
        std::vector<double> g(J), v(J);
        for (std::int64_t step = 0; step < nsteps; ++step) {
            const std::int64_t sa = s0 + step * step_ratio_;
            advance_one(u.data(), sa, sa + step_ratio_, g, v);
        }
    }

    static void guard(double h_norm_sq) {
        if (!(h_norm_sq < 1e12))
            fail(ErrorCode::divergence,
                 "flow diverged (H norm exceeded 1e6); check dissipativity or shrink dt");
    }

    std::shared_ptr<const GalerkinSystem> sys_;
    NoisePath path_;
    std::shared_ptr<OuProcess> ou_;
    std::int64_t step_ratio_ = 1;
    std::vector<double> decay_;
};

// Full solution of the perturbed system from u0 at time 0 under the path
// shifted by tau.
inline StateVector solve(std::shared_ptr<const GalerkinSystem> sys, const NoisePath& path,
                         double tau, const StateVector& u0, double t) {
    BoundGalerkin bound(std::move(sys), shift(path, tau));
    return bound.flow(0.0, t, u0);
}

} // namespace rea
