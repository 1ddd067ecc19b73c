#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "rea/errors.hpp"

namespace rea {

using LambdaRef = std::shared_ptr<const std::vector<double>>;

inline LambdaRef make_lambda(std::vector<double> values) {
    return std::make_shared<const std::vector<double>>(std::move(values));
}

// Dirichlet eigenvalues on (0, pi): lambda_j = j^2.
inline LambdaRef default_lambda(std::size_t modes) {
    std::vector<double> l(modes);
    for (std::size_t j = 0; j < modes; ++j) l[j] = static_cast<double>((j + 1) * (j + 1));
    return make_lambda(std::move(l));
}

// Galerkin coefficient vector against the eigenbasis, with the weighted
// norms sum lambda^s c^2 used throughout (s = 0 is L^2, s = 1 is H^1_0).
struct StateVector {
    std::vector<double> coeffs;
    LambdaRef lambda;

    StateVector() = default;
    StateVector(std::vector<double> c, LambdaRef l)
        : coeffs(std::move(c)), lambda(std::move(l)) {
        if (!lambda || coeffs.size() != lambda->size())
            fail(ErrorCode::config, "state vector / eigenvalue size mismatch");
    }

    std::size_t size() const { return coeffs.size(); }

    double hs_norm_sq(double s) const {
        double acc = 0.0;
        for (std::size_t j = 0; j < coeffs.size(); ++j)
            acc += std::pow((*lambda)[j], s) * coeffs[j] * coeffs[j];
        return acc;
    }
    double hs_norm(double s) const { return std::sqrt(hs_norm_sq(s)); }

    double h_norm_sq() const {
        double acc = 0.0;
        for (double c : coeffs) acc += c * c;
        return acc;
    }
    double h_norm() const { return std::sqrt(h_norm_sq()); }

    double v_norm_sq() const {
        double acc = 0.0;
        for (std::size_t j = 0; j < coeffs.size(); ++j)
            acc += (*lambda)[j] * coeffs[j] * coeffs[j];
        return acc;
    }
    double v_norm() const { return std::sqrt(v_norm_sq()); }

    StateVector& operator+=(const StateVector& o) {
        for (std::size_t j = 0; j < coeffs.size(); ++j) coeffs[j] += o.coeffs[j];
        return *this;
    }
    StateVector& operator-=(const StateVector& o) {
        for (std::size_t j = 0; j < coeffs.size(); ++j) coeffs[j] -= o.coeffs[j];
        return *this;
    }
    StateVector& operator*=(double a) {
        for (double& c : coeffs) c *= a;
        return *this;
    }

    friend StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
    friend StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
    friend StateVector operator*(double s, StateVector a) { return a *= s; }
};

inline StateVector zero_state(const LambdaRef& lambda) {
    return StateVector(std::vector<double>(lambda->size(), 0.0), lambda);
}

inline double norm_distance(std::span<const double> a, std::span<const double> b,
                            std::span<const double> lambda, bool v_metric) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        acc += (v_metric ? lambda[j] : 1.0) * d * d;
    }
    return std::sqrt(acc);
}

} // namespace rea
