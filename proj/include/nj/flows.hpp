#pragma once

// Fixed-step classical RK4 for autonomous fields. Deterministic: the
// final time is hit exactly by shortening the last step.

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace nj {

using VectorField = std::function<std::vector<double>(std::span<const double>)>;

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    double step = 0.0;
    std::string method = "rk4";

    const std::vector<double>& final_state() const { return states.back(); }
};

namespace detail {

constexpr double kDivergenceBound = 1e12;

inline void check_state(std::span<const double> y, double t) {
    for (double c : y)
        if (!std::isfinite(c) || std::abs(c) > kDivergenceBound)
            throw divergence_error("trajectory diverged", t);
}

inline std::vector<double> rk4_step(const VectorField& f, std::span<const double> y,
                                    double h) {
    const std::size_t n = y.size();
    auto axpy = [n](std::span<const double> base, double a,
                    std::span<const double> d) {
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = base[i] + a * d[i];
        return out;
    };
    auto k1 = f(y);
    auto k2 = f(axpy(y, h / 2.0, k1));
    auto k3 = f(axpy(y, h / 2.0, k2));
    auto k4 = f(axpy(y, h, k3));
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

} // namespace detail

inline Trajectory integrate(const VectorField& field, std::span<const double> x0,
                            double t0, double t1, double h) {
    if (!(h > 0.0)) throw invalid_input("integrate: step must be positive");
    if (!(t1 > t0)) throw invalid_input("integrate: need t1 > t0");
    Trajectory traj;
    traj.step = h;
    std::vector<double> y(x0.begin(), x0.end());
    detail::check_state(y, t0);
    double t = t0;
    traj.times.push_back(t);
    traj.states.push_back(y);
    // Track full steps by index (t = t0 + i*h) so rounding in the time
    // accumulation cannot create a sliver step at the end; a remainder
    // within one unit of rounding of h is folded into the final step.
    std::size_t i = 0;
    while (t < t1) {
        const double remaining = t1 - t;
        double step;
        if (remaining <= h * (1.0 + 1e-9)) {
            step = remaining;
            t = t1;
        } else {
            step = h;
            ++i;
            t = t0 + static_cast<double>(i) * h;
        }
        y = detail::rk4_step(field, y, step);
        detail::check_state(y, t);
        traj.times.push_back(t);
        traj.states.push_back(y);
    }
    return traj;
}

} // namespace nj
