#pragma once

#include "qdcav/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qdcav {

// Adaptive Dormand-Prince 5(4) for Eigen-like states (anything supporting
// linear combinations and cwiseAbs). The step cap callback lets callers
// tighten the internal step locally, e.g. while a pulse is active.
struct StepControl {
    double rtol = 1e-8;
    double atol = 1e-10;
    double min_step = 1e-13;
    double initial_step = 1e-3;
    double fixed_dt = 0.0;  // > 0 switches to fixed-step integration
};

namespace detail {

// Butcher tableau of the Dormand-Prince 5(4) pair
inline constexpr double dp_c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
inline constexpr double dp_b5[7] = {35.0 / 384,      0.0,          500.0 / 1113, 125.0 / 192,
                                    -2187.0 / 6784,  11.0 / 84,    0.0};
inline constexpr double dp_b4[7] = {5179.0 / 57600,  0.0,          7571.0 / 16695, 393.0 / 640,
                                    -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

}  // namespace detail

// Integrates y' = f(t, y) from t0 to t1 in place. f(t, y) returns dy/dt;
// max_step_at(t) returns the local step cap (ps).
template <class State, class Rhs, class StepCap>
void integrate_adaptive(Rhs&& f, State& y, double t0, double t1,
                        const StepControl& ctl, StepCap&& max_step_at) {
    using namespace detail;
    if (t1 <= t0) return;

    State k[7];
    double t = t0;

    if (ctl.fixed_dt > 0.0) {
        double h = ctl.fixed_dt;
        while (t < t1 - 1e-14) {
            const double step = std::min(h, t1 - t);
            k[0] = f(t, y);
            for (int s = 1; s < 7; ++s) {
                State ys = y;
                for (int j = 0; j < s; ++j)
                    if (dp_a[s][j] != 0.0) ys += (step * dp_a[s][j]) * k[j];
                k[s] = f(t + dp_c[s] * step, ys);
            }
            for (int s = 0; s < 7; ++s)
                if (dp_b5[s] != 0.0) y += (step * dp_b5[s]) * k[s];
            t += step;
        }
        return;
    }

    double h = std::min({ctl.initial_step, max_step_at(t), t1 - t});
    while (t < t1 - 1e-14) {
        h = std::min({h, max_step_at(t), t1 - t});
        if (h < ctl.min_step)
            throw NumericalError("integrate_adaptive: step size underflow at t = " +
                                 std::to_string(t) + " ps (h = " + std::to_string(h) + ")");

        k[0] = f(t, y);
        for (int s = 1; s < 7; ++s) {
            State ys = y;
            for (int j = 0; j < s; ++j)
                if (dp_a[s][j] != 0.0) ys += (h * dp_a[s][j]) * k[j];
            k[s] = f(t + dp_c[s] * h, ys);
        }

        State y5 = y;
        for (int s = 0; s < 7; ++s)
            if (dp_b5[s] != 0.0) y5 += (h * dp_b5[s]) * k[s];
        State err = (h * (dp_b5[0] - dp_b4[0])) * k[0];
        for (int s = 1; s < 7; ++s)
            if (dp_b5[s] != dp_b4[s]) err += (h * (dp_b5[s] - dp_b4[s])) * k[s];

        const double ymax = std::max(y.cwiseAbs().maxCoeff(), y5.cwiseAbs().maxCoeff());
        const double scale = ctl.atol + ctl.rtol * ymax;
        const double errnorm = err.cwiseAbs().maxCoeff() / scale;

        if (errnorm <= 1.0) {
            t += h;
            y.swap(y5);
            const double grow = (errnorm > 0.0) ? 0.9 * std::pow(errnorm, -0.2) : 5.0;
            h *= std::clamp(grow, 0.2, 5.0);
        } else {
            h *= std::clamp(0.9 * std::pow(errnorm, -0.2), 0.2, 1.0);
            if (h < ctl.min_step)
                throw NumericalError(
                    "integrate_adaptive: step size underflow at t = " + std::to_string(t) +
                    " ps (local error " + std::to_string(errnorm) + " of tolerance)");
        }
    }
}

}  // namespace qdcav
