#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace photonn {

template <std::size_t N>
using StateVector = std::array<double, N>;

/// One classical fourth-order Runge-Kutta step of y' = f(t, y).
template <std::size_t N, typename Rhs>
StateVector<N> rk4_step(const StateVector<N>& y, double t, double dt, Rhs&& f) {
    auto axpy = [](const StateVector<N>& base, double h, const StateVector<N>& k) {
        StateVector<N> out;
        for (std::size_t i = 0; i < N; ++i) out[i] = base[i] + h * k[i];
        return out;
    };
    const double half = 0.5 * dt;
    const StateVector<N> k1 = f(t, y);
    const StateVector<N> k2 = f(t + half, axpy(y, half, k1));
    const StateVector<N> k3 = f(t + half, axpy(y, half, k2));
    const StateVector<N> k4 = f(t + dt, axpy(y, dt, k3));
    StateVector<N> out;
    for (std::size_t i = 0; i < N; ++i)
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

template <std::size_t N>
bool all_finite(const StateVector<N>& y) {
    for (double v : y)
        if (!std::isfinite(v)) return false;
    return true;
}

/// Number of fixed steps covering [0, horizon]; horizon is rounded to the grid.
inline std::size_t step_count(double dt, double horizon) {
    return static_cast<std::size_t>(std::llround(horizon / dt));
}

}  // namespace photonn
