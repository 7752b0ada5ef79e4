#pragma once

namespace syncgap {

// One classical fourth-order Runge-Kutta step for the autonomous system
// y' = rhs(y). State must support +, and scalar *.
template <typename State, typename Rhs>
State rk4_step(const Rhs& rhs, const State& y, double h) {
    const State k1 = rhs(y);
    const State k2 = rhs(State(y + (0.5 * h) * k1));
    const State k3 = rhs(State(y + (0.5 * h) * k2));
    const State k4 = rhs(State(y + h * k3));
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace syncgap
