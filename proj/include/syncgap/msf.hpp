#pragma once

#include "syncgap/error.hpp"
#include "syncgap/graph.hpp"
#include "syncgap/models.hpp"
#include "syncgap/ode.hpp"
#include "syncgap/spectral.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace syncgap {

struct LyapunovOptions {
    double dt = 0.001;
    double transient = 500.0;
    double averaging_time = 2e4;
    double renorm_interval = 1.0;
    std::size_t blocks = 20;       // for the standard error
    double escape_norm = 1e6;
    double max_stderr = 0.05;      // larger standard error is reported as non-convergence
};

struct LyapunovEstimate {
    double exponent = 0.0;
    double stderr_ = 0.0;
    std::size_t renormalizations = 0;
};

/// Largest Lyapunov exponent of xi' = [Df(gamma(t)) - shift] xi along the
/// trajectory gamma' = f(gamma) started at x0 (Benettin: one tangent vector,
/// renormalised every opts.renorm_interval, log growth averaged after the
/// transient). Reference and tangent are advanced together by RK4.
template <typename Field, typename Jac>
LyapunovEstimate benettin(const Field& f, const Jac& jac, State3 x0, const Matrix3& shift,
                          const LyapunovOptions& opts) {
    using State6 = Eigen::Matrix<double, 6, 1>;
    if (!(opts.dt > 0.0) || !(opts.renorm_interval > 0.0) || !(opts.averaging_time > 0.0) || opts.blocks < 2)
        throw InputError("invalid Lyapunov options");

    const auto steps_per_renorm = static_cast<std::size_t>(std::llround(opts.renorm_interval / opts.dt));
    const auto transient_steps = static_cast<std::size_t>(std::llround(opts.transient / opts.dt));
    const auto renorms = static_cast<std::size_t>(std::llround(opts.averaging_time / opts.renorm_interval));
    if (steps_per_renorm == 0 || renorms < opts.blocks) throw InputError("Lyapunov time grid is too coarse");

    auto ref_rhs = [&](const State3& x) -> State3 { return f(x); };
    auto check = [&](const State3& x, double t) {
        if (!x.allFinite() || x.cwiseAbs().maxCoeff() > opts.escape_norm)
            throw IntegrationError(t, "reference trajectory escaped (|x| > " + std::to_string(opts.escape_norm) + ")");
    };

    State3 x = x0;
    for (std::size_t k = 0; k < transient_steps; ++k) {
        x = rk4_step(ref_rhs, x, opts.dt);
        if (k % 1000 == 0) check(x, static_cast<double>(k) * opts.dt);
    }
    check(x, opts.transient);

    auto joint_rhs = [&](const State6& y) -> State6 {
        const State3 xr = y.template head<3>();
        const State3 xi = y.template tail<3>();
        State6 out;
        out.template head<3>() = f(xr);
        out.template tail<3>() = (jac(xr) - shift) * xi;
        return out;
    };

    State6 y;
    y.template head<3>() = x;
    y.template tail<3>() = State3::Constant(1.0 / std::sqrt(3.0));

    const std::size_t per_block = renorms / opts.blocks;
    const std::size_t used = per_block * opts.blocks;
    std::vector<double> block_sum(opts.blocks, 0.0);
    double total = 0.0;
    for (std::size_t r = 0; r < used; ++r) {
        for (std::size_t k = 0; k < steps_per_renorm; ++k) y = rk4_step(joint_rhs, y, opts.dt);
        check(y.template head<3>(), opts.transient + static_cast<double>(r + 1) * opts.renorm_interval);
        const double growth = y.template tail<3>().norm();
        if (!(growth > 0.0) || !std::isfinite(growth))
            throw IntegrationError(opts.transient + static_cast<double>(r + 1) * opts.renorm_interval,
                                   "tangent vector degenerated");
        const double lg = std::log(growth);
        block_sum[r / per_block] += lg;
        total += lg;
        y.template tail<3>() /= growth;
    }

    const double span = static_cast<double>(steps_per_renorm) * opts.dt;
    LyapunovEstimate est;
    est.renormalizations = used;
    est.exponent = total / (static_cast<double>(used) * span);
    double var = 0.0;
    for (double s : block_sum) {
        const double e = s / (static_cast<double>(per_block) * span) - est.exponent;
        var += e * e;
    }
    var /= static_cast<double>(opts.blocks - 1);
    est.stderr_ = std::sqrt(var / static_cast<double>(opts.blocks));
    if (est.stderr_ > opts.max_stderr)
        throw ConvergenceError("Lyapunov estimate did not settle (standard error " + std::to_string(est.stderr_) + ")");
    return est;
}

// Lambda_max(nu) of the variational block xi' = [Df(gamma) - nu Gamma] xi.
LyapunovEstimate lyapunov_max(const ModelSpec& model, double nu, const Matrix3& gamma,
                              const LyapunovOptions& opts = {});

struct MsfPoint {
    double nu = 0.0;
    double exponent = 0.0;
    double stderr_ = 0.0;
};

// Sign change of Lambda_max between two neighbouring grid points.
struct MsfCrossing {
    double lo = 0.0;
    double hi = 0.0;
    bool downward = true; // positive -> negative
};

struct MsfCurve {
    std::vector<MsfPoint> points; // grid points followed by bisection points, sorted by nu
    std::vector<MsfCrossing> crossings;
    double alpha_c = 0.0;
    bool monotone_tail = true; // Lambda_max < 0 on every grid point beyond alpha_c
    bool multiple_crossings = false;
};

/// Samples Lambda_max on a uniform grid over [0, nu_max] (n_grid >= 20
/// points, evaluated concurrently), then bisects the last downward crossing
/// to width `bisection_width`. alpha_c = 0 when Lambda_max < 0 already at
/// nu = 0. Throws InputError when Lambda_max is still >= 0 at nu_max.
MsfCurve critical_coupling(const ModelSpec& model, const Matrix3& gamma, double nu_max, std::size_t n_grid,
                           const LyapunovOptions& opts = {}, double bisection_width = 1e-3);

struct StabilityVerdict {
    Complex lambda2;
    double coupling = 0.0; // alpha * Re(lambda2)
    double alpha_c = 0.0;
    double margin = 0.0;   // coupling - alpha_c
    bool stable = false;
    bool complex_gap = false;
};

// alpha Re(lambda2) > alpha_c. A non-simple zero eigenvalue counts as lambda2 = 0.
StabilityVerdict stability_check(const Network& net, double alpha, double alpha_c);
StabilityVerdict stability_check(const Network& net, const ModelSpec& model, const Matrix3& gamma, double alpha,
                                 double nu_max = 2.0, std::size_t n_grid = 21, const LyapunovOptions& opts = {});

} // namespace syncgap
