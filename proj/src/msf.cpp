#include "syncgap/msf.hpp"

#include "syncgap/parallel.hpp"

#include <algorithm>

namespace syncgap {

LyapunovEstimate lyapunov_max(const ModelSpec& model, double nu, const Matrix3& gamma, const LyapunovOptions& opts) {
    if (!(nu >= 0.0)) throw InputError("nu must be nonnegative");
    const Matrix3 shift = nu * gamma;
    return benettin([&](const State3& x) { return model.vector_field(x); },
                    [&](const State3& x) { return model.jacobian(x); }, model.reference_state(), shift, opts);
}

MsfCurve critical_coupling(const ModelSpec& model, const Matrix3& gamma, double nu_max, std::size_t n_grid,
                           const LyapunovOptions& opts, double bisection_width) {
    if (n_grid < 20) throw InputError("MSF grid needs at least 20 points");
    if (!(nu_max > 0.0)) throw InputError("nu_max must be positive");
    if (!(bisection_width > 0.0)) throw InputError("bisection width must be positive");

    MsfCurve curve;
    curve.points.resize(n_grid);
    const double step = nu_max / static_cast<double>(n_grid - 1);
    parallel_for(n_grid, [&](std::size_t k) {
        const double nu = (k + 1 == n_grid) ? nu_max : static_cast<double>(k) * step;
        const auto est = lyapunov_max(model, nu, gamma, opts);
        curve.points[k] = {nu, est.exponent, est.stderr_};
    });

    const auto& pts = curve.points;
    for (std::size_t k = 0; k + 1 < n_grid; ++k) {
        const bool a = pts[k].exponent >= 0.0, b = pts[k + 1].exponent >= 0.0;
        if (a != b) curve.crossings.push_back({pts[k].nu, pts[k + 1].nu, a});
    }
    curve.multiple_crossings = curve.crossings.size() > 1;

    if (pts.back().exponent >= 0.0) {
        std::string msg = "no stabilising crossing of Lambda_max in [0, " + std::to_string(nu_max) + "]";
        for (const auto& c : curve.crossings)
            msg += "; crossing in [" + std::to_string(c.lo) + ", " + std::to_string(c.hi) + "]";
        throw InputError(msg);
    }

    // Last grid point with Lambda_max >= 0; everything beyond it is negative.
    std::size_t last = n_grid;
    for (std::size_t k = 0; k < n_grid; ++k)
        if (pts[k].exponent >= 0.0) last = k;
    curve.monotone_tail = true;
    if (last == n_grid) {
        curve.alpha_c = 0.0;
        return curve;
    }

    double lo = pts[last].nu, hi = pts[last + 1].nu;
    std::vector<MsfPoint> refined;
    while (hi - lo > bisection_width) {
        const double mid = 0.5 * (lo + hi);
        const auto est = lyapunov_max(model, mid, gamma, opts);
        refined.push_back({mid, est.exponent, est.stderr_});
        (est.exponent >= 0.0 ? lo : hi) = mid;
    }
    curve.alpha_c = 0.5 * (lo + hi);
    curve.points.insert(curve.points.end(), refined.begin(), refined.end());
    std::stable_sort(curve.points.begin(), curve.points.end(),
                     [](const MsfPoint& a, const MsfPoint& b) { return a.nu < b.nu; });
    return curve;
}

StabilityVerdict stability_check(const Network& net, double alpha, double alpha_c) {
    if (!(alpha >= 0.0)) throw InputError("coupling strength alpha must be nonnegative");
    const auto summary = spectral_summary(laplacian(net).L);
    StabilityVerdict v;
    v.lambda2 = (summary.zero_simple && summary.has_gap) ? summary.gap : Complex(0.0, 0.0);
    v.complex_gap = v.lambda2.imag() != 0.0;
    v.coupling = alpha * v.lambda2.real();
    v.alpha_c = alpha_c;
    v.margin = v.coupling - alpha_c;
    v.stable = v.coupling > alpha_c;
    return v;
}

StabilityVerdict stability_check(const Network& net, const ModelSpec& model, const Matrix3& gamma, double alpha,
                                 double nu_max, std::size_t n_grid, const LyapunovOptions& opts) {
    const auto curve = critical_coupling(model, gamma, nu_max, n_grid, opts);
    return stability_check(net, alpha, curve.alpha_c);
}

} // namespace syncgap
