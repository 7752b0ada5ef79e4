#include "syncgap/spectral.hpp"

#include "syncgap/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace syncgap {

namespace {

constexpr double cluster_tolerance = 1e-7;
constexpr double zero_tolerance = 1e-9;
constexpr double simple_tolerance = 1e-8;
constexpr double residual_tolerance = 1e-8;

template <typename Vec>
double inf_norm(const Vec& x) {
    return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
}

// Deterministic start vector with no special structure (the all-ones
// vector is orthogonal to every left eigenvector of a Laplacian except the
// one for 0, so it must be avoided).
ComplexVector start_vector(Eigen::Index n, int attempt) {
    ComplexVector x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double k = static_cast<double>(i + 1 + 7 * attempt);
        x[i] = Complex(1.0 + 0.5 * std::sin(1.7 * k) + 0.3 * std::cos(0.9 * k * k), 0.0);
    }
    return x / x.norm();
}

Eigen::Index dominant_index(const ComplexVector& x) {
    const double peak = inf_norm(x);
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (std::abs(x[i]) >= peak * (1.0 - 1e-9)) return i;
    return 0;
}

// Unit 2-norm, dominant entry real positive.
void orient(ComplexVector& x) {
    x /= x.norm();
    const Complex lead = x[dominant_index(x)];
    x *= std::conj(lead) / std::abs(lead);
}

// Right eigenvector of `a` for `value` by shifted inverse iteration.
ComplexVector inverse_iteration(const ComplexMatrix& a, Complex value, double scale) {
    const auto n = a.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    double offset = 1e-10 * scale;
    for (int attempt = 0; attempt < 4; ++attempt) {
        const Eigen::PartialPivLU<ComplexMatrix> lu(a - (value + offset) * id);
        ComplexVector x = start_vector(n, attempt);
        bool finite = true;
        for (int it = 0; it < 40; ++it) {
            ComplexVector y = lu.solve(x);
            if (!y.allFinite() || y.norm() == 0.0) {
                finite = false;
                break;
            }
            orient(y);
            const double change = (y - x).norm();
            x = std::move(y);
            if (it >= 2 && change < 1e-14) break;
        }
        if (finite) {
            // One refinement pass at the unshifted eigenvalue estimate.
            const double res = inf_norm(ComplexVector(a * x - value * x));
            if (res <= residual_tolerance * scale) return x;
        }
        offset *= 100.0;
    }
    throw ConvergenceError("inverse iteration did not converge for eigenvalue (" + std::to_string(value.real()) +
                           ", " + std::to_string(value.imag()) + ")");
}

} // namespace

double spectral_scale(const Matrix& a) {
    if (a.size() == 0) return 1.0;
    return std::max(1.0, a.cwiseAbs().rowwise().sum().maxCoeff());
}

bool eigenvalue_less(const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

std::vector<Complex> eigen_all(const Matrix& a) {
    if (a.rows() != a.cols()) throw InputError("eigen_all needs a square matrix");
    const auto n = static_cast<std::size_t>(a.rows());
    if (n == 0) return {};

    Eigen::EigenSolver<Matrix> solver(a, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw ConvergenceError("Hessenberg QR iteration did not converge (n = " + std::to_string(n) + ")");
    std::vector<Complex> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = solver.eigenvalues()[static_cast<Eigen::Index>(i)];

    // Group eigenvalues within the cluster tolerance (transitively) and
    // replace each group by its mean.
    const double tol = cluster_tolerance * spectral_scale(a);
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(ev[i] - ev[j]) <= tol) parent[find(i)] = find(j);

    std::vector<Complex> sum(n, Complex(0.0, 0.0));
    std::vector<std::size_t> count(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        sum[find(i)] += ev[i];
        ++count[find(i)];
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = find(i);
        if (count[r] > 1) ev[i] = sum[r] / static_cast<double>(count[r]);
    }

    std::sort(ev.begin(), ev.end(), eigenvalue_less);
    return ev;
}

Eigenpair eigenpair(const Matrix& a, Complex value) {
    const double scale = spectral_scale(a);
    Eigenpair out;
    out.value = value;

    const ComplexMatrix ac = a.cast<Complex>();
    if (value.imag() == 0.0) {
        // Real eigenvalue: iterate in the complex type but with real data so
        // imaginary parts stay exactly zero.
        out.right = inverse_iteration(ac, value, scale);
        out.left = inverse_iteration(ac.transpose(), value, scale);
    } else {
        out.right = inverse_iteration(ac, value, scale);
        out.left = inverse_iteration(ac.transpose(), std::conj(value), scale);
    }

    const Complex overlap = out.left.dot(out.right); // left^H right
    if (std::abs(overlap) < 1e-14)
        throw DegenerateSpectrum("left and right eigenvectors are orthogonal (defective eigenvalue)");
    out.left /= std::conj(overlap);

    out.right_residual = inf_norm(ComplexVector(ac * out.right - value * out.right));
    out.left_residual = inf_norm(ComplexVector(ac.adjoint() * out.left - std::conj(value) * out.left));
    if (out.left_residual > residual_tolerance * scale || out.right_residual > residual_tolerance * scale)
        throw ConvergenceError("eigenvector residual above tolerance");
    return out;
}

SpectralSummary spectral_summary(const Matrix& L) {
    SpectralSummary s;
    s.eigenvalues = eigen_all(L);
    s.scale = spectral_scale(L);
    const auto& ev = s.eigenvalues;

    std::size_t zeros = 0;
    for (const auto& z : ev)
        if (std::abs(z) <= zero_tolerance * s.scale) ++zeros;
    s.zero_simple = (zeros == 1);

    // lambda_2: first eigenvalue in (Re, Im) order that is not numerically zero.
    for (std::size_t k = 0; k < ev.size(); ++k) {
        if (std::abs(ev[k]) <= zero_tolerance * s.scale) continue;
        s.has_gap = true;
        s.gap = ev[k];
        double sep = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < ev.size(); ++j)
            if (j != k) sep = std::min(sep, std::abs(ev[j] - ev[k]));
        s.gap_separation = sep;
        s.gap_simple = sep > simple_tolerance * s.scale;
        break;
    }

    if (!s.degenerate()) {
        const auto pair = eigenpair(L, s.gap);
        s.u = pair.left;
        s.v = pair.right;
        s.left_residual = pair.left_residual;
        s.right_residual = pair.right_residual;
    }
    return s;
}

SpectralSummary spectral_gap(const Matrix& L) {
    auto s = spectral_summary(L);
    if (!s.zero_simple)
        throw DegenerateSpectrum("zero eigenvalue is not simple (no rooted spanning tree)");
    if (!s.has_gap) throw DegenerateSpectrum("Laplacian has no nonzero eigenvalue");
    if (!s.gap_simple)
        throw DegenerateSpectrum("spectral gap is not simple (nearest eigenvalue at distance " +
                                 std::to_string(s.gap_separation) + ")");
    return s;
}

SpectralSummary spectral_gap(const Laplacian& lap) { return spectral_gap(lap.L); }

PerronCertificate perron_certificate(const Matrix& b, const PowerIterationOptions& opts) {
    if (b.rows() != b.cols() || b.rows() == 0) throw InputError("Perron certificate needs a nonempty square block");
    const auto n = b.rows();

    PerronCertificate cert;
    cert.shift = b.diagonal().maxCoeff();
    cert.N = cert.shift * Matrix::Identity(n, n) - b;
    if ((cert.N.array() < 0.0).any()) throw Error("internal: shifted block has a negative entry");

    // Iterate on N + I: same eigenvectors, and primitive even when N is
    // periodic (e.g. [[0,1],[1,0]]).
    const Matrix p = cert.N + Matrix::Identity(n, n);
    auto power = [&](const Matrix& m, Vector& x, double& root) {
        x = Vector::Ones(n) / static_cast<double>(n);
        for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
            Vector y = m * x;
            root = y.sum() / x.sum();
            y /= y.sum();
            const double change = (y - x).cwiseAbs().maxCoeff();
            x = std::move(y);
            if (change <= opts.tolerance) return it;
        }
        throw ConvergenceError("power iteration did not converge in " + std::to_string(opts.max_iterations) +
                               " iterations");
    };

    double right_root = 0.0, left_root = 0.0;
    const auto it_right = power(p, cert.eta, right_root);
    const auto it_left = power(p.transpose(), cert.omega, left_root);
    cert.iterations = std::max(it_right, it_left);

    cert.perron_root = right_root - 1.0;
    cert.eta /= cert.eta.norm();
    cert.omega /= cert.omega.dot(cert.eta);
    cert.min_eig = cert.shift - cert.perron_root;
    return cert;
}

GershgorinReport gershgorin(const Matrix& b) {
    GershgorinReport rep;
    const double slack = 1e-12 * spectral_scale(b);
    rep.nonnegative_real_parts = true;
    rep.diagonally_dominant = true;
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
        GershgorinDisk d;
        d.center = b(i, i);
        d.radius = b.row(i).cwiseAbs().sum() - std::abs(b(i, i));
        if (d.center - d.radius < -slack) rep.nonnegative_real_parts = false;
        if (b(i, i) < d.radius - slack) rep.diagonally_dominant = false;
        rep.disks.push_back(d);
    }
    return rep;
}

} // namespace syncgap
