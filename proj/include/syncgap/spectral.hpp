#pragma once

#include "syncgap/graph.hpp"

#include <complex>
#include <cstddef>
#include <vector>

namespace syncgap {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

// max(1, ||A||_inf); the reference scale for all relative tolerances here.
double spectral_scale(const Matrix& a);

// Strict weak ordering on eigenvalues: ascending real part, then imaginary part.
bool eigenvalue_less(const Complex& a, const Complex& b);

/// All eigenvalues of a dense real matrix, sorted by (Re, Im).
///
/// Eigenvalues closer than 1e-7 * spectral_scale(A) are replaced by their
/// cluster mean. A defective eigenvalue of multiplicity k comes back from
/// QR split by O(eps^(1/k)); the mean of the split group is accurate to
/// working precision.
std::vector<Complex> eigen_all(const Matrix& a);

/// A simple eigenpair with its left eigenvector.
///
/// Normalisation: ||right||_2 = 1, the largest-magnitude entry of `right` is
/// real positive, and left^H right = 1. For a real eigenvalue both vectors
/// are real (zero imaginary parts).
struct Eigenpair {
    Complex value;
    ComplexVector left;
    ComplexVector right;
    double left_residual = 0.0;  // ||left^H A - value left^H||_inf
    double right_residual = 0.0; // ||A right - value right||_inf
};

// Inverse iteration on (A - value I) and (A^T - conj(value) I). Throws
// ConvergenceError when a residual stays above 1e-8 * spectral_scale(A).
Eigenpair eigenpair(const Matrix& a, Complex value);

struct SpectralSummary {
    std::vector<Complex> eigenvalues;
    double scale = 1.0;
    bool zero_simple = false;
    bool has_gap = false;
    bool gap_simple = false;
    Complex gap;        // lambda_2, the nonzero eigenvalue of smallest real part
    double gap_separation = 0.0; // distance from lambda_2 to the nearest other eigenvalue
    // Left/right eigenvectors of lambda_2; empty unless zero_simple && gap_simple.
    ComplexVector u;
    ComplexVector v;
    double left_residual = 0.0;
    double right_residual = 0.0;

    bool degenerate() const { return !(zero_simple && has_gap && gap_simple); }
    bool gap_is_real() const { return gap.imag() == 0.0; }
};

// Full spectral summary; degeneracy is reported through the flags.
SpectralSummary spectral_summary(const Matrix& L);

// As spectral_summary, but throws DegenerateSpectrum if 0 or lambda_2 is not simple.
SpectralSummary spectral_gap(const Matrix& L);
SpectralSummary spectral_gap(const Laplacian& lap);

/// Perron-Frobenius view of a downstream block B = L2 + Dc.
///
/// N = s I - B is entrywise nonnegative for s = max_i B(i,i); its Perron
/// root Lambda gives the smallest eigenvalue of B as s - Lambda, with
/// positive left (omega) and right (eta) eigenvectors.
struct PerronCertificate {
    double shift = 0.0;
    Matrix N;
    double perron_root = 0.0;
    Vector omega; // left Perron vector, scaled so <omega, eta> = 1
    Vector eta;   // right Perron vector, ||eta||_2 = 1
    double min_eig = 0.0;
    std::size_t iterations = 0;
};

struct PowerIterationOptions {
    double tolerance = 1e-12;
    std::size_t max_iterations = 100000;
};

PerronCertificate perron_certificate(const Matrix& b, const PowerIterationOptions& opts = {});

struct GershgorinDisk {
    double center = 0.0;
    double radius = 0.0;
};

struct GershgorinReport {
    std::vector<GershgorinDisk> disks;
    // No disk reaches into Re < 0, so every eigenvalue has Re >= 0.
    bool nonnegative_real_parts = false;
    // B(i,i) >= sum_{k != i} |B(i,k)| for every row.
    bool diagonally_dominant = false;
};

GershgorinReport gershgorin(const Matrix& b);

} // namespace syncgap
