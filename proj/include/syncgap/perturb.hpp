#pragma once

#include "syncgap/graph.hpp"
#include "syncgap/spectral.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace syncgap {

struct EdgeChange {
    NodeIndex src = 0;
    NodeIndex dst = 0;
    double dw = 0.0; // change of W(dst, src) at epsilon = 1
};

/// Structural modification L_p = L + eps * Ltilde.
///
/// Ltilde is the Laplacian of the weight change: +dw on (dst, dst) and -dw
/// on (dst, src) for every change. Weights stay nonnegative for
/// eps in [0, eps_max].
struct Perturbation {
    std::vector<EdgeChange> changes;
    Matrix Ltilde;
    double eps_max = std::numeric_limits<double>::infinity();

    bool is_zero() const { return (Ltilde.array() == 0.0).all(); }
};

Perturbation edge_perturbation(const Network& net, NodeIndex src, NodeIndex dst, double dw);
Perturbation edge_perturbation(const Network& net, const std::vector<EdgeChange>& changes);
// Adds dw to both i->j and j->i.
Perturbation symmetric_perturbation(const Network& net, NodeIndex i, NodeIndex j, double dw);
Perturbation zero_perturbation(const Network& net);

enum class Verdict { stabilizing, destabilizing, neutral };
const char* to_string(Verdict v);

// Sign of Re(slope) with a 1e-10 dead band.
Verdict classify_slope(Complex slope);

enum class SensitivityPath { general, block, cutset };
const char* to_string(SensitivityPath p);

struct SensitivityReport {
    std::vector<EdgeChange> changes;
    Complex lambda2;
    Complex slope;
    Verdict verdict = Verdict::neutral;
    SensitivityPath path = SensitivityPath::general;
    bool complex_gap = false;
    // Block path only.
    std::optional<Matrix> M;
    std::optional<Vector> p;
    std::optional<Vector> q;
    std::optional<Vector> s;
    // |block slope - general slope|, when both were evaluated.
    std::optional<double> cross_check;
};

// slope = <u, Ltilde v> / <u, v> for the simple gap of L.
SensitivityReport sensitivity_general(const Matrix& L, const Perturbation& pert);
SensitivityReport sensitivity_general(const SpectralSummary& base, const Perturbation& pert);

// slope = -<q, M s> / <q, s>, the block formula with M = C (L1 - lambda2 I)^-1 Delta.
double block_slope(const Vector& q, const Matrix& M, const Vector& s);

/// Block-path sensitivity for new links pointing from downstream to
/// upstream (against the cutset). Requires lambda_2 to be the smallest
/// eigenvalue of L2 + Dc and not an eigenvalue of L1.
SensitivityReport sensitivity_block(const BlockForm& bf, const Perturbation& pert);

/// Reinforcing cutset link src (upstream) -> dst (downstream) by dw >= 0:
/// slope = <q, D_delta s> / <q, s> >= 0.
SensitivityReport cutset_sensitivity(const BlockForm& bf, NodeIndex src, NodeIndex dst, double dw);

struct FiniteDifference {
    Complex slope;
    Complex lambda2_base;
    Complex lambda2_perturbed;
};

/// (lambda_2(L + eps Ltilde) - lambda_2(L)) / eps from two full eigensolves,
/// following the branch by proximity. Carries an O(eps) bias. Throws
/// ConvergenceError when the matching is ambiguous.
FiniteDifference fd_oracle(const Network& net, const Perturbation& pert, double eps);

enum class CandidateSet { all_absent, absent_symmetric, cutset };

struct Candidate {
    NodeIndex src = 0;
    NodeIndex dst = 0;
    double dw = 1.0;
    bool symmetric = false;
};

std::vector<Candidate> make_candidates(const Network& net, CandidateSet set, double dw = 1.0);

struct RankedLink {
    Candidate candidate;
    SensitivityReport report;
};

/// Sensitivity of every candidate, sorted by Re(slope) ascending (most
/// destabilising first, ties in candidate order). Candidates are evaluated
/// concurrently; the result does not depend on scheduling. The block path
/// is added whenever the network splits into two components with the gap
/// downstream and the candidate points against or along the cutset.
std::vector<RankedLink> classify_links(const Network& net, const std::vector<Candidate>& candidates);

} // namespace syncgap
