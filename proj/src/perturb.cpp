#include "syncgap/perturb.hpp"

#include "syncgap/error.hpp"
#include "syncgap/parallel.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace syncgap {

namespace {

constexpr double verdict_tolerance = 1e-10;
constexpr double zero_tolerance = 1e-9;
constexpr double simple_tolerance = 1e-8;

std::ptrdiff_t position(const NodeSet& set, NodeIndex node) {
    const auto it = std::lower_bound(set.begin(), set.end(), node);
    if (it == set.end() || *it != node) return -1;
    return it - set.begin();
}

// Spectral data of a block split whose gap sits in the downstream block.
struct BlockContext {
    const BlockForm* bf = nullptr;
    double lambda = 0.0;
    Vector q; // left eigenvector of L2 + Dc, <q, s> = 1
    Vector s; // right eigenvector of L2 + Dc, ||s|| = 1
    Eigen::PartialPivLU<Matrix> resolvent; // LU of (L1 - lambda I)
};

BlockContext downstream_gap(const BlockForm& bf, bool need_resolvent) {
    const Matrix b = bf.downstream_block();
    const double scale = spectral_scale(bf.assemble());
    const auto evb = eigen_all(b);
    const Complex lam = evb.front();
    if (lam.imag() != 0.0 || lam.real() <= zero_tolerance * scale)
        throw InputError("smallest eigenvalue of the downstream block is not real positive");
    if (evb.size() > 1 && std::abs(evb[1] - lam) <= simple_tolerance * scale)
        throw DegenerateSpectrum("smallest eigenvalue of the downstream block is not simple");

    const auto ev1 = eigen_all(bf.L1);
    for (const auto& z : ev1) {
        if (std::abs(z) <= zero_tolerance * scale) continue;
        if (std::abs(z - lam) <= simple_tolerance * scale)
            throw InputError("lambda2 is also an eigenvalue of L1 (resolvent is singular)");
        if (z.real() < lam.real())
            throw InputError("the spectral gap resides in the upstream block L1");
    }

    BlockContext ctx;
    ctx.bf = &bf;
    ctx.lambda = lam.real();
    const auto pair = eigenpair(b, lam);
    ctx.s = pair.right.real();
    ctx.q = pair.left.real();
    if (need_resolvent) {
        const auto n1 = bf.L1.rows();
        ctx.resolvent.compute(bf.L1 - ctx.lambda * Matrix::Identity(n1, n1));
    }
    return ctx;
}

SensitivityReport block_report(const BlockContext& ctx, const Perturbation& pert) {
    const auto& bf = *ctx.bf;
    const auto n1 = static_cast<Eigen::Index>(bf.upstream.size());
    const auto n2 = static_cast<Eigen::Index>(bf.downstream.size());

    Matrix delta = Matrix::Zero(n1, n2);
    for (const auto& c : pert.changes) {
        const auto up = position(bf.upstream, c.dst);
        const auto down = position(bf.downstream, c.src);
        if (up < 0 || down < 0)
            throw InputError("block formula needs links from downstream to upstream only");
        delta(up, down) += c.dw;
    }

    SensitivityReport r;
    r.changes = pert.changes;
    r.path = SensitivityPath::block;
    r.lambda2 = Complex(ctx.lambda, 0.0);
    const Matrix m = bf.C * ctx.resolvent.solve(delta);
    r.slope = Complex(block_slope(ctx.q, m, ctx.s), 0.0);
    r.verdict = classify_slope(r.slope);
    r.M = m;
    // p^T = q^T C (L1 - lambda I)^-1
    r.p = ctx.resolvent.transpose().solve(Vector(bf.C.transpose() * ctx.q));
    r.q = ctx.q;
    r.s = ctx.s;
    return r;
}

SensitivityReport cutset_report(const BlockContext& ctx, NodeIndex src, NodeIndex dst, double dw) {
    const auto& bf = *ctx.bf;
    const auto up = position(bf.upstream, src);
    const auto down = position(bf.downstream, dst);
    if (up < 0 || down < 0) throw InputError("cutset reinforcement must point from upstream to downstream");
    if (dw < 0.0) throw InputError("cutset reinforcement needs dw >= 0");

    SensitivityReport r;
    r.changes = {{src, dst, dw}};
    r.path = SensitivityPath::cutset;
    r.lambda2 = Complex(ctx.lambda, 0.0);
    r.slope = Complex(ctx.q[down] * dw * ctx.s[down] / ctx.q.dot(ctx.s), 0.0);
    r.verdict = classify_slope(r.slope);
    r.q = ctx.q;
    r.s = ctx.s;
    return r;
}

void attach_cross_check(SensitivityReport& r, const SpectralSummary& base, const Perturbation& pert) {
    if (base.degenerate()) return;
    const auto general = sensitivity_general(base, pert);
    r.cross_check = std::abs(general.slope - r.slope);
}

} // namespace

// ---------------------------------------------------------------------------
// Perturbations

Perturbation edge_perturbation(const Network& net, const std::vector<EdgeChange>& changes) {
    const auto n = static_cast<Eigen::Index>(net.size());
    Perturbation p;
    p.Ltilde = Matrix::Zero(n, n);
    Matrix dw_total = Matrix::Zero(n, n);
    for (const auto& c : changes) {
        if (c.src >= net.size() || c.dst >= net.size()) throw InputError("edge endpoint out of range");
        if (c.src == c.dst) throw InputError("self-loop at node " + net.label(c.src));
        dw_total(c.dst, c.src) += c.dw;
        p.Ltilde(c.dst, c.dst) += c.dw;
        p.Ltilde(c.dst, c.src) -= c.dw;
        p.changes.push_back(c);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double d = dw_total(i, j);
            if (d >= 0.0) continue;
            const double w = net.weights()(i, j);
            if (w < -d)
                throw InputError("weight of " + net.label(static_cast<NodeIndex>(j)) + "->" +
                                 net.label(static_cast<NodeIndex>(i)) + " would become negative");
            p.eps_max = std::min(p.eps_max, w / -d);
        }
    }
    return p;
}

Perturbation edge_perturbation(const Network& net, NodeIndex src, NodeIndex dst, double dw) {
    return edge_perturbation(net, std::vector<EdgeChange>{{src, dst, dw}});
}

Perturbation symmetric_perturbation(const Network& net, NodeIndex i, NodeIndex j, double dw) {
    return edge_perturbation(net, std::vector<EdgeChange>{{i, j, dw}, {j, i, dw}});
}

Perturbation zero_perturbation(const Network& net) { return edge_perturbation(net, std::vector<EdgeChange>{}); }

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::stabilizing: return "stabilizing";
    case Verdict::destabilizing: return "destabilizing";
    case Verdict::neutral: return "neutral";
    }
    return "?";
}

Verdict classify_slope(Complex slope) {
    if (slope.real() > verdict_tolerance) return Verdict::stabilizing;
    if (slope.real() < -verdict_tolerance) return Verdict::destabilizing;
    return Verdict::neutral;
}

const char* to_string(SensitivityPath p) {
    switch (p) {
    case SensitivityPath::general: return "general";
    case SensitivityPath::block: return "block";
    case SensitivityPath::cutset: return "cutset";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Sensitivities

SensitivityReport sensitivity_general(const SpectralSummary& base, const Perturbation& pert) {
    if (base.degenerate()) throw DegenerateSpectrum("spectral gap is degenerate; sensitivity is undefined");
    if (pert.Ltilde.rows() != base.v.size()) throw InputError("perturbation size does not match the network");

    SensitivityReport r;
    r.changes = pert.changes;
    r.lambda2 = base.gap;
    r.complex_gap = !base.gap_is_real();
    const ComplexVector lv = pert.Ltilde.cast<Complex>() * base.v;
    r.slope = base.u.dot(lv) / base.u.dot(base.v);
    r.verdict = classify_slope(r.slope);
    return r;
}

SensitivityReport sensitivity_general(const Matrix& L, const Perturbation& pert) {
    return sensitivity_general(spectral_gap(L), pert);
}

double block_slope(const Vector& q, const Matrix& M, const Vector& s) {
    return -q.dot(M * s) / q.dot(s);
}

SensitivityReport sensitivity_block(const BlockForm& bf, const Perturbation& pert) {
    const auto ctx = downstream_gap(bf, /*need_resolvent=*/true);
    auto r = block_report(ctx, pert);
    attach_cross_check(r, spectral_summary(bf.assemble()), pert);
    return r;
}

SensitivityReport cutset_sensitivity(const BlockForm& bf, NodeIndex src, NodeIndex dst, double dw) {
    const auto ctx = downstream_gap(bf, /*need_resolvent=*/false);
    auto r = cutset_report(ctx, src, dst, dw);
    const auto n = static_cast<Eigen::Index>(bf.upstream.size() + bf.downstream.size());
    Perturbation pert;
    pert.changes = r.changes;
    pert.Ltilde = Matrix::Zero(n, n);
    pert.Ltilde(dst, dst) += dw;
    pert.Ltilde(dst, src) -= dw;
    attach_cross_check(r, spectral_summary(bf.assemble()), pert);
    return r;
}

FiniteDifference fd_oracle(const Network& net, const Perturbation& pert, double eps) {
    if (!(eps > 0.0)) throw InputError("finite-difference step must be positive");
    if (eps > pert.eps_max) throw InputError("finite-difference step drives a weight negative");
    const Matrix L = laplacian(net).L;
    const double scale = spectral_scale(L);

    const auto base = eigen_all(L);
    std::size_t k = 0;
    while (k < base.size() && std::abs(base[k]) <= zero_tolerance * scale) ++k;
    if (k != 1 || k >= base.size()) throw DegenerateSpectrum("zero eigenvalue is not simple");
    const Complex lam = base[k];
    for (std::size_t j = 0; j < base.size(); ++j)
        if (j != k && std::abs(base[j] - lam) <= simple_tolerance * scale)
            throw DegenerateSpectrum("spectral gap is not simple");

    const Matrix Lp = L + eps * pert.Ltilde;
    const auto moved = eigen_all(Lp);
    std::vector<std::size_t> idx(moved.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + 2, idx.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(moved[a] - lam) < std::abs(moved[b] - lam);
    });
    const double d1 = std::abs(moved[idx[0]] - lam);
    const double d2 = std::abs(moved[idx[1]] - lam);
    if (d2 <= 2.0 * d1)
        throw ConvergenceError("eigenvalue branch matching is ambiguous; use a smaller step");

    FiniteDifference fd;
    fd.lambda2_base = lam;
    fd.lambda2_perturbed = moved[idx[0]];
    fd.slope = (fd.lambda2_perturbed - lam) / eps;
    return fd;
}

// ---------------------------------------------------------------------------
// Ranking

std::vector<Candidate> make_candidates(const Network& net, CandidateSet set, double dw) {
    std::vector<Candidate> out;
    const auto n = net.size();
    switch (set) {
    case CandidateSet::all_absent:
        for (NodeIndex src = 0; src < n; ++src)
            for (NodeIndex dst = 0; dst < n; ++dst)
                if (src != dst && !net.has_edge(src, dst)) out.push_back({src, dst, dw, false});
        break;
    case CandidateSet::absent_symmetric:
        for (NodeIndex i = 0; i < n; ++i)
            for (NodeIndex j = i + 1; j < n; ++j)
                if (!net.has_edge(i, j) && !net.has_edge(j, i)) out.push_back({i, j, dw, true});
        break;
    case CandidateSet::cutset:
        for (const auto& e : decompose(net).cutset_edges) out.push_back({e.src, e.dst, dw, false});
        break;
    }
    return out;
}

std::vector<RankedLink> classify_links(const Network& net, const std::vector<Candidate>& candidates) {
    const auto base = spectral_gap(laplacian(net));

    // Block path context when the network is exactly two components with
    // the gap downstream.
    std::optional<BlockForm> bf;
    std::optional<BlockContext> ctx;
    const auto dec = decompose(net);
    if (dec.components.size() == 2 && dec.condensation.size() == 1) {
        const auto [from, to] = dec.condensation.front();
        try {
            bf = block_form(net, dec.components[from], dec.components[to]);
            ctx = downstream_gap(*bf, /*need_resolvent=*/true);
            ctx->bf = &*bf;
        } catch (const Error&) {
            ctx.reset();
        }
    }

    std::vector<RankedLink> out(candidates.size());
    parallel_for(candidates.size(), [&](std::size_t i) {
        const auto& c = candidates[i];
        const auto pert = c.symmetric ? symmetric_perturbation(net, c.src, c.dst, c.dw)
                                      : edge_perturbation(net, c.src, c.dst, c.dw);
        SensitivityReport r;
        if (ctx && !c.symmetric && position(bf->downstream, c.src) >= 0 && position(bf->upstream, c.dst) >= 0) {
            r = block_report(*ctx, pert);
            attach_cross_check(r, base, pert);
        } else if (ctx && !c.symmetric && c.dw >= 0.0 && position(bf->upstream, c.src) >= 0 &&
                   position(bf->downstream, c.dst) >= 0) {
            r = cutset_report(*ctx, c.src, c.dst, c.dw);
            attach_cross_check(r, base, pert);
        } else {
            r = sensitivity_general(base, pert);
        }
        out[i] = {c, std::move(r)};
    });

    std::stable_sort(out.begin(), out.end(), [](const RankedLink& a, const RankedLink& b) {
        return a.report.slope.real() < b.report.slope.real();
    });
    return out;
}

} // namespace syncgap
