#include "covasym/depolarization.hpp"

#include <cmath>

namespace covasym {

namespace {

constexpr double kSupportTol = 1e-9;

const CMatrix& twirled_part(const ModeDecomposition& md) {
    const Mode* m = md.find(0, 0);
    if (!m) throw std::logic_error("mode decomposition lacks the trivial irrep");
    return m->op;
}

bool leaks(const CMatrix& x, const CMatrix& proj) {
    const CMatrix comp = CMatrix::Identity(proj.rows(), proj.cols()) - proj;
    return max_abs_entry(comp * x) > kSupportTol || max_abs_entry(x * comp) > kSupportTol;
}

// Irrep matrices v_ij(g) = <X_i, U_g X_j U_g^dag> of the first copy.
std::vector<CMatrix> irrep_matrices(const ItoBasis& b, int irrep, const Representation& rep) {
    const int dim = b.irreps()[irrep].dim;
    std::vector<CMatrix> out;
    for (const auto& u : rep.elements()) {
        CMatrix v(dim, dim);
        for (int j = 0; j < dim; ++j) {
            const CMatrix img = u * b.element(irrep, 0, j) * u.adjoint();
            for (int i = 0; i < dim; ++i) v(i, j) = (b.element(irrep, 0, i).adjoint() * img).trace();
        }
        out.push_back(v);
    }
    return out;
}

void require_aligned(const ItoBasis& a, int ia, const Representation& ra, const ItoBasis& b, int ib, const Representation& rb) {
    if (a.kind() != GroupKind::Finite || a.irreps()[ia].dim == 1) return;
    const auto va = irrep_matrices(a, ia, ra);
    const auto vb = irrep_matrices(b, ib, rb);
    for (size_t g = 0; g < va.size(); ++g)
        if (max_abs_entry(va[g] - vb[g]) > 1e-8)
            throw std::domain_error("input and output ITO bases use different matrices for a multi-dimensional irrep");
}

struct ModeTable {
    std::vector<ModeCheck> rows;
    bool all_ok = true;
};

// Rows lhs = factor * f(rho), rhs = g(target) over the non-trivial output modes.
ModeTable mode_table(const ModeDecomposition& md_in, const ItoBasis& b_in, const Representation& r_in, const ModeDecomposition& md_out,
                     const ItoBasis& b_out, const Representation& r_out, double factor) {
    ModeTable t;
    for (size_t i = 0; i < b_out.irreps().size(); ++i) {
        const IrrepInfo& ir = b_out.irreps()[i];
        if (ir.trivial) continue;
        const int ia = b_in.match_irrep(b_out, static_cast<int>(i));
        if (ia >= 0) require_aligned(b_in, ia, r_in, b_out, static_cast<int>(i), r_out);
        for (int j = 0; j < ir.dim; ++j) {
            ModeCheck row;
            row.irrep = static_cast<int>(i);
            row.component = j;
            row.label = b_out.label(static_cast<int>(i), j);
            row.f = ia >= 0 ? f_coefficient(md_in, ia, j) : 0.0;
            row.g = g_coefficient(md_out, static_cast<int>(i), j);
            row.lhs = factor * row.f;
            row.rhs = row.g;
            row.ok = row.lhs >= row.rhs;
            t.all_ok = t.all_ok && row.ok;
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

void validate_p(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("depolarization parameter p must lie in [0, 1]");
}

}  // namespace

double f_coefficient(const ModeDecomposition& md, int irrep, int component) {
    const Mode* m = md.find(irrep, component);
    if (!m) throw std::out_of_range("f_coefficient: mode not present in the basis");
    const CMatrix& g = twirled_part(md);
    if (leaks(m->op, support_projector(g))) throw std::domain_error("f_coefficient: mode lies outside the support of G(rho)");
    const CMatrix gi = power_on_support(hermitian_part(g), -0.5);
    return (m->op * gi * m->op.adjoint() * gi).trace().real();
}

double f_coefficient(const CMatrix& rho, const ItoBasis& basis, int irrep, int component) {
    return f_coefficient(decompose_modes(rho, basis), irrep, component);
}

double d2_divergence(const CMatrix& x, const CMatrix& s) {
    if (x.rows() != s.rows() || x.cols() != s.cols()) throw DimensionMismatch("d2_divergence: dimension mismatch");
    const CMatrix sh = hermitian_part(s);
    if (leaks(x, support_projector(sh))) return std::numeric_limits<double>::infinity();
    const CMatrix q = power_on_support(sh, -0.25);
    const CMatrix y = q * x * q;
    return std::log2(y.squaredNorm());
}

TruncatedOutput truncate_output(const CMatrix& sigma, const Representation& out, double tol) {
    if (sigma.rows() != out.dim()) throw DimensionMismatch("truncate_output: dimension mismatch");
    DensityMatrix::from_matrix(sigma);
    TwirlChannel tw(out);
    const CMatrix g = tw.apply(sigma);
    std::vector<CVector> cols;
    for (const auto& blk : tw.blocks()) {
        CMatrix sub(blk.size(), blk.size());
        for (size_t i = 0; i < blk.size(); ++i)
            for (size_t j = 0; j < blk.size(); ++j) sub(i, j) = g(blk[i], blk[j]);
        Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(sub));
        for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
            if (es.eigenvalues()(k) <= tol) continue;
            CVector v = CVector::Zero(out.dim());
            for (size_t i = 0; i < blk.size(); ++i) v(blk[i]) = es.eigenvectors()(i, k);
            cols.push_back(v);
        }
    }
    if (cols.empty()) throw InvalidState("truncate_output: G(sigma) has empty support");
    CMatrix v(out.dim(), cols.size());
    for (size_t c = 0; c < cols.size(); ++c) v.col(c) = cols[c];
    TruncatedOutput t{out.restrict_to(v), v, v.adjoint() * sigma * v, static_cast<int>(cols.size())};
    return t;
}

CMatrix depolarized_target(const CMatrix& sigma, double p, const Representation& out) {
    validate_p(p);
    const TruncatedOutput t = truncate_output(sigma, out);
    return (1.0 - p) * sigma + (p / t.d_s) * (t.isometry * t.isometry.adjoint());
}

DepolReport depol_check(const CMatrix& rho, const CMatrix& sigma, double p, const Representation& in, const Representation& out) {
    if (rho.rows() != in.dim()) throw DimensionMismatch("depol_check: input state dimension mismatch");
    validate_p(p);
    DensityMatrix::from_matrix(rho);
    const TruncatedOutput t = truncate_output(sigma, out);
    DepolReport rep;
    rep.p = p;
    rep.d_s = t.d_s;
    rep.target = (1.0 - p) * sigma + (p / t.d_s) * (t.isometry * t.isometry.adjoint());

    const ItoBasis b_out = ItoBasis::build(t.rep);
    const ItoBasis b_in = ItoBasis::build(in);
    const ModeDecomposition md_out = decompose_modes(t.sigma, b_out);
    const ModeDecomposition md_in = decompose_modes(rho, b_in);
    rep.lambda_min = min_eigenvalue(twirled_part(md_out));
    rep.n = b_out.nontrivial_dimension_sum();
    if (p >= 1.0) {
        rep.verdict = true;
        rep.note = "p = 1: target is the maximally mixed state on the support";
        return rep;
    }
    if (rep.n == 0) {
        rep.verdict = true;
        rep.note = "no non-trivial irreps on the truncated output";
        return rep;
    }
    const double factor = (rep.lambda_min + p / (t.d_s * (1.0 - p))) / rep.n;
    ModeTable mt = mode_table(md_in, b_in, in, md_out, b_out, t.rep, factor);
    rep.modes = std::move(mt.rows);
    rep.verdict = mt.all_ok;
    return rep;
}

double minimal_p(const CMatrix& rho, const CMatrix& sigma, const Representation& in, const Representation& out) {
    auto pass = [&](double p) { return depol_check(rho, sigma, p, in, out).verdict; };
    if (pass(0.0)) return 0.0;
    double lo = 0.0, hi = 1.0 - 1e-9;
    if (!pass(hi)) return 1.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (pass(mid) ? hi : lo) = mid;
    }
    return hi;
}

double q_star(const CMatrix& rho, const CMatrix& sigma_p, const Representation& rep) {
    TwirlChannel tw(rep);
    const CMatrix gs = tw.apply(sigma_p);
    const CMatrix gr = tw.apply(rho);
    auto lmin = [&](double q) { return min_eigenvalue(hermitian_part(gs - (1.0 - q) * gr)); };
    if (lmin(0.0) >= 0.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        (lmin(mid) >= 0.0 ? hi : lo) = mid;
    }
    return hi;
}

DepolReport depol_check_q(const CMatrix& rho, const CMatrix& sigma, double p, double q, const Representation& rep) {
    if (rho.rows() != rep.dim() || sigma.rows() != rep.dim()) throw DimensionMismatch("depol_check_q: dimension mismatch");
    validate_p(p);
    DensityMatrix::from_matrix(rho);
    DensityMatrix::from_matrix(sigma);
    const int d = rep.dim();
    DepolReport r;
    r.p = p;
    r.q = q;
    r.d_s = d;
    r.target = (1.0 - p) * sigma + (p / d) * CMatrix::Identity(d, d);
    if (max_abs_entry(rho - r.target) <= 1e-12) {
        r.verdict = true;
        r.q_star = 0.0;
        r.note = "rho equals sigma_p";
        return r;
    }
    r.q_star = q_star(rho, r.target, rep);
    if (!(q > r.q_star) || q > 1.0) {
        throw QBelowThreshold("depol_check_q: q must lie in (q*, 1] with q* = " + std::to_string(r.q_star), r.q_star);
    }
    const CMatrix sq = r.target - (1.0 - q) * rho;
    const ItoBasis b = ItoBasis::build(rep);
    const ModeDecomposition md_in = decompose_modes(rho, b);
    const ModeDecomposition md_out = decompose_modes(sq, b);
    r.lambda_min = min_eigenvalue(hermitian_part(twirled_part(md_out)));
    r.n = b.nontrivial_dimension_sum();
    if (r.n == 0) {
        r.verdict = true;
        r.note = "no non-trivial irreps";
        return r;
    }
    ModeTable mt = mode_table(md_in, b, rep, md_out, b, rep, r.lambda_min / r.n);
    r.modes = std::move(mt.rows);
    r.verdict = mt.all_ok;
    // Flag the cases where reading lambda_min as the smallest non-zero eigenvalue would flip the verdict.
    const RVector ev = eig_hermitian(hermitian_part(twirled_part(md_out))).values;
    for (int i = 0; i < ev.size(); ++i) {
        if (ev(i) <= 1e-10) continue;
        if (ev(i) > r.lambda_min + 1e-10 && mode_table(md_in, b, rep, md_out, b, rep, ev(i) / r.n).all_ok != r.verdict)
            r.note = "verdict differs if lambda_min is read as the smallest non-zero eigenvalue (" + std::to_string(ev(i)) + ")";
        break;
    }
    return r;
}

DepolReport depol_scan_q(const CMatrix& rho, const CMatrix& sigma, double p, const Representation& rep, int grid) {
    if (grid < 1) throw std::invalid_argument("depol_scan_q: grid must be positive");
    const int d = rep.dim();
    const CMatrix sp = (1.0 - p) * sigma + (p / d) * CMatrix::Identity(d, d);
    if (max_abs_entry(rho - sp) <= 1e-12) return depol_check_q(rho, sigma, p, 1.0, rep);
    const double qs = q_star(rho, sp, rep);
    DepolReport last;
    for (int i = 1; i <= grid; ++i) {
        const double q = (i == grid) ? 1.0 : qs + (1.0 - qs) * i / grid;
        if (!(q > qs)) continue;
        last = depol_check_q(rho, sigma, p, q, rep);
        if (last.verdict) return last;
    }
    if (last.target.size() == 0) {
        // q* = 1: no admissible q in (q*, 1]
        last.p = p;
        last.d_s = d;
        last.q_star = qs;
        last.target = sp;
        last.note = "q* reaches 1, no admissible q";
    }
    return last;
}

CovariantChannel pgm_channel(const CMatrix& rho, const CMatrix& tau, const Representation& in, const Representation& out) {
    if (rho.rows() != in.dim() || tau.rows() != out.dim()) throw DimensionMismatch("pgm_channel: dimension mismatch");
    DensityMatrix::from_matrix(rho);
    DensityMatrix::from_matrix(tau);
    const int da = in.dim(), db = out.dim();
    const CMatrix g = hermitian_part(twirl(in, rho));
    const CMatrix pi = support_projector(g);
    if (pi.trace().real() < 0.5) throw InvalidState("pgm_channel: G(rho) has empty support");
    const CMatrix gi = power_on_support(g, -0.5);
    const CMatrix rbar = gi * rho * gi;
    const CMatrix vtau = tau.reshaped(db * db, 1);
    const CMatrix vrbar = rbar.reshaped(da * da, 1);
    const CMatrix s0 = vtau * vrbar.adjoint();

    // S -> A_g S B_g^dag on superoperators; column-major vec gives the rep (in (x) in*) (x) (out* (x) out).
    const Representation big = in.tensor(in.dual()).tensor(out.dual().tensor(out));
    const CMatrix proj = big.invariant_projector();
    const CVector vs = proj * s0.reshaped(s0.size(), 1);
    CovariantChannel ch;
    ch.d_in = da;
    ch.d_out = db;
    ch.superop = vs.reshaped(db * db, da * da);
    const CMatrix comp = CMatrix::Identity(da, da) - pi;
    if (comp.norm() > 1e-12) {
        const CMatrix gt = twirl(out, tau);
        ch.superop += gt.reshaped(db * db, 1) * comp.reshaped(da * da, 1).adjoint();
    }
    ch.provenance = "pgm";
    return ch;
}

bool trace_norm_corollary(const CMatrix& rho, const CMatrix& sigma, const Representation& in, const Representation& out) {
    DensityMatrix::from_matrix(rho);
    const TruncatedOutput t = truncate_output(sigma, out);
    const ItoBasis b_out = ItoBasis::build(t.rep);
    const ItoBasis b_in = ItoBasis::build(in);
    const ModeDecomposition md_out = decompose_modes(t.sigma, b_out);
    const ModeDecomposition md_in = decompose_modes(rho, b_in);
    const double lmin = min_eigenvalue(twirled_part(md_out));
    const int n = b_out.nontrivial_dimension_sum();
    if (n == 0) return true;
    const CMatrix q = power_on_support(hermitian_part(twirled_part(md_in)), -0.25);
    for (size_t i = 0; i < b_out.irreps().size(); ++i) {
        if (b_out.irreps()[i].trivial) continue;
        const int ia = b_in.match_irrep(b_out, static_cast<int>(i));
        for (int j = 0; j < b_out.irreps()[i].dim; ++j) {
            const double rbar2 = ia >= 0 ? (q * md_in.find(ia, j)->op * q).squaredNorm() : 0.0;
            const double sig1 = trace_norm(md_out.find(static_cast<int>(i), j)->op) / lmin;
            if (rbar2 / n < sig1) return false;
        }
    }
    return true;
}

}  // namespace covasym
