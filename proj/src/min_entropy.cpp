#include "covasym/min_entropy.hpp"

#include <cmath>

namespace covasym {

JointSetting::JointSetting(const Representation& ref, const Representation& sys) : ref_(ref), sys_(sys) {
    if (!ref.compatible_with(sys)) throw SpecError("reference and system representations belong to different groups");
    joint_ = std::make_shared<TwirlChannel>(ref.tensor(sys));
    ref_tw_ = std::make_shared<TwirlChannel>(ref);
    sys_tw_ = std::make_shared<TwirlChannel>(sys);
}

JointSetting JointSetting::for_output(const Representation& out, const Representation& in) {
    return JointSetting(out.dual(), in);
}

const char* phi_method_name(PhiMethod m) {
    return m == PhiMethod::Sdp ? "sdp" : "symmetric_closed_form";
}

PhiEvaluation phi_of_operator(const CMatrix& m, int d_r, int d_a, const std::vector<std::vector<int>>* blocks, const PhiOptions& opts) {
    const int n = d_r * d_a;
    if (m.rows() != n || m.cols() != n) throw DimensionMismatch("phi: operator does not act on H_R (x) H_A");
    if (!is_hermitian(m, 1e-10 * std::max(1.0, max_abs_entry(m)))) throw NotHermitian("phi: operator is not Hermitian");

    std::vector<std::vector<int>> all;
    if (!blocks) {
        all.emplace_back();
        for (int i = 0; i < n; ++i) all[0].push_back(i);
        blocks = &all;
    }
    const CMatrix mh = hermitian_part(m);
    auto restrict = [](const CMatrix& x, const std::vector<int>& idx) {
        CMatrix out(idx.size(), idx.size());
        for (size_t i = 0; i < idx.size(); ++i)
            for (size_t j = 0; j < idx.size(); ++j) out(i, j) = x(idx[i], idx[j]);
        return out;
    };

    SdpProblem p;
    for (const auto& blk : *blocks) {
        p.block_sizes.push_back(static_cast<int>(blk.size()));
        p.c.push_back(-restrict(mh, blk));
    }
    const std::vector<CMatrix> basis = hermitian_operator_basis(d_a);
    const CMatrix id_r = CMatrix::Identity(d_r, d_r);
    for (const auto& e : basis) {
        const CMatrix k = kron(id_r, e);
        SdpConstraint con;
        for (const auto& blk : *blocks) {
            CMatrix a = restrict(k, blk);
            if (max_abs_entry(a) == 0.0) a.resize(0, 0);
            con.a.push_back(std::move(a));
        }
        con.b = e.trace().real();
        p.constraints.push_back(std::move(con));
    }

    SdpOptions so;
    so.tol = opts.tol;
    SdpSolution sol = solve(p, so);
    if (sol.status != SdpStatus::Optimal) {
        so.tol = std::max(opts.tol * 100.0, 1e-8);
        sol = solve(p, so);
    }
    if (sol.status != SdpStatus::Optimal) {
        const bool close = sol.gap < 1e-6 && sol.primal_residual < 1e-6 && sol.dual_residual < 1e-6;
        if (!close) throw SolverFailure(std::string("phi: SDP did not converge (") + sdp_status_name(sol.status) + ")");
    }

    PhiEvaluation ev;
    ev.method = PhiMethod::Sdp;
    ev.status = sol.status;
    ev.gap = sol.gap;
    ev.phi = -0.5 * (sol.primal_objective + sol.dual_objective);
    ev.h_min = -std::log2(ev.phi);
    ev.x_a = CMatrix::Zero(d_a, d_a);
    for (size_t i = 0; i < basis.size(); ++i) ev.x_a -= sol.y(static_cast<Eigen::Index>(i)) * basis[i];
    const double slack = min_eigenvalue(kron(id_r, ev.x_a) - mh);
    ev.certified = sol.status == SdpStatus::Optimal && slack >= -1e-7 * std::max(1.0, ev.phi);
    return ev;
}

PhiEvaluation phi_eta(const CMatrix& eta, const CMatrix& tau, const JointSetting& s, const PhiOptions& opts) {
    if (eta.rows() != s.d_r() || eta.cols() != s.d_r()) throw DimensionMismatch("phi_eta: reference state dimension mismatch");
    if (tau.rows() != s.d_a() || tau.cols() != s.d_a()) throw DimensionMismatch("phi_eta: state dimension mismatch");
    if (opts.symmetric_shortcut && (is_symmetric(s.ref(), eta, 1e-12) || is_symmetric(s.sys(), tau, 1e-12))) {
        // Phi(G(eta) (x) G(tau)) = ||G(eta)||_inf
        const CMatrix ge = s.ref_twirl().apply(eta);
        PhiEvaluation ev;
        ev.method = PhiMethod::SymmetricClosedForm;
        ev.phi = max_eigenvalue(ge);
        ev.h_min = -std::log2(ev.phi);
        ev.x_a = ev.phi * s.sys_twirl().apply(tau);
        ev.certified = true;
        return ev;
    }
    const CMatrix omega = s.joint().apply(kron(eta, tau));
    return phi_of_operator(omega, s.d_r(), s.d_a(), &s.joint().blocks(), opts);
}

double delta_h(const CMatrix& eta, const CMatrix& rho, const CMatrix& sigma, const JointSetting& s, const PhiOptions& opts) {
    const double pr = phi_eta(eta, rho, s, opts).phi;
    const double ps = phi_eta(eta, sigma, s, opts).phi;
    return std::log2(pr) - std::log2(ps);
}

double phi_channel_lower_bound(const CMatrix& eta, const CMatrix& tau, const CovariantChannel& e, const JointSetting& s) {
    if (e.d_in != s.d_a() || e.d_out != s.d_r()) throw DimensionMismatch("phi_channel_lower_bound: channel dimensions do not match the setting");
    if (!e.is_covariant(s.sys(), s.ref().dual(), 1e-8)) throw std::invalid_argument("phi_channel_lower_bound: channel is not covariant");
    return (eta.transpose() * e.apply(tau)).trace().real();
}

double phi_tilde(const RVector& x, const CMatrix& tau, const JointSetting& s, const PhiOptions& opts) {
    const CMatrix eta = state_from_bloch(x, s.d_r());
    return phi_eta(eta, tau, s, opts).phi - 1.0 / s.d_r();
}

}  // namespace covasym
