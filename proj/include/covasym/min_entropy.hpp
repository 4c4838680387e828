#pragma once

#include "covasym/channel.hpp"
#include "covasym/sdp.hpp"

#include <memory>
#include <vector>

namespace covasym {

// Reference system R with its representation, system A, and the joint twirl on R (x) A.
// For interconversion into an output system B the reference carries the dual of B's representation.
class JointSetting {
public:
    JointSetting(const Representation& ref, const Representation& sys);
    static JointSetting for_output(const Representation& out, const Representation& in);

    const Representation& ref() const { return ref_; }
    const Representation& sys() const { return sys_; }
    int d_r() const { return ref_.dim(); }
    int d_a() const { return sys_.dim(); }
    const TwirlChannel& joint() const { return *joint_; }
    const TwirlChannel& ref_twirl() const { return *ref_tw_; }
    const TwirlChannel& sys_twirl() const { return *sys_tw_; }

private:
    Representation ref_;
    Representation sys_;
    std::shared_ptr<const TwirlChannel> joint_, ref_tw_, sys_tw_;
};

enum class PhiMethod { Sdp, SymmetricClosedForm };

const char* phi_method_name(PhiMethod m);

struct PhiEvaluation {
    double phi = 0.0;
    double h_min = 0.0;
    PhiMethod method = PhiMethod::Sdp;
    CMatrix x_a;               // optimal X in 1_R (x) X >= M
    SdpStatus status = SdpStatus::Optimal;
    double gap = 0.0;
    bool certified = false;    // KKT residuals and gap within tolerance
};

class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PhiOptions {
    double tol = 1e-10;
    bool symmetric_shortcut = true;
};

// Phi(M) = inf { tr X : 1_R (x) X - M >= 0 }, solved through max <M,Y> s.t. tr_R Y = 1_A, Y >= 0.
// `blocks` restricts Y to a block-diagonal pattern containing an optimizer (pass the joint twirl blocks).
PhiEvaluation phi_of_operator(const CMatrix& m, int d_r, int d_a, const std::vector<std::vector<int>>* blocks = nullptr,
                              const PhiOptions& opts = {});

// Phi_eta(tau) = Phi(G(eta (x) tau)); H_min = -log2 Phi.
PhiEvaluation phi_eta(const CMatrix& eta, const CMatrix& tau, const JointSetting& s, const PhiOptions& opts = {});

// H_eta(sigma) - H_eta(rho) = log2 Phi_eta(rho) - log2 Phi_eta(sigma)
double delta_h(const CMatrix& eta, const CMatrix& rho, const CMatrix& sigma, const JointSetting& s, const PhiOptions& opts = {});

// tr[eta^T E(tau)] for a covariant channel E from the system into the output dual to the reference.
double phi_channel_lower_bound(const CMatrix& eta, const CMatrix& tau, const CovariantChannel& e, const JointSetting& s);

// Phi_{eta(x)}(tau) - 1/d_R with eta(x) = 1/d_R + sum_k x_k X_k in the rescaled Bloch basis.
double phi_tilde(const RVector& x, const CMatrix& tau, const JointSetting& s, const PhiOptions& opts = {});

}  // namespace covasym
