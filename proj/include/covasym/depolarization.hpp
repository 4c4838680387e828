#pragma once

#include "covasym/channel.hpp"
#include "covasym/ito.hpp"

#include <limits>
#include <string>
#include <vector>

namespace covasym {

// f^lambda_j(rho) = tr[rho^lambda_j G(rho)^{-1/2} (rho^lambda_j)^dag G(rho)^{-1/2}], G inverted on its support.
// `md` must decompose rho in a basis whose trivial irrep carries G(rho).
double f_coefficient(const ModeDecomposition& md, int irrep, int component);
double f_coefficient(const CMatrix& rho, const ItoBasis& basis, int irrep, int component);

// log2 tr[(s^{-1/4} X s^{-1/4})^dag (s^{-1/4} X s^{-1/4})]; +inf when X leaves the support of s.
double d2_divergence(const CMatrix& x, const CMatrix& s);

struct TruncatedOutput {
    Representation rep;  // restriction to supp G(sigma)
    CMatrix isometry;    // d x d_S, columns span supp G(sigma)
    CMatrix sigma;       // V^dag sigma V
    int d_s = 0;
};

TruncatedOutput truncate_output(const CMatrix& sigma, const Representation& out, double tol = 1e-10);

struct ModeCheck {
    int irrep = 0;       // index in the output basis
    int component = 0;
    std::string label;
    double f = 0.0;
    double g = 0.0;
    double lhs = 0.0;    // n^{-1} (lambda_min + ...) f
    double rhs = 0.0;    // g
    bool ok = true;
};

struct DepolReport {
    std::vector<ModeCheck> modes;
    double lambda_min = 0.0;
    int n = 0;
    int d_s = 0;
    bool verdict = false;
    double p = 0.0;
    double q = std::numeric_limits<double>::quiet_NaN();       // depol_check_q only
    double q_star = std::numeric_limits<double>::quiet_NaN();  // depol_check_q only
    CMatrix target;  // sigma_p embedded in the output space
    std::string note;
};

// (1-p) sigma + p Pi_S / d_S with S = supp G(sigma)
CMatrix depolarized_target(const CMatrix& sigma, double p, const Representation& out);

DepolReport depol_check(const CMatrix& rho, const CMatrix& sigma, double p, const Representation& in, const Representation& out);

// Smallest p in [0, 1 - 1e-9] (60 bisection steps) passing depol_check; 1 if none does.
double minimal_p(const CMatrix& rho, const CMatrix& sigma, const Representation& in, const Representation& out);

// min q >= 0 with G(sigma_p - (1-q) rho) >= 0, to 1e-9.
double q_star(const CMatrix& rho, const CMatrix& sigma_p, const Representation& rep);

class QBelowThreshold : public std::domain_error {
public:
    QBelowThreshold(const std::string& msg, double qs) : std::domain_error(msg), q_star(qs) {}
    double q_star;
};

// Same system on both sides; sigma_p = (1-p) sigma + p 1/d. Throws QBelowThreshold when q <= q*.
DepolReport depol_check_q(const CMatrix& rho, const CMatrix& sigma, double p, double q, const Representation& rep);

// depol_check_q over q_i = q* + (1-q*) i / grid, i = 1..grid; the first passing q is reported, else q = 1.
DepolReport depol_scan_q(const CMatrix& rho, const CMatrix& sigma, double p, const Representation& rep, int grid = 64);

// Covariant measure-and-prepare channel with POVM G(rho)^{-1/2} rho(g) G(rho)^{-1/2} preparing tau(g),
// completed by preparing G(tau) on the complement of supp G(rho).
CovariantChannel pgm_channel(const CMatrix& rho, const CMatrix& tau, const Representation& in, const Representation& out);

// n^{-1} ||rho_bar^lambda_j||_2^2 >= ||sigma^lambda_j||_1 / lambda_min for all lambda != 0, j.
bool trace_norm_corollary(const CMatrix& rho, const CMatrix& sigma, const Representation& in, const Representation& out);

}  // namespace covasym
