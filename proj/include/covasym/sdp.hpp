#pragma once

#include "covasym/hermitian.hpp"

#include <string>
#include <vector>

namespace covasym {

// Complex Hermitian block SDP
//   primal: min sum_k <C_k, X_k>  s.t.  sum_k <A_ik, X_k> = b_i,  X_k >= 0
//   dual:   max b.y               s.t.  Z_k = C_k - sum_i y_i A_ik >= 0
// An empty A_ik stands for the zero block.
struct SdpConstraint {
    std::vector<CMatrix> a;
    double b = 0.0;
};

struct SdpProblem {
    std::vector<int> block_sizes;
    std::vector<CMatrix> c;
    std::vector<SdpConstraint> constraints;

    void validate() const;
};

enum class SdpStatus { Optimal, PrimalInfeasible, DualInfeasible, MaxIterations, NumericalFailure };

const char* sdp_status_name(SdpStatus s);

struct SdpOptions {
    double tol = 1e-8;
    int max_iter = 200;
    double step_fraction = 0.98;
};

struct SdpSolution {
    SdpStatus status = SdpStatus::NumericalFailure;
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double primal_residual = 0.0;  // ||A(X) - b|| / (1 + ||b||)
    double dual_residual = 0.0;    // ||C - A^*(y) - Z|| / (1 + ||C||)
    double gap = 0.0;              // |pobj - dobj| / (1 + |pobj| + |dobj|)
    int iterations = 0;
    std::vector<CMatrix> x;
    std::vector<CMatrix> z;
    RVector y;
    // PrimalInfeasible: y with A^*(y) <= 0 and b.y = 1. DualInfeasible: X >= 0 with A(X) = 0 and <C,X> = -1.
    RVector certificate_y;
    std::vector<CMatrix> certificate_x;
    std::string message;
};

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options = {});

struct KktReport {
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;
    double min_eig_x = 0.0;
    double min_eig_z = 0.0;
    bool ok = false;
};

KktReport check_kkt(const SdpProblem& problem, const SdpSolution& sol, double tol = 1e-7);

// Real symmetric embedding [[Re, -Im], [Im, Re]] of a Hermitian matrix.
RMatrix realify(const CMatrix& h);
// Same optimal value on real symmetric data: every matrix embedded and halved, b kept.
SdpProblem realify(const SdpProblem& p);

}  // namespace covasym
