#pragma once

#include "covasym/symmetry.hpp"

#include <string>

namespace covasym {

// Linear map B(H_in) -> B(H_out) as a d_out^2 x d_in^2 matrix on column-major vec.
struct CovariantChannel {
    int d_in = 0;
    int d_out = 0;
    CMatrix superop;
    std::string provenance;

    CMatrix apply(const CMatrix& rho) const;
    // J = sum_ij |i><j| (x) E(|i><j|) on H_in (x) H_out; E(rho) = tr_in[J (rho^T (x) I)]
    CMatrix choi() const;
    static CovariantChannel from_choi(const CMatrix& j, int d_in, int d_out, std::string provenance = {});

    bool is_cptp(double tol = 1e-8) const;
    bool is_covariant(const Representation& in, const Representation& out, double tol = 1e-8) const;
};

}  // namespace covasym
