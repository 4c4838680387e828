#pragma once

#include "covasym/symmetry.hpp"

#include <string>
#include <utility>
#include <vector>

namespace covasym {

struct IrrepInfo {
    int key = 0;             // U1: weight difference, SU2: twice the rank k, Finite: index within the basis
    int dim = 1;
    int multiplicity = 0;
    bool trivial = false;
    int conjugate = -1;      // index of the conjugate irrep in the same basis, -1 if absent
    std::vector<Complex> character;  // Finite only, over rep.elements() order
};

// Orthonormal basis {X^{(lambda,alpha)}_j} of B(H) with
//   U_g X^{(lambda,alpha)}_j U_g^dag = sum_i v^lambda_{ij}(g) X^{(lambda,alpha)}_i,
// v^lambda shared by every multiplicity copy alpha. The trivial irrep comes first with I/sqrt(d) as alpha = 0.
// SU2 component j carries Jz-weight q = k - j.
class ItoBasis {
public:
    static ItoBasis build(const Representation& rep);

    int dim() const { return dim_; }
    GroupKind kind() const { return kind_; }
    const std::vector<IrrepInfo>& irreps() const { return irreps_; }
    const CMatrix& element(int irrep, int alpha, int component) const;
    int trivial_index() const { return 0; }

    // Sum of dimensions of the distinct non-trivial irreps.
    int nontrivial_dimension_sum() const;
    // Index of the irrep in this basis equivalent to `other.irreps()[idx]`, -1 if absent.
    int match_irrep(const ItoBasis& other, int idx) const;

    std::string label(int irrep, int component) const;

private:
    int dim_ = 0;
    GroupKind kind_ = GroupKind::U1;
    std::vector<IrrepInfo> irreps_;
    std::vector<std::vector<std::vector<CMatrix>>> elems_;  // [irrep][alpha][component]
};

struct Mode {
    int irrep = 0;
    int component = 0;
    std::vector<Complex> coefficients;  // <X^{(lambda,alpha)}_j, rho> per alpha
    CMatrix op;                          // rho^lambda_j
};

struct ModeDecomposition {
    int dim = 0;
    std::vector<Mode> modes;  // every (irrep, component) of the basis, basis order
    const Mode* find(int irrep, int component) const;
    CMatrix reconstruct() const;
};

ModeDecomposition decompose_modes(const CMatrix& rho, const ItoBasis& basis);
std::vector<std::pair<int, int>> mode_support(const ModeDecomposition& md, const ItoBasis& basis, double tol = 1e-10);
double g_coefficient(const ModeDecomposition& md, int irrep, int component);

// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M> (Condon-Shortley phases).
double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M);

}  // namespace covasym
