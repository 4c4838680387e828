#pragma once

#include "covasym/hermitian.hpp"

#include <array>
#include <memory>
#include <vector>

namespace covasym {

class SpecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class GroupKind { U1, SU2, Finite };

const char* group_kind_name(GroupKind k);

struct SpinBlock {
    double j = 0.5;
    int multiplicity = 1;
};

struct SymmetrySpec {
    GroupKind kind = GroupKind::U1;
    std::vector<int> weights;       // U1: U(t) = exp(i t H), H = diag(weights)
    std::vector<SpinBlock> spins;   // SU2: direct sum of spin blocks, |j m> ordered m = j..-j
    std::vector<CMatrix> elements;  // Finite: all group elements as unitaries

    static SymmetrySpec u1(std::vector<int> w);
    static SymmetrySpec su2(std::vector<SpinBlock> s);
    static SymmetrySpec finite(std::vector<CMatrix> e);
};

// Immutable unitary representation on a finite carrier space.
// U1 keeps a diagonal weight list, SU2 keeps Hermitian generators (Jx, Jy, Jz),
// Finite keeps the full element list in a fixed order shared by derived reps.
class Representation {
public:
    static Representation from_spec(const SymmetrySpec& spec);
    static Representation u1(std::vector<int> weights);
    static Representation su2(const std::vector<SpinBlock>& spins);
    static Representation finite(std::vector<CMatrix> elements);

    GroupKind kind() const { return kind_; }
    int dim() const { return dim_; }
    const std::vector<int>& weights() const { return weights_; }
    const std::array<CMatrix, 3>& generators() const { return gens_; }
    const std::vector<CMatrix>& elements() const { return elements_; }

    Representation dual() const;
    Representation tensor(const Representation& other) const;
    // Columns of v must be orthonormal and span an invariant subspace.
    Representation restrict_to(const CMatrix& v) const;

    // Finite sampling grid used for covariance checks:
    // U1 16 equally spaced angles, SU2 a fixed 24-element set, Finite all elements.
    std::vector<CMatrix> sample_unitaries() const;

    // Orthogonal projector onto vectors fixed by every group element.
    CMatrix invariant_projector() const;

    bool compatible_with(const Representation& other) const;

private:
    Representation() = default;
    GroupKind kind_ = GroupKind::U1;
    int dim_ = 0;
    std::vector<int> weights_;
    std::array<CMatrix, 3> gens_;
    std::vector<CMatrix> elements_;
};

// SU(2) element exp(-i a Jz) exp(-i b Jy) exp(-i c Jz) for the given generators.
CMatrix su2_element(const std::array<CMatrix, 3>& gens, double a, double b, double c);

// Group average G(X) on B(H) for a representation, with structure needed by the solvers.
class TwirlChannel {
public:
    explicit TwirlChannel(const Representation& rep);

    int dim() const { return dim_; }
    const Representation& rep() const { return rep_; }
    CMatrix apply(const CMatrix& m) const;
    // d^2 x d^2 matrix acting on column-major vec(X)
    const CMatrix& superoperator() const { return super_; }
    bool is_invariant(const CMatrix& m, double tol = 1e-9) const;

    // Orthonormal Hermitian basis of the commutant, identity direction first.
    const std::vector<CMatrix>& commutant_basis() const { return commutant_; }
    // Index partition from the sparsity pattern of the commutant (connected components).
    const std::vector<std::vector<int>>& blocks() const { return blocks_; }

private:
    Representation rep_;
    int dim_ = 0;
    CMatrix super_;
    std::vector<CMatrix> commutant_;
    std::vector<std::vector<int>> blocks_;
};

CMatrix twirl(const Representation& rep, const CMatrix& m);
bool is_symmetric(const Representation& rep, const CMatrix& m, double tol = 1e-9);

// Orthonormal Hermitian basis of B(C^d): E_ii, (E_ij+E_ji)/sqrt2, i(E_ji-E_ij)/sqrt2.
std::vector<CMatrix> hermitian_operator_basis(int d);

}  // namespace covasym
