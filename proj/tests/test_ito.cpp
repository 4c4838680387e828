#include "covasym/ito.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

using namespace covasym;
using testutil::irrep_with_key;
using testutil::ket_bra;
using testutil::pauli;
using testutil::plus_state;

namespace {

double inner(const CMatrix& a, const CMatrix& b) { return std::abs((a.adjoint() * b).trace()); }

// Orthonormality over the whole basis, and a shared transformation matrix per irrep on the sampling grid.
void check_basis(const Representation& rep) {
    const ItoBasis b = ItoBasis::build(rep);
    std::vector<CMatrix> all;
    for (size_t l = 0; l < b.irreps().size(); ++l)
        for (int a = 0; a < b.irreps()[l].multiplicity; ++a)
            for (int j = 0; j < b.irreps()[l].dim; ++j) all.push_back(b.element(static_cast<int>(l), a, j));
    REQUIRE(static_cast<int>(all.size()) == rep.dim() * rep.dim());
    for (size_t i = 0; i < all.size(); ++i)
        for (size_t k = 0; k < all.size(); ++k) CHECK(inner(all[i], all[k]) == doctest::Approx(i == k ? 1.0 : 0.0).epsilon(1e-10));

    for (const CMatrix& u : rep.sample_unitaries()) {
        for (size_t l = 0; l < b.irreps().size(); ++l) {
            const IrrepInfo& info = b.irreps()[l];
            CMatrix v(info.dim, info.dim);
            for (int i = 0; i < info.dim; ++i)
                for (int j = 0; j < info.dim; ++j)
                    v(i, j) = (b.element(static_cast<int>(l), 0, i).adjoint() * u * b.element(static_cast<int>(l), 0, j) * u.adjoint()).trace();
            for (int a = 0; a < info.multiplicity; ++a)
                for (int j = 0; j < info.dim; ++j) {
                    CMatrix lhs = u * b.element(static_cast<int>(l), a, j) * u.adjoint();
                    for (int i = 0; i < info.dim; ++i) lhs -= v(i, j) * b.element(static_cast<int>(l), a, i);
                    CHECK(max_abs_entry(lhs) < 1e-9);
                }
        }
    }
    CHECK(b.irreps()[0].trivial);
    CHECK(max_abs_entry(b.element(0, 0, 0) - CMatrix::Identity(rep.dim(), rep.dim()) / std::sqrt(double(rep.dim()))) < 1e-12);
}

}  // namespace

TEST_SUITE("ito") {

TEST_CASE("U1 qubit basis") {
    const ItoBasis b = ItoBasis::build(Representation::u1({1, -1}));
    REQUIRE(b.irreps().size() == 3);
    CHECK(b.irreps()[0].multiplicity == 2);
    const int up = irrep_with_key(b, 2), down = irrep_with_key(b, -2);
    REQUIRE(up > 0);
    REQUIRE(down > 0);
    CHECK(inner(b.element(up, 0, 0), ket_bra(2, 0, 1)) == doctest::Approx(1.0));
    CHECK(inner(b.element(down, 0, 0), ket_bra(2, 1, 0)) == doctest::Approx(1.0));
    CHECK(inner(b.element(0, 1, 0), pauli('z') / std::sqrt(2.0)) == doctest::Approx(1.0));
    CHECK(b.nontrivial_dimension_sum() == 2);
    CHECK(b.irreps()[up].conjugate == down);
}

TEST_CASE("SU2 spin-1/2 basis") {
    const Representation s = Representation::su2({{0.5, 1}});
    const ItoBasis b = ItoBasis::build(s);
    REQUIRE(b.irreps().size() == 2);
    CHECK(b.irreps()[1].dim == 3);
    CHECK(b.irreps()[1].key == 2);
    CHECK(b.nontrivial_dimension_sum() == 3);
    // Components carry Jz weight q = 1 - j: raising, zero and lowering directions.
    CHECK(inner(b.element(1, 0, 0), ket_bra(2, 0, 1)) == doctest::Approx(1.0));
    CHECK(inner(b.element(1, 0, 1), pauli('z') / std::sqrt(2.0)) == doctest::Approx(1.0));
    CHECK(inner(b.element(1, 0, 2), ket_bra(2, 1, 0)) == doctest::Approx(1.0));
}

TEST_CASE("finite flip group basis") {
    const ItoBasis b = ItoBasis::build(Representation::finite({CMatrix::Identity(2, 2), pauli('x')}));
    REQUIRE(b.irreps().size() == 2);
    CHECK(b.irreps()[0].multiplicity == 2);
    CHECK(b.irreps()[1].multiplicity == 2);
    CHECK(b.irreps()[1].character[1].real() == doctest::Approx(-1.0));
}

TEST_CASE("transformation law on several carriers") {
    check_basis(Representation::u1({1, -1}));
    check_basis(Representation::u1({2, 0, -1, 0}));
    check_basis(Representation::su2({{0.5, 1}}));
    check_basis(Representation::su2({{1.0, 1}}));
    check_basis(Representation::su2({{0.5, 2}, {1.0, 1}}));
    check_basis(Representation::su2({{1.5, 1}}).dual());
    CMatrix s = CMatrix::Zero(3, 3);
    s(1, 0) = s(2, 1) = s(0, 2) = 1.0;
    check_basis(Representation::finite({CMatrix::Identity(3, 3), s, s * s}));
    // S3 on a qutrit by permutations: has a 2-dimensional irrep.
    std::vector<CMatrix> perms;
    std::vector<int> p{0, 1, 2};
    do {
        CMatrix m = CMatrix::Zero(3, 3);
        for (int i = 0; i < 3; ++i) m(p[i], i) = 1.0;
        perms.push_back(m);
    } while (std::next_permutation(p.begin(), p.end()));
    check_basis(Representation::finite(perms));
}

TEST_CASE("mode decomposition") {
    const ItoBasis b = ItoBasis::build(Representation::u1({1, -1}));
    const ModeDecomposition md = decompose_modes(plus_state(), b);
    CHECK(max_abs_entry(md.find(0, 0)->op - CMatrix::Identity(2, 2) / 2.0) < 1e-14);
    CHECK(std::abs(md.find(irrep_with_key(b, 2), 0)->coefficients[0]) == doctest::Approx(0.5));
    CHECK(std::abs(md.find(irrep_with_key(b, -2), 0)->coefficients[0]) == doctest::Approx(0.5));
    CHECK(g_coefficient(md, irrep_with_key(b, 2), 0) == doctest::Approx(0.5));

    auto labels = mode_support(md, b);
    CHECK(labels.size() == 3);
    CHECK(mode_support(decompose_modes(ket_bra(2, 0, 0), b), b).size() == 1);

    std::mt19937_64 rng(13);
    for (const Representation& rep : {Representation::su2({{0.5, 1}, {1.0, 1}}), Representation::u1({1, 0, -1})}) {
        const ItoBasis basis = ItoBasis::build(rep);
        const int d = rep.dim();
        const ModeDecomposition mixed = decompose_modes(CMatrix::Identity(d, d) / double(d), basis);
        CHECK(mode_support(mixed, basis).size() == 1);
        const CMatrix rho = oracle::random_state(d, rng);
        const ModeDecomposition m = decompose_modes(rho, basis);
        CHECK(max_abs_entry(m.reconstruct() - rho) < 1e-12);
        CHECK(max_abs_entry(m.find(0, 0)->op - twirl(rep, rho)) < 1e-12);
        const CMatrix sym = twirl(rep, rho);
        for (size_t l = 1; l < basis.irreps().size(); ++l) CHECK(g_coefficient(decompose_modes(sym, basis), static_cast<int>(l), 0) < 1e-12);
    }
}

TEST_CASE("Clebsch-Gordan coefficients") {
    CHECK(clebsch_gordan(0.5, 0.5, 0.5, -0.5, 1, 0) == doctest::Approx(oracle::clebsch_gordan_table(0)));
    CHECK(clebsch_gordan(1, 1, 1, -1, 0, 0) == doctest::Approx(oracle::clebsch_gordan_table(1)));
    CHECK(clebsch_gordan(1, 0, 1, 0, 2, 0) == doctest::Approx(oracle::clebsch_gordan_table(2)));
    CHECK(clebsch_gordan(0.5, 0.5, 1, 0, 1.5, 0.5) == doctest::Approx(oracle::clebsch_gordan_table(3)));
    CHECK(clebsch_gordan(0.5, 0.5, 0.5, 0.5, 1, 0) == 0.0);
    // Orthogonality in (J, M) at fixed j1, j2.
    double s = 0;
    for (double m1 : {-1.0, 0.0, 1.0})
        for (double m2 : {-0.5, 0.5}) s += clebsch_gordan(1, m1, 0.5, m2, 1.5, 0.5) * clebsch_gordan(1, m1, 0.5, m2, 0.5, 0.5);
    CHECK(std::abs(s) < 1e-14);
}

}
