#include "covasym/qubit.hpp"

#include <cmath>

namespace covasym {

Representation qubit_u1() {
    return Representation::u1({1, -1});
}

Representation qubit_su2() {
    return Representation::su2({{0.5, 1}});
}

CMatrix qubit_state(const Eigen::Vector3d& r) {
    if (r.norm() > 1.0 + 1e-12) throw InvalidState("Bloch vector lies outside the unit ball");
    CMatrix m(2, 2);
    m(0, 0) = 0.5 * (1.0 + r.z());
    m(1, 1) = 0.5 * (1.0 - r.z());
    m(0, 1) = Complex(0.5 * r.x(), -0.5 * r.y());
    m(1, 0) = Complex(0.5 * r.x(), 0.5 * r.y());
    return m;
}

Eigen::Vector3d qubit_bloch(const CMatrix& rho) {
    if (rho.rows() != 2 || rho.cols() != 2) throw DimensionMismatch("qubit_bloch: not a qubit operator");
    return {2.0 * rho(1, 0).real(), 2.0 * rho(1, 0).imag(), (rho(0, 0) - rho(1, 1)).real()};
}

double phi_u1_qubit(const CMatrix& tau, const Eigen::Vector3d& x) {
    DensityMatrix::from_matrix(tau);
    if (x.norm() > 1.0 + 1e-12) throw InvalidState("reference Bloch vector lies outside the unit ball");
    const double p = tau(0, 0).real();
    const double c = std::abs(tau(0, 1));
    const double r = std::hypot(x.x(), x.y());
    const double z = x.z();
    if (z > 0) {
        if (c == 0.0) return 0.5 * z + 0.5;
        if (r / (2.0 * z) <= (1.0 - p) / c) return c * c / (1.0 - p) * r * r / (4.0 * z) + 0.5 * z + 0.5;
    } else if (z < 0) {
        if (c == 0.0) return -0.5 * z + 0.5;
        if (std::abs(r / (2.0 * z)) <= p / c) return -c * c / p * r * r / (4.0 * z) - 0.5 * z + 0.5;
    }
    return (p - 0.5) * z + c * r + 0.5;
}

double phi_su2_qubit(const Eigen::Vector3d& r, const Eigen::Vector3d& x) {
    if (r.norm() > 1.0 + 1e-12 || x.norm() > 1.0 + 1e-12) throw InvalidState("Bloch vector lies outside the unit ball");
    const double s = x.x() * r.x() - x.y() * r.y() + x.z() * r.z();
    return s >= 0 ? 0.5 * (1.0 + s) : 0.5 * (1.0 - s / 3.0);
}

bool u1_qubit_feasible(const CMatrix& rho, const CMatrix& sigma, double tol) {
    DensityMatrix::from_matrix(rho);
    DensityMatrix::from_matrix(sigma);
    const double pr = rho(0, 0).real(), ps = sigma(0, 0).real();
    const double cr2 = std::norm(rho(0, 1)), cs2 = std::norm(sigma(0, 1));
    if (cr2 <= tol * tol) return cs2 <= tol * tol;
    return cs2 * (1.0 - pr) <= cr2 * (1.0 - ps) + tol && cs2 * pr <= cr2 * ps + tol;
}

CovariantChannel su2_qubit_channel(double lambda) {
    if (lambda < -1.0 / 3.0 - 1e-12 || lambda > 1.0 + 1e-12) throw std::domain_error("SU2 qubit channel needs lambda in [-1/3, 1]");
    CovariantChannel ch;
    ch.d_in = 2;
    ch.d_out = 2;
    CVector vi = CVector::Zero(4);
    vi(0) = 1.0;
    vi(3) = 1.0;
    ch.superop = lambda * CMatrix::Identity(4, 4) + (1.0 - lambda) * 0.5 * vi * vi.adjoint();
    ch.provenance = "su2_qubit_channel";
    return ch;
}

}  // namespace covasym
