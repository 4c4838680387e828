#pragma once

#include "covasym/channel.hpp"

namespace covasym {

// Qubit conventions: |0>, |1> carry U1 weights +1, -1 (H = sigma_z); SU2 acts as spin 1/2.
Representation qubit_u1();
Representation qubit_su2();

CMatrix qubit_state(const Eigen::Vector3d& bloch);
Eigen::Vector3d qubit_bloch(const CMatrix& rho);

// Phi_eta(tau) for the U1 qubit with reference Bloch vector x (reference weights -1, +1).
double phi_u1_qubit(const CMatrix& tau, const Eigen::Vector3d& x);

// Phi_eta(tau) for the SU2 qubit with state Bloch vector r and reference Bloch vector x.
double phi_su2_qubit(const Eigen::Vector3d& r, const Eigen::Vector3d& x);

// Exact covariant-interconversion test for U1 qubits.
bool u1_qubit_feasible(const CMatrix& rho, const CMatrix& sigma, double tol = 1e-12);

// rho -> (1 + lambda r.sigma)/2, lambda in [-1/3, 1].
CovariantChannel su2_qubit_channel(double lambda);

}  // namespace covasym
