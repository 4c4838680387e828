#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace covasym {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

class InvalidState : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NotHermitian : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct HermitianEigen {
    RVector values;   // ascending
    CMatrix vectors;  // columns
};

enum class Keep { R, A };

CMatrix kron(const CMatrix& a, const CMatrix& b);

// m acts on H_R (x) H_A with dims (d_r, d_a); returns the reduced operator on the kept factor.
CMatrix partial_trace(const CMatrix& m, int d_r, int d_a, Keep keep);

double max_abs_entry(const CMatrix& m);
bool is_hermitian(const CMatrix& m, double tol = 1e-10);
CMatrix hermitian_part(const CMatrix& m);

HermitianEigen eig_hermitian(const CMatrix& m, double tol = 1e-10);
double min_eigenvalue(const CMatrix& hermitian);
double max_eigenvalue(const CMatrix& hermitian);

// Fractional power on the support; eigenvalues below rank_tol * max(1, |lambda_max|) are treated as zero.
CMatrix power_on_support(const CMatrix& m, double exponent, double rank_tol = 1e-9);
CMatrix support_projector(const CMatrix& m, double rank_tol = 1e-9);

double trace_norm(const CMatrix& m);
double operator_norm(const CMatrix& m);
double frobenius_norm(const CMatrix& m);
double generalized_trace_distance(const CMatrix& a, const CMatrix& b);

// exp(i t H) for Hermitian H
CMatrix expi_hermitian(const CMatrix& h, double t);

class DensityMatrix {
public:
    static constexpr double kHermTol = 1e-12;
    static constexpr double kTraceTol = 1e-10;
    static constexpr double kPsdTol = -1e-10;

    DensityMatrix() = default;
    static DensityMatrix from_matrix(const CMatrix& m);
    static DensityMatrix maximally_mixed(int d);

    int dim() const { return static_cast<int>(m_.rows()); }
    const CMatrix& matrix() const { return m_; }

private:
    explicit DensityMatrix(CMatrix m) : m_(std::move(m)) {}
    CMatrix m_;
};

// Generalized Gell-Mann basis rescaled to ||X_k||_inf = 1/d.
// Order: symmetric off-diagonal (j<k lexicographic), antisymmetric off-diagonal, diagonal.
std::vector<CMatrix> bloch_basis(int d);
CMatrix state_from_bloch(const RVector& x, int d);
RVector bloch_from_state(const CMatrix& rho);

}  // namespace covasym
