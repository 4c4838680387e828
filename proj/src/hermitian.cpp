#include "covasym/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace covasym {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

CMatrix partial_trace(const CMatrix& m, int d_r, int d_a, Keep keep) {
    if (d_r <= 0 || d_a <= 0 || m.rows() != d_r * d_a || m.cols() != d_r * d_a) {
        std::ostringstream os;
        os << "partial_trace: operator is " << m.rows() << "x" << m.cols() << ", dims " << d_r << "x" << d_a;
        throw DimensionMismatch(os.str());
    }
    if (keep == Keep::A) {
        CMatrix out = CMatrix::Zero(d_a, d_a);
        for (int r = 0; r < d_r; ++r) out += m.block(r * d_a, r * d_a, d_a, d_a);
        return out;
    }
    CMatrix out(d_r, d_r);
    for (int r = 0; r < d_r; ++r) {
        for (int s = 0; s < d_r; ++s) out(r, s) = m.block(r * d_a, s * d_a, d_a, d_a).trace();
    }
    return out;
}

double max_abs_entry(const CMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const CMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return max_abs_entry(m - m.adjoint()) <= tol;
}

CMatrix hermitian_part(const CMatrix& m) {
    return 0.5 * (m + m.adjoint());
}

HermitianEigen eig_hermitian(const CMatrix& m, double tol) {
    if (m.rows() != m.cols()) throw DimensionMismatch("eig_hermitian: matrix is not square");
    if (!is_hermitian(m, tol * std::max(1.0, max_abs_entry(m)))) {
        throw NotHermitian("eig_hermitian: matrix is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m));
    if (es.info() != Eigen::Success) throw std::runtime_error("eig_hermitian: eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

double min_eigenvalue(const CMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(h), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double max_eigenvalue(const CMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(h), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(es.eigenvalues().size() - 1);
}

CMatrix power_on_support(const CMatrix& m, double exponent, double rank_tol) {
    HermitianEigen e = eig_hermitian(m);
    const double scale = std::max(1.0, e.values.cwiseAbs().maxCoeff());
    RVector p = RVector::Zero(e.values.size());
    for (Eigen::Index i = 0; i < e.values.size(); ++i) {
        double v = e.values(i);
        if (v > rank_tol * scale) {
            p(i) = std::pow(v, exponent);
        } else if (v < -rank_tol * scale) {
            throw std::domain_error("power_on_support: operator has a negative eigenvalue");
        }
    }
    return e.vectors * p.asDiagonal() * e.vectors.adjoint();
}

CMatrix support_projector(const CMatrix& m, double rank_tol) {
    HermitianEigen e = eig_hermitian(m);
    const double scale = std::max(1.0, e.values.cwiseAbs().maxCoeff());
    CMatrix out = CMatrix::Zero(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < e.values.size(); ++i) {
        if (std::abs(e.values(i)) > rank_tol * scale) out += e.vectors.col(i) * e.vectors.col(i).adjoint();
    }
    return out;
}

double trace_norm(const CMatrix& m) {
    if (is_hermitian(m, 1e-13 * std::max(1.0, max_abs_entry(m)))) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().sum();
    }
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues().sum();
}

double operator_norm(const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    if (is_hermitian(m, 1e-13 * std::max(1.0, max_abs_entry(m)))) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

double frobenius_norm(const CMatrix& m) {
    return m.norm();
}

double generalized_trace_distance(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("generalized_trace_distance: shape mismatch");
    const double ta = a.trace().real();
    const double tb = b.trace().real();
    return 0.5 * trace_norm(a - b) + 0.5 * std::abs(ta - tb);
}

CMatrix expi_hermitian(const CMatrix& h, double t) {
    HermitianEigen e = eig_hermitian(h);
    CVector ph(e.values.size());
    for (Eigen::Index i = 0; i < e.values.size(); ++i) ph(i) = std::polar(1.0, t * e.values(i));
    return e.vectors * ph.asDiagonal() * e.vectors.adjoint();
}

DensityMatrix DensityMatrix::from_matrix(const CMatrix& m) {
    if (m.rows() == 0 || m.rows() != m.cols()) throw InvalidState("density matrix must be square and non-empty");
    if (!m.allFinite()) throw InvalidState("density matrix has non-finite entries");
    if (!is_hermitian(m, kHermTol)) {
        std::ostringstream os;
        os << "density matrix is not Hermitian (max |M - M^dag| = " << max_abs_entry(m - m.adjoint()) << ")";
        throw InvalidState(os.str());
    }
    const double tr = m.trace().real();
    if (std::abs(tr - 1.0) > kTraceTol) {
        std::ostringstream os;
        os << "density matrix trace is " << tr;
        throw InvalidState(os.str());
    }
    const double lmin = min_eigenvalue(m);
    if (lmin < kPsdTol) {
        std::ostringstream os;
        os << "density matrix has negative eigenvalue " << lmin;
        throw InvalidState(os.str());
    }
    return DensityMatrix(hermitian_part(m));
}

DensityMatrix DensityMatrix::maximally_mixed(int d) {
    if (d <= 0) throw InvalidState("dimension must be positive");
    return DensityMatrix(CMatrix::Identity(d, d) / static_cast<double>(d));
}

std::vector<CMatrix> bloch_basis(int d) {
    if (d < 2) throw DimensionMismatch("bloch_basis: dimension must be at least 2");
    std::vector<CMatrix> out;
    const Complex I(0.0, 1.0);
    const double s = 1.0 / d;
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            CMatrix x = CMatrix::Zero(d, d);
            x(j, k) = s;
            x(k, j) = s;
            out.push_back(x);
        }
    }
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            CMatrix x = CMatrix::Zero(d, d);
            x(j, k) = -I * s;
            x(k, j) = I * s;
            out.push_back(x);
        }
    }
    // diagonal GGM: diag(1,...,1,-l,0,...) has infinity norm l
    for (int l = 1; l < d; ++l) {
        CMatrix x = CMatrix::Zero(d, d);
        for (int j = 0; j < l; ++j) x(j, j) = s / l;
        x(l, l) = -s;
        out.push_back(x);
    }
    return out;
}

CMatrix state_from_bloch(const RVector& x, int d) {
    std::vector<CMatrix> basis = bloch_basis(d);
    if (x.size() != static_cast<Eigen::Index>(basis.size())) throw DimensionMismatch("state_from_bloch: expected d^2-1 coordinates");
    CMatrix m = CMatrix::Identity(d, d) / static_cast<double>(d);
    for (size_t k = 0; k < basis.size(); ++k) m += x(static_cast<Eigen::Index>(k)) * basis[k];
    if (min_eigenvalue(m) < DensityMatrix::kPsdTol) throw InvalidState("Bloch coordinates lie outside the state body");
    return m;
}

RVector bloch_from_state(const CMatrix& rho) {
    const int d = static_cast<int>(rho.rows());
    std::vector<CMatrix> basis = bloch_basis(d);
    RVector x(basis.size());
    for (size_t k = 0; k < basis.size(); ++k) {
        const double nrm = basis[k].squaredNorm();
        x(static_cast<Eigen::Index>(k)) = (basis[k].adjoint() * rho).trace().real() / nrm;
    }
    return x;
}

}  // namespace covasym
