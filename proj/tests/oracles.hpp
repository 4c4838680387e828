#pragma once

// Test-side reference implementations. Nothing here calls into the library beyond its types,
// so a bug shared between a module and its oracle would have to be written twice.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

using C = std::complex<double>;
using M = Eigen::MatrixXcd;

inline M kron(const M& a, const M& b) {
    M out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            for (int k = 0; k < b.rows(); ++k)
                for (int l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return out;
}

// Trace over the first factor of a (d1 d2) x (d1 d2) operator, by explicit index sums.
inline M trace_first(const M& m, int d1, int d2) {
    M out = M::Zero(d2, d2);
    for (int a = 0; a < d2; ++a)
        for (int b = 0; b < d2; ++b)
            for (int i = 0; i < d1; ++i) out(a, b) += m(i * d2 + a, i * d2 + b);
    return out;
}

inline M trace_second(const M& m, int d1, int d2) {
    M out = M::Zero(d1, d1);
    for (int a = 0; a < d1; ++a)
        for (int b = 0; b < d1; ++b)
            for (int k = 0; k < d2; ++k) out(a, b) += m(a * d2 + k, b * d2 + k);
    return out;
}

// U(1) twirl by quadrature; exact when n exceeds the largest weight difference.
inline M u1_twirl(const std::vector<int>& w, const M& x, int n = 64) {
    M acc = M::Zero(x.rows(), x.cols());
    for (int k = 0; k < n; ++k) {
        const double t = 2.0 * M_PI * k / n;
        Eigen::VectorXcd ph(w.size());
        for (size_t i = 0; i < w.size(); ++i) ph(i) = std::polar(1.0, t * w[i]);
        acc += ph.asDiagonal() * x * ph.conjugate().asDiagonal();
    }
    return acc / static_cast<double>(n);
}

// Average over an explicit list of unitaries.
inline M group_average(const std::vector<M>& g, const M& x) {
    M acc = M::Zero(x.rows(), x.cols());
    for (const auto& u : g) acc += u * x * u.adjoint();
    return acc / static_cast<double>(g.size());
}

// Projection onto the commutant of a set of operators via the null space of X -> [A, X].
inline M commutant_projection(const std::vector<M>& gens, const M& x) {
    const int d = static_cast<int>(x.rows());
    M big(static_cast<Eigen::Index>(gens.size()) * d * d, d * d);
    for (size_t k = 0; k < gens.size(); ++k) {
        const M& a = gens[k];
        M op = kron(M::Identity(d, d), a) - kron(a.transpose(), M::Identity(d, d));
        big.block(k * d * d, 0, d * d, d * d) = op;
    }
    Eigen::JacobiSVD<M> svd(big, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > 1e-9) ++rank;
    const M v = svd.matrixV().rightCols(d * d - rank);
    Eigen::VectorXcd vx = Eigen::Map<const Eigen::VectorXcd>(x.data(), d * d);
    Eigen::VectorXcd pv = v * (v.adjoint() * vx);
    return Eigen::Map<const M>(pv.data(), d, d);
}

// Spin-j generators in the |j m> basis with m = j..-j.
inline std::vector<M> spin_generators(double j) {
    const int d = static_cast<int>(std::lround(2 * j + 1));
    M jp = M::Zero(d, d), jz = M::Zero(d, d);
    for (int a = 0; a < d; ++a) {
        const double m = j - a;
        jz(a, a) = m;
        if (a > 0) jp(a - 1, a) = std::sqrt(j * (j + 1) - m * (m + 1));
    }
    const M jx = (jp + jp.adjoint()) / 2.0;
    const M jy = (jp - jp.adjoint()) / C(0, 2);
    return {jx, jy, jz};
}

inline double trace_norm(const M& m) {
    Eigen::JacobiSVD<M> svd(m);
    return svd.singularValues().sum();
}

inline double min_eig(const M& m) {
    Eigen::SelfAdjointEigenSolver<M> es((m + m.adjoint()) / 2.0);
    return es.eigenvalues()(0);
}

inline M random_state(int d, std::mt19937_64& rng, int rank = -1) {
    std::normal_distribution<double> nd;
    const int r = rank > 0 ? rank : d;
    M g(d, r);
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < r; ++k) g(i, k) = C(nd(rng), nd(rng));
    M rho = g * g.adjoint();
    return rho / rho.trace().real();
}

inline M qubit(double x, double y, double z) {
    M m(2, 2);
    m << C(0.5 * (1 + z), 0), C(0.5 * x, -0.5 * y), C(0.5 * x, 0.5 * y), C(0.5 * (1 - z), 0);
    return m;
}

inline Eigen::Vector3d random_bloch(std::mt19937_64& rng, double rmax = 1.0) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::Vector3d v;
    do {
        v << u(rng), u(rng), u(rng);
    } while (v.norm() > 1.0);
    return v * rmax;
}

// Phi for the U(1) qubit (H = sigma_z), tau = [[p, c], [c*, 1-p]], reference Bloch (x, y, z).
// Evaluated on the upper half-ball and mapped to z < 0 through the sigma_x flip symmetry.
inline double phi_u1_qubit(double p, double c, double x, double y, double z) {
    const double r = std::hypot(x, y);
    if (z < 0) return phi_u1_qubit(1.0 - p, c, x, -y, -z);
    const double lin = (p - 0.5) * z + c * r + 0.5;
    if (c < 1e-300) return std::max(lin, 0.5 * z + 0.5);
    if (z > 0 && r / (2 * z) <= (1 - p) / c) return c * c / (1 - p) * r * r / (4 * z) + z / 2 + 0.5;
    return lin;
}

// Phi for the SU(2) qubit: tau Bloch r, reference Bloch x, through the depolarizing family
// lambda in [-1/3, 1]: Phi = max_lambda (1 + lambda r.xbar)/2 with xbar = (x, -y, z).
inline double phi_su2_qubit(const Eigen::Vector3d& r, const Eigen::Vector3d& x) {
    const double s = r.x() * x.x() - r.y() * x.y() + r.z() * x.z();
    return std::max(0.5 * (1 + s), 0.5 * (1 - s / 3.0));
}

// Time-covariant qubit interconversion: c_s <= c_r sqrt((1-p_s)/(1-p_r)) and c_s <= c_r sqrt(p_s/p_r).
// Returns the smaller slack; feasible iff slack >= 0.
inline double u1_qubit_slack(const M& rho, const M& sigma) {
    const double pr = rho(0, 0).real(), ps = sigma(0, 0).real();
    const double cr = std::abs(rho(0, 1)), cs = std::abs(sigma(0, 1));
    double s1 = pr < 1.0 ? cr * std::sqrt((1 - ps) / (1 - pr)) - cs : (cs == 0.0 ? 0.0 : -cs);
    double s2 = pr > 0.0 ? cr * std::sqrt(ps / pr) - cs : (cs == 0.0 ? 0.0 : -cs);
    return std::min(s1, s2);
}

inline double clebsch_gordan_table(int which) {
    // <1/2 1/2; 1/2 -1/2 | 1 0>, <1 1; 1 -1 | 0 0>, <1 0; 1 0 | 2 0>, <1/2 1/2; 1 0 | 3/2 1/2>
    switch (which) {
        case 0: return 1.0 / std::sqrt(2.0);
        case 1: return 1.0 / std::sqrt(3.0);
        case 2: return std::sqrt(2.0 / 3.0);
        case 3: return std::sqrt(2.0 / 3.0);
    }
    return 0.0;
}

}  // namespace oracle
