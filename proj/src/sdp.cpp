#include "covasym/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace covasym {

const char* sdp_status_name(SdpStatus s) {
    switch (s) {
        case SdpStatus::Optimal: return "optimal";
        case SdpStatus::PrimalInfeasible: return "primal_infeasible";
        case SdpStatus::DualInfeasible: return "dual_infeasible";
        case SdpStatus::MaxIterations: return "max_iterations";
        case SdpStatus::NumericalFailure: return "numerical_failure";
    }
    return "?";
}

RMatrix realify(const CMatrix& h) {
    const Eigen::Index n = h.rows();
    RMatrix r(2 * n, 2 * n);
    r.topLeftCorner(n, n) = h.real();
    r.bottomRightCorner(n, n) = h.real();
    r.topRightCorner(n, n) = -h.imag();
    r.bottomLeftCorner(n, n) = h.imag();
    return r;
}

SdpProblem realify(const SdpProblem& p) {
    p.validate();
    SdpProblem r;
    for (size_t k = 0; k < p.block_sizes.size(); ++k) {
        r.block_sizes.push_back(2 * p.block_sizes[k]);
        r.c.push_back(0.5 * realify(p.c[k]).cast<Complex>());
    }
    for (const auto& con : p.constraints) {
        SdpConstraint rc;
        rc.b = con.b;
        for (const auto& a : con.a) rc.a.push_back(a.size() ? CMatrix(0.5 * realify(a).cast<Complex>()) : CMatrix());
        r.constraints.push_back(std::move(rc));
    }
    return r;
}

void SdpProblem::validate() const {
    if (block_sizes.empty()) throw std::invalid_argument("SDP: no blocks");
    if (c.size() != block_sizes.size()) throw std::invalid_argument("SDP: objective block count mismatch");
    for (size_t k = 0; k < block_sizes.size(); ++k) {
        if (block_sizes[k] <= 0) throw std::invalid_argument("SDP: block size must be positive");
        if (c[k].rows() != block_sizes[k] || c[k].cols() != block_sizes[k]) throw std::invalid_argument("SDP: objective block has the wrong shape");
        if (!is_hermitian(c[k], 1e-10 * std::max(1.0, max_abs_entry(c[k])))) throw NotHermitian("SDP: objective block is not Hermitian");
    }
    for (const auto& con : constraints) {
        if (con.a.size() != block_sizes.size()) throw std::invalid_argument("SDP: constraint block count mismatch");
        for (size_t k = 0; k < block_sizes.size(); ++k) {
            if (con.a[k].size() == 0) continue;
            if (con.a[k].rows() != block_sizes[k] || con.a[k].cols() != block_sizes[k]) throw std::invalid_argument("SDP: constraint block has the wrong shape");
            if (!is_hermitian(con.a[k], 1e-10 * std::max(1.0, max_abs_entry(con.a[k])))) throw NotHermitian("SDP: constraint block is not Hermitian");
        }
        if (!std::isfinite(con.b)) throw std::invalid_argument("SDP: non-finite right-hand side");
    }
}

namespace {

struct RealProblem {
    std::vector<int> n;
    std::vector<int> cn;
    std::vector<bool> cplx;
    std::vector<RMatrix> c;
    std::vector<std::vector<RMatrix>> a;  // [constraint][block], empty = zero
    RVector b;
};

RMatrix embed(const CMatrix& m, bool cplx) {
    if (!cplx) return m.real();
    return 0.5 * realify(m);
}

CMatrix extract(const RMatrix& x, bool cplx, int cn) {
    if (!cplx) return x.cast<Complex>();
    const RMatrix re = 0.5 * (x.topLeftCorner(cn, cn) + x.bottomRightCorner(cn, cn));
    const RMatrix im = 0.5 * (x.bottomLeftCorner(cn, cn) - x.topRightCorner(cn, cn));
    CMatrix out(cn, cn);
    out.real() = re;
    out.imag() = im;
    return out;
}

double inner(const RMatrix& a, const RMatrix& b) {
    return (a.array() * b.array()).sum();
}

RMatrix sym(const RMatrix& m) {
    return 0.5 * (m + m.transpose());
}

// largest alpha with X + alpha dX >= 0, given lower Cholesky factor of X
double max_step(const RMatrix& l, const RMatrix& dx) {
    RMatrix t = l.triangularView<Eigen::Lower>().solve(dx);
    t = l.triangularView<Eigen::Lower>().solve(t.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<RMatrix> es(sym(t), Eigen::EigenvaluesOnly);
    const double e = es.eigenvalues()(0);
    return e >= 0 ? std::numeric_limits<double>::infinity() : -1.0 / e;
}

bool cholesky(const RMatrix& m, RMatrix& l) {
    Eigen::LLT<RMatrix> llt(m);
    if (llt.info() != Eigen::Success) return false;
    l = llt.matrixL();
    return true;
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options) {
    problem.validate();
    const size_t nb = problem.block_sizes.size();
    const int m_all = static_cast<int>(problem.constraints.size());

    RealProblem rp;
    for (size_t k = 0; k < nb; ++k) {
        bool real = problem.c[k].imag().cwiseAbs().maxCoeff() == 0.0;
        for (const auto& con : problem.constraints)
            if (con.a[k].size() && con.a[k].imag().cwiseAbs().maxCoeff() != 0.0) real = false;
        rp.cplx.push_back(!real);
        rp.cn.push_back(problem.block_sizes[k]);
        rp.n.push_back(real ? problem.block_sizes[k] : 2 * problem.block_sizes[k]);
        rp.c.push_back(embed(problem.c[k], !real));
    }

    SdpSolution sol;
    sol.y = RVector::Zero(m_all);

    // rank-revealing pruning of redundant equalities
    Eigen::Index total = 0;
    for (size_t k = 0; k < nb; ++k) total += static_cast<Eigen::Index>(rp.n[k]) * rp.n[k];
    std::vector<std::vector<RMatrix>> a_all(m_all);
    RMatrix avec = RMatrix::Zero(total, m_all);
    RVector b_all(m_all);
    for (int i = 0; i < m_all; ++i) {
        Eigen::Index off = 0;
        for (size_t k = 0; k < nb; ++k) {
            const Eigen::Index sz = static_cast<Eigen::Index>(rp.n[k]) * rp.n[k];
            if (problem.constraints[i].a[k].size()) {
                a_all[i].push_back(embed(problem.constraints[i].a[k], rp.cplx[k]));
                avec.col(i).segment(off, sz) = Eigen::Map<const RVector>(a_all[i].back().data(), sz);
            } else {
                a_all[i].emplace_back();
            }
            off += sz;
        }
        b_all(i) = problem.constraints[i].b;
    }
    std::vector<int> kept;
    if (m_all > 0) {
        Eigen::ColPivHouseholderQR<RMatrix> qr(avec);
        qr.setThreshold(1e-10);
        const Eigen::Index rank = qr.rank();
        std::vector<int> perm(m_all);
        for (int i = 0; i < m_all; ++i) perm[i] = qr.colsPermutation().indices()(i);
        kept.assign(perm.begin(), perm.begin() + rank);
        std::sort(kept.begin(), kept.end());
        if (rank < m_all) {
            RMatrix ak(total, rank);
            RVector bk(rank);
            for (Eigen::Index r = 0; r < rank; ++r) {
                ak.col(r) = avec.col(kept[r]);
                bk(r) = b_all(kept[r]);
            }
            Eigen::ColPivHouseholderQR<RMatrix> qk(ak);
            for (int i = 0; i < m_all; ++i) {
                if (std::find(kept.begin(), kept.end(), i) != kept.end()) continue;
                RVector coef = qk.solve(RVector(avec.col(i)));
                const double mismatch = b_all(i) - bk.dot(coef);
                if (std::abs(mismatch) > 1e-9 * (1.0 + std::abs(b_all(i)))) {
                    sol.status = SdpStatus::PrimalInfeasible;
                    sol.certificate_y = RVector::Zero(m_all);
                    const double s = 1.0 / mismatch;
                    sol.certificate_y(i) = s;
                    for (Eigen::Index r = 0; r < rank; ++r) sol.certificate_y(kept[r]) -= s * coef(r);
                    sol.message = "inconsistent linear equality constraints";
                    return sol;
                }
            }
        }
    }
    const int m = static_cast<int>(kept.size());
    rp.b = RVector(m);
    for (int r = 0; r < m; ++r) {
        rp.a.push_back(a_all[kept[r]]);
        rp.b(r) = b_all(kept[r]);
    }

    int ntot = 0;
    double cmax = 0.0, cnorm2 = 0.0;
    for (size_t k = 0; k < nb; ++k) {
        ntot += rp.n[k];
        cmax = std::max(cmax, rp.c[k].cwiseAbs().maxCoeff());
        cnorm2 += rp.c[k].squaredNorm();
    }
    const double bnorm = rp.b.norm();
    const double cnorm = std::sqrt(cnorm2);
    const double mu0 = 1.0 + (m ? rp.b.cwiseAbs().maxCoeff() : 0.0) + cmax;

    std::vector<RMatrix> X(nb), Z(nb);
    for (size_t k = 0; k < nb; ++k) {
        X[k] = mu0 * RMatrix::Identity(rp.n[k], rp.n[k]);
        Z[k] = mu0 * RMatrix::Identity(rp.n[k], rp.n[k]);
    }
    RVector y = RVector::Zero(m);

    auto apply_a = [&](const std::vector<RMatrix>& v) {
        RVector out = RVector::Zero(m);
        for (int i = 0; i < m; ++i)
            for (size_t k = 0; k < nb; ++k)
                if (rp.a[i][k].size()) out(i) += inner(rp.a[i][k], v[k]);
        return out;
    };
    auto apply_at = [&](const RVector& yy) {
        std::vector<RMatrix> out(nb);
        for (size_t k = 0; k < nb; ++k) {
            out[k] = RMatrix::Zero(rp.n[k], rp.n[k]);
            for (int i = 0; i < m; ++i)
                if (rp.a[i][k].size()) out[k] += yy(i) * rp.a[i][k];
        }
        return out;
    };

    auto finish = [&](SdpStatus st, double pobj, double dobj, double pres, double dres, double gap, int it) {
        sol.status = st;
        sol.primal_objective = pobj;
        sol.dual_objective = dobj;
        sol.primal_residual = pres;
        sol.dual_residual = dres;
        sol.gap = gap;
        sol.iterations = it;
        sol.x.clear();
        sol.z.clear();
        for (size_t k = 0; k < nb; ++k) {
            sol.x.push_back(extract(X[k], rp.cplx[k], rp.cn[k]));
            sol.z.push_back((rp.cplx[k] ? 2.0 : 1.0) * extract(Z[k], rp.cplx[k], rp.cn[k]));
        }
        sol.y = RVector::Zero(m_all);
        for (int r = 0; r < m; ++r) sol.y(kept[r]) = y(r);
        return sol;
    };

    std::vector<RMatrix> lx(nb), lz(nb), g(nb), ginv(nb), w(nb);
    std::vector<RVector> lam(nb);
    for (int it = 0; it <= options.max_iter; ++it) {
        const std::vector<RMatrix> aty = apply_at(y);
        const RVector rpv = rp.b - apply_a(X);
        std::vector<RMatrix> rd(nb);
        double pobj = 0.0, xz = 0.0, rdn2 = 0.0;
        for (size_t k = 0; k < nb; ++k) {
            rd[k] = rp.c[k] - Z[k] - aty[k];
            pobj += inner(rp.c[k], X[k]);
            xz += inner(X[k], Z[k]);
            rdn2 += rd[k].squaredNorm();
        }
        const double dobj = m ? rp.b.dot(y) : 0.0;
        const double mu = xz / ntot;
        const double pres = rpv.norm() / (1.0 + bnorm);
        const double dres = std::sqrt(rdn2) / (1.0 + cnorm);
        const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        if (pres <= options.tol && dres <= options.tol && gap <= options.tol) {
            return finish(SdpStatus::Optimal, pobj, dobj, pres, dres, gap, it);
        }
        // infeasibility certificates from diverging iterates
        if (m && dobj > 0 && y.cwiseAbs().maxCoeff() > 1e6) {
            double lmax = 0.0;
            for (size_t k = 0; k < nb; ++k) {
                Eigen::SelfAdjointEigenSolver<RMatrix> es(sym(aty[k]), Eigen::EigenvaluesOnly);
                lmax = std::max(lmax, es.eigenvalues()(rp.n[k] - 1));
            }
            if (lmax <= options.tol * dobj) {
                finish(SdpStatus::PrimalInfeasible, pobj, dobj, pres, dres, gap, it);
                sol.certificate_y = sol.y / dobj;
                sol.message = "dual ray certifies primal infeasibility";
                return sol;
            }
        }
        if (pobj < 0) {
            double xmax = 0.0;
            for (size_t k = 0; k < nb; ++k) xmax = std::max(xmax, X[k].cwiseAbs().maxCoeff());
            const RVector ax = apply_a(X);
            if (xmax > 1e6 && ax.norm() <= options.tol * -pobj) {
                finish(SdpStatus::DualInfeasible, pobj, dobj, pres, dres, gap, it);
                sol.certificate_x.clear();
                for (const auto& xk : sol.x) sol.certificate_x.push_back(xk / -pobj);
                sol.message = "primal ray certifies dual infeasibility";
                return sol;
            }
        }
        if (it == options.max_iter) return finish(SdpStatus::MaxIterations, pobj, dobj, pres, dres, gap, it);

        // Nesterov-Todd scaling per block
        for (size_t k = 0; k < nb; ++k) {
            if (!cholesky(X[k], lx[k]) || !cholesky(Z[k], lz[k])) {
                return finish(SdpStatus::NumericalFailure, pobj, dobj, pres, dres, gap, it);
            }
            const RMatrix t = lx[k].transpose() * Z[k] * lx[k];
            Eigen::SelfAdjointEigenSolver<RMatrix> es(sym(t));
            RVector dvals = es.eigenvalues().cwiseMax(1e-300);
            const RVector q4 = dvals.array().pow(-0.25);
            g[k] = lx[k] * es.eigenvectors() * q4.asDiagonal();
            const RMatrix linv = lx[k].triangularView<Eigen::Lower>().solve(RMatrix::Identity(rp.n[k], rp.n[k]));
            ginv[k] = dvals.array().pow(0.25).matrix().asDiagonal() * es.eigenvectors().transpose() * linv;
            w[k] = g[k] * g[k].transpose();
            lam[k] = dvals.array().sqrt();
        }
        // Schur complement M_ij = <A_i, W A_j W>
        std::vector<std::vector<RMatrix>> waw(m, std::vector<RMatrix>(nb));
        for (int j = 0; j < m; ++j)
            for (size_t k = 0; k < nb; ++k)
                if (rp.a[j][k].size()) waw[j][k] = w[k] * rp.a[j][k] * w[k];
        RMatrix schur = RMatrix::Zero(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                double s = 0.0;
                for (size_t k = 0; k < nb; ++k)
                    if (rp.a[i][k].size() && rp.a[j][k].size()) s += inner(rp.a[i][k], waw[j][k]);
                schur(i, j) = schur(j, i) = s;
            }
        Eigen::LDLT<RMatrix> ldlt(schur);
        if (ldlt.info() != Eigen::Success) return finish(SdpStatus::NumericalFailure, pobj, dobj, pres, dres, gap, it);

        std::vector<RMatrix> wrdw(nb);
        for (size_t k = 0; k < nb; ++k) wrdw[k] = w[k] * rd[k] * w[k];

        auto direction = [&](const std::vector<RMatrix>& r, std::vector<RMatrix>& dx, RVector& dy, std::vector<RMatrix>& dz) {
            std::vector<RMatrix> tmp(nb);
            for (size_t k = 0; k < nb; ++k) tmp[k] = r[k] - wrdw[k];
            const RVector rhs = rpv - apply_a(tmp);
            dy = m ? RVector(ldlt.solve(rhs)) : RVector();
            const std::vector<RMatrix> atdy = apply_at(dy);
            dx.resize(nb);
            dz.resize(nb);
            for (size_t k = 0; k < nb; ++k) {
                dz[k] = rd[k] - atdy[k];
                dx[k] = sym(r[k] - w[k] * dz[k] * w[k]);
            }
        };
        auto steps = [&](const std::vector<RMatrix>& dx, const std::vector<RMatrix>& dz, double& ap, double& ad) {
            ap = std::numeric_limits<double>::infinity();
            ad = std::numeric_limits<double>::infinity();
            for (size_t k = 0; k < nb; ++k) {
                ap = std::min(ap, max_step(lx[k], dx[k]));
                ad = std::min(ad, max_step(lz[k], dz[k]));
            }
        };

        std::vector<RMatrix> r(nb), dx, dz;
        RVector dy;
        for (size_t k = 0; k < nb; ++k) r[k] = -X[k];
        direction(r, dx, dy, dz);
        double ap, ad;
        steps(dx, dz, ap, ad);
        ap = std::min(1.0, ap);
        ad = std::min(1.0, ad);
        double xz_aff = 0.0;
        for (size_t k = 0; k < nb; ++k) xz_aff += inner(X[k] + ap * dx[k], Z[k] + ad * dz[k]);
        const double mu_aff = xz_aff / ntot;
        const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

        // Mehrotra corrector in the scaled space: V o U = sigma mu I - V^2 - Dx o Dz
        for (size_t k = 0; k < nb; ++k) {
            const RMatrix sx = ginv[k] * dx[k] * ginv[k].transpose();
            const RMatrix sz = g[k].transpose() * dz[k] * g[k];
            RMatrix rhs = -sym(sx * sz);
            for (int i = 0; i < rp.n[k]; ++i) rhs(i, i) += sigma * mu - lam[k](i) * lam[k](i);
            RMatrix u(rp.n[k], rp.n[k]);
            for (int i = 0; i < rp.n[k]; ++i)
                for (int j = 0; j < rp.n[k]; ++j) u(i, j) = 2.0 * rhs(i, j) / (lam[k](i) + lam[k](j));
            r[k] = g[k] * u * g[k].transpose();
        }
        direction(r, dx, dy, dz);
        steps(dx, dz, ap, ad);
        ap = std::min(1.0, options.step_fraction * ap);
        ad = std::min(1.0, options.step_fraction * ad);
        if (ap < 1e-12 && ad < 1e-12) return finish(SdpStatus::NumericalFailure, pobj, dobj, pres, dres, gap, it);
        for (size_t k = 0; k < nb; ++k) {
            X[k] = sym(X[k] + ap * dx[k]);
            Z[k] = sym(Z[k] + ad * dz[k]);
        }
        if (m) y += ad * dy;
    }
    return sol;
}

KktReport check_kkt(const SdpProblem& problem, const SdpSolution& sol, double tol) {
    KktReport rep;
    const size_t nb = problem.block_sizes.size();
    if (sol.x.size() != nb || sol.z.size() != nb) return rep;
    double pres2 = 0.0, b2 = 0.0, dres2 = 0.0, c2 = 0.0, pobj = 0.0, dobj = 0.0;
    for (size_t i = 0; i < problem.constraints.size(); ++i) {
        const auto& con = problem.constraints[i];
        double ax = 0.0;
        for (size_t k = 0; k < nb; ++k)
            if (con.a[k].size()) ax += (con.a[k].adjoint() * sol.x[k]).trace().real();
        pres2 += (ax - con.b) * (ax - con.b);
        b2 += con.b * con.b;
        dobj += con.b * sol.y(static_cast<Eigen::Index>(i));
    }
    rep.min_eig_x = std::numeric_limits<double>::infinity();
    rep.min_eig_z = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < nb; ++k) {
        CMatrix r = problem.c[k] - sol.z[k];
        for (size_t i = 0; i < problem.constraints.size(); ++i)
            if (problem.constraints[i].a[k].size()) r -= sol.y(static_cast<Eigen::Index>(i)) * problem.constraints[i].a[k];
        dres2 += r.squaredNorm();
        c2 += problem.c[k].squaredNorm();
        pobj += (problem.c[k].adjoint() * sol.x[k]).trace().real();
        rep.min_eig_x = std::min(rep.min_eig_x, min_eigenvalue(sol.x[k]));
        rep.min_eig_z = std::min(rep.min_eig_z, min_eigenvalue(sol.z[k]));
    }
    rep.primal_residual = std::sqrt(pres2) / (1.0 + std::sqrt(b2));
    rep.dual_residual = std::sqrt(dres2) / (1.0 + std::sqrt(c2));
    rep.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double scale = 1.0 + std::abs(pobj);
    rep.ok = rep.primal_residual <= tol && rep.dual_residual <= tol && rep.gap <= tol && rep.min_eig_x >= -tol * scale &&
             rep.min_eig_z >= -tol * scale;
    return rep;
}

}  // namespace covasym
