#include "covasym/ito.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace covasym {

namespace {

CMatrix vec(const CMatrix& m) {
    return Eigen::Map<const CMatrix>(m.data(), m.size(), 1);
}

CMatrix unvec(const CMatrix& v, int d) {
    return Eigen::Map<const CMatrix>(v.data(), d, d);
}

bool same_character(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > 1e-6) return false;
    return true;
}

}  // namespace

const CMatrix& ItoBasis::element(int irrep, int alpha, int component) const {
    return elems_.at(irrep).at(alpha).at(component);
}

int ItoBasis::nontrivial_dimension_sum() const {
    int n = 0;
    for (const auto& ir : irreps_)
        if (!ir.trivial) n += ir.dim;
    return n;
}

int ItoBasis::match_irrep(const ItoBasis& other, int idx) const {
    if (other.kind_ != kind_) return -1;
    const IrrepInfo& o = other.irreps_.at(idx);
    for (size_t i = 0; i < irreps_.size(); ++i) {
        const IrrepInfo& ir = irreps_[i];
        if (ir.trivial != o.trivial) continue;
        if (kind_ == GroupKind::Finite) {
            if (same_character(ir.character, o.character)) return static_cast<int>(i);
        } else if (ir.key == o.key) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

std::string ItoBasis::label(int irrep, int component) const {
    const IrrepInfo& ir = irreps_.at(irrep);
    std::ostringstream os;
    switch (kind_) {
        case GroupKind::U1:
            os << "w=" << (ir.key > 0 ? "+" : "") << ir.key;
            break;
        case GroupKind::SU2:
            os << "k=" << 0.5 * ir.key << ",q=" << 0.5 * ir.key - component;
            break;
        case GroupKind::Finite:
            os << "irrep" << irrep << "/j" << component;
            break;
    }
    return os.str();
}

ItoBasis ItoBasis::build(const Representation& rep) {
    ItoBasis b;
    b.dim_ = rep.dim();
    b.kind_ = rep.kind();
    const int d = rep.dim();
    const int d2 = d * d;

    TwirlChannel tw(rep);
    {
        IrrepInfo triv;
        triv.key = 0;
        triv.dim = 1;
        triv.trivial = true;
        triv.conjugate = 0;
        triv.multiplicity = static_cast<int>(tw.commutant_basis().size());
        if (rep.kind() == GroupKind::Finite) triv.character.assign(rep.elements().size(), Complex(1.0, 0.0));
        b.irreps_.push_back(triv);
        std::vector<std::vector<CMatrix>> copies;
        for (const auto& c : tw.commutant_basis()) copies.push_back({c});
        b.elems_.push_back(std::move(copies));
    }

    if (rep.kind() == GroupKind::U1) {
        const auto& w = rep.weights();
        std::map<int, std::vector<std::pair<int, int>>> by_weight;
        for (int m = 0; m < d; ++m)
            for (int n = 0; n < d; ++n)
                if (w[m] != w[n]) by_weight[w[m] - w[n]].push_back({m, n});
        std::map<int, int> index_of;
        for (const auto& [lam, pairs] : by_weight) {
            IrrepInfo ir;
            ir.key = lam;
            ir.dim = 1;
            ir.multiplicity = static_cast<int>(pairs.size());
            index_of[lam] = static_cast<int>(b.irreps_.size());
            b.irreps_.push_back(ir);
            b.elems_.emplace_back();
        }
        for (auto& [lam, pairs] : by_weight) {
            const int idx = index_of[lam];
            b.irreps_[idx].conjugate = index_of[-lam];
            // copies of -lam are the adjoints of the lam copies, in the same order
            std::vector<std::pair<int, int>> order = pairs;
            if (lam < 0) {
                order.clear();
                for (const auto& [m, n] : by_weight[-lam]) order.push_back({n, m});
            }
            for (const auto& [m, n] : order) {
                CMatrix x = CMatrix::Zero(d, d);
                x(m, n) = 1.0;
                b.elems_[idx].push_back({x});
            }
        }
        return b;
    }

    if (rep.kind() == GroupKind::SU2) {
        const CMatrix id = CMatrix::Identity(d, d);
        std::array<CMatrix, 3> ad;
        for (int k = 0; k < 3; ++k) {
            const CMatrix& j = rep.generators()[k];
            ad[k] = kron(id, j) - kron(j.transpose(), id);
        }
        const Complex I(0.0, 1.0);
        const CMatrix ad_minus = ad[0] - I * ad[1];
        const CMatrix cas = ad[0] * ad[0] + ad[1] * ad[1] + ad[2] * ad[2];
        HermitianEigen ce = eig_hermitian(cas, 1e-8);
        // ranks are half-integers when integer and half-integer spins are mixed; keyed by 2k
        std::map<int, std::vector<int>> cols_by_k;
        for (int i = 0; i < d2; ++i) {
            const int tk = static_cast<int>(std::lround(-1.0 + std::sqrt(1.0 + 4.0 * std::max(0.0, ce.values(i)))));
            if (std::abs(ce.values(i) - 0.25 * tk * (tk + 2.0)) > 1e-6) throw std::runtime_error("ITO build: adjoint Casimir eigenvalue is not k(k+1)");
            if (tk > 0) cols_by_k[tk].push_back(i);
        }
        for (const auto& [tk, cols] : cols_by_k) {
            const double k = 0.5 * tk;
            const int n = static_cast<int>(cols.size());
            if (n % (tk + 1) != 0) throw std::runtime_error("ITO build: rank-k space has inconsistent dimension");
            const int mult = n / (tk + 1);
            CMatrix q(d2, n);
            for (int c = 0; c < n; ++c) q.col(c) = ce.vectors.col(cols[c]);
            HermitianEigen ze = eig_hermitian(q.adjoint() * ad[2] * q, 1e-8);
            CMatrix hw(d2, mult);
            int h = 0;
            for (int c = 0; c < n; ++c)
                if (ze.values(c) > k - 0.5) hw.col(h++) = q * ze.vectors.col(c);
            if (h != mult) throw std::runtime_error("ITO build: highest-weight space has the wrong dimension");
            // canonical orthonormal basis: project unit vectors in index order
            const CMatrix proj = hw * hw.adjoint();
            std::vector<CVector> top;
            for (int i = 0; i < d2 && static_cast<int>(top.size()) < mult; ++i) {
                CVector v = proj.col(i);
                for (const auto& t : top) v -= t.dot(v) * t;
                const double nrm = v.norm();
                if (nrm > 1e-6) top.push_back(v / nrm);
            }
            IrrepInfo ir;
            ir.key = tk;
            ir.dim = tk + 1;
            ir.multiplicity = mult;
            ir.conjugate = static_cast<int>(b.irreps_.size());
            b.irreps_.push_back(ir);
            std::vector<std::vector<CMatrix>> copies;
            for (const auto& t : top) {
                std::vector<CMatrix> comps;
                CVector cur = t;
                for (int j = 0; j <= tk; ++j) {
                    comps.push_back(unvec(cur, d));
                    const double qv = k - j;
                    if (j < tk) cur = ad_minus * cur / std::sqrt((k + qv) * (k - qv + 1.0));
                }
                copies.push_back(std::move(comps));
            }
            b.elems_.push_back(std::move(copies));
        }
        return b;
    }

    // Finite group: irreducible subspaces of X -> U X U^dag are the eigenspaces of a generic commutant element.
    const auto& els = rep.elements();
    const size_t ng = els.size();
    std::vector<CMatrix> s(ng);
    for (size_t g = 0; g < ng; ++g) s[g] = kron(els[g].conjugate(), els[g]);

    struct Cluster {
        CMatrix basis;
        std::vector<Complex> chi;
    };
    std::vector<Cluster> clusters;
    bool ok = false;
    for (int attempt = 0; attempt < 5 && !ok; ++attempt) {
        std::mt19937_64 rng(0x5eedULL + attempt);
        std::normal_distribution<double> nd;
        CMatrix h(d2, d2);
        for (int i = 0; i < d2; ++i)
            for (int j = 0; j < d2; ++j) h(i, j) = Complex(nd(rng), nd(rng));
        h = hermitian_part(h);
        CMatrix m = CMatrix::Zero(d2, d2);
        for (size_t g = 0; g < ng; ++g) m += s[g] * h * s[g].adjoint();
        m /= static_cast<double>(ng);
        HermitianEigen e = eig_hermitian(m, 1e-8);
        const double scale = std::max(1.0, e.values.cwiseAbs().maxCoeff());
        clusters.clear();
        ok = true;
        int start = 0;
        for (int i = 1; i <= d2; ++i) {
            if (i == d2 || e.values(i) - e.values(i - 1) > 1e-8 * scale) {
                Cluster c;
                c.basis = e.vectors.middleCols(start, i - start);
                double norm2 = 0.0;
                for (size_t g = 0; g < ng; ++g) {
                    const Complex chi = (c.basis.adjoint() * s[g] * c.basis).trace();
                    c.chi.push_back(chi);
                    norm2 += std::norm(chi);
                }
                if (std::abs(norm2 / ng - 1.0) > 1e-6) ok = false;
                clusters.push_back(std::move(c));
                start = i;
            }
        }
    }
    if (!ok) throw std::runtime_error("ITO build: could not split operator space into irreducible subspaces");

    std::vector<std::vector<Complex>> types;
    std::vector<std::vector<int>> members;
    for (size_t c = 0; c < clusters.size(); ++c) {
        const auto& chi = clusters[c].chi;
        const bool trivial = clusters[c].basis.cols() == 1 && same_character(chi, std::vector<Complex>(ng, Complex(1.0, 0.0)));
        if (trivial) continue;
        size_t t = 0;
        for (; t < types.size(); ++t)
            if (same_character(types[t], chi)) break;
        if (t == types.size()) {
            types.push_back(chi);
            members.emplace_back();
        }
        members[t].push_back(static_cast<int>(c));
    }
    std::vector<size_t> order(types.size());
    for (size_t t = 0; t < order.size(); ++t) order[t] = t;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t c) {
        return clusters[members[a][0]].basis.cols() < clusters[members[c][0]].basis.cols();
    });

    const size_t base = b.irreps_.size();
    std::vector<std::vector<CMatrix>> aligned(order.size());  // per type: list of d2 x d_lambda bases
    for (size_t pos = 0; pos < order.size(); ++pos) {
        const size_t t = order[pos];
        IrrepInfo ir;
        ir.key = static_cast<int>(base + pos);
        ir.dim = static_cast<int>(clusters[members[t][0]].basis.cols());
        ir.multiplicity = static_cast<int>(members[t].size());
        ir.character = types[t];
        b.irreps_.push_back(ir);
    }
    for (size_t pos = 0; pos < order.size(); ++pos) {
        IrrepInfo& ir = b.irreps_[base + pos];
        std::vector<Complex> cc;
        for (const auto& x : ir.character) cc.push_back(std::conj(x));
        for (size_t q = 0; q < order.size(); ++q)
            if (same_character(b.irreps_[base + q].character, cc)) ir.conjugate = static_cast<int>(base + q);
    }
    for (size_t pos = 0; pos < order.size(); ++pos) {
        const size_t t = order[pos];
        const IrrepInfo& ir = b.irreps_[base + pos];
        const size_t conj_pos = static_cast<size_t>(ir.conjugate) - base;
        if (conj_pos < pos) {
            // adjoints of the conjugate irrep's aligned copies
            for (const auto& bc : aligned[conj_pos]) {
                CMatrix adj(d2, bc.cols());
                for (Eigen::Index j = 0; j < bc.cols(); ++j) adj.col(j) = vec(unvec(bc.col(j), d).adjoint());
                aligned[pos].push_back(adj);
            }
            continue;
        }
        const int dl = ir.dim;
        const CMatrix& b1 = clusters[members[t][0]].basis;
        std::vector<CMatrix> d1(ng);
        for (size_t g = 0; g < ng; ++g) d1[g] = b1.adjoint() * s[g] * b1;
        aligned[pos].push_back(b1);
        for (size_t a = 1; a < members[t].size(); ++a) {
            const CMatrix& ba = clusters[members[t][a]].basis;
            std::vector<CMatrix> da(ng);
            for (size_t g = 0; g < ng; ++g) da[g] = ba.adjoint() * s[g] * ba;
            CMatrix q;
            bool found = false;
            for (int idx = 0; idx < dl * dl && !found; ++idx) {
                CMatrix k = CMatrix::Zero(dl, dl);
                k(idx % dl, idx / dl) = 1.0;
                q = CMatrix::Zero(dl, dl);
                for (size_t g = 0; g < ng; ++g) q += da[g] * k * d1[g].adjoint();
                if (q.norm() > 1e-6) found = true;
            }
            if (!found) throw std::runtime_error("ITO build: failed to align multiplicity copies");
            const double c = (q.adjoint() * q)(0, 0).real();
            q /= std::sqrt(c);
            aligned[pos].push_back(ba * q);
        }
    }
    for (size_t pos = 0; pos < order.size(); ++pos) {
        std::vector<std::vector<CMatrix>> copies;
        for (const auto& bc : aligned[pos]) {
            std::vector<CMatrix> comps;
            for (Eigen::Index j = 0; j < bc.cols(); ++j) comps.push_back(unvec(bc.col(j), d));
            copies.push_back(std::move(comps));
        }
        b.elems_.push_back(std::move(copies));
    }
    return b;
}

const Mode* ModeDecomposition::find(int irrep, int component) const {
    for (const auto& m : modes)
        if (m.irrep == irrep && m.component == component) return &m;
    return nullptr;
}

CMatrix ModeDecomposition::reconstruct() const {
    CMatrix out = CMatrix::Zero(dim, dim);
    for (const auto& m : modes) out += m.op;
    return out;
}

ModeDecomposition decompose_modes(const CMatrix& rho, const ItoBasis& basis) {
    if (rho.rows() != basis.dim() || rho.cols() != basis.dim()) throw DimensionMismatch("decompose_modes: dimension mismatch");
    ModeDecomposition md;
    md.dim = basis.dim();
    for (size_t i = 0; i < basis.irreps().size(); ++i) {
        const IrrepInfo& ir = basis.irreps()[i];
        for (int j = 0; j < ir.dim; ++j) {
            Mode m;
            m.irrep = static_cast<int>(i);
            m.component = j;
            m.op = CMatrix::Zero(md.dim, md.dim);
            for (int a = 0; a < ir.multiplicity; ++a) {
                const CMatrix& x = basis.element(static_cast<int>(i), a, j);
                const Complex c = (x.adjoint() * rho).trace();
                m.coefficients.push_back(c);
                m.op += c * x;
            }
            md.modes.push_back(std::move(m));
        }
    }
    return md;
}

std::vector<std::pair<int, int>> mode_support(const ModeDecomposition& md, const ItoBasis& basis, double tol) {
    std::vector<std::pair<int, int>> out;
    (void)basis;
    for (const auto& m : md.modes) {
        if (m.op.norm() > tol) out.push_back({m.irrep, m.component});
    }
    return out;
}

double g_coefficient(const ModeDecomposition& md, int irrep, int component) {
    const Mode* m = md.find(irrep, component);
    if (!m) return 0.0;
    double g = 0.0;
    for (const auto& c : m->coefficients) g += std::abs(c);
    return g;
}

double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M) {
    auto is_int = [](double x) { return std::abs(x - std::round(x)) < 1e-9; };
    if (std::abs(m1 + m2 - M) > 1e-9) return 0.0;
    if (J < std::abs(j1 - j2) - 1e-9 || J > j1 + j2 + 1e-9) return 0.0;
    if (std::abs(m1) > j1 + 1e-9 || std::abs(m2) > j2 + 1e-9 || std::abs(M) > J + 1e-9) return 0.0;
    if (!is_int(j1 + j2 + J) || !is_int(j1 - m1) || !is_int(j2 - m2) || !is_int(J - M)) return 0.0;
    auto lf = [](double n) { return std::lgamma(std::round(n) + 1.0); };
    const double pre = 0.5 * (std::log(2 * J + 1) + lf(j1 + j2 - J) + lf(j1 - j2 + J) + lf(-j1 + j2 + J) - lf(j1 + j2 + J + 1)) +
                       0.5 * (lf(J + M) + lf(J - M) + lf(j1 - m1) + lf(j1 + m1) + lf(j2 - m2) + lf(j2 + m2));
    double sum = 0.0;
    const int kmax = static_cast<int>(std::lround(j1 + j2 + J));
    for (int k = 0; k <= kmax; ++k) {
        const double a1 = j1 + j2 - J - k, a2 = j1 - m1 - k, a3 = j2 + m2 - k;
        const double a4 = J - j2 + m1 + k, a5 = J - j1 - m2 + k;
        if (a1 < -1e-9 || a2 < -1e-9 || a3 < -1e-9 || a4 < -1e-9 || a5 < -1e-9) continue;
        const double l = lf(k) + lf(a1) + lf(a2) + lf(a3) + lf(a4) + lf(a5);
        sum += ((k % 2) ? -1.0 : 1.0) * std::exp(pre - l);
    }
    return sum;
}

}  // namespace covasym
