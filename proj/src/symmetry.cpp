#include "covasym/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace covasym {

namespace {

constexpr double kPi = 3.14159265358979323846;

CMatrix vec(const CMatrix& m) {
    return Eigen::Map<const CMatrix>(m.data(), m.size(), 1);
}

CMatrix unvec(const CMatrix& v, int d) {
    return Eigen::Map<const CMatrix>(v.data(), d, d);
}

bool is_unitary(const CMatrix& u, double tol) {
    return max_abs_entry(u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols())) <= tol;
}

double frac(double x) {
    return x - std::floor(x);
}

}  // namespace

const char* group_kind_name(GroupKind k) {
    switch (k) {
        case GroupKind::U1: return "U1";
        case GroupKind::SU2: return "SU2";
        case GroupKind::Finite: return "finite";
    }
    return "?";
}

SymmetrySpec SymmetrySpec::u1(std::vector<int> w) {
    SymmetrySpec s;
    s.kind = GroupKind::U1;
    s.weights = std::move(w);
    return s;
}

SymmetrySpec SymmetrySpec::su2(std::vector<SpinBlock> sp) {
    SymmetrySpec s;
    s.kind = GroupKind::SU2;
    s.spins = std::move(sp);
    return s;
}

SymmetrySpec SymmetrySpec::finite(std::vector<CMatrix> e) {
    SymmetrySpec s;
    s.kind = GroupKind::Finite;
    s.elements = std::move(e);
    return s;
}

Representation Representation::from_spec(const SymmetrySpec& spec) {
    switch (spec.kind) {
        case GroupKind::U1: return u1(spec.weights);
        case GroupKind::SU2: return su2(spec.spins);
        case GroupKind::Finite: return finite(spec.elements);
    }
    throw SpecError("unknown group kind");
}

Representation Representation::u1(std::vector<int> weights) {
    if (weights.empty()) throw SpecError("U1 spec needs at least one weight");
    Representation r;
    r.kind_ = GroupKind::U1;
    r.dim_ = static_cast<int>(weights.size());
    r.weights_ = std::move(weights);
    return r;
}

Representation Representation::su2(const std::vector<SpinBlock>& spins) {
    if (spins.empty()) throw SpecError("SU2 spec needs at least one spin block");
    int d = 0;
    for (const auto& b : spins) {
        const double twice = 2.0 * b.j;
        if (b.j < 0 || std::abs(twice - std::round(twice)) > 1e-12) throw SpecError("spin must be a non-negative half-integer");
        if (b.multiplicity < 1) throw SpecError("spin multiplicity must be positive");
        d += b.multiplicity * (static_cast<int>(std::lround(twice)) + 1);
    }
    Representation r;
    r.kind_ = GroupKind::SU2;
    r.dim_ = d;
    for (auto& g : r.gens_) g = CMatrix::Zero(d, d);
    const Complex I(0.0, 1.0);
    int off = 0;
    for (const auto& b : spins) {
        const int n = static_cast<int>(std::lround(2.0 * b.j)) + 1;
        for (int c = 0; c < b.multiplicity; ++c) {
            for (int i = 0; i < n; ++i) {
                const double m = b.j - i;
                r.gens_[2](off + i, off + i) = m;
                if (i > 0) {
                    // <m+1| J+ |m> with row i-1 holding m+1
                    const double a = std::sqrt(b.j * (b.j + 1) - m * (m + 1));
                    r.gens_[0](off + i - 1, off + i) += 0.5 * a;
                    r.gens_[0](off + i, off + i - 1) += 0.5 * a;
                    r.gens_[1](off + i - 1, off + i) += -0.5 * I * a;
                    r.gens_[1](off + i, off + i - 1) += 0.5 * I * a;
                }
            }
            off += n;
        }
    }
    return r;
}

Representation Representation::finite(std::vector<CMatrix> elements) {
    if (elements.empty()) throw SpecError("finite group spec needs at least one element");
    const Eigen::Index d = elements.front().rows();
    for (const auto& u : elements) {
        if (u.rows() != d || u.cols() != d) throw SpecError("finite group elements must share one square shape");
        if (!is_unitary(u, 1e-10)) throw SpecError("finite group element is not unitary");
    }
    auto find = [&](const CMatrix& m) {
        for (size_t k = 0; k < elements.size(); ++k) {
            if (max_abs_entry(elements[k] - m) <= 1e-8) return static_cast<int>(k);
        }
        return -1;
    };
    for (size_t a = 0; a < elements.size(); ++a) {
        for (size_t b = 0; b < elements.size(); ++b) {
            if (find(elements[a] * elements[b]) < 0) {
                std::ostringstream os;
                os << "finite group is not closed: product of elements " << a << " and " << b << " is missing";
                throw SpecError(os.str());
            }
        }
    }
    Representation r;
    r.kind_ = GroupKind::Finite;
    r.dim_ = static_cast<int>(d);
    r.elements_ = std::move(elements);
    return r;
}

Representation Representation::dual() const {
    Representation r = *this;
    switch (kind_) {
        case GroupKind::U1:
            for (int& w : r.weights_) w = -w;
            break;
        case GroupKind::SU2:
            for (auto& g : r.gens_) g = -g.conjugate();
            break;
        case GroupKind::Finite:
            for (auto& u : r.elements_) u = u.conjugate();
            break;
    }
    return r;
}

bool Representation::compatible_with(const Representation& other) const {
    if (kind_ != other.kind_) return false;
    if (kind_ == GroupKind::Finite) return elements_.size() == other.elements_.size();
    return true;
}

Representation Representation::tensor(const Representation& other) const {
    if (!compatible_with(other)) throw SpecError("tensor: representations belong to different groups");
    Representation r;
    r.kind_ = kind_;
    r.dim_ = dim_ * other.dim_;
    switch (kind_) {
        case GroupKind::U1:
            for (int a : weights_)
                for (int b : other.weights_) r.weights_.push_back(a + b);
            break;
        case GroupKind::SU2: {
            const CMatrix ia = CMatrix::Identity(dim_, dim_);
            const CMatrix ib = CMatrix::Identity(other.dim_, other.dim_);
            for (int k = 0; k < 3; ++k) r.gens_[k] = kron(gens_[k], ib) + kron(ia, other.gens_[k]);
            break;
        }
        case GroupKind::Finite:
            for (size_t k = 0; k < elements_.size(); ++k) r.elements_.push_back(kron(elements_[k], other.elements_[k]));
            break;
    }
    return r;
}

Representation Representation::restrict_to(const CMatrix& v) const {
    if (v.rows() != dim_ || v.cols() == 0 || v.cols() > dim_) throw DimensionMismatch("restrict_to: isometry has the wrong shape");
    if (!is_unitary(v, 1e-9)) throw DimensionMismatch("restrict_to: columns are not orthonormal");
    const CMatrix proj = v * v.adjoint();
    Representation r;
    r.kind_ = kind_;
    r.dim_ = static_cast<int>(v.cols());
    switch (kind_) {
        case GroupKind::U1: {
            for (Eigen::Index c = 0; c < v.cols(); ++c) {
                int w = 0;
                bool found = false;
                for (int i = 0; i < dim_; ++i) {
                    if (std::abs(v(i, c)) > 1e-9) {
                        if (found && weights_[i] != w) throw DimensionMismatch("restrict_to: U1 isometry column mixes weights");
                        w = weights_[i];
                        found = true;
                    }
                }
                r.weights_.push_back(w);
            }
            break;
        }
        case GroupKind::SU2:
            for (int k = 0; k < 3; ++k) {
                if (max_abs_entry(gens_[k] * v - proj * gens_[k] * v) > 1e-8) throw DimensionMismatch("restrict_to: subspace is not invariant");
                r.gens_[k] = v.adjoint() * gens_[k] * v;
            }
            break;
        case GroupKind::Finite:
            for (const auto& u : elements_) {
                if (max_abs_entry(u * v - proj * u * v) > 1e-8) throw DimensionMismatch("restrict_to: subspace is not invariant");
                r.elements_.push_back(v.adjoint() * u * v);
            }
            break;
    }
    return r;
}

CMatrix su2_element(const std::array<CMatrix, 3>& gens, double a, double b, double c) {
    return expi_hermitian(gens[2], -a) * expi_hermitian(gens[1], -b) * expi_hermitian(gens[2], -c);
}

std::vector<CMatrix> Representation::sample_unitaries() const {
    std::vector<CMatrix> out;
    switch (kind_) {
        case GroupKind::U1:
            for (int k = 0; k < 16; ++k) {
                const double t = 2.0 * kPi * k / 16.0;
                CVector ph(dim_);
                for (int i = 0; i < dim_; ++i) ph(i) = std::polar(1.0, t * weights_[i]);
                out.push_back(ph.asDiagonal());
            }
            break;
        case GroupKind::SU2: {
            const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
            for (int k = 0; k < 24; ++k) {
                out.push_back(su2_element(gens_, 2 * kPi * frac(k * phi), kPi * frac(k * std::sqrt(2.0)), 2 * kPi * frac(k * std::sqrt(3.0))));
            }
            break;
        }
        case GroupKind::Finite:
            out = elements_;
            break;
    }
    return out;
}

CMatrix Representation::invariant_projector() const {
    switch (kind_) {
        case GroupKind::U1: {
            CMatrix p = CMatrix::Zero(dim_, dim_);
            for (int i = 0; i < dim_; ++i)
                if (weights_[i] == 0) p(i, i) = 1.0;
            return p;
        }
        case GroupKind::SU2: {
            // connected group: fixed vectors = common kernel of the generators = kernel of the Casimir
            CMatrix cas = gens_[0] * gens_[0] + gens_[1] * gens_[1] + gens_[2] * gens_[2];
            HermitianEigen e = eig_hermitian(cas, 1e-8);
            CMatrix p = CMatrix::Zero(dim_, dim_);
            for (int i = 0; i < dim_; ++i) {
                // Casimir eigenvalues are j(j+1) >= 3/4 off the kernel
                if (e.values(i) < 0.25) p += e.vectors.col(i) * e.vectors.col(i).adjoint();
            }
            return p;
        }
        case GroupKind::Finite: {
            CMatrix p = CMatrix::Zero(dim_, dim_);
            for (const auto& u : elements_) p += u;
            return p / static_cast<double>(elements_.size());
        }
    }
    return {};
}

std::vector<CMatrix> hermitian_operator_basis(int d) {
    std::vector<CMatrix> out;
    const double s = 1.0 / std::sqrt(2.0);
    const Complex I(0.0, 1.0);
    for (int i = 0; i < d; ++i) {
        CMatrix e = CMatrix::Zero(d, d);
        e(i, i) = 1.0;
        out.push_back(e);
    }
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            CMatrix a = CMatrix::Zero(d, d);
            a(i, j) = s;
            a(j, i) = s;
            out.push_back(a);
            CMatrix b = CMatrix::Zero(d, d);
            b(i, j) = -I * s;
            b(j, i) = I * s;
            out.push_back(b);
        }
    }
    return out;
}

TwirlChannel::TwirlChannel(const Representation& rep) : rep_(rep), dim_(rep.dim()) {
    const int d = dim_;
    super_ = rep.dual().tensor(rep).invariant_projector();
    // column-major vec index j*d + i carries row i (rep) and column j (dual rep)

    std::vector<CMatrix> chosen;
    const int rank = static_cast<int>(std::lround(super_.trace().real()));
    std::vector<CMatrix> candidates;
    candidates.push_back(CMatrix::Identity(d, d) / std::sqrt(static_cast<double>(d)));
    for (auto& h : hermitian_operator_basis(d)) candidates.push_back(h);
    for (const auto& h : candidates) {
        if (static_cast<int>(chosen.size()) >= rank) break;
        CMatrix v = apply(h);
        for (const auto& c : chosen) v -= (c.adjoint() * v).trace() * c;
        const double nrm = v.norm();
        if (nrm > 1e-8) chosen.push_back(hermitian_part(v / nrm));
    }
    commutant_ = std::move(chosen);

    std::vector<int> parent(d);
    std::iota(parent.begin(), parent.end(), 0);
    auto root = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& c : commutant_) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (std::abs(c(i, j)) > 1e-10) parent[root(i)] = root(j);
    }
    std::vector<int> slot(d, -1);
    for (int i = 0; i < d; ++i) {
        const int r = root(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(blocks_.size());
            blocks_.emplace_back();
        }
        blocks_[slot[r]].push_back(i);
    }
}

CMatrix TwirlChannel::apply(const CMatrix& m) const {
    if (m.rows() != dim_ || m.cols() != dim_) throw DimensionMismatch("twirl: operator dimension does not match representation");
    if (rep_.kind() == GroupKind::U1) {
        CMatrix out = CMatrix::Zero(dim_, dim_);
        const auto& w = rep_.weights();
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                if (w[i] == w[j]) out(i, j) = m(i, j);
        return out;
    }
    return unvec(super_ * vec(m), dim_);
}

bool TwirlChannel::is_invariant(const CMatrix& m, double tol) const {
    return max_abs_entry(apply(m) - m) <= tol;
}

CMatrix twirl(const Representation& rep, const CMatrix& m) {
    return TwirlChannel(rep).apply(m);
}

bool is_symmetric(const Representation& rep, const CMatrix& m, double tol) {
    if (m.rows() != rep.dim() || m.cols() != rep.dim()) throw DimensionMismatch("is_symmetric: dimension mismatch");
    switch (rep.kind()) {
        case GroupKind::U1: {
            const auto& w = rep.weights();
            for (int i = 0; i < rep.dim(); ++i)
                for (int j = 0; j < rep.dim(); ++j)
                    if (w[i] != w[j] && std::abs(m(i, j)) > tol) return false;
            return true;
        }
        case GroupKind::SU2:
            for (const auto& g : rep.generators())
                if (max_abs_entry(g * m - m * g) > tol) return false;
            return true;
        case GroupKind::Finite:
            for (const auto& u : rep.elements())
                if (max_abs_entry(u * m - m * u) > tol) return false;
            return true;
    }
    return false;
}

}  // namespace covasym
