#include "covasym/interconversion.hpp"

#include "covasym/parallel.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <sstream>
#include <unordered_map>

namespace covasym {

namespace {

constexpr double kViolation = -1e-8;

CMatrix restrict_block(const CMatrix& x, const std::vector<int>& idx) {
    CMatrix out(idx.size(), idx.size());
    for (size_t i = 0; i < idx.size(); ++i)
        for (size_t j = 0; j < idx.size(); ++j) out(i, j) = x(idx[i], idx[j]);
    return out;
}

CMatrix random_traceless(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    CMatrix g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = Complex(nd(rng), nd(rng));
    CMatrix h = hermitian_part(g);
    h -= (h.trace() / static_cast<double>(d)) * CMatrix::Identity(d, d);
    return h;
}

struct DeltaH {
    double value;
    double phi_rho;
    double phi_sigma;
};

DeltaH eval_delta_h(const CMatrix& eta, const CMatrix& rho, const CMatrix& sigma, const JointSetting& js) {
    const double pr = phi_eta(eta, rho, js).phi;
    const double ps = phi_eta(eta, sigma, js).phi;
    return {std::log2(pr) - std::log2(ps), pr, ps};
}

}  // namespace

int default_thread_count() {
    if (const char* env = std::getenv("COVASYM_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Feasible: return "Feasible";
        case Verdict::Infeasible: return "Infeasible";
        case Verdict::Borderline: return "Borderline";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

InterconversionSetting::InterconversionSetting(const Representation& in, const Representation& out)
    : in_(in), out_(out), phi_(JointSetting::for_output(out, in)) {
    choi_tw_ = std::make_shared<TwirlChannel>(in.dual().tensor(out));
}

FeasibilityReport choi_feasibility(const CMatrix& rho, const CMatrix& sigma, const InterconversionSetting& s, const ChoiOptions& opts) {
    const int da = s.in().dim(), db = s.out().dim();
    if (rho.rows() != da) throw DimensionMismatch("choi_feasibility: input state dimension mismatch");
    if (sigma.rows() != db) throw DimensionMismatch("choi_feasibility: target state dimension mismatch");
    DensityMatrix::from_matrix(rho);
    DensityMatrix::from_matrix(sigma);

    FeasibilityReport rep;
    rep.method = "choi";
    const auto& basis = s.choi_twirl().commutant_basis();
    const int k = static_cast<int>(basis.size());
    const auto ha = hermitian_operator_basis(da);
    const auto hb = hermitian_operator_basis(db);
    const int rows = static_cast<int>(ha.size() + hb.size());
    RMatrix m(rows, k);
    RVector r(rows);
    const CMatrix rho_t = kron(rho.transpose(), CMatrix::Identity(db, db));
    for (int c = 0; c < k; ++c) {
        const CMatrix trb = partial_trace(basis[c], da, db, Keep::R);
        const CMatrix img = partial_trace(basis[c] * rho_t, da, db, Keep::A);
        for (size_t i = 0; i < ha.size(); ++i) m(static_cast<Eigen::Index>(i), c) = (ha[i] * trb).trace().real();
        for (size_t i = 0; i < hb.size(); ++i) m(static_cast<Eigen::Index>(ha.size() + i), c) = (hb[i] * img).trace().real();
    }
    for (size_t i = 0; i < ha.size(); ++i) r(static_cast<Eigen::Index>(i)) = ha[i].trace().real();
    for (size_t i = 0; i < hb.size(); ++i) r(static_cast<Eigen::Index>(ha.size() + i)) = (hb[i] * sigma).trace().real();

    Eigen::JacobiSVD<RMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RVector sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-10 * std::max(1.0, smax)) ++rank;
    svd.setThreshold(1e-10 * std::max(1.0, smax) / std::max(1.0, smax));
    const RVector c0 = svd.solve(r);
    rep.linear_residual = (m * c0 - r).norm();
    if (rep.linear_residual > opts.linear_tol * (1.0 + r.norm())) {
        rep.verdict = Verdict::Infeasible;
        rep.note = "linear constraints tr_B J = 1, E(rho) = sigma are inconsistent on covariant Choi operators";
        return rep;
    }

    CMatrix j0 = CMatrix::Zero(da * db, da * db);
    for (int c = 0; c < k; ++c) j0 += c0(c) * basis[c];
    std::vector<CMatrix> null;
    for (int l = rank; l < k; ++l) {
        CMatrix nl = CMatrix::Zero(da * db, da * db);
        for (int c = 0; c < k; ++c) nl += svd.matrixV()(c, l) * basis[c];
        null.push_back(nl);
    }

    CMatrix jcert = j0;
    if (null.empty()) {
        rep.phase1_value = min_eigenvalue(j0);
    } else {
        // max_z lambda_min(J0 + sum z N) as the dual of min <J0, X> s.t. <N_l, X> = 0, tr X = 1
        const auto& blocks = s.choi_twirl().blocks();
        SdpProblem p;
        for (const auto& blk : blocks) {
            p.block_sizes.push_back(static_cast<int>(blk.size()));
            p.c.push_back(restrict_block(j0, blk));
        }
        for (const auto& nl : null) {
            SdpConstraint con;
            for (const auto& blk : blocks) con.a.push_back(restrict_block(nl, blk));
            con.b = 0.0;
            p.constraints.push_back(std::move(con));
        }
        SdpConstraint tr;
        for (const auto& blk : blocks) tr.a.push_back(CMatrix::Identity(blk.size(), blk.size()));
        tr.b = 1.0;
        p.constraints.push_back(std::move(tr));
        SdpOptions so;
        so.tol = 1e-10;
        SdpSolution sol = solve(p, so);
        if (sol.status != SdpStatus::Optimal) {
            so.tol = 1e-8;
            sol = solve(p, so);
        }
        if (sol.status != SdpStatus::Optimal) {
            rep.verdict = Verdict::Borderline;
            rep.note = std::string("phase-I SDP did not converge: ") + sdp_status_name(sol.status);
            rep.phase1_value = sol.dual_objective;
            return rep;
        }
        for (size_t l = 0; l < null.size(); ++l) jcert -= sol.y(static_cast<Eigen::Index>(l)) * null[l];
        rep.phase1_value = 0.5 * (sol.primal_objective + sol.dual_objective);
    }
    if (rep.phase1_value >= -opts.tol) {
        rep.verdict = Verdict::Feasible;
        rep.channel = CovariantChannel::from_choi(hermitian_part(jcert), da, db, "choi_certificate");
    } else {
        rep.verdict = Verdict::Infeasible;
        std::ostringstream os;
        os << "phase-I optimum t* = " << -rep.phase1_value << " > tol";
        rep.note = os.str();
    }
    return rep;
}

std::vector<CMatrix> surface_samples(const SurfaceSpec& spec, int d) {
    if (!(spec.radius > 0.0) || spec.radius > 1.0) throw std::invalid_argument("surface radius must lie in (0, 1]");
    std::vector<CMatrix> dirs;
    if (spec.sampler == SamplerKind::DeterministicNet) {
        dirs = generate_epsilon_net(d, spec.epsilon, spec.seed).directions;
    } else {
        if (spec.count <= 0) throw std::invalid_argument("surface sampler needs a positive count");
        std::mt19937_64 rng(spec.seed);
        for (int i = 0; i < spec.count; ++i) dirs.push_back(random_traceless(d, rng));
    }
    if (dirs.empty()) throw std::invalid_argument("surface sample set is empty");
    std::vector<CMatrix> out;
    const CMatrix id = CMatrix::Identity(d, d);
    for (auto& a : dirs) {
        const double nrm = spec.kind == SurfaceKind::InfinityShell ? operator_norm(a) : a.norm();
        out.push_back((id + (spec.radius / nrm) * a) / static_cast<double>(d));
    }
    return out;
}

FeasibilityReport surface_check(const CMatrix& rho, const CMatrix& sigma, const InterconversionSetting& s, const SurfaceSpec& spec,
                                int threads) {
    if (s.in().dim() != rho.rows() || s.out().dim() != sigma.rows()) throw DimensionMismatch("surface_check: dimension mismatch");
    DensityMatrix::from_matrix(rho);
    DensityMatrix::from_matrix(sigma);
    const std::vector<CMatrix> etas = surface_samples(spec, s.out().dim());
    FeasibilityReport rep;
    rep.method = "surface";
    rep.verdict = Verdict::Inconclusive;
    rep.min_delta_h = std::numeric_limits<double>::infinity();
    auto record = [&](size_t i, double dh) {
        rep.min_delta_h = std::min(rep.min_delta_h, dh);
        if (dh < kViolation && rep.verdict != Verdict::Infeasible) {
            rep.verdict = Verdict::Infeasible;
            rep.witness_eta = etas[i];
            rep.witness_delta_h = dh;
            return true;
        }
        return false;
    };
    if (threads <= 1) {
        for (size_t i = 0; i < etas.size(); ++i) {
            ++rep.evaluated;
            if (record(i, eval_delta_h(etas[i], rho, sigma, s.phi()).value)) break;
        }
    } else {
        const auto vals = parallel_map(etas.size(), threads, [&](size_t i) { return eval_delta_h(etas[i], rho, sigma, s.phi()).value; });
        for (size_t i = 0; i < vals.size(); ++i) {
            ++rep.evaluated;
            if (record(i, vals[i])) break;
        }
    }
    if (rep.verdict != Verdict::Infeasible) rep.note = "no violating reference state on the sampled surface (necessary condition only)";
    return rep;
}

double smoothing_radius(int d_r, double eps) {
    return 2.0 * d_r * d_r * eps / std::log(2.0);
}

EpsilonNet generate_epsilon_net(int d, double eps, uint64_t seed, size_t candidate_budget) {
    if (d < 2) throw std::invalid_argument("epsilon net needs d >= 2");
    if (!(eps > 0.0) || eps > 1.0) throw std::invalid_argument("epsilon must lie in (0, 1]");
    const int n = d * d - 1;
    EpsilonNet net;
    net.d = d;
    net.epsilon = eps;
    net.cardinality_bound = std::pow(1.0 + 1.0 / eps, n);

    std::vector<CMatrix> b = bloch_basis(d);
    for (auto& x : b) x *= static_cast<double>(d);  // ||B_k||_inf = 1
    double c = 0.0;
    for (const auto& x : b) c = std::max(c, trace_norm(x) / x.squaredNorm());

    const CMatrix id = CMatrix::Identity(d, d);
    auto add = [&](const CMatrix& a) {
        net.directions.push_back(a);
        net.states.push_back((id + a) / static_cast<double>(d));
    };
    if (eps >= 1.0) {
        // generalized trace distance between states never exceeds 1
        add(b[0] / operator_norm(b[0]));
        return net;
    }

    // Candidates: grid on the faces of the cube [-c, c]^n, projected radially onto the shell.
    // Nearest-candidate distance is at most (n-1) h / 2; greedy thinning at r2 keeps covering radius r1 + r2 = eps.
    const double r1 = eps / 5.0;
    const double r2 = eps - r1;
    const double h = 2.0 * r1 / std::max(1, n - 1);
    const long g = static_cast<long>(std::ceil(2.0 * c / h)) + 1;
    const double per_face = std::pow(static_cast<double>(g), n - 1);
    const double total = 2.0 * n * per_face;
    if (total > static_cast<double>(candidate_budget)) {
        std::ostringstream os;
        os << "epsilon net for d=" << d << ", eps=" << eps << " needs " << total << " candidates (budget " << candidate_budget
           << "); cardinality bound (1+1/eps)^(d^2-1) = " << net.cardinality_bound;
        throw NetTooLarge(os.str(), net.cardinality_bound);
    }
    const double step = 2.0 * c / static_cast<double>(g - 1);

    auto inf_norm = [&](const RVector& u) {
        if (d == 2) return u.norm();
        CMatrix a = CMatrix::Zero(d, d);
        for (int k = 0; k < n; ++k) a += u(k) * b[k];
        return operator_norm(a);
    };
    auto dist = [&](const RVector& u, const RVector& v) {
        const RVector du = u - v;
        if (d == 2) return 0.5 * du.norm();
        CMatrix a = CMatrix::Zero(d, d);
        for (int k = 0; k < n; ++k) a += du(k) * b[k];
        return trace_norm(a) / (2.0 * d);
    };

    std::vector<RVector> cand;
    cand.reserve(static_cast<size_t>(total));
    std::vector<long> idx(n - 1);
    for (int face = 0; face < n; ++face) {
        for (int sgn = -1; sgn <= 1; sgn += 2) {
            std::fill(idx.begin(), idx.end(), 0);
            while (true) {
                RVector u(n);
                int q = 0;
                for (int k = 0; k < n; ++k) u(k) = (k == face) ? sgn * c : -c + step * static_cast<double>(idx[q++]);
                cand.push_back(u / inf_norm(u));
                int pos = 0;
                while (pos < n - 1 && ++idx[pos] == g) idx[pos++] = 0;
                if (pos == n - 1) break;
            }
        }
    }

    std::vector<size_t> order(cand.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    for (size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);

    // |dv_k| <= c ||dA||_1 = 2 d c D, so D <= r2 keeps neighbours within one cell of width 2 d c r2
    const double cell = 2.0 * d * c * r2;
    auto key_of = [&](const RVector& u, const std::vector<int>& off) {
        uint64_t key = 1469598103934665603ULL;
        for (int k = 0; k < n; ++k) {
            const long cidx = static_cast<long>(std::floor(u(k) / cell)) + off[k];
            key = (key ^ static_cast<uint64_t>(cidx + (1L << 20))) * 1099511628211ULL;
        }
        return key;
    };
    std::unordered_map<uint64_t, std::vector<size_t>> grid;
    std::vector<RVector> chosen;
    std::vector<int> off(n, 0);
    const std::vector<int> zero(n, 0);
    for (size_t oi : order) {
        const RVector& u = cand[oi];
        bool covered = false;
        std::fill(off.begin(), off.end(), -1);
        while (!covered) {
            auto it = grid.find(key_of(u, off));
            if (it != grid.end()) {
                for (size_t ci : it->second) {
                    if (dist(u, chosen[ci]) <= r2) {
                        covered = true;
                        break;
                    }
                }
            }
            int pos = 0;
            while (pos < n && ++off[pos] == 2) off[pos++] = -1;
            if (pos == n) break;
        }
        if (covered) continue;
        grid[key_of(u, zero)].push_back(chosen.size());
        chosen.push_back(u);
    }
    for (const auto& u : chosen) {
        CMatrix a = CMatrix::Zero(d, d);
        for (int k = 0; k < n; ++k) a += u(k) * b[k];
        add(a);
    }
    return net;
}

FeasibilityReport smoothed_check(const CMatrix& rho, const CMatrix& sigma, const InterconversionSetting& s, const EpsilonNet& net,
                                 int threads) {
    if (net.d != s.out().dim()) throw DimensionMismatch("smoothed_check: net dimension differs from the output system");
    DensityMatrix::from_matrix(rho);
    DensityMatrix::from_matrix(sigma);
    FeasibilityReport rep;
    rep.method = "smoothed";
    rep.radius = smoothing_radius(s.phi().d_r(), net.epsilon);
    rep.min_delta_h = std::numeric_limits<double>::infinity();
    std::vector<double> vals;
    if (threads <= 1) {
        for (size_t i = 0; i < net.states.size(); ++i) {
            const double dh = eval_delta_h(net.states[i], rho, sigma, s.phi()).value;
            vals.push_back(dh);
            if (dh < kViolation) break;
        }
    } else {
        vals = parallel_map(net.states.size(), threads, [&](size_t i) { return eval_delta_h(net.states[i], rho, sigma, s.phi()).value; });
    }
    for (size_t i = 0; i < vals.size(); ++i) {
        ++rep.evaluated;
        rep.min_delta_h = std::min(rep.min_delta_h, vals[i]);
        if (vals[i] < kViolation) {
            rep.verdict = Verdict::Infeasible;
            rep.witness_eta = net.states[i];
            rep.witness_delta_h = vals[i];
            rep.borderline.clear();
            return rep;
        }
        if (vals[i] < rep.radius) rep.borderline.push_back(net.states[i]);
    }
    rep.verdict = rep.borderline.empty() ? Verdict::Feasible : Verdict::Borderline;
    if (rep.verdict == Verdict::Borderline) rep.note = "some net states have 0 <= dH < r(eps); resource top-up case not constructed";
    return rep;
}

FeasibilityReport smoothed_check(const CMatrix& rho, const CMatrix& sigma, const InterconversionSetting& s, double eps, uint64_t seed,
                                 int threads) {
    if (!(eps > 0.0)) throw std::invalid_argument("smoothed_check: epsilon must be positive");
    return smoothed_check(rho, sigma, s, generate_epsilon_net(s.out().dim(), std::min(eps, 1.0), seed), threads);
}

LocalProbeReport local_min_probe(const CMatrix& rho, const CMatrix& sigma, const InterconversionSetting& s, double radius, int count,
                                 uint64_t seed, int threads) {
    if (!(radius > 0.0) || radius > 1.0) throw std::invalid_argument("local_min_probe: radius must lie in (0, 1] so every probe is a state");
    SurfaceSpec spec;
    spec.kind = SurfaceKind::InfinityShell;
    spec.radius = radius;
    spec.sampler = SamplerKind::UniformRandom;
    spec.count = count;
    spec.seed = seed;
    const std::vector<CMatrix> etas = surface_samples(spec, s.out().dim());
    const auto vals = parallel_map(etas.size(), threads, [&](size_t i) {
        return phi_eta(etas[i], rho, s.phi()).phi - phi_eta(etas[i], sigma, s.phi()).phi;
    });
    LocalProbeReport rep;
    rep.count = etas.size();
    rep.min_delta_phi = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < vals.size(); ++i) {
        if (vals[i] / radius < rep.min_delta_phi) {
            rep.min_delta_phi = vals[i] / radius;
            rep.argmin_eta = etas[i];
        }
    }
    rep.nonnegative = rep.min_delta_phi * radius >= -1e-9;
    return rep;
}

}  // namespace covasym
