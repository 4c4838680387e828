#pragma once

#include "covasym/min_entropy.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace covasym {

enum class Verdict { Feasible, Infeasible, Borderline, Inconclusive };

const char* verdict_name(Verdict v);

struct FeasibilityReport {
    Verdict verdict = Verdict::Inconclusive;
    std::string method;  // choi, surface, smoothed
    std::optional<CovariantChannel> channel;       // Feasible from the Choi oracle
    std::optional<CMatrix> witness_eta;            // Infeasible from a reference state
    double witness_delta_h = 0.0;
    std::vector<CMatrix> borderline;               // net states with 0 <= dH < r(eps)
    double min_delta_h = 0.0;
    double phase1_value = 0.0;                     // max_J lambda_min(J); t* = -phase1_value
    double linear_residual = 0.0;
    double radius = 0.0;                           // r(eps) for smoothed checks
    size_t evaluated = 0;
    std::string note;
};

// Interconversion from system A (rep_in) to system B (rep_out), with the reference carrying dual(rep_out).
class InterconversionSetting {
public:
    InterconversionSetting(const Representation& in, const Representation& out);

    const Representation& in() const { return in_; }
    const Representation& out() const { return out_; }
    const JointSetting& phi() const { return phi_; }
    // Twirl for Choi operators on H_A (x) H_B under conj(U_A) (x) U_B.
    const TwirlChannel& choi_twirl() const { return *choi_tw_; }

private:
    Representation in_;
    Representation out_;
    JointSetting phi_;
    std::shared_ptr<const TwirlChannel> choi_tw_;
};

struct ChoiOptions {
    double tol = 1e-8;
    double linear_tol = 1e-8;
};

FeasibilityReport choi_feasibility(const CMatrix& rho, const CMatrix& sigma, const InterconversionSetting& s, const ChoiOptions& opts = {});

enum class SurfaceKind { InfinityShell, FrobeniusSphere };
enum class SamplerKind { DeterministicNet, UniformRandom };

struct SurfaceSpec {
    SurfaceKind kind = SurfaceKind::InfinityShell;
    double radius = 1.0;
    SamplerKind sampler = SamplerKind::UniformRandom;
    double epsilon = 0.1;   // DeterministicNet
    int count = 64;         // UniformRandom
    uint64_t seed = 1;
};

// Reference states eta = (1 + radius * A)/d on the chosen surface, A traceless.
std::vector<CMatrix> surface_samples(const SurfaceSpec& spec, int d);

FeasibilityReport surface_check(const CMatrix& rho, const CMatrix& sigma, const InterconversionSetting& s, const SurfaceSpec& spec,
                                int threads = 1);

class NetTooLarge : public std::runtime_error {
public:
    NetTooLarge(const std::string& msg, double bound) : std::runtime_error(msg), cardinality_bound(bound) {}
    double cardinality_bound;
};

struct EpsilonNet {
    int d = 0;
    double epsilon = 0.0;
    double cardinality_bound = 0.0;   // (1 + 1/eps)^(d^2 - 1)
    std::vector<CMatrix> directions;  // traceless, ||A||_inf = 1
    std::vector<CMatrix> states;      // (1 + A)/d
};

// Net on the shell (1 + A)/d, ||A||_inf = 1, with covering radius eps in generalized trace distance.
EpsilonNet generate_epsilon_net(int d, double eps, uint64_t seed = 1, size_t candidate_budget = 20000000);

// 2 d_R^2 eps / ln 2
double smoothing_radius(int d_r, double eps);

FeasibilityReport smoothed_check(const CMatrix& rho, const CMatrix& sigma, const InterconversionSetting& s, const EpsilonNet& net,
                                 int threads = 1);
FeasibilityReport smoothed_check(const CMatrix& rho, const CMatrix& sigma, const InterconversionSetting& s, double eps,
                                 uint64_t seed = 1, int threads = 1);

struct LocalProbeReport {
    double min_delta_phi = 0.0;    // min over sampled directions of Phi_eta(rho) - Phi_eta(sigma), divided by radius
    bool nonnegative = true;
    CMatrix argmin_eta;
    size_t count = 0;
};

LocalProbeReport local_min_probe(const CMatrix& rho, const CMatrix& sigma, const InterconversionSetting& s, double radius, int count,
                                 uint64_t seed = 7, int threads = 1);

}  // namespace covasym
