#pragma once

#include "fracflow/core.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fracflow {

struct JumpLaw {
    enum class Kind { FixedVector, FoldedGaussian, UserTable };
    Kind kind = Kind::FixedVector;
    // fixed-vector
    Vec vector;
    // folded-gaussian-rademacher: S ~ inverse gamma (shape beta, scale r), W_j = |N(0,2S)|, Y = eps W, P(eps=+1)=p
    double beta = 1.0;
    double r = 1.0;
    double p = 0.5;
    // user-table: atoms with probabilities
    std::vector<Vec> atoms;
    std::vector<double> weights;

    static JumpLaw fixed(Vec v);
    static JumpLaw folded_gaussian(double beta, double r, double p);
    static JumpLaw table(std::vector<Vec> atoms, std::vector<double> weights);
    void validate(std::size_t d) const;
};

std::string to_string(JumpLaw::Kind kind);
JumpLaw::Kind parse_jump_kind(const std::string& name);

// Scalar jump maps tau: R^d -> R_+ usable by name in configs.
enum class TauMap { One, Identity, AbsSum, Norm };
std::string to_string(TauMap tau);
TauMap parse_tau(const std::string& name);
double apply_tau(TauMap tau, const double* y, std::size_t d);

struct ProcessDescriptor {
    // advection | subordinated-bm | compound-poisson | subordinated-cp | compensated-levy | fp
    std::string process;
    std::size_t d = 1;
    Frame frame = Frame::canonical(1);
    Vec u;
    Vec theta;
    double alpha = 1.0;
    double lambda = 0.0;
    double t = 0.0;
    JumpLaw jump;
    std::optional<TauMap> tau;
};

struct Ensemble {
    std::size_t dim = 1;
    std::vector<double> points;  // n x dim, row-major
    double t = 0.0;
    std::uint64_t seed = 0;
    ProcessDescriptor descriptor;

    std::size_t size() const { return dim ? points.size() / dim : 0; }
    const double* point(std::size_t i) const { return points.data() + i * dim; }
};

// Z_t = sum_l theta_l H_l(lambda_l t), lambda_l = u.theta_l
Ensemble simulate_advection_process(const Frame& frame, const Vec& u, double alpha, double t, std::size_t n,
                                    std::uint64_t seed, std::size_t threads = 0);
// theta B(H_t), Var B(s) = 2s
Ensemble simulate_subordinated_bm(const Vec& theta, double alpha, double t, std::size_t n, std::uint64_t seed,
                                  std::size_t threads = 0);
// X_t = sum_{i <= N(t)} Y_i, or sum tau(Y_i) (scalar) when tau is given
Ensemble simulate_compound_poisson(double lambda, const JumpLaw& jump, std::size_t d, double t, std::size_t n,
                                   std::uint64_t seed, std::optional<TauMap> tau = std::nullopt,
                                   std::size_t threads = 0);
// Z_t = sum_j theta_j H_j(X_t), X_t = sum_{i <= N(t)} tau(Y_i) drawn once per sample
Ensemble simulate_subordinated_cp(const Frame& frame, double alpha, double lambda, const JumpLaw& jump, TauMap tau,
                                  double t, std::size_t n, std::uint64_t seed, std::size_t threads = 0);
// Z_t = sum_{j <= N(t)} Y_j - sum_l theta_l (theta_l.EY)^{1/alpha} H_l(lambda t) chi_D
Ensemble simulate_compensated_levy(const Frame& frame, double alpha, double lambda, const JumpLaw& jump, double t,
                                   std::size_t n, std::uint64_t seed, std::size_t threads = 0);
// Y_t = (1,...,1) N_t + sum_j theta_j H_j((theta_j.u) t)
Ensemble simulate_fp_process(const Frame& frame, const Vec& u, double alpha, double lambda, double t, std::size_t n,
                             std::uint64_t seed, std::size_t threads = 0);
// n x d samples of the folded-Gaussian / Rademacher jump
std::vector<double> sample_folded_gaussian_jump(double beta, double r, double p, std::size_t d, std::size_t n,
                                                std::uint64_t seed, std::size_t threads = 0);
// Process constructor by descriptor.
Ensemble simulate(const ProcessDescriptor& desc, std::size_t n, std::uint64_t seed, std::size_t threads = 0);

// Jump law moments and transforms, by quadrature where needed.
Vec jump_mean(const JumpLaw& jump, std::size_t d);
// E|N(0,2S)| for the inverse-gamma mixture; infinite for beta <= 1/2 (DomainError).
double folded_gaussian_mean_magnitude(double beta, double r);
cplx jump_cf(const JumpLaw& jump, std::size_t d, const Vec& k);
// E exp(-z tau(Y)) for Re z >= 0
cplx tau_laplace(const JumpLaw& jump, std::size_t d, TauMap tau, cplx z);
// Density of one magnitude W on the positive orthant (d components): C_d(beta) r^beta (|y|^2 + 4r)^{-beta-d/2}
double folded_gaussian_density(const Vec& y, double beta, double r);
double folded_gaussian_constant(double beta, std::size_t d);
// Compensator switch: true iff theta_l.EY > 0 for every l.
bool compensator_active(const Frame& frame, const Vec& mean);

struct MultiplierOptions {
    double tol = 1e-10;
    std::size_t max_blocks = 4000;
};

// Phi_r(k) = int_{R_+^d} [p e^{ik.y} + q e^{-ik.y} - 1 - (p-q) sum_l (-ik.theta_l)^alpha (theta_l.y) chi_D(y)] m_r dy, d <= 2.
cplx levy_khinchine_multiplier(const Vec& k, const Frame& frame, double alpha, double beta, double r, double p,
                               const MultiplierOptions& opt = {});
// r -> 0 limit of r^{-beta} Phi_r(k): same bracket against C_d(beta) |y|^{-2beta-d}.
cplx levy_khinchine_limit(const Vec& k, const Frame& frame, double alpha, double beta, double p,
                          const MultiplierOptions& opt = {});
// Closed form of the limit for p = q in d = 1: -C_1(beta) pi / (2 Gamma(1+2beta) sin(pi beta)) |k|^{2beta}.
double levy_khinchine_limit_closed_form_1d(double k, double beta);

}  // namespace fracflow
