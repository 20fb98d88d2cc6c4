#pragma once

#include "fracflow/core.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace fracflow {

// All solvers multiply the spectrum by the exact propagator; there is no time stepping.
// The box must be large enough that wrap-around mass stays negligible.

// lambda_l = u.theta_l; throws InstabilityError if any is negative.
Vec frame_speeds(const Frame& frame, const Vec& u);

cplx advection_propagator(const Vec& k, const Frame& frame, const Vec& speeds, double alpha, double t);

// rho_hat = f_hat prod_l exp(-t lambda_l (-ik.theta_l)^alpha), alpha in (0,1].
ScalarField solve_advection(const ScalarField& f0, const Frame& frame, const Vec& u, double alpha, double t);
// Advection of the band-limited delta.
ScalarField greens_function(const Frame& frame, const Vec& u, double alpha, double t, const Grid& grid);

// exp(t sum_l (-ik.theta_l)^beta), beta in (1,2).
ScalarField solve_dispersion(const ScalarField& f0, const Frame& frame, double beta, double t);
ScalarField solve_fade(const ScalarField& f0, const Frame& frame, const Vec& u, double alpha, double beta, double t);

// exp(-t |k.theta|^{2 alpha}), alpha in (0,1].
ScalarField solve_heat_directional(const ScalarField& f0, const Direction& theta, double alpha, double t);
// int h_alpha(s,t) exp(-s (k.theta)^2) ds per mode, i.e. Gaussian smoothing along theta with
// variance 2s averaged over the subordinator.
ScalarField solve_heat_directional_subordination(const ScalarField& f0, const Direction& theta, double alpha,
                                                 double t);
// Laplace transform of h_alpha(., t) at q >= 0, by quadrature.
double subordinated_heat_multiplier(double alpha, double t, double q);

// Basis families for random initial data: "fourier" (exactly orthonormal on the grid) and
// "hermite" (Hermite functions, orthonormal on R^d; approximately on the grid).
std::vector<ScalarField> random_ic_basis(const std::string& family, std::size_t count, const Grid& grid);
// Largest |<phi_i,phi_j> - delta_ij| on the grid.
double basis_orthonormality_defect(const std::vector<ScalarField>& basis);
// sum_j c_j solve_advection(phi_j); warns when the basis is not orthonormal within 1e-6.
ScalarField solve_random_ic(const std::vector<double>& coeffs, const std::vector<ScalarField>& basis,
                            const Frame& frame, const Vec& u, double alpha, double t);
ScalarField solve_random_ic(const std::vector<double>& coeffs, const std::string& family, const Grid& grid,
                            const Frame& frame, const Vec& u, double alpha, double t);

// ceil(lt + 12 sqrt(lt) + 20)
std::size_t poisson_truncation(double lambda_t);
// Poisson-weighted sum of advection solutions shifted by m(1,...,1), m = 0..m_max.
// m_max = 0 selects poisson_truncation(lambda t); throws TruncationError if a shift does not fit the box.
ScalarField solve_fp_transport(const ScalarField& f0, const Frame& frame, const Vec& u, double alpha, double lambda,
                               double t, std::size_t m_max = 0);

enum class SolveKind { Advection, Fade, HeatDirectional, FpTransport };
SolveKind parse_solve_kind(const std::string& name);
std::string to_string(SolveKind kind);

struct SolveSpec {
    SolveKind kind = SolveKind::Advection;
    Frame frame = Frame::canonical(1);
    Vec u;
    double alpha = 1.0;
    std::optional<double> beta;
    double lambda = 0.0;
    double t = 0.0;
    // heat-directional only; defaults to the first frame direction
    std::optional<Vec> theta;
    // heat-directional only: use the subordination quadrature instead of the spectral symbol
    bool subordination = false;
};

ScalarField solve(const SolveSpec& spec, const ScalarField& initial);

}  // namespace fracflow
