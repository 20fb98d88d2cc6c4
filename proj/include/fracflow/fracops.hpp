#pragma once

#include "fracflow/core.hpp"

#include <functional>
#include <vector>

namespace fracflow {

struct VectorField {
    VectorField(Grid g, std::vector<ScalarField> comps);

    Grid grid;
    std::vector<ScalarField> components;
};

// (-i zeta)^beta = |zeta|^beta exp(-i pi beta sign(zeta) / 2); 0 at zeta = 0.
cplx spectral_symbol(double beta, double zeta);
cplx spectral_symbol(double beta, const Direction& theta, const Vec& k);

using PointFn = std::function<double(const Vec&)>;
using RealFn = std::function<double(double)>;

struct MarchaudOptions {
    double tol = 1e-10;
    // Period of s -> f(x - s theta); 0 means f is treated as non-periodic and must decay along -theta.
    double period = 0.0;
    // Optional exact directional derivative theta.grad f(x); a 5-point stencil is used otherwise.
    std::function<double(const Vec&)> directional_gradient;
    // Tail integration stops with QuadratureError past this distance.
    double max_extent = 1e12;
};

// (beta/Gamma(1-beta)) int_0^inf (f(x) - f(x - s theta)) s^{-beta-1} ds, beta in (0,1).
double directional_derivative_marchaud(const PointFn& f, const Vec& x, const Direction& theta, double beta,
                                       const MarchaudOptions& opt = {});

// Multiplier (-ik.theta)^beta, beta in (0,2].
ScalarField apply_directional_fractional(const ScalarField& f, const Direction& theta, double beta);

// Grunwald-Letnikov weights w_j = (-1)^j binom(beta, j).
std::vector<double> gl_weights(double beta, std::size_t count);
// Shifted GL sum along a coordinate axis on the periodic grid; beta in (0,1) u (1,2), or 1.
ScalarField directional_derivative_gl(const ScalarField& f, std::size_t axis, double beta);
// Same, but theta must be a coordinate direction (+e_i or -e_i).
ScalarField directional_derivative_gl(const ScalarField& f, const Direction& theta, double beta);

// sum_l theta_l (theta_l.grad)^beta f, beta in (0,1].
VectorField fractional_gradient(const ScalarField& f, const Frame& frame, double beta);
// sum_l (theta_l.grad)^beta (theta_l.u), beta in (0,1].
ScalarField fractional_divergence(const VectorField& u, const Frame& frame, double beta);
// sum_l (theta_l.grad)^beta f, beta in (1,2].
ScalarField directional_operator(const ScalarField& f, const Frame& frame, double beta);

// Multiplier -|k|^order on a d=1 field, order in (0,2].
ScalarField riesz_derivative_1d(const ScalarField& f, double order);
// -(-(theta.grad)^2)^alpha: multiplier -|k.theta|^{2 alpha}, alpha in (0,1].
ScalarField fractional_power_directional_second(const ScalarField& f, const Direction& theta, double alpha);

// C(alpha) = Gamma(2 alpha + 1) sin(pi alpha) / pi
double hypersingular_constant(double alpha);

struct HypersingularOptions {
    double tol = 1e-10;
    // Taylor expansion is used for y below this.
    double y0 = 1e-2;
    // f(x +- y) is assumed to vanish for y beyond this; 0 means integrate until negligible.
    double support = 0.0;
};

// C(alpha) int_0^inf (f(x+y) + f(x-y) - 2 f(x)) y^{-2 alpha - 1} dy for a 1-D function.
double hypersingular_directional_second(const RealFn& f, double x, double alpha,
                                        const HypersingularOptions& opt = {});

// E f(x - H_theta) with H the alpha-stable subordinator; nested quadrature over Kanter's representation.
double fractional_shift(const RealFn& f, double x, double shift, double alpha, double tol = 1e-9);
// Multiplier exp(-shift (-ik)^alpha) on a d=1 field.
ScalarField fractional_shift(const ScalarField& f, double shift, double alpha);

}  // namespace fracflow
