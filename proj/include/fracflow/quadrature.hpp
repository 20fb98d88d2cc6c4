#pragma once

#include <functional>
#include <vector>

namespace fracflow::quad {

using Fn = std::function<double(double)>;

// Adaptive Gauss-Kronrod (61 points) on [a,b]. err receives the error estimate.
double gauss_kronrod(const Fn& f, double a, double b, double tol = 1e-12, double* err = nullptr,
                     unsigned max_depth = 18);
// Tanh-sinh on [a,b]; tolerates endpoint singularities.
double tanh_sinh(const Fn& f, double a, double b, double tol = 1e-12, double* err = nullptr);
// Exp-sinh on [a, inf).
double exp_sinh(const Fn& f, double a, double tol = 1e-12, double* err = nullptr);

// Wynn epsilon extrapolation of a sequence of partial sums.
double wynn_epsilon(const std::vector<double>& partial_sums);

// Hurwitz zeta sum_{n>=0} (n+q)^{-s}, s > 1, q > 0.
double hurwitz_zeta(double s, double q);
// Dawson integral D(x) = e^{-x^2} int_0^x e^{t^2} dt.
double dawson(double x);

}  // namespace fracflow::quad
