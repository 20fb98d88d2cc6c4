#include "fracflow/quadrature.hpp"

#include "fracflow/error.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_dawson.h>
#include <gsl/gsl_sf_zeta.h>

#include <cmath>
#include <limits>
#include <string>

namespace fracflow::quad {

double gauss_kronrod(const Fn& f, double a, double b, double tol, double* err, unsigned max_depth)
{
    double e = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, max_depth, tol, &e);
    if (err) *err = e;
    return v;
}

double tanh_sinh(const Fn& f, double a, double b, double tol, double* err)
{
    thread_local boost::math::quadrature::tanh_sinh<double> integrator;
    double e = 0.0, l1 = 0.0;
    const double v = integrator.integrate(f, a, b, tol, &e, &l1);
    if (err) *err = e;
    return v;
}

double exp_sinh(const Fn& f, double a, double tol, double* err)
{
    thread_local boost::math::quadrature::exp_sinh<double> integrator;
    double e = 0.0, l1 = 0.0;
    auto g = [&](double x) { return f(x); };
    const double v = integrator.integrate(g, a, std::numeric_limits<double>::infinity(), tol, &e, &l1);
    if (err) *err = e;
    return v;
}

double wynn_epsilon(const std::vector<double>& s)
{
    const std::size_t n = s.size();
    if (n == 0) return 0.0;
    if (n < 3) return s.back();
    // e[k] holds column k of the epsilon table for the current diagonal sweep
    std::vector<double> prev(n + 1, 0.0), cur(n + 1, 0.0), prev2(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prev[i] = s[i];
    std::vector<double> best;
    double estimate = s.back();
    for (std::size_t k = 1; k < n; ++k) {
        const std::size_t m = n - k;
        for (std::size_t i = 0; i < m; ++i) {
            const double diff = prev[i + 1] - prev[i];
            const double base = (k >= 2) ? prev2[i + 1] : 0.0;
            cur[i] = (diff == 0.0) ? std::numeric_limits<double>::infinity() : base + 1.0 / diff;
        }
        if (k % 2 == 0) {
            const double v = cur[m - 1];
            if (std::isfinite(v)) estimate = v;
        }
        prev2 = prev;
        prev = cur;
        if (m <= 1) break;
    }
    return estimate;
}

double hurwitz_zeta(double s, double q)
{
    if (!(s > 1.0) || !(q > 0.0)) throw DomainError("hurwitz_zeta requires s > 1 and q > 0");
    gsl_sf_result r;
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    const int status = gsl_sf_hzeta_e(s, q, &r);
    gsl_set_error_handler(old);
    if (status != GSL_SUCCESS) throw QuadratureError(std::string("hurwitz_zeta: ") + gsl_strerror(status));
    return r.val;
}

double dawson(double x) { return gsl_sf_dawson(x); }

}  // namespace fracflow::quad
