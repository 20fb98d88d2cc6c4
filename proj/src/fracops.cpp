#include "fracflow/fracops.hpp"

#include "fracflow/error.hpp"
#include "fracflow/quadrature.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fracflow {

VectorField::VectorField(Grid g, std::vector<ScalarField> comps) : grid(std::move(g)), components(std::move(comps))
{
    for (const auto& c : components)
        if (c.grid != grid) throw DimensionError("vector field components must share one grid");
}

cplx spectral_symbol(double beta, double zeta)
{
    if (zeta == 0.0) return beta == 0.0 ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
    if (beta == 1.0) return cplx(0.0, -zeta);
    if (beta == 2.0) return cplx(-zeta * zeta, 0.0);
    const double sgn = zeta > 0.0 ? 1.0 : -1.0;
    return std::polar(std::pow(std::abs(zeta), beta), -0.5 * kPi * beta * sgn);
}

cplx spectral_symbol(double beta, const Direction& theta, const Vec& k) { return spectral_symbol(beta, theta.dot(k)); }

namespace {

void require_order(double beta, double lo, double hi, bool lo_open, bool hi_open, const char* what)
{
    const bool ok_lo = lo_open ? beta > lo : beta >= lo;
    const bool ok_hi = hi_open ? beta < hi : beta <= hi;
    if (!(ok_lo && ok_hi))
        throw OrderError(std::string(what) + ": order " + std::to_string(beta) + " outside " +
                         (lo_open ? "(" : "[") + std::to_string(lo) + "," + std::to_string(hi) + (hi_open ? ")" : "]"));
}

void require_dim(const Grid& g, std::size_t d, const char* what)
{
    if (g.dim() != d)
        throw DimensionError(std::string(what) + ": dimension " + std::to_string(g.dim()) + " does not match " +
                             std::to_string(d));
}

Vec along(const Vec& x, const Direction& theta, double s)
{
    Vec y = x;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += s * theta[i];
    return y;
}

}  // namespace

// ---------------------------------------------------------------- Marchaud

double directional_derivative_marchaud(const PointFn& f, const Vec& x, const Direction& theta, double beta,
                                       const MarchaudOptions& opt)
{
    require_order(beta, 0.0, 1.0, true, true, "directional_derivative_marchaud");
    if (x.size() != theta.dim()) throw DimensionError("marchaud: point and direction dimensions differ");
    auto phi = [&](double s) { return f(along(x, theta, s)); };
    const double f0 = phi(0.0);

    double d1;
    if (opt.directional_gradient) {
        d1 = opt.directional_gradient(x);
    } else {
        const double h = 1e-3;
        d1 = (phi(-2 * h) - 8 * phi(-h) + 8 * phi(h) - phi(2 * h)) / (12 * h);
    }
    const double h2 = 5e-3;
    const double d2 = (-phi(2 * h2) + 16 * phi(h2) - 30 * f0 + 16 * phi(-h2) - phi(-2 * h2)) / (12 * h2 * h2);
    const double h3 = 1e-2;
    const double d3 = (phi(2 * h3) - 2 * phi(h3) + 2 * phi(-h3) - phi(-2 * h3)) / (2 * h3 * h3 * h3);

    // f(x) - f(x - s theta) = s d1 - s^2 d2/2 + s^3 d3/6 + ...
    const double s1 = 1e-3;
    double near = -0.5 * d2 * std::pow(s1, 2.0 - beta) / (2.0 - beta) + d3 / 6.0 * std::pow(s1, 3.0 - beta) / (3.0 - beta);
    near += quad::gauss_kronrod([&](double s) { return (f0 - phi(-s) - s * d1) * std::pow(s, -beta - 1.0); }, s1, 1.0,
                                opt.tol);
    near += d1 / (1.0 - beta);

    double tail = 0.0;
    if (opt.period > 0.0) {
        const double P = opt.period;
        tail = quad::gauss_kronrod(
            [&](double sig) {
                return phi(-(1.0 + sig)) * std::pow(P, -beta - 1.0) * quad::hurwitz_zeta(beta + 1.0, (1.0 + sig) / P);
            },
            0.0, P, opt.tol);
    } else {
        // f may settle to a constant far along -theta; that part integrates exactly.
        const double far = phi(-std::min(opt.max_extent, 1e8));
        const double c = std::isfinite(far) ? far : 0.0;
        tail = c / beta;
        double a = 1.0;
        for (;;) {
            const double b = 2.0 * a;
            const double blk = quad::gauss_kronrod([&](double s) { return (phi(-s) - c) * std::pow(s, -beta - 1.0); },
                                                   a, b, opt.tol);
            if (!std::isfinite(blk)) throw QuadratureError("marchaud: tail integrand is not finite");
            tail += blk;
            double sup = 0.0;
            for (int j = 0; j <= 32; ++j) sup = std::max(sup, std::abs(phi(-(a + (b - a) * j / 32.0)) - c));
            if (!std::isfinite(sup)) throw QuadratureError("marchaud: f is not finite along the tail");
            const double bound = sup * std::pow(b, -beta) / beta;
            if (bound < opt.tol) break;
            a = b;
            if (a > opt.max_extent)
                throw QuadratureError("marchaud: tail did not converge by s = " + std::to_string(opt.max_extent) +
                                      " (remainder bound " + std::to_string(bound) +
                                      "); f must decay along -theta or be declared periodic");
        }
    }
    return beta / std::tgamma(1.0 - beta) * (near + f0 / beta - tail);
}

// ---------------------------------------------------------------- spectral operators

ScalarField apply_directional_fractional(const ScalarField& f, const Direction& theta, double beta)
{
    require_order(beta, 0.0, 2.0, true, false, "apply_directional_fractional");
    require_dim(f.grid, theta.dim(), "apply_directional_fractional");
    return apply_symbol(f, [&](const Vec& k) { return spectral_symbol(beta, theta, k); });
}

VectorField fractional_gradient(const ScalarField& f, const Frame& frame, double beta)
{
    require_order(beta, 0.0, 1.0, true, false, "fractional_gradient");
    require_dim(f.grid, frame.dim(), "fractional_gradient");
    const std::size_t d = frame.dim();
    const SpectralField F = fourier_forward(f);
    std::vector<ScalarField> comps;
    comps.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
        SpectralField G = F;
        multiply_symbol(G, [&](const Vec& k) {
            cplx s(0.0, 0.0);
            for (std::size_t l = 0; l < d; ++l)
                if (frame[l][i] != 0.0) s += frame[l][i] * spectral_symbol(beta, frame[l], k);
            return s;
        });
        comps.push_back(fourier_inverse(G));
    }
    return VectorField(f.grid, std::move(comps));
}

ScalarField fractional_divergence(const VectorField& u, const Frame& frame, double beta)
{
    require_order(beta, 0.0, 1.0, true, false, "fractional_divergence");
    require_dim(u.grid, frame.dim(), "fractional_divergence");
    const std::size_t d = frame.dim();
    if (u.components.size() != d) throw DimensionError("fractional_divergence: component count differs from d");
    SpectralField acc(u.grid);
    for (std::size_t i = 0; i < d; ++i) {
        SpectralField G = fourier_forward(u.components[i]);
        multiply_symbol(G, [&](const Vec& k) {
            cplx s(0.0, 0.0);
            for (std::size_t l = 0; l < d; ++l)
                if (frame[l][i] != 0.0) s += frame[l][i] * spectral_symbol(beta, frame[l], k);
            return s;
        });
        for (std::size_t j = 0; j < acc.values.size(); ++j) acc.values[j] += G.values[j];
    }
    return fourier_inverse(acc);
}

ScalarField directional_operator(const ScalarField& f, const Frame& frame, double beta)
{
    require_order(beta, 1.0, 2.0, true, false, "directional_operator");
    require_dim(f.grid, frame.dim(), "directional_operator");
    return apply_symbol(f, [&](const Vec& k) {
        cplx s(0.0, 0.0);
        for (const auto& th : frame.directions()) s += spectral_symbol(beta, th, k);
        return s;
    });
}

ScalarField riesz_derivative_1d(const ScalarField& f, double order)
{
    require_order(order, 0.0, 2.0, true, false, "riesz_derivative_1d");
    require_dim(f.grid, 1, "riesz_derivative_1d");
    return apply_symbol(f, [&](const Vec& k) {
        const double a = std::abs(k[0]);
        return cplx(order == 2.0 ? -a * a : -std::pow(a, order), 0.0);
    });
}

ScalarField fractional_power_directional_second(const ScalarField& f, const Direction& theta, double alpha)
{
    require_order(alpha, 0.0, 1.0, true, false, "fractional_power_directional_second");
    require_dim(f.grid, theta.dim(), "fractional_power_directional_second");
    return apply_symbol(f, [&](const Vec& k) {
        const double a = std::abs(theta.dot(k));
        return cplx(alpha == 1.0 ? -a * a : -std::pow(a, 2.0 * alpha), 0.0);
    });
}

// ---------------------------------------------------------------- Grunwald-Letnikov

std::vector<double> gl_weights(double beta, std::size_t count)
{
    std::vector<double> w(count);
    if (count == 0) return w;
    w[0] = 1.0;
    for (std::size_t j = 1; j < count; ++j) w[j] = w[j - 1] * (static_cast<double>(j) - 1.0 - beta) / static_cast<double>(j);
    return w;
}

namespace {

ScalarField gl_impl(const ScalarField& f, std::size_t axis, double beta, bool reversed)
{
    const Grid& g = f.grid;
    if (axis >= g.dim()) throw DimensionError("directional_derivative_gl: axis out of range");
    if (!(beta > 0.0 && beta < 2.0))
        throw OrderError("directional_derivative_gl: order must lie in (0,1) u (1,2) or equal 1");
    const std::size_t n = g.n(axis);
    const long p = beta > 1.0 ? 1 : 0;

    // Fold the weights onto one period; the truncated tail is spread evenly so the kernel sums to 0.
    const std::size_t J = std::max<std::size_t>(64 * n, 1 << 16);
    const auto w = gl_weights(beta, J);
    std::vector<double> c(n, 0.0);
    double total = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
        const long m = ((static_cast<long>(j) - p) % static_cast<long>(n) + static_cast<long>(n)) % static_cast<long>(n);
        c[static_cast<std::size_t>(m)] += w[j];
        total += w[j];
    }
    if (beta != 1.0)
        for (double& v : c) v -= total / static_cast<double>(n);

    const double scale = std::pow(g.dx(axis), -beta);
    const std::size_t stride = g.stride(axis);
    ScalarField out(g);
    std::vector<double> line(n), res(n);
    for (std::size_t base = 0; base < g.size(); ++base) {
        if ((base / stride) % n != 0) continue;  // first point of each line along axis
        for (std::size_t i = 0; i < n; ++i) line[i] = f.values[base + i * stride];
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t m = 0; m < n; ++m) {
                if (c[m] == 0.0) continue;
                const std::size_t idx = reversed ? (i + m) % n : (i + n - m) % n;
                s += c[m] * line[idx];
            }
            res[i] = s * scale;
        }
        for (std::size_t i = 0; i < n; ++i) out.values[base + i * stride] = res[i];
    }
    return out;
}

}  // namespace

ScalarField directional_derivative_gl(const ScalarField& f, std::size_t axis, double beta)
{
    return gl_impl(f, axis, beta, false);
}

ScalarField directional_derivative_gl(const ScalarField& f, const Direction& theta, double beta)
{
    require_dim(f.grid, theta.dim(), "directional_derivative_gl");
    for (std::size_t i = 0; i < theta.dim(); ++i)
        if (std::abs(std::abs(theta[i]) - 1.0) <= 1e-14) return gl_impl(f, i, beta, theta[i] < 0.0);
    throw UnsupportedDirectionError("directional_derivative_gl: only coordinate directions are supported");
}

// ---------------------------------------------------------------- hypersingular form

double hypersingular_constant(double alpha)
{
    require_order(alpha, 0.0, 1.0, true, true, "hypersingular_constant");
    if (alpha == 0.5) return 1.0 / kPi;  // Gamma(2) sin(pi/2) / pi
    return std::tgamma(2.0 * alpha + 1.0) * std::sin(kPi * alpha) / kPi;
}

double hypersingular_directional_second(const RealFn& f, double x, double alpha, const HypersingularOptions& opt)
{
    const double C = hypersingular_constant(alpha);
    const double a2 = 2.0 * alpha;
    const double y0 = opt.y0;
    const double f0 = f(x);
    const double h = 5e-3;
    const double d2 = (-f(x + 2 * h) + 16 * f(x + h) - 30 * f0 + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
    const double h4 = 2e-2;
    const double d4 = (f(x + 2 * h4) - 4 * f(x + h4) + 6 * f0 - 4 * f(x - h4) + f(x - 2 * h4)) / std::pow(h4, 4);

    // f(x+y) + f(x-y) - 2 f(x) = y^2 f'' + y^4 f''''/12 + ...
    double I = d2 * std::pow(y0, 2.0 - a2) / (2.0 - a2) + d4 * std::pow(y0, 4.0 - a2) / (12.0 * (4.0 - a2));
    I -= 2.0 * f0 * std::pow(y0, -a2) / a2;

    auto g = [&](double y) { return (f(x + y) + f(x - y)) * std::pow(y, -a2 - 1.0); };
    if (opt.support > 0.0) {
        if (opt.support > y0) {
            // split at 1 when the range is wide so the y^{-2a-1} weight is resolved
            if (opt.support > 1.0 && y0 < 1.0)
                I += quad::gauss_kronrod(g, y0, 1.0, opt.tol) + quad::gauss_kronrod(g, 1.0, opt.support, opt.tol);
            else
                I += quad::gauss_kronrod(g, y0, opt.support, opt.tol);
        }
    } else {
        I += quad::gauss_kronrod(g, y0, 1.0, opt.tol);
        double a = 1.0;
        for (;;) {
            const double b = 2.0 * a;
            I += quad::gauss_kronrod(g, a, b, opt.tol);
            double sup = 0.0;
            for (int j = 0; j <= 32; ++j) {
                const double y = a + (b - a) * j / 32.0;
                sup = std::max(sup, std::abs(f(x + y)) + std::abs(f(x - y)));
            }
            if (!std::isfinite(sup)) throw QuadratureError("hypersingular: f is not finite along the tail");
            if (sup * std::pow(b, -a2) / a2 < opt.tol) break;
            a = b;
            if (a > 1e12) throw QuadratureError("hypersingular: tail did not converge; f must decay");
        }
    }
    return C * I;
}

// ---------------------------------------------------------------- fractional shift

double fractional_shift(const RealFn& f, double x, double shift, double alpha, double tol)
{
    require_order(alpha, 0.0, 1.0, true, false, "fractional_shift");
    if (!(shift >= 0.0)) throw DomainError("fractional_shift: shift must be >= 0");
    if (shift == 0.0) return f(x);
    if (alpha == 1.0) return f(x - shift);
    const double a = alpha;
    const double scale = std::pow(shift, 1.0 / a);
    // H_1 = sin(aU)/sin(U)^{1/a} (sin((1-a)U)/E)^{(1-a)/a}, U = pi w, E = -log v.
    // Refinement is capped: for oscillating f the far tail is never resolved, and
    // tanh-sinh already samples it with vanishing weight.
    thread_local boost::math::quadrature::tanh_sinh<double> ts(10);
    auto integrand = [&](double w, double v) {
        const double u = kPi * w;
        const double e = -std::log(v);
        const double h = std::sin(a * u) / std::pow(std::sin(u), 1.0 / a) *
                         std::pow(std::sin((1.0 - a) * u) / e, (1.0 - a) / a);
        const double y = x - scale * h;
        return std::isfinite(y) ? f(y) : 0.0;
    };
    auto inner = [&](double v) {
        return ts.integrate([&](double w) { return integrand(w, v); }, 0.0, 1.0, tol);
    };
    return ts.integrate(inner, 0.0, 1.0, tol);
}

ScalarField fractional_shift(const ScalarField& f, double shift, double alpha)
{
    require_order(alpha, 0.0, 1.0, true, false, "fractional_shift");
    require_dim(f.grid, 1, "fractional_shift");
    if (!(shift >= 0.0)) throw DomainError("fractional_shift: shift must be >= 0");
    return apply_symbol(f, [&](const Vec& k) { return std::exp(-shift * spectral_symbol(alpha, k[0])); });
}

}  // namespace fracflow
