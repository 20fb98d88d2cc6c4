#include "fracflow/solvers.hpp"

#include "fracflow/error.hpp"
#include "fracflow/fracops.hpp"
#include "fracflow/quadrature.hpp"
#include "fracflow/stable.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

namespace fracflow {

namespace {

void require_time(double t)
{
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be finite and >= 0");
}

void require_alpha(double alpha, const char* what)
{
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw OrderError(std::string(what) + ": alpha must lie in (0,1], got " + std::to_string(alpha));
}

void require_dim(const Grid& g, std::size_t d, const char* what)
{
    if (g.dim() != d) throw DimensionError(std::string(what) + ": grid dimension does not match the frame");
}

}  // namespace

Vec frame_speeds(const Frame& frame, const Vec& u)
{
    if (u.size() != frame.dim()) throw DimensionError("velocity dimension does not match the frame");
    for (double v : u)
        if (!std::isfinite(v)) throw DomainError("velocity entries must be finite");
    const double scale = std::max(1.0, norm(u));
    Vec lam(frame.dim());
    for (std::size_t l = 0; l < frame.dim(); ++l) {
        double s = frame[l].dot(u);
        if (s < 0.0) {
            if (s > -1e-12 * scale) {
                s = 0.0;
            } else {
                throw InstabilityError("u.theta_" + std::to_string(l + 1) + " = " + std::to_string(s) +
                                       " is negative; the propagator would grow without bound");
            }
        }
        lam[l] = s;
    }
    return lam;
}

cplx advection_propagator(const Vec& k, const Frame& frame, const Vec& speeds, double alpha, double t)
{
    cplx e(0.0, 0.0);
    for (std::size_t l = 0; l < frame.dim(); ++l)
        if (speeds[l] != 0.0) e += speeds[l] * spectral_symbol(alpha, frame[l], k);
    return std::exp(-t * e);
}

ScalarField solve_advection(const ScalarField& f0, const Frame& frame, const Vec& u, double alpha, double t)
{
    require_alpha(alpha, "solve_advection");
    require_time(t);
    require_dim(f0.grid, frame.dim(), "solve_advection");
    const Vec lam = frame_speeds(frame, u);
    if (t == 0.0) return f0;
    return apply_symbol(f0, [&](const Vec& k) { return advection_propagator(k, frame, lam, alpha, t); });
}

ScalarField greens_function(const Frame& frame, const Vec& u, double alpha, double t, const Grid& grid)
{
    return solve_advection(delta_field(grid), frame, u, alpha, t);
}

ScalarField solve_dispersion(const ScalarField& f0, const Frame& frame, double beta, double t)
{
    if (!(beta > 1.0 && beta < 2.0)) throw OrderError("dispersion order beta must lie in (1,2), got " + std::to_string(beta));
    require_time(t);
    require_dim(f0.grid, frame.dim(), "solve_dispersion");
    if (t == 0.0) return f0;
    return apply_symbol(f0, [&](const Vec& k) {
        cplx e(0.0, 0.0);
        for (const auto& th : frame.directions()) e += spectral_symbol(beta, th, k);
        return std::exp(t * e);
    });
}

ScalarField solve_fade(const ScalarField& f0, const Frame& frame, const Vec& u, double alpha, double beta, double t)
{
    require_alpha(alpha, "solve_fade");
    if (!(beta > 1.0 && beta < 2.0)) throw OrderError("fade: beta must lie in (1,2), got " + std::to_string(beta));
    require_time(t);
    require_dim(f0.grid, frame.dim(), "solve_fade");
    const Vec lam = frame_speeds(frame, u);
    if (t == 0.0) return f0;
    return apply_symbol(f0, [&](const Vec& k) {
        cplx e(0.0, 0.0);
        for (std::size_t l = 0; l < frame.dim(); ++l) {
            if (lam[l] != 0.0) e -= lam[l] * spectral_symbol(alpha, frame[l], k);
            e += spectral_symbol(beta, frame[l], k);
        }
        return std::exp(t * e);
    });
}

ScalarField solve_heat_directional(const ScalarField& f0, const Direction& theta, double alpha, double t)
{
    require_alpha(alpha, "solve_heat_directional");
    require_time(t);
    require_dim(f0.grid, theta.dim(), "solve_heat_directional");
    if (t == 0.0) return f0;
    return apply_symbol(f0, [&](const Vec& k) {
        const double z = std::abs(theta.dot(k));
        return cplx(std::exp(-t * (alpha == 1.0 ? z * z : std::pow(z, 2.0 * alpha))), 0.0);
    });
}

double subordinated_heat_multiplier(double alpha, double t, double q)
{
    require_alpha(alpha, "subordinated_heat_multiplier");
    if (!(q >= 0.0)) throw DomainError("subordinated_heat_multiplier: q must be >= 0");
    if (q == 0.0 || t == 0.0) return 1.0;
    if (alpha == 1.0) return std::exp(-t * q);
    // H_t = t^{1/alpha} H_1
    const StableLaw law(alpha);
    const double c = std::pow(t, 1.0 / alpha) * q;
    return quad::exp_sinh([&](double s) { return s > 0.0 ? stable_density(law, s) * std::exp(-c * s) : 0.0; }, 0.0,
                          1e-10);
}

ScalarField solve_heat_directional_subordination(const ScalarField& f0, const Direction& theta, double alpha,
                                                 double t)
{
    require_alpha(alpha, "solve_heat_directional_subordination");
    require_time(t);
    require_dim(f0.grid, theta.dim(), "solve_heat_directional_subordination");
    if (t == 0.0) return f0;
    std::map<double, double> cache;
    return apply_symbol(f0, [&](const Vec& k) {
        const double z = theta.dot(k);
        const double q = z * z;
        auto it = cache.find(q);
        if (it != cache.end()) return cplx(it->second, 0.0);
        const double m = subordinated_heat_multiplier(alpha, t, q);
        cache.emplace(q, m);
        return cplx(m, 0.0);
    });
}

// ---------------------------------------------------------------- random initial data

namespace {

// Hermite functions psi_0..psi_{n-1} at x, orthonormal on R.
std::vector<double> hermite_functions(std::size_t n, double x)
{
    std::vector<double> p(n);
    if (n == 0) return p;
    p[0] = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
    if (n > 1) p[1] = std::sqrt(2.0) * x * p[0];
    for (std::size_t j = 2; j < n; ++j)
        p[j] = std::sqrt(2.0 / static_cast<double>(j)) * x * p[j - 1] -
               std::sqrt(static_cast<double>(j - 1) / static_cast<double>(j)) * p[j - 2];
    return p;
}

// Multi-indices in order of total degree, then lexicographic.
std::vector<std::vector<std::size_t>> graded_indices(std::size_t d, std::size_t count)
{
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t deg = 0; out.size() < count; ++deg) {
        std::vector<std::size_t> idx(d, 0);
        // enumerate compositions of deg into d parts
        std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t axis, std::size_t left) {
            if (out.size() >= count) return;
            if (axis + 1 == d) {
                idx[axis] = left;
                out.push_back(idx);
                return;
            }
            for (std::size_t v = left + 1; v-- > 0;) {
                idx[axis] = v;
                rec(axis + 1, left - v);
                if (out.size() >= count) return;
            }
        };
        rec(0, deg);
    }
    return out;
}

}  // namespace

std::vector<ScalarField> random_ic_basis(const std::string& family, std::size_t count, const Grid& grid)
{
    if (count == 0) throw DomainError("random_ic_basis: count must be >= 1");
    const std::size_t d = grid.dim();
    std::vector<ScalarField> basis;
    basis.reserve(count);
    if (family == "hermite") {
        const auto idx = graded_indices(d, count);
        std::size_t maxdeg = 0;
        for (const auto& m : idx)
            for (std::size_t v : m) maxdeg = std::max(maxdeg, v);
        std::vector<std::vector<std::vector<double>>> tab(d);
        for (std::size_t a = 0; a < d; ++a) {
            tab[a].resize(grid.n(a));
            for (std::size_t i = 0; i < grid.n(a); ++i) tab[a][i] = hermite_functions(maxdeg + 1, grid.coord(a, i));
        }
        for (const auto& m : idx) {
            ScalarField f(grid);
            for (std::size_t p = 0; p < grid.size(); ++p) {
                const auto ii = grid.unravel(p);
                double v = 1.0;
                for (std::size_t a = 0; a < d; ++a) v *= tab[a][ii[a]][m[a]];
                f.values[p] = v;
            }
            basis.push_back(std::move(f));
        }
    } else if (family == "fourier") {
        // 1/sqrt(V), then sqrt(2/V) cos(k.x), sqrt(2/V) sin(k.x) over half-space modes by increasing |m|^2
        double vol = 1.0;
        for (std::size_t a = 0; a < d; ++a) vol *= grid.length(a);
        std::vector<std::vector<long>> modes;
        long radius = 0;
        while (modes.size() * 2 + 1 < count) {
            ++radius;
            modes.clear();
            std::vector<long> m(d, -radius);
            for (;;) {
                // keep one representative of each +-m pair, skip 0 and Nyquist
                bool positive = false, zero = true, ok = true;
                for (std::size_t a = 0; a < d; ++a) {
                    if (std::labs(m[a]) >= static_cast<long>(grid.n(a) / 2)) ok = false;
                    if (zero && m[a] != 0) {
                        zero = false;
                        positive = m[a] > 0;
                    }
                }
                if (ok && !zero && positive) modes.push_back(m);
                std::size_t a = d;
                while (a-- > 0) {
                    if (++m[a] <= radius) break;
                    m[a] = -radius;
                }
                if (a == static_cast<std::size_t>(-1)) break;
            }
            if (radius > static_cast<long>(grid.n(0))) throw DomainError("random_ic_basis: grid too coarse for count");
        }
        auto norm2 = [](const std::vector<long>& m) {
            long s = 0;
            for (long v : m) s += v * v;
            return s;
        };
        std::stable_sort(modes.begin(), modes.end(), [&](const auto& a, const auto& b) { return norm2(a) < norm2(b); });
        basis.push_back(ScalarField(grid, Vec(grid.size(), 1.0 / std::sqrt(vol))));
        for (const auto& m : modes) {
            for (int kind = 0; kind < 2 && basis.size() < count; ++kind) {
                ScalarField f(grid);
                for (std::size_t p = 0; p < grid.size(); ++p) {
                    const auto ii = grid.unravel(p);
                    double ph = 0.0;
                    for (std::size_t a = 0; a < d; ++a)
                        ph += 2.0 * kPi * static_cast<double>(m[a]) * static_cast<double>(ii[a]) / static_cast<double>(grid.n(a));
                    f.values[p] = std::sqrt(2.0 / vol) * (kind == 0 ? std::cos(ph) : std::sin(ph));
                }
                basis.push_back(std::move(f));
            }
            if (basis.size() >= count) break;
        }
    } else {
        throw DomainError("random_ic_basis: unknown family '" + family + "' (expected hermite or fourier)");
    }
    return basis;
}

double basis_orthonormality_defect(const std::vector<ScalarField>& basis)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = i; j < basis.size(); ++j) {
            if (basis[i].grid != basis[j].grid) throw DimensionError("basis functions must share one grid");
            double s = 0.0;
            for (std::size_t p = 0; p < basis[i].values.size(); ++p) s += basis[i].values[p] * basis[j].values[p];
            s *= basis[i].grid.cell_volume();
            worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

ScalarField solve_random_ic(const std::vector<double>& coeffs, const std::vector<ScalarField>& basis,
                            const Frame& frame, const Vec& u, double alpha, double t)
{
    if (coeffs.empty() || coeffs.size() != basis.size())
        throw DimensionError("solve_random_ic: need one coefficient per basis function");
    for (double c : coeffs)
        if (!std::isfinite(c)) throw DomainError("solve_random_ic: coefficients must be finite");
    const double defect = basis_orthonormality_defect(basis);
    if (defect > 1e-6)
        warn("random initial data: basis is not orthonormal on the grid (defect " + std::to_string(defect) + ")");
    ScalarField out(basis.front().grid);
    for (std::size_t j = 0; j < basis.size(); ++j) {
        if (coeffs[j] == 0.0) continue;
        const ScalarField s = solve_advection(basis[j], frame, u, alpha, t);
        for (std::size_t p = 0; p < out.values.size(); ++p) out.values[p] += coeffs[j] * s.values[p];
    }
    return out;
}

ScalarField solve_random_ic(const std::vector<double>& coeffs, const std::string& family, const Grid& grid,
                            const Frame& frame, const Vec& u, double alpha, double t)
{
    return solve_random_ic(coeffs, random_ic_basis(family, coeffs.size(), grid), frame, u, alpha, t);
}

// ---------------------------------------------------------------- Frobenius-Perron transport

std::size_t poisson_truncation(double lambda_t)
{
    if (!(lambda_t >= 0.0) || !std::isfinite(lambda_t)) throw DomainError("poisson_truncation: lambda t must be >= 0");
    return static_cast<std::size_t>(std::ceil(lambda_t + 12.0 * std::sqrt(lambda_t) + 20.0));
}

ScalarField solve_fp_transport(const ScalarField& f0, const Frame& frame, const Vec& u, double alpha, double lambda,
                               double t, std::size_t m_max)
{
    require_alpha(alpha, "solve_fp_transport");
    require_time(t);
    require_dim(f0.grid, frame.dim(), "solve_fp_transport");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("solve_fp_transport: lambda must be >= 0");
    const Vec lam = frame_speeds(frame, u);
    const double lt = lambda * t;
    if (lt == 0.0) return solve_advection(f0, frame, u, alpha, t);
    if (m_max == 0) m_max = poisson_truncation(lt);
    for (std::size_t a = 0; a < f0.grid.dim(); ++a)
        if (static_cast<double>(m_max) >= f0.grid.length(a))
            throw TruncationError("solve_fp_transport: shifts up to " + std::to_string(m_max) +
                                  " do not fit in a box of extent " + std::to_string(f0.grid.length(a)));
    std::vector<double> w(m_max + 1);
    for (std::size_t m = 0; m <= m_max; ++m)
        w[m] = std::exp(-lt + static_cast<double>(m) * std::log(lt) - std::lgamma(static_cast<double>(m) + 1.0));
    return apply_symbol(f0, [&](const Vec& k) {
        double ksum = 0.0;
        for (double v : k) ksum += v;
        cplx shift(0.0, 0.0);
        for (std::size_t m = 0; m <= m_max; ++m) shift += w[m] * std::polar(1.0, ksum * static_cast<double>(m));
        return shift * advection_propagator(k, frame, lam, alpha, t);
    });
}

// ---------------------------------------------------------------- dispatch

SolveKind parse_solve_kind(const std::string& name)
{
    if (name == "advection") return SolveKind::Advection;
    if (name == "fade") return SolveKind::Fade;
    if (name == "heat-directional") return SolveKind::HeatDirectional;
    if (name == "fp-transport") return SolveKind::FpTransport;
    throw DomainError("unknown solve kind '" + name + "'");
}

std::string to_string(SolveKind kind)
{
    switch (kind) {
    case SolveKind::Advection: return "advection";
    case SolveKind::Fade: return "fade";
    case SolveKind::HeatDirectional: return "heat-directional";
    case SolveKind::FpTransport: return "fp-transport";
    }
    return "unknown";
}

ScalarField solve(const SolveSpec& spec, const ScalarField& initial)
{
    switch (spec.kind) {
    case SolveKind::Advection: return solve_advection(initial, spec.frame, spec.u, spec.alpha, spec.t);
    case SolveKind::Fade:
        if (!spec.beta) throw OrderError("fade requires beta");
        return solve_fade(initial, spec.frame, spec.u, spec.alpha, *spec.beta, spec.t);
    case SolveKind::HeatDirectional: {
        const Direction th = spec.theta ? Direction::normalized(*spec.theta) : spec.frame[0];
        return spec.subordination ? solve_heat_directional_subordination(initial, th, spec.alpha, spec.t)
                                  : solve_heat_directional(initial, th, spec.alpha, spec.t);
    }
    case SolveKind::FpTransport:
        return solve_fp_transport(initial, spec.frame, spec.u, spec.alpha, spec.lambda, spec.t);
    }
    throw DomainError("unknown solve kind");
}

}  // namespace fracflow
