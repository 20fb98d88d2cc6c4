#include "fracflow/stochastic.hpp"

#include "fracflow/error.hpp"
#include "fracflow/fracops.hpp"
#include "fracflow/quadrature.hpp"
#include "fracflow/random.hpp"
#include "fracflow/solvers.hpp"
#include "fracflow/stable.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fracflow {

// ---------------------------------------------------------------- jump laws

JumpLaw JumpLaw::fixed(Vec v)
{
    JumpLaw j;
    j.kind = Kind::FixedVector;
    j.vector = std::move(v);
    return j;
}

JumpLaw JumpLaw::folded_gaussian(double beta, double r, double p)
{
    JumpLaw j;
    j.kind = Kind::FoldedGaussian;
    j.beta = beta;
    j.r = r;
    j.p = p;
    return j;
}

JumpLaw JumpLaw::table(std::vector<Vec> atoms, std::vector<double> weights)
{
    JumpLaw j;
    j.kind = Kind::UserTable;
    j.atoms = std::move(atoms);
    j.weights = std::move(weights);
    return j;
}

void JumpLaw::validate(std::size_t d) const
{
    switch (kind) {
    case Kind::FixedVector:
        if (vector.size() != d) throw DimensionError("fixed jump vector has the wrong dimension");
        for (double v : vector)
            if (!std::isfinite(v)) throw DomainError("fixed jump vector must be finite");
        break;
    case Kind::FoldedGaussian:
        if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("folded-gaussian jump: beta must be > 0");
        if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("folded-gaussian jump: r must be > 0");
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("folded-gaussian jump: p must lie in [0,1]");
        break;
    case Kind::UserTable: {
        if (atoms.empty() || atoms.size() != weights.size())
            throw DimensionError("user-table jump: need one weight per atom");
        double s = 0.0;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            if (atoms[i].size() != d) throw DimensionError("user-table jump: atom has the wrong dimension");
            if (!(weights[i] >= 0.0)) throw DomainError("user-table jump: weights must be >= 0");
            s += weights[i];
        }
        if (std::abs(s - 1.0) > 1e-12) throw DomainError("user-table jump: weights must sum to 1");
        break;
    }
    }
}

std::string to_string(JumpLaw::Kind kind)
{
    switch (kind) {
    case JumpLaw::Kind::FixedVector: return "fixed-vector";
    case JumpLaw::Kind::FoldedGaussian: return "folded-gaussian-rademacher";
    case JumpLaw::Kind::UserTable: return "user-table";
    }
    return "unknown";
}

JumpLaw::Kind parse_jump_kind(const std::string& name)
{
    if (name == "fixed-vector") return JumpLaw::Kind::FixedVector;
    if (name == "folded-gaussian-rademacher" || name == "folded-gaussian") return JumpLaw::Kind::FoldedGaussian;
    if (name == "user-table") return JumpLaw::Kind::UserTable;
    throw DomainError("unknown jump law '" + name + "'");
}

std::string to_string(TauMap tau)
{
    switch (tau) {
    case TauMap::One: return "one";
    case TauMap::Identity: return "identity";
    case TauMap::AbsSum: return "abs-sum";
    case TauMap::Norm: return "norm";
    }
    return "unknown";
}

TauMap parse_tau(const std::string& name)
{
    if (name == "one") return TauMap::One;
    if (name == "identity") return TauMap::Identity;
    if (name == "abs-sum") return TauMap::AbsSum;
    if (name == "norm") return TauMap::Norm;
    throw DomainError("unknown jump map tau '" + name + "' (expected one, identity, abs-sum, norm)");
}

double apply_tau(TauMap tau, const double* y, std::size_t d)
{
    switch (tau) {
    case TauMap::One: return 1.0;
    case TauMap::Identity:
        if (d != 1) throw DimensionError("tau = identity requires d = 1");
        return y[0];
    case TauMap::AbsSum: {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) s += std::abs(y[i]);
        return s;
    }
    case TauMap::Norm: {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) s += y[i] * y[i];
        return std::sqrt(s);
    }
    }
    return 0.0;
}

namespace {

void draw_jump(const JumpLaw& jump, std::size_t d, Rng& rng, double* out)
{
    switch (jump.kind) {
    case JumpLaw::Kind::FixedVector:
        for (std::size_t i = 0; i < d; ++i) out[i] = jump.vector[i];
        return;
    case JumpLaw::Kind::FoldedGaussian: {
        const double s = jump.r / rng.gamma(jump.beta);
        const double sd = std::sqrt(2.0 * s);
        for (std::size_t i = 0; i < d; ++i) out[i] = std::abs(sd * rng.normal());
        const int eps = rng.rademacher(jump.p);
        for (std::size_t i = 0; i < d; ++i) out[i] *= eps;
        return;
    }
    case JumpLaw::Kind::UserTable: {
        const double u = rng.uniform();
        double c = 0.0;
        std::size_t idx = jump.atoms.size() - 1;
        for (std::size_t a = 0; a < jump.atoms.size(); ++a) {
            c += jump.weights[a];
            if (u < c) {
                idx = a;
                break;
            }
        }
        for (std::size_t i = 0; i < d; ++i) out[i] = jump.atoms[idx][i];
        return;
    }
    }
}

void require_n(std::size_t n)
{
    if (n == 0) throw DomainError("ensemble size n must be >= 1");
}

void require_rate(double lambda, double t)
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("Poisson rate must be finite and >= 0");
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be finite and >= 0");
}

// Average of F(S) over S = r/G, G ~ Gamma(beta,1); integrates over u = log G.
template <class F>
cplx mix_inverse_gamma(double beta, double r, F fn, double tol = 1e-11)
{
    const double lg = std::lgamma(beta);
    const double lo = -45.0 / beta, hi = 4.5;
    auto w = [&](double u) { return std::exp(beta * u - std::exp(u) - lg); };
    const double re = quad::gauss_kronrod([&](double u) { return w(u) * fn(r * std::exp(-u)).real(); }, lo, hi, tol);
    const double im = quad::gauss_kronrod([&](double u) { return w(u) * fn(r * std::exp(-u)).imag(); }, lo, hi, tol);
    return {re, im};
}

// E exp(i k |X|), X ~ N(0, 2s)
cplx folded_cf_given_scale(double k, double s)
{
    const double rs = std::sqrt(s);
    return {std::exp(-k * k * s), 2.0 / std::sqrt(kPi) * quad::dawson(k * rs)};
}

// E exp(-z |X|), X ~ N(0, 2s), Re z >= 0
cplx folded_laplace_given_scale(cplx z, double s)
{
    if (z.real() == 0.0) return folded_cf_given_scale(-z.imag(), s);
    // |X| = 2 sqrt(s) v with density (2/sqrt(pi)) e^{-v^2}
    const cplx w = 2.0 * std::sqrt(s) * z;
    const double c = 2.0 / std::sqrt(kPi);
    const double re = quad::gauss_kronrod([&](double v) { return c * (std::exp(-v * v - w * v)).real(); }, 0.0, 9.0, 1e-12);
    const double im = quad::gauss_kronrod([&](double v) { return c * (std::exp(-v * v - w * v)).imag(); }, 0.0, 9.0, 1e-12);
    return {re, im};
}

}  // namespace

double folded_gaussian_mean_magnitude(double beta, double r)
{
    if (!(beta > 0.5))
        throw DomainError("folded-gaussian jump: E|W| is infinite for beta <= 1/2 (got " + std::to_string(beta) + ")");
    if (!(r > 0.0)) throw DomainError("folded-gaussian jump: r must be > 0");
    // E|N(0,2S)| = (2/sqrt(pi)) E sqrt(S)
    return mix_inverse_gamma(beta, r, [](double s) { return cplx(2.0 / std::sqrt(kPi) * std::sqrt(s), 0.0); }).real();
}

Vec jump_mean(const JumpLaw& jump, std::size_t d)
{
    jump.validate(d);
    Vec m(d, 0.0);
    switch (jump.kind) {
    case JumpLaw::Kind::FixedVector: return jump.vector;
    case JumpLaw::Kind::FoldedGaussian: {
        if (jump.p == 0.5) return m;
        const double ew = folded_gaussian_mean_magnitude(jump.beta, jump.r);
        for (double& v : m) v = (2.0 * jump.p - 1.0) * ew;
        return m;
    }
    case JumpLaw::Kind::UserTable:
        for (std::size_t a = 0; a < jump.atoms.size(); ++a)
            for (std::size_t i = 0; i < d; ++i) m[i] += jump.weights[a] * jump.atoms[a][i];
        return m;
    }
    return m;
}

cplx jump_cf(const JumpLaw& jump, std::size_t d, const Vec& k)
{
    jump.validate(d);
    if (k.size() != d) throw DimensionError("jump_cf: wavevector dimension differs from d");
    switch (jump.kind) {
    case JumpLaw::Kind::FixedVector: return std::polar(1.0, dot(k, jump.vector));
    case JumpLaw::Kind::UserTable: {
        cplx s(0.0, 0.0);
        for (std::size_t a = 0; a < jump.atoms.size(); ++a) s += jump.weights[a] * std::polar(1.0, dot(k, jump.atoms[a]));
        return s;
    }
    case JumpLaw::Kind::FoldedGaussian: {
        const double p = jump.p, q = 1.0 - p;
        return mix_inverse_gamma(jump.beta, jump.r, [&](double s) {
            cplx prod(1.0, 0.0);
            for (double kj : k) prod *= folded_cf_given_scale(kj, s);
            return p * prod + q * std::conj(prod);
        });
    }
    }
    return {1.0, 0.0};
}

cplx tau_laplace(const JumpLaw& jump, std::size_t d, TauMap tau, cplx z)
{
    jump.validate(d);
    if (z.real() < -1e-14) throw DomainError("tau_laplace: Re z must be >= 0");
    switch (jump.kind) {
    case JumpLaw::Kind::FixedVector: return std::exp(-z * apply_tau(tau, jump.vector.data(), d));
    case JumpLaw::Kind::UserTable: {
        cplx s(0.0, 0.0);
        for (std::size_t a = 0; a < jump.atoms.size(); ++a)
            s += jump.weights[a] * std::exp(-z * apply_tau(tau, jump.atoms[a].data(), d));
        return s;
    }
    case JumpLaw::Kind::FoldedGaussian: {
        if (tau == TauMap::One) return std::exp(-z);
        if (tau == TauMap::Identity) {
            if (d != 1) throw DimensionError("tau = identity requires d = 1");
            if (jump.p < 1.0) throw DomainError("tau = identity takes negative values unless p = 1");
            return mix_inverse_gamma(jump.beta, jump.r, [&](double s) { return folded_laplace_given_scale(z, s); });
        }
        if (tau == TauMap::AbsSum || (tau == TauMap::Norm && d == 1))
            return mix_inverse_gamma(jump.beta, jump.r, [&](double s) {
                return std::pow(folded_laplace_given_scale(z, s), static_cast<double>(d));
            });
        throw DomainError("tau_laplace: tau = norm with folded-gaussian jumps is only available for d = 1");
    }
    }
    return {1.0, 0.0};
}

double folded_gaussian_constant(double beta, std::size_t d)
{
    const double dd = static_cast<double>(d);
    return std::exp(std::lgamma(beta + 0.5 * dd) - std::lgamma(beta) + (2.0 * beta + 2.0 * dd) * std::log(2.0) -
                    0.5 * dd * std::log(4.0 * kPi));
}

double folded_gaussian_density(const Vec& y, double beta, double r)
{
    const std::size_t d = y.size();
    for (double v : y)
        if (v < 0.0) return 0.0;
    double y2 = 0.0;
    for (double v : y) y2 += v * v;
    return folded_gaussian_constant(beta, d) * std::pow(r, beta) * std::pow(y2 + 4.0 * r, -beta - 0.5 * d);
}

bool compensator_active(const Frame& frame, const Vec& mean)
{
    for (std::size_t l = 0; l < frame.dim(); ++l)
        if (!(frame[l].dot(mean) > 0.0)) return false;
    return true;
}

// ---------------------------------------------------------------- simulators

Ensemble simulate_advection_process(const Frame& frame, const Vec& u, double alpha, double t, std::size_t n,
                                    std::uint64_t seed, std::size_t threads)
{
    require_n(n);
    require_rate(0.0, t);
    const StableLaw law(alpha);
    const Vec lam = frame_speeds(frame, u);
    const std::size_t d = frame.dim();
    Ensemble e;
    e.dim = d;
    e.t = t;
    e.seed = seed;
    e.descriptor.process = "advection";
    e.descriptor.d = d;
    e.descriptor.frame = frame;
    e.descriptor.u = u;
    e.descriptor.alpha = alpha;
    e.descriptor.t = t;
    e.points.assign(n * d, 0.0);
    for_each_chunk(
        n, seed,
        [&](Rng& rng, std::size_t b, std::size_t en) {
            for (std::size_t i = b; i < en; ++i) {
                double* z = e.points.data() + i * d;
                for (std::size_t l = 0; l < d; ++l) {
                    const double h = lam[l] == 0.0 ? 0.0 : sample_subordinator_one(law, lam[l] * t, rng);
                    for (std::size_t c = 0; c < d; ++c) z[c] += frame[l][c] * h;
                }
            }
        },
        threads);
    return e;
}

Ensemble simulate_subordinated_bm(const Vec& theta, double alpha, double t, std::size_t n, std::uint64_t seed,
                                  std::size_t threads)
{
    require_n(n);
    require_rate(0.0, t);
    const Direction th(theta);
    const StableLaw law(alpha);
    const std::size_t d = th.dim();
    Ensemble e;
    e.dim = d;
    e.t = t;
    e.seed = seed;
    e.descriptor.process = "subordinated-bm";
    e.descriptor.d = d;
    e.descriptor.frame = Frame::canonical(d);
    e.descriptor.theta = theta;
    e.descriptor.alpha = alpha;
    e.descriptor.t = t;
    e.points.assign(n * d, 0.0);
    for_each_chunk(
        n, seed,
        [&](Rng& rng, std::size_t b, std::size_t en) {
            for (std::size_t i = b; i < en; ++i) {
                const double h = sample_subordinator_one(law, t, rng);
                const double x = std::sqrt(2.0 * h) * rng.normal();
                for (std::size_t c = 0; c < d; ++c) e.points[i * d + c] = th[c] * x;
            }
        },
        threads);
    return e;
}

Ensemble simulate_compound_poisson(double lambda, const JumpLaw& jump, std::size_t d, double t, std::size_t n,
                                   std::uint64_t seed, std::optional<TauMap> tau, std::size_t threads)
{
    require_n(n);
    require_rate(lambda, t);
    jump.validate(d);
    const std::size_t od = tau ? 1 : d;
    Ensemble e;
    e.dim = od;
    e.t = t;
    e.seed = seed;
    e.descriptor.process = "compound-poisson";
    e.descriptor.d = d;
    e.descriptor.frame = Frame::canonical(d);
    e.descriptor.lambda = lambda;
    e.descriptor.t = t;
    e.descriptor.jump = jump;
    e.descriptor.tau = tau;
    e.points.assign(n * od, 0.0);
    for_each_chunk(
        n, seed,
        [&](Rng& rng, std::size_t b, std::size_t en) {
            Vec y(d);
            for (std::size_t i = b; i < en; ++i) {
                const std::uint64_t m = rng.poisson(lambda * t);
                double* z = e.points.data() + i * od;
                for (std::uint64_t j = 0; j < m; ++j) {
                    draw_jump(jump, d, rng, y.data());
                    if (tau) {
                        z[0] += apply_tau(*tau, y.data(), d);
                    } else {
                        for (std::size_t c = 0; c < d; ++c) z[c] += y[c];
                    }
                }
            }
        },
        threads);
    return e;
}

Ensemble simulate_subordinated_cp(const Frame& frame, double alpha, double lambda, const JumpLaw& jump, TauMap tau,
                                  double t, std::size_t n, std::uint64_t seed, std::size_t threads)
{
    require_n(n);
    require_rate(lambda, t);
    const std::size_t d = frame.dim();
    jump.validate(d);
    const StableLaw law(alpha);
    // tau must be non-negative on the support
    if (tau == TauMap::Identity) {
        if (d != 1) throw DimensionError("tau = identity requires d = 1");
        bool neg = false;
        if (jump.kind == JumpLaw::Kind::FixedVector) neg = jump.vector[0] < 0.0;
        if (jump.kind == JumpLaw::Kind::UserTable)
            for (std::size_t a = 0; a < jump.atoms.size(); ++a) neg = neg || (jump.weights[a] > 0.0 && jump.atoms[a][0] < 0.0);
        if (jump.kind == JumpLaw::Kind::FoldedGaussian) neg = jump.p < 1.0;
        if (neg) throw DomainError("subordinated compound Poisson: tau takes negative values on the jump support");
    }
    Ensemble e;
    e.dim = d;
    e.t = t;
    e.seed = seed;
    e.descriptor.process = "subordinated-cp";
    e.descriptor.d = d;
    e.descriptor.frame = frame;
    e.descriptor.alpha = alpha;
    e.descriptor.lambda = lambda;
    e.descriptor.t = t;
    e.descriptor.jump = jump;
    e.descriptor.tau = tau;
    e.points.assign(n * d, 0.0);
    for_each_chunk(
        n, seed,
        [&](Rng& rng, std::size_t b, std::size_t en) {
            Vec y(d);
            for (std::size_t i = b; i < en; ++i) {
                const std::uint64_t m = rng.poisson(lambda * t);
                double x = 0.0;
                for (std::uint64_t j = 0; j < m; ++j) {
                    draw_jump(jump, d, rng, y.data());
                    x += apply_tau(tau, y.data(), d);
                }
                double* z = e.points.data() + i * d;
                for (std::size_t l = 0; l < d; ++l) {
                    const double h = x == 0.0 ? 0.0 : sample_subordinator_one(law, x, rng);
                    for (std::size_t c = 0; c < d; ++c) z[c] += frame[l][c] * h;
                }
            }
        },
        threads);
    return e;
}

Ensemble simulate_compensated_levy(const Frame& frame, double alpha, double lambda, const JumpLaw& jump, double t,
                                   std::size_t n, std::uint64_t seed, std::size_t threads)
{
    require_n(n);
    require_rate(lambda, t);
    const std::size_t d = frame.dim();
    jump.validate(d);
    const StableLaw law(alpha);
    const Vec mean = jump_mean(jump, d);
    const bool chi = compensator_active(frame, mean);
    Vec c(d, 0.0);
    if (chi)
        for (std::size_t l = 0; l < d; ++l) c[l] = std::pow(frame[l].dot(mean), 1.0 / alpha);
    Ensemble e;
    e.dim = d;
    e.t = t;
    e.seed = seed;
    e.descriptor.process = "compensated-levy";
    e.descriptor.d = d;
    e.descriptor.frame = frame;
    e.descriptor.alpha = alpha;
    e.descriptor.lambda = lambda;
    e.descriptor.t = t;
    e.descriptor.jump = jump;
    e.points.assign(n * d, 0.0);
    for_each_chunk(
        n, seed,
        [&](Rng& rng, std::size_t b, std::size_t en) {
            Vec y(d);
            for (std::size_t i = b; i < en; ++i) {
                const std::uint64_t m = rng.poisson(lambda * t);
                double* z = e.points.data() + i * d;
                for (std::uint64_t j = 0; j < m; ++j) {
                    draw_jump(jump, d, rng, y.data());
                    for (std::size_t k = 0; k < d; ++k) z[k] += y[k];
                }
                if (chi) {
                    for (std::size_t l = 0; l < d; ++l) {
                        const double h = sample_subordinator_one(law, lambda * t, rng);
                        for (std::size_t k = 0; k < d; ++k) z[k] -= frame[l][k] * c[l] * h;
                    }
                }
            }
        },
        threads);
    return e;
}

Ensemble simulate_fp_process(const Frame& frame, const Vec& u, double alpha, double lambda, double t, std::size_t n,
                             std::uint64_t seed, std::size_t threads)
{
    require_n(n);
    require_rate(lambda, t);
    const StableLaw law(alpha);
    const Vec lam = frame_speeds(frame, u);
    const std::size_t d = frame.dim();
    Ensemble e;
    e.dim = d;
    e.t = t;
    e.seed = seed;
    e.descriptor.process = "fp";
    e.descriptor.d = d;
    e.descriptor.frame = frame;
    e.descriptor.u = u;
    e.descriptor.alpha = alpha;
    e.descriptor.lambda = lambda;
    e.descriptor.t = t;
    e.points.assign(n * d, 0.0);
    for_each_chunk(
        n, seed,
        [&](Rng& rng, std::size_t b, std::size_t en) {
            for (std::size_t i = b; i < en; ++i) {
                double* z = e.points.data() + i * d;
                const double m = static_cast<double>(rng.poisson(lambda * t));
                for (std::size_t c = 0; c < d; ++c) z[c] = m;
                for (std::size_t l = 0; l < d; ++l) {
                    const double h = lam[l] == 0.0 ? 0.0 : sample_subordinator_one(law, lam[l] * t, rng);
                    for (std::size_t c = 0; c < d; ++c) z[c] += frame[l][c] * h;
                }
            }
        },
        threads);
    return e;
}

std::vector<double> sample_folded_gaussian_jump(double beta, double r, double p, std::size_t d, std::size_t n,
                                                std::uint64_t seed, std::size_t threads)
{
    require_n(n);
    if (d == 0) throw DimensionError("jump dimension must be >= 1");
    const JumpLaw jump = JumpLaw::folded_gaussian(beta, r, p);
    jump.validate(d);
    std::vector<double> out(n * d);
    for_each_chunk(
        n, seed,
        [&](Rng& rng, std::size_t b, std::size_t en) {
            for (std::size_t i = b; i < en; ++i) draw_jump(jump, d, rng, out.data() + i * d);
        },
        threads);
    return out;
}

Ensemble simulate(const ProcessDescriptor& desc, std::size_t n, std::uint64_t seed, std::size_t threads)
{
    const std::string& p = desc.process;
    if (p == "advection") return simulate_advection_process(desc.frame, desc.u, desc.alpha, desc.t, n, seed, threads);
    if (p == "subordinated-bm") return simulate_subordinated_bm(desc.theta, desc.alpha, desc.t, n, seed, threads);
    if (p == "compound-poisson")
        return simulate_compound_poisson(desc.lambda, desc.jump, desc.d, desc.t, n, seed, desc.tau, threads);
    if (p == "subordinated-cp") {
        if (!desc.tau) throw DomainError("subordinated-cp requires a jump map tau");
        return simulate_subordinated_cp(desc.frame, desc.alpha, desc.lambda, desc.jump, *desc.tau, desc.t, n, seed,
                                        threads);
    }
    if (p == "compensated-levy")
        return simulate_compensated_levy(desc.frame, desc.alpha, desc.lambda, desc.jump, desc.t, n, seed, threads);
    if (p == "fp") return simulate_fp_process(desc.frame, desc.u, desc.alpha, desc.lambda, desc.t, n, seed, threads);
    throw DomainError("unknown process '" + p + "'");
}

// ---------------------------------------------------------------- Levy-Khinchine multiplier

namespace {

double finite_or_zero(double v) { return std::isfinite(v) ? v : 0.0; }

// int_0^inf g(y) dy for an oscillating g, by half-period blocks and Wynn acceleration.
cplx oscillatory_tail(const std::function<cplx(double)>& g, double start, double half_period,
                      const MultiplierOptions& opt)
{
    std::vector<double> re, im;
    double sr = 0.0, si = 0.0;
    const std::size_t blocks = std::min<std::size_t>(opt.max_blocks, 60);
    for (std::size_t j = 0; j < blocks; ++j) {
        const double a = start + j * half_period, b = a + half_period;
        sr += quad::gauss_kronrod([&](double y) { return g(y).real(); }, a, b, opt.tol * 1e-2);
        si += quad::gauss_kronrod([&](double y) { return g(y).imag(); }, a, b, opt.tol * 1e-2);
        re.push_back(sr);
        im.push_back(si);
    }
    return {quad::wynn_epsilon(re), quad::wynn_epsilon(im)};
}

void check_multiplier_args(const Vec& k, const Frame& frame, double alpha, double beta, double p)
{
    if (frame.dim() > 2) throw DimensionError("levy_khinchine_multiplier supports d <= 2");
    if (k.size() != frame.dim()) throw DimensionError("levy_khinchine_multiplier: k dimension differs from frame");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw OrderError("levy_khinchine_multiplier: alpha must lie in (0,1]");
    if (!(beta > 0.0 && beta < 1.0)) throw OrderError("levy_khinchine_multiplier: beta must lie in (0,1)");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("levy_khinchine_multiplier: p must lie in [0,1]");
}

// Angular measure of D(theta) inside the positive quadrant, and the compensator angular weights.
struct Compensator {
    bool present = false;
    Vec angular;  // int over quadrant of (theta_l . e_phi) chi_D(e_phi) dphi, per l (d=2); theta_l chi for d=1
};

Compensator compensator_weights(const Frame& frame)
{
    Compensator c;
    const std::size_t d = frame.dim();
    c.angular.assign(d, 0.0);
    if (d == 1) {
        if (frame[0][0] > 0.0) {
            c.present = true;
            c.angular[0] = frame[0][0];
        }
        return c;
    }
    auto in_d = [&](double phi) {
        const Vec e{std::cos(phi), std::sin(phi)};
        for (std::size_t l = 0; l < d; ++l)
            if (frame[l].dot(e) < 0.0) return false;
        return true;
    };
    // split the quadrant at the angles where theta_l . e_phi changes sign
    std::vector<double> cuts{0.0, 0.5 * kPi};
    for (std::size_t l = 0; l < d; ++l) {
        const double a = std::atan2(frame[l][1], frame[l][0]);
        for (double off : {0.5 * kPi, -0.5 * kPi, 1.5 * kPi, -1.5 * kPi}) {
            const double z = a + off;
            if (z > 0.0 && z < 0.5 * kPi) cuts.push_back(z);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (b - a < 1e-15 || !in_d(0.5 * (a + b))) continue;
        c.present = true;
        for (std::size_t l = 0; l < d; ++l)
            // int (theta.e_phi) dphi = theta_x (sin b - sin a) - theta_y (cos b - cos a)
            c.angular[l] += frame[l][0] * (std::sin(b) - std::sin(a)) - frame[l][1] * (std::cos(b) - std::cos(a));
    }
    return c;
}

// int_{R_+^d} [p e^{ik.y} + q e^{-ik.y} - 1] w(|y|) dy for a radial weight w; tail_mass(R) = int_{|y|>R, quadrant} w dy.
cplx oscillatory_part(const Vec& k, double p, const std::function<double(double)>& w,
                      const std::function<double(double)>& tail_mass, const MultiplierOptions& opt)
{
    const std::size_t d = k.size();
    const double q = 1.0 - p;
    const double kn = norm(k);
    if (kn == 0.0) return {0.0, 0.0};
    const double hp = kPi / kn;
    if (d == 1) {
        const double kk = k[0];
        auto bracket = [&](double y) {
            const double h = std::sin(0.5 * kk * y);
            return cplx(-2.0 * h * h, (p - q) * std::sin(kk * y));
        };
        // first half period includes the singular origin
        const double r0 = quad::tanh_sinh([&](double y) { return y > 0.0 ? finite_or_zero(bracket(y).real() * w(y)) : 0.0; }, 0.0, hp, opt.tol);
        const double i0 = quad::tanh_sinh([&](double y) { return y > 0.0 ? finite_or_zero(bracket(y).imag() * w(y)) : 0.0; }, 0.0, hp, opt.tol);
        // beyond hp: oscillating part accelerated, -1 part from the tail mass
        const cplx osc = oscillatory_tail([&](double y) { return cplx(std::cos(kk * y), (p - q) * std::sin(kk * y)) * w(y); },
                                          hp, hp, opt);
        return cplx(r0, i0) + osc - tail_mass(hp);
    }
    // d = 2: polar coordinates over the quadrant
    auto angular = [&](double rho) {
        double re = 0.0, im = 0.0;
        re = quad::gauss_kronrod(
            [&](double phi) {
                const double z = rho * (k[0] * std::cos(phi) + k[1] * std::sin(phi));
                const double h = std::sin(0.5 * z);
                return -2.0 * h * h;
            },
            0.0, 0.5 * kPi, opt.tol);
        if (p != q)
            im = (p - q) * quad::gauss_kronrod(
                               [&](double phi) { return std::sin(rho * (k[0] * std::cos(phi) + k[1] * std::sin(phi))); },
                               0.0, 0.5 * kPi, opt.tol);
        return cplx(re, im);
    };
    const double r0 = quad::tanh_sinh([&](double rho) { return rho > 0.0 ? finite_or_zero(angular(rho).real() * w(rho) * rho) : 0.0; }, 0.0, hp, opt.tol);
    const double i0 = quad::tanh_sinh([&](double rho) { return rho > 0.0 ? finite_or_zero(angular(rho).imag() * w(rho) * rho) : 0.0; }, 0.0, hp, opt.tol);
    const cplx osc = oscillatory_tail([&](double rho) { return (angular(rho) + 0.5 * kPi) * w(rho) * rho; }, hp, hp, opt);
    return cplx(r0, i0) + osc - tail_mass(hp);
}

}  // namespace

cplx levy_khinchine_multiplier(const Vec& k, const Frame& frame, double alpha, double beta, double r, double p,
                               const MultiplierOptions& opt)
{
    check_multiplier_args(k, frame, alpha, beta, p);
    if (!(r > 0.0)) throw DomainError("levy_khinchine_multiplier: r must be > 0");
    const std::size_t d = frame.dim();
    const double dd = static_cast<double>(d);
    const double C = folded_gaussian_constant(beta, d);
    const double rb = std::pow(r, beta);
    auto w = [&](double rho) { return C * rb * std::pow(rho * rho + 4.0 * r, -beta - 0.5 * dd); };
    const double quadrant = d == 1 ? 1.0 : 0.5 * kPi;
    auto tail_mass = [&](double R) {
        return quadrant * quad::exp_sinh([&](double rho) { return w(rho) * std::pow(rho, dd - 1.0); }, R, opt.tol);
    };
    cplx phi = oscillatory_part(k, p, w, tail_mass, opt);

    const double q = 1.0 - p;
    const Compensator comp = compensator_weights(frame);
    if (p != q && comp.present) {
        if (!(beta > 0.5))
            throw QuadratureError("levy_khinchine_multiplier: for p != q the compensator integral of |y| m_r(|y|^2) "
                                  "diverges at infinity when beta <= 1/2 (beta = " + std::to_string(beta) + ")");
        // int_0^inf rho^d w(rho) drho
        const double radial = quad::exp_sinh([&](double rho) { return w(rho) * std::pow(rho, dd); }, 0.0, opt.tol);
        cplx s(0.0, 0.0);
        for (std::size_t l = 0; l < d; ++l) s += spectral_symbol(alpha, frame[l], k) * comp.angular[l];
        phi -= (p - q) * s * radial;
    }
    return phi;
}

cplx levy_khinchine_limit(const Vec& k, const Frame& frame, double alpha, double beta, double p,
                          const MultiplierOptions& opt)
{
    check_multiplier_args(k, frame, alpha, beta, p);
    const std::size_t d = frame.dim();
    const double dd = static_cast<double>(d);
    const double q = 1.0 - p;
    const Compensator comp = compensator_weights(frame);
    if (p != q && comp.present)
        throw QuadratureError(
            "levy_khinchine_limit: for p != q the compensator integral of |y|^{1-2beta-d} over D(theta) diverges "
            "for every beta (at infinity if beta <= 1/2, at the origin if beta >= 1/2)");
    if (p != q && beta >= 0.5)
        throw QuadratureError("levy_khinchine_limit: for p != q the sine part diverges at the origin when beta >= 1/2");
    const double C = folded_gaussian_constant(beta, d);
    auto w = [&](double rho) { return C * std::pow(rho, -2.0 * beta - dd); };
    const double quadrant = d == 1 ? 1.0 : 0.5 * kPi;
    auto tail_mass = [&](double R) { return quadrant * C * std::pow(R, -2.0 * beta) / (2.0 * beta); };
    return oscillatory_part(k, p, w, tail_mass, opt);
}

double levy_khinchine_limit_closed_form_1d(double k, double beta)
{
    return -folded_gaussian_constant(beta, 1) * kPi / (2.0 * std::tgamma(1.0 + 2.0 * beta) * std::sin(kPi * beta)) *
           std::pow(std::abs(k), 2.0 * beta);
}

}  // namespace fracflow
