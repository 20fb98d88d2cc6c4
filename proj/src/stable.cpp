#include "fracflow/stable.hpp"

#include "fracflow/core.hpp"
#include "fracflow/error.hpp"
#include "fracflow/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

namespace fracflow {

StableLaw::StableLaw(double alpha) : alpha_(alpha)
{
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw OrderError("stable law order must lie in (0,1], got " + std::to_string(alpha));
}

double stable_density_series(double alpha, double x, bool* ok)
{
    // h(x) = (1/pi) sum_k (-1)^{k+1}/k! Gamma(alpha k + 1) sin(pi alpha k) x^{-alpha k - 1}
    const double lx = std::log(x);
    double sum = 0.0, max_term = 0.0;
    bool converged = false;
    double prev_mag = 0.0;
    for (int k = 1; k <= 400; ++k) {
        const double ak = alpha * k;
        const double lmag = std::lgamma(ak + 1.0) - std::lgamma(k + 1.0) - ak * lx - lx;
        if (lmag > 700.0) break;
        const double mag = std::exp(lmag);
        const double term = ((k % 2) ? 1.0 : -1.0) * mag * std::sin(kPi * ak);
        sum += term;
        max_term = std::max(max_term, mag);
        if (k > 3 && mag < prev_mag && mag <= 1e-17 * std::abs(sum)) {
            converged = true;
            break;
        }
        prev_mag = mag;
    }
    sum /= kPi;
    max_term /= kPi;
    if (ok) *ok = converged && sum > 0.0 && max_term <= 1e5 * sum;
    return sum;
}

double stable_density_talbot(double alpha, double x, int m)
{
    // f(x) = (r/M)[ F(r)e^{rx}/2 + sum_k Re(e^{x s_k} F(s_k)(1 + i sigma_k)) ], F(s) = exp(-s^alpha)
    // Scale the contour so it passes no lower than the saddle of xs - s^alpha;
    // otherwise exp(-s^alpha) grows along the contour and swamps the result.
    const double saddle = std::pow(alpha / x, 1.0 / (1.0 - alpha));
    const double r = std::max(2.0 * m / (5.0 * x), std::isfinite(saddle) ? saddle : 0.0);
    double acc = 0.5 * std::exp(r * x - std::pow(r, alpha));
    for (int k = 1; k < m; ++k) {
        const double th = k * kPi / m;
        const double cot = std::cos(th) / std::sin(th);
        const cplx s(r * th * cot, r * th);
        const double sigma = th + (th * cot - 1.0) * cot;
        const cplx v = std::exp(x * s - std::pow(s, alpha)) * cplx(1.0, sigma);
        acc += v.real();
    }
    const double v = r / m * acc;
    return std::isfinite(v) ? v : 0.0;
}

namespace {

void check_density_args(const StableLaw& law, double x, double t)
{
    if (law.degenerate())
        throw DegenerateLawError("alpha = 1 is the point mass at t; it has no density");
    if (!(t > 0.0)) throw DomainError("stable_density: t must be > 0");
    if (!(x > 0.0)) throw DomainError("stable_density: x must be > 0");
}

double density1(double alpha, double x)
{
    // h(x) ~ exp(-(1-a) a^{a/(1-a)} x^{-a/(1-a)}) as x -> 0
    const double lead = (1.0 - alpha) * std::pow(alpha, alpha / (1.0 - alpha)) * std::pow(x, -alpha / (1.0 - alpha));
    if (!(lead < 700.0)) return 0.0;
    bool ok = false;
    const double s = stable_density_series(alpha, x, &ok);
    if (ok) return s;
    return std::max(0.0, stable_density_talbot(alpha, x));
}

// Upper tail int_x^inf h(y) dy from the termwise-integrated series; ok=false when unreliable.
double survival_series(double alpha, double x, bool* ok)
{
    bool dens_ok = false;
    stable_density_series(alpha, x, &dens_ok);
    const double lx = std::log(x);
    double sum = 0.0;
    for (int k = 1; k <= 400; ++k) {
        const double ak = alpha * k;
        const double lmag = std::lgamma(ak + 1.0) - std::lgamma(k + 1.0) - ak * lx - std::log(ak);
        if (lmag > 700.0) {
            dens_ok = false;
            break;
        }
        const double mag = std::exp(lmag);
        sum += ((k % 2) ? 1.0 : -1.0) * mag * std::sin(kPi * ak);
        if (k > 3 && mag <= 1e-17 * std::abs(sum)) break;
    }
    sum /= kPi;
    if (ok) *ok = dens_ok && sum >= 0.0 && sum <= 1.0;
    return sum;
}

double cdf1(double alpha, double x)
{
    bool ok = false;
    const double surv = survival_series(alpha, x, &ok);
    if (ok) return 1.0 - surv;
    return std::clamp(quad::tanh_sinh([&](double y) { return y > 0.0 ? density1(alpha, y) : 0.0; }, 0.0, x, 1e-10),
                      0.0, 1.0);
}

}  // namespace

double stable_density(const StableLaw& law, double x, double t)
{
    check_density_args(law, x, t);
    const double a = law.alpha();
    const double scale = std::pow(t, 1.0 / a);
    return density1(a, x / scale) / scale;
}

double stable_cdf(const StableLaw& law, double x, double t)
{
    if (!(t > 0.0)) throw DomainError("stable_cdf: t must be > 0");
    if (law.degenerate()) return x >= t ? 1.0 : 0.0;
    if (x <= 0.0) return 0.0;
    return cdf1(law.alpha(), x / std::pow(t, 1.0 / law.alpha()));
}

std::vector<double> stable_cdf_sorted(const StableLaw& law, const std::vector<double>& xs, double t)
{
    std::vector<double> out(xs.size());
    if (law.degenerate()) {
        for (std::size_t i = 0; i < xs.size(); ++i) out[i] = xs[i] >= t ? 1.0 : 0.0;
        return out;
    }
    const double a = law.alpha();
    const double scale = std::pow(t, 1.0 / a);
    // 5-point Gauss-Legendre between consecutive points where the series tail is unusable
    static const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                 0.9061798459386640};
    static const double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                                 0.2369268850561891};
    double prev_x = 0.0, prev_c = 0.0;
    bool have_prev = false;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0 && xs[i] < xs[i - 1]) throw DomainError("stable_cdf_sorted: input must be ascending");
        const double x = xs[i] / scale;
        if (x <= 0.0) {
            out[i] = 0.0;
            continue;
        }
        bool ok = false;
        const double surv = survival_series(a, x, &ok);
        double c;
        if (ok) {
            c = 1.0 - surv;
        } else if (!have_prev || x > 2.0 * prev_x) {
            c = cdf1(a, x);
        } else {
            const double h = 0.5 * (x - prev_x), m = 0.5 * (x + prev_x);
            double s = 0.0;
            for (int j = 0; j < 5; ++j) s += gw[j] * density1(a, m + h * gx[j]);
            c = prev_c + h * s;
        }
        c = std::clamp(c, 0.0, 1.0);
        out[i] = c;
        prev_x = x;
        prev_c = c;
        have_prev = true;
    }
    return out;
}

double sample_subordinator_one(const StableLaw& law, double t, Rng& rng)
{
    if (law.degenerate()) return t;
    if (t == 0.0) return 0.0;
    const double a = law.alpha();
    const double u = kPi * rng.uniform();
    const double e = rng.exponential();
    const double h1 = std::sin(a * u) / std::pow(std::sin(u), 1.0 / a) *
                      std::pow(std::sin((1.0 - a) * u) / e, (1.0 - a) / a);
    return std::pow(t, 1.0 / a) * h1;
}

std::vector<double> sample_subordinator(const StableLaw& law, double t, std::size_t n, std::uint64_t seed,
                                        std::size_t threads)
{
    if (n == 0) throw DomainError("sample_subordinator: n must be >= 1");
    if (!(t >= 0.0)) throw DomainError("sample_subordinator: t must be >= 0");
    std::vector<double> out(n);
    for_each_chunk(
        n, seed,
        [&](Rng& rng, std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) out[i] = sample_subordinator_one(law, t, rng);
        },
        threads);
    return out;
}

LaplaceCheck laplace_check(const StableLaw& law, double s, double t, const std::vector<double>& samples)
{
    if (samples.empty()) throw DomainError("laplace_check: no samples");
    // Welford update: a constant sample gives its value back exactly.
    double mean = 0.0, m2 = 0.0;
    std::size_t i = 0;
    for (double h : samples) {
        const double v = std::exp(-s * h);
        const double delta = v - mean;
        mean += delta / static_cast<double>(++i);
        m2 += delta * (v - mean);
    }
    const double n = static_cast<double>(samples.size());
    const double var = m2 / n;
    return {mean, std::sqrt(var / n), std::exp(-t * std::pow(s, law.alpha()))};
}

LaplaceCheck laplace_check(const StableLaw& law, double s, double t, std::size_t n, std::uint64_t seed,
                           std::size_t threads)
{
    if (!(s > 0.0) || !(t > 0.0)) throw DomainError("laplace_check: s and t must be > 0");
    return laplace_check(law, s, t, sample_subordinator(law, t, n, seed, threads));
}

}  // namespace fracflow
