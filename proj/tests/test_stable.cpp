#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fracflow/core.hpp"
#include "fracflow/error.hpp"
#include "fracflow/stable.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace fracflow;

namespace {

double levy_density(double x, double t)
{
    return t / (2.0 * std::sqrt(kPi)) * std::pow(x, -1.5) * std::exp(-t * t / (4.0 * x));
}

// Kolmogorov-Smirnov distance against a CDF, computed directly.
template <class Cdf>
double ks_against(std::vector<double> xs, Cdf cdf)
{
    std::sort(xs.begin(), xs.end());
    const std::vector<double> F = cdf(xs);
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        d = std::max({d, std::abs(F[i] - i / n), std::abs(F[i] - (i + 1) / n)});
    return d;
}

double ks_two(std::vector<double> a, std::vector<double> b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    return d;
}

}  // namespace

TEST_CASE("law construction")
{
    CHECK_THROWS_AS(StableLaw(0.0), OrderError);
    CHECK_THROWS_AS(StableLaw(1.2), OrderError);
    CHECK(StableLaw(1.0).degenerate());
    CHECK_FALSE(StableLaw(0.5).degenerate());
}

TEST_CASE("density at alpha = 1/2 against the Levy closed form")
{
    const double exact = std::exp(-0.25) / (2.0 * std::sqrt(kPi));
    CHECK(exact == doctest::Approx(0.21970).epsilon(1e-4));
    CHECK(std::abs(stable_density(StableLaw(0.5), 1.0) - exact) < 1e-10);
    // Talbot inversion of exp(-sqrt(s)) is the oracle for the library path.
    CHECK(std::abs(stable_density_talbot(0.5, 1.0) - exact) < 1e-8);
    CHECK(std::abs(stable_density(StableLaw(0.5), 1.0) - stable_density_talbot(0.5, 1.0)) < 1e-6);
    for (double x : {0.05, 0.3, 2.0, 10.0, 300.0})
        for (double t : {0.5, 1.0, 2.0})
            CHECK(std::abs(stable_density(StableLaw(0.5), x, t) - levy_density(x, t)) <
                  1e-8 * std::max(1.0, levy_density(x, t)));
}

TEST_CASE("density errors")
{
    CHECK_THROWS_AS(stable_density(StableLaw(1.0), 1.0), DegenerateLawError);
    CHECK_THROWS_AS(stable_density(StableLaw(0.5), 0.0), DomainError);
    CHECK_THROWS_AS(stable_density(StableLaw(0.5), -1.0), DomainError);
    CHECK_THROWS_AS(stable_density(StableLaw(0.5), 1.0, 0.0), DomainError);
}

TEST_CASE("series and Talbot agree where both apply")
{
    for (double a : {0.3, 0.5, 0.7, 0.9})
        for (double x : {1.0, 2.0, 5.0}) {
            bool ok = true;
            const double s = stable_density_series(a, x, &ok);
            if (!ok) continue;
            CHECK(std::abs(s - stable_density_talbot(a, x)) < 1e-8);
        }
}

TEST_CASE("normalization by independent quadrature")
{
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    for (double a : {0.3, 0.5, 0.7, 0.9}) {
        const StableLaw law(a);
        auto h = [&](double x) { return x > 0.0 ? stable_density(law, x) : 0.0; };
        const double total = ts.integrate(h, 0.0, 1.0) + es.integrate(h, 1.0, std::numeric_limits<double>::infinity());
        CAPTURE(a);
        CHECK(std::abs(total - 1.0) < 1e-6);
    }
}

TEST_CASE("self-similarity")
{
    const StableLaw half(0.5);
    CHECK(std::abs(stable_density(half, 1.0, 2.0) - 0.25 * stable_density(half, 0.25, 1.0)) < 1e-8);
    for (double a : {0.3, 0.7, 0.9}) {
        const StableLaw law(a);
        for (double t : {0.5, 3.0})
            for (double x : {0.2, 1.0, 4.0}) {
                const double c = std::pow(t, -1.0 / a);
                CHECK(std::abs(stable_density(law, x, t) - c * stable_density(law, x * c, 1.0)) < 1e-8);
            }
    }
}

TEST_CASE("cdf")
{
    const StableLaw half(0.5);
    // P(H <= x) = erfc(1/(2 sqrt x)) for the Levy law with unit exponent.
    for (double x : {0.1, 1.0, 10.0, 1000.0})
        CHECK(std::abs(stable_cdf(half, x) - std::erfc(0.5 / std::sqrt(x))) < 1e-7);
    const std::vector<double> xs{0.01, 0.1, 0.5, 1.0, 3.0, 30.0, 1e4};
    const std::vector<double> F = stable_cdf_sorted(StableLaw(0.7), xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        CHECK(std::abs(F[i] - stable_cdf(StableLaw(0.7), xs[i])) < 1e-7);
        if (i) CHECK(F[i] >= F[i - 1]);
    }
}

TEST_CASE("degenerate sampler")
{
    const std::vector<double> s = sample_subordinator(StableLaw(1.0), 2.5, 3, 42);
    REQUIRE(s.size() == 3);
    for (double v : s) CHECK(v == 2.5);
    for (double s_ : {0.5, 2.0})
        for (double t : {0.5, 3.0}) {
            const LaplaceCheck c = laplace_check(StableLaw(1.0), s_, t, 100, 3);
            CHECK(c.estimate == std::exp(-s_ * t));
            CHECK(c.analytic == std::exp(-s_ * t));
        }
}

TEST_CASE("Laplace transform of the sampler")
{
    SUBCASE("alpha = 1/2, s = 1")
    {
        const LaplaceCheck c = laplace_check(StableLaw(0.5), 1.0, 1.0, 1000000, 1);
        CHECK(c.analytic == doctest::Approx(0.367879).epsilon(1e-6));
        CHECK(std::abs(c.estimate - c.analytic) < 3.0 * c.std_error);
    }
    SUBCASE("alpha = 0.7, s = 2")
    {
        const LaplaceCheck c = laplace_check(StableLaw(0.7), 2.0, 1.0, 1000000, 1);
        CHECK(c.analytic == doctest::Approx(std::exp(-std::pow(2.0, 0.7))).epsilon(1e-14));
        CHECK(c.analytic == doctest::Approx(0.19693).epsilon(1e-4));
        CHECK(std::abs(c.estimate - c.analytic) < 3.0 * c.std_error);
    }
    SUBCASE("analytic value only")
    {
        const LaplaceCheck c = laplace_check(StableLaw(0.3), 4.0, 0.5, 10, 1);
        CHECK(c.analytic == doctest::Approx(std::exp(-0.5 * std::pow(4.0, 0.3))).epsilon(1e-14));
        CHECK(c.analytic == doctest::Approx(0.468669).epsilon(1e-6));
    }
}

TEST_CASE("sampler against the density cdf")
{
    for (double a : {0.3, 0.5, 0.7, 0.9}) {
        const StableLaw law(a);
        const std::vector<double> s = sample_subordinator(law, 1.0, 100000, 17);
        const double d = ks_against(s, [&](const std::vector<double>& xs) { return stable_cdf_sorted(law, xs); });
        CAPTURE(a);
        CHECK(d < 0.01);
    }
}

TEST_CASE("stationary increments")
{
    for (double a : {0.4, 0.8}) {
        const StableLaw law(a);
        const std::vector<double> whole = sample_subordinator(law, 1.5, 100000, 5);
        const std::vector<double> p1 = sample_subordinator(law, 0.5, 100000, 6);
        const std::vector<double> p2 = sample_subordinator(law, 1.0, 100000, 7);
        std::vector<double> sum(p1.size());
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = p1[i] + p2[i];
        CHECK(ks_two(whole, sum) < 0.01);
    }
}

TEST_CASE("sampling is deterministic and independent of thread count")
{
    const StableLaw law(0.6);
    const std::vector<double> a = sample_subordinator(law, 1.0, 50000, 99, 1);
    const std::vector<double> b = sample_subordinator(law, 1.0, 50000, 99, 3);
    const std::vector<double> c = sample_subordinator(law, 1.0, 50000, 100, 1);
    CHECK(a == b);
    CHECK(a != c);
    for (double v : a) CHECK(v > 0.0);
}
