#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fracflow/core.hpp"
#include "fracflow/error.hpp"
#include "fracflow/random.hpp"
#include "fracflow/stochastic.hpp"
#include "fracflow/validation.hpp"

#include <cmath>
#include <random>

using namespace fracflow;

namespace {

Ensemble make_ensemble(std::size_t dim, std::vector<double> pts)
{
    Ensemble e;
    e.dim = dim;
    e.points = std::move(pts);
    return e;
}

ProcessDescriptor advection_1d(double a, double u, double t)
{
    ProcessDescriptor d;
    d.process = "advection";
    d.d = 1;
    d.frame = Frame::canonical(1);
    d.u = {u};
    d.alpha = a;
    d.t = t;
    return d;
}

}  // namespace

TEST_CASE("probe sets")
{
    const Frame fr = frame_from_angles(2, {0.4});
    const ProbeSet p = ProbeSet::radial(fr, 0.05, 5.0, 25);
    REQUIRE(!p.k.empty());
    CHECK(p.k.size() <= 25);
    CHECK(p.k[0] == Vec{0.0, 0.0});
    for (std::size_t i = 1; i < p.k.size(); ++i) {
        const double r = std::hypot(p.k[i][0], p.k[i][1]);
        CHECK(r >= 0.05 * (1 - 1e-12));
        CHECK(r <= 5.0 * (1 + 1e-12));
    }
    CHECK_THROWS_AS(ProbeSet::radial(fr, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(ProbeSet::radial(fr, 1.0, 0.5), DomainError);
}

TEST_CASE("empirical characteristic function")
{
    const ProbeSet p = ProbeSet::radial(Frame::canonical(1), 0.1, 10.0, 12);
    SUBCASE("point mass at the origin")
    {
        const auto cf = empirical_cf(make_ensemble(1, std::vector<double>(500, 0.0)), p);
        for (const CfEstimate& c : cf) {
            CHECK(c.value == cplx(1.0, 0.0));
            CHECK(c.se_re == 0.0);
        }
        // floored standard errors keep z finite
        Ensemble e = make_ensemble(1, std::vector<double>(500, 0.0));
        e.descriptor = advection_1d(1.0, 0.0, 1.0);
        for (const ProbeResult& r : compare_cf(e, p)) CHECK(r.z == 0.0);
    }
    SUBCASE("k = 0 is exactly one")
    {
        std::vector<double> x(1000);
        std::mt19937_64 g(3);
        std::cauchy_distribution<double> c;
        for (double& v : x) v = c(g);
        const auto cf = empirical_cf(make_ensemble(1, x), p);
        CHECK(cf[0].value == cplx(1.0, 0.0));
    }
    SUBCASE("Gaussian samples")
    {
        const double var = 2.5;
        std::vector<double> x(1000000);
        std::mt19937_64 g(5);
        std::normal_distribution<double> nd(0.0, std::sqrt(var));
        for (double& v : x) v = nd(g);
        const auto cf = empirical_cf(make_ensemble(1, x), p);
        for (std::size_t i = 0; i < p.k.size(); ++i) {
            const double k = p.k[i][0];
            const double a = std::exp(-0.5 * k * k * var);
            CHECK(std::abs(cf[i].value.real() - a) < 3.0 * std::max(cf[i].se_re, kMinStdError));
            CHECK(std::abs(cf[i].value.imag()) < 3.0 * std::max(cf[i].se_im, kMinStdError));
            CHECK(cf[i].se_re <= 1.0 / std::sqrt(1e6) + 1e-15);
            CHECK(cf[i].se_im <= 1.0 / std::sqrt(1e6) + 1e-15);
        }
    }
    SUBCASE("too few samples")
    {
        CHECK_THROWS_AS(empirical_cf(make_ensemble(1, std::vector<double>(99, 0.0)), p), DomainError);
    }
    SUBCASE("unbiased over independent seeds")
    {
        const ProcessDescriptor d = advection_1d(0.5, 1.0, 1.0);
        const ProbeSet probe{{{0.7}}};
        const cplx a = analytic_cf(d, {0.7});
        double sr = 0.0, si = 0.0, sr2 = 0.0, si2 = 0.0;
        for (std::uint64_t s = 0; s < 100; ++s) {
            const cplx v = empirical_cf(simulate(d, 10000, 1000 + s), probe)[0].value;
            sr += v.real();
            si += v.imag();
            sr2 += v.real() * v.real();
            si2 += v.imag() * v.imag();
        }
        const double mr = sr / 100, mi = si / 100;
        const double sdr = std::sqrt((sr2 / 100 - mr * mr) / 99.0 * 100.0 / 100.0);
        const double sdi = std::sqrt((si2 / 100 - mi * mi) / 99.0 * 100.0 / 100.0);
        CHECK(std::abs(mr - a.real()) < 3.0 * sdr);
        CHECK(std::abs(mi - a.imag()) < 3.0 * sdi);
    }
}

TEST_CASE("analytic characteristic function")
{
    SUBCASE("k = 0")
    {
        ProcessDescriptor d = advection_1d(0.6, 2.0, 1.5);
        CHECK(analytic_cf(d, {0.0}) == cplx(1.0, 0.0));
    }
    SUBCASE("d = 1, alpha = 1/2, u = t = 1, k = 1")
    {
        const cplx v = analytic_cf(advection_1d(0.5, 1.0, 1.0), {1.0});
        const cplx expect = std::exp(-std::polar(1.0, -kPi / 4.0));
        CHECK(std::abs(v - expect) < 1e-14);
    }
    SUBCASE("fp process with u = 0 at k = pi")
    {
        ProcessDescriptor d;
        d.process = "fp";
        d.d = 1;
        d.frame = Frame::canonical(1);
        d.u = {0.0};
        d.alpha = 0.5;
        d.lambda = 0.7;
        d.t = 1.3;
        const cplx v = analytic_cf(d, {kPi});
        CHECK(v.real() == doctest::Approx(std::exp(-2.0 * 0.7 * 1.3)).epsilon(1e-12));
        CHECK(std::abs(v.imag()) < 1e-12);
        // in d = 2 the unit shift moves along (1,1), so k = (pi, pi) sees a full turn
        d.d = 2;
        d.frame = Frame::canonical(2);
        d.u = {0.0, 0.0};
        CHECK(std::abs(analytic_cf(d, {kPi, kPi}) - 1.0) < 1e-12);
        CHECK(analytic_cf(d, {kPi, 0.0}).real() == doctest::Approx(std::exp(-2.0 * 0.7 * 1.3)).epsilon(1e-12));
    }
    SUBCASE("subordinated Brownian motion")
    {
        ProcessDescriptor d;
        d.process = "subordinated-bm";
        d.d = 2;
        d.frame = Frame::canonical(2);
        d.theta = {0.6, 0.8};
        d.alpha = 0.5;
        d.t = 1.0;
        // Cauchy along theta
        CHECK(analytic_cf(d, {3.0, 4.0}).real() == doctest::Approx(std::exp(-5.0)).epsilon(1e-12));
    }
    SUBCASE("unknown process")
    {
        ProcessDescriptor d = advection_1d(0.5, 1.0, 1.0);
        d.process = "brownian-bridge";
        CHECK_THROWS(analytic_cf(d, {1.0}));
    }
}

TEST_CASE("field and ensemble distances")
{
    const Grid g({256}, {20.0});
    SUBCASE("rejection sample from the field itself")
    {
        const ScalarField f = sample_field(g, [](const Vec& x) { return std::exp(-0.5 * x[0] * x[0]) * (1.0 + 0.5 * std::sin(2.0 * x[0])); });
        const double fmax = max_abs(f);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> ux(-10.0, 10.0), uy(0.0, fmax);
        std::vector<double> pts;
        pts.reserve(1000000);
        while (pts.size() < 1000000) {
            const double x = ux(rng);
            // the field is piecewise constant on cells centred at the grid points
            long i = std::lround((x - g.origin(0)) / g.dx(0));
            if (i >= 256) i = 0;
            if (uy(rng) < f.values[static_cast<std::size_t>(i)]) pts.push_back(x);
        }
        const HistogramDistance h = field_ensemble_distance(f, make_ensemble(1, pts));
        CHECK(h.l1 < 0.02);
        CHECK(h.outside_fraction == 0.0);
    }
    SUBCASE("disjoint supports")
    {
        ScalarField f(g);
        f.values[10] = 1.0;
        std::vector<double> pts(1000, g.coord(0, 200));
        CHECK(field_ensemble_distance(f, make_ensemble(1, pts)).l1 == doctest::Approx(2.0));
        ScalarField h(g);
        h.values[200] = 3.0;
        CHECK(normalized_l1(f, h) == doctest::Approx(2.0));
    }
    SUBCASE("identical concentrations")
    {
        ScalarField f(g);
        f.values[77] = 1.0 / g.dx(0);
        std::vector<double> pts(1000, g.coord(0, 77));
        CHECK(field_ensemble_distance(f, make_ensemble(1, pts)).l1 == 0.0);
        CHECK(normalized_l1(f, f) == 0.0);
    }
    SUBCASE("symmetric and nonnegative")
    {
        const ScalarField a = sample_field(g, [](const Vec& x) { return std::exp(-x[0] * x[0]); });
        const ScalarField b = sample_field(g, [](const Vec& x) { return std::exp(-(x[0] - 1.0) * (x[0] - 1.0)); });
        CHECK(normalized_l1(a, b) == doctest::Approx(normalized_l1(b, a)).epsilon(1e-14));
        CHECK(normalized_l1(a, b) > 0.0);
        std::vector<double> xa(50000), xb(50000);
        std::mt19937_64 r(2);
        std::normal_distribution<double> n1(0.0, 1.0), n2(1.0, 1.0);
        for (double& v : xa) v = n1(r);
        for (double& v : xb) v = n2(r);
        CHECK(ks_two_sample(xa, xb) == doctest::Approx(ks_two_sample(xb, xa)).epsilon(1e-14));
        CHECK(ks_two_sample(xa, xa) == 0.0);
    }
    SUBCASE("coverage")
    {
        const ScalarField f = sample_field(g, [](const Vec& x) { return std::exp(-x[0] * x[0]); });
        std::vector<double> pts(1000, 0.0);
        for (std::size_t i = 0; i < 100; ++i) pts[i] = 50.0;
        CHECK_THROWS_AS(field_ensemble_distance(f, make_ensemble(1, pts)), CoverageError);
        // wrapped into the box: 50 is the same point as 50 - 2*20 = 10 = -10
        const HistogramDistance h = field_ensemble_distance(f, make_ensemble(1, pts), true);
        CHECK(h.outside_fraction == 0.0);
        CHECK(h.l1 > 0.1);
        for (std::size_t i = 0; i < 40; ++i) pts[i] = 50.0;
        for (std::size_t i = 40; i < 100; ++i) pts[i] = 0.0;
        CHECK_NOTHROW(field_ensemble_distance(f, make_ensemble(1, pts)));
        CHECK_THROWS_AS(field_ensemble_distance(f, make_ensemble(2, std::vector<double>(2000, 0.0))), DimensionError);
    }
}

TEST_CASE("Kolmogorov-Smirnov")
{
    std::vector<double> u(20000);
    std::mt19937_64 r(4);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (double& v : u) v = U(r);
    const auto F = [](const std::vector<double>& xs) { return xs; };
    CHECK(ks_statistic(u, F) < 0.015);
    CHECK(ks_statistic({0.5}, F) == doctest::Approx(0.5));
}

TEST_CASE("reports")
{
    ValidationReport r;
    r.name = "x";
    r.below("a", 1.0, 2.0);
    r.exact("b", 0.0);
    r.require("c", true);
    r.finalize();
    CHECK(r.pass);
    r.below("d", 2.0, 2.0);
    r.finalize();
    CHECK_FALSE(r.pass);
    const auto j = to_json(r);
    CHECK(j["case"] == "x");
    CHECK(j["checks"].size() == 4);
    CHECK(j["pass"] == false);
}

TEST_CASE("registered cases")
{
    const auto names = validation_cases();
    CHECK(names.size() >= 20);
    for (const char* n : {"thm31-translation", "thm32-d2", "thm71-cauchy", "laplace-grid", "determinism"})
        CHECK(is_validation_case(n));
    CHECK_FALSE(is_validation_case("thm99"));
    CHECK_THROWS_AS(run_validation("thm99"), DomainError);
    for (const char* n : {"thm31-translation", "thm32-d2", "classical-limits", "fade-factorization", "thm52-multiplier"}) {
        const ValidationReport r = run_validation(n);
        CAPTURE(n);
        CHECK(r.pass);
        CHECK(!r.checks.empty());
        for (const Check& c : r.checks) CHECK(c.pass);
    }
    const ValidationReport r = run_validation("thm32-d2");
    CHECK(max_z(r.probes) < 3.0);
}
