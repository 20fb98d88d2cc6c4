#include "fracflow/validation.hpp"

#include "fracflow/error.hpp"
#include "fracflow/fracops.hpp"
#include "fracflow/io.hpp"
#include "fracflow/random.hpp"
#include "fracflow/solvers.hpp"
#include "fracflow/stable.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <sstream>

namespace fracflow {

using nlohmann::json;

// ---------------------------------------------------------------- probes and CFs

ProbeSet ProbeSet::radial(const Frame& frame, double kmin, double kmax, std::size_t max_probes)
{
    if (!(kmin > 0.0 && kmax > kmin)) throw DomainError("probe radii need 0 < kmin < kmax");
    if (max_probes < 2) throw DomainError("a probe set needs room for k = 0 and one more wavevector");
    const std::size_t d = frame.dim();
    std::vector<Vec> dirs;
    for (std::size_t l = 0; l < d; ++l) dirs.push_back(frame[l].components());
    if (d == 2) {
        const double s = 1.0 / std::sqrt(2.0);
        Vec a(2), b(2);
        for (std::size_t c = 0; c < 2; ++c) {
            a[c] = s * (frame[0][c] + frame[1][c]);
            b[c] = s * (frame[0][c] - frame[1][c]);
        }
        dirs.push_back(a);
        dirs.push_back(b);
    }
    const std::size_t nr = std::max<std::size_t>(1, (max_probes - 1) / dirs.size());
    ProbeSet p;
    p.k.push_back(Vec(d, 0.0));
    for (std::size_t i = 0; i < nr; ++i) {
        const double r = nr == 1 ? kmin : kmin * std::pow(kmax / kmin, static_cast<double>(i) / (nr - 1));
        for (const Vec& e : dirs) {
            Vec k(d);
            for (std::size_t c = 0; c < d; ++c) k[c] = r * e[c];
            p.k.push_back(k);
        }
    }
    return p;
}

std::vector<CfEstimate> empirical_cf(const Ensemble& ens, const ProbeSet& probes, std::size_t threads)
{
    const std::size_t n = ens.size();
    if (n < 100) throw DomainError("empirical_cf needs at least 100 samples");
    const std::size_t np = probes.k.size(), d = ens.dim;
    for (const Vec& k : probes.k)
        if (k.size() != d) throw DimensionError("probe wavevector dimension differs from the ensemble");
    const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
    // per chunk and probe: sum cos, sum sin, sum cos^2, sum sin^2
    std::vector<double> part(chunks * np * 4, 0.0);
    parallel_for(
        n,
        [&](std::size_t b, std::size_t e) {
            double* acc = part.data() + (b / kChunkSize) * np * 4;
            for (std::size_t i = b; i < e; ++i) {
                const double* x = ens.point(i);
                for (std::size_t j = 0; j < np; ++j) {
                    double ph = 0.0;
                    for (std::size_t c = 0; c < d; ++c) ph += probes.k[j][c] * x[c];
                    const double cs = std::cos(ph), sn = std::sin(ph);
                    acc[4 * j] += cs;
                    acc[4 * j + 1] += sn;
                    acc[4 * j + 2] += cs * cs;
                    acc[4 * j + 3] += sn * sn;
                }
            }
        },
        threads);
    std::vector<CfEstimate> out(np);
    const double nn = static_cast<double>(n);
    for (std::size_t j = 0; j < np; ++j) {
        double s[4] = {0.0, 0.0, 0.0, 0.0};
        for (std::size_t c = 0; c < chunks; ++c)
            for (int q = 0; q < 4; ++q) s[q] += part[(c * np + j) * 4 + q];
        const double mc = s[0] / nn, ms = s[1] / nn;
        out[j].value = {mc, ms};
        out[j].se_re = std::sqrt(std::max(0.0, s[2] / nn - mc * mc) / nn);
        out[j].se_im = std::sqrt(std::max(0.0, s[3] / nn - ms * ms) / nn);
    }
    return out;
}

cplx analytic_cf(const ProcessDescriptor& desc, const Vec& k)
{
    const std::string& p = desc.process;
    const double t = desc.t;
    auto frame_sum = [&](const Vec& kk) {
        cplx s(0.0, 0.0);
        for (std::size_t l = 0; l < desc.frame.dim(); ++l) s += spectral_symbol(desc.alpha, desc.frame[l], kk);
        return s;
    };
    if (p == "advection") {
        const Vec lam = frame_speeds(desc.frame, desc.u);
        if (k.size() != desc.frame.dim()) throw DimensionError("analytic_cf: k dimension differs from the frame");
        return advection_propagator(k, desc.frame, lam, desc.alpha, t);
    }
    if (p == "subordinated-bm") {
        const Direction th = Direction::normalized(desc.theta);
        return std::exp(-t * std::pow(std::abs(th.dot(k)), 2.0 * desc.alpha));
    }
    if (p == "compound-poisson") {
        const double lt = desc.lambda * t;
        if (desc.tau) {
            if (k.size() != 1) throw DimensionError("analytic_cf: the tau-mapped compound Poisson process is scalar");
            return std::exp(lt * (tau_laplace(desc.jump, desc.d, *desc.tau, cplx(0.0, -k[0])) - 1.0));
        }
        return std::exp(lt * (jump_cf(desc.jump, desc.d, k) - 1.0));
    }
    if (p == "subordinated-cp") {
        if (!desc.tau) throw DomainError("analytic_cf: subordinated-cp requires tau");
        const cplx z = frame_sum(k);
        return std::exp(-desc.lambda * t * (1.0 - tau_laplace(desc.jump, desc.d, *desc.tau, z)));
    }
    if (p == "compensated-levy") {
        const std::size_t d = desc.frame.dim();
        const double lt = desc.lambda * t;
        cplx e = lt * (jump_cf(desc.jump, d, k) - 1.0);
        const Vec mean = jump_mean(desc.jump, d);
        if (compensator_active(desc.frame, mean)) {
            Vec mk(k.size());
            for (std::size_t c = 0; c < k.size(); ++c) mk[c] = -k[c];
            for (std::size_t l = 0; l < d; ++l)
                e -= lt * desc.frame[l].dot(mean) * spectral_symbol(desc.alpha, desc.frame[l], mk);
        }
        return std::exp(e);
    }
    if (p == "fp") {
        const Vec lam = frame_speeds(desc.frame, desc.u);
        double ks = 0.0;
        for (double v : k) ks += v;
        const cplx poisson = -desc.lambda * t * (1.0 - std::polar(1.0, ks));
        return std::exp(poisson) * advection_propagator(k, desc.frame, lam, desc.alpha, t);
    }
    throw DomainError("analytic_cf: unknown process '" + p + "'");
}

std::vector<ProbeResult> compare_cf(const Ensemble& ens, const ProbeSet& probes, std::size_t threads)
{
    const std::vector<CfEstimate> est = empirical_cf(ens, probes, threads);
    std::vector<ProbeResult> out(probes.k.size());
    for (std::size_t j = 0; j < probes.k.size(); ++j) {
        ProbeResult& r = out[j];
        r.k = probes.k[j];
        r.analytic = analytic_cf(ens.descriptor, r.k);
        r.empirical = est[j].value;
        r.se_re = est[j].se_re;
        r.se_im = est[j].se_im;
        const cplx diff = r.empirical - r.analytic;
        r.z = std::max(std::abs(diff.real()) / std::max(r.se_re, kMinStdError),
                       std::abs(diff.imag()) / std::max(r.se_im, kMinStdError));
    }
    return out;
}

double max_z(const std::vector<ProbeResult>& r)
{
    double m = 0.0;
    for (const ProbeResult& p : r) m = std::max(m, p.z);
    return m;
}

// ---------------------------------------------------------------- distances

HistogramDistance field_ensemble_distance(const ScalarField& field, const Ensemble& ens, bool periodic)
{
    const Grid& g = field.grid;
    const std::size_t d = g.dim();
    if (ens.dim != d) throw DimensionError("field_ensemble_distance: ensemble and grid dimensions differ");
    const std::size_t n = ens.size();
    if (n == 0) throw DomainError("field_ensemble_distance: empty ensemble");
    std::vector<double> counts(g.size(), 0.0);
    std::size_t outside = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* x = ens.point(i);
        std::size_t flat = 0;
        bool in = true;
        for (std::size_t a = 0; a < d; ++a) {
            const long na = static_cast<long>(g.n(a));
            const double pos = (x[a] - g.origin(a)) / g.dx(a) + 0.5;
            if (!std::isfinite(pos)) {
                in = false;
                break;
            }
            long idx;
            if (periodic) {
                const double w = std::floor(pos);
                idx = static_cast<long>(w - na * std::floor(w / na));
                if (idx >= na) idx -= na;
            } else {
                if (pos < 0.0 || pos >= static_cast<double>(na)) {
                    in = false;
                    break;
                }
                idx = static_cast<long>(pos);
            }
            flat += static_cast<std::size_t>(idx) * g.stride(a);
        }
        if (in) {
            counts[flat] += 1.0;
        } else {
            ++outside;
        }
    }
    HistogramDistance r;
    r.outside_fraction = static_cast<double>(outside) / static_cast<double>(n);
    if (r.outside_fraction > 0.05)
        throw CoverageError("field_ensemble_distance: " + std::to_string(100.0 * r.outside_fraction) +
                            "% of the ensemble lies outside the box");
    const double nin = static_cast<double>(n - outside);
    const double m = mass(field);
    if (!(std::abs(m) > 0.0)) throw DomainError("field_ensemble_distance: field has zero mass");
    const double cv = g.cell_volume();
    double l1 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) l1 += std::abs(field.values[i] / m - counts[i] / (nin * cv)) * cv;
    r.l1 = l1;
    return r;
}

double normalized_l1(const ScalarField& a, const ScalarField& b)
{
    if (a.grid != b.grid) throw DimensionError("normalized_l1: grids differ");
    const double ma = mass(a), mb = mass(b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) s += std::abs(a.values[i] / ma - b.values[i] / mb);
    return s * a.grid.cell_volume();
}

double ks_statistic(std::vector<double> samples,
                    const std::function<std::vector<double>(const std::vector<double>&)>& cdf)
{
    if (samples.empty()) throw DomainError("ks_statistic: no samples");
    std::sort(samples.begin(), samples.end());
    const std::vector<double> F = cdf(samples);
    const double n = static_cast<double>(samples.size());
    double D = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        D = std::max(D, F[i] - static_cast<double>(i) / n);
        D = std::max(D, static_cast<double>(i + 1) / n - F[i]);
    }
    return D;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b)
{
    if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double D = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        D = std::max(D, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return D;
}

// ---------------------------------------------------------------- reports

void ValidationReport::below(const std::string& what, double value, double threshold)
{
    checks.push_back({what, value, threshold, std::isfinite(value) && value < threshold});
}

void ValidationReport::exact(const std::string& what, double value)
{
    checks.push_back({what, value, 0.0, value == 0.0});
}

void ValidationReport::require(const std::string& what, bool ok)
{
    checks.push_back({what, ok ? 1.0 : 0.0, 1.0, ok});
}

void ValidationReport::finalize()
{
    pass = !checks.empty();
    for (const Check& c : checks) pass = pass && c.pass;
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json complex_json(cplx z) { return json::array({finite_or_null(z.real()), finite_or_null(z.imag())}); }

}  // namespace

json to_json(const ValidationReport& r)
{
    json j;
    j["case"] = r.name;
    j["pass"] = r.pass;
    j["seconds"] = r.seconds;
    j["parameters"] = r.parameters;
    j["metrics"] = r.metrics;
    j["checks"] = json::array();
    for (const Check& c : r.checks)
        j["checks"].push_back({{"name", c.name}, {"value", finite_or_null(c.value)}, {"threshold", c.threshold},
                               {"pass", c.pass}});
    j["probes"] = json::array();
    for (const ProbeResult& p : r.probes)
        j["probes"].push_back({{"k", p.k},
                               {"analytic", complex_json(p.analytic)},
                               {"empirical", complex_json(p.empirical)},
                               {"se", json::array({p.se_re, p.se_im})},
                               {"z", finite_or_null(p.z)}});
    return j;
}

// ---------------------------------------------------------------- cases

namespace {

constexpr std::size_t kMillion = 1000000;

std::uint64_t case_seed(const ValidationOptions& opt, const std::string& name, std::uint64_t idx)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : name) h = (h ^ c) * 1099511628211ull;
    return chunk_seed(opt.seed ^ h, idx);
}

Frame rotated_frame(std::size_t d)
{
    if (d == 1) return Frame(std::vector<Vec>{Vec{-1.0}});
    return frame_from_angles(2, {kPi / 6.0});
}

void add_ecf(ValidationReport& rep, const Ensemble& ens, const ProbeSet& probes, std::size_t threads,
             double limit = 4.0)
{
    rep.probes = compare_cf(ens, probes, threads);
    rep.below("ecf max |z|", max_z(rep.probes), limit);
}

double max_abs_diff(const ScalarField& a, const ScalarField& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

ValidationReport case_laplace_grid(const std::string& name, const ValidationOptions& opt)
{
    ValidationReport rep;
    double worst = 0.0;
    std::uint64_t idx = 0;
    json rows = json::array();
    for (double alpha : {0.3, 0.5, 0.7, 0.9}) {
        const StableLaw law(alpha);
        for (double t : {0.5, 1.0, 2.0}) {
            const std::vector<double> h = sample_subordinator(law, t, kMillion, case_seed(opt, name, idx++), opt.threads);
            for (double s : {0.5, 1.0, 2.0}) {
                const LaplaceCheck c = laplace_check(law, s, t, h);
                const double z = std::abs(c.estimate - c.analytic) / c.std_error;
                worst = std::max(worst, z);
                rows.push_back({{"alpha", alpha}, {"s", s}, {"t", t}, {"estimate", c.estimate},
                                {"analytic", c.analytic}, {"se", c.std_error}, {"z", z}});
            }
        }
    }
    rep.parameters = {{"n", kMillion}, {"alpha", {0.3, 0.5, 0.7, 0.9}}, {"s", {0.5, 1, 2}}, {"t", {0.5, 1, 2}}};
    rep.metrics["grid"] = rows;
    rep.below("max |estimate - analytic| / SE", worst, 3.0);
    return rep;
}

ValidationReport case_stable_density(const std::string& name, const ValidationOptions& opt)
{
    ValidationReport rep;
    const double exact = std::exp(-0.25) / (2.0 * std::sqrt(kPi));
    rep.below("|talbot h_1/2(1,1) - closed form|", std::abs(stable_density_talbot(0.5, 1.0) - exact), 1e-6);
    rep.below("|h_1/2(1,1) - closed form|", std::abs(stable_density(StableLaw(0.5), 1.0) - exact), 1e-6);
    std::uint64_t idx = 0;
    for (double alpha : {0.3, 0.5, 0.7, 0.9}) {
        const StableLaw law(alpha);
        std::vector<double> h = sample_subordinator(law, 1.0, 100000, case_seed(opt, name, idx++), opt.threads);
        const double D = ks_statistic(std::move(h), [&](const std::vector<double>& x) { return stable_cdf_sorted(law, x); });
        std::ostringstream os;
        os << "KS(sampler, cdf) alpha=" << alpha;
        rep.below(os.str(), D, 0.01);
    }
    rep.parameters = {{"n", 100000}};
    return rep;
}

struct DualitySetup {
    std::size_t d;
    double alpha;
    bool rotated;
    double length;
    double t;
    std::size_t n_grid;
};

ValidationReport run_duality(const std::string& name, const DualitySetup& s, const ValidationOptions& opt,
                             double ecf_limit = 4.0)
{
    ValidationReport rep;
    const Frame frame = s.rotated ? rotated_frame(s.d) : Frame::canonical(s.d);
    Vec u(s.d, 0.0);
    for (std::size_t l = 0; l < s.d; ++l)
        for (std::size_t c = 0; c < s.d; ++c) u[c] += frame[l][c];
    const Grid g = Grid::cube(s.d, s.n_grid, s.length);
    const ScalarField field = greens_function(frame, u, s.alpha, s.t, g);
    const Ensemble ens = simulate_advection_process(frame, u, s.alpha, s.t, kMillion, case_seed(opt, name, 0), opt.threads);
    const HistogramDistance h = field_ensemble_distance(field, ens, true);
    rep.below("L1(solver, histogram)", h.l1, 0.05);
    const double scale = std::pow(s.t, 1.0 / s.alpha);
    add_ecf(rep, ens, ProbeSet::radial(frame, 0.05 / scale, 5.0 / scale), opt.threads, ecf_limit);
    rep.parameters = {{"d", s.d}, {"alpha", s.alpha}, {"frame", frame_json(frame)}, {"u", u}, {"t", s.t},
                      {"N", s.n_grid}, {"L", s.length}, {"n", kMillion}};
    rep.metrics["mass"] = mass(field);
    rep.metrics["min_value"] = min_value(field);
    return rep;
}

ValidationReport case_translation(const std::string& name, const ValidationOptions& opt)
{
    ValidationReport rep;
    const Frame frame = frame_from_angles(2, {0.3});
    const Vec u{1.0, 0.5};
    const double t = 1.5;
    const Grid g = Grid::cube(2, 128, 24.0);
    auto bump = [](const Vec& x) { return std::exp(-(x[0] * x[0] + x[1] * x[1])); };
    const ScalarField f0 = sample_field(g, bump);
    const ScalarField out = solve_advection(f0, frame, u, 1.0, t);
    const ScalarField ref = sample_field(g, [&](const Vec& x) { return bump({x[0] - u[0] * t, x[1] - u[1] * t}); });
    rep.below("max |solution - translated bump|", max_abs_diff(out, ref), 1e-10);
    const Ensemble ens = simulate_advection_process(frame, u, 1.0, t, 1000, case_seed(opt, name, 0), opt.threads);
    double spread = 0.0;
    for (std::size_t i = 0; i < ens.size(); ++i)
        for (std::size_t c = 0; c < 2; ++c) spread = std::max(spread, std::abs(ens.point(i)[c] - u[c] * t));
    rep.below("max |Z_t - u t|", spread, 1e-12);
    add_ecf(rep, ens, ProbeSet::radial(frame, 0.1, 5.0), opt.threads);
    rep.parameters = {{"frame", frame_json(frame)}, {"u", u}, {"t", t}, {"alpha", 1.0}};
    return rep;
}

ValidationReport case_classical_limits(const std::string&, const ValidationOptions&)
{
    ValidationReport rep;
    {
        const Grid g = Grid::cube(1, 256, 40.0);
        const double u = 1.3, t = 2.1;
        const ScalarField f0 = sample_field(g, [](const Vec& x) { return std::exp(-x[0] * x[0]); });
        const ScalarField out = solve_advection(f0, Frame::canonical(1), {u}, 1.0, t);
        const std::size_t am = static_cast<std::size_t>(
            std::max_element(out.values.begin(), out.values.end()) - out.values.begin());
        rep.below("|argmax - u t| / dx", std::abs(g.coord(0, am) - u * t) / g.dx(0), 1.0 + 1e-12);
    }
    const Grid g2 = Grid::cube(2, 128, 24.0);
    const Frame frame = frame_from_angles(2, {0.7});
    auto gauss = [](const Vec& x) { return std::exp(-(x[0] * x[0] + 2.0 * x[1] * x[1])); };
    const ScalarField f = sample_field(g2, gauss);
    {
        const VectorField grad = fractional_gradient(f, frame, 1.0);
        const ScalarField gx = sample_field(g2, [&](const Vec& x) { return -2.0 * x[0] * gauss(x); });
        const ScalarField gy = sample_field(g2, [&](const Vec& x) { return -4.0 * x[1] * gauss(x); });
        rep.below("max |fractional gradient(beta=1) - gradient|",
                  std::max(max_abs_diff(grad.components[0], gx), max_abs_diff(grad.components[1], gy)), 1e-10);
    }
    {
        const ScalarField lap = directional_operator(f, frame, 2.0);
        const ScalarField ref = sample_field(g2, [&](const Vec& x) {
            return ((4.0 * x[0] * x[0] - 2.0) + (16.0 * x[1] * x[1] - 4.0)) * gauss(x);
        });
        rep.below("max |directional operator(beta=2) - Laplacian|", max_abs_diff(lap, ref), 1e-10);
    }
    {
        const Grid g = Grid::cube(1, 256, 40.0);
        const ScalarField h = sample_field(g, [](const Vec& x) { return std::exp(-x[0] * x[0]); });
        const ScalarField r = riesz_derivative_1d(h, 2.0);
        const ScalarField ref =
            sample_field(g, [](const Vec& x) { return (4.0 * x[0] * x[0] - 2.0) * std::exp(-x[0] * x[0]); });
        rep.below("max |Riesz(order 2) - second derivative|", max_abs_diff(r, ref), 1e-10);
    }
    return rep;
}

ValidationReport case_fade_factorization(const std::string&, const ValidationOptions&)
{
    ValidationReport rep;
    const Frame frame = frame_from_angles(2, {0.4});
    const Vec u{1.0, 0.6};
    const double alpha = 0.6, beta = 1.5, t = 0.8;
    const Grid g = Grid::cube(2, 128, 32.0);
    const ScalarField f0 = sample_field(g, [](const Vec& x) { return std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1])); });
    const ScalarField fade = solve_fade(f0, frame, u, alpha, beta, t);
    const ScalarField split = solve_dispersion(solve_advection(f0, frame, u, alpha, t), frame, beta, t);
    const ScalarField split2 = solve_advection(solve_dispersion(f0, frame, beta, t), frame, u, alpha, t);
    const double scale = max_abs(fade);
    rep.below("max |fade - dispersion(advection)| / max", max_abs_diff(fade, split) / scale, 1e-10);
    rep.below("max |fade - advection(dispersion)| / max", max_abs_diff(fade, split2) / scale, 1e-10);
    rep.parameters = {{"frame", frame_json(frame)}, {"u", u}, {"alpha", alpha}, {"beta", beta}, {"t", t}};
    return rep;
}

ValidationReport case_fade_gaussian(const std::string&, const ValidationOptions&)
{
    ValidationReport rep;
    const double beta = 1.99, t = 1.0;
    const Grid g = Grid::cube(1, 1024, 80.0);
    const ScalarField out = solve_fade(delta_field(g), Frame::canonical(1), {0.0}, 0.5, beta, t);
    const ScalarField gauss =
        sample_field(g, [&](const Vec& x) { return std::exp(-x[0] * x[0] / (4.0 * t)) / std::sqrt(4.0 * kPi * t); });
    rep.below("L1(fade beta=1.99 u=0, heat kernel)", l1_distance(out, gauss), 2e-2);
    rep.parameters = {{"beta", beta}, {"t", t}, {"N", 1024}, {"L", 80.0}};
    return rep;
}

// Cauchy law with scale t wrapped onto a circle of length L.
double periodic_cauchy(double x, double t, double L)
{
    const double a = 2.0 * kPi * t / L, b = 2.0 * kPi * x / L;
    return std::sinh(a) / (L * (std::cosh(a) - std::cos(b)));
}

ValidationReport case_cauchy(const std::string& name, const ValidationOptions& opt)
{
    ValidationReport rep;
    const double t = 1.0, L = 200.0;
    const std::size_t N = 4096;
    const Grid g = Grid::cube(1, N, L);
    const Direction theta({1.0});
    const ScalarField spec = solve_heat_directional(delta_field(g), theta, 0.5, t);
    const ScalarField sub = solve_heat_directional_subordination(delta_field(g), theta, 0.5, t);
    const ScalarField wrapped = sample_field(g, [&](const Vec& x) { return periodic_cauchy(x[0], t, L); });
    const ScalarField line = sample_field(g, [&](const Vec& x) { return t / (kPi * (x[0] * x[0] + t * t)); });
    rep.below("L1(spectral solver, periodized Cauchy)", l1_distance(spec, wrapped), 5e-3);
    rep.below("L1(subordination solver, periodized Cauchy)", l1_distance(sub, wrapped), 5e-3);
    rep.metrics["l1_spectral_vs_line_cauchy"] = l1_distance(spec, line);
    rep.metrics["cauchy_mass_outside_box"] = 1.0 - 2.0 / kPi * std::atan(0.5 * L / t);
    rep.below("|C(1/2) - 1/pi|", std::abs(hypersingular_constant(0.5) - 1.0 / kPi), 1e-16);
    const Ensemble ens = simulate_subordinated_bm({1.0}, 0.5, t, kMillion, case_seed(opt, name, 0), opt.threads);
    rep.below("L1(solver, wrapped histogram)", field_ensemble_distance(spec, ens, true).l1, 0.05);
    const HistogramDistance plain = field_ensemble_distance(line, ens, false);
    rep.below("L1(Cauchy density, histogram)", plain.l1, 0.05);
    rep.metrics["outside_fraction"] = plain.outside_fraction;
    add_ecf(rep, ens, ProbeSet::radial(Frame::canonical(1), 0.05, 5.0), opt.threads);
    rep.parameters = {{"alpha", 0.5}, {"t", t}, {"theta", {1.0}}, {"N", N}, {"L", L}, {"n", kMillion}};
    return rep;
}

ValidationReport case_fp(const std::string& name, const ValidationOptions& opt)
{
    ValidationReport rep;
    const double alpha = 0.5, lambda = 1.0, t = 1.0;
    const Frame frame = Frame::canonical(1);
    const Vec u{1.0};
    const Grid g = Grid::cube(1, 1024, 64.0);
    const ScalarField delta = delta_field(g);
    const ScalarField fp = solve_fp_transport(delta, frame, u, alpha, lambda, t);
    const ScalarField direct = apply_symbol(delta, [&](const Vec& k) {
        return std::exp(-lambda * t * (1.0 - std::polar(1.0, k[0])) - t * spectral_symbol(alpha, k[0]));
    });
    rep.below("max |Poisson sum - spectral exponent| / max", max_abs_diff(fp, direct) / max_abs(direct), 1e-6);
    rep.exact("max |fp(lambda=0) - advection|",
              max_abs_diff(solve_fp_transport(delta, frame, u, alpha, 0.0, t), solve_advection(delta, frame, u, alpha, t)));
    const Ensemble ens = simulate_fp_process(frame, u, alpha, lambda, t, kMillion, case_seed(opt, name, 0), opt.threads);
    rep.below("L1(solver, histogram)", field_ensemble_distance(fp, ens, true).l1, 0.05);
    add_ecf(rep, ens, ProbeSet::radial(frame, 0.05, 5.0), opt.threads);
    rep.parameters = {{"alpha", alpha}, {"lambda", lambda}, {"t", t}, {"u", u}, {"N", 1024}, {"L", 64.0}, {"n", kMillion}};
    return rep;
}

ValidationReport run_process_ecf(const std::string& name, const ProcessDescriptor& desc, double kmin, double kmax,
                                 const ValidationOptions& opt)
{
    ValidationReport rep;
    const Ensemble ens = simulate(desc, kMillion, case_seed(opt, name, 0), opt.threads);
    add_ecf(rep, ens, ProbeSet::radial(desc.frame, kmin, kmax), opt.threads);
    rep.parameters = {{"process", desc.process}, {"d", desc.d},         {"frame", frame_json(desc.frame)},
                      {"alpha", desc.alpha},     {"lambda", desc.lambda}, {"t", desc.t},
                      {"jump", to_string(desc.jump.kind)}, {"n", kMillion}};
    if (desc.jump.kind == JumpLaw::Kind::FoldedGaussian)
        rep.parameters["jump_params"] = {{"beta", desc.jump.beta}, {"r", desc.jump.r}, {"p", desc.jump.p}};
    if (desc.tau) rep.parameters["tau"] = to_string(*desc.tau);
    return rep;
}

ProcessDescriptor subordinated_cp_setting(int which)
{
    ProcessDescriptor d;
    d.process = "subordinated-cp";
    if (which == 0) {
        d.d = 1;
        d.frame = Frame::canonical(1);
        d.alpha = 0.5;
        d.lambda = 2.0;
        d.t = 1.0;
        d.jump = JumpLaw::folded_gaussian(0.8, 0.5, 0.7);
        d.tau = TauMap::AbsSum;
    } else {
        d.d = 2;
        d.frame = rotated_frame(2);
        d.alpha = 0.7;
        d.lambda = 1.5;
        d.t = 1.0;
        d.jump = JumpLaw::table({{0.5, 0.2}, {1.0, 1.5}, {0.1, 0.3}}, {0.3, 0.5, 0.2});
        d.tau = TauMap::Norm;
    }
    return d;
}

ProcessDescriptor compensated_setting(int which)
{
    ProcessDescriptor d;
    d.process = "compensated-levy";
    if (which == 0) {
        d.d = 1;
        d.frame = Frame::canonical(1);
        d.alpha = 0.6;
        d.lambda = 1.5;
        d.t = 1.0;
        d.jump = JumpLaw::folded_gaussian(0.9, 0.5, 0.8);
    } else {
        d.d = 2;
        d.frame = frame_from_angles(2, {0.3});
        d.alpha = 0.6;
        d.lambda = 1.0;
        d.t = 1.0;
        d.jump = JumpLaw::folded_gaussian(1.2, 0.4, 0.8);
    }
    return d;
}

ValidationReport case_multiplier(const std::string&, const ValidationOptions&)
{
    ValidationReport rep;
    const double beta = 0.4;
    const Frame f = Frame::canonical(1);
    std::vector<double> ratios;
    json lim = json::array();
    for (double k : {0.5, 1.0, 2.0}) {
        const cplx phi = levy_khinchine_limit({k}, f, 0.5, beta, 0.5);
        ratios.push_back(phi.real() / -std::pow(std::abs(k), 2.0 * beta));
        lim.push_back({{"k", k}, {"phi", complex_json(phi)}, {"ratio", ratios.back()}});
    }
    const auto [mn, mx] = std::minmax_element(ratios.begin(), ratios.end());
    const double mean = (ratios[0] + ratios[1] + ratios[2]) / 3.0;
    rep.below("spread of Phi(k) / -|k|^{2 beta} over k", (*mx - *mn) / std::abs(mean), 1e-3);
    rep.metrics["limit"] = lim;
    rep.metrics["normalization"] = mean;
    rep.metrics["closed_form_normalization"] = -levy_khinchine_limit_closed_form_1d(1.0, beta);

    const double k = 1.0;
    std::vector<double> seq;
    json conv = json::array();
    for (double r : {1e-1, 1e-2, 1e-3, 1e-4}) {
        const cplx phi = levy_khinchine_multiplier({k}, f, 0.5, beta, r, 0.5);
        seq.push_back(phi.real() * std::pow(r, -beta));
        conv.push_back({{"r", r}, {"scaled", seq.back()}});
    }
    bool monotone = true;
    for (std::size_t i = 2; i < seq.size(); ++i)
        monotone = monotone && std::abs(seq[i] - seq[i - 1]) < std::abs(seq[i - 1] - seq[i - 2]);
    rep.require("r^{-beta} Phi_r(k): Cauchy differences decrease", monotone);
    const double limit = levy_khinchine_limit({k}, f, 0.5, beta, 0.5).real();
    rep.below("|r^{-beta} Phi_r - Phi| / |Phi| at r=1e-4", std::abs(seq.back() - limit) / std::abs(limit), 1e-2);
    rep.metrics["convergence"] = conv;
    if (seq.size() >= 3) {
        const double d1 = std::abs(seq[seq.size() - 2] - seq[seq.size() - 3]);
        const double d2 = std::abs(seq.back() - seq[seq.size() - 2]);
        rep.metrics["observed_rate_per_decade"] = std::log10(d1 / d2);
    }
    try {
        levy_khinchine_limit({k}, f, 0.5, beta, 0.8);
        rep.metrics["skewed_limit"] = "finite";
    } catch (const QuadratureError& e) {
        rep.metrics["skewed_limit"] = e.what();
    }
    rep.parameters = {{"beta", beta}, {"alpha", 0.5}, {"p", 0.5}, {"d", 1}};
    return rep;
}

ValidationReport case_three_way(const std::string&, const ValidationOptions&)
{
    ValidationReport rep;
    const std::size_t N = 512;
    const double L = 2.0 * kPi;
    const Grid g({N}, {L}, {0.0});
    auto fn = [](double x) { return std::exp(std::cos(x)); };
    const ScalarField f = sample_field(g, [&](const Vec& x) { return fn(x[0]); });
    const Direction theta({1.0});
    for (double beta : {0.3, 0.5, 0.8}) {
        const ScalarField sp = apply_directional_fractional(f, theta, beta);
        const ScalarField gl = directional_derivative_gl(f, 0, beta);
        ScalarField ma(g);
        MarchaudOptions mo;
        mo.period = L;
        mo.directional_gradient = [](const Vec& x) { return -std::sin(x[0]) * std::exp(std::cos(x[0])); };
        parallel_for(N, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i)
                ma.values[i] = directional_derivative_marchaud([&](const Vec& x) { return fn(x[0]); }, g.point(i), theta,
                                                               beta, mo);
        }, 0, 16);
        std::ostringstream a, b, c;
        a << "max |spectral - GL| beta=" << beta;
        b << "max |spectral - Marchaud| beta=" << beta;
        c << "max |GL - Marchaud| beta=" << beta;
        rep.below(a.str(), max_abs_diff(sp, gl), 2e-3);
        rep.below(b.str(), max_abs_diff(sp, ma), 2e-3);
        rep.below(c.str(), max_abs_diff(gl, ma), 2e-3);
    }
    rep.parameters = {{"function", "exp(cos x)"}, {"N", N}, {"L", L}};
    return rep;
}

ValidationReport case_determinism(const std::string& name, const ValidationOptions& opt)
{
    ValidationReport rep;
    const Frame frame = rotated_frame(2);
    const Vec u{frame[0][0] + frame[1][0], frame[0][1] + frame[1][1]};
    const std::uint64_t seed = case_seed(opt, name, 0);
    const Ensemble a = simulate_advection_process(frame, u, 0.7, 1.0, 100000, seed, 1);
    const Ensemble b = simulate_advection_process(frame, u, 0.7, 1.0, 100000, seed, 8);
    rep.exact("advection ensemble: differing bytes (1 vs 8 threads)",
              std::memcmp(a.points.data(), b.points.data(), a.points.size() * sizeof(double)) == 0 ? 0.0 : 1.0);
    const ProcessDescriptor cl = compensated_setting(1);
    const Ensemble c = simulate(cl, 50000, seed, 1);
    const Ensemble e = simulate(cl, 50000, seed, 3);
    rep.exact("compensated ensemble: differing bytes (1 vs 3 threads)",
              std::memcmp(c.points.data(), e.points.data(), c.points.size() * sizeof(double)) == 0 ? 0.0 : 1.0);
    return rep;
}

using CaseFn = std::function<ValidationReport(const std::string&, const ValidationOptions&)>;

const std::vector<std::pair<std::string, CaseFn>>& registry()
{
    static const std::vector<std::pair<std::string, CaseFn>> cases = [] {
        std::vector<std::pair<std::string, CaseFn>> c;
        c.emplace_back("laplace-grid", case_laplace_grid);
        c.emplace_back("stable-density", case_stable_density);
        c.emplace_back("thm31-translation", case_translation);
        const std::vector<DualitySetup> setups = {
            {1, 0.5, false, 16.0, 1.0, 256}, {1, 0.5, true, 16.0, 1.0, 256},
            {1, 0.8, false, 16.0, 1.0, 256}, {1, 0.8, true, 16.0, 1.0, 256},
            {2, 0.5, false, 32.0, 1.0, 256}, {2, 0.5, true, 32.0, 1.0, 256},
            {2, 0.8, false, 32.0, 1.0, 256}, {2, 0.8, true, 32.0, 1.0, 256},
        };
        for (const DualitySetup& s : setups) {
            std::ostringstream os;
            os << "duality-d" << s.d << "-a" << s.alpha << (s.rotated ? "-rotated" : "-canonical");
            c.emplace_back(os.str(), [s](const std::string& n, const ValidationOptions& o) { return run_duality(n, s, o); });
        }
        c.emplace_back("thm32-d2", [](const std::string& n, const ValidationOptions& o) {
            return run_duality(n, {2, 0.7, true, 4.0, 1.0, 32}, o, 3.0);
        });
        c.emplace_back("classical-limits", case_classical_limits);
        c.emplace_back("fade-factorization", case_fade_factorization);
        c.emplace_back("fade-gaussian-limit", case_fade_gaussian);
        c.emplace_back("thm71-cauchy", case_cauchy);
        c.emplace_back("three-way", case_three_way);
        c.emplace_back("thm62-fp", case_fp);
        for (int w = 0; w < 2; ++w) {
            c.emplace_back(std::string("thm42-") + (w == 0 ? "d1" : "d2"), [w](const std::string& n, const ValidationOptions& o) {
                return run_process_ecf(n, subordinated_cp_setting(w), 0.05, 5.0, o);
            });
        }
        for (int w = 0; w < 2; ++w) {
            c.emplace_back(std::string("thm51-") + (w == 0 ? "d1" : "d2"), [w](const std::string& n, const ValidationOptions& o) {
                return run_process_ecf(n, compensated_setting(w), 0.05, 5.0, o);
            });
        }
        c.emplace_back("thm52-multiplier", case_multiplier);
        c.emplace_back("determinism", case_determinism);
        return c;
    }();
    return cases;
}

}  // namespace

std::vector<std::string> validation_cases()
{
    std::vector<std::string> names;
    for (const auto& c : registry()) names.push_back(c.first);
    return names;
}

bool is_validation_case(const std::string& name)
{
    for (const auto& c : registry())
        if (c.first == name) return true;
    return false;
}

ValidationReport run_validation(const std::string& name, const ValidationOptions& opt)
{
    for (const auto& c : registry()) {
        if (c.first != name) continue;
        const auto t0 = std::chrono::steady_clock::now();
        ValidationReport rep;
        try {
            rep = c.second(name, opt);
        } catch (const Error& e) {
            throw Error("validation case '" + name + "': " + e.what());
        }
        rep.name = name;
        rep.parameters["seed"] = opt.seed;
        rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rep.finalize();
        return rep;
    }
    throw DomainError("unknown validation case '" + name + "'");
}

}  // namespace fracflow
