#pragma once

#include "fracflow/core.hpp"
#include "fracflow/stochastic.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fracflow {

struct ProbeSet {
    std::vector<Vec> k;

    // k = 0 plus log-spaced radii in [kmin, kmax] along frame directions and their
    // diagonals; at most `max_probes` wavevectors in total.
    static ProbeSet radial(const Frame& frame, double kmin, double kmax, std::size_t max_probes = 25);
};

struct CfEstimate {
    cplx value;
    double se_re = 0.0;
    double se_im = 0.0;
};

// (1/n) sum exp(i k.x_i) and per-part standard errors; requires n >= 100.
std::vector<CfEstimate> empirical_cf(const Ensemble& ens, const ProbeSet& probes, std::size_t threads = 0);
// Characteristic function of the process named by the descriptor at time desc.t.
cplx analytic_cf(const ProcessDescriptor& desc, const Vec& k);

struct ProbeResult {
    Vec k;
    cplx analytic;
    cplx empirical;
    double se_re = 0.0;
    double se_im = 0.0;
    double z = 0.0;
};

// Standard errors below this are floored when forming z-scores.
inline constexpr double kMinStdError = 1e-6;
std::vector<ProbeResult> compare_cf(const Ensemble& ens, const ProbeSet& probes, std::size_t threads = 0);
double max_z(const std::vector<ProbeResult>& r);

struct HistogramDistance {
    double l1 = 0.0;
    double outside_fraction = 0.0;
};

// Histograms the ensemble on cells centred at the grid points and returns the L1 distance
// between the two normalized densities. With periodic = true points are wrapped into the box,
// which is the right comparison for solver output on the periodic grid. Without wrapping,
// more than 5% of points outside the box raises CoverageError.
HistogramDistance field_ensemble_distance(const ScalarField& field, const Ensemble& ens, bool periodic = false);
// L1 distance of two fields on the same grid after normalizing each to unit mass.
double normalized_l1(const ScalarField& a, const ScalarField& b);

// sup |F_n - F|; sorts the samples.
double ks_statistic(std::vector<double> samples, const std::function<std::vector<double>(const std::vector<double>&)>& cdf);
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct Check {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct ValidationReport {
    std::string name;
    bool pass = false;
    std::vector<Check> checks;
    std::vector<ProbeResult> probes;
    nlohmann::json parameters = nlohmann::json::object();
    // Informational numbers that do not gate the pass flag.
    nlohmann::json metrics = nlohmann::json::object();
    double seconds = 0.0;

    // Appends a check of value < threshold.
    void below(const std::string& what, double value, double threshold);
    // Appends a check that value is exactly zero.
    void exact(const std::string& what, double value);
    void require(const std::string& what, bool ok);
    void finalize();
};

nlohmann::json to_json(const ValidationReport& r);

struct ValidationOptions {
    std::uint64_t seed = 1;
    std::size_t threads = 0;
};

std::vector<std::string> validation_cases();
bool is_validation_case(const std::string& name);
// Throws DomainError for an unregistered name.
ValidationReport run_validation(const std::string& name, const ValidationOptions& opt = {});

}  // namespace fracflow
