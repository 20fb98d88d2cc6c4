#pragma once

#include "fracflow/random.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fracflow {

// One-sided stable subordinator with E exp(-s H_t) = exp(-t s^alpha).
class StableLaw {
public:
    explicit StableLaw(double alpha);
    double alpha() const { return alpha_; }
    // alpha = 1: H_t = t almost surely.
    bool degenerate() const { return alpha_ == 1.0; }

private:
    double alpha_;
};

// h_alpha(x, t). Throws DegenerateLawError for alpha = 1, DomainError for x <= 0 or t <= 0.
double stable_density(const StableLaw& law, double x, double t = 1.0);
// P(H_t <= x), by quadrature of the density.
double stable_cdf(const StableLaw& law, double x, double t = 1.0);
// CDF at every point of an ascending list; cheaper than repeated stable_cdf calls.
std::vector<double> stable_cdf_sorted(const StableLaw& law, const std::vector<double>& sorted_x, double t = 1.0);

// The two evaluation paths, exposed for cross-checking. Both are for t = 1.
// Series in x^{-alpha k - 1}; sets *ok = false when cancellation makes it unreliable.
double stable_density_series(double alpha, double x, bool* ok = nullptr);
// Fixed Talbot inversion of exp(-s^alpha).
double stable_density_talbot(double alpha, double x, int m = 32);

// Draws one H_t (Kanter's representation).
double sample_subordinator_one(const StableLaw& law, double t, Rng& rng);
std::vector<double> sample_subordinator(const StableLaw& law, double t, std::size_t n, std::uint64_t seed,
                                        std::size_t threads = 0);

struct LaplaceCheck {
    double estimate;
    double std_error;
    double analytic;
};

LaplaceCheck laplace_check(const StableLaw& law, double s, double t, std::size_t n, std::uint64_t seed,
                           std::size_t threads = 0);
// Same estimate from existing samples of H_t.
LaplaceCheck laplace_check(const StableLaw& law, double s, double t, const std::vector<double>& samples);

}  // namespace fracflow
