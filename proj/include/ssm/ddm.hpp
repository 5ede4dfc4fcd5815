// Diffusion decision model: unit-variance Wiener process with drift nu,
// started at z * alpha, absorbed at alpha (choice 1) or 0 (choice 2).
#pragma once

#include <cstddef>
#include <cstdint>

#include "ssm/core.hpp"

namespace ssm {

inline constexpr double kDdmDefaultDt = 1e-4;
inline constexpr double kDdmSeriesTolerance = 1e-7;
inline constexpr std::size_t kDefaultMaxSteps = 10'000'000;

/// Euler-Maruyama sampler. Crossings are located by linear interpolation
/// between the last interior and first exterior point.
Dataset ddm_sample(const DDMParams& p, std::size_t n, std::uint64_t seed,
                   double dt = kDdmDefaultDt, unsigned threads = 1);

/// Defective first-passage density of the given boundary at absolute time t.
/// Zero for t <= tau.
double ddm_pdf(const DDMParams& p, int choice, double t);
double ddm_logpdf(const DDMParams& p, int choice, double t);

/// P(choice, rt <= t) by adaptive quadrature of ddm_pdf. t may be +inf.
double ddm_cdf(const DDMParams& p, int choice, double t);

/// Gambler's-ruin hitting probability.
double ddm_choice_prob(const DDMParams& p, int choice);

Trace ddm_trace(const DDMParams& p, double dt, std::uint64_t seed,
                std::size_t max_steps = kDefaultMaxSteps);

namespace ddm_series {

// Both expansions evaluate the log of the standardised lower-boundary
// density f(u | nu = 0, alpha = 1, w) at normalised time u = s / alpha^2.

/// Terms needed so that truncation error is below eps.
double small_time_terms(double u, double eps);
double large_time_terms(double u, double eps);

double log_small_time(double u, double w, double eps);
double log_large_time(double u, double w, double eps);

/// Picks whichever expansion needs fewer terms.
double log_standard_density(double u, double w, double eps);

}  // namespace ddm_series

}  // namespace ssm
