// Racing diffusion model: each accumulator is a unit-diffusion Wiener
// process with drift nu_i > 0 started at U(0, A); the first to hit
// b = A + k wins. Single-racer finishing times are start-point mixtures
// of Wald (inverse Gaussian) distributions.
#pragma once

#include <cstddef>
#include <cstdint>

#include "ssm/core.hpp"
#include "ssm/rng.hpp"

namespace ssm {

inline constexpr double kRdmDefaultDt = 1e-3;

/// Exact sampler: inverse-Gaussian variates per racer.
Dataset rdm_sample(const RDMParams& p, std::size_t n, std::uint64_t seed, unsigned threads = 1);

double rdm_pdf(const RDMParams& p, int choice, double t);
double rdm_logpdf(const RDMParams& p, int choice, double t);

/// Euler-Maruyama paths for every racer until the first one reaches b.
Trace rdm_trace(const RDMParams& p, double dt, std::uint64_t seed,
                std::size_t max_steps = 10'000'000);

/// Start-point-integrated single-racer density and CDF at decision time s.
/// Falls back to the fixed-start Wald form (distance b) when A < 1e-6 b.
double rdm_accumulator_pdf(const RDMParams& p, double drift, double s);
double rdm_accumulator_cdf(const RDMParams& p, double drift, double s);

/// Wald first-passage density / CDF for distance d, drift v, unit diffusion.
double wald_pdf(double d, double v, double s);
double wald_cdf(double d, double v, double s);

/// Inverse-Gaussian variate with mean mu and shape lambda
/// (transformation with one rejection step).
double sample_inverse_gaussian(double mu, double lambda, Rng& rng);

}  // namespace ssm
