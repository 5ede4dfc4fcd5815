// Linear ballistic accumulator: each accumulator starts at U(0, A), rises
// linearly with a trial-level drift N(nu_i, sigma) and the first to reach
// b = A + k determines choice and decision time.
#pragma once

#include <cstddef>
#include <cstdint>

#include "ssm/core.hpp"

namespace ssm {

/// Trials where every drift is <= 0 are redrawn; throws NumericError after
/// 1000 consecutive such draws. A warning is stored in meta.warnings when
/// lba_all_negative_mass(p) > 1e-4.
Dataset lba_sample(const LBAParams& p, std::size_t n, std::uint64_t seed, unsigned threads = 1);

double lba_pdf(const LBAParams& p, int choice, double t);
double lba_logpdf(const LBAParams& p, int choice, double t);

/// Straight-line paths sampled on a uniform grid of `grid_points` times
/// from tau to the crossing.
Trace lba_trace(const LBAParams& p, std::uint64_t seed, std::size_t grid_points = 100);

/// Probability that every drift is non-positive: prod_i Phi(-nu_i / sigma).
/// This mass is missing from the (unconditioned) density.
double lba_all_negative_mass(const LBAParams& p);

/// Start-point-integrated single-accumulator density and CDF at decision
/// time s (tau already removed). Both are 0 for s <= 1e-12.
double lba_accumulator_pdf(const LBAParams& p, double drift, double s);
double lba_accumulator_cdf(const LBAParams& p, double drift, double s);

}  // namespace ssm
