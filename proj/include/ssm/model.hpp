// ModelSpec-level dispatch to the three model families.
#pragma once

#include <cstddef>
#include <cstdint>

#include "ssm/core.hpp"

namespace ssm {

double model_pdf(const ModelSpec& spec, int choice, double t);
double model_logpdf(const ModelSpec& spec, int choice, double t);

/// P(choice, rt <= t), by quadrature of the density for LBA and RDM.
double model_cdf(const ModelSpec& spec, int choice, double t);
/// model_cdf at t = +inf.
double model_choice_prob(const ModelSpec& spec, int choice);

struct SampleOptions {
  double dt = 1e-4;  ///< DDM Euler step; ignored by the exact samplers
  unsigned threads = 1;
};

Dataset model_sample(const ModelSpec& spec, std::size_t n, std::uint64_t seed,
                     const SampleOptions& options = {});

/// dt is ignored for the LBA, whose paths are exact straight lines.
Trace model_trace(const ModelSpec& spec, double dt, std::uint64_t seed);

}  // namespace ssm
