// Adaptive random-walk Metropolis on R^d.
//
// A stored iteration is the state after `thin` Metropolis moves; window
// lengths below count stored iterations.
//
// Warmup: an initial buffer (15%), slow windows that double in length from
// 25 iterations, and a terminal buffer (10%). At the end of each slow
// window the proposal covariance is re-estimated from that window's draws
// (diagonal for the first window, full afterwards, shrunk towards
// 1e-3 * I). The global proposal scale follows a Robbins-Monro recursion
// towards the target acceptance rate throughout warmup. Everything is
// frozen once warmup ends.
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ssm/rng.hpp"

namespace ssm {

using LogDensity = std::function<double(std::span<const double>)>;

struct MetropolisOptions {
  std::size_t warmup = 1000;
  std::size_t samples = 1000;
  /// Metropolis moves per stored draw (warmup and sampling alike).
  std::size_t thin = 1;
  double target_accept = 0.234;
};

struct MetropolisRun {
  std::size_t dim = 0;
  std::vector<double> draws;  ///< [(warmup + samples) x dim], row-major
  std::vector<double> log_density;
  double warmup_accept_rate = 0.0;  ///< per move
  double sampling_accept_rate = 0.0;
  double proposal_scale = 0.0;
  std::vector<double> proposal_covariance;  ///< dim x dim, frozen value
};

/// `init` must have finite log density. Proposals with non-finite log
/// density are rejected.
MetropolisRun adaptive_metropolis(const LogDensity& log_density, std::vector<double> init,
                                  const MetropolisOptions& options, Rng& rng);

}  // namespace ssm
