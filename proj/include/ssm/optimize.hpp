// Derivative-free minimisation.
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ssm {

using Objective = std::function<double(std::span<const double>)>;

struct NelderMeadOptions {
  double initial_step = 0.5;  ///< simplex edge length along each axis
  double f_tol = 1e-8;        ///< converged when max f - min f over the simplex is below this
  std::size_t max_evals = 100'000;
  int max_restarts = 20;  ///< fresh simplices around the incumbent after convergence
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  bool converged = false;
  std::size_t n_evals = 0;
};

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2). Non-finite objective values are treated as +inf. After
/// convergence the search restarts from the best vertex until a restart
/// improves by no more than f_tol.
NelderMeadResult nelder_mead_minimize(const Objective& f, std::vector<double> x0,
                                      const NelderMeadOptions& options = {});

}  // namespace ssm
