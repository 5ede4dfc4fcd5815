// Posterior summaries and convergence diagnostics: rank-normalised
// split-R-hat and autocorrelation-based effective sample size.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ssm/inference.hpp"

namespace ssm {

struct ParamSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double mcse = 0.0;  ///< Monte Carlo standard error of the mean
  double ess = 0.0;   ///< bulk ESS
  double rhat = 0.0;  ///< max of bulk and tail rank-normalised split-R-hat
};

/// Throws DomainError with fewer than 4 post-warmup draws per chain.
std::vector<ParamSummary> summarystats(const Chains& chains);

/// Building blocks over draws[chain][iteration]; chains must be equal length.
double split_rhat(const std::vector<std::vector<double>>& draws);
double ess_bulk(const std::vector<std::vector<double>>& draws);
/// ESS of the raw (not rank-normalised) split chains; used for the mean's MCSE.
double ess_mean(const std::vector<std::vector<double>>& draws);

std::string format_summary_table(const std::vector<ParamSummary>& rows);
nlohmann::json summary_to_json(const std::vector<ParamSummary>& rows);

}  // namespace ssm
