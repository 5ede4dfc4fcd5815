#include "ssm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "ssm/math.hpp"

namespace ssm {

namespace {

using Matrix = std::vector<std::vector<double>>;

double mean_of(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance_of(const std::vector<double>& x) {
  const double m = mean_of(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

Matrix split_chains(const Matrix& draws) {
  Matrix out;
  for (const auto& chain : draws) {
    const std::size_t half = chain.size() / 2;
    out.emplace_back(chain.begin(), chain.begin() + half);
    // An odd middle draw is dropped.
    out.emplace_back(chain.end() - half, chain.end());
  }
  return out;
}

// Pooled ranks (ties averaged) mapped through the normal quantile with the
// Blom offset (r - 3/8) / (S + 1/4).
Matrix rank_normalize(const Matrix& draws) {
  std::vector<std::pair<double, std::size_t>> pooled;
  for (std::size_t c = 0; c < draws.size(); ++c) {
    for (std::size_t i = 0; i < draws[c].size(); ++i) {
      pooled.emplace_back(draws[c][i], c * draws[0].size() + i);
    }
  }
  std::sort(pooled.begin(), pooled.end());
  const double total = static_cast<double>(pooled.size());
  Matrix out(draws.size(), std::vector<double>(draws.empty() ? 0 : draws[0].size()));
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j + 1 < pooled.size() && pooled[j + 1].first == pooled[i].first) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    const double z = math::normal_quantile((rank - 0.375) / (total + 0.25));
    for (std::size_t k = i; k <= j; ++k) {
      const std::size_t idx = pooled[k].second;
      out[idx / draws[0].size()][idx % draws[0].size()] = z;
    }
    i = j + 1;
  }
  return out;
}

double basic_rhat(const Matrix& chains) {
  const double n = static_cast<double>(chains[0].size());
  std::vector<double> means, variances;
  for (const auto& chain : chains) {
    means.push_back(mean_of(chain));
    variances.push_back(variance_of(chain));
  }
  const double within = mean_of(variances);
  const double between_over_n = variance_of(means);
  if (within == 0.0) {
    return between_over_n > 0.0 ? std::numeric_limits<double>::infinity()
                                : std::numeric_limits<double>::quiet_NaN();
  }
  const double var_plus = (n - 1.0) / n * within + between_over_n;
  return std::sqrt(var_plus / within);
}

// Biased autocovariance at lag k.
double autocovariance(const std::vector<double>& x, double mean, std::size_t lag) {
  double sum = 0.0;
  for (std::size_t i = 0; i + lag < x.size(); ++i) sum += (x[i] - mean) * (x[i + lag] - mean);
  return sum / static_cast<double>(x.size());
}

// Geyer's initial monotone sequence estimator across chains.
double basic_ess(const Matrix& chains) {
  const std::size_t m = chains.size();
  const std::size_t n = chains[0].size();
  std::vector<double> means(m);
  for (std::size_t c = 0; c < m; ++c) means[c] = mean_of(chains[c]);
  const auto mean_acov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t c = 0; c < m; ++c) s += autocovariance(chains[c], means[c], lag);
    return s / static_cast<double>(m);
  };
  const double nn = static_cast<double>(n);
  const double mean_var = mean_acov(0) * nn / (nn - 1.0);
  double var_plus = mean_var * (nn - 1.0) / nn;
  if (m > 1) var_plus += variance_of(means);
  if (!(var_plus > 0.0)) return std::numeric_limits<double>::quiet_NaN();

  std::vector<double> rho(n, 0.0);
  rho[0] = 1.0;
  double rho_even = 1.0;
  double rho_odd = 1.0 - (mean_var - mean_acov(1)) / var_plus;
  rho[1] = rho_odd;
  std::size_t t = 1;
  while (t + 5 < n && rho_even + rho_odd > 0.0) {
    rho_even = 1.0 - (mean_var - mean_acov(t + 1)) / var_plus;
    rho_odd = 1.0 - (mean_var - mean_acov(t + 2)) / var_plus;
    if (rho_even + rho_odd >= 0.0) {
      rho[t + 1] = rho_even;
      rho[t + 2] = rho_odd;
    }
    t += 2;
  }
  const std::size_t max_t = t;
  if (rho_even > 0.0 && max_t + 1 < n) rho[max_t + 1] = rho_even;

  // Enforce a monotone decrease of the paired sums.
  for (std::size_t s = 1; s + 4 <= max_t; s += 2) {
    if (rho[s + 1] + rho[s + 2] > rho[s - 1] + rho[s]) {
      rho[s + 1] = (rho[s - 1] + rho[s]) / 2.0;
      rho[s + 2] = rho[s + 1];
    }
  }
  const double total = static_cast<double>(m) * nn;
  double tau_hat = -1.0;
  for (std::size_t s = 0; s <= max_t && s < n; ++s) tau_hat += 2.0 * rho[s];
  if (max_t + 1 < n) tau_hat += rho[max_t + 1];
  tau_hat = std::max(tau_hat, 1.0 / std::log10(total));
  return total / tau_hat;
}

void require_shape(const Matrix& draws) {
  if (draws.empty()) throw DomainError("no chains");
  for (const auto& chain : draws) {
    if (chain.size() != draws[0].size()) throw DomainError("chains differ in length");
  }
  if (draws[0].size() < 4) throw DomainError("need at least 4 post-warmup draws per chain");
}

}  // namespace

double split_rhat(const Matrix& draws) {
  require_shape(draws);
  const auto split = split_chains(draws);
  const double bulk = basic_rhat(rank_normalize(split));

  std::vector<double> pooled;
  for (const auto& chain : split) pooled.insert(pooled.end(), chain.begin(), chain.end());
  std::nth_element(pooled.begin(), pooled.begin() + pooled.size() / 2, pooled.end());
  double median = pooled[pooled.size() / 2];
  if (pooled.size() % 2 == 0) {
    const double lower = *std::max_element(pooled.begin(), pooled.begin() + pooled.size() / 2);
    median = 0.5 * (median + lower);
  }
  Matrix folded = split;
  for (auto& chain : folded) {
    for (auto& x : chain) x = std::abs(x - median);
  }
  const double tail = basic_rhat(rank_normalize(folded));
  if (std::isnan(bulk)) return tail;
  if (std::isnan(tail)) return bulk;
  return std::max(bulk, tail);
}

double ess_bulk(const Matrix& draws) {
  require_shape(draws);
  return basic_ess(rank_normalize(split_chains(draws)));
}

double ess_mean(const Matrix& draws) {
  require_shape(draws);
  return basic_ess(split_chains(draws));
}

std::vector<ParamSummary> summarystats(const Chains& chains) {
  if (chains.n_chains == 0 || chains.n_iterations < chains.warmup + 4) {
    throw DomainError("summarystats needs at least 4 post-warmup draws per chain");
  }
  std::vector<ParamSummary> rows;
  for (std::size_t p = 0; p < chains.n_params(); ++p) {
    const auto draws = chains.post_warmup(p);
    std::vector<double> pooled;
    for (const auto& chain : draws) pooled.insert(pooled.end(), chain.begin(), chain.end());
    ParamSummary row;
    row.name = chains.param_names[p];
    row.mean = mean_of(pooled);
    row.sd = std::sqrt(variance_of(pooled));
    row.rhat = split_rhat(draws);
    row.ess = ess_bulk(draws);
    row.mcse = row.sd / std::sqrt(ess_mean(draws));
    rows.push_back(row);
  }
  return rows;
}

std::string format_summary_table(const std::vector<ParamSummary>& rows) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %12s %12s %12s %10s %8s\n", "parameter", "mean", "sd",
                "mcse", "ess", "rhat");
  out += line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-10s %12.6g %12.6g %12.6g %10.1f %8.4f\n", r.name.c_str(),
                  r.mean, r.sd, r.mcse, r.ess, r.rhat);
    out += line;
  }
  return out;
}

nlohmann::json summary_to_json(const std::vector<ParamSummary>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"name", r.name}, {"mean", r.mean}, {"sd", r.sd}, {"mcse", r.mcse},
                   {"ess", r.ess}, {"rhat", r.rhat}});
  }
  return out;
}

}  // namespace ssm
