// Dataset likelihoods, parameter transforms, priors, maximum likelihood and
// posterior sampling for the three model families.
//
// Parameter vectors are ordered
//   DDM: nu, alpha, tau, z
//   LBA: nu[1..m], A, k, tau      (sigma stays at its spec value)
//   RDM: nu[1..m], A, k, tau
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssm/core.hpp"
#include "ssm/rng.hpp"

namespace ssm {

// ---------------------------------------------------------------------------
// Likelihood

/// Sum of per-trial log densities. Trials are summed in fixed blocks of
/// kLoglikBlock and the block partials folded in order, so the result is
/// identical for any thread count. -inf if any trial has rt <= tau.
double dataset_loglik(const ModelSpec& spec, const Dataset& ds, unsigned threads = 1);
std::vector<double> pointwise_loglik(const ModelSpec& spec, const Dataset& ds,
                                     unsigned threads = 1);

inline constexpr std::size_t kLoglikBlock = 1024;

// ---------------------------------------------------------------------------
// Parameter layout and transforms

struct ParameterLayout {
  ModelKind kind = ModelKind::ddm;
  std::size_t n_accumulators = 2;
  double lba_sigma = 1.0;

  static ParameterLayout of(const ModelSpec& spec);

  std::size_t size() const;
  std::vector<std::string> names() const;
  std::size_t tau_index() const { return size() - (kind == ModelKind::ddm ? 2 : 1); }

  std::vector<double> to_vector(const ModelSpec& spec) const;
  /// No validation; callers validate where it matters.
  ModelSpec to_spec(std::span<const double> values) const;
};

/// Elementwise bijection between a parameter's domain and the real line.
struct Bijection {
  enum class Kind { identity, log, logit };
  Kind kind = Kind::identity;
  double lo = 0.0;
  double hi = 1.0;

  double unconstrain(double x) const;
  double constrain(double y) const;
  /// log |d constrain / dy|
  double log_jacobian(double y) const;
};

class ParameterTransform {
 public:
  /// tau is mapped onto (0, tau_upper) by a logit when tau_upper is finite,
  /// otherwise by a log.
  ParameterTransform(const ParameterLayout& layout, double tau_upper);

  std::vector<double> unconstrain(std::span<const double> x) const;
  std::vector<double> constrain(std::span<const double> y) const;
  double log_jacobian(std::span<const double> y) const;
  const std::vector<Bijection>& maps() const { return maps_; }

 private:
  std::vector<Bijection> maps_;
};

// ---------------------------------------------------------------------------
// Priors

struct Prior {
  enum class Family { normal, truncated_normal, uniform };
  Family family = Family::normal;
  double mu = 0.0;     ///< normal / truncated normal location
  double sigma = 1.0;  ///< normal / truncated normal scale
  double lo = 0.0;     ///< truncation or uniform lower bound
  double hi = 1.0;     ///< truncation or uniform upper bound (may be +inf)

  static Prior normal(double mu, double sigma);
  static Prior truncated_normal(double mu, double sigma, double lo, double hi);
  static Prior uniform(double lo, double hi);

  double logpdf(double x) const;
  double sample(Rng& rng) const;
  double support_lo() const;
  double support_hi() const;

  nlohmann::json to_json() const;
  static Prior from_json(const nlohmann::json& j);
};

/// Independent priors, one per entry of the parameter vector.
struct PriorSpec {
  std::vector<std::string> names;
  std::vector<Prior> priors;

  double logpdf(std::span<const double> x) const;
  nlohmann::json to_json() const;
  static PriorSpec from_json(const nlohmann::json& j);
};

/// LBA: nu_i ~ Normal(0, 1), A ~ TN(0.8, 0.4, 0, inf), k ~ TN(0.2, 0.2, 0, inf),
///      tau ~ Uniform(0, min rt).
/// DDM: nu ~ Normal(0, 2), alpha ~ TN(1, 1, 0, inf), tau ~ Uniform(0, min rt),
///      z ~ Uniform(0.1, 0.9).
/// RDM: as the LBA with nu_i ~ TN(1, 2, 0, inf).
/// n_accumulators = 0 takes max(2, ds.max_choice()). Needs a non-empty ds.
PriorSpec default_priors(ModelKind kind, const Dataset& ds, std::size_t n_accumulators = 0);

// ---------------------------------------------------------------------------
// Maximum likelihood

struct MleOptions {
  double initial_step = 0.5;  ///< simplex size on the unconstrained scale
  double f_tol = 1e-8;
  std::size_t max_evals = 100'000;
  unsigned threads = 1;
};

struct FitResult {
  ModelSpec estimate;
  std::vector<std::string> names;
  std::vector<double> values;
  double loglik = 0.0;
  bool converged = false;
  std::size_t n_evals = 0;

  nlohmann::json to_json() const;
};

/// Nelder-Mead on the unconstrained parameters, starting from `init`
/// (whose kind and accumulator count define the model being fitted).
FitResult fit_mle(const ModelSpec& init, const Dataset& ds, const MleOptions& options = {});

// ---------------------------------------------------------------------------
// Posterior sampling

struct Chains {
  std::string model;
  std::vector<std::string> param_names;
  std::size_t n_chains = 0;
  std::size_t n_iterations = 0;  ///< warmup + samples
  std::size_t warmup = 0;
  std::size_t thin = 1;
  std::uint64_t seed = 0;
  std::vector<double> draws;  ///< [chain][iteration][param], natural scale
  std::vector<double> acceptance_rate;  ///< per chain, post-warmup
  PriorSpec priors;

  std::size_t n_params() const { return param_names.size(); }
  double at(std::size_t chain, std::size_t iteration, std::size_t param) const {
    return draws[(chain * n_iterations + iteration) * n_params() + param];
  }
  /// Post-warmup draws of one parameter, one vector per chain.
  std::vector<std::vector<double>> post_warmup(std::size_t param) const;
};

struct PosteriorOptions {
  std::size_t n_chains = 4;
  std::size_t warmup = 1000;
  std::size_t samples = 1000;
  std::size_t thin = 10;  ///< Metropolis moves per stored draw
  std::uint64_t seed = 0;
  unsigned threads = 1;  ///< chains run concurrently up to this many
  double lba_sigma = 1.0;  ///< held fixed, not sampled
};

/// Chain c uses substream(seed, c) for its start and its moves. Starts are
/// prior draws; up to 100 are tried per chain before giving up.
Chains sample_posterior(ModelKind kind, const Dataset& ds, const PriorSpec& priors,
                        const PosteriorOptions& options);

void write_chains(const Chains& chains, const std::filesystem::path& csv_path,
                  const std::filesystem::path& json_path);
Chains read_chains(const std::filesystem::path& csv_path, const std::filesystem::path& json_path);

}  // namespace ssm
