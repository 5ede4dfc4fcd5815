#include "ssm/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssm/dataset.hpp"
#include "ssm/math.hpp"
#include "ssm/mcmc.hpp"
#include "ssm/model.hpp"
#include "ssm/optimize.hpp"

namespace ssm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxStartAttempts = 100;

void require_choices(const ModelSpec& spec, const Dataset& ds) {
  const auto n = choice_count(spec);
  for (std::size_t i = 0; i < ds.trials.size(); ++i) {
    const int c = ds.trials[i].choice;
    if (c < 1 || static_cast<std::size_t>(c) > n) {
      throw DomainError("trial " + std::to_string(i + 1) + ": choice " + std::to_string(c) +
                        " out of range 1.." + std::to_string(n));
    }
  }
}

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double y) {
  if (y >= 0) return 1.0 / (1.0 + std::exp(-y));
  const double e = std::exp(y);
  return e / (1.0 + e);
}

}  // namespace

// ---------------------------------------------------------------------------
// Likelihood

std::vector<double> pointwise_loglik(const ModelSpec& spec, const Dataset& ds, unsigned threads) {
  require_valid(spec);
  require_choices(spec, ds);
  std::vector<double> out(ds.size());
  const std::size_t n_blocks = (ds.size() + kLoglikBlock - 1) / kLoglikBlock;
  parallel_blocks(n_blocks, threads, [&](std::size_t block) {
    const std::size_t end = std::min(ds.size(), (block + 1) * kLoglikBlock);
    for (std::size_t i = block * kLoglikBlock; i < end; ++i) {
      out[i] = model_logpdf(spec, ds.trials[i].choice, ds.trials[i].rt);
    }
  });
  return out;
}

double dataset_loglik(const ModelSpec& spec, const Dataset& ds, unsigned threads) {
  const auto values = pointwise_loglik(spec, ds, threads);
  double total = 0.0;
  for (std::size_t begin = 0; begin < values.size(); begin += kLoglikBlock) {
    const std::size_t end = std::min(values.size(), begin + kLoglikBlock);
    double partial = 0.0;
    for (std::size_t i = begin; i < end; ++i) partial += values[i];
    total += partial;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Layout and transforms

ParameterLayout ParameterLayout::of(const ModelSpec& spec) {
  ParameterLayout layout;
  layout.kind = kind_of(spec);
  layout.n_accumulators = choice_count(spec);
  if (const auto* lba = std::get_if<LBAParams>(&spec)) layout.lba_sigma = lba->sigma;
  return layout;
}

std::size_t ParameterLayout::size() const {
  return kind == ModelKind::ddm ? 4 : n_accumulators + 3;
}

std::vector<std::string> ParameterLayout::names() const {
  if (kind == ModelKind::ddm) return {"nu", "alpha", "tau", "z"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n_accumulators; ++i) out.push_back("nu[" + std::to_string(i + 1) + "]");
  out.insert(out.end(), {"A", "k", "tau"});
  return out;
}

std::vector<double> ParameterLayout::to_vector(const ModelSpec& spec) const {
  if (const auto* p = std::get_if<DDMParams>(&spec)) return {p->nu, p->alpha, p->tau, p->z};
  std::vector<double> out;
  if (const auto* p = std::get_if<LBAParams>(&spec)) {
    out = p->nu;
    out.insert(out.end(), {p->A, p->k, p->tau});
  } else if (const auto* p = std::get_if<RDMParams>(&spec)) {
    out = p->nu;
    out.insert(out.end(), {p->A, p->k, p->tau});
  }
  return out;
}

ModelSpec ParameterLayout::to_spec(std::span<const double> v) const {
  if (v.size() != size()) throw DomainError("parameter vector has the wrong length");
  const std::size_t m = n_accumulators;
  switch (kind) {
    case ModelKind::ddm: return DDMParams{v[0], v[1], v[2], v[3]};
    case ModelKind::lba: {
      LBAParams p;
      p.nu.assign(v.begin(), v.begin() + m);
      p.A = v[m];
      p.k = v[m + 1];
      p.tau = v[m + 2];
      p.sigma = lba_sigma;
      return p;
    }
    case ModelKind::rdm: {
      RDMParams p;
      p.nu.assign(v.begin(), v.begin() + m);
      p.A = v[m];
      p.k = v[m + 1];
      p.tau = v[m + 2];
      return p;
    }
  }
  return DDMParams{};
}

double Bijection::unconstrain(double x) const {
  switch (kind) {
    case Kind::identity: return x;
    case Kind::log: return std::log(x);
    case Kind::logit: return std::log((x - lo) / (hi - x));
  }
  return x;
}

double Bijection::constrain(double y) const {
  switch (kind) {
    case Kind::identity: return y;
    case Kind::log: return std::exp(y);
    case Kind::logit: return lo + (hi - lo) * sigmoid(y);
  }
  return y;
}

double Bijection::log_jacobian(double y) const {
  switch (kind) {
    case Kind::identity: return 0.0;
    case Kind::log: return y;
    case Kind::logit: return std::log(hi - lo) - softplus(-y) - softplus(y);
  }
  return 0.0;
}

ParameterTransform::ParameterTransform(const ParameterLayout& layout, double tau_upper) {
  using K = Bijection::Kind;
  const Bijection identity{K::identity, 0, 0};
  const Bijection positive{K::log, 0, 0};
  const Bijection tau = std::isfinite(tau_upper) ? Bijection{K::logit, 0.0, tau_upper} : positive;
  if (layout.kind == ModelKind::ddm) {
    maps_ = {identity, positive, tau, Bijection{K::logit, 0.0, 1.0}};
    return;
  }
  const Bijection drift = layout.kind == ModelKind::rdm ? positive : identity;
  maps_.assign(layout.n_accumulators, drift);
  maps_.insert(maps_.end(), {positive, positive, tau});
}

std::vector<double> ParameterTransform::unconstrain(std::span<const double> x) const {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = maps_[i].unconstrain(x[i]);
  return y;
}

std::vector<double> ParameterTransform::constrain(std::span<const double> y) const {
  std::vector<double> x(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) x[i] = maps_[i].constrain(y[i]);
  return x;
}

double ParameterTransform::log_jacobian(std::span<const double> y) const {
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) total += maps_[i].log_jacobian(y[i]);
  return total;
}

// ---------------------------------------------------------------------------
// Priors

Prior Prior::normal(double mu, double sigma) {
  return {Family::normal, mu, sigma, -kInf, kInf};
}

Prior Prior::truncated_normal(double mu, double sigma, double lo, double hi) {
  if (!(hi > lo)) throw DomainError("truncated normal needs lo < hi");
  return {Family::truncated_normal, mu, sigma, lo, hi};
}

Prior Prior::uniform(double lo, double hi) {
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw DomainError("uniform prior needs finite lo < hi");
  }
  return {Family::uniform, 0.0, 1.0, lo, hi};
}

double Prior::support_lo() const { return family == Family::normal ? -kInf : lo; }
double Prior::support_hi() const { return family == Family::normal ? kInf : hi; }

double Prior::logpdf(double x) const {
  switch (family) {
    case Family::normal: return math::normal_log_pdf((x - mu) / sigma) - std::log(sigma);
    case Family::truncated_normal: {
      if (x < lo || x > hi) return -kInf;
      const double mass = math::normal_cdf((hi - mu) / sigma) - math::normal_cdf((lo - mu) / sigma);
      return math::normal_log_pdf((x - mu) / sigma) - std::log(sigma) - std::log(mass);
    }
    case Family::uniform: return (x < lo || x > hi) ? -kInf : -std::log(hi - lo);
  }
  return -kInf;
}

double Prior::sample(Rng& rng) const {
  switch (family) {
    case Family::normal: return rng.normal(mu, sigma);
    case Family::truncated_normal: {
      const double a = math::normal_cdf((lo - mu) / sigma);
      const double b = math::normal_cdf((hi - mu) / sigma);
      const double x = mu + sigma * math::normal_quantile(a + (b - a) * rng.uniform());
      return std::clamp(x, lo, hi);
    }
    case Family::uniform: return rng.uniform(lo, hi);
  }
  return mu;
}

nlohmann::json Prior::to_json() const {
  const auto bound = [](double x) -> nlohmann::json {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
  };
  switch (family) {
    case Family::normal: return {{"family", "normal"}, {"mu", mu}, {"sigma", sigma}};
    case Family::truncated_normal:
      return {{"family", "truncated_normal"}, {"mu", mu}, {"sigma", sigma},
              {"lo", bound(lo)}, {"hi", bound(hi)}};
    case Family::uniform: return {{"family", "uniform"}, {"lo", lo}, {"hi", hi}};
  }
  return {};
}

Prior Prior::from_json(const nlohmann::json& j) {
  const auto bound = [&](const char* key) {
    const auto& v = j.at(key);
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s == "inf") return kInf;
      if (s == "-inf") return -kInf;
      throw ParseError(std::string("prior bound '") + key + "' must be a number or +-inf");
    }
    return v.get<double>();
  };
  try {
    const auto family = j.at("family").get<std::string>();
    if (family == "normal") return normal(j.at("mu").get<double>(), j.at("sigma").get<double>());
    if (family == "truncated_normal") {
      return truncated_normal(j.at("mu").get<double>(), j.at("sigma").get<double>(), bound("lo"),
                              bound("hi"));
    }
    if (family == "uniform") return uniform(bound("lo"), bound("hi"));
    throw ParseError("unknown prior family '" + family + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad prior: ") + e.what());
  }
}

double PriorSpec::logpdf(std::span<const double> x) const {
  double total = 0.0;
  for (std::size_t i = 0; i < priors.size(); ++i) {
    total += priors[i].logpdf(x[i]);
    if (total == -kInf) break;
  }
  return total;
}

nlohmann::json PriorSpec::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < priors.size(); ++i) {
    auto entry = priors[i].to_json();
    entry["name"] = names[i];
    out.push_back(entry);
  }
  return out;
}

PriorSpec PriorSpec::from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("priors must be a JSON array");
  PriorSpec spec;
  for (const auto& entry : j) {
    spec.names.push_back(entry.value("name", ""));
    spec.priors.push_back(Prior::from_json(entry));
  }
  return spec;
}

PriorSpec default_priors(ModelKind kind, const Dataset& ds, std::size_t n_accumulators) {
  if (ds.empty()) throw DomainError("default priors need data (tau prior is Uniform(0, min rt))");
  const double min_rt = ds.min_rt();
  ParameterLayout layout{kind, n_accumulators ? n_accumulators
                                              : std::max<std::size_t>(2, ds.max_choice())};
  PriorSpec spec;
  spec.names = layout.names();
  switch (kind) {
    case ModelKind::ddm:
      spec.priors = {Prior::normal(0.0, 2.0), Prior::truncated_normal(1.0, 1.0, 0.0, kInf),
                     Prior::uniform(0.0, min_rt), Prior::uniform(0.1, 0.9)};
      break;
    case ModelKind::lba:
    case ModelKind::rdm: {
      const Prior drift = kind == ModelKind::lba ? Prior::normal(0.0, 1.0)
                                                 : Prior::truncated_normal(1.0, 2.0, 0.0, kInf);
      spec.priors.assign(layout.n_accumulators, drift);
      spec.priors.insert(spec.priors.end(), {Prior::truncated_normal(0.8, 0.4, 0.0, kInf),
                                             Prior::truncated_normal(0.2, 0.2, 0.0, kInf),
                                             Prior::uniform(0.0, min_rt)});
      break;
    }
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Maximum likelihood

nlohmann::json FitResult::to_json() const {
  nlohmann::json values_json = nlohmann::json::object();
  for (std::size_t i = 0; i < names.size(); ++i) values_json[names[i]] = values[i];
  auto model = model_to_json(estimate);
  return {{"model", model.at("model")}, {"params", model.at("params")},
          {"estimates", values_json},   {"loglik", loglik},
          {"converged", converged},     {"n_evals", n_evals}};
}

FitResult fit_mle(const ModelSpec& init, const Dataset& ds, const MleOptions& options) {
  require_valid(init);
  if (ds.empty()) throw DomainError("cannot fit an empty dataset");
  const auto layout = ParameterLayout::of(init);
  const double tau_upper = ds.min_rt();
  const ParameterTransform transform(layout, tau_upper);

  auto start = layout.to_vector(init);
  auto& tau = start[layout.tau_index()];
  if (tau >= tau_upper) {
    throw NumericError("log-likelihood is not finite at the initial values: tau (" +
                       format_double(tau) + ") must be below the smallest rt (" +
                       format_double(tau_upper) + "); choose a feasible start");
  }
  tau = std::max(tau, 1e-6 * tau_upper);
  const double init_ll = dataset_loglik(layout.to_spec(start), ds, options.threads);
  if (!std::isfinite(init_ll)) {
    throw NumericError("log-likelihood is not finite at the initial values; choose a feasible start");
  }

  const Objective negative_loglik = [&](std::span<const double> y) {
    const auto x = transform.constrain(y);
    const auto spec = layout.to_spec(x);
    if (!validate(spec)) return kInf;
    const double ll = dataset_loglik(spec, ds, options.threads);
    return std::isfinite(ll) ? -ll : kInf;
  };

  NelderMeadOptions nm;
  nm.initial_step = options.initial_step;
  nm.f_tol = options.f_tol;
  nm.max_evals = options.max_evals;
  const auto result = nelder_mead_minimize(negative_loglik, transform.unconstrain(start), nm);

  FitResult fit;
  fit.values = transform.constrain(result.x);
  fit.estimate = layout.to_spec(fit.values);
  fit.names = layout.names();
  fit.loglik = -result.value;
  fit.converged = result.converged;
  fit.n_evals = result.n_evals + 1;
  return fit;
}

// ---------------------------------------------------------------------------
// Posterior sampling

std::vector<std::vector<double>> Chains::post_warmup(std::size_t param) const {
  std::vector<std::vector<double>> out(n_chains);
  for (std::size_t c = 0; c < n_chains; ++c) {
    out[c].reserve(n_iterations - warmup);
    for (std::size_t it = warmup; it < n_iterations; ++it) out[c].push_back(at(c, it, param));
  }
  return out;
}

Chains sample_posterior(ModelKind kind, const Dataset& ds, const PriorSpec& priors,
                        const PosteriorOptions& options) {
  ParameterLayout layout{kind, 2, options.lba_sigma};
  if (kind != ModelKind::ddm) {
    if (priors.priors.size() < 5) throw DomainError("race models need at least 5 priors");
    layout.n_accumulators = priors.priors.size() - 3;
  }
  if (priors.priors.size() != layout.size()) {
    throw DomainError("expected " + std::to_string(layout.size()) + " priors for this model");
  }
  if (options.n_chains == 0) throw DomainError("need at least one chain");
  if (!ds.empty() && static_cast<std::size_t>(ds.max_choice()) >
                         (kind == ModelKind::ddm ? 2 : layout.n_accumulators)) {
    throw DomainError("dataset has more choices than the model has accumulators");
  }

  const double tau_upper =
      ds.empty() ? priors.priors[layout.tau_index()].support_hi() : ds.min_rt();
  const ParameterTransform transform(layout, tau_upper);
  const auto& maps = transform.maps();

  const LogDensity log_posterior = [&](std::span<const double> y) {
    const auto x = transform.constrain(y);
    const double lp = priors.logpdf(x);
    if (!std::isfinite(lp)) return -kInf;
    const auto spec = layout.to_spec(x);
    if (!validate(spec)) return -kInf;
    const double ll = dataset_loglik(spec, ds);
    if (std::isnan(ll)) return -kInf;
    return lp + ll + transform.log_jacobian(y);
  };

  Chains chains;
  chains.model = std::string(to_string(kind));
  chains.param_names = priors.names.size() == layout.size() ? priors.names : layout.names();
  chains.n_chains = options.n_chains;
  chains.n_iterations = options.warmup + options.samples;
  chains.warmup = options.warmup;
  chains.thin = options.thin;
  chains.seed = options.seed;
  chains.priors = priors;
  chains.draws.resize(chains.n_chains * chains.n_iterations * layout.size());
  chains.acceptance_rate.resize(chains.n_chains);

  MetropolisOptions mh;
  mh.warmup = options.warmup;
  mh.samples = options.samples;
  mh.thin = options.thin;

  parallel_blocks(options.n_chains, options.threads, [&](std::size_t c) {
    Rng rng = substream(options.seed, c);
    std::vector<double> start;
    for (int attempt = 0; attempt < kMaxStartAttempts && start.empty(); ++attempt) {
      std::vector<double> x(layout.size());
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = priors.priors[i].sample(rng);
      bool inside = true;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(maps[i].unconstrain(x[i]))) inside = false;
      }
      if (!inside) continue;
      auto y = transform.unconstrain(x);
      if (std::isfinite(log_posterior(y))) start = std::move(y);
    }
    if (start.empty()) {
      throw NumericError("chain " + std::to_string(c + 1) +
                         ": no prior draw with finite posterior density in " +
                         std::to_string(kMaxStartAttempts) + " attempts");
    }
    const auto run = adaptive_metropolis(log_posterior, std::move(start), mh, rng);
    const std::size_t d = layout.size();
    for (std::size_t it = 0; it < chains.n_iterations; ++it) {
      const auto x = transform.constrain(std::span<const double>(run.draws).subspan(it * d, d));
      std::copy(x.begin(), x.end(), chains.draws.begin() + (c * chains.n_iterations + it) * d);
    }
    chains.acceptance_rate[c] = run.sampling_accept_rate;
  });
  return chains;
}

}  // namespace ssm
