// ssm: simulate, evaluate, fit and plot sequential sampling models.
//
// Exit status: 0 success, 1 usage error, 2 domain / parse / numeric error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ssm/dataset.hpp"
#include "ssm/diagnostics.hpp"
#include "ssm/inference.hpp"
#include "ssm/lba.hpp"
#include "ssm/model.hpp"
#include "ssm/viz.hpp"

namespace fs = std::filesystem;
using namespace ssm;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string model;
  std::string data;
  std::string out;
  std::string method = "mle";
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> chains;
  std::optional<std::size_t> warmup;
  std::optional<std::size_t> samples;
  unsigned threads = 1;
  std::optional<std::size_t> bins;
  std::optional<double> t_start;
  std::optional<double> t_stop;
  std::optional<std::size_t> t_len;
  std::size_t n_sim = 5;
};

void warn_all(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

void warn_lba_mass(const ModelSpec& spec) {
  if (const auto* lba = std::get_if<LBAParams>(&spec)) {
    const double mass = lba_all_negative_mass(*lba);
    if (mass > 1e-4) {
      std::cerr << "warning: LBA probability that all drifts are <= 0 is " << format_double(mass)
                << "; the density leaves this mass out\n";
    }
  }
}

// Writes to `path`, or stdout when it is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << text;
}

std::uint64_t require_seed(const Flags& f, const char* what) {
  if (!f.seed) throw UsageError(std::string(what) + " needs --seed");
  return *f.seed;
}

fs::path sidecar_for(const fs::path& csv) {
  auto json = csv;
  return json.replace_extension(".json");
}

int cmd_simulate(const Flags& f) {
  const auto seed = require_seed(f, "simulate");
  const auto spec = read_model(f.model);
  const auto ds = model_sample(spec, *f.n, seed);
  warn_all(ds.meta.warnings);
  std::ostringstream text;
  format_dataset(ds, text);
  emit(f.out, text.str());
  return 0;
}

int cmd_loglik(const Flags& f) {
  const auto spec = read_model(f.model);
  const auto ds = read_dataset(f.data);
  warn_lba_mass(spec);
  const auto values = pointwise_loglik(spec, ds);
  const double total = dataset_loglik(spec, ds);
  if (!f.out.empty()) {
    std::ostringstream csv;
    csv << "trial,loglik\n";
    for (std::size_t i = 0; i < values.size(); ++i) csv << i + 1 << ',' << format_double(values[i]) << '\n';
    emit(f.out, csv.str());
  }
  nlohmann::json result = {{"model", to_string(kind_of(spec))}, {"n_trials", ds.size()}};
  // JSON has no infinities; an impossible trial is reported as null.
  result["loglik"] = std::isfinite(total) ? nlohmann::json(total) : nlohmann::json(nullptr);
  std::cout << result.dump(2) << '\n';
  return 0;
}

int cmd_fit(const Flags& f) {
  const auto spec = read_model(f.model);
  const auto ds = read_dataset(f.data);
  warn_lba_mass(spec);

  if (f.method == "mle") {
    if (f.chains || f.warmup || f.samples) {
      throw UsageError("--chains, --warmup and --samples only apply to --method mcmc");
    }
    MleOptions options;
    options.threads = f.threads;
    const auto fit = fit_mle(spec, ds, options);
    if (!fit.converged) std::cerr << "warning: optimizer stopped before converging\n";
    emit(f.out, fit.to_json().dump(2) + "\n");
    return 0;
  }

  if (f.out.empty()) throw UsageError("fit --method mcmc needs --out for the chains CSV");
  PosteriorOptions options;
  options.seed = require_seed(f, "fit --method mcmc");
  options.n_chains = f.chains.value_or(options.n_chains);
  options.warmup = f.warmup.value_or(options.warmup);
  options.samples = f.samples.value_or(options.samples);
  options.threads = f.threads;
  if (const auto* lba = std::get_if<LBAParams>(&spec)) options.lba_sigma = lba->sigma;

  const auto kind = kind_of(spec);
  const auto priors = default_priors(kind, ds, kind == ModelKind::ddm ? 0 : choice_count(spec));
  const auto chains = sample_posterior(kind, ds, priors, options);
  const fs::path csv = f.out;
  write_chains(chains, csv, sidecar_for(csv));

  const auto rows = summarystats(chains);
  auto summary_path = csv;
  summary_path.replace_extension(".summary.json");
  emit(summary_path.string(), summary_to_json(rows).dump(2) + "\n");
  std::cout << format_summary_table(rows);
  return 0;
}

TimeRange time_range(const Flags& f, double default_start, double default_stop) {
  TimeRange range;
  range.start = f.t_start.value_or(default_start);
  range.stop = f.t_stop.value_or(std::max(default_stop, range.start + 1.0));
  range.length = f.t_len.value_or(100);
  if (!(range.stop > range.start)) throw UsageError("--t-stop must be greater than --t-start");
  if (range.length < 2) throw UsageError("--t-len must be at least 2");
  return range;
}

int cmd_plot(const std::string& kind, const Flags& f) {
  if (f.out.empty()) throw UsageError("plot needs --out");
  if (kind == "histogram") {
    if (f.data.empty()) throw UsageError("plot histogram needs --data");
    const auto ds = read_dataset(f.data);
    std::optional<ModelSpec> spec;
    if (!f.model.empty()) spec = read_model(f.model);
    BinSpec bins;
    if (f.bins) bins.count = *f.bins;
    std::optional<TimeRange> overlay;
    if (spec && (f.t_start || f.t_stop || f.t_len)) {
      overlay = time_range(f, non_decision_time(*spec), ds.empty() ? 2.0 : ds.min_rt() + 2.0);
    }
    plot_histogram(ds, spec, bins, f.out, overlay);
    return 0;
  }
  if (kind == "model") {
    if (f.model.empty()) throw UsageError("plot model needs --model");
    const auto seed = require_seed(f, "plot model");
    const auto spec = read_model(f.model);
    const double tau = non_decision_time(spec);
    plot_model(spec, f.n_sim, time_range(f, tau, tau + 1.5), f.out, seed);
    return 0;
  }
  if (f.data.empty()) throw UsageError("plot chains needs --data (the chains CSV)");
  const fs::path csv = f.data;
  plot_chains(read_chains(csv, sidecar_for(csv)), f.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential sampling models: DDM, LBA and RDM"};
  app.require_subcommand(1);
  Flags f;

  const auto model_flag = [&](CLI::App* cmd, bool required, const char* help) {
    auto* opt = cmd->add_option("--model", f.model, help)->check(CLI::ExistingFile);
    if (required) opt->required();
  };
  const auto data_flag = [&](CLI::App* cmd, bool required, const char* help) {
    auto* opt = cmd->add_option("--data", f.data, help)->check(CLI::ExistingFile);
    if (required) opt->required();
  };

  auto* simulate = app.add_subcommand("simulate", "Simulate a dataset from a model");
  model_flag(simulate, true, "Model JSON");
  simulate->add_option("--n", f.n, "Number of trials")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--seed", f.seed, "Random seed (required)");
  simulate->add_option("--out", f.out, "Dataset CSV to write (stdout if omitted)");

  auto* loglik = app.add_subcommand("loglik", "Log-likelihood of a dataset under a model");
  model_flag(loglik, true, "Model JSON");
  data_flag(loglik, true, "Dataset CSV");
  loglik->add_option("--out", f.out, "Also write per-trial log-likelihoods to this CSV");

  auto* fit = app.add_subcommand("fit", "Fit a model by maximum likelihood or MCMC");
  model_flag(fit, true, "Model JSON: starting values for mle; model family for mcmc");
  data_flag(fit, true, "Dataset CSV");
  fit->add_option("--method", f.method, "mle or mcmc")->check(CLI::IsMember({"mle", "mcmc"}));
  fit->add_option("--out", f.out,
                  "mle: result JSON (stdout if omitted); mcmc: chains CSV, with <stem>.json "
                  "sidecar and <stem>.summary.json");
  fit->add_option("--chains", f.chains, "MCMC chains (default 4)")->check(CLI::PositiveNumber);
  fit->add_option("--warmup", f.warmup, "MCMC warmup iterations per chain (default 1000)");
  fit->add_option("--samples", f.samples, "MCMC draws kept per chain (default 1000)")
      ->check(CLI::PositiveNumber);
  fit->add_option("--seed", f.seed, "Random seed (required for mcmc)");
  fit->add_option("--threads", f.threads, "Worker threads (default 1)")->check(CLI::PositiveNumber);

  auto* plot = app.add_subcommand("plot", "Write an SVG figure");
  plot->require_subcommand(1);
  auto* histogram = plot->add_subcommand("histogram", "RT histograms per choice, optional density overlay");
  data_flag(histogram, true, "Dataset CSV");
  model_flag(histogram, false, "Model JSON for the density overlay");
  histogram->add_option("--bins", f.bins, "Bins per panel (default Freedman-Diaconis)")
      ->check(CLI::PositiveNumber);
  histogram->add_option("--t-start", f.t_start, "Overlay grid start (s)");
  histogram->add_option("--t-stop", f.t_stop, "Overlay grid stop (s)");
  histogram->add_option("--t-len", f.t_len, "Overlay grid points");
  histogram->add_option("--out", f.out, "SVG to write")->required();

  auto* model = plot->add_subcommand("model", "Simulated evidence-accumulation traces");
  model_flag(model, true, "Model JSON");
  model->add_option("--n-sim", f.n_sim, "Number of simulated traces (default 5)");
  model->add_option("--t-start", f.t_start, "Time axis start (s, default tau)");
  model->add_option("--t-stop", f.t_stop, "Time axis stop (s, default tau + 1.5)");
  model->add_option("--t-len", f.t_len, "Grid points; the Euler step is the grid step (default 100)");
  model->add_option("--seed", f.seed, "Random seed (required)");
  model->add_option("--out", f.out, "SVG to write")->required();

  auto* chains = plot->add_subcommand("chains", "Posterior densities from an MCMC chains CSV");
  data_flag(chains, true, "Chains CSV (its .json sidecar is read too)");
  chains->add_option("--out", f.out, "SVG to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*simulate) return cmd_simulate(f);
    if (*loglik) return cmd_loglik(f);
    if (*fit) return cmd_fit(f);
    if (*histogram) return cmd_plot("histogram", f);
    if (*model) return cmd_plot("model", f);
    return cmd_plot("chains", f);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
