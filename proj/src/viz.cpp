#include "ssm/viz.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

#include "ssm/math.hpp"
#include "ssm/model.hpp"
#include "ssm/svg.hpp"

namespace ssm {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
constexpr std::size_t kMaxBins = 1000;
constexpr std::size_t kOverlayPoints = 200;
constexpr std::size_t kKdePoints = 128;

const char* colour(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

svg::Box panel_box(std::size_t panel) {
  const double top = panel * kPanelHeight;
  return {60.0, top + 30.0, kPanelWidth - 20.0, top + kPanelHeight - 45.0};
}

void write_file(const std::filesystem::path& out, const std::string& content) {
  std::ofstream file(out, std::ios::binary);
  if (!file) throw ParseError("cannot write '" + out.string() + "'");
  file << content;
  if (!file) throw ParseError("error writing '" + out.string() + "'");
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
}

std::vector<double> equal_edges(double lo, double hi, std::size_t count) {
  if (!(hi > lo)) {
    const double pad = 0.05 * std::max(std::abs(lo), 1.0);
    lo -= pad;
    hi += pad;
  }
  std::vector<double> edges(count + 1);
  for (std::size_t i = 0; i <= count; ++i) edges[i] = lo + (hi - lo) * i / count;
  edges.back() = hi;
  return edges;
}

std::size_t freedman_diaconis_bins(const std::vector<double>& sorted) {
  const double range = sorted.back() - sorted.front();
  if (sorted.size() < 2 || !(range > 0.0)) return 1;
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  if (!(iqr > 0.0)) return std::min<std::size_t>(kMaxBins, std::ceil(std::log2(sorted.size())) + 1);
  const double width = 2.0 * iqr / std::cbrt(static_cast<double>(sorted.size()));
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(range / width)), 1, kMaxBins);
}

}  // namespace

std::vector<double> TimeRange::grid() const {
  std::vector<double> out(length);
  if (length == 1) out[0] = start;
  for (std::size_t i = 0; length > 1 && i < length; ++i) {
    out[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(length - 1);
  }
  return out;
}

std::vector<HistogramPanel> histogram_data(const Dataset& ds, const BinSpec& bins) {
  if (ds.empty()) throw DomainError("cannot histogram an empty dataset");
  if (!bins.edges.empty()) {
    if (bins.edges.size() < 2 || !std::is_sorted(bins.edges.begin(), bins.edges.end()) ||
        std::adjacent_find(bins.edges.begin(), bins.edges.end()) != bins.edges.end()) {
      throw DomainError("bin edges must be strictly increasing with at least two entries");
    }
  }
  std::map<int, std::vector<double>> by_choice;
  for (const auto& trial : ds.trials) by_choice[trial.choice].push_back(trial.rt);

  const double total = static_cast<double>(ds.size());
  std::vector<HistogramPanel> panels;
  for (auto& [choice, rts] : by_choice) {
    std::sort(rts.begin(), rts.end());
    HistogramPanel panel;
    panel.choice = choice;
    panel.n_trials = rts.size();
    if (!bins.edges.empty()) {
      panel.edges = bins.edges;
    } else {
      const std::size_t count = bins.count ? bins.count : freedman_diaconis_bins(rts);
      panel.edges = equal_edges(rts.front(), rts.back(), count);
    }
    const std::size_t n_bins = panel.edges.size() - 1;
    std::vector<double> counts(n_bins, 0.0);
    for (double rt : rts) {
      if (rt < panel.edges.front() || rt > panel.edges.back()) continue;
      auto it = std::upper_bound(panel.edges.begin(), panel.edges.end(), rt);
      std::size_t bin = static_cast<std::size_t>(it - panel.edges.begin());
      bin = bin == 0 ? 0 : std::min(bin - 1, n_bins - 1);
      counts[bin] += 1.0;
    }
    panel.heights.resize(n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) {
      panel.heights[b] = counts[b] / (total * (panel.edges[b + 1] - panel.edges[b]));
    }
    panels.push_back(std::move(panel));
  }
  return panels;
}

DensityCurves density_overlay(const ModelSpec& spec, const TimeRange& range) {
  require_valid(spec);
  DensityCurves curves;
  curves.t = range.grid();
  const std::size_t n_choices = choice_count(spec);
  curves.density.assign(n_choices, std::vector<double>(curves.t.size()));
  for (std::size_t c = 0; c < n_choices; ++c) {
    for (std::size_t i = 0; i < curves.t.size(); ++i) {
      curves.density[c][i] = model_pdf(spec, static_cast<int>(c) + 1, curves.t[i]);
    }
  }
  return curves;
}

std::string render_model_svg(const ModelSpec& spec, std::size_t n_sim, const TimeRange& range,
                             std::uint64_t seed) {
  require_valid(spec);
  if (!(range.stop > range.start)) throw DomainError("time range needs start < stop");
  const double dt =
      range.length >= 2 ? (range.stop - range.start) / static_cast<double>(range.length - 1) : 1e-3;

  std::vector<Trace> traces;
  for (std::size_t i = 0; i < n_sim; ++i) {
    // seeded_rng(seed ^ mix(i + 1)) is substream(seed, i).
    traces.push_back(model_trace(spec, dt, seed ^ splitmix64_mix(i + 1)));
  }

  std::vector<double> thresholds;
  if (const auto* ddm = std::get_if<DDMParams>(&spec)) {
    thresholds = {ddm->alpha, 0.0};
  } else if (const auto* lba = std::get_if<LBAParams>(&spec)) {
    thresholds = {lba->threshold()};
  } else {
    thresholds = {std::get<RDMParams>(spec).threshold()};
  }

  double x_lo = std::min(range.start, non_decision_time(spec));
  double x_hi = range.stop;
  double y_lo = std::min(0.0, *std::min_element(thresholds.begin(), thresholds.end()));
  double y_hi = *std::max_element(thresholds.begin(), thresholds.end());
  for (const auto& tr : traces) {
    x_hi = std::max(x_hi, tr.t.back());
    for (const auto& path : tr.paths) {
      const auto [lo, hi] = std::minmax_element(path.begin(), path.end());
      y_lo = std::min(y_lo, *lo);
      y_hi = std::max(y_hi, *hi);
    }
  }
  const double pad = 0.05 * (y_hi - y_lo);
  y_lo -= pad;
  y_hi += pad;

  svg::Document doc(kPanelWidth, kPanelHeight);
  const auto box = panel_box(0);
  const svg::Scale sx{x_lo, x_hi, box.left, box.right};
  const svg::Scale sy{y_lo, y_hi, box.bottom, box.top};
  doc.axes(box, sx, sy, "time (s)", "evidence",
           std::string(to_string(kind_of(spec))) + " evidence accumulation");

  for (std::size_t i = 0; i < traces.size(); ++i) {
    doc.open_group("class=\"simulation\" data-index=\"" + std::to_string(i + 1) + "\"");
    for (std::size_t a = 0; a < traces[i].paths.size(); ++a) {
      std::vector<std::pair<double, double>> pts;
      pts.reserve(traces[i].t.size());
      for (std::size_t k = 0; k < traces[i].t.size(); ++k) {
        pts.emplace_back(sx(traces[i].t[k]), sy(traces[i].paths[a][k]));
      }
      doc.polyline(pts, std::string("class=\"trace\" fill=\"none\" stroke=\"") + colour(a) +
                            "\" stroke-width=\"1\" stroke-opacity=\"0.8\"");
    }
    doc.close_group();
  }
  for (double level : thresholds) {
    doc.line(box.left, sy(level), box.right, sy(level),
             "class=\"threshold\" stroke=\"#444444\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"");
  }
  return doc.finish();
}

void plot_model(const ModelSpec& spec, std::size_t n_sim, const TimeRange& range,
                const std::filesystem::path& out, std::uint64_t seed) {
  write_file(out, render_model_svg(spec, n_sim, range, seed));
}

std::string render_histogram_svg(const Dataset& ds, const std::optional<ModelSpec>& spec,
                                 const BinSpec& bins, const std::optional<TimeRange>& overlay) {
  if (spec) {
    require_valid(*spec);
    if (static_cast<std::size_t>(ds.max_choice()) > choice_count(*spec)) {
      throw DomainError("dataset has choice " + std::to_string(ds.max_choice()) +
                        " but the model has " + std::to_string(choice_count(*spec)) + " choices");
    }
  }
  const auto panels = histogram_data(ds, bins);

  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_hi = 0.0;
  for (const auto& p : panels) {
    x_lo = std::min(x_lo, p.edges.front());
    x_hi = std::max(x_hi, p.edges.back());
    y_hi = std::max(y_hi, *std::max_element(p.heights.begin(), p.heights.end()));
  }
  std::optional<DensityCurves> curves;
  if (spec) {
    const TimeRange grid = overlay ? *overlay : TimeRange{x_lo, x_hi, kOverlayPoints};
    curves = density_overlay(*spec, grid);
    if (!curves->t.empty()) {
      x_lo = std::min(x_lo, curves->t.front());
      x_hi = std::max(x_hi, curves->t.back());
    }
    for (const auto& p : panels) {
      const auto& d = curves->density[p.choice - 1];
      if (!d.empty()) y_hi = std::max(y_hi, *std::max_element(d.begin(), d.end()));
    }
  }
  y_hi *= 1.05;
  if (!(y_hi > 0.0)) y_hi = 1.0;

  svg::Document doc(kPanelWidth, kPanelHeight * panels.size());
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const auto& p = panels[i];
    const auto box = panel_box(i);
    const svg::Scale sx{x_lo, x_hi, box.left, box.right};
    const svg::Scale sy{0.0, y_hi, box.bottom, box.top};
    doc.open_group("class=\"panel\" data-choice=\"" + std::to_string(p.choice) + "\"");
    doc.axes(box, sx, sy, "rt (s)", "density", "choice " + std::to_string(p.choice));
    for (std::size_t b = 0; b < p.heights.size(); ++b) {
      const double left = sx(p.edges[b]);
      const double top = sy(p.heights[b]);
      doc.rect(left, top, sx(p.edges[b + 1]) - left, box.bottom - top,
               "class=\"bar\" fill=\"#9ecae1\" stroke=\"#3182bd\" stroke-width=\"0.5\"");
    }
    if (curves) {
      std::vector<std::pair<double, double>> pts;
      const auto& d = curves->density[p.choice - 1];
      for (std::size_t k = 0; k < curves->t.size(); ++k) {
        pts.emplace_back(sx(curves->t[k]), sy(d[k]));
      }
      doc.polyline(pts, "class=\"density\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\"");
    }
    doc.close_group();
  }
  return doc.finish();
}

void plot_histogram(const Dataset& ds, const std::optional<ModelSpec>& spec, const BinSpec& bins,
                    const std::filesystem::path& out, const std::optional<TimeRange>& overlay) {
  write_file(out, render_histogram_svg(ds, spec, bins, overlay));
}

std::string render_chains_svg(const Chains& chains) {
  if (chains.n_chains == 0 || chains.n_iterations <= chains.warmup) {
    throw DomainError("no post-warmup draws to plot");
  }
  svg::Document doc(kPanelWidth, kPanelHeight * chains.n_params());
  for (std::size_t p = 0; p < chains.n_params(); ++p) {
    std::vector<double> pooled;
    for (const auto& chain : chains.post_warmup(p)) pooled.insert(pooled.end(), chain.begin(), chain.end());
    std::sort(pooled.begin(), pooled.end());
    const double n = static_cast<double>(pooled.size());
    const double mean = std::accumulate(pooled.begin(), pooled.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : pooled) ss += (x - mean) * (x - mean);
    const double sd = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
    const double iqr = quantile_sorted(pooled, 0.75) - quantile_sorted(pooled, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = sd > 0.0 ? sd : 1e-3 * (std::abs(mean) + 1.0);
    const double bw = 0.9 * spread * std::pow(n, -0.2);

    const double lo = pooled.front() - 3.0 * bw;
    const double hi = pooled.back() + 3.0 * bw;
    std::vector<double> grid(kKdePoints), density(kKdePoints, 0.0);
    for (std::size_t g = 0; g < kKdePoints; ++g) {
      grid[g] = lo + (hi - lo) * g / (kKdePoints - 1);
      for (double x : pooled) density[g] += math::normal_pdf((grid[g] - x) / bw);
      density[g] /= n * bw;
    }
    const double y_hi = 1.05 * *std::max_element(density.begin(), density.end());

    const auto box = panel_box(p);
    const svg::Scale sx{lo, hi, box.left, box.right};
    const svg::Scale sy{0.0, y_hi, box.bottom, box.top};
    doc.open_group("class=\"panel\" data-param=\"" + svg::escape(chains.param_names[p]) + "\"");
    doc.axes(box, sx, sy, chains.param_names[p], "density", chains.param_names[p]);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t g = 0; g < kKdePoints; ++g) pts.emplace_back(sx(grid[g]), sy(density[g]));
    doc.polyline(pts, "class=\"posterior\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"");
    doc.close_group();
  }
  return doc.finish();
}

void plot_chains(const Chains& chains, const std::filesystem::path& out) {
  write_file(out, render_chains_svg(chains));
}

}  // namespace ssm
