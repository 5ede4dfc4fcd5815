// SVG figures: choice-paneled RT histograms with density overlays,
// evidence-accumulation traces, and posterior density panels.
//
// Histograms use joint (defective) normalisation: the bar areas of panel c
// sum to the fraction of trials with choice c, so the areas over all panels
// sum to one and the unconditioned model density overlays directly.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ssm/core.hpp"
#include "ssm/inference.hpp"

namespace ssm {

inline constexpr double kPanelWidth = 600.0;
inline constexpr double kPanelHeight = 400.0;

struct TimeRange {
  double start = 0.0;
  double stop = 1.0;
  std::size_t length = 100;

  std::vector<double> grid() const;
};

/// count > 0: that many equal bins per panel over the panel's rt range.
/// edges non-empty: shared edges; trials outside them are dropped.
/// Neither: Freedman-Diaconis width per panel.
struct BinSpec {
  std::size_t count = 0;
  std::vector<double> edges;
};

struct HistogramPanel {
  int choice = 0;
  std::size_t n_trials = 0;
  std::vector<double> edges;
  std::vector<double> heights;
};

/// One panel per observed choice, ascending. Throws DomainError when empty.
std::vector<HistogramPanel> histogram_data(const Dataset& ds, const BinSpec& bins = {});

struct DensityCurves {
  std::vector<double> t;
  std::vector<std::vector<double>> density;  ///< [choice - 1][grid index]
};

/// model_pdf on the grid, for every choice of the model.
DensityCurves density_overlay(const ModelSpec& spec, const TimeRange& range);

/// Trace simulation i uses substream(seed, i). The Euler step is the grid
/// step of `range`; the x axis spans the range and any later crossings.
std::string render_model_svg(const ModelSpec& spec, std::size_t n_sim, const TimeRange& range,
                             std::uint64_t seed);
void plot_model(const ModelSpec& spec, std::size_t n_sim, const TimeRange& range,
                const std::filesystem::path& out, std::uint64_t seed);

/// Throws DomainError if a trial's choice exceeds the spec's choice count.
std::string render_histogram_svg(const Dataset& ds, const std::optional<ModelSpec>& spec,
                                 const BinSpec& bins = {},
                                 const std::optional<TimeRange>& overlay = std::nullopt);
void plot_histogram(const Dataset& ds, const std::optional<ModelSpec>& spec, const BinSpec& bins,
                    const std::filesystem::path& out,
                    const std::optional<TimeRange>& overlay = std::nullopt);

/// Gaussian kernel density of the pooled post-warmup draws, one panel per
/// parameter.
std::string render_chains_svg(const Chains& chains);
void plot_chains(const Chains& chains, const std::filesystem::path& out);

}  // namespace ssm
