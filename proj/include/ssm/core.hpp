// Parameter sets, trial data and error types shared by every model family.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ssm {

/// Four-parameter diffusion decision model. The within-trial diffusion
/// coefficient is fixed at 1.
struct DDMParams {
  double nu = 1.0;     ///< drift rate
  double alpha = 1.0;  ///< boundary separation
  double tau = 0.3;    ///< non-decision time (s)
  double z = 0.5;      ///< relative start point, fraction of alpha
};

/// Linear ballistic accumulator. Threshold is b = A + k.
struct LBAParams {
  std::vector<double> nu;  ///< mean drift per accumulator
  double A = 0.8;          ///< maximum start point
  double k = 0.2;          ///< threshold minus maximum start point
  double tau = 0.3;
  double sigma = 1.0;  ///< between-trial drift sd, shared by all accumulators

  double threshold() const { return A + k; }
};

/// Racing diffusion model: independent unit-diffusion racers with uniform
/// start points on [0, A] and a common threshold b = A + k.
struct RDMParams {
  std::vector<double> nu;
  double k = 0.5;
  double A = 1.0;
  double tau = 0.3;

  double threshold() const { return A + k; }
};

using ModelSpec = std::variant<DDMParams, LBAParams, RDMParams>;

enum class ModelKind { ddm, lba, rdm };

ModelKind kind_of(const ModelSpec& spec);
std::string_view to_string(ModelKind kind);
/// Accepts "ddm", "lba", "rdm" (case-insensitive).
ModelKind parse_model_kind(std::string_view name);

/// Number of possible responses: 2 for the DDM, one per accumulator otherwise.
std::size_t choice_count(const ModelSpec& spec);
double non_decision_time(const ModelSpec& spec);

/// One trial. For the DDM, choice 1 is the upper boundary and 2 the lower.
struct ChoiceRT {
  int choice = 1;
  double rt = 0.0;

  friend bool operator==(const ChoiceRT&, const ChoiceRT&) = default;
};

struct DatasetMeta {
  std::optional<std::uint64_t> seed;
  std::optional<ModelSpec> generator;
  std::string note;
  std::vector<std::string> warnings;
};

struct Dataset {
  std::vector<ChoiceRT> trials;
  DatasetMeta meta;

  std::size_t size() const { return trials.size(); }
  bool empty() const { return trials.empty(); }
  /// Smallest rt; +inf for an empty dataset.
  double min_rt() const;
  /// Largest choice index; 0 for an empty dataset.
  int max_choice() const;
};

/// A single simulated evidence-accumulation run.
struct Trace {
  std::vector<double> t;                   ///< absolute time grid, t[0] == tau
  std::vector<std::vector<double>> paths;  ///< [accumulator][time]
  std::vector<double> thresholds;          ///< DDM: {alpha, 0}; races: b per accumulator
  int winner = 0;
  double crossing_time = 0.0;
};

/// Invalid parameters, choices out of range and similar caller errors.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed dataset, model or chains files. line() is 1-based; 0 when the
/// error is not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Numerical failure: step caps, resampling caps, infeasible starts.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Validation {
  bool ok = true;
  std::string message;

  explicit operator bool() const { return ok; }
};

/// Checks every parameter invariant; the message names the first violation.
/// Never throws.
Validation validate(const ModelSpec& spec) noexcept;
Validation validate(const DDMParams& p) noexcept;
Validation validate(const LBAParams& p) noexcept;
Validation validate(const RDMParams& p) noexcept;

/// Throws DomainError carrying validate()'s message.
void require_valid(const ModelSpec& spec);
void require_valid(const DDMParams& p);
void require_valid(const LBAParams& p);
void require_valid(const RDMParams& p);

/// Throws DomainError unless 1 <= choice <= choice_count(spec).
void require_choice(const ModelSpec& spec, int choice);

}  // namespace ssm
