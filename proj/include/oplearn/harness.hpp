// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "oplearn/sampling.hpp"
#include "oplearn/spectra.hpp"
#include "oplearn/theory.hpp"

namespace oplearn {

enum class EstimatorKind { diagonal, matrix };
enum class ErrorKind { test_error, excess_risk, gen_gap, conditional_closed_form };
/// How diagonal datasets are realized. auto picks sufficient for Gaussian
/// designs and full otherwise.
enum class SamplerKind { automatic, full, sufficient };

std::string_view to_string(EstimatorKind k);
std::string_view to_string(ErrorKind k);
std::string_view to_string(SamplerKind k);

struct TruncationPolicy {
  enum class Kind { fixed, n_dependent };
  Kind kind = Kind::fixed;
  std::size_t modes = 4096;  // fixed(J)
  double factor = 1.0;       // n_dependent(c)

  static TruncationPolicy fixed(std::size_t J) { return {Kind::fixed, J, 1.0}; }
  static TruncationPolicy n_dependent(double c) { return {Kind::n_dependent, 0, c}; }
  std::string describe() const;
};

inline constexpr std::size_t kMinTruncation = 8;

/// fixed(J) -> J; n_dependent(c) -> max(8, ceil(c N^(1/(2(alpha+p))))).
std::size_t truncation_level(const TruncationPolicy& policy, double alpha, double p,
                             std::size_t N);

struct ExperimentConfig {
  std::string name = "experiment";
  /// alpha, alpha', tau1..3, beta and z. p, s and gamma come from
  /// resolved_params unless overridden.
  ModelConfig::Params model;
  std::optional<double> p_override;
  std::optional<double> s_override;
  std::optional<double> gamma_override;
  TruthKind truth = TruthKind::identity;
  EstimatorKind estimator = EstimatorKind::diagonal;
  std::vector<std::size_t> n_grid;
  std::size_t replications = 100;
  TruncationPolicy truncation = TruncationPolicy::fixed(4096);
  ErrorKind error = ErrorKind::test_error;
  DesignLaw law = DesignLaw::gaussian;
  SamplerKind sampler = SamplerKind::automatic;
  double fit_drop_fraction = 0.25;
  double a_rate = -3.0;
  std::size_t galerkin_ratio = 4;
  std::uint64_t seed = 20240901;

  /// Throws InvalidArgument on an inconsistent configuration.
  void validate() const;
};

/// Default noise scale for a built-in truth: 1e-1, 1e-3, 1e-5.
double default_noise_scale(TruthKind truth);

/// Model parameters with p = s* + 1/2 + z, s = s* and the per-truth noise
/// scale filled in where the config leaves them unset.
ModelConfig::Params resolved_params(const ExperimentConfig& cfg);

/// 2^lo, 2^(lo+1), ..., 2^hi
std::vector<std::size_t> pow2_grid(unsigned lo, unsigned hi);

struct RateFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double stderr_ = 0.0;
  std::size_t points = 0;
  bool degenerate = false;  // two points: exact interpolation, stderr undefined
};

/// OLS of log(error) on log(N); exponent = -slope.
RateFit fit_rate(std::span<const std::size_t> N, std::span<const double> error);

struct RatePoint {
  std::size_t N = 0;
  std::size_t modes = 0;
  double mean_error = 0.0;
  double stderr_ = 0.0;
  double median_error = 0.0;
  std::size_t reps = 0;
  /// Tail energy beyond J_N in the error's own normalization.
  double tail_descriptor = 0.0;
};

struct RateReport {
  ExperimentConfig config;
  std::vector<RatePoint> points;
  RateFit fit;
  std::size_t fit_first_index = 0;
  RatePrediction theory;
  std::size_t spectrum_underflows = 0;
  double max_relative_residual = 0.0;
};

/// Error raised inside a replication, tagged with where it happened.
class ExperimentError : public std::runtime_error {
 public:
  ExperimentError(const std::string& what, std::size_t N, std::size_t replication)
      : std::runtime_error(what), N_(N), replication_(replication) {}
  std::size_t N() const noexcept { return N_; }
  std::size_t replication() const noexcept { return replication_; }

 private:
  std::size_t N_;
  std::size_t replication_;
};

/// Theory prediction matching the configured error functional.
RatePrediction theory_for(const ExperimentConfig& cfg);

/// Runs every replication at every N on `workers` threads. Results do not
/// depend on the worker count.
RateReport run_experiment(const ExperimentConfig& cfg, unsigned workers = 1);

/// Per-replication error values, ordered by (N index, replication). Exposed
/// for tests comparing error kinds on identical draws.
std::vector<std::vector<double>> run_replications(const ExperimentConfig& cfg,
                                                  unsigned workers = 1);

// Report serialization. CSV: N, mean_error, stderr, reps; JSON: summary with
// config echo. Both carry the schema version.
std::string report_csv(const RateReport& r);
std::string report_json(const RateReport& r);

// Experiment files: `key = value` lines grouped under `[name]` sections;
// keys before the first section are defaults for every section.
std::vector<ExperimentConfig> parse_experiment_text(std::string_view text);
std::vector<ExperimentConfig> load_experiment_file(const std::string& path);

/// Applies one `key = value` assignment to a parsed config (used for CLI
/// overrides). Throws ConfigError naming the key.
void apply_experiment_key(ExperimentConfig& cfg, std::string_view key, std::string_view value,
                          std::size_t line = 0);

}  // namespace oplearn
