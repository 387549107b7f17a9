#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hpart/diagnostics.hpp"
#include "hpart/model.hpp"
#include "hpart/svdpart.hpp"

namespace hpart {

enum class Scenario { clique, coloring, bipartition, general };
enum class Algorithm { svd2, svd1, svd2_essential, sigma_sweep, svd2_plus_correction, full_repetition };
enum class MetricKind { exact, eps_correct, eps_perfect };

struct SuccessMetric {
  MetricKind kind = MetricKind::exact;
  double eps = 0.1;
};

/// Scenario parameters; which fields are read depends on the scenario:
/// clique (n, p, s), coloring (n, k, p), bipartition (n, p, q), general (sizes, block_probs).
struct ScenarioParams {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t s = 0;
  double p = 0.0;
  double q = 0.0;
  std::vector<std::size_t> sizes;
  DenseMatrix block_probs;
};

inline constexpr std::size_t kMaxDenseVertices = 5000;

struct ExperimentConfig {
  Scenario scenario = Scenario::bipartition;
  ScenarioParams params;
  Algorithm algorithm = Algorithm::svd2;
  std::size_t trials = 1;
  std::uint64_t base_seed = 0;
  SuccessMetric metric;
  double condition_c = 1.0;         // constant used in the condition report
  double c3 = 4.0;                  // essential-rank constant
  std::optional<double> sigma;      // svd2_essential noise level; the model's sigma when empty
  std::optional<ClusteringRule> clustering;  // mst, except trimmed_mst for svd2_plus_correction
  double trim_fraction = 0.1;
  std::optional<std::size_t> repetitions;    // full_repetition runs; ceil(3 ln n) when empty
  bool require_full_coverage = true;
  std::optional<double> min_success_rate;    // asserted criterion for the CLI exit code
};

/// Throws Error(config) for incomplete or out-of-range settings.
void validate(const ExperimentConfig& config);

PlantedModel build_scenario_model(const ExperimentConfig& config);

/// Closed-form separation of the presets: clique (1-p) sqrt(s), coloring
/// p sqrt(2n/k), bipartition |p-q| sqrt(n); empty for general models.
std::optional<double> closed_form_delta(const ExperimentConfig& config);

struct TrialRecord {
  std::size_t trial_index = 0;
  std::uint64_t seed = 0;
  bool success = false;
  std::size_t misclassified = 0;
  std::size_t scored_vertices = 0;
  double wall_time_ms = 0.0;
  bool degenerate_gap = false;
  ConditionReport condition_report;
  std::optional<std::size_t> k_used;
  std::optional<double> chosen_sigma;
  std::optional<double> coverage;  // fraction of vertices covered (full_repetition)
  std::optional<std::string> error;
};

struct ExperimentSummary {
  std::size_t trials = 0;
  double success_rate = 0.0;
  double mean_misclassified = 0.0;
  double mean_time_ms = 0.0;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;
  ExperimentSummary summary;
};

/// Trial t samples its graph with seed base_seed + t; the algorithm receives
/// derive_seed(seed, Stream::instance). Ground truth is used only for
/// scoring. Algorithm errors mark the trial failed and are recorded, never thrown.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// One trial, exposed for tests and the CLI.
TrialRecord run_trial(const ExperimentConfig& config, const PlantedModel& model, const ModelStats& stats,
                      std::size_t trial_index);

struct SweepRow {
  double value = 0.0;
  ExperimentSummary summary;
};

/// Numeric axes: n, p, q, s, k (each valid only for scenarios that read it).
std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const std::string& axis, std::span<const double> values);

struct DiagnosticConstants {
  double c0 = 3.0;
  double c1 = 4.0;
  double c2 = 4.0;
};

/// projection_tail, flat_basis_projection, noise_norm, davis_kahan,
/// singular_value_transfer, weighted_sum_tail.
std::vector<std::string> diagnostic_names();

/// Runs each named check at its default desk-scale parameters.
std::vector<TailReport> run_diagnostics(std::span<const std::string> names, std::uint64_t seed,
                                        const DiagnosticConstants& constants = {});

std::string_view to_string(Scenario scenario);
std::string_view to_string(Algorithm algorithm);
std::string_view to_string(MetricKind metric);
std::string_view to_string(ClusteringRule rule);

}  // namespace hpart
