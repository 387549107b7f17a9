#include "hpart/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "hpart/error.hpp"
#include "hpart/rng.hpp"

namespace hpart {
namespace {

constexpr int kMaxCorrectionPasses = 10;

void config_check(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::config, what);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

bool scores_y2(Algorithm algorithm) {
  return algorithm == Algorithm::svd2 || algorithm == Algorithm::svd2_essential || algorithm == Algorithm::sigma_sweep;
}

ClusteringRule clustering_for(const ExperimentConfig& config) {
  if (config.clustering) return *config.clustering;
  return config.algorithm == Algorithm::svd2_plus_correction ? ClusteringRule::trimmed_mst : ClusteringRule::mst;
}

double noise_level(const ExperimentConfig& config, const ModelStats& stats) { return config.sigma.value_or(stats.sigma); }

// Applies the degree correction until it reaches a fixed point.
Partition corrected_to_fixed_point(const Graph& graph, const Partition& approx) {
  Partition current = correct_bipartition(graph, approx);
  for (int pass = 1; pass < kMaxCorrectionPasses; ++pass) {
    Partition next = correct_bipartition(graph, current);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

}  // namespace

std::string_view to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::clique: return "clique";
    case Scenario::coloring: return "coloring";
    case Scenario::bipartition: return "bipartition";
    case Scenario::general: return "general";
  }
  return "?";
}

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::svd2: return "svd2";
    case Algorithm::svd1: return "svd1";
    case Algorithm::svd2_essential: return "svd2_essential";
    case Algorithm::sigma_sweep: return "sigma_sweep";
    case Algorithm::svd2_plus_correction: return "svd2_plus_correction";
    case Algorithm::full_repetition: return "full_repetition";
  }
  return "?";
}

std::string_view to_string(MetricKind metric) {
  switch (metric) {
    case MetricKind::exact: return "exact";
    case MetricKind::eps_correct: return "eps_correct";
    case MetricKind::eps_perfect: return "eps_perfect";
  }
  return "?";
}

std::string_view to_string(ClusteringRule rule) {
  switch (rule) {
    case ClusteringRule::mst: return "mst";
    case ClusteringRule::trimmed_mst: return "trimmed_mst";
  }
  return "?";
}

void validate(const ExperimentConfig& config) {
  const ScenarioParams& p = config.params;
  config_check(config.trials >= 1, "trials must be >= 1");
  switch (config.scenario) {
    case Scenario::clique:
      config_check(p.n >= 1 && p.s >= 1 && p.s <= p.n, "clique needs 1 <= s <= n");
      config_check(is_probability(p.p), "clique p must be in [0,1]");
      break;
    case Scenario::coloring:
      config_check(p.n >= 1 && p.k >= 1 && p.k <= p.n, "coloring needs 1 <= k <= n");
      config_check(is_probability(p.p), "coloring p must be in [0,1]");
      break;
    case Scenario::bipartition:
      config_check(p.n >= 2, "bipartition needs n >= 2");
      config_check(is_probability(p.p) && is_probability(p.q), "bipartition p, q must be in [0,1]");
      break;
    case Scenario::general:
      config_check(!p.sizes.empty(), "general scenario needs sizes");
      break;
  }
  config_check(config.metric.eps >= 0.0 && config.metric.eps < 1.0, "metric eps must be in [0,1)");
  config_check(config.metric.kind != MetricKind::eps_perfect || scores_y2(config.algorithm),
               "eps_perfect scoring needs an algorithm that returns projected points");
  config_check(config.trim_fraction >= 0.0 && config.trim_fraction < 1.0, "trim_fraction must be in [0,1)");
  config_check(config.condition_c > 0.0 && config.c3 > 0.0, "constants must be positive");
  config_check(!config.repetitions || *config.repetitions >= 1, "repetitions must be >= 1");

  PlantedModel model = [&] {
    try {
      return build_scenario_model(config);
    } catch (const Error& e) {
      throw Error(ErrorKind::config, e.what());
    }
  }();
  config_check(model.n() <= kMaxDenseVertices, "n exceeds the dense limit of 5000 vertices");
  config_check(model.n() >= 4 || !(scores_y2(config.algorithm) || config.algorithm == Algorithm::svd2_plus_correction ||
                                   config.algorithm == Algorithm::full_repetition),
               "split-based algorithms need n >= 4");
  config_check(config.algorithm != Algorithm::svd2_plus_correction || model.k() == 2,
               "svd2_plus_correction needs a two-cluster model");
  if (config.algorithm == Algorithm::svd2_essential)
    config_check(noise_level(config, compute_stats(model)) > 0.0, "svd2_essential needs sigma > 0");
}

PlantedModel build_scenario_model(const ExperimentConfig& config) {
  const ScenarioParams& p = config.params;
  switch (config.scenario) {
    case Scenario::clique: {
      if (p.s == p.n) return build_model(std::vector<std::size_t>{p.n}, DenseMatrix::Ones(1, 1));
      DenseMatrix blocks(2, 2);
      blocks << 1.0, p.p, p.p, p.p;
      return build_model(std::vector<std::size_t>{p.s, p.n - p.s}, blocks);
    }
    case Scenario::coloring: {
      std::vector<std::size_t> sizes(p.k, p.n / p.k);
      for (std::size_t c = 0; c < p.n % p.k; ++c) ++sizes[c];
      const auto k = static_cast<Eigen::Index>(p.k);
      const DenseMatrix blocks = p.p * (DenseMatrix::Ones(k, k) - DenseMatrix::Identity(k, k));
      return build_model(sizes, blocks);
    }
    case Scenario::bipartition: {
      DenseMatrix blocks(2, 2);
      blocks << p.p, p.q, p.q, p.p;
      return build_model(std::vector<std::size_t>{p.n - p.n / 2, p.n / 2}, blocks);
    }
    case Scenario::general:
      return build_model(p.sizes, p.block_probs);
  }
  throw Error(ErrorKind::config, "unknown scenario");
}

std::optional<double> closed_form_delta(const ExperimentConfig& config) {
  const ScenarioParams& p = config.params;
  switch (config.scenario) {
    case Scenario::clique:
      return (1.0 - p.p) * std::sqrt(static_cast<double>(p.s));
    case Scenario::coloring:
      return p.p * std::sqrt(2.0 * static_cast<double>(p.n) / static_cast<double>(p.k));
    case Scenario::bipartition:
      return std::abs(p.p - p.q) * std::sqrt(static_cast<double>(p.n));
    case Scenario::general:
      break;
  }
  return std::nullopt;
}

TrialRecord run_trial(const ExperimentConfig& config, const PlantedModel& model, const ModelStats& stats,
                      std::size_t trial_index) {
  TrialRecord record;
  record.trial_index = trial_index;
  record.seed = config.base_seed + trial_index;
  const std::uint64_t algorithm_seed = derive_seed(record.seed, Stream::instance);
  const Graph graph = sample_graph(model, record.seed);
  const Partition truth = truth_partition(model);
  const Svd2Options svd2_options{clustering_for(config), config.trim_fraction};
  std::size_t rank_for_conditions = model.k();

  const auto start = std::chrono::steady_clock::now();
  try {
    Partition found;
    std::optional<PointSet> points;
    auto take = [&](Svd2Result&& result) {
      found = std::move(result.partition);
      points = std::move(result.points);
      record.degenerate_gap = result.degenerate_gap;
      record.k_used = result.k_used;
    };
    switch (config.algorithm) {
      case Algorithm::svd2:
        take(svd2_run(graph, model.k(), algorithm_seed, svd2_options));
        break;
      case Algorithm::svd2_essential:
        take(svd2_essential(graph, noise_level(config, stats), algorithm_seed, config.c3, svd2_options));
        break;
      case Algorithm::sigma_sweep: {
        SigmaSweepResult sweep = sigma_sweep(graph, algorithm_seed, config.c3, svd2_options);
        record.chosen_sigma = sweep.chosen_sigma;
        take(std::move(sweep.best));
        break;
      }
      case Algorithm::svd1:
        found = svd1_run(graph, model.k());
        record.k_used = model.k();
        break;
      case Algorithm::svd2_plus_correction: {
        Svd2Result approx = svd2_run(graph, model.k(), algorithm_seed, svd2_options);
        record.degenerate_gap = approx.degenerate_gap;
        record.k_used = approx.k_used;
        found = corrected_to_fixed_point(graph, approx.partition);
        break;
      }
      case Algorithm::full_repetition: {
        RepetitionOptions options;
        options.runs = config.repetitions;
        options.require_full_coverage = config.require_full_coverage;
        options.svd2 = svd2_options;
        found = full_partition_by_repetition(graph, model.k(), algorithm_seed, options);
        record.k_used = model.k();
        record.coverage = static_cast<double>(found.size()) / static_cast<double>(model.n());
        break;
      }
    }
    record.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    const MatchReport match = match_partitions(found, truth);
    record.misclassified = match.misclassified_count;
    record.scored_vertices = found.size();
    switch (config.metric.kind) {
      case MetricKind::exact:
        record.success = match.exact;
        break;
      case MetricKind::eps_correct:
        record.success = is_eps_correct(found, truth, config.metric.eps);
        break;
      case MetricKind::eps_perfect:
        record.success = check_eps_perfect_representation(*points, truth, config.metric.eps);
        break;
    }
    if (record.k_used) rank_for_conditions = *record.k_used;
  } catch (const Error& e) {
    record.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    record.success = false;
    record.misclassified = model.n();
    record.error = e.what();
  }

  ModelStats effective = stats;
  effective.lambda_k = rank_for_conditions >= 1 && rank_for_conditions <= stats.p_singular_values.size()
                           ? stats.p_singular_values[rank_for_conditions - 1]
                           : 0.0;
  record.condition_report = check_conditions(effective, model.n(), rank_for_conditions, config.condition_c);
  return record;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  const PlantedModel model = build_scenario_model(config);
  const ModelStats stats = compute_stats(model);
  ExperimentResult result;
  result.records.reserve(config.trials);
  for (std::size_t t = 0; t < config.trials; ++t) result.records.push_back(run_trial(config, model, stats, t));

  ExperimentSummary& summary = result.summary;
  summary.trials = result.records.size();
  double successes = 0.0, misclassified = 0.0, time = 0.0;
  for (const TrialRecord& record : result.records) {
    successes += record.success ? 1.0 : 0.0;
    misclassified += static_cast<double>(record.misclassified);
    time += record.wall_time_ms;
  }
  const double trials = static_cast<double>(summary.trials);
  summary.success_rate = successes / trials;
  summary.mean_misclassified = misclassified / trials;
  summary.mean_time_ms = time / trials;
  return result;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const std::string& axis, std::span<const double> values) {
  auto integral = [&](double value) {
    config_check(value >= 0.0 && std::floor(value) == value, "axis " + axis + " takes non-negative integers");
    return static_cast<std::size_t>(value);
  };
  auto axis_allowed = [&] {
    switch (config.scenario) {
      case Scenario::clique: return axis == "n" || axis == "p" || axis == "s";
      case Scenario::coloring: return axis == "n" || axis == "p" || axis == "k";
      case Scenario::bipartition: return axis == "n" || axis == "p" || axis == "q";
      case Scenario::general: return false;
    }
    return false;
  };
  config_check(axis_allowed(), "axis '" + axis + "' is not a numeric parameter of scenario " +
                                   std::string(to_string(config.scenario)));
  config_check(!values.empty(), "sweep needs at least one value");

  std::vector<SweepRow> rows;
  for (double value : values) {
    ExperimentConfig point = config;
    if (axis == "n") point.params.n = integral(value);
    if (axis == "s") point.params.s = integral(value);
    if (axis == "k") point.params.k = integral(value);
    if (axis == "p") point.params.p = value;
    if (axis == "q") point.params.q = value;
    rows.push_back({value, run_experiment(point).summary});
  }
  return rows;
}

std::vector<std::string> diagnostic_names() {
  return {"projection_tail", "flat_basis_projection", "noise_norm", "davis_kahan", "singular_value_transfer",
          "weighted_sum_tail"};
}

std::vector<TailReport> run_diagnostics(std::span<const std::string> names, std::uint64_t seed,
                                        const DiagnosticConstants& constants) {
  const auto known = diagnostic_names();
  for (const std::string& name : names)
    if (std::find(known.begin(), known.end(), name) == known.end())
      throw Error(ErrorKind::config, "unknown diagnostic check '" + name + "'");

  std::vector<TailReport> reports;
  for (const std::string& name : names) {
    if (name == "projection_tail") {
      reports.push_back(projection_tail_check(1000, 20, 0.5, 10000, seed, constants.c1));
    } else if (name == "flat_basis_projection") {
      reports.push_back(flat_basis_projection_check(1000, 200, 5, 0.5, 10000, seed, constants.c2));
    } else if (name == "noise_norm") {
      const PlantedModel model = build_model(std::vector<std::size_t>{1000}, DenseMatrix::Constant(1, 1, 0.5));
      reports.push_back(noise_norm_check(model, 50, constants.c0, seed));
    } else if (name == "davis_kahan") {
      reports.push_back(davis_kahan_sweep(200, 50, 30, seed));
    } else if (name == "singular_value_transfer") {
      DenseMatrix blocks(2, 2);
      blocks << 0.5, 0.2, 0.2, 0.5;
      const PlantedModel model = build_model(std::vector<std::size_t>{500, 500}, blocks);
      reports.push_back(singular_value_transfer_check(model, 100, seed));
    } else if (name == "weighted_sum_tail") {
      reports.push_back(weighted_sum_tail_check(1000, 0.05, 0.5, 100000, seed));
    }
  }
  return reports;
}

}  // namespace hpart
