#include "hpart/report.hpp"

#include <cmath>
#include <ostream>
#include <set>
#include <string>

#include "hpart/error.hpp"

namespace hpart {
namespace {

using nlohmann::json;

json number(double value) { return std::isfinite(value) ? json(value) : json(nullptr); }

json number_map(const std::map<std::string, double>& values) {
  json out = json::object();
  for (const auto& [key, value] : values) out[key] = number(value);
  return out;
}

void reject_unknown_keys(const json& doc, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& item : doc.items())
    if (!allowed.contains(item.key())) throw Error(ErrorKind::config, "unknown key '" + item.key() + "' in " + where);
}

template <typename Enum, std::size_t N>
Enum parse_enum(const json& value, const Enum (&options)[N], const std::string& what) {
  if (!value.is_string()) throw Error(ErrorKind::config, what + " must be a string");
  const auto text = value.get<std::string>();
  for (Enum option : options)
    if (to_string(option) == text) return option;
  throw Error(ErrorKind::config, "unknown " + what + " '" + text + "'");
}

DenseMatrix matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw Error(ErrorKind::config, "block_probs must be a nonempty array of arrays");
  const auto k = static_cast<Eigen::Index>(rows.size());
  DenseMatrix m(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != k)
      throw Error(ErrorKind::config, "block_probs must be square");
    for (Eigen::Index j = 0; j < k; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
  }
  return m;
}

json matrix_to_json(const DenseMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

json to_json(const MatchReport& report) {
  return {{"misclassified_count", report.misclassified_count},
          {"per_cluster_errors", report.per_cluster_errors},
          {"exact", report.exact}};
}

json to_json(const TailReport& report) {
  json out = {{"check", report.check},
              {"n", report.n},
              {"params", number_map(report.params)},
              {"samples", report.samples},
              {"threshold", number(report.threshold)},
              {"exceed_count", report.exceed_count},
              {"empirical_rate", number(report.empirical_rate)},
              {"bound_rate", number(report.bound_rate)},
              {"pass", report.pass}};
  if (!report.metrics.empty()) out["metrics"] = number_map(report.metrics);
  return out;
}

json to_json(const ConditionReport& report) {
  return {{"cond1_lhs", number(report.cond1_lhs)}, {"cond1_rhs", number(report.cond1_rhs)},
          {"cond2_lhs", number(report.cond2_lhs)}, {"cond2_rhs", number(report.cond2_rhs)},
          {"cond1", report.cond1},                 {"cond2", report.cond2},
          {"sigma_floor_ok", report.sigma_floor_ok}, {"s_floor_ok", report.s_floor_ok},
          {"k_ok", report.k_ok}};
}

json svd2_metadata(const Svd2Result& result) {
  return {{"seed", result.split.seed},
          {"k_used", result.k_used},
          {"degenerate_gap", result.degenerate_gap},
          {"split_sizes", {{"y1", result.split.y1.size()}, {"y2", result.split.y2.size()}, {"z", result.split.z.size()}}}};
}

json to_json(const TrialRecord& record, bool include_timing) {
  json out = {{"trial_index", record.trial_index},
              {"seed", record.seed},
              {"success", record.success},
              {"misclassified", record.misclassified},
              {"scored_vertices", record.scored_vertices},
              {"degenerate_gap", record.degenerate_gap},
              {"condition_report", to_json(record.condition_report)}};
  if (include_timing) out["wall_time_ms"] = record.wall_time_ms;
  if (record.k_used) out["k_used"] = *record.k_used;
  if (record.chosen_sigma) out["chosen_sigma"] = *record.chosen_sigma;
  if (record.coverage) out["coverage"] = *record.coverage;
  if (record.error) out["error"] = *record.error;
  return out;
}

json to_json(const ExperimentSummary& summary, bool include_timing) {
  json out = {{"trials", summary.trials},
              {"success_rate", summary.success_rate},
              {"mean_misclassified", summary.mean_misclassified}};
  if (include_timing) out["mean_time_ms"] = summary.mean_time_ms;
  return out;
}

PlantedModel model_from_json(const json& doc) {
  try {
    reject_unknown_keys(doc, {"sizes", "block_probs"}, "model");
    const auto sizes = doc.at("sizes").get<std::vector<std::size_t>>();
    return build_model(sizes, matrix_from_json(doc.at("block_probs")));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("model file: ") + e.what());
  }
}

json model_to_json(const PlantedModel& model) {
  const auto sizes = model.cluster_sizes();
  return {{"sizes", std::vector<std::size_t>(sizes.begin(), sizes.end())}, {"block_probs", matrix_to_json(model.block_probs())}};
}

ExperimentConfig config_from_json(const json& doc) {
  static constexpr Scenario kScenarios[] = {Scenario::clique, Scenario::coloring, Scenario::bipartition, Scenario::general};
  static constexpr Algorithm kAlgorithms[] = {Algorithm::svd2,           Algorithm::svd1,
                                              Algorithm::svd2_essential, Algorithm::sigma_sweep,
                                              Algorithm::svd2_plus_correction, Algorithm::full_repetition};
  static constexpr MetricKind kMetrics[] = {MetricKind::exact, MetricKind::eps_correct, MetricKind::eps_perfect};
  static constexpr ClusteringRule kRules[] = {ClusteringRule::mst, ClusteringRule::trimmed_mst};

  if (!doc.is_object()) throw Error(ErrorKind::config, "config must be a JSON object");
  ExperimentConfig config;
  try {
    reject_unknown_keys(doc,
                        {"scenario", "params", "algorithm", "trials", "base_seed", "metric", "c", "c3", "sigma",
                         "clustering", "trim_fraction", "repetitions", "require_full_coverage", "min_success_rate"},
                        "config");
    config.scenario = parse_enum(doc.at("scenario"), kScenarios, "scenario");
    config.algorithm = parse_enum(doc.value("algorithm", json("svd2")), kAlgorithms, "algorithm");
    config.trials = doc.value("trials", std::size_t{1});
    config.base_seed = doc.value("base_seed", std::uint64_t{0});

    const json& params = doc.at("params");
    reject_unknown_keys(params, {"n", "k", "s", "p", "q", "sizes", "block_probs"}, "params");
    ScenarioParams& p = config.params;
    p.n = params.value("n", std::size_t{0});
    p.k = params.value("k", std::size_t{0});
    p.s = params.value("s", std::size_t{0});
    p.p = params.value("p", 0.0);
    p.q = params.value("q", 0.0);
    if (params.contains("sizes")) p.sizes = params.at("sizes").get<std::vector<std::size_t>>();
    if (params.contains("block_probs")) p.block_probs = matrix_from_json(params.at("block_probs"));

    if (doc.contains("metric")) {
      const json& metric = doc.at("metric");
      if (metric.is_string()) {
        config.metric.kind = parse_enum(metric, kMetrics, "metric");
      } else {
        reject_unknown_keys(metric, {"kind", "eps"}, "metric");
        config.metric.kind = parse_enum(metric.at("kind"), kMetrics, "metric");
        config.metric.eps = metric.value("eps", config.metric.eps);
      }
    }
    config.condition_c = doc.value("c", config.condition_c);
    config.c3 = doc.value("c3", config.c3);
    if (doc.contains("sigma")) config.sigma = doc.at("sigma").get<double>();
    if (doc.contains("clustering")) config.clustering = parse_enum(doc.at("clustering"), kRules, "clustering");
    config.trim_fraction = doc.value("trim_fraction", config.trim_fraction);
    if (doc.contains("repetitions") && !doc.at("repetitions").is_null())
      config.repetitions = doc.at("repetitions").get<std::size_t>();
    config.require_full_coverage = doc.value("require_full_coverage", true);
    if (doc.contains("min_success_rate")) config.min_success_rate = doc.at("min_success_rate").get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("config: ") + e.what());
  }
  return config;
}

json to_json(const ExperimentConfig& config) {
  json params;
  const ScenarioParams& p = config.params;
  switch (config.scenario) {
    case Scenario::clique: params = {{"n", p.n}, {"p", p.p}, {"s", p.s}}; break;
    case Scenario::coloring: params = {{"n", p.n}, {"k", p.k}, {"p", p.p}}; break;
    case Scenario::bipartition: params = {{"n", p.n}, {"p", p.p}, {"q", p.q}}; break;
    case Scenario::general: params = {{"sizes", p.sizes}, {"block_probs", matrix_to_json(p.block_probs)}}; break;
  }
  json out = {{"scenario", to_string(config.scenario)},
              {"params", params},
              {"algorithm", to_string(config.algorithm)},
              {"trials", config.trials},
              {"base_seed", config.base_seed},
              {"metric", {{"kind", to_string(config.metric.kind)}, {"eps", config.metric.eps}}},
              {"c", config.condition_c},
              {"c3", config.c3},
              {"trim_fraction", config.trim_fraction},
              {"require_full_coverage", config.require_full_coverage}};
  if (config.sigma) out["sigma"] = *config.sigma;
  if (config.clustering) out["clustering"] = to_string(*config.clustering);
  if (config.repetitions) out["repetitions"] = *config.repetitions;
  if (config.min_success_rate) out["min_success_rate"] = *config.min_success_rate;
  return out;
}

void write_records_jsonl(std::ostream& out, const ExperimentResult& result, bool include_timing) {
  for (const TrialRecord& record : result.records) out << to_json(record, include_timing).dump() << '\n';
  out << json{{"summary", to_json(result.summary, include_timing)}}.dump() << '\n';
}

void write_records_csv(std::ostream& out, const ExperimentResult& result) {
  out << kCsvHeader << '\n';
  for (const TrialRecord& r : result.records) {
    out << r.trial_index << ',' << r.seed << ',' << (r.success ? 1 : 0) << ',' << r.misclassified << ','
        << r.wall_time_ms << ',' << (r.degenerate_gap ? 1 : 0) << '\n';
  }
}

}  // namespace hpart
