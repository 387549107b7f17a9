#pragma once

#include <cstdint>
#include <iosfwd>

#include "json.hpp"

#include "hpart/cluster.hpp"
#include "hpart/diagnostics.hpp"
#include "hpart/experiment.hpp"
#include "hpart/svdpart.hpp"

namespace hpart {

// JSON and CSV surfaces of the library. Non-finite numbers serialize as null.

nlohmann::json to_json(const MatchReport& report);
nlohmann::json to_json(const TailReport& report);
nlohmann::json to_json(const ConditionReport& report);
/// {seed, k_used, degenerate_gap, split_sizes: {y1, y2, z}}
nlohmann::json svd2_metadata(const Svd2Result& result);

/// Timing fields are omitted when include_timing is false, which makes
/// records of repeated runs byte-comparable.
nlohmann::json to_json(const TrialRecord& record, bool include_timing = true);
nlohmann::json to_json(const ExperimentSummary& summary, bool include_timing = true);

/// Model file: {"sizes": [...], "block_probs": [[...], ...]}.
PlantedModel model_from_json(const nlohmann::json& doc);
nlohmann::json model_to_json(const PlantedModel& model);

/// Experiment config file. Example:
///   {"scenario": "bipartition", "params": {"n": 1000, "p": 0.5, "q": 0.2},
///    "algorithm": "svd2", "trials": 20, "base_seed": 1,
///    "metric": {"kind": "eps_correct", "eps": 0.1}}
/// Throws Error(config) on unknown keys or values.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& config);

/// One JSON object per record, then {"summary": ...}.
void write_records_jsonl(std::ostream& out, const ExperimentResult& result, bool include_timing = true);

inline constexpr const char* kCsvHeader = "trial,seed,success,misclassified,time_ms,degenerate_gap";
void write_records_csv(std::ostream& out, const ExperimentResult& result);

}  // namespace hpart
