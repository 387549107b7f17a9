#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hpart/cluster.hpp"
#include "hpart/model.hpp"

namespace hpart {

/// Random vertex split: Y / Z halves, and Y further into Y1 / Y2. Each list is sorted.
struct SplitPlan {
  std::vector<VertexId> y, z, y1, y2;
  std::uint64_t seed = 0;
};

/// Each vertex joins Y with probability 1/2, each Y vertex joins Y1 with
/// probability 1/2. Splits with an empty Y1, Y2 or Z are redrawn from derived
/// sub-seeds, up to 100 attempts.
SplitPlan make_split(std::size_t n, std::uint64_t seed);

enum class ClusteringRule {
  mst,          // cluster_by_distances_mst
  trimmed_mst,  // cluster_by_distances_trimmed, for approximately separated points
};

struct Svd2Options {
  ClusteringRule clustering = ClusteringRule::mst;
  double trim_fraction = 0.1;
};

struct Svd2Result {
  Partition partition;  // over split.y2
  PointSet points;      // Y2 columns in coordinates of the top-k basis of A-hat
  SplitPlan split;
  bool degenerate_gap = false;
  std::size_t k_used = 0;
};

/// Partition of Y2: B has rows Z and columns Y, A-hat is the Y1 part of B,
/// the Y2 columns of B are projected onto the top-k left singular subspace of
/// A-hat and clustered into k groups.
Svd2Result svd2_run(const Graph& graph, std::size_t k, std::uint64_t seed, const Svd2Options& options = {});

/// Baseline: project every adjacency column onto the adjacency matrix's own
/// top-k left singular subspace and cut the MST into k clusters.
Partition svd1_run(const Graph& graph, std::size_t k);

/// ceil(3 ln n)
std::size_t default_repetitions(std::size_t n);

struct RepetitionOptions {
  std::optional<std::size_t> runs;  // default_repetitions(n) when empty
  /// When false, uncovered vertices are left out of the result instead of
  /// raising CoverageFailure.
  bool require_full_coverage = true;
  Svd2Options svd2;
};

/// Merges per-run partitions of random subsets: (run, cluster) nodes sharing
/// a vertex are joined, and each component of that merge graph becomes one
/// final cluster. Every vertex's covering clusters land in one component, so
/// the per-vertex vote over runs is unanimous. Raises MergeConflict when the
/// component count differs from k and CoverageFailure for uncovered vertices
/// (unless partial coverage is allowed).
Partition merge_run_partitions(std::size_t n, std::size_t k, std::span<const Partition> runs,
                               bool require_full_coverage = true);

/// Runs svd2_run on independently drawn splits of the same graph and merges them.
Partition full_partition_by_repetition(const Graph& graph, std::size_t k, std::uint64_t seed,
                                       const RepetitionOptions& options = {});

/// Largest l with sigma_l(m) >= c3 * sigma * sqrt(max(rows, cols)); 0 if none.
std::size_t essential_rank(const DenseMatrix& m, double sigma, double c3);

/// svd2_run with k replaced by the essential rank of A-hat. Raises NoSignal
/// when that rank is 0.
Svd2Result svd2_essential(const Graph& graph, double sigma, std::uint64_t seed, double c3 = 4.0,
                          const Svd2Options& options = {});

struct SigmaTrial {
  double sigma = 0.0;
  std::optional<std::size_t> rank;  // empty when the trial raised NoSignal
  double score = 0.0;
};

struct SigmaSweepResult {
  Svd2Result best;
  double chosen_sigma = 0.0;
  std::vector<SigmaTrial> trials;
  std::size_t best_index = 0;  // into trials
};

/// Candidate noise levels ln(n)/sqrt(n), doubling while <= 1/2.
std::vector<double> sigma_schedule(std::size_t n);

/// Log-likelihood of the held-out half of the vertex pairs inside the
/// partition's domain under block densities fitted on the other half. The
/// half a pair belongs to is a fixed function of (seed, u, v).
double heldout_block_loglik(const Graph& graph, const Partition& partition, std::uint64_t seed);

/// Runs svd2_essential over sigma_schedule(n) on one split and keeps the
/// candidate with the highest held-out block log-likelihood (ties go to fewer
/// clusters, then to the smaller sigma). Raises NoSignal if every trial did.
SigmaSweepResult sigma_sweep(const Graph& graph, std::uint64_t seed, double c3 = 4.0, const Svd2Options& options = {});

struct ConditionReport {
  double cond1_lhs = 0.0, cond1_rhs = 0.0;
  double cond2_lhs = 0.0, cond2_rhs = 0.0;
  bool cond1 = false, cond2 = false;
  bool sigma_floor_ok = false;
  bool s_floor_ok = false;
  bool k_ok = false;
};

/// Literal evaluation of the recovery conditions with constant c (natural log):
///   cond1: delta >= c (sigma sqrt(n/s) + sqrt(ln n))
///   cond2: delta >= c (sigma sqrt(n/s) + sigma sqrt(k ln n) + sigma sqrt(n k) / lambda_k)
/// plus the floors sigma^2 >= c ln n / n, s >= c ln n and k <= sqrt(n / ln n).
ConditionReport check_conditions(const ModelStats& stats, std::size_t n, std::size_t k, double c);

/// Degree correction for a planted bipartition with p > q. X1' is the side of
/// `approx` with the higher internal edge density; every vertex is scored by
/// its neighbour count in X1' and the ceil(n/2) best (ties by id) form the
/// first cluster. `approx` may cover only part of the vertex set; the output
/// always covers all n vertices.
Partition correct_bipartition(const Graph& graph, const Partition& approx);

}  // namespace hpart
