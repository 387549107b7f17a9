#include "hpart/svdpart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hpart/error.hpp"
#include "hpart/rng.hpp"

namespace hpart {
namespace {

constexpr int kMaxSplitAttempts = 100;

Partition cluster_points(const PointSet& points, std::size_t k, const Svd2Options& options) {
  switch (options.clustering) {
    case ClusteringRule::trimmed_mst:
      return cluster_by_distances_trimmed(points, k, options.trim_fraction);
    case ClusteringRule::mst:
      break;
  }
  return cluster_by_distances_mst(points, k);
}

// Steps (1) and (2) on a fixed split; A-hat reads adjacency[Z][Y1] and the
// projected points read adjacency[Z][Y2], disjoint sets of entries.
Svd2Result project_and_cluster(const Graph& graph, SplitPlan split, const DenseMatrix& a_hat, std::size_t k,
                               const Svd2Options& options) {
  if (split.y2.size() < k)
    throw Error(ErrorKind::insufficient_split, "|Y2| = " + std::to_string(split.y2.size()) + " < k = " + std::to_string(k));
  const Basis basis = top_k_left_basis(a_hat, k);
  PointSet points(split.y2, basis.coordinates(graph.block(split.z, split.y2)));
  Svd2Result result;
  result.partition = cluster_points(points, k, options);
  result.points = std::move(points);
  result.split = std::move(split);
  result.degenerate_gap = basis.degenerate_gap();
  result.k_used = k;
  return result;
}

void require_rank_fits(const SplitPlan& split, std::size_t k) {
  if (split.y1.size() < k || split.z.size() < k)
    throw Error(ErrorKind::insufficient_split, "split too small for k = " + std::to_string(k) +
                                                   " (|Y1| = " + std::to_string(split.y1.size()) +
                                                   ", |Z| = " + std::to_string(split.z.size()) + ")");
}

std::vector<VertexId> all_vertices(std::size_t n) {
  std::vector<VertexId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

}  // namespace

SplitPlan make_split(std::size_t n, std::uint64_t seed) {
  if (n < 4) throw Error(ErrorKind::validation, "make_split needs n >= 4");
  for (int attempt = 0; attempt < kMaxSplitAttempts; ++attempt) {
    Rng rng(attempt == 0 ? seed : derive_seed(seed, Stream::split_retry, static_cast<std::uint64_t>(attempt)));
    SplitPlan plan;
    plan.seed = seed;
    for (VertexId v = 0; v < n; ++v) {
      if (rng.bernoulli(0.5)) {
        plan.y.push_back(v);
        (rng.bernoulli(0.5) ? plan.y1 : plan.y2).push_back(v);
      } else {
        plan.z.push_back(v);
      }
    }
    if (!plan.y1.empty() && !plan.y2.empty() && !plan.z.empty()) return plan;
  }
  throw Error(ErrorKind::insufficient_split, "no split with nonempty Y1, Y2, Z after 100 attempts");
}

Svd2Result svd2_run(const Graph& graph, std::size_t k, std::uint64_t seed, const Svd2Options& options) {
  if (k < 1) throw Error(ErrorKind::validation, "svd2_run: k must be >= 1");
  SplitPlan split = make_split(graph.n(), seed);
  require_rank_fits(split, k);
  const DenseMatrix a_hat = graph.block(split.z, split.y1);
  return project_and_cluster(graph, std::move(split), a_hat, k, options);
}

Partition svd1_run(const Graph& graph, std::size_t k) {
  if (k < 1 || k > graph.n()) throw Error(ErrorKind::validation, "svd1_run: k out of range");
  const DenseMatrix adjacency = graph.adjacency().cast<double>();
  const Basis basis = top_k_left_basis(adjacency, k);
  const PointSet points(all_vertices(graph.n()), basis.coordinates(adjacency));
  return cluster_by_distances_mst(points, k);
}

std::size_t default_repetitions(std::size_t n) {
  return static_cast<std::size_t>(std::ceil(3.0 * std::log(static_cast<double>(n))));
}

Partition merge_run_partitions(std::size_t n, std::size_t k, std::span<const Partition> runs,
                               bool require_full_coverage) {
  std::vector<std::size_t> offset(runs.size() + 1, 0);
  for (std::size_t r = 0; r < runs.size(); ++r) offset[r + 1] = offset[r] + runs[r].num_clusters();
  std::vector<std::size_t> parent(offset.back());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> first_node(n, kNone);
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto domain = runs[r].domain();
    const auto labels = runs[r].labels();
    for (std::size_t i = 0; i < domain.size(); ++i) {
      if (domain[i] >= n) throw Error(ErrorKind::validation, "run partition mentions vertex outside [0, n)");
      const std::size_t node = offset[r] + labels[i];
      if (first_node[domain[i]] == kNone) {
        first_node[domain[i]] = node;
      } else {
        const std::size_t a = find(node), b = find(first_node[domain[i]]);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }

  std::size_t components = 0;
  for (std::size_t node = 0; node < parent.size(); ++node) components += find(node) == node;
  if (components != k)
    throw Error(ErrorKind::merge_conflict, "merged runs give " + std::to_string(components) + " clusters, expected " +
                                               std::to_string(k));

  std::vector<VertexId> ids;
  std::vector<std::size_t> labels;
  std::size_t uncovered = 0;
  for (VertexId v = 0; v < n; ++v) {
    if (first_node[v] == kNone) {
      ++uncovered;
      continue;
    }
    ids.push_back(v);
    labels.push_back(find(first_node[v]));
  }
  if (uncovered > 0 && require_full_coverage)
    throw Error(ErrorKind::coverage_failure, std::to_string(uncovered) + " vertices not covered by any run");
  return Partition(ids, labels);
}

Partition full_partition_by_repetition(const Graph& graph, std::size_t k, std::uint64_t seed,
                                       const RepetitionOptions& options) {
  const std::size_t runs = options.runs.value_or(default_repetitions(graph.n()));
  if (runs < 1) throw Error(ErrorKind::validation, "full_partition_by_repetition: need at least one run");
  std::vector<Partition> partitions;
  partitions.reserve(runs);
  for (std::size_t i = 0; i < runs; ++i) {
    try {
      partitions.push_back(svd2_run(graph, k, derive_seed(seed, Stream::repetition, i), options.svd2).partition);
    } catch (const Error& e) {
      // an unlucky split only costs coverage
      if (e.kind() != ErrorKind::insufficient_split) throw;
    }
  }
  return merge_run_partitions(graph.n(), k, partitions, options.require_full_coverage);
}

std::size_t essential_rank(const DenseMatrix& m, double sigma, double c3) {
  if (!(sigma > 0.0) || !(c3 > 0.0)) throw Error(ErrorKind::validation, "essential_rank: sigma and c3 must be positive");
  const double n = static_cast<double>(std::max(m.rows(), m.cols()));
  const double threshold = c3 * sigma * std::sqrt(n);
  const std::vector<double> values = svd_values(m);
  std::size_t rank = 0;
  while (rank < values.size() && values[rank] >= threshold) ++rank;
  return rank;
}

Svd2Result svd2_essential(const Graph& graph, double sigma, std::uint64_t seed, double c3, const Svd2Options& options) {
  SplitPlan split = make_split(graph.n(), seed);
  const DenseMatrix a_hat = graph.block(split.z, split.y1);
  const std::size_t rank = essential_rank(a_hat, sigma, c3);
  if (rank == 0) throw Error(ErrorKind::no_signal, "essential rank is 0 at sigma = " + std::to_string(sigma));
  return project_and_cluster(graph, std::move(split), a_hat, rank, options);
}

std::vector<double> sigma_schedule(std::size_t n) {
  const double nn = static_cast<double>(n);
  std::vector<double> schedule;
  for (double sigma = std::log(nn) / std::sqrt(nn); sigma <= 0.5; sigma *= 2.0) schedule.push_back(sigma);
  // tiny graphs start above 1/2; fall back to the largest admissible level
  if (schedule.empty()) schedule.push_back(0.5);
  return schedule;
}

double heldout_block_loglik(const Graph& graph, const Partition& partition, std::uint64_t seed) {
  const std::size_t k = partition.num_clusters();
  const auto domain = partition.domain();
  const auto labels = partition.labels();
  const std::uint64_t base = derive_seed(seed, Stream::heldout);
  auto held_out = [&](VertexId u, VertexId v) { return (splitmix64(base ^ splitmix64(u) ^ (v * 0xff51afd7ed558ccdULL)) & 1U) != 0; };

  std::vector<double> edges(k * k, 0.0), pairs(k * k, 0.0);
  for (std::size_t i = 0; i < domain.size(); ++i) {
    for (std::size_t j = i + 1; j < domain.size(); ++j) {
      if (held_out(domain[i], domain[j])) continue;
      const std::size_t a = std::min(labels[i], labels[j]), b = std::max(labels[i], labels[j]);
      pairs[a * k + b] += 1.0;
      edges[a * k + b] += graph.has_edge(domain[i], domain[j]) ? 1.0 : 0.0;
    }
  }
  std::vector<double> log_p(k * k), log_q(k * k);
  for (std::size_t c = 0; c < k * k; ++c) {
    const double density = (edges[c] + 0.5) / (pairs[c] + 1.0);
    log_p[c] = std::log(density);
    log_q[c] = std::log1p(-density);
  }
  double loglik = 0.0;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    for (std::size_t j = i + 1; j < domain.size(); ++j) {
      if (!held_out(domain[i], domain[j])) continue;
      const std::size_t a = std::min(labels[i], labels[j]), b = std::max(labels[i], labels[j]);
      loglik += graph.has_edge(domain[i], domain[j]) ? log_p[a * k + b] : log_q[a * k + b];
    }
  }
  return loglik;
}

SigmaSweepResult sigma_sweep(const Graph& graph, std::uint64_t seed, double c3, const Svd2Options& options) {
  SigmaSweepResult out;
  bool found = false;
  for (double sigma : sigma_schedule(graph.n())) {
    SigmaTrial trial{sigma, std::nullopt, -std::numeric_limits<double>::infinity()};
    try {
      Svd2Result candidate = svd2_essential(graph, sigma, seed, c3, options);
      trial.rank = candidate.k_used;
      trial.score = heldout_block_loglik(graph, candidate.partition, seed);
      const bool better = !found || trial.score > out.trials[out.best_index].score ||
                          (trial.score == out.trials[out.best_index].score &&
                           candidate.partition.num_clusters() < out.best.partition.num_clusters());
      if (better) {
        out.best = std::move(candidate);
        out.chosen_sigma = sigma;
        out.best_index = out.trials.size();
        found = true;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::no_signal && e.kind() != ErrorKind::insufficient_split) throw;
    }
    out.trials.push_back(trial);
  }
  if (!found) throw Error(ErrorKind::no_signal, "sigma sweep: every trial had essential rank 0");
  return out;
}

ConditionReport check_conditions(const ModelStats& stats, std::size_t n, std::size_t k, double c) {
  if (!(c > 0.0)) throw Error(ErrorKind::validation, "check_conditions: c must be positive");
  const double nn = static_cast<double>(n), kk = static_cast<double>(k), s = static_cast<double>(stats.s_min);
  const double log_n = std::log(nn);
  const double size_term = stats.sigma * std::sqrt(nn / s);
  const double inf = std::numeric_limits<double>::infinity();

  ConditionReport report;
  report.cond1_lhs = stats.delta;
  report.cond1_rhs = c * (size_term + std::sqrt(log_n));
  report.cond2_lhs = stats.delta;
  report.cond2_rhs = stats.lambda_k > 0.0
                         ? c * (size_term + stats.sigma * std::sqrt(kk * log_n) + stats.sigma * std::sqrt(nn * kk) / stats.lambda_k)
                         : inf;
  report.cond1 = report.cond1_lhs >= report.cond1_rhs;
  report.cond2 = report.cond2_lhs >= report.cond2_rhs;
  report.sigma_floor_ok = stats.sigma * stats.sigma >= c * log_n / nn;
  report.s_floor_ok = s >= c * log_n;
  report.k_ok = kk <= std::sqrt(nn / log_n);
  return report;
}

Partition correct_bipartition(const Graph& graph, const Partition& approx) {
  if (approx.num_clusters() != 2) throw Error(ErrorKind::validation, "correct_bipartition: approx must have 2 clusters");
  const std::size_t n = graph.n();
  const auto sides = approx.clusters();
  for (const auto& side : sides)
    for (VertexId v : side)
      if (v >= n) throw Error(ErrorKind::validation, "correct_bipartition: vertex outside graph");

  auto internal_density = [&](const std::vector<VertexId>& side) {
    if (side.size() < 2) return -1.0;
    double edges = 0.0;
    for (std::size_t i = 0; i < side.size(); ++i)
      for (std::size_t j = i + 1; j < side.size(); ++j) edges += graph.has_edge(side[i], side[j]) ? 1.0 : 0.0;
    return edges / (0.5 * static_cast<double>(side.size()) * static_cast<double>(side.size() - 1));
  };
  const auto& anchor = internal_density(sides[1]) > internal_density(sides[0]) ? sides[1] : sides[0];

  std::vector<std::size_t> degree_into_anchor(n, 0);
  for (VertexId u = 0; u < n; ++u)
    for (VertexId w : anchor) degree_into_anchor[u] += graph.has_edge(u, w) ? 1U : 0U;

  std::vector<VertexId> order = all_vertices(n);
  std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
    if (degree_into_anchor[a] != degree_into_anchor[b]) return degree_into_anchor[a] > degree_into_anchor[b];
    return a < b;
  });
  std::vector<std::size_t> labels(n, 1);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) labels[order[i]] = 0;
  return Partition(all_vertices(n), labels);
}

}  // namespace hpart
