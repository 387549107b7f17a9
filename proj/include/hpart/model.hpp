#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "hpart/spectra.hpp"

namespace hpart {

using VertexId = std::size_t;
using Adjacency = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Planted partition instance: clusters laid out contiguously, plus a
/// symmetric k x k matrix of block edge probabilities.
class PlantedModel {
 public:
  std::size_t n() const { return membership_.size(); }
  std::size_t k() const { return sizes_.size(); }
  std::span<const std::size_t> membership() const { return membership_; }
  std::span<const std::size_t> cluster_sizes() const { return sizes_; }
  const DenseMatrix& block_probs() const { return block_probs_; }

  /// Edge probability between u and v (also defined for u == v).
  double probability(VertexId u, VertexId v) const {
    return block_probs_(static_cast<Eigen::Index>(membership_[u]), static_cast<Eigen::Index>(membership_[v]));
  }

  /// The full n x n expectation matrix P.
  DenseMatrix expectation_matrix() const;

  friend PlantedModel build_model(std::span<const std::size_t> sizes, const DenseMatrix& block_probs);

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> membership_;
  DenseMatrix block_probs_;
};

/// Validates and lays out clusters contiguously: the first sizes[0] vertices
/// form cluster 0, the next sizes[1] cluster 1, and so on.
PlantedModel build_model(std::span<const std::size_t> sizes, const DenseMatrix& block_probs);

struct ModelStats {
  double delta = 0.0;      // min distance between P-columns of different clusters; +inf for k = 1
  double sigma = 0.0;      // max_ij sqrt(p_ij (1 - p_ij))
  std::size_t s_min = 0;   // smallest cluster
  double lambda_k = 0.0;   // k-th singular value of P
  std::size_t rank_p = 0;  // singular values >= 1e-9 * largest
  std::vector<double> p_singular_values;  // the k leading singular values of P
};

/// P = M B M^T with M the membership indicator, so the nonzero singular
/// values of P are those of D^{1/2} B D^{1/2} (D = diag of cluster sizes) and
/// the cross-cluster column distances only depend on block rows.
ModelStats compute_stats(const PlantedModel& model);

/// Simple undirected graph stored as a dense symmetric 0/1 matrix.
class Graph {
 public:
  Graph(Adjacency adjacency, std::uint64_t seed);

  std::size_t n() const { return static_cast<std::size_t>(adjacency_.rows()); }
  std::uint64_t seed() const { return seed_; }
  const Adjacency& adjacency() const { return adjacency_; }
  bool has_edge(VertexId u, VertexId v) const {
    return adjacency_(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) != 0;
  }
  std::size_t edge_count() const;

  /// Adjacency sub-block with the given rows and columns, as doubles.
  DenseMatrix block(std::span<const VertexId> rows, std::span<const VertexId> cols) const;

 private:
  Adjacency adjacency_;
  std::uint64_t seed_;
};

/// One independent Bernoulli(P[u][v]) draw per unordered pair u < v, in
/// row-major order; no self-loops.
Graph sample_graph(const PlantedModel& model, std::uint64_t seed);

/// E = A - P for the graph sample_graph(model, seed) would return, with the
/// diagonal fixed at zero.
DenseMatrix sample_noise_matrix(const PlantedModel& model, std::uint64_t seed);

/// Edge-list export: "# n=<n> seed=<seed>" then one "u v" line per edge (u < v).
void write_edge_list(std::ostream& out, const Graph& graph);
Graph read_edge_list(std::istream& in);

}  // namespace hpart
