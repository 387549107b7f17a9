#include "hpart/model.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "hpart/error.hpp"
#include "hpart/rng.hpp"

namespace hpart {

PlantedModel build_model(std::span<const std::size_t> sizes, const DenseMatrix& block_probs) {
  const auto k = static_cast<Eigen::Index>(sizes.size());
  if (sizes.empty()) throw Error(ErrorKind::validation, "model needs at least one cluster");
  if (block_probs.rows() != k || block_probs.cols() != k)
    throw Error(ErrorKind::validation, "block_probs must be k x k");
  for (std::size_t size : sizes)
    if (size == 0) throw Error(ErrorKind::validation, "empty cluster");
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const double p = block_probs(i, j);
      if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::validation, "block probability outside [0,1]");
      if (p != block_probs(j, i)) throw Error(ErrorKind::validation, "block_probs not symmetric");
    }
  }

  PlantedModel model;
  model.sizes_.assign(sizes.begin(), sizes.end());
  model.block_probs_ = block_probs;
  for (std::size_t c = 0; c < sizes.size(); ++c) model.membership_.insert(model.membership_.end(), sizes[c], c);
  return model;
}

DenseMatrix PlantedModel::expectation_matrix() const {
  const auto size = static_cast<Eigen::Index>(n());
  DenseMatrix p(size, size);
  for (Eigen::Index v = 0; v < size; ++v)
    for (Eigen::Index u = 0; u < size; ++u) p(u, v) = probability(static_cast<VertexId>(u), static_cast<VertexId>(v));
  return p;
}

ModelStats compute_stats(const PlantedModel& model) {
  const std::size_t k = model.k();
  const DenseMatrix& b = model.block_probs();
  const auto sizes = model.cluster_sizes();

  ModelStats stats;
  stats.s_min = *std::min_element(sizes.begin(), sizes.end());

  for (Eigen::Index i = 0; i < b.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      stats.sigma = std::max(stats.sigma, std::sqrt(b(i, j) * (1.0 - b(i, j))));

  // Column of a vertex in cluster i has value b(c, i) on every row of cluster c.
  stats.delta = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      double sq = 0.0;
      for (std::size_t c = 0; c < k; ++c) {
        const double diff = b(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) -
                            b(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j));
        sq += static_cast<double>(sizes[c]) * diff * diff;
      }
      stats.delta = std::min(stats.delta, std::sqrt(sq));
    }
  }

  Vector root_sizes(static_cast<Eigen::Index>(k));
  for (std::size_t c = 0; c < k; ++c) root_sizes(static_cast<Eigen::Index>(c)) = std::sqrt(static_cast<double>(sizes[c]));
  const DenseMatrix reduced = root_sizes.asDiagonal() * b * root_sizes.asDiagonal();
  stats.p_singular_values = svd_values(reduced);
  stats.lambda_k = stats.p_singular_values.back();
  const double top = stats.p_singular_values.front();
  for (double value : stats.p_singular_values)
    if (top > 0.0 && value >= 1e-9 * top) ++stats.rank_p;
  return stats;
}

Graph::Graph(Adjacency adjacency, std::uint64_t seed) : adjacency_(std::move(adjacency)), seed_(seed) {
  if (adjacency_.rows() != adjacency_.cols()) throw Error(ErrorKind::validation, "adjacency must be square");
  for (Eigen::Index u = 0; u < adjacency_.rows(); ++u) {
    if (adjacency_(u, u) != 0) throw Error(ErrorKind::validation, "self-loop in adjacency");
    for (Eigen::Index v = u + 1; v < adjacency_.cols(); ++v) {
      if (adjacency_(u, v) != adjacency_(v, u) || adjacency_(u, v) > 1)
        throw Error(ErrorKind::validation, "adjacency must be symmetric 0/1");
    }
  }
}

std::size_t Graph::edge_count() const {
  std::size_t twice = 0;
  for (Eigen::Index v = 0; v < adjacency_.cols(); ++v)
    for (Eigen::Index u = 0; u < adjacency_.rows(); ++u) twice += adjacency_(u, v);
  return twice / 2;
}

DenseMatrix Graph::block(std::span<const VertexId> rows, std::span<const VertexId> cols) const {
  DenseMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < rows.size(); ++i)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          adjacency_(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
  return out;
}

Graph sample_graph(const PlantedModel& model, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(model.n());
  Adjacency adjacency = Adjacency::Zero(n, n);
  Rng rng(seed);
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = u + 1; v < n; ++v) {
      const std::uint8_t edge = rng.bernoulli(model.probability(static_cast<VertexId>(u), static_cast<VertexId>(v)));
      adjacency(u, v) = edge;
      adjacency(v, u) = edge;
    }
  }
  return Graph(std::move(adjacency), seed);
}

DenseMatrix sample_noise_matrix(const PlantedModel& model, std::uint64_t seed) {
  const Graph graph = sample_graph(model, seed);
  DenseMatrix noise = graph.adjacency().cast<double>() - model.expectation_matrix();
  noise.diagonal().setZero();
  return noise;
}

void write_edge_list(std::ostream& out, const Graph& graph) {
  out << "# n=" << graph.n() << " seed=" << graph.seed() << '\n';
  for (VertexId u = 0; u < graph.n(); ++u)
    for (VertexId v = u + 1; v < graph.n(); ++v)
      if (graph.has_edge(u, v)) out << u << ' ' << v << '\n';
}

Graph read_edge_list(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::validation, "edge list: missing header");
  std::size_t n = 0;
  std::uint64_t seed = 0;
  if (std::sscanf(line.c_str(), "# n=%zu seed=%" SCNu64, &n, &seed) != 2)
    throw Error(ErrorKind::validation, "edge list: bad header '" + line + "'");
  const auto size = static_cast<Eigen::Index>(n);
  Adjacency adjacency = Adjacency::Zero(size, size);
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    std::size_t u = 0, v = 0;
    if (!(fields >> u >> v) || u >= n || v >= n || u == v)
      throw Error(ErrorKind::validation, "edge list: bad edge '" + line + "'");
    adjacency(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = 1;
    adjacency(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) = 1;
  }
  return Graph(std::move(adjacency), seed);
}

}  // namespace hpart
