#pragma once

#include <cstdint>
#include <vector>

#include "hpart/model.hpp"
#include "hpart/rng.hpp"

namespace hpart::testing {

inline DenseMatrix two_by_two(double a, double b, double c) {
  DenseMatrix m(2, 2);
  m << a, b, b, c;
  return m;
}

inline PlantedModel bipartition(std::size_t n, double p, double q) {
  return build_model(std::vector<std::size_t>{n - n / 2, n / 2}, two_by_two(p, q, p));
}

inline DenseMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  DenseMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

// Projector from an independent reference SVD (one-sided Jacobi).
inline DenseMatrix reference_projector(const DenseMatrix& m, Eigen::Index k) {
  Eigen::JacobiSVD<DenseMatrix> svd(m, Eigen::ComputeThinU);
  const DenseMatrix u = svd.matrixU().leftCols(k);
  return u * u.transpose();
}

}  // namespace hpart::testing

#include <algorithm>
#include <numeric>

#include "hpart/cluster.hpp"

namespace hpart::testing {

struct LabeledPoints {
  PointSet points;
  Partition truth;
};

// Random perfect representation: every cluster lies in a ball of radius r/2
// (diameter <= r) and ball centres are >= 6r apart, so cross distances are >= 5r.
inline LabeledPoints random_perfect_representation(Rng& rng, std::size_t k, std::size_t n, std::size_t dim, double r) {
  std::vector<Vector> centers;
  const double box = 6.0 * r * static_cast<double>(k) * 2.0;
  while (centers.size() < k) {
    Vector c(static_cast<Eigen::Index>(dim));
    for (auto& x : c) x = box * rng.uniform();
    bool far = std::all_of(centers.begin(), centers.end(), [&](const Vector& o) { return (o - c).norm() >= 6.0 * r; });
    if (far) centers.push_back(c);
  }
  // shuffled ids so that cluster membership is not tied to id order
  std::vector<VertexId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(ids[i - 1], ids[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i - 1)))]);
  DenseMatrix coords(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(n));
  std::vector<std::size_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = i < k ? i : static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(k - 1)));
    Vector offset(static_cast<Eigen::Index>(dim));
    for (auto& x : offset) x = rng.normal();
    offset *= (0.5 * r * rng.uniform()) / std::max(offset.norm(), 1e-12);
    coords.col(static_cast<Eigen::Index>(i)) = centers[labels[i]] + offset;
  }
  return {PointSet(ids, coords), Partition(ids, labels)};
}

}  // namespace hpart::testing
