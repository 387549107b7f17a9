#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "hpart/model.hpp"
#include "hpart/spectra.hpp"

namespace hpart {

/// Points in Euclidean space tagged with global vertex ids; coords holds one
/// column per point.
struct PointSet {
  std::vector<VertexId> ids;
  DenseMatrix coords;

  PointSet() = default;
  PointSet(std::vector<VertexId> ids, DenseMatrix coords);

  std::size_t size() const { return ids.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(coords.rows()); }
  double distance(std::size_t i, std::size_t j) const {
    return (coords.col(static_cast<Eigen::Index>(i)) - coords.col(static_cast<Eigen::Index>(j))).norm();
  }
};

/// Assignment of a (possibly partial) set of vertices to clusters.
///
/// Stored in canonical form: the domain is sorted and labels are renumbered
/// 0, 1, ... in order of first appearance along the domain. Two partitions
/// group the same vertices identically iff they compare equal.
class Partition {
 public:
  Partition() = default;
  /// ids must be distinct; labels are arbitrary tokens parallel to ids.
  Partition(std::span<const VertexId> ids, std::span<const std::size_t> labels);

  static Partition from_clusters(const std::vector<std::vector<VertexId>>& clusters);
  /// Every vertex in [0, n) in one cluster.
  static Partition single_cluster(std::size_t n);

  std::span<const VertexId> domain() const { return domain_; }
  std::span<const std::size_t> labels() const { return labels_; }
  std::size_t size() const { return domain_.size(); }
  std::size_t num_clusters() const { return num_clusters_; }
  bool contains(VertexId id) const;
  std::optional<std::size_t> label_of(VertexId id) const;
  std::vector<std::vector<VertexId>> clusters() const;
  /// Restriction to the ids of `ids` that lie in the domain.
  Partition restricted_to(std::span<const VertexId> ids) const;

  bool operator==(const Partition&) const = default;

 private:
  std::vector<VertexId> domain_;
  std::vector<std::size_t> labels_;
  std::size_t num_clusters_ = 0;
};

/// Ground-truth partition of a planted model over all vertices.
Partition truth_partition(const PlantedModel& model);

/// Minimum spanning tree of the complete Euclidean graph, minus its k-1
/// heaviest edges. Edges are totally ordered by (weight, min id, max id), so
/// the tree and the cut are reproducible even with tied distances.
Partition cluster_by_distances_mst(const PointSet& points, std::size_t k);

/// Outlier-trimmed variant of the MST cut for approximately separated
/// points. Each point's density radius is its distance to the
/// max(1, floor(trim_fraction * N / k))-th nearest neighbour; the
/// floor(trim_fraction * N) points with the largest radius are set aside, the
/// rest are cut into k clusters by cluster_by_distances_mst, and every
/// set-aside point joins the cluster of its nearest kept point.
Partition cluster_by_distances_trimmed(const PointSet& points, std::size_t k, double trim_fraction);

/// Known-radius greedy clustering: repeatedly take the lowest-index
/// unassigned point and claim every unassigned point within 2r of it.
Partition cluster_by_radius(const PointSet& points, double r);

struct MatchReport {
  std::size_t misclassified_count = 0;
  /// Indexed by the canonical label of truth restricted to found's domain.
  std::vector<std::size_t> per_cluster_errors;
  std::vector<std::size_t> truth_cluster_sizes;
  bool exact = false;
};

/// Optimal label bijection (Hungarian assignment on the overlap counts).
MatchReport match_partitions(const Partition& found, const Partition& truth);

/// Per true cluster X_i: members (within found's domain) outside the matched
/// label are at most eps * |X_i within found's domain|.
bool is_eps_correct(const Partition& found, const Partition& truth, double eps);

struct RepresentationReport {
  bool perfect = false;
  double max_within = 0.0;   // largest same-cluster distance
  double min_between = 0.0;  // smallest cross-cluster distance (+inf for k = 1)
  std::optional<double> best_r;
};

/// Pairwise test: every same-cluster distance <= r and every cross-cluster
/// distance >= 4r, with r = the largest same-cluster distance.
RepresentationReport check_perfect_representation(const PointSet& points, const Partition& truth);

struct EpsRepresentationReport {
  bool holds = false;
  double r = 0.0;                     // smallest radius covering (1-eps) of each cluster
  double min_center_distance = 0.0;   // +inf for k = 1
  std::vector<std::size_t> centers;   // index into points, one per truth cluster
};

/// Witness search for an eps-perfect representation. Centres are the
/// medoids of each cluster's densest half (points ranked by distance to
/// their ceil(|X_i|/2)-th nearest cluster mate). For fixed centres the
/// feasible radii form an interval whose lower end is the largest
/// ceil((1-eps)|X_i|)-th distance to the centre; the representation holds iff
/// the centres are pairwise at least 4r apart for that r.
EpsRepresentationReport eps_perfect_witness(const PointSet& points, const Partition& truth, double eps);
bool check_eps_perfect_representation(const PointSet& points, const Partition& truth, double eps);

/// Text export, one "vertex_id cluster_label" line per vertex in the domain.
void write_partition(std::ostream& out, const Partition& partition);
Partition read_partition(std::istream& in);

}  // namespace hpart
