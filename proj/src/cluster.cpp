#include "hpart/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>

#include "hpart/error.hpp"

namespace hpart {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> parent;
};

// Tree edge ordered by (weight, min id, max id).
struct Edge {
  double weight;
  VertexId lo, hi;
  std::size_t a, b;  // point indices
  auto key() const { return std::tie(weight, lo, hi); }
  bool operator<(const Edge& other) const { return key() < other.key(); }
};

Edge make_edge(const PointSet& points, std::size_t a, std::size_t b) {
  const VertexId ia = points.ids[a], ib = points.ids[b];
  return {points.distance(a, b), std::min(ia, ib), std::max(ia, ib), a, b};
}

// Prim's algorithm on the implicit complete graph, O(N^2 * dim).
std::vector<Edge> minimum_spanning_tree(const PointSet& points) {
  const std::size_t n = points.size();
  std::vector<Edge> tree;
  if (n < 2) return tree;
  tree.reserve(n - 1);
  std::vector<bool> in_tree(n, false);
  std::vector<Edge> best(n);
  in_tree[0] = true;
  for (std::size_t v = 1; v < n; ++v) best[v] = make_edge(points, 0, v);
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t pick = n;
    for (std::size_t v = 0; v < n; ++v)
      if (!in_tree[v] && (pick == n || best[v] < best[pick])) pick = v;
    in_tree[pick] = true;
    tree.push_back(best[pick]);
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      const Edge candidate = make_edge(points, pick, v);
      if (candidate < best[v]) best[v] = candidate;
    }
  }
  return tree;
}

// Hungarian algorithm (shortest augmenting paths with potentials) for a
// square cost matrix; returns column assigned to each row.
std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

Partition components_as_partition(const PointSet& points, DisjointSets& sets) {
  std::vector<std::size_t> labels(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) labels[i] = sets.find(i);
  return Partition(points.ids, labels);
}

std::vector<std::vector<std::size_t>> indices_by_cluster(const PointSet& points, const Partition& truth) {
  std::vector<std::vector<std::size_t>> groups(truth.num_clusters());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto label = truth.label_of(points.ids[i]);
    if (!label) throw Error(ErrorKind::validation, "truth partition does not cover point " + std::to_string(points.ids[i]));
    groups[*label].push_back(i);
  }
  std::erase_if(groups, [](const auto& g) { return g.empty(); });
  return groups;
}

}  // namespace

PointSet::PointSet(std::vector<VertexId> ids_in, DenseMatrix coords_in) : ids(std::move(ids_in)), coords(std::move(coords_in)) {
  if (static_cast<std::size_t>(coords.cols()) != ids.size())
    throw Error(ErrorKind::validation, "point set: one coordinate column per id required");
  if (!coords.allFinite()) throw Error(ErrorKind::validation, "point set: non-finite coordinate");
  std::vector<VertexId> sorted = ids;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error(ErrorKind::validation, "point set: duplicate id");
}

Partition::Partition(std::span<const VertexId> ids, std::span<const std::size_t> labels) {
  if (ids.size() != labels.size()) throw Error(ErrorKind::validation, "partition: ids and labels differ in length");
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
  std::map<std::size_t, std::size_t> renumber;
  domain_.reserve(ids.size());
  labels_.reserve(ids.size());
  for (std::size_t idx : order) {
    if (!domain_.empty() && domain_.back() == ids[idx]) throw Error(ErrorKind::validation, "partition: duplicate id");
    domain_.push_back(ids[idx]);
    const auto [it, inserted] = renumber.try_emplace(labels[idx], renumber.size());
    labels_.push_back(it->second);
  }
  num_clusters_ = renumber.size();
}

Partition Partition::from_clusters(const std::vector<std::vector<VertexId>>& clusters) {
  std::vector<VertexId> ids;
  std::vector<std::size_t> labels;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (VertexId id : clusters[c]) {
      ids.push_back(id);
      labels.push_back(c);
    }
  }
  return Partition(ids, labels);
}

Partition Partition::single_cluster(std::size_t n) {
  std::vector<VertexId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  return Partition(ids, std::vector<std::size_t>(n, 0));
}

bool Partition::contains(VertexId id) const { return std::binary_search(domain_.begin(), domain_.end(), id); }

std::optional<std::size_t> Partition::label_of(VertexId id) const {
  const auto it = std::lower_bound(domain_.begin(), domain_.end(), id);
  if (it == domain_.end() || *it != id) return std::nullopt;
  return labels_[static_cast<std::size_t>(it - domain_.begin())];
}

std::vector<std::vector<VertexId>> Partition::clusters() const {
  std::vector<std::vector<VertexId>> out(num_clusters_);
  for (std::size_t i = 0; i < domain_.size(); ++i) out[labels_[i]].push_back(domain_[i]);
  return out;
}

Partition Partition::restricted_to(std::span<const VertexId> ids) const {
  std::vector<VertexId> kept;
  std::vector<std::size_t> kept_labels;
  for (VertexId id : ids) {
    if (const auto label = label_of(id)) {
      kept.push_back(id);
      kept_labels.push_back(*label);
    }
  }
  return Partition(kept, kept_labels);
}

Partition truth_partition(const PlantedModel& model) {
  std::vector<VertexId> ids(model.n());
  std::iota(ids.begin(), ids.end(), 0);
  const auto membership = model.membership();
  return Partition(ids, std::vector<std::size_t>(membership.begin(), membership.end()));
}

Partition cluster_by_distances_mst(const PointSet& points, std::size_t k) {
  if (k < 1) throw Error(ErrorKind::validation, "cluster_by_distances_mst: k must be >= 1");
  if (points.size() < k) throw Error(ErrorKind::validation, "cluster_by_distances_mst: fewer points than k");
  std::vector<Edge> tree = minimum_spanning_tree(points);
  std::sort(tree.begin(), tree.end());
  DisjointSets sets(points.size());
  for (std::size_t e = 0; e + (k - 1) < tree.size(); ++e) sets.unite(tree[e].a, tree[e].b);
  return components_as_partition(points, sets);
}

Partition cluster_by_distances_trimmed(const PointSet& points, std::size_t k, double trim_fraction) {
  if (!(trim_fraction >= 0.0 && trim_fraction < 1.0))
    throw Error(ErrorKind::validation, "cluster_by_distances_trimmed: trim fraction must be in [0,1)");
  if (k < 1 || points.size() < k) throw Error(ErrorKind::validation, "cluster_by_distances_trimmed: fewer points than k");
  const std::size_t n = points.size();
  const auto drop = std::min(static_cast<std::size_t>(std::floor(trim_fraction * static_cast<double>(n))), n - k);
  if (drop == 0 || n < 3) return cluster_by_distances_mst(points, k);

  const std::size_t neighbour = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::floor(trim_fraction * static_cast<double>(n) / static_cast<double>(k))), 1, n - 1);
  std::vector<double> radius(n);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row[j] = points.distance(i, j);
    // row includes the point itself at distance 0, so index `neighbour` is the neighbour-th nearest other point
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(neighbour), row.end());
    radius[i] = row[neighbour];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(radius[a], points.ids[a]) < std::tie(radius[b], points.ids[b]);
  });
  std::vector<std::size_t> kept(order.begin(), order.end() - static_cast<std::ptrdiff_t>(drop));
  std::sort(kept.begin(), kept.end());

  std::vector<VertexId> core_ids;
  DenseMatrix core_coords(points.coords.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    core_ids.push_back(points.ids[kept[c]]);
    core_coords.col(static_cast<Eigen::Index>(c)) = points.coords.col(static_cast<Eigen::Index>(kept[c]));
  }
  const PointSet core(core_ids, core_coords);
  const Partition core_partition = cluster_by_distances_mst(core, k);

  std::vector<std::size_t> labels(n);
  std::vector<bool> is_kept(n, false);
  for (std::size_t c = 0; c < kept.size(); ++c) {
    is_kept[kept[c]] = true;
    labels[kept[c]] = *core_partition.label_of(core_ids[c]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (is_kept[i]) continue;
    std::size_t nearest = kept.front();
    double nearest_distance = kInf;
    for (std::size_t c : kept) {
      const double d = points.distance(i, c);
      if (d < nearest_distance) {
        nearest_distance = d;
        nearest = c;
      }
    }
    labels[i] = labels[nearest];
  }
  return Partition(points.ids, labels);
}

Partition cluster_by_radius(const PointSet& points, double r) {
  if (!(r > 0.0)) throw Error(ErrorKind::validation, "cluster_by_radius: r must be positive");
  const std::size_t n = points.size();
  constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> labels(n, kUnassigned);
  std::size_t next_label = 0;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (labels[seed] != kUnassigned) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (labels[j] == kUnassigned && points.distance(seed, j) <= 2.0 * r) labels[j] = next_label;
    ++next_label;
  }
  return Partition(points.ids, labels);
}

MatchReport match_partitions(const Partition& found, const Partition& truth) {
  if (found.size() == 0) throw Error(ErrorKind::validation, "match_partitions: empty domain");
  for (VertexId id : found.domain())
    if (!truth.contains(id)) throw Error(ErrorKind::validation, "match_partitions: found domain not inside truth domain");
  const Partition restricted = truth.restricted_to(found.domain());

  const std::size_t f = found.num_clusters(), t = restricted.num_clusters();
  const std::size_t side = std::max(f, t);
  std::vector<std::vector<double>> overlap(side, std::vector<double>(side, 0.0));
  MatchReport report;
  report.truth_cluster_sizes.assign(t, 0);
  const auto found_labels = found.labels();
  const auto truth_labels = restricted.labels();
  for (std::size_t i = 0; i < found.size(); ++i) {
    overlap[found_labels[i]][truth_labels[i]] += 1.0;
    ++report.truth_cluster_sizes[truth_labels[i]];
  }
  std::vector<std::vector<double>> cost(side, std::vector<double>(side));
  for (std::size_t a = 0; a < side; ++a)
    for (std::size_t b = 0; b < side; ++b) cost[a][b] = -overlap[a][b];
  const auto assignment = min_cost_assignment(cost);

  std::size_t matched = 0;
  report.per_cluster_errors = report.truth_cluster_sizes;
  for (std::size_t a = 0; a < side; ++a) {
    const std::size_t b = assignment[a];
    const auto agree = static_cast<std::size_t>(overlap[a][b]);
    matched += agree;
    if (b < t) report.per_cluster_errors[b] -= agree;
  }
  report.misclassified_count = found.size() - matched;
  report.exact = report.misclassified_count == 0 && f == t;
  return report;
}

bool is_eps_correct(const Partition& found, const Partition& truth, double eps) {
  const MatchReport report = match_partitions(found, truth);
  for (std::size_t c = 0; c < report.per_cluster_errors.size(); ++c) {
    const double allowed = eps * static_cast<double>(report.truth_cluster_sizes[c]);
    if (static_cast<double>(report.per_cluster_errors[c]) > allowed + 1e-12) return false;
  }
  return true;
}

RepresentationReport check_perfect_representation(const PointSet& points, const Partition& truth) {
  std::vector<std::size_t> label(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto l = truth.label_of(points.ids[i]);
    if (!l) throw Error(ErrorKind::validation, "truth partition does not cover point " + std::to_string(points.ids[i]));
    label[i] = *l;
  }
  RepresentationReport report;
  report.min_between = kInf;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double d = points.distance(i, j);
      if (label[i] == label[j]) {
        report.max_within = std::max(report.max_within, d);
      } else {
        report.min_between = std::min(report.min_between, d);
      }
    }
  }
  if (std::isinf(report.min_between)) {
    report.perfect = true;
  } else {
    report.perfect = report.min_between > 0.0 && report.min_between >= 4.0 * report.max_within;
  }
  if (report.perfect) report.best_r = report.max_within;
  return report;
}

EpsRepresentationReport eps_perfect_witness(const PointSet& points, const Partition& truth, double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw Error(ErrorKind::validation, "eps must be in [0,1)");
  const auto groups = indices_by_cluster(points, truth);
  EpsRepresentationReport report;
  std::vector<double> dist;
  for (const auto& group : groups) {
    const std::size_t size = group.size();
    // density: distance to the ceil(size/2)-th nearest cluster mate
    const std::size_t rank = std::min<std::size_t>((size + 1) / 2, size - 1);
    std::vector<double> density(size, 0.0);
    for (std::size_t a = 0; a < size && rank > 0; ++a) {
      dist.clear();
      for (std::size_t b = 0; b < size; ++b) dist.push_back(points.distance(group[a], group[b]));
      std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(rank), dist.end());
      density[a] = dist[rank];
    }
    std::vector<std::size_t> order(size);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return density[a] < density[b]; });
    const std::size_t core_size = (size + 1) / 2;
    std::size_t medoid = group[order[0]];
    double best_sum = kInf;
    for (std::size_t a = 0; a < core_size; ++a) {
      double sum = 0.0;
      for (std::size_t b = 0; b < core_size; ++b) sum += points.distance(group[order[a]], group[order[b]]);
      if (sum < best_sum) {
        best_sum = sum;
        medoid = group[order[a]];
      }
    }
    report.centers.push_back(medoid);

    const auto needed = static_cast<std::size_t>(std::ceil((1.0 - eps) * static_cast<double>(size) - 1e-9));
    if (needed > 0) {
      dist.clear();
      for (std::size_t b : group) dist.push_back(points.distance(medoid, b));
      std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(needed - 1), dist.end());
      report.r = std::max(report.r, dist[needed - 1]);
    }
  }
  report.min_center_distance = kInf;
  for (std::size_t a = 0; a < report.centers.size(); ++a)
    for (std::size_t b = a + 1; b < report.centers.size(); ++b)
      report.min_center_distance = std::min(report.min_center_distance, points.distance(report.centers[a], report.centers[b]));
  report.holds = std::isinf(report.min_center_distance) ||
                 (report.min_center_distance > 0.0 && report.min_center_distance >= 4.0 * report.r);
  return report;
}

bool check_eps_perfect_representation(const PointSet& points, const Partition& truth, double eps) {
  return eps_perfect_witness(points, truth, eps).holds;
}

void write_partition(std::ostream& out, const Partition& partition) {
  const auto domain = partition.domain();
  const auto labels = partition.labels();
  for (std::size_t i = 0; i < domain.size(); ++i) out << domain[i] << ' ' << labels[i] << '\n';
}

Partition read_partition(std::istream& in) {
  std::vector<VertexId> ids;
  std::vector<std::size_t> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    VertexId id = 0;
    std::size_t label = 0;
    if (!(fields >> id >> label)) throw Error(ErrorKind::validation, "partition: bad line '" + line + "'");
    ids.push_back(id);
    labels.push_back(label);
  }
  return Partition(ids, labels);
}

}  // namespace hpart
