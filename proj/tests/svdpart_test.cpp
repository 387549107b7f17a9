#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "hpart/error.hpp"
#include "hpart/svdpart.hpp"
#include "test_util.hpp"

using namespace hpart;
using hpart::testing::bipartition;

namespace {

ErrorKind kind_of(auto&& call) {
  try {
    call();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::validation;
}

std::size_t covered(const std::vector<VertexId>& a, const std::vector<VertexId>& b) {
  std::vector<VertexId> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  return common.size();
}

}  // namespace

TEST_CASE("make_split") {
  const SplitPlan a = make_split(1000, 42);
  const SplitPlan b = make_split(1000, 42);
  CHECK(a.y == b.y);
  CHECK(a.z == b.z);
  CHECK(a.y1 == b.y1);
  CHECK(a.y2 == b.y2);
  CHECK(a.y.size() + a.z.size() == 1000);
  CHECK(covered(a.y, a.z) == 0);
  CHECK(covered(a.y1, a.y2) == 0);
  CHECK(a.y1.size() + a.y2.size() == a.y.size());
  CHECK(std::is_sorted(a.y1.begin(), a.y1.end()));

  int concentrated = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const double y = static_cast<double>(make_split(1000, seed).y.size());
    concentrated += std::abs(y - 500.0) <= 5.0 * std::sqrt(1000.0);
  }
  CHECK(concentrated >= 99);

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const SplitPlan tiny = make_split(4, seed);
    CHECK_FALSE(tiny.y1.empty());
    CHECK_FALSE(tiny.y2.empty());
    CHECK_FALSE(tiny.z.empty());
  }
  CHECK(kind_of([] { make_split(3, 1); }) == ErrorKind::validation);
}

TEST_CASE("svd2_run on noiseless two-block graphs") {
  const PlantedModel model = bipartition(200, 1.0, 0.0);
  const Partition truth = truth_partition(model);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g = sample_graph(model, seed);
    const Svd2Result r = svd2_run(g, 2, seed);
    CHECK(std::ranges::equal(r.partition.domain(), r.split.y2));
    CHECK(r.partition == truth.restricted_to(r.split.y2));
    CHECK(r.k_used == 2);
    CHECK(r.points.coords.rows() == 2);

    const Svd2Result one = svd2_run(g, 1, seed);
    CHECK(one.partition.num_clusters() == 1);
  }
}

TEST_CASE("svd2_run rejects splits that are too small") {
  const Graph g = sample_graph(bipartition(8, 1.0, 0.0), 1);
  CHECK(kind_of([&] { svd2_run(g, 8, 1); }) == ErrorKind::insufficient_split);
  CHECK(kind_of([&] { svd2_run(g, 0, 1); }) == ErrorKind::validation);
}

TEST_CASE("svd2_run only reads the Z x Y block") {
  const PlantedModel model = bipartition(300, 0.6, 0.2);
  const Graph g = sample_graph(model, 9);
  const Svd2Result base = svd2_run(g, 2, 17);
  // scramble every pair inside Y and inside Z
  Adjacency scrambled = g.adjacency();
  Rng rng(3);
  auto scramble = [&](const std::vector<VertexId>& side) {
    for (std::size_t a = 0; a < side.size(); ++a)
      for (std::size_t b = a + 1; b < side.size(); ++b) {
        const auto bit = static_cast<std::uint8_t>(rng.bernoulli(0.5));
        scrambled(static_cast<Eigen::Index>(side[a]), static_cast<Eigen::Index>(side[b])) = bit;
        scrambled(static_cast<Eigen::Index>(side[b]), static_cast<Eigen::Index>(side[a])) = bit;
      }
  };
  scramble(base.split.y);
  scramble(base.split.z);
  const Svd2Result again = svd2_run(Graph(scrambled, 0), 2, 17);
  CHECK(again.partition == base.partition);
  CHECK((again.points.coords - base.points.coords).norm() == 0.0);
}

TEST_CASE("svd1_run") {
  const PlantedModel model = build_model(std::vector<std::size_t>{30, 20, 25}, DenseMatrix::Identity(3, 3));
  CHECK(svd1_run(sample_graph(model, 1), 3) == truth_partition(model));
  const Graph small = sample_graph(bipartition(6, 1.0, 0.0), 1);
  CHECK(svd1_run(small, 6).num_clusters() == 6);
  CHECK(svd1_run(small, 1).num_clusters() == 1);
  CHECK_THROWS_AS(svd1_run(small, 7), Error);
}

TEST_CASE("default_repetitions") {
  CHECK(default_repetitions(1000) == 21);
  CHECK(default_repetitions(200) == 16);
}

TEST_CASE("merge_run_partitions") {
  const PlantedModel model = bipartition(200, 1.0, 0.0);
  const Partition truth = truth_partition(model);
  const Graph g = sample_graph(model, 5);
  std::vector<Partition> runs;
  for (std::uint64_t s = 0; s < 2; ++s) runs.push_back(svd2_run(g, 2, 100 + s).partition);
  const Partition two = merge_run_partitions(200, 2, runs, false);
  CHECK(two == truth.restricted_to(two.domain()));
  CHECK(kind_of([&] { merge_run_partitions(200, 2, runs, true); }) == ErrorKind::coverage_failure);

  // a run whose cluster bridges the two true halves
  runs.push_back(Partition::from_clusters({{0, 199}}));
  CHECK(kind_of([&] { merge_run_partitions(200, 2, runs, false); }) == ErrorKind::merge_conflict);

  // an extra cluster that meets nothing yields too many components
  std::vector<Partition> split_only{Partition::from_clusters({{0, 1}, {198, 199}}), Partition::from_clusters({{50}})};
  CHECK(kind_of([&] { merge_run_partitions(200, 2, split_only, false); }) == ErrorKind::merge_conflict);
}

TEST_CASE("full_partition_by_repetition on a noiseless graph") {
  const PlantedModel model = bipartition(200, 1.0, 0.0);
  const Partition truth = truth_partition(model);
  RepetitionOptions opts;
  opts.require_full_coverage = false;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Partition merged = full_partition_by_repetition(sample_graph(model, seed), 2, seed, opts);
    CHECK(merged == truth.restricted_to(merged.domain()));
    CHECK(merged.size() >= 190);
  }
  opts.runs = 60;
  const Partition full = full_partition_by_repetition(sample_graph(model, 1), 2, 1, opts);
  CHECK(full == truth);
}

TEST_CASE("essential_rank") {
  DenseMatrix d = DenseMatrix::Zero(2, 2);
  d(0, 0) = 10.0;
  d(1, 1) = 0.1;
  CHECK(essential_rank(d, 1.0, 1.0) == 1);
  CHECK(essential_rank(d, 0.01, 1.0) == 2);
  CHECK(essential_rank(d, 10.0, 1.0) == 0);
  CHECK(essential_rank(DenseMatrix::Zero(5, 3), 0.1, 4.0) == 0);
}

TEST_CASE("svd2_essential") {
  const PlantedModel model = bipartition(200, 1.0, 0.0);
  const Partition truth = truth_partition(model);
  const Svd2Result r = svd2_essential(sample_graph(model, 3), 0.01, 3);
  CHECK(r.k_used == 2);
  CHECK(r.partition == truth.restricted_to(r.split.y2));

  const PlantedModel noise = build_model(std::vector<std::size_t>{1000}, DenseMatrix::Constant(1, 1, 0.3));
  const double sigma = std::sqrt(0.3 * 0.7);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Svd2Result single = svd2_essential(sample_graph(noise, seed), sigma, seed);
    CHECK(single.k_used == 1);
    CHECK(single.partition.num_clusters() == 1);
  }

  const PlantedModel empty = build_model(std::vector<std::size_t>{50}, DenseMatrix::Zero(1, 1));
  CHECK(kind_of([&] { svd2_essential(sample_graph(empty, 1), 0.1, 1); }) == ErrorKind::no_signal);
}

TEST_CASE("sigma_schedule") {
  const std::vector<double> s = sigma_schedule(1000);
  REQUIRE(s.size() == 2);
  CHECK(s[0] == doctest::Approx(std::log(1000.0) / std::sqrt(1000.0)));
  CHECK(s[1] == doctest::Approx(2.0 * s[0]));
  CHECK(sigma_schedule(4) == std::vector<double>{0.5});
}

TEST_CASE("heldout_block_loglik prefers the planted partition") {
  const PlantedModel model = bipartition(300, 0.6, 0.2);
  const Graph g = sample_graph(model, 2);
  const Partition truth = truth_partition(model);
  std::vector<VertexId> ids(300);
  std::iota(ids.begin(), ids.end(), 0);
  std::vector<std::size_t> alternating(300);
  for (std::size_t i = 0; i < 300; ++i) alternating[i] = i % 2;
  const double good = heldout_block_loglik(g, truth, 7);
  CHECK(good > heldout_block_loglik(g, Partition(ids, alternating), 7));
  CHECK(good > heldout_block_loglik(g, Partition::single_cluster(300), 7));
  CHECK(good == heldout_block_loglik(g, truth, 7));
}

TEST_CASE("sigma_sweep") {
  const PlantedModel model = bipartition(300, 1.0, 0.0);
  const SigmaSweepResult r = sigma_sweep(sample_graph(model, 4), 4);
  CHECK(r.best.partition == truth_partition(model).restricted_to(r.best.split.y2));
  CHECK(r.chosen_sigma == r.trials[r.best_index].sigma);

  const PlantedModel single = build_model(std::vector<std::size_t>{600}, DenseMatrix::Constant(1, 1, 0.4));
  for (std::uint64_t seed = 0; seed < 5; ++seed) CHECK(sigma_sweep(sample_graph(single, seed), seed).best.partition.num_clusters() == 1);
}

TEST_CASE("check_conditions") {
  DenseMatrix b(2, 2);
  b << 1.0, 0.5, 0.5, 0.5;
  const PlantedModel clique = build_model(std::vector<std::size_t>{200, 1800}, b);
  const ConditionReport r = check_conditions(compute_stats(clique), 2000, 2, 1.0);
  CHECK(r.cond1_lhs == doctest::Approx(0.5 * std::sqrt(200.0)));
  CHECK(r.cond1_rhs == doctest::Approx(0.5 * std::sqrt(10.0) + std::sqrt(std::log(2000.0))));
  CHECK(r.cond1_rhs == doctest::Approx(4.34).epsilon(0.01));
  CHECK(r.cond1);

  const PlantedModel one = build_model(std::vector<std::size_t>{100}, DenseMatrix::Constant(1, 1, 0.5));
  const ConditionReport k1 = check_conditions(compute_stats(one), 100, 1, 1.0);
  CHECK(std::isinf(k1.cond1_lhs));
  CHECK(k1.cond1);
  CHECK(k1.cond2);

  const PlantedModel noiseless = bipartition(100, 1.0, 0.0);
  const ConditionReport z = check_conditions(compute_stats(noiseless), 100, 2, 2.0);
  CHECK(z.cond1_rhs == doctest::Approx(2.0 * std::sqrt(std::log(100.0))));
  CHECK_FALSE(z.sigma_floor_ok);

  // lambda_k = 0: two identical blocks
  const PlantedModel flat = bipartition(100, 0.5, 0.5);
  CHECK(std::isinf(check_conditions(compute_stats(flat), 100, 2, 1.0).cond2_rhs));
}

TEST_CASE("correct_bipartition") {
  const PlantedModel model = bipartition(200, 1.0, 0.0);
  const Graph g = sample_graph(model, 1);
  const Partition truth = truth_partition(model);
  CHECK(correct_bipartition(g, truth) == truth);

  std::vector<VertexId> ids(200);
  std::iota(ids.begin(), ids.end(), 0);
  std::vector<std::size_t> labels(200);
  for (std::size_t i = 0; i < 200; ++i) labels[i] = i < 100 ? 0 : 1;
  for (std::size_t i = 0; i < 10; ++i) std::swap(labels[i * 7], labels[199 - i * 5]);
  const Partition corrupted(ids, labels);
  REQUIRE_FALSE(corrupted == truth);
  const Partition fixed = correct_bipartition(g, corrupted);
  CHECK(fixed == truth);
  CHECK(correct_bipartition(g, fixed) == fixed);

  const Graph noisy = sample_graph(bipartition(400, 0.5, 0.2), 6);
  const Partition once = correct_bipartition(noisy, truth_partition(bipartition(400, 0.5, 0.2)));
  CHECK(correct_bipartition(noisy, once) == once);

  CHECK_THROWS_AS(correct_bipartition(g, Partition::single_cluster(200)), Error);
}

TEST_CASE("essential rank and sigma sweep on the bipartition benchmark") {
  const PlantedModel model = bipartition(1000, 0.5, 0.2);
  const Partition truth = truth_partition(model);
  int rank_two = 0, swept = 0, known = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = sample_graph(model, seed);
    const SplitPlan split = make_split(1000, seed + 500);
    rank_two += essential_rank(g.block(split.z, split.y1), 0.5, 4.0) == 2;

    const Svd2Result direct = svd2_run(g, 2, seed);
    known += direct.partition == truth.restricted_to(direct.split.y2);
    const SigmaSweepResult sweep = sigma_sweep(g, seed);
    swept += sweep.best.partition == truth.restricted_to(sweep.best.split.y2);
  }
  CHECK(rank_two >= 18);
  CHECK(std::abs(swept - known) <= 2);
}
