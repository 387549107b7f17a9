#include "hpart/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hpart/error.hpp"
#include "hpart/rng.hpp"
#include "hpart/svdpart.hpp"

namespace hpart {
namespace {

void require_sigma(double sigma) {
  if (!(sigma >= 0.0 && sigma <= 0.5))
    throw Error(ErrorKind::validation, "sigma must lie in [0, 1/2] for a Bernoulli variance");
}

double inverse_cube(std::size_t n) {
  const double nn = static_cast<double>(n);
  return 1.0 / (nn * nn * nn);
}

void finish(TailReport& report) {
  report.empirical_rate = static_cast<double>(report.exceed_count) / static_cast<double>(report.samples);
  report.pass = within_tail_allowance(report.empirical_rate, report.bound_rate, report.samples);
}

}  // namespace

bool within_tail_allowance(double empirical_rate, double bound_rate, std::size_t samples) {
  const double m = static_cast<double>(samples);
  return empirical_rate <= bound_rate + 3.0 * std::sqrt(bound_rate / m) + 10.0 / m;
}

double centered_bernoulli_p(double sigma) {
  require_sigma(sigma);
  return 0.5 - std::sqrt(std::max(0.0, 0.25 - sigma * sigma));
}

TailReport projection_tail_check(std::size_t n, std::size_t d, double sigma, std::size_t samples, std::uint64_t seed,
                                 double c1) {
  if (d < 1 || d > n) throw Error(ErrorKind::validation, "projection_tail_check: need 1 <= d <= n");
  if (samples < 1) throw Error(ErrorKind::validation, "projection_tail_check: need samples >= 1");
  const double p = centered_bernoulli_p(sigma);

  Rng subspace_rng(derive_seed(seed, Stream::subspace));
  DenseMatrix gaussian(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < gaussian.cols(); ++j)
    for (Eigen::Index i = 0; i < gaussian.rows(); ++i) gaussian(i, j) = subspace_rng.normal();
  const Basis subspace = Basis::orthonormalize(gaussian);

  TailReport report;
  report.check = "projection_tail";
  report.n = n;
  report.params = {{"d", static_cast<double>(d)}, {"sigma", sigma}, {"c1", c1}};
  report.samples = samples;
  report.threshold = sigma * std::sqrt(static_cast<double>(d)) + c1 * std::sqrt(std::log(static_cast<double>(n)));
  report.bound_rate = inverse_cube(n);

  Rng rng(derive_seed(seed, Stream::samples));
  Vector x(static_cast<Eigen::Index>(n));
  double total_length = 0.0;
  for (std::size_t t = 0; t < samples; ++t) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.bernoulli(p) ? 1.0 - p : -p;
    const double length = (subspace.vectors().transpose() * x).norm();
    total_length += length;
    if (length > report.threshold) ++report.exceed_count;
  }
  report.metrics["mean_length"] = total_length / static_cast<double>(samples);
  finish(report);
  return report;
}

TailReport flat_basis_projection_check(std::size_t n, std::size_t s, std::size_t k, double sigma, std::size_t samples,
                                       std::uint64_t seed, double c2) {
  if (s < 1 || k < 1 || k * s > n) throw Error(ErrorKind::validation, "flat_basis_projection_check: need k * s <= n");
  if (samples < 1) throw Error(ErrorKind::validation, "flat_basis_projection_check: need samples >= 1");
  const double p = centered_bernoulli_p(sigma);
  const double alpha = 2.0 / std::sqrt(static_cast<double>(s));

  TailReport report;
  report.check = "flat_basis_projection";
  report.n = n;
  report.params = {{"s", static_cast<double>(s)}, {"k", static_cast<double>(k)}, {"sigma", sigma}, {"c2", c2}};
  report.samples = samples;
  report.threshold =
      c2 * std::sqrt(static_cast<double>(k)) * (sigma + alpha * std::log(static_cast<double>(n)));
  report.bound_rate = inverse_cube(n);

  // H is spanned by 1_{S_j}/sqrt(s) for disjoint blocks S_j; coordinates off
  // the blocks do not affect the projection, so only block entries are drawn.
  Rng rng(derive_seed(seed, Stream::samples));
  const double inv_root_s = 1.0 / std::sqrt(static_cast<double>(s));
  double total_length = 0.0;
  for (std::size_t t = 0; t < samples; ++t) {
    double squared = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      double block_sum = 0.0;
      for (std::size_t i = 0; i < s; ++i) block_sum += rng.bernoulli(p) ? 1.0 - p : -p;
      const double coordinate = block_sum * inv_root_s;
      squared += coordinate * coordinate;
    }
    const double length = std::sqrt(squared);
    total_length += length;
    if (length > report.threshold) ++report.exceed_count;
  }
  report.metrics["mean_length"] = total_length / static_cast<double>(samples);
  finish(report);
  return report;
}

TailReport noise_norm_check(const PlantedModel& model, std::size_t samples, double c0, std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorKind::validation, "noise_norm_check: need samples >= 1");
  const ModelStats stats = compute_stats(model);
  const std::size_t n = model.n();
  const double nn = static_cast<double>(n);
  const double sigma = stats.sigma;
  if (sigma > 0.0 && sigma * sigma < std::log(nn) / nn)
    throw Error(ErrorKind::validation, "noise_norm_check: sigma^2 < ln(n)/n is outside the checked regime");

  TailReport report;
  report.check = "noise_norm";
  report.n = n;
  report.params = {{"c0", c0}, {"sigma", sigma}};
  report.samples = samples;
  report.threshold = c0 * sigma * std::sqrt(nn);
  report.bound_rate = inverse_cube(n);

  double ratio_sum = 0.0, max_norm = 0.0;
  for (std::size_t t = 0; t < samples; ++t) {
    const double norm = spectral_norm(sample_noise_matrix(model, derive_seed(seed, Stream::samples, t)));
    max_norm = std::max(max_norm, norm);
    if (sigma > 0.0) ratio_sum += norm / (sigma * std::sqrt(nn));
    if (norm > report.threshold) ++report.exceed_count;
  }
  report.metrics["mean_ratio"] = ratio_sum / static_cast<double>(samples);
  report.metrics["max_norm"] = max_norm;
  finish(report);
  return report;
}

DavisKahanReport davis_kahan_check(const DenseMatrix& m, const DenseMatrix& noise, std::size_t k) {
  if (m.rows() != noise.rows() || m.cols() != noise.cols())
    throw Error(ErrorKind::validation, "davis_kahan_check: shape mismatch");
  const std::vector<double> values = svd_values(m);
  if (k < 1 || k > values.size()) throw Error(ErrorKind::validation, "davis_kahan_check: k out of range");
  const double gap = values[k - 1] - (k < values.size() ? values[k] : 0.0);
  if (gap <= 1e-12) throw Error(ErrorKind::degenerate_gap, "davis_kahan_check: singular gap at k is zero");

  DavisKahanReport report;
  report.lhs = sin_max_principal_angle(top_k_left_basis(m, k), top_k_left_basis(m + noise, k));
  report.rhs = spectral_norm(noise) / gap;
  // 1e-10 absorbs round-off in the angle when the noise is (near) zero
  report.holds = report.lhs <= report.rhs * (1.0 + 1e-6) + 1e-10;
  return report;
}

TailReport davis_kahan_sweep(std::size_t pairs, std::size_t rows, std::size_t cols, std::uint64_t seed) {
  if (pairs < 1 || rows < 1 || cols < 1) throw Error(ErrorKind::validation, "davis_kahan_sweep: empty sweep");
  constexpr double kScales[] = {0.01, 0.1, 1.0};
  const auto max_k = static_cast<std::int64_t>(std::min<std::size_t>({5, rows, cols}));

  TailReport report;
  report.check = "davis_kahan";
  report.n = std::max(rows, cols);
  report.params = {{"rows", static_cast<double>(rows)}, {"cols", static_cast<double>(cols)}};
  report.samples = pairs;
  report.threshold = 0.0;
  report.bound_rate = 0.0;

  Rng rng(derive_seed(seed, Stream::samples));
  double worst_ratio = 0.0;
  const auto r = static_cast<Eigen::Index>(rows), c = static_cast<Eigen::Index>(cols);
  for (std::size_t t = 0; t < pairs; ++t) {
    DenseMatrix m(r, c), noise(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = rng.normal();
    const double scale = kScales[rng.uniform_int(0, 2)];
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) noise(i, j) = scale * rng.normal();
    const auto k = static_cast<std::size_t>(rng.uniform_int(1, max_k));
    const DavisKahanReport dk = davis_kahan_check(m, noise, k);
    if (!dk.holds) ++report.exceed_count;
    if (dk.rhs > 0.0) worst_ratio = std::max(worst_ratio, dk.lhs / dk.rhs);
  }
  report.metrics["max_lhs_over_rhs"] = worst_ratio;
  report.empirical_rate = static_cast<double>(report.exceed_count) / static_cast<double>(pairs);
  report.pass = report.exceed_count == 0;
  return report;
}

double transfer_ratio(const PlantedModel& model, const SplitPlan& split) {
  const std::size_t k = model.k();
  const ModelStats stats = compute_stats(model);
  if (!(stats.lambda_k > 0.0)) throw Error(ErrorKind::validation, "transfer_ratio: lambda_k(P) = 0");
  Vector rows = Vector::Zero(static_cast<Eigen::Index>(k)), cols = Vector::Zero(static_cast<Eigen::Index>(k));
  const auto membership = model.membership();
  for (VertexId v : split.z) rows(static_cast<Eigen::Index>(membership[v])) += 1.0;
  for (VertexId v : split.y1) cols(static_cast<Eigen::Index>(membership[v])) += 1.0;
  const DenseMatrix reduced = rows.cwiseSqrt().asDiagonal() * model.block_probs() * cols.cwiseSqrt().asDiagonal();
  return svd_values(reduced)[k - 1] / stats.lambda_k;
}

TailReport singular_value_transfer_check(const PlantedModel& model, std::size_t samples, std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorKind::validation, "singular_value_transfer_check: need samples >= 1");
  const double floor = 1.0 / (4.0 * std::numbers::sqrt2);

  TailReport report;
  report.check = "singular_value_transfer";
  report.n = model.n();
  report.params = {{"k", static_cast<double>(model.k())}, {"ratio_floor", floor}};
  report.samples = samples;
  report.threshold = floor;
  report.bound_rate = 0.05;

  double sum = 0.0, lowest = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < samples; ++t) {
    const double ratio = transfer_ratio(model, make_split(model.n(), derive_seed(seed, Stream::samples, t)));
    sum += ratio;
    lowest = std::min(lowest, ratio);
    if (ratio < floor) ++report.exceed_count;
  }
  report.metrics["mean_ratio"] = sum / static_cast<double>(samples);
  report.metrics["min_ratio"] = lowest;
  report.empirical_rate = static_cast<double>(report.exceed_count) / static_cast<double>(samples);
  // the floor is asserted only when there is a non-trivial singular value to transfer
  report.pass = model.k() < 2 || static_cast<double>(samples - report.exceed_count) >= 0.95 * static_cast<double>(samples);
  return report;
}

TailReport weighted_sum_tail_check(std::size_t n, double alpha, double sigma, std::size_t samples, std::uint64_t seed) {
  const double nn = static_cast<double>(n);
  if (n < 2 || !(alpha * std::sqrt(nn) >= 1.0 - 1e-12) || alpha > 1.0)
    throw Error(ErrorKind::validation, "weighted_sum_tail_check: need 1/sqrt(n) <= alpha <= 1");
  if (samples < 1) throw Error(ErrorKind::validation, "weighted_sum_tail_check: need samples >= 1");
  const double p = centered_bernoulli_p(sigma);

  // flattest admissible unit vector: floor(1/alpha^2) entries at alpha, one remainder entry
  std::vector<double> coefficients(std::min<std::size_t>(n, static_cast<std::size_t>(std::floor(1.0 / (alpha * alpha) + 1e-9))), alpha);
  const double remainder = 1.0 - static_cast<double>(coefficients.size()) * alpha * alpha;
  if (remainder > 1e-12 && coefficients.size() < n) coefficients.push_back(std::sqrt(remainder));
  double norm_sq = 0.0;
  for (double a : coefficients) norm_sq += a * a;
  for (double& a : coefficients) a /= std::sqrt(norm_sq);

  TailReport report;
  report.check = "weighted_sum_tail";
  report.n = n;
  report.params = {{"alpha", alpha}, {"sigma", sigma}};
  report.samples = samples;
  report.threshold = 4.0 * (sigma * std::sqrt(std::log(nn)) + alpha * std::log(nn));
  report.bound_rate = 2.0 * inverse_cube(n);

  Rng rng(derive_seed(seed, Stream::samples));
  double max_abs = 0.0;
  for (std::size_t t = 0; t < samples; ++t) {
    double sum = 0.0;
    for (double a : coefficients) sum += a * (rng.bernoulli(p) ? 1.0 - p : -p);
    max_abs = std::max(max_abs, std::abs(sum));
    if (std::abs(sum) > report.threshold) ++report.exceed_count;
  }
  report.metrics["max_abs_sum"] = max_abs;
  finish(report);
  return report;
}

}  // namespace hpart
