#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>

#include "hpart/model.hpp"
#include "hpart/spectra.hpp"

namespace hpart {

/// Outcome of one Monte Carlo check of a tail or perturbation bound.
struct TailReport {
  std::string check;
  std::size_t n = 0;
  std::map<std::string, double> params;
  std::size_t samples = 0;
  double threshold = 0.0;
  std::size_t exceed_count = 0;
  double empirical_rate = 0.0;
  double bound_rate = 0.0;
  bool pass = false;
  std::map<std::string, double> metrics;  // check-specific observations
};

/// Pass rule shared by the tail checks: the empirical rate may exceed the
/// claimed probability by three standard errors plus 10/samples.
bool within_tail_allowance(double empirical_rate, double bound_rate, std::size_t samples);

/// Centered Bernoulli variable with variance sigma^2: takes 1-p with
/// probability p and -p otherwise, p = 1/2 - sqrt(1/4 - sigma^2).
double centered_bernoulli_p(double sigma);

/// Projection length of centered Bernoulli vectors onto a uniformly random
/// d-dimensional subspace of R^n against sigma sqrt(d) + c1 sqrt(ln n).
TailReport projection_tail_check(std::size_t n, std::size_t d, double sigma, std::size_t samples, std::uint64_t seed,
                                 double c1 = 4.0);

/// Same harness with H spanned by k normalized indicators of disjoint
/// s-subsets; threshold c2 sqrt(k) (sigma + alpha ln n) with alpha = 2/sqrt(s).
TailReport flat_basis_projection_check(std::size_t n, std::size_t s, std::size_t k, double sigma, std::size_t samples,
                                       std::uint64_t seed, double c2 = 4.0);

/// Spectral norm of sampled noise matrices against c0 sigma sqrt(n). Also
/// records mean ||E|| / (sigma sqrt(n)) as metrics["mean_ratio"].
TailReport noise_norm_check(const PlantedModel& model, std::size_t samples, double c0, std::uint64_t seed);

struct DavisKahanReport {
  double lhs = 0.0;  // sin of the largest principal angle between top-k subspaces
  double rhs = 0.0;  // ||noise|| / (sigma_k(m) - sigma_{k+1}(m))
  bool holds = false;
};

DavisKahanReport davis_kahan_check(const DenseMatrix& m, const DenseMatrix& noise, std::size_t k);

/// davis_kahan_check on `pairs` random Gaussian (M, N) of the given shape,
/// k uniform in 1..5 and noise scale in {0.01, 0.1, 1}; an exceedance is a
/// pair where the bound fails.
TailReport davis_kahan_sweep(std::size_t pairs, std::size_t rows, std::size_t cols, std::uint64_t seed);

struct SplitPlan;

/// sigma_k(A) / lambda_k(P) for one split, from the block-reduced form of A.
double transfer_ratio(const PlantedModel& model, const SplitPlan& split);

/// Ratio sigma_k(A) / lambda_k(P), A = P restricted to rows Z and columns Y1
/// of a random split; an exceedance is a ratio below 1/(4 sqrt 2). Passes when
/// at least 95% of splits clear the floor.
TailReport singular_value_transfer_check(const PlantedModel& model, std::size_t samples, std::uint64_t seed);

/// S = sum a_i xi_i for the flattest unit vector with |a_i| <= alpha, against
/// 4 (sigma sqrt(ln n) + alpha ln n).
TailReport weighted_sum_tail_check(std::size_t n, double alpha, double sigma, std::size_t samples, std::uint64_t seed);

}  // namespace hpart
