#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "hpart/error.hpp"
#include "hpart/model.hpp"
#include "hpart/spectra.hpp"
#include "test_util.hpp"

using namespace hpart;
using hpart::testing::gaussian_matrix;
using hpart::testing::reference_projector;

namespace {

DenseMatrix diag3() { return Vector::LinSpaced(3, 3.0, 1.0).asDiagonal(); }

double op_norm(const DenseMatrix& m) { return Eigen::JacobiSVD<DenseMatrix>(m).singularValues()(0); }

}  // namespace

TEST_CASE("svd_values on small exact cases") {
  const auto values = svd_values(diag3());
  REQUIRE(values.size() == 3);
  CHECK(values[0] == doctest::Approx(3));
  CHECK(values[1] == doctest::Approx(2));
  CHECK(values[2] == doctest::Approx(1));

  Vector u(4), v(3);
  u << 2, 0, 0, 0;
  v << 0, 5, 0;
  const auto rank_one = svd_values(u * v.transpose());
  CHECK(rank_one[0] == doctest::Approx(10));
  CHECK(rank_one[1] == doctest::Approx(0).epsilon(1e-12));

  DenseMatrix bad = DenseMatrix::Ones(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(svd_values(bad), Error);
}

TEST_CASE("svd_values of the coloring probability matrix") {
  // P = p (J - I) (x) 1_{20} 1_{20}^T; B = p (J - I) has eigenvalues 2p and -p (twice),
  // each scaled by the class size 20.
  const double p = 0.3;
  const DenseMatrix b = p * (DenseMatrix::Ones(3, 3) - DenseMatrix::Identity(3, 3));
  const DenseMatrix big = build_model(std::vector<std::size_t>{20, 20, 20}, b).expectation_matrix();
  const auto values = svd_values(big);
  CHECK(values[0] == doctest::Approx(20 * 2 * p).epsilon(1e-10));
  CHECK(values[1] == doctest::Approx(20 * p).epsilon(1e-10));
  CHECK(values[2] == doctest::Approx(20 * p).epsilon(1e-10));
  CHECK(values[3] == doctest::Approx(0).epsilon(1e-10));
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(big);
  CHECK(eig.eigenvalues().cwiseAbs().maxCoeff() == doctest::Approx(values[0]).epsilon(1e-10));
}

TEST_CASE("svd invariants on random matrices") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const DenseMatrix m = gaussian_matrix(30 + trial, 17, rng);
    const auto values = svd_values(m);
    double sum_sq = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i > 0) CHECK(values[i] <= values[i - 1]);
      CHECK(values[i] >= 0);
      sum_sq += values[i] * values[i];
    }
    CHECK(sum_sq == doctest::Approx(m.squaredNorm()).epsilon(1e-8));

    const SvdFactors f = thin_svd(m);
    CHECK((m - f.u * f.values.asDiagonal() * f.v.transpose()).norm() <= 1e-8 * m.norm());
  }
}

TEST_CASE("top_k_left_basis") {
  SUBCASE("diagonal") {
    const Basis basis = top_k_left_basis(diag3(), 2);
    DenseMatrix expected = DenseMatrix::Zero(3, 3);
    expected(0, 0) = expected(1, 1) = 1;
    CHECK((basis.projector() - expected).norm() < 1e-12);
    CHECK_FALSE(basis.degenerate_gap());
  }
  SUBCASE("full rank projection is the identity on the columns") {
    Rng rng(5);
    const DenseMatrix m = gaussian_matrix(8, 8, rng);
    CHECK((project_columns(top_k_left_basis(m, 8), m) - m).norm() < 1e-10);
  }
  SUBCASE("matches a reference Jacobi SVD") {
    Rng rng(9);
    const DenseMatrix m = gaussian_matrix(40, 20, rng);
    const Basis basis = top_k_left_basis(m, 5);
    CHECK(op_norm(basis.projector() - reference_projector(m, 5)) <= 1e-6);
  }
  SUBCASE("degenerate gap is flagged") {
    const Basis basis = top_k_left_basis(DenseMatrix::Identity(4, 4), 2);
    CHECK(basis.degenerate_gap());
    CHECK(basis.dim_sub() == 2);
  }
  SUBCASE("k out of range") {
    CHECK_THROWS_AS(top_k_left_basis(diag3(), 0), Error);
    CHECK_THROWS_AS(top_k_left_basis(diag3(), 4), Error);
  }
}

TEST_CASE("project_columns") {
  const Basis plane(DenseMatrix::Identity(3, 2));
  Vector x(3);
  x << 1, 2, 3;
  const DenseMatrix projected = project_columns(plane, x);
  CHECK(projected(0, 0) == 1);
  CHECK(projected(1, 0) == 2);
  CHECK(projected(2, 0) == 0);
  CHECK_THROWS_AS(project_columns(plane, DenseMatrix::Ones(4, 1)), Error);

  Rng rng(21);
  const Basis basis = Basis::orthonormalize(gaussian_matrix(50, 6, rng));
  const DenseMatrix m = gaussian_matrix(50, 12, rng);
  const DenseMatrix p = project_columns(basis, m);
  // residual orthogonal to the basis
  CHECK((basis.vectors().transpose() * (m - p)).cwiseAbs().maxCoeff() <= 1e-8);
  // idempotence
  CHECK((project_columns(basis, p) - p).cwiseAbs().maxCoeff() <= 1e-8);
  // columns already in the span are fixed
  const DenseMatrix inside = basis.vectors() * gaussian_matrix(6, 4, rng);
  CHECK((project_columns(basis, inside) - inside).cwiseAbs().maxCoeff() <= 1e-8);
  // Pythagoras
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double total = m.col(j).squaredNorm();
    CHECK(p.col(j).squaredNorm() + (m.col(j) - p.col(j)).squaredNorm() == doctest::Approx(total).epsilon(1e-8));
  }
}

TEST_CASE("Basis rejects non-orthonormal vectors") {
  CHECK_THROWS_AS(Basis(DenseMatrix::Ones(3, 2)), Error);
  CHECK_THROWS_AS(Basis(DenseMatrix::Identity(2, 3)), Error);
}

TEST_CASE("spectral_norm") {
  CHECK(spectral_norm(DenseMatrix::Identity(7, 7)) == doctest::Approx(1));
  CHECK(spectral_norm(DenseMatrix::Ones(9, 9)) == doctest::Approx(9));
  Rng rng(4);
  const DenseMatrix rect = gaussian_matrix(20, 13, rng);
  CHECK(spectral_norm(rect) == doctest::Approx(op_norm(rect)).epsilon(1e-6));
  const DenseMatrix sym = rect.transpose() * rect - 5 * DenseMatrix::Identity(13, 13);
  CHECK(spectral_norm(sym) == doctest::Approx(op_norm(sym)).epsilon(1e-6));
}

TEST_CASE("spectral_norm of random sign matrices sits at the semicircle edge") {
  const Eigen::Index n = 500;
  Rng rng(17);
  double total = 0;
  for (int sample = 0; sample < 20; ++sample) {
    DenseMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      m(i, i) = rng.bernoulli(0.5) ? 1.0 : -1.0;
      for (Eigen::Index j = i + 1; j < n; ++j) m(i, j) = m(j, i) = rng.bernoulli(0.5) ? 1.0 : -1.0;
    }
    total += spectral_norm(m);
  }
  const double mean = total / 20;
  CHECK(mean >= 1.9 * std::sqrt(double(n)));
  CHECK(mean <= 2.1 * std::sqrt(double(n)));
}

TEST_CASE("sin_max_principal_angle") {
  const Basis e1(DenseMatrix::Identity(2, 1));
  DenseMatrix e2_vec = DenseMatrix::Zero(2, 1);
  e2_vec(1, 0) = 1;
  const Basis e2(e2_vec);
  CHECK(sin_max_principal_angle(e1, e1) == doctest::Approx(0));
  CHECK(sin_max_principal_angle(e1, e2) == doctest::Approx(1));

  const double theta = 0.3;
  DenseMatrix rotated(2, 1);
  rotated << std::cos(theta), std::sin(theta);
  CHECK(sin_max_principal_angle(e1, Basis(rotated)) == doctest::Approx(std::sin(theta)));

  Rng rng(8);
  const Basis a = Basis::orthonormalize(gaussian_matrix(12, 3, rng));
  const Basis b = Basis::orthonormalize(gaussian_matrix(12, 3, rng));
  CHECK(sin_max_principal_angle(a, b) == doctest::Approx(sin_max_principal_angle(b, a)).epsilon(1e-10));
  // a different orthonormal basis of span(a)
  const Eigen::HouseholderQR<DenseMatrix> qr(gaussian_matrix(3, 3, rng));
  const DenseMatrix rotation = qr.householderQ();
  const Basis a_rotated(a.vectors() * rotation);
  CHECK(sin_max_principal_angle(a_rotated, b) == doctest::Approx(sin_max_principal_angle(a, b)).epsilon(1e-10));

  CHECK_THROWS_AS(sin_max_principal_angle(e1, Basis(DenseMatrix::Identity(3, 1))), Error);
}

TEST_CASE("matrix dump round-trips") {
  Rng rng(1);
  const DenseMatrix m = gaussian_matrix(3, 4, rng);
  std::stringstream text;
  write_matrix(text, m);
  CHECK(read_matrix(text) == m);
  std::stringstream truncated("2 2\n1 2\n3\n");
  CHECK_THROWS_AS(read_matrix(truncated), Error);
}
