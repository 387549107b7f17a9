#include "hpart/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>

#include "hpart/error.hpp"

namespace hpart {
namespace {

void require_finite(const DenseMatrix& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorKind::validation, std::string(what) + ": non-finite entry");
}

constexpr double kGramTolerance = 1e-8;
constexpr double kDegenerateRelTol = 1e-9;

}  // namespace

std::vector<double> svd_values(const DenseMatrix& m) {
  require_finite(m, "svd_values");
  if (m.size() == 0) return {};
  Eigen::BDCSVD<DenseMatrix> svd(m);
  const Vector& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

SvdFactors thin_svd(const DenseMatrix& m) {
  require_finite(m, "thin_svd");
  Eigen::BDCSVD<DenseMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

Basis::Basis(DenseMatrix vectors, bool degenerate_gap)
    : vectors_(std::move(vectors)), degenerate_gap_(degenerate_gap) {
  if (vectors_.cols() > vectors_.rows())
    throw Error(ErrorKind::validation, "basis has more vectors than ambient dimensions");
  const DenseMatrix gram = vectors_.transpose() * vectors_;
  const DenseMatrix residual = gram - DenseMatrix::Identity(gram.rows(), gram.cols());
  if (residual.size() > 0 && residual.cwiseAbs().maxCoeff() > kGramTolerance)
    throw Error(ErrorKind::validation, "basis vectors are not orthonormal");
}

Basis Basis::orthonormalize(const DenseMatrix& columns) {
  require_finite(columns, "orthonormalize");
  Eigen::HouseholderQR<DenseMatrix> qr(columns);
  DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(columns.rows(), columns.cols());
  return Basis(std::move(q));
}

DenseMatrix Basis::coordinates(const DenseMatrix& m) const {
  if (static_cast<std::size_t>(m.rows()) != dim_ambient())
    throw Error(ErrorKind::validation, "projection dimension mismatch");
  return vectors_.transpose() * m;
}

DenseMatrix Basis::projector() const { return vectors_ * vectors_.transpose(); }

Basis top_k_left_basis(const DenseMatrix& m, std::size_t k) {
  const auto min_dim = static_cast<std::size_t>(std::min(m.rows(), m.cols()));
  if (k < 1 || k > min_dim) throw Error(ErrorKind::validation, "top_k_left_basis: k out of range");
  require_finite(m, "top_k_left_basis");
  Eigen::BDCSVD<DenseMatrix> svd(m, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  bool degenerate = false;
  if (k < min_dim) {
    const double scale = std::max(s(0), std::numeric_limits<double>::min());
    degenerate = (s(k - 1) - s(k)) <= kDegenerateRelTol * scale;
  }
  return Basis(svd.matrixU().leftCols(static_cast<Eigen::Index>(k)), degenerate);
}

DenseMatrix project_columns(const Basis& basis, const DenseMatrix& m) {
  return basis.vectors() * basis.coordinates(m);
}

double spectral_norm(const DenseMatrix& m) {
  require_finite(m, "spectral_norm");
  if (m.size() == 0) return 0.0;
  if (m.rows() == m.cols() && m == m.transpose()) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(m, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::BDCSVD<DenseMatrix> svd(m);
  return svd.singularValues()(0);
}

double sin_max_principal_angle(const Basis& a, const Basis& b) {
  if (a.dim_ambient() != b.dim_ambient() || a.dim_sub() != b.dim_sub())
    throw Error(ErrorKind::validation, "principal angle: dimension mismatch");
  const DenseMatrix residual = b.vectors() - a.vectors() * (a.vectors().transpose() * b.vectors());
  return std::clamp(spectral_norm(residual), 0.0, 1.0);
}

void write_matrix(std::ostream& out, const DenseMatrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << m(i, j);
    out << '\n';
  }
}

DenseMatrix read_matrix(std::istream& in) {
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0)
    throw Error(ErrorKind::validation, "matrix dump: bad header");
  DenseMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      if (!(in >> m(i, j))) throw Error(ErrorKind::validation, "matrix dump: truncated");
  return m;
}

}  // namespace hpart
