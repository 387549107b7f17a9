#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace hpart {

using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thin singular value decomposition m = u * diag(values) * v^T.
struct SvdFactors {
  DenseMatrix u;
  Vector values;  // descending
  DenseMatrix v;
};

/// All min(rows, cols) singular values in descending order.
std::vector<double> svd_values(const DenseMatrix& m);

SvdFactors thin_svd(const DenseMatrix& m);

/// Orthonormal column basis of a subspace of R^dim_ambient.
///
/// Consumers only ever use the orthogonal projector onto the span, so the
/// choice of basis inside the subspace (signs, rotations within a repeated
/// singular value) carries no meaning.
class Basis {
 public:
  /// Wraps columns that must already be orthonormal (Gram within 1e-8).
  explicit Basis(DenseMatrix vectors, bool degenerate_gap = false);

  /// Orthonormalizes arbitrary full-column-rank columns with a thin QR.
  static Basis orthonormalize(const DenseMatrix& columns);

  std::size_t dim_ambient() const { return static_cast<std::size_t>(vectors_.rows()); }
  std::size_t dim_sub() const { return static_cast<std::size_t>(vectors_.cols()); }
  const DenseMatrix& vectors() const { return vectors_; }

  /// Set when the singular values at positions k and k+1 coincide within
  /// 1e-9 relative, i.e. the top-k subspace is not uniquely defined.
  bool degenerate_gap() const { return degenerate_gap_; }

  /// Coordinates of each column of m in this basis (dim_sub x m.cols()).
  /// Distances between coordinate columns equal distances between the
  /// projected vectors in the ambient space.
  DenseMatrix coordinates(const DenseMatrix& m) const;

  /// dim_ambient x dim_ambient orthogonal projector.
  DenseMatrix projector() const;

 private:
  DenseMatrix vectors_;
  bool degenerate_gap_ = false;
};

/// Span of the top-k left singular vectors of m. Requires 1 <= k <= min(rows, cols).
Basis top_k_left_basis(const DenseMatrix& m, std::size_t k);

/// Orthogonal projection of every column of m onto span(basis).
DenseMatrix project_columns(const Basis& basis, const DenseMatrix& m);

/// Largest singular value.
double spectral_norm(const DenseMatrix& m);

/// Sine of the largest principal angle, computed as ||(I - P_a) P_b||.
double sin_max_principal_angle(const Basis& a, const Basis& b);

/// Plain-text matrix dump: "rows cols" then one row per line.
void write_matrix(std::ostream& out, const DenseMatrix& m);
DenseMatrix read_matrix(std::istream& in);

}  // namespace hpart
