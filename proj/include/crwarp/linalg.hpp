#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace crwarp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Ordered vectors (matrix columns) in R^N with a three-block split:
/// columns [0, dt) span D_T, [dt, dt + dperp) span D_perp, the rest are the
/// normal block. A plain subspace basis uses dt = dperp = 0.
struct Frame {
  Mat vectors;
  std::size_t dt = 0;
  std::size_t dperp = 0;
  bool orthonormal = false;

  std::size_t size() const { return static_cast<std::size_t>(vectors.cols()); }
  std::size_t ambient_dim() const {
    return static_cast<std::size_t>(vectors.rows());
  }
  Vec operator[](std::size_t i) const {
    return vectors.col(static_cast<Eigen::Index>(i));
  }
  Mat block(std::size_t first, std::size_t count) const {
    return vectors.middleCols(static_cast<Eigen::Index>(first),
                              static_cast<Eigen::Index>(count));
  }
  std::size_t tangent_dim() const { return dt + dperp; }
  std::size_t normal_dim() const { return size() - tangent_dim(); }

  /// Largest entrywise deviation of the Gram matrix from the identity.
  double orthonormality_defect() const;
};

/// An orthonormal pair spanning a 2-plane.
struct PlaneSpec {
  Vec u;
  Vec v;

  /// Orthonormalize (u, v) keeping the direction of u.
  static PlaneSpec from_pair(const Vec& u, const Vec& v);
};

/// Orthonormalize `vectors` with respect to the bilinear form `inner`
/// (identity when empty). The first output keeps the first input's
/// direction. Throws DegenerateInput when the Gram determinant is <= 1e-14.
Frame gram_schmidt(std::span<const Vec> vectors, const Mat& inner = Mat());
Frame gram_schmidt(const Mat& columns, const Mat& inner = Mat());

/// Orthonormal basis (columns) of the orthogonal complement of the column
/// span of `basis` (assumed orthonormal) in R^N.
Mat orthogonal_complement(const Mat& basis);

/// Orthogonal matrix whose first column is `direction` normalized.
Mat rotation_with_first_column(const Vec& direction);

}  // namespace crwarp
