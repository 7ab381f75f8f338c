#pragma once

#include "crwarp/ambient.hpp"
#include "crwarp/linalg.hpp"
#include "crwarp/warped.hpp"

#include <optional>
#include <vector>

namespace crwarp {

/// Coefficients h^r_ij = <h(e_i, e_j), e_r> in an adapted orthonormal frame;
/// one symmetric n x n slice per normal direction r.
class SecondFundamentalForm {
 public:
  SecondFundamentalForm() = default;
  SecondFundamentalForm(int n, std::vector<Mat> slices);

  static SecondFundamentalForm zero(int n, int normal_dim);

  int n() const { return n_; }
  int normal_dim() const { return static_cast<int>(slices_.size()); }
  double operator()(int r, int i, int j) const { return slices_[static_cast<std::size_t>(r)](i, j); }
  const Mat& slice(int r) const { return slices_[static_cast<std::size_t>(r)]; }
  const std::vector<Mat>& slices() const { return slices_; }

  /// Normal vector h(x, y) in normal-frame coordinates.
  Vec value(const Vec& x, const Vec& y) const;
  double norm_sq() const;

  /// Coefficients after changing tangent basis (columns of `tangent_rotation`
  /// are new tangent vectors in old coordinates) and normal basis (columns of
  /// `normal_rotation` likewise).
  SecondFundamentalForm transformed(const Mat& tangent_rotation,
                                    const Mat& normal_rotation) const;

 private:
  int n_ = 0;
  std::vector<Mat> slices_;
};

struct MeanCurvature {
  Vec vector;  // H^r = (1/n) sum_i h^r_ii
  double norm_sq = 0.0;
};

MeanCurvature mean_curvature(const SecondFundamentalForm& h);

/// A_{e_r} as a symmetric n x n matrix. Throws IndexError.
Mat shape_operator(const SecondFundamentalForm& h, int r);

/// Gauss equation: K(u ^ v) = ambient_k + sum_r (h^r(u,u) h^r(v,v) - h^r(u,v)^2)
/// for an orthonormal pair (u, v) of tangent-frame coefficients.
double gauss_sectional(const SecondFundamentalForm& h, const Vec& u,
                       const Vec& v, double ambient_k);

/// Everything the curvature invariants need at one point: dimensions, the
/// ambient model, the tangent frame embedded in R^{2m} (D_T columns first,
/// then D_perp) and h in that frame. Produced by immersion charts or directly
/// from synthetic data.
struct ExtrinsicPoint {
  int n1 = 0;
  int n2 = 0;
  bool cr = true;
  AmbientModel ambient{0.0, 1};
  Mat tangent;  // 2m x n, orthonormal columns
  SecondFundamentalForm h;
  std::optional<WarpData> warp;
  std::optional<double> base_curvature;   // constant curvature of (N_1, g_{N_1})
  std::optional<double> fiber_curvature;  // constant curvature of (N_2, g_{N_2})

  int n() const { return n1 + n2; }
  /// Ambient sectional curvature of the plane spanned by tangent
  /// coefficient vectors (u, v).
  double ambient_sectional(const Vec& u, const Vec& v) const;
  /// Intrinsic sectional curvature of M by the Gauss equation.
  double sectional(const Vec& u, const Vec& v) const;
  double sectional(int i, int j) const;
  /// Orthonormal basis of D_T or D_perp in tangent coefficients.
  Frame dt_frame() const;
  Frame dperp_frame() const;
  Frame tangent_subframe(int first, int count) const;
  /// Rotate the tangent frame by `tangent_rotation` (n x n orthogonal) and
  /// the normal frame by `normal_rotation`.
  ExtrinsicPoint rotated(const Mat& tangent_rotation,
                         const Mat& normal_rotation) const;
};

}  // namespace crwarp
