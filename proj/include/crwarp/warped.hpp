#pragma once

#include "crwarp/expr.hpp"
#include "crwarp/linalg.hpp"

#include <span>
#include <vector>

namespace crwarp {

/// Warping function data at a base point. The Laplacian uses the geometer's
/// sign, Delta = -div grad, so Delta f = -f'' on a flat line.
struct WarpData {
  double f = 1.0;
  Vec grad_f;               // coordinate components of grad f, g^{-1} df
  double grad_norm_sq = 0.0;
  double laplacian_f = 0.0;

  /// n2 * Delta f / f, the term appearing in the warp identity.
  double warp_term(int n2) const { return n2 * laplacian_f / f; }
};

/// Gradient and geometer's Laplacian of f at `point` (base coordinates, in
/// the order of f.variables()) for the metric `base_metric`. `christoffel`,
/// when given, holds Gamma^k as christoffel[k](i, j); omit it for metrics
/// that are constant near the point. Throws NonPositiveWarp if f <= 0.
WarpData grad_laplacian(const dsl::Expr& f, std::span<const double> point,
                        const Mat& base_metric,
                        const std::vector<Mat>& christoffel = {});

/// Curvature of M on a fiber plane: (k_fiber - |grad f|^2) / f^2.
double bo_fiber_sectional(const WarpData& warp, double k_fiber);

/// |sum of mixed sectional curvatures - n2 Delta f / f|; mixed_k is n1 x n2.
double warp_identity_residual(const Mat& mixed_k, const WarpData& warp, int n2);

/// Leaf-wise Chen invariant of the fiber tangent space from the intrinsic
/// invariant of the fiber: delta/f^2 - [C(n2,2) - 1] |grad f|^2 / f^2.
double bo_delta_transfer(double delta_fiber_intrinsic, const WarpData& warp,
                         int n2);

/// Inverse of bo_delta_transfer.
double bo_delta_transfer_inverse(double delta_leafwise, const WarpData& warp,
                                 int n2);

}  // namespace crwarp
