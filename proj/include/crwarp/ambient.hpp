#pragma once

#include "crwarp/linalg.hpp"
#include "crwarp/tolerances.hpp"

#include <optional>
#include <string>

namespace crwarp {

/// Complex space form of constant holomorphic sectional curvature c and
/// complex dimension m, with the standard complex structure on R^{2m}:
/// (x_1, y_1, ..., x_m, y_m) -> (-y_1, x_1, ..., -y_m, x_m).
class AmbientModel {
 public:
  AmbientModel(double c, int m);

  double c() const { return c_; }
  int m() const { return m_; }
  int real_dim() const { return 2 * m_; }

  Vec apply_j(const Vec& x) const;
  Mat apply_j(const Mat& columns) const;
  Mat j_matrix() const;

 private:
  double c_;
  int m_;
};

/// R(X, Y, Z, W) of the space form, with K(X ^ Y) = R(X, Y, Y, X).
double csf_curvature(const Vec& x, const Vec& y, const Vec& z, const Vec& w,
                     const AmbientModel& model);

/// (c/4)(1 + 3 <Ju, v>^2) for an orthonormal pair.
double csf_sectional(const PlaneSpec& plane, const AmbientModel& model);

enum class SubspaceTag { kJInvariant, kTotallyReal, kGeneric };

std::string to_string(SubspaceTag tag);

struct SubspaceClass {
  SubspaceTag tag = SubspaceTag::kGeneric;
  double j_closure_residual = 0.0;       // max |proj_{V^perp}(J v)|
  double j_orthogonality_residual = 0.0; // max |proj_V(J v)|
};

SubspaceClass classify_subspace(const Frame& subspace, const AmbientModel& model,
                                double tol_frame = kDefaultTolerances.frame);

/// Closed-form infimum of ambient sectional curvature over 2-planes in V:
/// c for a holomorphic plane, min(c/4, c) for J-invariant V of dim >= 4,
/// c/4 for totally real V; nullopt for generic V.
std::optional<double> kmin_closed_form(
    const Frame& subspace, const AmbientModel& model,
    double tol_frame = kDefaultTolerances.frame);

}  // namespace crwarp
