#include "crwarp/ambient.hpp"

#include "crwarp/error.hpp"

#include <algorithm>

namespace crwarp {

AmbientModel::AmbientModel(double c, int m) : c_(c), m_(m) {
  if (m < 1) throw DimensionMismatch("complex dimension must be positive");
}

Vec AmbientModel::apply_j(const Vec& x) const {
  if (x.size() != real_dim())
    throw DimensionMismatch("vector length " + std::to_string(x.size()) +
                            " != 2m = " + std::to_string(real_dim()));
  Vec out(x.size());
  for (Eigen::Index k = 0; k < m_; ++k) {
    out[2 * k] = -x[2 * k + 1];
    out[2 * k + 1] = x[2 * k];
  }
  return out;
}

Mat AmbientModel::apply_j(const Mat& columns) const {
  Mat out(columns.rows(), columns.cols());
  for (Eigen::Index j = 0; j < columns.cols(); ++j)
    out.col(j) = apply_j(Vec(columns.col(j)));
  return out;
}

Mat AmbientModel::j_matrix() const {
  return apply_j(Mat(Mat::Identity(real_dim(), real_dim())));
}

double csf_curvature(const Vec& x, const Vec& y, const Vec& z, const Vec& w,
                     const AmbientModel& model) {
  const Vec jx = model.apply_j(x);
  const Vec jy = model.apply_j(y);
  const Vec jz = model.apply_j(z);
  if (w.size() != model.real_dim())
    throw DimensionMismatch("vector length does not match 2m");
  return 0.25 * model.c() *
         (x.dot(w) * y.dot(z) - x.dot(z) * y.dot(w) + jx.dot(w) * jy.dot(z) -
          jx.dot(z) * jy.dot(w) + 2.0 * x.dot(jy) * jz.dot(w));
}

double csf_sectional(const PlaneSpec& plane, const AmbientModel& model) {
  const double g = model.apply_j(plane.u).dot(plane.v);
  return 0.25 * model.c() * (1.0 + 3.0 * g * g);
}

std::string to_string(SubspaceTag tag) {
  switch (tag) {
    case SubspaceTag::kJInvariant:
      return "J-invariant";
    case SubspaceTag::kTotallyReal:
      return "totally-real";
    case SubspaceTag::kGeneric:
      return "generic";
  }
  return "generic";
}

SubspaceClass classify_subspace(const Frame& subspace, const AmbientModel& model,
                                double tol_frame) {
  SubspaceClass out;
  const Mat& basis = subspace.vectors;
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    const Vec jv = model.apply_j(Vec(basis.col(j)));
    const Vec inside = basis * (basis.transpose() * jv);
    out.j_closure_residual =
        std::max(out.j_closure_residual, (jv - inside).norm());
    out.j_orthogonality_residual =
        std::max(out.j_orthogonality_residual, inside.norm());
  }
  if (basis.cols() > 0 && out.j_closure_residual < tol_frame)
    out.tag = SubspaceTag::kJInvariant;
  else if (basis.cols() > 0 && out.j_orthogonality_residual < tol_frame)
    out.tag = SubspaceTag::kTotallyReal;
  return out;
}

std::optional<double> kmin_closed_form(const Frame& subspace,
                                       const AmbientModel& model,
                                       double tol_frame) {
  if (subspace.size() < 2) throw DegenerateInput("K_min needs dim >= 2");
  const double c = model.c();
  switch (classify_subspace(subspace, model, tol_frame).tag) {
    case SubspaceTag::kJInvariant:
      // A J-invariant plane is holomorphic; only dim >= 4 reaches c/4.
      return subspace.size() == 2 ? c : std::min(0.25 * c, c);
    case SubspaceTag::kTotallyReal:
      return 0.25 * c;
    case SubspaceTag::kGeneric:
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace crwarp
