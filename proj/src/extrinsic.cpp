#include "crwarp/extrinsic.hpp"

#include "crwarp/error.hpp"

namespace crwarp {

SecondFundamentalForm::SecondFundamentalForm(int n, std::vector<Mat> slices)
    : n_(n), slices_(std::move(slices)) {
  for (auto& s : slices_) {
    if (s.rows() != n || s.cols() != n)
      throw DimensionMismatch("second fundamental form slice must be n x n");
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = j + 1; i < n; ++i) s(i, j) = s(j, i);
  }
}

SecondFundamentalForm SecondFundamentalForm::zero(int n, int normal_dim) {
  return {n, std::vector<Mat>(static_cast<std::size_t>(normal_dim), Mat::Zero(n, n))};
}

Vec SecondFundamentalForm::value(const Vec& x, const Vec& y) const {
  Vec out(normal_dim());
  for (int r = 0; r < normal_dim(); ++r) out[r] = x.dot(slice(r) * y);
  return out;
}

double SecondFundamentalForm::norm_sq() const {
  double total = 0.0;
  for (const auto& s : slices_) total += s.squaredNorm();
  return total;
}

SecondFundamentalForm SecondFundamentalForm::transformed(
    const Mat& tangent_rotation, const Mat& normal_rotation) const {
  const int p = normal_dim();
  if (tangent_rotation.rows() != n_ || normal_rotation.rows() != p ||
      normal_rotation.cols() != p)
    throw DimensionMismatch("frame rotation has wrong shape");
  std::vector<Mat> rotated(static_cast<std::size_t>(p),
                           Mat::Zero(tangent_rotation.cols(), tangent_rotation.cols()));
  for (int s = 0; s < p; ++s) {
    Mat acc = Mat::Zero(n_, n_);
    for (int r = 0; r < p; ++r) acc += normal_rotation(r, s) * slice(r);
    rotated[static_cast<std::size_t>(s)] =
        tangent_rotation.transpose() * acc * tangent_rotation;
  }
  return {static_cast<int>(tangent_rotation.cols()), std::move(rotated)};
}

MeanCurvature mean_curvature(const SecondFundamentalForm& h) {
  MeanCurvature out;
  out.vector = Vec::Zero(h.normal_dim());
  if (h.n() == 0) return out;
  for (int r = 0; r < h.normal_dim(); ++r)
    out.vector[r] = h.slice(r).trace() / h.n();
  out.norm_sq = out.vector.squaredNorm();
  return out;
}

Mat shape_operator(const SecondFundamentalForm& h, int r) {
  if (r < 0 || r >= h.normal_dim())
    throw IndexError("normal index " + std::to_string(r) + " out of range [0, " +
                     std::to_string(h.normal_dim()) + ")");
  return h.slice(r);
}

double gauss_sectional(const SecondFundamentalForm& h, const Vec& u,
                       const Vec& v, double ambient_k) {
  double k = ambient_k;
  for (const auto& a : h.slices()) {
    const double uu = u.dot(a * u);
    const double vv = v.dot(a * v);
    const double uv = u.dot(a * v);
    k += uu * vv - uv * uv;
  }
  return k;
}

double ExtrinsicPoint::ambient_sectional(const Vec& u, const Vec& v) const {
  return csf_sectional(PlaneSpec{tangent * u, tangent * v}, ambient);
}

double ExtrinsicPoint::sectional(const Vec& u, const Vec& v) const {
  return gauss_sectional(h, u, v, ambient_sectional(u, v));
}

double ExtrinsicPoint::sectional(int i, int j) const {
  return sectional(Vec::Unit(n(), i), Vec::Unit(n(), j));
}

Frame ExtrinsicPoint::tangent_subframe(int first, int count) const {
  Frame f;
  f.vectors = Mat::Identity(n(), n()).middleCols(first, count);
  f.orthonormal = true;
  return f;
}

Frame ExtrinsicPoint::dt_frame() const { return tangent_subframe(0, n1); }
Frame ExtrinsicPoint::dperp_frame() const { return tangent_subframe(n1, n2); }

ExtrinsicPoint ExtrinsicPoint::rotated(const Mat& tangent_rotation,
                                       const Mat& normal_rotation) const {
  ExtrinsicPoint out = *this;
  out.tangent = tangent * tangent_rotation;
  out.h = h.transformed(tangent_rotation, normal_rotation);
  return out;
}

}  // namespace crwarp
