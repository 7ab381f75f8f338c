#include "crwarp/warped.hpp"

#include "crwarp/error.hpp"
#include "crwarp/taylor2.hpp"

#include <cmath>

namespace crwarp {

namespace {

double binomial2(int n) { return 0.5 * n * (n - 1); }

void require_fiber_dim(int n2) {
  if (n2 < 2)
    throw DegenerateInput("Chen invariant of the fiber needs n2 >= 2");
}

}  // namespace

WarpData grad_laplacian(const dsl::Expr& f, std::span<const double> point,
                        const Mat& base_metric,
                        const std::vector<Mat>& christoffel) {
  const auto d = point.size();
  const auto n = static_cast<Eigen::Index>(d);
  if (f.variables().size() != d)
    throw DimensionMismatch("point does not match the warp variables");
  if (base_metric.rows() != n || base_metric.cols() != n)
    throw DimensionMismatch("base metric has wrong shape");
  if (!christoffel.empty() && christoffel.size() != d)
    throw DimensionMismatch("Christoffel symbols have wrong shape");

  std::vector<Taylor2> env;
  env.reserve(d);
  for (std::size_t i = 0; i < d; ++i) env.push_back(Taylor2::variable(point[i], i, d));
  const Taylor2 jet = dsl::eval(f, std::span<const Taylor2>(env));
  if (!(jet.value() > 0.0))
    throw NonPositiveWarp("warping function is not positive at the point (f = " +
                          std::to_string(jet.value()) + ")");

  Eigen::LLT<Mat> llt(base_metric);
  if (llt.info() != Eigen::Success)
    throw DegenerateInput("base metric is not positive definite");
  const Mat inverse = llt.solve(Mat::Identity(n, n));

  const Vec& df = jet.grad().size() == n ? jet.grad() : Vec(Vec::Zero(n));
  const Mat& ddf = jet.hess().rows() == n ? jet.hess() : Mat(Mat::Zero(n, n));

  // Covariant Hessian: d_ij f - Gamma^k_ij d_k f.
  Mat hess = ddf;
  for (std::size_t k = 0; k < christoffel.size(); ++k)
    hess -= christoffel[k] * df[static_cast<Eigen::Index>(k)];

  WarpData out;
  out.f = jet.value();
  out.grad_f = inverse * df;
  out.grad_norm_sq = df.dot(out.grad_f);
  out.laplacian_f = -(inverse.cwiseProduct(hess)).sum();
  return out;
}

double bo_fiber_sectional(const WarpData& warp, double k_fiber) {
  return (k_fiber - warp.grad_norm_sq) / (warp.f * warp.f);
}

double warp_identity_residual(const Mat& mixed_k, const WarpData& warp, int n2) {
  if (mixed_k.cols() != n2)
    throw DimensionMismatch("mixed curvature matrix must have n2 columns");
  return std::abs(mixed_k.sum() - warp.warp_term(n2));
}

double bo_delta_transfer(double delta_fiber_intrinsic, const WarpData& warp,
                         int n2) {
  require_fiber_dim(n2);
  const double f2 = warp.f * warp.f;
  return delta_fiber_intrinsic / f2 -
         (binomial2(n2) - 1.0) * warp.grad_norm_sq / f2;
}

double bo_delta_transfer_inverse(double delta_leafwise, const WarpData& warp,
                                 int n2) {
  require_fiber_dim(n2);
  return warp.f * warp.f * delta_leafwise +
         (binomial2(n2) - 1.0) * warp.grad_norm_sq;
}

}  // namespace crwarp
