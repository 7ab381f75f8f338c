#include "crwarp/immersion.hpp"

#include "crwarp/error.hpp"
#include "crwarp/taylor2.hpp"

#include <algorithm>
#include <cmath>

namespace crwarp {

namespace {

constexpr double kImmersionFloor = 1e-8;

double column_residual(const Mat& basis, const Vec& v) {
  Vec w = v - basis * (basis.transpose() * v);
  return w.norm();
}

// Orthonormal J-paired basis (w1, Jw1, w2, Jw2, ...) of the span of
// `spanning` (orthonormal columns), assumed J-invariant. Candidates are
// taken in column order, skipping those already (numerically) covered.
Mat j_paired_basis(const Mat& spanning, const AmbientModel& model) {
  const auto dim = spanning.rows();
  const auto k = spanning.cols();
  Mat out(dim, 0);
  auto append = [&](Vec w) {
    for (int pass = 0; pass < 2; ++pass) w -= out * (out.transpose() * w);
    const double norm = w.norm();
    if (!(norm > 1e-8)) return false;
    out.conservativeResize(dim, out.cols() + 1);
    out.col(out.cols() - 1) = w / norm;
    return true;
  };
  // Greedy: the candidate least covered so far goes next; ties keep order.
  while (out.cols() < k) {
    Eigen::Index best = -1;
    double best_res = 1e-8;
    for (Eigen::Index c = 0; c < k; ++c) {
      const double res = column_residual(out, spanning.col(c));
      if (res > best_res + 1e-12) {
        best = c;
        best_res = res;
      }
    }
    if (best < 0 || !append(spanning.col(best))) break;
    // Keep J w inside the span so the block stays exact when J-closure
    // holds only up to roundoff.
    Vec jw = model.apply_j(Vec(out.col(out.cols() - 1)));
    jw = spanning * (spanning.transpose() * jw);
    if (out.cols() < k && !append(jw)) break;
  }
  if (out.cols() != k) throw CRViolation("could not build a J-paired basis");
  return out;
}

double j_closure(const Mat& basis, const AmbientModel& model) {
  double worst = 0.0;
  for (Eigen::Index c = 0; c < basis.cols(); ++c)
    worst = std::max(worst, column_residual(basis, model.apply_j(Vec(basis.col(c)))));
  return worst;
}

}  // namespace

bool CoordinateBox::contains(std::span<const double> point) const {
  for (std::size_t i = 0; i < point.size(); ++i) {
    if (i < lower.size() && point[i] < lower[i]) return false;
    if (i < upper.size() && point[i] > upper[i]) return false;
  }
  return true;
}

ImmersionChart make_chart(std::string name, int n1, int n2,
                          std::vector<std::string> coordinates,
                          const std::vector<std::string>& components,
                          const std::optional<std::string>& warp,
                          CoordinateBox domain, bool cr) {
  if (n1 < 0 || n2 < 0 || static_cast<int>(coordinates.size()) != n1 + n2)
    throw DimensionMismatch("coordinate count must equal n1 + n2");
  if (components.empty() || components.size() % 2 != 0)
    throw DimensionMismatch("chart needs an even number (2m) of real components");
  if (cr && n1 % 2 != 0)
    throw ParityError("holomorphic factor dimension n1 must be even");
  ImmersionChart chart;
  chart.name = std::move(name);
  chart.n1 = n1;
  chart.n2 = n2;
  chart.cr = cr;
  chart.ambient = AmbientModel(0.0, static_cast<int>(components.size() / 2));
  for (const auto& src : components) chart.components.push_back(dsl::parse(src, coordinates));
  if (warp) {
    std::vector<std::string> base(coordinates.begin(), coordinates.begin() + n1);
    chart.warp = dsl::parse(*warp, std::move(base));
  }
  chart.coordinates = std::move(coordinates);
  chart.domain = std::move(domain);
  return chart;
}

Vec ChartJet::second_derivative(int i, int j) const {
  Vec out(static_cast<Eigen::Index>(hessians.size()));
  for (std::size_t c = 0; c < hessians.size(); ++c)
    out[static_cast<Eigen::Index>(c)] = hessians[c](i, j);
  return out;
}

ChartJet jet_evaluate(const ImmersionChart& chart, std::span<const double> point) {
  const auto n = static_cast<std::size_t>(chart.n());
  if (point.size() != n)
    throw DimensionMismatch("point has " + std::to_string(point.size()) +
                            " coordinates, chart expects " + std::to_string(n));
  if (!chart.domain.contains(point))
    throw DomainError("point lies outside the chart domain");

  std::vector<Taylor2> env;
  env.reserve(n);
  for (std::size_t i = 0; i < n; ++i) env.push_back(Taylor2::variable(point[i], i, n));

  const auto dim = static_cast<Eigen::Index>(chart.components.size());
  const auto ni = static_cast<Eigen::Index>(n);
  ChartJet jet;
  jet.point.assign(point.begin(), point.end());
  jet.position.resize(dim);
  jet.jacobian = Mat::Zero(dim, ni);
  jet.hessians.reserve(chart.components.size());
  for (Eigen::Index c = 0; c < dim; ++c) {
    const Taylor2 v =
        dsl::eval(chart.components[static_cast<std::size_t>(c)], std::span<const Taylor2>(env));
    jet.position[c] = v.value();
    if (v.dim() == n) {
      jet.jacobian.row(c) = v.grad().transpose();
      jet.hessians.push_back(v.hess());
    } else {
      jet.hessians.push_back(Mat::Zero(ni, ni));
    }
  }

  Eigen::JacobiSVD<Mat> svd(jet.jacobian);
  const double smallest = n == 0 ? 0.0 : svd.singularValues()[ni - 1];
  if (!(smallest > kImmersionFloor))
    throw NotImmersed("Jacobian rank deficient (smallest singular value " +
                      std::to_string(smallest) + ")");
  return jet;
}

AdaptedFrameReport adapt_frame(const ImmersionChart& chart, const ChartJet& jet,
                               const Tolerances& tol) {
  const int n1 = chart.n1;
  const int n2 = chart.n2;
  const int n = n1 + n2;
  const auto dim = jet.jacobian.rows();
  const AmbientModel& model = chart.ambient;

  AdaptedFrameReport report;
  report.induced_metric = jet.jacobian.transpose() * jet.jacobian;
  {
    const Mat g = report.induced_metric;
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    double mixed = 0.0;
    for (int a = 0; a < n1; ++a)
      for (int b = n1; b < n; ++b) mixed = std::max(mixed, std::abs(g(a, b)));
    report.residuals.warped_block = mixed / scale;
  }

  const Mat base_span = n1 > 0 ? gram_schmidt(Mat(jet.jacobian.leftCols(n1))).vectors
                               : Mat(dim, 0);
  Mat dt;
  if (chart.cr) {
    report.residuals.dt_j_closure = j_closure(base_span, model);
    if (report.residuals.dt_j_closure > tol.frame)
      throw CRViolation("D_T is not J-invariant (residual " +
                        std::to_string(report.residuals.dt_j_closure) + ")");
    dt = n1 > 0 ? j_paired_basis(base_span, model) : Mat(dim, 0);
  } else {
    dt = base_span;
  }

  // Fiber directions, orthogonalized against D_T in coordinate order.
  Mat tangent(dim, n);
  tangent.leftCols(n1) = dt;
  for (int A = 0; A < n2; ++A) {
    Vec w = jet.jacobian.col(n1 + A);
    for (int pass = 0; pass < 2; ++pass)
      w -= tangent.leftCols(n1 + A) * (tangent.leftCols(n1 + A).transpose() * w);
    const double norm = w.norm();
    if (!(norm > kImmersionFloor)) throw NotImmersed("fiber direction collapsed");
    tangent.col(n1 + A) = w / norm;
  }

  Mat normals(dim, 0);
  if (chart.cr) {
    double worst = 0.0;
    for (int A = 0; A < n2; ++A) {
      const Vec jv = model.apply_j(Vec(tangent.col(n1 + A)));
      worst = std::max(worst, (tangent.transpose() * jv).cwiseAbs().maxCoeff());
    }
    report.residuals.dperp_j_normality = worst;
    if (worst > tol.frame)
      throw CRViolation("J D_perp is not normal (residual " + std::to_string(worst) + ")");
    const int nu = static_cast<int>(dim) - n1 - 2 * n2;
    if (nu < 0) throw CRViolation("normal bundle too small for J D_perp");

    Mat jd = n2 > 0 ? gram_schmidt(Mat(model.apply_j(Mat(tangent.rightCols(n2))))).vectors
                    : Mat(dim, 0);
    Mat known(dim, n + n2);
    known << tangent, jd;
    Mat nu_basis(dim, 0);
    if (nu > 0) {
      const Mat rest = orthogonal_complement(known);
      report.residuals.normal_split = j_closure(rest, model);
      if (report.residuals.normal_split > tol.frame)
        throw CRViolation("nu is not J-invariant (residual " +
                          std::to_string(report.residuals.normal_split) + ")");
      nu_basis = j_paired_basis(rest, model);
    }
    normals.resize(dim, n2 + nu);
    normals << jd, nu_basis;
    report.jdperp_count = static_cast<std::size_t>(n2);
    report.nu_count = static_cast<std::size_t>(nu);
  } else {
    normals = orthogonal_complement(tangent);
    report.nu_count = static_cast<std::size_t>(normals.cols());
  }

  report.frame.vectors.resize(dim, dim);
  report.frame.vectors << tangent, normals;
  report.frame.dt = static_cast<std::size_t>(n1);
  report.frame.dperp = static_cast<std::size_t>(n2);
  report.frame.orthonormal = true;
  report.residuals.orthonormality = report.frame.orthonormality_defect();

  // e_i = Jac * E_i, solved through the metric.
  report.tangent_coefficients =
      report.induced_metric.ldlt().solve(jet.jacobian.transpose() * tangent);
  return report;
}

AdaptedFrameReport adapt_frame(const ImmersionChart& chart,
                               std::span<const double> point,
                               const Tolerances& tol) {
  return adapt_frame(chart, jet_evaluate(chart, point), tol);
}

SecondFundamentalForm second_fundamental_form(const ChartJet& jet,
                                              const AdaptedFrameReport& frame) {
  const auto n = static_cast<int>(frame.frame.tangent_dim());
  const Mat normals = frame.normals();
  const Mat& e = frame.tangent_coefficients;
  std::vector<Mat> slices;
  slices.reserve(static_cast<std::size_t>(normals.cols()));
  for (Eigen::Index r = 0; r < normals.cols(); ++r) {
    Mat acc = Mat::Zero(n, n);
    for (std::size_t c = 0; c < jet.hessians.size(); ++c)
      acc += normals(static_cast<Eigen::Index>(c), r) * jet.hessians[c];
    slices.push_back(e.transpose() * acc * e);
  }
  return {n, std::move(slices)};
}

SecondFundamentalForm second_fundamental_form(const ImmersionChart& chart,
                                              std::span<const double> point,
                                              const AdaptedFrameReport& frame) {
  return second_fundamental_form(jet_evaluate(chart, point), frame);
}

std::vector<Mat> base_christoffel(const ChartJet& jet, int n1) {
  const Mat jb = jet.jacobian.leftCols(n1);
  const Mat g = jb.transpose() * jb;
  const Mat g_inv = g.ldlt().solve(Mat::Identity(n1, n1));
  // first[l](a, b) = <d_ab F, d_l F>
  std::vector<Mat> first(static_cast<std::size_t>(n1), Mat::Zero(n1, n1));
  for (int a = 0; a < n1; ++a)
    for (int b = 0; b < n1; ++b) {
      const Vec dab = jet.second_derivative(a, b);
      for (int l = 0; l < n1; ++l)
        first[static_cast<std::size_t>(l)](a, b) = dab.dot(jb.col(l));
    }
  std::vector<Mat> out(static_cast<std::size_t>(n1), Mat::Zero(n1, n1));
  for (int k = 0; k < n1; ++k)
    for (int l = 0; l < n1; ++l)
      out[static_cast<std::size_t>(k)] += g_inv(k, l) * first[static_cast<std::size_t>(l)];
  return out;
}

WarpData chart_warp_data(const ImmersionChart& chart, const ChartJet& jet) {
  if (!chart.warp) {
    WarpData unit;
    unit.grad_f = Vec::Zero(chart.n1);
    return unit;
  }
  const Mat jb = jet.jacobian.leftCols(chart.n1);
  const std::span<const double> base(jet.point.data(), static_cast<std::size_t>(chart.n1));
  return grad_laplacian(*chart.warp, base, jb.transpose() * jb,
                        base_christoffel(jet, chart.n1));
}

ExtrinsicPoint extrinsic_point(const ImmersionChart& chart,
                               std::span<const double> point,
                               const Tolerances& tol) {
  const ChartJet jet = jet_evaluate(chart, point);
  const AdaptedFrameReport frame = adapt_frame(chart, jet, tol);
  ExtrinsicPoint out;
  out.n1 = chart.n1;
  out.n2 = chart.n2;
  out.cr = chart.cr;
  out.ambient = chart.ambient;
  out.tangent = frame.tangent();
  out.h = second_fundamental_form(jet, frame);
  out.warp = chart_warp_data(chart, jet);
  out.base_curvature = chart.base_curvature;
  out.fiber_curvature = chart.fiber_curvature;
  return out;
}

}  // namespace crwarp
