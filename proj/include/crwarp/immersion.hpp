#pragma once

#include "crwarp/ambient.hpp"
#include "crwarp/expr.hpp"
#include "crwarp/extrinsic.hpp"
#include "crwarp/linalg.hpp"
#include "crwarp/tolerances.hpp"
#include "crwarp/warped.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace crwarp {

/// Per-coordinate closed interval; an empty box means unbounded.
struct CoordinateBox {
  std::vector<double> lower;
  std::vector<double> upper;

  bool contains(std::span<const double> point) const;
};

/// Parametrization of N_T x_f N_perp into flat C^m. The first n1
/// coordinates belong to the base, the remaining n2 to the fiber. Component
/// k of the 2m-vector is the real (k even) or imaginary (k odd) part of
/// complex slot k/2.
struct ImmersionChart {
  std::string name;
  int n1 = 0;
  int n2 = 0;
  bool cr = true;  // false: no D_T / D_perp checks (warped structure only)
  std::vector<std::string> coordinates;
  std::vector<dsl::Expr> components;
  std::optional<dsl::Expr> warp;  // over the base coordinates; f = 1 if absent
  CoordinateBox domain;
  AmbientModel ambient{0.0, 1};
  std::optional<double> base_curvature;
  std::optional<double> fiber_curvature;

  int n() const { return n1 + n2; }
  int m() const { return ambient.m(); }
};

/// Parse component and warp sources. Throws ParseError / UnknownVariable,
/// DimensionMismatch for an odd component count or wrong coordinate count.
ImmersionChart make_chart(std::string name, int n1, int n2,
                          std::vector<std::string> coordinates,
                          const std::vector<std::string>& components,
                          const std::optional<std::string>& warp,
                          CoordinateBox domain = {}, bool cr = true);

struct ChartJet {
  std::vector<double> point;
  Vec position;               // 2m
  Mat jacobian;               // 2m x n, column i = d_i F
  std::vector<Mat> hessians;  // per component, n x n

  /// d_i d_j F as a 2m-vector.
  Vec second_derivative(int i, int j) const;
};

/// Throws DomainError outside the chart domain and NotImmersed when the
/// smallest singular value of the Jacobian is <= 1e-8.
ChartJet jet_evaluate(const ImmersionChart& chart, std::span<const double> point);

struct CRResiduals {
  double dt_j_closure = 0.0;       // max |proj_{D_T^perp} J e_a|
  double dperp_j_normality = 0.0;  // max |proj_TM J e_A|
  double normal_split = 0.0;       // J-closure defect of nu
  double warped_block = 0.0;       // max |g(d_a F, d_A F)|
  double orthonormality = 0.0;     // frame Gram defect
};

struct AdaptedFrameReport {
  /// 2m columns: D_T (J-paired), D_perp, J D_perp, nu. frame.dt = n1 and
  /// frame.dperp = n2.
  Frame frame;
  std::size_t jdperp_count = 0;
  std::size_t nu_count = 0;
  Mat tangent_coefficients;  // n x n, e_i = jacobian * column i
  Mat induced_metric;        // coordinate metric J^T J
  CRResiduals residuals;

  Mat tangent() const { return frame.block(0, frame.tangent_dim()); }
  Mat normals() const { return frame.block(frame.tangent_dim(), frame.normal_dim()); }
  Mat jdperp_basis() const { return frame.block(frame.tangent_dim(), jdperp_count); }
  Mat nu_basis() const {
    return frame.block(frame.tangent_dim() + jdperp_count, nu_count);
  }
};

/// Throws CRViolation when a CR chart fails the residual tests at tol.frame.
AdaptedFrameReport adapt_frame(const ImmersionChart& chart, const ChartJet& jet,
                               const Tolerances& tol = kDefaultTolerances);
AdaptedFrameReport adapt_frame(const ImmersionChart& chart,
                               std::span<const double> point,
                               const Tolerances& tol = kDefaultTolerances);

/// h^r_ij in the adapted frame: <(d^2 F)(e_i, e_j), normal r>.
SecondFundamentalForm second_fundamental_form(const ChartJet& jet,
                                              const AdaptedFrameReport& frame);
SecondFundamentalForm second_fundamental_form(const ImmersionChart& chart,
                                              std::span<const double> point,
                                              const AdaptedFrameReport& frame);

/// Christoffel symbols of the base metric in base coordinates:
/// result[k](a, b) = Gamma^k_ab.
std::vector<Mat> base_christoffel(const ChartJet& jet, int n1);

/// Gradient and Laplacian of the chart's warping function at the point.
WarpData chart_warp_data(const ImmersionChart& chart, const ChartJet& jet);

/// Full pointwise data for the chen module.
ExtrinsicPoint extrinsic_point(const ImmersionChart& chart,
                               std::span<const double> point,
                               const Tolerances& tol = kDefaultTolerances);

}  // namespace crwarp
