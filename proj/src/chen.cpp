#include "crwarp/chen.hpp"

#include "crwarp/ambient.hpp"
#include "crwarp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace crwarp {

namespace {

double binomial2(int n) { return 0.5 * n * (n - 1); }

void require_even(int n1) {
  if (n1 % 2 != 0)
    throw ParityError("holomorphic factor dimension n1 = " + std::to_string(n1) +
                      " is odd");
}

// sum_r of squares of h^r(i, j) over the normal index, as a vector norm.
double normal_norm(const SecondFundamentalForm& h, int i, int j) {
  double s = 0.0;
  for (int r = 0; r < h.normal_dim(); ++r) s += h(r, i, j) * h(r, i, j);
  return std::sqrt(s);
}

double sq(double x) { return x * x; }

double block_trace(const SecondFundamentalForm& h, int r, const std::vector<int>& idx) {
  double s = 0.0;
  for (int i : idx) s += h(r, i, i);
  return s;
}

std::vector<int> tail(const std::vector<int>& v) {
  return v.size() > 2 ? std::vector<int>(v.begin() + 2, v.end()) : std::vector<int>{};
}

std::vector<int> concat(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// sum_{i != j in idx} (h^r_ij)^2 and sum_{i, j in idx} (h^r_ij)^2.
double off_sq(const SecondFundamentalForm& h, int r, const std::vector<int>& idx) {
  double s = 0.0;
  for (int i : idx)
    for (int j : idx)
      if (i != j) s += sq(h(r, i, j));
  return s;
}

double all_sq(const SecondFundamentalForm& h, int r, const std::vector<int>& idx) {
  double s = 0.0;
  for (int i : idx)
    for (int j : idx) s += sq(h(r, i, j));
  return s;
}

double cross_sq(const SecondFundamentalForm& h, int r, const std::vector<int>& a,
                const std::vector<int>& b) {
  double s = 0.0;
  for (int i : a)
    for (int j : b) s += sq(h(r, i, j));
  return s;
}

void check_blocks(const SecondFundamentalForm& h, const IndexBlocks& blocks) {
  if (blocks.p.size() < 2) throw DimensionMismatch("block P needs at least two indices");
  if (static_cast<int>(blocks.p.size() + blocks.q.size()) != h.n())
    throw DimensionMismatch("index blocks do not cover the tangent indices");
  if (h.normal_dim() < 1) throw DimensionMismatch("no normal directions");
}

}  // namespace

// ---------------------------------------------------------------------------

double partial_scalar(const PlaneFunctional& curv, const Frame& subspace) {
  const auto k = subspace.size();
  if (k < 2) throw DegenerateInput("partial scalar curvature needs dim >= 2");
  double tau = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) tau += curv(PlaneSpec{subspace[i], subspace[j]});
  return tau;
}

DeltaResult delta_invariant(const PlaneFunctional& curv, const Frame& subspace,
                            const PlaneSearchBudget& budget, std::uint64_t seed) {
  DeltaResult out;
  out.tau = partial_scalar(curv, subspace);
  out.minimum = min_over_planes(curv, subspace, budget, seed);
  out.delta = subspace.size() == 2 ? 0.0 : out.tau - out.minimum.value;
  return out;
}

TildeTau tilde_tau_cr(int n1, int n2, double c) {
  require_even(n1);
  if (n1 < 0 || n2 < 0) throw DimensionMismatch("negative dimension");
  const int n = n1 + n2;
  const double q = c / 8.0;
  return {q * (n * (n - 1) + 3 * n1), q * n1 * (n1 + 2), q * n2 * (n2 - 1)};
}

double fundamental_identity_residual(double tau, double h_mean_norm_sq,
                                     double h_norm_sq, int n1, int n2, double c) {
  const int n = n1 + n2;
  return std::abs(n * n * h_mean_norm_sq -
                  (2.0 * tau + h_norm_sq - 0.25 * c * (n * (n - 1) + 3 * n1)));
}

CoefficientIdentities coeff_identities(int n1, int n2) {
  require_even(n1);
  if (n1 < 2 || n2 < 1) throw DegenerateInput("coefficient identities need n1 >= 2, n2 >= 1");
  const long long a = n1;
  const long long b = n2;
  const long long n = a + b;
  return {n * (n - 1) + 3 * a - b * (b - 1), a * (a + 2 * b + 2),
          n * (n - 1) + 3 * a - a * (a + 2), b * (b + 2 * a - 1)};
}

// ---------------------------------------------------------------------------

InequalityValues inequality_i(const InequalityInputs& in, double kmin_nt) {
  if (in.n1 < 2) throw DegenerateInput("inequality (i) needs n1 >= 2");
  const int n = in.n1 + in.n2;
  InequalityValues v;
  v.lhs = in.delta_hat;
  v.rhs = 0.5 * n * n * in.h_mean_norm_sq - in.warp_term +
          0.5 * in.n1 * (in.n1 + 2 * in.n2 + 2) * 0.25 * in.c - kmin_nt;
  v.slack = v.rhs - v.lhs;
  return v;
}

InequalityII inequality_ii(const InequalityInputs& in,
                           const std::optional<WarpData>& warp,
                           std::optional<double> delta_intrinsic) {
  if (in.n2 < 2) throw DegenerateInput("inequality (ii) needs n2 >= 2");
  const int n = in.n1 + in.n2;
  InequalityII out;
  out.leafwise.lhs = in.delta_hat;
  out.leafwise.rhs = 0.5 * n * n * in.h_mean_norm_sq - in.warp_term +
                     0.5 * in.n2 * (in.n2 + 2 * in.n1 - 1) * 0.25 * in.c - 0.25 * in.c;
  out.leafwise.slack = out.leafwise.rhs - out.leafwise.lhs;
  if (warp) {
    const double f2 = warp->f * warp->f;
    const double correction = (binomial2(in.n2) - 1.0) * warp->grad_norm_sq;
    InequalityValues intr;
    intr.lhs = delta_intrinsic ? *delta_intrinsic
                               : bo_delta_transfer_inverse(in.delta_hat, *warp, in.n2);
    intr.rhs = f2 * out.leafwise.rhs + correction;
    intr.slack = intr.rhs - intr.lhs;
    out.intrinsic = intr;
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string to_string(Version v) { return v == Version::kI ? "i" : "ii"; }

IndexBlocks index_blocks(int n1, int n2, Version version) {
  IndexBlocks b;
  std::vector<int> dt(static_cast<std::size_t>(n1));
  std::vector<int> dperp(static_cast<std::size_t>(n2));
  std::iota(dt.begin(), dt.end(), 0);
  std::iota(dperp.begin(), dperp.end(), n1);
  if (version == Version::kI) {
    b.p = std::move(dt);
    b.q = std::move(dperp);
  } else {
    b.p = std::move(dperp);
    b.q = std::move(dt);
  }
  return b;
}

std::array<double, 7> theta_groups(const SecondFundamentalForm& h,
                                   const IndexBlocks& blocks) {
  check_blocks(h, blocks);
  const int p1 = blocks.p[0];
  const int p2 = blocks.p[1];
  const auto rest = tail(blocks.p);
  const auto others = concat(rest, blocks.q);
  const int k = static_cast<int>(blocks.p.size());
  const int normals = h.normal_dim();

  std::array<double, 7> g{};
  g[0] = k > 1 ? sq(block_trace(h, 0, blocks.p)) / (2.0 * (k - 1)) : 0.0;
  for (int r = 0; r < normals; ++r) {
    g[1] += 0.5 * sq(block_trace(h, r, blocks.q));
    if (r >= 1) g[2] += 0.5 * sq(h(r, p1, p1) + h(r, p2, p2));
    for (int j : others) g[3] += sq(h(r, p1, j)) + sq(h(r, p2, j));
    if (r >= 1) g[5] += 0.5 * all_sq(h, r, rest);
    g[6] += cross_sq(h, r, rest, blocks.q);
  }
  g[4] = 0.5 * off_sq(h, 0, rest);
  return g;
}

double theta(const SecondFundamentalForm& h, const IndexBlocks& blocks) {
  const auto g = theta_groups(h, blocks);
  return std::accumulate(g.begin(), g.end(), 0.0);
}

double theta(const SecondFundamentalForm& h, int n1, Version version) {
  return theta(h, index_blocks(n1, h.n() - n1, version));
}

double upsilon(const SecondFundamentalForm& h, double tau, int n1,
               const IndexBlocks& blocks, double c) {
  const int k = static_cast<int>(blocks.p.size());
  if (k < 2) throw DegenerateInput("Upsilon needs a factor of dimension >= 2");
  const int n = h.n();
  const double sp = block_trace(h, 0, blocks.p);
  const double sq_ = block_trace(h, 0, blocks.q);
  return 2.0 * tau - (static_cast<double>(k - 2) / (k - 1)) * sp * sp - sq_ * sq_ -
         2.0 * sp * sq_ - 0.25 * c * (n * (n - 1) + 3 * n1);
}

double upsilon_closure_residual(const SecondFundamentalForm& h, double ups,
                                const IndexBlocks& blocks) {
  const int k = static_cast<int>(blocks.p.size());
  const double sp = block_trace(h, 0, blocks.p);
  return std::abs(sp * sp - (k - 1) * (ups + h.norm_sq()));
}

Lemma1Result lemma1_check(std::span<const double> alphas, double beta,
                          double tol_exact) {
  Lemma1Result out;
  const auto n = alphas.size();
  if (n < 2) throw DegenerateInput("Lemma 1 needs at least two numbers");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double a : alphas) {
    sum += a;
    sum_sq += a * a;
  }
  out.constraint_residual =
      std::abs(sum * sum - static_cast<double>(n - 1) * (sum_sq + beta));
  out.slack = 2.0 * alphas[0] * alphas[1] - beta;
  out.equality = true;
  for (std::size_t a = 2; a < n; ++a)
    if (std::abs(alphas[0] + alphas[1] - alphas[a]) > tol_exact) out.equality = false;
  return out;
}

std::pair<std::vector<double>, double> lemma1_instance(
    const SecondFundamentalForm& h, double ups, const IndexBlocks& blocks) {
  std::vector<double> alphas;
  for (int p : blocks.p) alphas.push_back(h(0, p, p));
  double beta = ups;
  for (int q : blocks.q) beta += sq(h(0, q, q));
  for (int i = 0; i < h.n(); ++i)
    for (int j = 0; j < h.n(); ++j)
      if (i != j) beta += sq(h(0, i, j));
  for (int r = 1; r < h.normal_dim(); ++r) beta += h.slice(r).squaredNorm();
  return {std::move(alphas), beta};
}

std::string to_string(LemmaKind kind) {
  switch (kind) {
    case LemmaKind::kLemma2:
      return "lemma2";
    case LemmaKind::kLemma3:
      return "lemma3";
    case LemmaKind::kLemma3Literal:
      return "lemma3-literal";
  }
  return "lemma2";
}

double lemma_identity_residual(LemmaKind kind, const SecondFundamentalForm& h,
                               const IndexBlocks& blocks) {
  check_blocks(h, blocks);
  const int i1 = blocks.p[0];
  const int i2 = blocks.p[1];
  const auto pr = tail(blocks.p);         // {3..n1}
  const auto rest = concat(pr, blocks.q);  // {3..n}
  std::vector<int> all(static_cast<std::size_t>(h.n()));
  std::iota(all.begin(), all.end(), 0);
  const int normals = h.normal_dim();

  double lhs = 0.0;
  double rhs = 0.0;
  if (kind == LemmaKind::kLemma2) {
    lhs += 0.5 * off_sq(h, 0, all);
    rhs += 0.5 * off_sq(h, 0, rest);
    for (int r = 0; r < normals; ++r) {
      if (r >= 1) {
        lhs += 0.5 * all_sq(h, r, all) + h(r, i1, i1) * h(r, i2, i2);
        rhs += 0.5 * all_sq(h, r, rest) + 0.5 * sq(h(r, i1, i1) + h(r, i2, i2));
      }
      lhs -= sq(h(r, i1, i2));
      for (int j : rest) rhs += sq(h(r, i1, j)) + sq(h(r, i2, j));
    }
    return std::abs(lhs - rhs);
  }

  lhs += 0.5 * off_sq(h, 0, rest);
  rhs += 0.5 * off_sq(h, 0, pr) + 0.5 * off_sq(h, 0, blocks.q);
  for (int r = 0; r < normals; ++r) {
    if (r >= 1) {
      lhs += 0.5 * all_sq(h, r, rest);
      rhs += 0.5 * all_sq(h, r, pr) + 0.5 * all_sq(h, r, blocks.q);
    }
    for (int j : rest) lhs += sq(h(r, i1, j)) + sq(h(r, i2, j));
    for (int a : pr) rhs += sq(h(r, i1, a)) + sq(h(r, i2, a));
    if (kind == LemmaKind::kLemma3)
      for (int A : blocks.q) rhs += sq(h(r, i1, A)) + sq(h(r, i2, A));
    rhs += cross_sq(h, r, pr, blocks.q);
  }
  return std::abs(lhs - rhs);
}

// ---------------------------------------------------------------------------

double EqualityClassification::magnitude(const std::string& name) const {
  for (const auto& [n, v] : measures)
    if (n == name) return v;
  return 0.0;
}

EqualityClassification equality_classify(const SecondFundamentalForm& h,
                                         int n1, Version version,
                                         double ambient_gap,
                                         const Tolerances& tol) {
  const IndexBlocks blocks = index_blocks(n1, h.n() - n1, version);
  check_blocks(h, blocks);
  const int p1 = blocks.p[0];
  const int p2 = blocks.p[1];
  const auto rest = tail(blocks.p);
  const int normals = h.normal_dim();

  auto trace_norm = [&](const std::vector<int>& idx) {
    double s = 0.0;
    for (int r = 0; r < normals; ++r) s += sq(block_trace(h, r, idx));
    return std::sqrt(s);
  };

  double mixed = 0.0;
  for (int p : blocks.p)
    for (int q : blocks.q) mixed = std::max(mixed, normal_norm(h, p, q));
  const auto& dt = version == Version::kI ? blocks.p : blocks.q;
  const auto& dperp = version == Version::kI ? blocks.q : blocks.p;
  const double dt_trace = trace_norm(dt);
  const double dperp_trace = trace_norm(dperp);

  double pi_trace = 0.0;
  for (int r = 0; r < normals; ++r) pi_trace += sq(h(r, p1, p1) + h(r, p2, p2));
  pi_trace = std::sqrt(pi_trace);

  double coupling = 0.0;
  double residual = 0.0;
  double lemma1 = 0.0;
  for (int a : rest) {
    coupling = std::max({coupling, normal_norm(h, p1, a), normal_norm(h, p2, a)});
    for (int b : rest) residual = std::max(residual, normal_norm(h, a, b));
    lemma1 = std::max(lemma1, std::abs(h(0, p1, p1) + h(0, p2, p2) - h(0, a, a)));
  }

  EqualityClassification out;
  out.mu1 = h(0, p1, p1);
  out.measures = {
      {"mixed block", mixed},
      {"D_T trace", dt_trace},
      {"D_perp trace", dperp_trace},
      {"pi* trace", pi_trace},
      {"pi* coupling", coupling},
      {"residual block", residual},
      {"lemma-1 equality", lemma1},
      {"ambient minimum (E1)", std::abs(ambient_gap)},
  };
  for (const auto& [name, value] : out.measures) {
    const double limit = name == "ambient minimum (E1)" ? tol.opt : tol.identity;
    if (!(value <= limit)) out.violations.emplace_back(name, value);
  }
  out.mixed_tg = mixed <= tol.identity;
  out.dt_minimal = dt_trace <= tol.identity;
  out.dperp_minimal = dperp_trace <= tol.identity;
  out.lemma1_equality = lemma1 <= tol.identity;
  out.ambient_minimum = std::abs(ambient_gap) <= tol.opt;
  out.is_equality = out.violations.empty();
  return out;
}

// ---------------------------------------------------------------------------

ExtrinsicPoint adapt_to_plane(const ExtrinsicPoint& point, Version version,
                              const PlaneSpec& plane) {
  const int n = point.n();
  const IndexBlocks blocks = index_blocks(point.n1, point.n2, version);
  const auto k = static_cast<Eigen::Index>(blocks.p.size());
  // Inside the plane, start from the projection of the old first P vector
  // so that entries such as mu1 keep their meaning.
  Vec u = plane.u;
  Vec v = plane.v;
  const double a = u[blocks.p[0]];
  const double b = v[blocks.p[0]];
  const double rho = std::hypot(a, b);
  if (rho > 1e-12) {
    const Vec u2 = (a * u + b * v) / rho;
    Vec v2 = (-b * u + a * v) / rho;
    if (v2[blocks.p[1]] < 0.0) v2 = -v2;
    u = u2;
    v = v2;
  }
  Mat pair(k, 2);
  for (Eigen::Index i = 0; i < k; ++i) {
    pair(i, 0) = u[blocks.p[static_cast<std::size_t>(i)]];
    pair(i, 1) = v[blocks.p[static_cast<std::size_t>(i)]];
  }
  Mat local(k, k);
  local.leftCols(2) = pair;
  if (k > 2) local.rightCols(k - 2) = orthogonal_complement(pair);

  Mat rot = Mat::Identity(n, n);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      rot(blocks.p[static_cast<std::size_t>(i)], blocks.p[static_cast<std::size_t>(j)]) =
          local(i, j);

  const int normals = point.h.normal_dim();
  Mat nrot = Mat::Identity(normals, normals);
  const MeanCurvature mean = mean_curvature(point.h);
  if (normals > 0 && mean.vector.norm() > 1e-14)
    nrot = rotation_with_first_column(mean.vector);
  return point.rotated(rot, nrot);
}

Mat ricci_form(const ExtrinsicPoint& point) {
  const int n = point.n();
  const Mat& e = point.tangent;
  Mat ric = Mat::Zero(n, n);
  const auto& h = point.h;
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        s += csf_curvature(e.col(i), e.col(j), e.col(k), e.col(i), point.ambient);
        for (int r = 0; r < h.normal_dim(); ++r)
          s += h(r, i, i) * h(r, j, k) - h(r, i, k) * h(r, i, j);
      }
      ric(j, k) = s;
      ric(k, j) = s;
    }
  return ric;
}

namespace {

VersionReport evaluate_version(const ExtrinsicPoint& point, Version version,
                               const InvariantReport& base,
                               const EvaluationOptions& options) {
  const Tolerances& tol = options.tol;
  const IndexBlocks blocks = index_blocks(point.n1, point.n2, version);
  const Frame factor = version == Version::kI ? point.dt_frame() : point.dperp_frame();
  const std::uint64_t seed = options.seed + (version == Version::kI ? 0u : 1u);

  VersionReport v;
  v.version = version;
  const PlaneFunctional curv = [&](const PlaneSpec& p) { return point.sectional(p.u, p.v); };
  const DeltaResult delta = delta_invariant(curv, factor, options.budget, seed);
  v.delta_hat = delta.delta;
  v.tau_factor = delta.tau;
  v.pi_star = delta.minimum;

  Frame embedded;
  embedded.vectors = point.tangent * factor.vectors;
  embedded.orthonormal = true;
  const PlaneFunctional ambient = [&](const PlaneSpec& p) {
    return point.ambient_sectional(p.u, p.v);
  };
  v.kmin_sampled = min_over_planes(ambient, factor, options.budget, seed + 2).value;
  const auto closed = kmin_closed_form(embedded, point.ambient, tol.frame);
  v.kmin = closed ? *closed : v.kmin_sampled;
  v.kmin_source = closed ? "closed-form" : "sampled";
  v.ambient_pi_star = point.ambient_sectional(v.pi_star.argmin.u, v.pi_star.argmin.v);

  InequalityInputs in;
  in.n1 = point.n1;
  in.n2 = point.n2;
  in.c = point.ambient.c();
  in.h_mean_norm_sq = base.h_mean_norm_sq;
  in.warp_term = base.warp_term;
  in.delta_hat = v.delta_hat;
  double gap = 0.0;
  if (version == Version::kI) {
    v.inequality = inequality_i(in, v.kmin);
    gap = v.ambient_pi_star - v.kmin;
  } else {
    const InequalityII ii = inequality_ii(in, base.warp, base.delta_nperp_intrinsic);
    v.inequality = ii.leafwise;
    v.intrinsic = ii.intrinsic;
    gap = v.ambient_pi_star - 0.25 * in.c;
  }

  const ExtrinsicPoint adapted = adapt_to_plane(point, version, v.pi_star.argmin);
  v.theta_groups = theta_groups(adapted.h, blocks);
  v.theta = std::accumulate(v.theta_groups.begin(), v.theta_groups.end(), 0.0);
  v.upsilon = upsilon(adapted.h, base.tau_m, point.n1, blocks, in.c);
  v.upsilon_closure = upsilon_closure_residual(adapted.h, v.upsilon, blocks);
  const auto [alphas, beta] = lemma1_instance(adapted.h, v.upsilon, blocks);
  v.lemma1 = lemma1_check(alphas, beta, tol.exact);
  v.chain_residual =
      std::abs(v.inequality.slack - (v.theta + 0.5 * v.lemma1.slack + gap));
  v.equality = equality_classify(adapted.h, point.n1, version, gap, tol);
  return v;
}

}  // namespace

InvariantReport evaluate_point(const ExtrinsicPoint& point,
                               const EvaluationOptions& options) {
  const int n1 = point.n1;
  const int n2 = point.n2;
  const int n = point.n();
  InvariantReport rep;
  rep.n1 = n1;
  rep.n2 = n2;
  rep.n = n;
  rep.c = point.ambient.c();
  rep.cr = point.cr;

  Mat k = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) k(i, j) = k(j, i) = point.sectional(i, j);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      rep.tau_m += k(i, j);
      if (j < n1) rep.tau_nt += k(i, j);
      if (i >= n1) rep.tau_nperp += k(i, j);
      if (i < n1 && j >= n1) rep.mixed_sum += k(i, j);
    }
  rep.h_norm_sq = point.h.norm_sq();
  rep.h_mean_norm_sq = mean_curvature(point.h).norm_sq;
  if (point.cr) {
    rep.tilde_tau = tilde_tau_cr(n1, n2, rep.c);
    rep.fundamental_identity = fundamental_identity_residual(
        rep.tau_m, rep.h_mean_norm_sq, rep.h_norm_sq, n1, n2, rep.c);
  }

  rep.warp = point.warp;
  if (point.warp) {
    rep.warp_term = point.warp->warp_term(n2);
    rep.warp_term_source = "warp data";
    rep.warp_identity = warp_identity_residual(
        k.block(0, n1, n1, n2), *point.warp, n2);
  } else {
    rep.warp_term = rep.mixed_sum;
    rep.warp_term_source = "mixed curvatures";
  }

  if (point.warp && point.fiber_curvature && n2 >= 2) {
    const double expected = bo_fiber_sectional(*point.warp, *point.fiber_curvature);
    double worst = 0.0;
    for (int a = n1; a < n; ++a)
      for (int b = a + 1; b < n; ++b) worst = std::max(worst, std::abs(k(a, b) - expected));
    rep.fiber_bo_residual = worst;
  }
  if (point.base_curvature && n1 >= 2) {
    double worst = 0.0;
    for (int a = 0; a < n1; ++a)
      for (int b = a + 1; b < n1; ++b)
        worst = std::max(worst, std::abs(k(a, b) - *point.base_curvature));
    rep.leaf_geodesy_residual = worst;
    rep.delta_nt_intrinsic =
        n1 == 2 ? 0.0 : *point.base_curvature * (binomial2(n1) - 1.0);
  }
  if (point.fiber_curvature && n2 >= 2)
    rep.delta_nperp_intrinsic =
        n2 == 2 ? 0.0 : *point.fiber_curvature * (binomial2(n2) - 1.0);

  if (point.cr && n1 >= 2) rep.version_i = evaluate_version(point, Version::kI, rep, options);
  if (point.cr && n2 >= 2) {
    rep.version_ii = evaluate_version(point, Version::kII, rep, options);
    if (rep.delta_nperp_intrinsic && point.warp)
      rep.delta_nperp_transfer_residual =
          std::abs(bo_delta_transfer(*rep.delta_nperp_intrinsic, *point.warp, n2) -
                   rep.version_ii->delta_hat);
  }

  const Eigen::SelfAdjointEigenSolver<Mat> eig(ricci_form(point), Eigen::EigenvaluesOnly);
  rep.ricci_max_eig = n > 0 ? eig.eigenvalues().maxCoeff() : 0.0;
  return rep;
}

CorollaryCheck corollary_minimal_check(const InvariantReport& report, double tol) {
  CorollaryCheck out;
  out.ricci_max_eig = report.ricci_max_eig;
  out.not_minimal = report.h_mean_norm_sq > tol;
  const double c4 = 0.25 * report.c;
  const int n1 = report.n1;
  const int n2 = report.n2;
  if (report.version_i) {
    const auto& v = *report.version_i;
    const double delta_nt = report.delta_nt_intrinsic.value_or(v.delta_hat);
    const double bound = 0.5 * n1 * (n1 + 2 * n2 + 2) * c4 - v.kmin;
    out.cond_i = delta_nt + report.warp_term - bound;
  }
  if (report.version_ii) {
    const auto& v = *report.version_ii;
    const double bound = 0.5 * n2 * (n2 + 2 * n1 - 1) * c4 - c4;
    out.cond_ii = v.delta_hat + report.warp_term - bound;
    if (report.warp) {
      const auto& w = *report.warp;
      const double f2 = w.f * w.f;
      const double delta = report.delta_nperp_intrinsic
                               ? *report.delta_nperp_intrinsic
                               : bo_delta_transfer_inverse(v.delta_hat, w, n2);
      out.cond_ii_intrinsic = delta + f2 * report.warp_term -
                              (f2 * bound + (binomial2(n2) - 1.0) * w.grad_norm_sq);
    }
  }
  return out;
}

InequalityValues chen_original(double tau, double h_mean_norm_sq, int n, double c,
                               double kmin) {
  if (n < 3) throw DegenerateInput("the classical inequality needs n >= 3");
  InequalityValues v;
  v.lhs = tau - kmin;
  v.rhs = n * n * (n - 2.0) / (2.0 * (n - 1)) * h_mean_norm_sq +
          0.5 * (n + 1) * (n - 2) * c;
  v.slack = v.rhs - v.lhs;
  return v;
}

InequalityValues chen_original(const ExtrinsicPoint& point,
                               const EvaluationOptions& options) {
  if (point.ambient.c() != 0.0)
    throw DomainError("classical check needs a flat ambient");
  const int n = point.n();
  if (n < 3) throw DegenerateInput("the classical inequality needs n >= 3");
  const PlaneFunctional curv = [&](const PlaneSpec& p) { return point.sectional(p.u, p.v); };
  const Frame all = point.tangent_subframe(0, n);
  const double tau = partial_scalar(curv, all);
  const double kmin = min_over_planes(curv, all, options.budget, options.seed).value;
  return chen_original(tau, mean_curvature(point.h).norm_sq, n, 0.0, kmin);
}

// ---------------------------------------------------------------------------

Mat default_tangent_embedding(int n1, int n2, int m, bool split_dt) {
  require_even(n1);
  const int slots = n1 / 2;
  if (slots + n2 > m)
    throw DimensionMismatch("C^m too small for the tangent embedding (need m >= n1/2 + n2)");
  Mat e = Mat::Zero(2 * m, n1 + n2);
  for (int a = 0; a < slots; ++a) {
    if (split_dt) {
      e(2 * a, a) = 1.0;
      e(2 * a + 1, slots + a) = 1.0;
    } else {
      e(2 * a, 2 * a) = 1.0;
      e(2 * a + 1, 2 * a + 1) = 1.0;
    }
  }
  for (int A = 0; A < n2; ++A) e(2 * (slots + A), n1 + A) = 1.0;
  return e;
}

ExtrinsicPoint synthetic_point(int n1, int n2, double c, int m,
                               SecondFundamentalForm h, std::optional<Mat> tangent,
                               std::optional<WarpData> warp) {
  require_even(n1);
  const int n = n1 + n2;
  if (h.n() != n) throw DimensionMismatch("h has tangent dimension " + std::to_string(h.n()) +
                                          ", expected n1 + n2 = " + std::to_string(n));
  if (h.normal_dim() != 2 * m - n)
    throw DimensionMismatch("h has " + std::to_string(h.normal_dim()) +
                            " normal slices, expected 2m - n = " + std::to_string(2 * m - n));
  ExtrinsicPoint p;
  p.n1 = n1;
  p.n2 = n2;
  p.ambient = AmbientModel(c, m);
  if (tangent) {
    if (tangent->rows() != 2 * m || tangent->cols() != n)
      throw DimensionMismatch("tangent frame must be 2m x n");
    Frame f;
    f.vectors = *tangent;
    if (f.orthonormality_defect() > kDefaultTolerances.frame)
      throw DegenerateInput("tangent frame is not orthonormal");
    p.tangent = *tangent;
  } else {
    p.tangent = default_tangent_embedding(n1, n2, m);
  }
  p.h = std::move(h);
  p.warp = std::move(warp);
  return p;
}

}  // namespace crwarp
