#include "crwarp/chen.hpp"
#include "crwarp/error.hpp"
#include "crwarp/gallery.hpp"
#include "crwarp/rng.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <tuple>

using namespace crwarp;

namespace {

constexpr double kPi = std::numbers::pi;

SecondFundamentalForm random_h(Rng& rng, int n, int normals, double scale = 1.0) {
  std::vector<Mat> s(static_cast<std::size_t>(normals), Mat::Zero(n, n));
  for (auto& m : s)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) m(i, j) = m(j, i) = scale * rng.normal();
  return {n, std::move(s)};
}

ExtrinsicPoint gallery(const std::string& key, std::map<std::string, double> params) {
  return extrinsic_point(gallery_chart(key), gallery_point(key, params));
}

// tau of M from scratch: ambient tensor on the embedded frame plus Gauss.
double tau_oracle(const ExtrinsicPoint& p) {
  const int n = p.n();
  double tau = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Vec u = p.tangent.col(i), v = p.tangent.col(j);
      double k = csf_curvature(u, v, v, u, p.ambient);
      for (int r = 0; r < p.h.normal_dim(); ++r) k += p.h(r, i, i) * p.h(r, j, j) - p.h(r, i, j) * p.h(r, i, j);
      tau += k;
    }
  return tau;
}

// The equality fixture: n1 = 4, n2 = 2, c = 4, D_T laid out as (x1, x2, y1, y2)
// so that the first two tangent directions span a totally real plane.
std::vector<Mat> equality_slices() {
  const int n = 6;
  std::vector<Mat> s(4, Mat::Zero(n, n));
  s[0](0, 0) = 0.7;
  s[0](1, 1) = -0.7;
  s[0](0, 1) = s[0](1, 0) = 0.3;
  s[0](4, 4) = 0.2;
  s[0](5, 5) = -0.2;
  s[0](4, 5) = s[0](5, 4) = 0.5;
  s[1](0, 0) = 0.4;
  s[1](1, 1) = -0.4;
  s[1](0, 1) = s[1](1, 0) = -0.1;
  s[1](4, 4) = 1;
  s[1](5, 5) = -1;
  s[2](0, 1) = s[2](1, 0) = 0.25;
  return s;
}

ExtrinsicPoint equality_point(const std::vector<Mat>& s) {
  return synthetic_point(4, 2, 4.0, 5, SecondFundamentalForm(6, s), default_tangent_embedding(4, 2, 5, true));
}

bool has_violation(const EqualityClassification& e, const std::string& name) {
  for (const auto& [n, m] : e.violations)
    if (n == name) return true;
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------

TEST_CASE("partial_scalar") {
  const Frame v = gram_schmidt(Mat(Mat::Identity(5, 5)));
  CHECK(partial_scalar([](const PlaneSpec&) { return 0.0; }, v) == 0.0);
  for (int k : {2, 3, 5}) {
    const Frame w = gram_schmidt(Mat(Mat::Identity(5, 5).leftCols(k)));
    CHECK(partial_scalar([](const PlaneSpec&) { return 1.5; }, w) == doctest::Approx(1.5 * k * (k - 1) / 2));
  }
  // CR tangent space n1 = 2, n2 = 1 in C^2 with c = 4
  const AmbientModel model(4.0, 2);
  const Frame t = gram_schmidt(default_tangent_embedding(2, 1, 2));
  CHECK(partial_scalar([&](const PlaneSpec& p) { return csf_sectional(p, model); }, t) == doctest::Approx(6.0));
  CHECK_THROWS_AS(partial_scalar([](const PlaneSpec&) { return 0.0; }, gram_schmidt(Mat(Mat::Identity(3, 1)))),
                  DegenerateInput);
}

TEST_CASE("delta_invariant") {
  const Frame two = gram_schmidt(Mat(Mat::Identity(4, 2)));
  CHECK(delta_invariant([](const PlaneSpec& p) { return p.u[0] + 7; }, two, {}, 1).delta == 0.0);
  const Frame three = gram_schmidt(Mat(Mat::Identity(4, 3)));
  const auto d = delta_invariant([](const PlaneSpec&) { return 0.8; }, three, {}, 1);
  CHECK(d.delta == doctest::Approx(1.6));
  CHECK(d.tau == doctest::Approx(2.4));

  // chen_c3 fiber: leaf-wise delta vanishes, so does the intrinsic one
  const auto p = gallery("chen_c3", {{"r", 1.0}});
  const auto rep = evaluate_point(p);
  REQUIRE(rep.version_ii);
  CHECK(std::abs(rep.version_ii->delta_hat) < 1e-12);
  CHECK(std::abs(bo_delta_transfer_inverse(rep.version_ii->delta_hat, *rep.warp, 2)) < 1e-12);
}

TEST_CASE("tilde_tau_cr against a direct sum of ambient curvatures") {
  auto t = tilde_tau_cr(2, 1, 4.0);
  CHECK(t.total == doctest::Approx(6.0));
  t = tilde_tau_cr(2, 2, 4.0);
  CHECK(t.nt == doctest::Approx(4.0));
  t = tilde_tau_cr(2, 2, 4.0);
  CHECK(t.nperp == doctest::Approx(1.0));
  t = tilde_tau_cr(4, 3, 0.0);
  CHECK(t.total == 0.0);
  CHECK(t.nt == 0.0);
  CHECK(t.nperp == 0.0);
  CHECK_THROWS_AS(tilde_tau_cr(3, 1, 1.0), ParityError);

  for (auto [n1, n2, m, c] : {std::tuple{2, 1, 2, 4.0}, {4, 2, 5, -3.0}, {2, 3, 6, 1.0}, {6, 1, 4, 2.0}}) {
    const AmbientModel model(c, m);
    const Mat e = default_tangent_embedding(n1, n2, m);
    const int n = n1 + n2;
    double total = 0, nt = 0, np = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const Vec u = e.col(i), v = e.col(j);
        const double k = csf_curvature(u, v, v, u, model);
        total += k;
        if (j < n1) nt += k;
        if (i >= n1) np += k;
      }
    const auto tt = tilde_tau_cr(n1, n2, c);
    CHECK(tt.total == doctest::Approx(total));
    CHECK(tt.nt == doctest::Approx(nt));
    CHECK(tt.nperp == doctest::Approx(np));
  }
}

TEST_CASE("fundamental identity") {
  CHECK(fundamental_identity_residual(0, 0, 0, 2, 2, 0.0) == 0.0);

  for (auto [r, arg, t] : {std::tuple{0.5, 0.0, 0.0}, {1.0, 1.0, 0.3}, {2.0, 2.5, -1.0}, {0.8, -0.7, 2.0}, {1.5, 3.0, 0.9}}) {
    const auto p = gallery("chen_c2", {{"r", r}, {"arg", arg}, {"t", t}});
    const auto rep = evaluate_point(p);
    const double tau = tau_oracle(p);
    CHECK(rep.tau_m == doctest::Approx(tau).epsilon(1e-12));
    double hsq = 0;
    for (const auto& s : p.h.slices()) hsq += s.squaredNorm();
    CHECK(fundamental_identity_residual(tau, rep.h_mean_norm_sq, hsq, 2, 1, 0.0) < 1e-8);
    REQUIRE(rep.fundamental_identity);
    CHECK(*rep.fundamental_identity < 1e-8);
  }

  // definitional closure on synthetic data
  Rng rng(3);
  const auto h = random_h(rng, 5, 3);
  const double c = 2.0;
  const auto mh = mean_curvature(h);
  const double tau = 0.5 * (25 * mh.norm_sq - h.norm_sq() + (c / 4) * (20 + 3 * 2));
  CHECK(fundamental_identity_residual(tau, mh.norm_sq, h.norm_sq(), 2, 3, c) < 1e-12);

  // a full synthetic point: tau from Gauss-summed curvatures
  for (auto [n1, n2, m, cc] : {std::tuple{2, 1, 3, 4.0}, {4, 2, 5, -2.0}, {2, 3, 4, 1.0}}) {
    const int n = n1 + n2;
    const auto p = synthetic_point(n1, n2, cc, m, random_h(rng, n, 2 * m - n));
    const auto rep = evaluate_point(p);
    CHECK(rep.tau_m == doctest::Approx(tau_oracle(p)).epsilon(1e-12));
    CHECK(*rep.fundamental_identity < 1e-10);
  }
}

TEST_CASE("coefficient identities") {
  auto c = coeff_identities(2, 2);
  CHECK(c.lhs_i == 16);
  CHECK(c.rhs_i == 16);
  CHECK(c.lhs_ii == 10);
  CHECK(c.rhs_ii == 10);
  c = coeff_identities(4, 3);
  CHECK(c.lhs_i == 48);
  CHECK(c.lhs_ii == 30);
  c = coeff_identities(2, 1);
  CHECK(c.lhs_i == 12);
  CHECK(c.lhs_ii == 4);
  int pairs = 0;
  for (int n1 = 2; n1 <= 10; n1 += 2)
    for (int n2 = 1; n2 <= 10; ++n2) {
      const auto x = coeff_identities(n1, n2);
      // recompute both sides here
      const long long n = n1 + n2;
      CHECK(x.lhs_i == n * (n - 1) + 3 * n1 - static_cast<long long>(n2) * (n2 - 1));
      CHECK(x.rhs_i == static_cast<long long>(n1) * (n1 + 2 * n2 + 2));
      CHECK(x.lhs_ii == n * (n - 1) + 3 * n1 - static_cast<long long>(n1) * (n1 + 2));
      CHECK(x.rhs_ii == static_cast<long long>(n2) * (n2 + 2 * n1 - 1));
      CHECK(x.holds());
      ++pairs;
    }
  CHECK(pairs == 50);
  CHECK_THROWS_AS(coeff_identities(3, 2), ParityError);
  CHECK_THROWS_AS(coeff_identities(2, 0), DegenerateInput);
  CHECK_THROWS_AS(coeff_identities(0, 2), DegenerateInput);
}

TEST_CASE("inequality (i)") {
  SUBCASE("chen_c2 at r = 1") {
    const auto rep = evaluate_point(gallery("chen_c2", {{"r", 1.0}}));
    REQUIRE(rep.version_i);
    CHECK(std::abs(rep.version_i->inequality.lhs) < 1e-12);
    CHECK(rep.version_i->inequality.rhs == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rep.version_i->inequality.slack == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_FALSE(rep.version_ii);  // n2 = 1
  }
  SUBCASE("product: equality") {
    const auto rep = evaluate_point(gallery("product", {}));
    CHECK(std::abs(rep.version_i->inequality.lhs) < 1e-12);
    CHECK(std::abs(rep.version_i->inequality.rhs) < 1e-12);
    CHECK(rep.version_i->equality.is_equality);
  }
  SUBCASE("synthetic h = 0, c = 4: the only D_T plane is holomorphic") {
    const auto rep = evaluate_point(synthetic_point(2, 2, 4.0, 3, SecondFundamentalForm::zero(4, 2)));
    CHECK(rep.version_i->kmin == doctest::Approx(4.0));
    CHECK(rep.version_i->kmin_source == "closed-form");
    // warp term here comes from the mixed curvatures: n1 n2 c/4 = 4
    CHECK(rep.warp_term == doctest::Approx(4.0));
    CHECK(std::abs(rep.version_i->inequality.rhs) < 1e-12);
    CHECK(std::abs(rep.version_i->inequality.lhs) < 1e-12);
    // with no warp contribution the same data gives rhs = 8 - 4
    const InequalityInputs in{2, 2, 4.0, 0.0, 0.0, 0.0};
    CHECK(inequality_i(in, rep.version_i->kmin).rhs == doctest::Approx(4.0));
  }
  SUBCASE("formula") {
    InequalityInputs in{4, 3, 2.0, 0.3, -0.5, 1.2};
    const auto v = inequality_i(in, 0.5);
    CHECK(v.rhs == doctest::Approx(49 / 2.0 * 0.3 + 0.5 + 4 * 12 / 2.0 * 0.5 - 0.5));
    CHECK(v.lhs == 1.2);
    CHECK(v.slack == doctest::Approx(v.rhs - v.lhs));
    in.n1 = 0;
    CHECK_THROWS_AS(inequality_i(in, 0.0), DegenerateInput);
  }
}

TEST_CASE("inequality (ii)") {
  SUBCASE("chen_c3 at r = 1, leaf-wise and intrinsic") {
    const auto rep = evaluate_point(gallery("chen_c3", {{"r", 1.0}}));
    REQUIRE(rep.version_ii);
    const auto& v = *rep.version_ii;
    CHECK(std::abs(v.inequality.lhs) < 1e-12);
    CHECK(v.inequality.rhs == doctest::Approx(2.0).epsilon(1e-10));
    REQUIRE(v.intrinsic);
    // n2 = 2: intrinsic values are f^2 times the leaf-wise ones
    const double f2 = rep.warp->f * rep.warp->f;
    CHECK(v.intrinsic->rhs == doctest::Approx(f2 * v.inequality.rhs).epsilon(1e-10));
    CHECK(std::abs(v.intrinsic->lhs - bo_delta_transfer_inverse(v.inequality.lhs, *rep.warp, 2)) < 1e-8);
    CHECK(rep.delta_nperp_transfer_residual);
    CHECK(*rep.delta_nperp_transfer_residual < 1e-8);
  }
  SUBCASE("product") {
    const auto rep = evaluate_point(gallery("product", {}));
    CHECK(std::abs(rep.version_ii->inequality.slack) < 1e-12);
    CHECK(rep.version_ii->equality.is_equality);
  }
  SUBCASE("synthetic h = 0, c = 4") {
    InequalityInputs in{2, 2, 4.0, 0.0, 0.0, 0.0};
    const auto v = inequality_ii(in, std::nullopt);
    CHECK(v.leafwise.rhs == doctest::Approx(4.0));
    CHECK(v.leafwise.lhs == 0.0);
    CHECK_FALSE(v.intrinsic);
  }
  SUBCASE("intrinsic transfer for n2 = 3") {
    WarpData w;
    w.f = 2.0;
    w.grad_norm_sq = 1.0;
    w.laplacian_f = -0.5;
    InequalityInputs in{2, 3, 0.0, 0.1, w.warp_term(3), bo_delta_transfer(2.0, w, 3)};
    const auto v = inequality_ii(in, w);
    REQUIRE(v.intrinsic);
    CHECK(v.intrinsic->lhs == doctest::Approx(2.0));
    CHECK(v.intrinsic->rhs == doctest::Approx(4 * v.leafwise.rhs + 2 * 1.0));
    CHECK(v.intrinsic->slack == doctest::Approx(4 * v.leafwise.slack));
    const auto given = inequality_ii(in, w, 2.0);
    CHECK(given.intrinsic->lhs == 2.0);
    in.n2 = 1;
    CHECK_THROWS_AS(inequality_ii(in, w), DegenerateInput);
  }
}

TEST_CASE("theta is a sum of squares") {
  CHECK(theta(SecondFundamentalForm::zero(5, 3), 2, Version::kI) == 0.0);
  Rng rng(8);
  double worst = INFINITY;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n1 = 2 * (1 + static_cast<int>(rng.next() % 3));
    const int n2 = 1 + static_cast<int>(rng.next() % 3);
    const int n = n1 + n2;
    const auto h = random_h(rng, n, n + 1 + static_cast<int>(rng.next() % 2));
    for (auto v : {Version::kI, Version::kII}) {
      if (v == Version::kII && n2 < 2) continue;
      const auto blocks = index_blocks(n1, n2, v);
      const auto g = theta_groups(h, blocks);
      double sum = 0;
      for (double x : g) {
        CHECK(x >= 0.0);
        sum += x;
      }
      CHECK(theta(h, blocks) == doctest::Approx(sum));
      worst = std::min(worst, theta(h, n1, v));
    }
  }
  CHECK(worst >= -1e-15);
  CHECK(theta(SecondFundamentalForm(6, equality_slices()), 4, Version::kI) < 1e-28);
}

TEST_CASE("index blocks") {
  const auto b = index_blocks(4, 2, Version::kI);
  CHECK(b.p == std::vector<int>{0, 1, 2, 3});
  CHECK(b.q == std::vector<int>{4, 5});
  const auto c = index_blocks(4, 2, Version::kII);
  CHECK(c.p == std::vector<int>{4, 5});
  CHECK(c.q == std::vector<int>{0, 1, 2, 3});
  CHECK(to_string(Version::kI) == "i");
  CHECK(to_string(Version::kII) == "ii");
}

TEST_CASE("upsilon and its closure") {
  // h = 0 with tau equal to the ambient value
  const double c = 4.0;
  const auto tt = tilde_tau_cr(2, 2, c);
  const auto zero = SecondFundamentalForm::zero(4, 2);
  const auto blocks = index_blocks(2, 2, Version::kI);
  const double u0 = upsilon(zero, tt.total, 2, blocks, c);
  CHECK(std::abs(u0) < 1e-14);
  CHECK(upsilon_closure_residual(zero, u0, blocks) < 1e-14);

  for (double r : {0.5, 1.0, 2.0}) {
    const auto rep = evaluate_point(gallery("chen_c2", {{"r", r}, {"t", 0.4}}));
    CHECK(rep.version_i->upsilon_closure < 1e-8);
  }
  // synthetic random h: the report adapts the normal frame to H first
  Rng rng(13);
  for (auto [n1, n2, m, cc] : {std::tuple{2, 1, 3, 4.0}, {2, 2, 4, -3.0}, {4, 2, 5, 4.0}, {4, 3, 6, 1.0}}) {
    const int n = n1 + n2;
    const auto rep = evaluate_point(synthetic_point(n1, n2, cc, m, random_h(rng, n, 2 * m - n)));
    for (const auto* v : {&rep.version_i, &rep.version_ii}) {
      if (!*v) continue;
      const double scale = std::max(1.0, rep.h_norm_sq);
      CHECK((*v)->upsilon_closure < 1e-12 * scale * 10);
    }
  }
}

TEST_CASE("lemma 1 examples") {
  const std::vector<double> a1{1, 1, 2};
  auto r = lemma1_check(a1, 2.0);
  CHECK(std::abs(r.slack) < 1e-15);
  CHECK(r.constraint_residual < 1e-15);
  CHECK(r.equality);
  const std::vector<double> a2{1, 1, 1};
  r = lemma1_check(a2, 1.5);
  CHECK(r.slack == doctest::Approx(0.5));
  CHECK_FALSE(r.equality);
  const std::vector<double> a3{0.3, -1.7};
  r = lemma1_check(a3, 2 * 0.3 * -1.7);
  CHECK(std::abs(r.slack) < 1e-15);
  CHECK(r.constraint_residual < 1e-15);
}

TEST_CASE("lemma 1 on random constrained instances") {
  Rng rng(1);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 2 + static_cast<int>(rng.next() % 6);
    std::vector<double> a(static_cast<std::size_t>(n));
    for (auto& x : a) x = rng.normal();
    double s = 0, s2 = 0;
    for (double x : a) {
      s += x;
      s2 += x * x;
    }
    const auto r = lemma1_check(a, s * s / (n - 1) - s2);
    CHECK(r.slack >= -1e-12);
    CHECK(r.constraint_residual < 1e-12);
  }
}

TEST_CASE("lemma 2 and corrected lemma 3 identities") {
  CHECK(lemma_identity_residual(LemmaKind::kLemma2, SecondFundamentalForm::zero(4, 2), index_blocks(2, 2, Version::kI)) == 0.0);
  Rng rng(31);
  for (auto [n1, n2] : {std::pair{2, 1}, {2, 2}, {4, 2}, {4, 3}}) {
    const int n = n1 + n2;
    const auto blocks = index_blocks(n1, n2, Version::kI);
    double worst2 = 0, worst3 = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const auto h = random_h(rng, n, n1 / 2 + n2 + 2);
      worst2 = std::max(worst2, lemma_identity_residual(LemmaKind::kLemma2, h, blocks));
      worst3 = std::max(worst3, lemma_identity_residual(LemmaKind::kLemma3, h, blocks));
    }
    CHECK(worst2 < 1e-12);
    CHECK(worst3 < 1e-12);
  }
  // rank one h[r][i][j] = v_r w_i w_j
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 5, normals = 4;
    Vec v(normals), w(n);
    for (int i = 0; i < normals; ++i) v[i] = rng.normal();
    for (int i = 0; i < n; ++i) w[i] = rng.normal();
    std::vector<Mat> s;
    for (int r = 0; r < normals; ++r) s.push_back(v[r] * w * w.transpose());
    const SecondFundamentalForm h(n, s);
    for (auto kind : {LemmaKind::kLemma2, LemmaKind::kLemma3})
      CHECK(lemma_identity_residual(kind, h, index_blocks(2, 3, Version::kI)) < 1e-12);
  }
  CHECK_THROWS_AS(lemma_identity_residual(LemmaKind::kLemma2, SecondFundamentalForm::zero(4, 2), IndexBlocks{{0}, {1, 2, 3}}),
                  DimensionMismatch);
  CHECK(to_string(LemmaKind::kLemma3Literal) == "lemma3-literal");
}

TEST_CASE("uncorrected lemma 3 variant differs by exactly the h_1A, h_2A terms") {
  Rng rng(32);
  const int n1 = 4, n2 = 3, n = 7;
  const auto blocks = index_blocks(n1, n2, Version::kI);
  for (int trial = 0; trial < 20; ++trial) {
    const auto h = random_h(rng, n, 3);
    double missing = 0;
    for (int r = 0; r < h.normal_dim(); ++r)
      for (int a : blocks.q) missing += h(r, 0, a) * h(r, 0, a) + h(r, 1, a) * h(r, 1, a);
    CHECK(lemma_identity_residual(LemmaKind::kLemma3Literal, h, blocks) == doctest::Approx(missing).epsilon(1e-10));
  }
}

TEST_CASE("equality classifier") {
  SUBCASE("h = 0") {
    const auto e = equality_classify(SecondFundamentalForm::zero(4, 2), 2, Version::kI, 0.0);
    CHECK(e.is_equality);
    CHECK(e.mu1 == 0.0);
  }
  SUBCASE("canonical fixture") {
    const auto rep = evaluate_point(equality_point(equality_slices()));
    REQUIRE(rep.version_i);
    const auto& v = *rep.version_i;
    CHECK(v.equality.is_equality);
    CHECK(std::abs(v.equality.mu1 - 0.7) < 1e-12);
    CHECK(std::abs(v.inequality.slack) < 1e-8);
    CHECK(v.theta < 1e-20);
    CHECK(v.kmin == doctest::Approx(1.0));
    CHECK(v.ambient_pi_star == doctest::Approx(1.0));
    // shape operators in canonical form: no mixed blocks, traceless factors
    for (int r = 0; r < 4; ++r) {
      const Mat a = shape_operator(rep.version_i ? SecondFundamentalForm(6, equality_slices()) : SecondFundamentalForm(), r);
      CHECK(a.topRightCorner(4, 2).isZero());
      CHECK(std::abs(a.topLeftCorner(4, 4).trace()) < 1e-15);
      CHECK(std::abs(a.bottomRightCorner(2, 2).trace()) < 1e-15);
    }
  }
  SUBCASE("single-entry perturbations") {
    const auto base = equality_slices();
    int flipped = 0, kept = 0;
    for (int r = 0; r < 4; ++r)
      for (int i = 0; i < 6; ++i)
        for (int j = i; j < 6; ++j) {
          auto s = base;
          s[static_cast<std::size_t>(r)](i, j) += 1e-3;
          if (i != j) s[static_cast<std::size_t>(r)](j, i) += 1e-3;
          const auto rep = evaluate_point(equality_point(s));
          const auto& e = rep.version_i->equality;
          const bool pi_block = i < 2 && j < 2;
          const bool q_block = i >= 4 && j >= 4;
          // off-diagonal entries of the traceless 2x2 blocks are free parameters
          if ((pi_block || q_block) && i != j) {
            CHECK(e.is_equality);
            CHECK(std::abs(rep.version_i->inequality.slack) < 1e-8);
            ++kept;
            continue;
          }
          CAPTURE(r);
          CAPTURE(i);
          CAPTURE(j);
          CHECK_FALSE(e.is_equality);
          ++flipped;
          std::string expected;
          if (i < 4 && j >= 4) expected = "mixed block";
          else if (q_block) expected = "D_perp trace";
          else if (pi_block) expected = "pi* trace";
          else if (i < 2) expected = "pi* coupling";
          else expected = "residual block";
          CHECK(has_violation(e, expected));
          if (expected == "mixed block") CHECK(e.magnitude("mixed block") == doctest::Approx(1e-3).epsilon(1e-6));
        }
    CHECK(flipped == 76);
    CHECK(kept == 8);
  }
  SUBCASE("chen_c2 at z = i") {
    const auto rep = evaluate_point(gallery("chen_c2", {{"r", 1.0}, {"arg", kPi / 2}, {"t", 0.0}}));
    const auto& e = rep.version_i->equality;
    CHECK_FALSE(e.is_equality);
    REQUIRE(has_violation(e, "mixed block"));
    // the single entry h(e_x, e_t) of norm 1, counted in both symmetric slots
    CHECK(e.magnitude("mixed block") == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("slack decomposition closes on random data") {
  Rng rng(77);
  for (auto [n1, n2, m, c] : {std::tuple{2, 1, 2, 4.0}, {2, 1, 3, 4.0}, {2, 2, 4, -3.0}, {4, 2, 5, 4.0},
                              {4, 3, 6, 1.0}, {6, 2, 6, -2.0}, {4, 2, 4, 2.0}}) {
    const int n = n1 + n2;
    for (int trial = 0; trial < 5; ++trial) {
      EvaluationOptions opt;
      opt.seed = 10 + static_cast<std::uint64_t>(trial);
      const auto rep = evaluate_point(synthetic_point(n1, n2, c, m, random_h(rng, n, 2 * m - n)), opt);
      for (const auto* v : {&rep.version_i, &rep.version_ii}) {
        if (!*v) continue;
        const auto& x = **v;
        const double gap = x.ambient_pi_star - (x.version == Version::kI ? x.kmin : c / 4);
        CHECK(x.inequality.slack == doctest::Approx(x.theta + x.lemma1.slack / 2 + gap).epsilon(1e-10));
        CHECK(x.chain_residual < 1e-9);
        CHECK(x.theta >= -1e-12);
        CHECK(x.inequality.slack >= -1e-9);
        CHECK(x.lemma1.slack >= -1e-9);
        CHECK(gap >= -1e-6);
        CHECK(std::abs(x.kmin - x.kmin_sampled) < 1e-6);
      }
    }
  }
}

TEST_CASE("evaluation is deterministic") {
  Rng rng(4);
  const auto p = synthetic_point(4, 3, 1.0, 6, random_h(rng, 7, 5));
  EvaluationOptions opt;
  opt.seed = 99;
  const auto a = evaluate_point(p, opt), b = evaluate_point(p, opt);
  CHECK(a.version_i->inequality.slack == b.version_i->inequality.slack);
  CHECK(a.version_ii->delta_hat == b.version_ii->delta_hat);
  CHECK(a.version_i->pi_star.argmin.u == b.version_i->pi_star.argmin.u);
}

TEST_CASE("minimality corollaries") {
  for (double r : {0.5, 1.0, 2.0}) {
    const auto c2 = evaluate_point(gallery("chen_c2", {{"r", r}, {"t", 0.5}}));
    const auto k2 = corollary_minimal_check(c2);
    CHECK_FALSE(k2.not_minimal);
    CHECK(k2.cond_i == doctest::Approx(-1 / (r * r)).epsilon(1e-10));
    CHECK(k2.ricci_max_eig <= 1e-8);

    const auto c3 = evaluate_point(gallery("chen_c3", {{"r", r}, {"theta", 1.3}}));
    const auto k3 = corollary_minimal_check(c3);
    REQUIRE(k3.cond_ii);
    CHECK(*k3.cond_ii == doctest::Approx(-2 / (r * r)).epsilon(1e-10));
    CHECK(k3.ricci_max_eig <= 1e-8);
  }
  const auto prod = corollary_minimal_check(evaluate_point(gallery("product", {})));
  CHECK(std::abs(prod.cond_i) < 1e-14);
  CHECK(std::abs(*prod.cond_ii) < 1e-14);
  CHECK(std::abs(prod.ricci_max_eig) < 1e-14);

  Rng rng(2);
  const auto nonmin = corollary_minimal_check(evaluate_point(synthetic_point(2, 2, 0.0, 3, random_h(rng, 4, 2))));
  CHECK(nonmin.not_minimal);
}

TEST_CASE("Ricci form matches a direct contraction") {
  Rng rng(6);
  const auto p = synthetic_point(2, 2, 4.0, 4, random_h(rng, 4, 4));
  const Mat ric = ricci_form(p);
  CHECK((ric - ric.transpose()).norm() < 1e-14);
  for (int j = 0; j < 4; ++j) {
    double diag = 0;
    for (int i = 0; i < 4; ++i)
      if (i != j) diag += p.sectional(i, j);
    CHECK(ric(j, j) == doctest::Approx(diag).epsilon(1e-12));
  }
}

TEST_CASE("classical inequality on round 3-spheres") {
  for (double rho : {0.5, 1.0, 2.0}) {
    const std::string r = std::to_string(rho);
    // S^3(rho) in R^4 = C^2 over the polar angle chi with fiber S^2
    const auto chart = make_chart(
        "s3", 1, 2, {"chi", "theta", "phi"},
        {r + "*cos(chi)", r + "*sin(chi)*cos(theta)", r + "*sin(chi)*sin(theta)*cos(phi)",
         r + "*sin(chi)*sin(theta)*sin(phi)"},
        r + "*sin(chi)", {}, false);
    const auto p = extrinsic_point(chart, std::vector<double>{1.0, 1.2, 0.4});
    const auto v = chen_original(p);
    CHECK(v.lhs == doctest::Approx(2 / (rho * rho)).epsilon(1e-8));
    CHECK(v.rhs == doctest::Approx(2.25 / (rho * rho)).epsilon(1e-8));
    CHECK(v.slack == doctest::Approx(0.25 / (rho * rho)).epsilon(1e-8));
  }
  const auto flat = make_chart("r3", 1, 2, {"a", "b", "c"}, {"a", "b", "c", "0"}, std::nullopt, {}, false);
  const auto e = chen_original(extrinsic_point(flat, std::vector<double>{0.1, 0.2, 0.3}));
  CHECK(std::abs(e.lhs) < 1e-14);
  CHECK(std::abs(e.rhs) < 1e-14);
  const auto minimal = chen_original(0.0, 0.0, 3, 0.0, 0.0);
  CHECK(minimal.rhs == 0.0);
  CHECK_THROWS_AS(chen_original(0.0, 0.0, 2, 0.0, 0.0), DegenerateInput);
  CHECK_THROWS_AS(chen_original(synthetic_point(2, 1, 1.0, 2, SecondFundamentalForm::zero(3, 1))), DomainError);
}

TEST_CASE("synthetic_point validation") {
  CHECK_THROWS_AS(synthetic_point(3, 1, 0.0, 3, SecondFundamentalForm::zero(4, 2)), ParityError);
  CHECK_THROWS_AS(synthetic_point(2, 1, 0.0, 3, SecondFundamentalForm::zero(3, 2)), DimensionMismatch);
  CHECK_THROWS_AS(synthetic_point(2, 1, 0.0, 3, SecondFundamentalForm::zero(4, 3)), DimensionMismatch);
  const Mat e = default_tangent_embedding(4, 2, 5, true);
  CHECK((e.transpose() * e - Mat::Identity(6, 6)).norm() < 1e-15);
}

TEST_CASE("non-CR points skip the CR-only checks") {
  const auto rep = evaluate_point(gallery("cone", {{"rho", 1.7}}));
  CHECK_FALSE(rep.cr);
  CHECK_FALSE(rep.version_i);
  CHECK_FALSE(rep.version_ii);
  CHECK_FALSE(rep.fundamental_identity);
  REQUIRE(rep.warp_identity);
  CHECK(*rep.warp_identity < 1e-8);
  REQUIRE(rep.fiber_bo_residual);
  CHECK(*rep.fiber_bo_residual < 1e-8);
}
