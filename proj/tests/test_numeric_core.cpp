#include "crwarp/error.hpp"
#include "crwarp/grassmann.hpp"
#include "crwarp/linalg.hpp"
#include "crwarp/rng.hpp"
#include "crwarp/taylor2.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace crwarp;

TEST_CASE("taylor2 jets agree with finite differences") {
  // f(x, y, z) = sin(x) * exp(y * z) / sqrt(1 + x^2) + cosh(z) * log(2 + y)
  auto f_real = [](const Eigen::VectorXd& p) {
    return std::sin(p[0]) * std::exp(p[1] * p[2]) / std::sqrt(1 + p[0] * p[0]) +
           std::cosh(p[2]) * std::log(2 + p[1]);
  };
  Eigen::VectorXd p(3);
  p << 0.3, -0.4, 0.7;
  const auto x = Taylor2::variable(p[0], 0, 3);
  const auto y = Taylor2::variable(p[1], 1, 3);
  const auto z = Taylor2::variable(p[2], 2, 3);
  const Taylor2 f = sin(x) * exp(y * z) / sqrt(1.0 + x * x) + cosh(z) * log(2.0 + y);

  CHECK(f.value() == doctest::Approx(f_real(p)).epsilon(1e-14));
  for (int i = 0; i < 3; ++i) {
    CHECK(f.grad()[i] == doctest::Approx(oracle::central_diff(f_real, p, i)).epsilon(1e-8));
    for (int j = 0; j < 3; ++j)
      CHECK(f.hess()(i, j) == doctest::Approx(oracle::central_diff2(f_real, p, i, j)).epsilon(1e-5));
  }
  CHECK((f.hess() - f.hess().transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("taylor2 constants broadcast and sinh/cos derivatives") {
  const auto t = Taylor2::variable(1.2, 0, 1);
  const Taylor2 s = sinh(t) + cos(t) * 2.0;
  CHECK(s.grad()[0] == doctest::Approx(std::cosh(1.2) - 2 * std::sin(1.2)));
  CHECK(s.hess()(0, 0) == doctest::Approx(std::sinh(1.2) - 2 * std::cos(1.2)));
  const Taylor2 k = Taylor2::constant(3.0, 2);
  CHECK(k.dim() == 2);
  CHECK(k.grad().isZero());
}

TEST_CASE("ipow matches repeated multiplication") {
  for (int n = -5; n <= 7; ++n) CHECK(ipow(1.3, n) == doctest::Approx(std::pow(1.3, n)).epsilon(1e-14));
  const auto x = Taylor2::variable(2.0, 0, 1);
  const auto c = ipow(x, 3);
  CHECK(c.value() == doctest::Approx(8.0));
  CHECK(c.grad()[0] == doctest::Approx(12.0));
  CHECK(c.hess()(0, 0) == doctest::Approx(12.0));
  const auto inv = ipow(x, -2);
  CHECK(inv.grad()[0] == doctest::Approx(-2.0 / 8.0));
}

TEST_CASE("gram_schmidt small examples") {
  const Frame id = gram_schmidt(Mat(Mat::Identity(3, 3)));
  CHECK((id.vectors - Mat::Identity(3, 3)).norm() < 1e-15);

  Mat two(2, 2);
  two << 1, 1, 0, 1;
  const Frame f = gram_schmidt(two);
  CHECK(f.vectors(0, 0) == doctest::Approx(1.0));
  CHECK(std::abs(f.vectors(1, 0)) < 1e-15);
  CHECK(std::abs(f.vectors(0, 1)) < 1e-15);
  CHECK(f.vectors(1, 1) == doctest::Approx(1.0));
  CHECK(f.orthonormal);
}

TEST_CASE("gram_schmidt random vectors keep their span") {
  Rng rng(11);
  Mat in(8, 5);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 5; ++j) in(i, j) = rng.normal();
  const Frame f = gram_schmidt(in);
  CHECK((f.vectors.transpose() * f.vectors - Mat::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(f.orthonormality_defect() < 1e-12);
  const Mat projected = f.vectors * (f.vectors.transpose() * in);
  CHECK((projected - in).cwiseAbs().maxCoeff() < 1e-10);
  // first direction preserved
  CHECK(f[0].dot(in.col(0).normalized()) == doctest::Approx(1.0));
}

TEST_CASE("gram_schmidt with a non-Euclidean inner product") {
  Mat inner(2, 2);
  inner << 2, 0.5, 0.5, 1;
  const Frame f = gram_schmidt(Mat(Mat::Identity(2, 2)), inner);
  CHECK((f.vectors.transpose() * inner * f.vectors - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("gram_schmidt rejects dependent input") {
  Mat dep(3, 2);
  dep << 1, 2, 0, 0, 1, 2;
  CHECK_THROWS_AS(gram_schmidt(dep), DegenerateInput);
}

TEST_CASE("orthogonal complement and rotations") {
  Rng rng(3);
  Mat a(6, 2);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 2; ++j) a(i, j) = rng.normal();
  const Mat basis = gram_schmidt(a).vectors;
  const Mat comp = orthogonal_complement(basis);
  REQUIRE(comp.cols() == 4);
  CHECK((comp.transpose() * comp - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((basis.transpose() * comp).cwiseAbs().maxCoeff() < 1e-12);

  Vec d(4);
  d << 1, 2, -2, 0.5;
  const Mat r = rotation_with_first_column(d);
  CHECK((r.transpose() * r - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((r.col(0) - d.normalized()).norm() < 1e-12);
}

TEST_CASE("PlaneSpec::from_pair orthonormalizes keeping u") {
  Vec u(3), v(3);
  u << 2, 0, 0;
  v << 1, 1, 0;
  const auto p = PlaneSpec::from_pair(u, v);
  CHECK(p.u[0] == doctest::Approx(1.0));
  CHECK(std::abs(p.u.dot(p.v)) < 1e-15);
  CHECK(p.v.norm() == doctest::Approx(1.0));
}

TEST_CASE("rng is deterministic per seed") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    CHECK(x == b.normal());
    (void)c.normal();
  }
  CHECK(Rng(42).uniform() != Rng(43).uniform());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("min_over_planes: constant functional") {
  const Frame v = gram_schmidt(Mat(Mat::Identity(5, 5)));
  const auto m = min_over_planes([](const PlaneSpec&) { return -2.5; }, v, {}, 1);
  CHECK(m.value == -2.5);
  CHECK(std::abs(m.argmin.u.dot(m.argmin.v)) < 1e-12);
}

TEST_CASE("min_over_planes: a 2-dimensional subspace returns its only plane") {
  Mat b = Mat::Zero(4, 2);
  b(0, 0) = 1;
  b(3, 1) = 1;
  const Frame v = gram_schmidt(b);
  int calls = 0;
  const auto m = min_over_planes(
      [&](const PlaneSpec& p) {
        ++calls;
        return p.u[0] * p.u[0] + 3.0;
      },
      v, {}, 1);
  CHECK(m.value == doctest::Approx(4.0));
  CHECK(std::abs(m.argmin.u.dot(m.argmin.v)) < 1e-15);
}

namespace {

// Diagonal biquadratic form: sum_{i<j} a_ij (u_i v_j - u_j v_i)^2.
double diagonal_form(const Mat& a, const Vec& u, const Vec& v) {
  double s = 0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i + 1; j < a.cols(); ++j) {
      const double p = u[i] * v[j] - u[j] * v[i];
      s += a(i, j) * p * p;
    }
  return s;
}

}  // namespace

TEST_CASE("min_over_planes: random diagonal biquadratic forms match brute force") {
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    Mat a = Mat::Zero(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) a(i, j) = rng.uniform(-2, 2);
    const Frame v = gram_schmidt(Mat(Mat::Identity(4, 4)));
    const auto m = min_over_planes([&](const PlaneSpec& p) { return diagonal_form(a, p.u, p.v); }, v,
                                   {}, 100 + static_cast<std::uint64_t>(trial));
    // 6 charts x 11^4 grid points, about 1e5 planes
    const double brute = oracle::grid_plane_min(
        [&](const Vec& u, const Vec& w) { return diagonal_form(a, u, w); }, 4, 11);
    CHECK(m.value <= brute + 1e-12);
    CHECK(std::abs(m.value - brute) < 1e-4);
    // the decomposable constraint makes the exact minimum the smallest a_ij
    double exact = INFINITY;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) exact = std::min(exact, a(i, j));
    CHECK(m.value == doctest::Approx(exact).epsilon(1e-10));
  }
}

TEST_CASE("min_over_planes: dimension three reduces to an eigenvalue problem") {
  // Every bivector in R^3 is decomposable, so the minimum of a quadratic form
  // on bivectors is its smallest eigenvalue.
  Rng rng(21);
  Mat q(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) q(i, j) = q(j, i) = rng.normal();
  auto wedge = [](const Vec& u, const Vec& v) {
    Vec w(3);
    w << u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0];
    return w;
  };
  const Frame v = gram_schmidt(Mat(Mat::Identity(3, 3)));
  const auto m = min_over_planes(
      [&](const PlaneSpec& p) {
        const Vec w = wedge(p.u, p.v);
        return w.dot(q * w);
      },
      v, {}, 9);
  const double lambda = Eigen::SelfAdjointEigenSolver<Mat>(q).eigenvalues()[0];
  CHECK(m.value == doctest::Approx(lambda).epsilon(1e-9));
}

TEST_CASE("min_over_planes is deterministic in the seed") {
  Rng rng(5);
  Mat a = Mat::Zero(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) a(i, j) = rng.normal();
  Mat b(7, 5);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 5; ++j) b(i, j) = rng.normal();
  const Frame v = gram_schmidt(b);
  auto curv = [&](const PlaneSpec& p) {
    const Vec u = v.vectors.transpose() * p.u, w = v.vectors.transpose() * p.v;
    return diagonal_form(a, u, w);
  };
  const auto m1 = min_over_planes(curv, v, {}, 77);
  const auto m2 = min_over_planes(curv, v, {}, 77);
  CHECK(m1.value == m2.value);
  CHECK(m1.argmin.u == m2.argmin.u);
  CHECK(m1.argmin.v == m2.argmin.v);
}
