#include "crwarp/taylor2.hpp"

#include "crwarp/error.hpp"

#include <cmath>

namespace crwarp {

namespace {

// Lift a constant (dim 0) to the dimension of its partner.
void broadcast(Taylor2& a, const Taylor2& b, Eigen::VectorXd& ga,
               Eigen::MatrixXd& ha) {
  const auto da = a.dim();
  const auto db = b.dim();
  if (da == db || db == 0) {
    ga = a.grad();
    ha = a.hess();
    return;
  }
  if (da != 0) {
    throw DimensionMismatch("jet dimensions differ: " + std::to_string(da) +
                            " vs " + std::to_string(db));
  }
  ga = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(db));
  ha = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(db),
                             static_cast<Eigen::Index>(db));
}

Eigen::VectorXd grad_or_zero(const Taylor2& x, std::size_t dim) {
  if (x.dim() == dim) return x.grad();
  return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
}

Eigen::MatrixXd hess_or_zero(const Taylor2& x, std::size_t dim) {
  if (x.dim() == dim) return x.hess();
  return Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                               static_cast<Eigen::Index>(dim));
}

}  // namespace

Taylor2 Taylor2::constant(double value, std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return {value, Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Zero(d, d)};
}

Taylor2 Taylor2::variable(double value, std::size_t index, std::size_t dim) {
  if (index >= dim) throw IndexError("seed index out of range");
  Taylor2 t = constant(value, dim);
  t.grad_[static_cast<Eigen::Index>(index)] = 1.0;
  return t;
}

void Taylor2::mirror_upper() {
  const auto d = hess_.rows();
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = j + 1; i < d; ++i) hess_(i, j) = hess_(j, i);
}

Taylor2 Taylor2::compose(double f0, double f1, double f2) const {
  Taylor2 out;
  out.value_ = f0;
  out.grad_ = f1 * grad_;
  const auto d = grad_.size();
  out.hess_.resize(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i <= j; ++i)
      out.hess_(i, j) = f1 * hess_(i, j) + f2 * (grad_[i] * grad_[j]);
  out.mirror_upper();
  return out;
}

Taylor2 Taylor2::operator-() const { return {-value_, -grad_, -hess_}; }

Taylor2& Taylor2::operator+=(const Taylor2& other) {
  Eigen::VectorXd g;
  Eigen::MatrixXd h;
  broadcast(*this, other, g, h);
  const auto d = static_cast<std::size_t>(g.size());
  value_ += other.value_;
  grad_ = g + grad_or_zero(other, d);
  hess_ = h + hess_or_zero(other, d);
  return *this;
}

Taylor2& Taylor2::operator-=(const Taylor2& other) {
  Eigen::VectorXd g;
  Eigen::MatrixXd h;
  broadcast(*this, other, g, h);
  const auto d = static_cast<std::size_t>(g.size());
  value_ -= other.value_;
  grad_ = g - grad_or_zero(other, d);
  hess_ = h - hess_or_zero(other, d);
  return *this;
}

Taylor2& Taylor2::operator*=(const Taylor2& other) {
  Eigen::VectorXd ga;
  Eigen::MatrixXd ha;
  broadcast(*this, other, ga, ha);
  const auto d = static_cast<std::size_t>(ga.size());
  const Eigen::VectorXd gb = grad_or_zero(other, d);
  const Eigen::MatrixXd hb = hess_or_zero(other, d);
  const double a = value_;
  const double b = other.value_;
  value_ = a * b;
  grad_ = a * gb + b * ga;
  const auto n = static_cast<Eigen::Index>(d);
  hess_.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i <= j; ++i)
      hess_(i, j) = a * hb(i, j) + b * ha(i, j) +
                    (ga[i] * gb[j] + gb[i] * ga[j]);
  mirror_upper();
  return *this;
}

Taylor2& Taylor2::operator/=(const Taylor2& other) {
  Eigen::VectorXd ga;
  Eigen::MatrixXd ha;
  broadcast(*this, other, ga, ha);
  const auto d = static_cast<std::size_t>(ga.size());
  const Eigen::VectorXd gb = grad_or_zero(other, d);
  const Eigen::MatrixXd hb = hess_or_zero(other, d);
  const double b = other.value_;
  const double q = value_ / b;
  const Eigen::VectorXd gq = (ga - q * gb) / b;
  value_ = q;
  grad_ = gq;
  const auto n = static_cast<Eigen::Index>(d);
  hess_.resize(n, n);
  // a = q b  =>  H_a = b H_q + q H_b + g_q g_b^T + g_b g_q^T
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i <= j; ++i)
      hess_(i, j) =
          (ha(i, j) - q * hb(i, j) - (gq[i] * gb[j] + gb[i] * gq[j])) / b;
  mirror_upper();
  return *this;
}

Taylor2 sin(const Taylor2& x) {
  const double s = std::sin(x.value());
  return x.compose(s, std::cos(x.value()), -s);
}

Taylor2 cos(const Taylor2& x) {
  const double c = std::cos(x.value());
  return x.compose(c, -std::sin(x.value()), -c);
}

Taylor2 exp(const Taylor2& x) {
  const double e = std::exp(x.value());
  return x.compose(e, e, e);
}

Taylor2 log(const Taylor2& x) {
  const double v = x.value();
  return x.compose(std::log(v), 1.0 / v, -1.0 / (v * v));
}

Taylor2 sqrt(const Taylor2& x) {
  const double r = std::sqrt(x.value());
  return x.compose(r, 0.5 / r, -0.25 / (r * x.value()));
}

Taylor2 sinh(const Taylor2& x) {
  const double s = std::sinh(x.value());
  return x.compose(s, std::cosh(x.value()), s);
}

Taylor2 cosh(const Taylor2& x) {
  const double c = std::cosh(x.value());
  return x.compose(c, std::sinh(x.value()), c);
}

double ipow(double x, int n) {
  if (n < 0) return 1.0 / ipow(x, -n);
  double result = 1.0;
  double base = x;
  unsigned e = static_cast<unsigned>(n);
  while (e != 0) {
    if (e & 1u) result *= base;
    e >>= 1u;
    if (e != 0) base *= base;
  }
  return result;
}

Taylor2 ipow(const Taylor2& x, int n) {
  const double v = x.value();
  if (n == 0) return x.compose(1.0, 0.0, 0.0);
  if (n == 1) return x.compose(v, 1.0, 0.0);
  const double f1 = n * ipow(v, n - 1);
  const double f2 = static_cast<double>(n) * (n - 1) * ipow(v, n - 2);
  return x.compose(ipow(v, n), f1, f2);
}

}  // namespace crwarp
