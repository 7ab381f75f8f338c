#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace crwarp {

/// Second-order truncated jet: value, gradient and Hessian with respect to
/// d seed directions. A jet with an empty gradient is a constant that
/// broadcasts against jets of any dimension.
///
/// The Hessian is kept bit-exactly symmetric: every operation writes the
/// upper triangle and mirrors it.
class Taylor2 {
 public:
  Taylor2() = default;
  Taylor2(double value) : value_(value) {}  // NOLINT: implicit constant lift

  static Taylor2 constant(double value, std::size_t dim);
  /// Seed variable `index` of `dim` with the given value.
  static Taylor2 variable(double value, std::size_t index, std::size_t dim);

  double value() const { return value_; }
  const Eigen::VectorXd& grad() const { return grad_; }
  const Eigen::MatrixXd& hess() const { return hess_; }
  std::size_t dim() const { return static_cast<std::size_t>(grad_.size()); }

  /// Apply a scalar function given its value and first two derivatives at
  /// value().
  Taylor2 compose(double f0, double f1, double f2) const;

  Taylor2 operator-() const;
  Taylor2& operator+=(const Taylor2& other);
  Taylor2& operator-=(const Taylor2& other);
  Taylor2& operator*=(const Taylor2& other);
  Taylor2& operator/=(const Taylor2& other);

  friend Taylor2 operator+(Taylor2 a, const Taylor2& b) { return a += b; }
  friend Taylor2 operator-(Taylor2 a, const Taylor2& b) { return a -= b; }
  friend Taylor2 operator*(Taylor2 a, const Taylor2& b) { return a *= b; }
  friend Taylor2 operator/(Taylor2 a, const Taylor2& b) { return a /= b; }

 private:
  Taylor2(double value, Eigen::VectorXd grad, Eigen::MatrixXd hess)
      : value_(value), grad_(std::move(grad)), hess_(std::move(hess)) {}

  void mirror_upper();

  double value_ = 0.0;
  Eigen::VectorXd grad_;
  Eigen::MatrixXd hess_;
};

// Primitives. Domain checks live in the expression evaluator; these apply the
// chain rule unconditionally.
Taylor2 sin(const Taylor2& x);
Taylor2 cos(const Taylor2& x);
Taylor2 exp(const Taylor2& x);
Taylor2 log(const Taylor2& x);
Taylor2 sqrt(const Taylor2& x);
Taylor2 sinh(const Taylor2& x);
Taylor2 cosh(const Taylor2& x);

/// x^n by repeated squaring; the same routine serves plain reals so the
/// value slot matches bit for bit.
double ipow(double x, int n);
Taylor2 ipow(const Taylor2& x, int n);

}  // namespace crwarp
