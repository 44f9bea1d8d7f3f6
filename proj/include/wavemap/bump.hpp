#pragma once

// Closed-form smooth bump functions built on the mollifier
// b(s) = exp(-1 / (1 - s^2)) for |s| < 1, 0 otherwise.

#include <span>
#include <string>
#include <vector>

namespace wavemap {

/// Dense real polynomial, coefficients in increasing degree.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);

  double operator()(double s) const;
  Polynomial derivative() const;
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<double>& coefficients() const { return c_; }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double k, const Polynomial& a);

 private:
  std::vector<double> c_;
};

/// k-th derivative of the standard mollifier b at s; exactly zero for |s| >= 1.
double mollifier_derivative(double s, int k);

/// x -> d^shift/dx^shift [ b(x/C) * p(x/C) ], evaluated in closed form.
class ScalarBump {
 public:
  ScalarBump(double half_width, Polynomial weight, int derivative_shift = 0);

  double operator()(double x) const { return derivative(x, 0); }
  double derivative(double x, int order) const;

  ScalarBump differentiated() const;
  ScalarBump scaled(double factor) const;

  double half_width() const { return c_; }

  /// Plain even mollifier b(x/C).
  static ScalarBump symmetric(double half_width);
  /// Default asymmetric bump b(x/C) (1 + x/C) / 2.
  static ScalarBump asymmetric(double half_width);

 private:
  double c_;
  Polynomial weight_;
  int shift_;
};

/// R^{m-1}-valued bump h = (h_2, ..., h_m) supported in [-C, C]; component k
/// multiplies e_{k+2} of R^m.
struct BumpProfile {
  double half_width = 1.0;
  std::vector<ScalarBump> components;
  std::string id;

  int target_dim() const { return static_cast<int>(components.size()); }

  std::vector<double> value(double x) const { return derivative(x, 0); }
  std::vector<double> derivative(double x, int order) const;
};

}  // namespace wavemap
