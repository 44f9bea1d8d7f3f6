#include "wavemap/bump.hpp"

#include "wavemap/core.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace wavemap {

Polynomial::Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {
  while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
}

double Polynomial::operator()(double s) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial({0.0});
  std::vector<double> d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = static_cast<double>(i) * c_[i];
  return Polynomial(std::move(d));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<double> r(std::max(a.c_.size(), b.c_.size()), 0.0);
  for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
  return Polynomial(std::move(r));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.c_.empty() || b.c_.empty()) return Polynomial({0.0});
  std::vector<double> r(a.c_.size() + b.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
  return Polynomial(std::move(r));
}

Polynomial operator*(double k, const Polynomial& a) { return Polynomial({k}) * a; }

namespace {

// b^(k)(s) = b(s) P_k(s) / q^(2k), q = 1 - s^2, with
// P_{k+1} = P_k' q^2 + 4 k s q P_k - 2 s P_k.
const Polynomial& mollifier_numerator(int k) {
  static std::mutex mu;
  static std::vector<Polynomial> table{Polynomial({1.0})};
  std::lock_guard<std::mutex> lock(mu);
  const Polynomial q({1.0, 0.0, -1.0});
  const Polynomial s({0.0, 1.0});
  while (static_cast<int>(table.size()) <= k) {
    const int j = static_cast<int>(table.size()) - 1;
    const Polynomial& p = table.back();
    Polynomial next = p.derivative() * q * q + (4.0 * j) * (s * q * p) + (-2.0) * (s * p);
    table.push_back(std::move(next));
  }
  return table[static_cast<std::size_t>(k)];
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

double mollifier_derivative(double s, int k) {
  if (k < 0) throw InputError("mollifier_derivative: negative order");
  if (!(std::abs(s) < 1.0)) return 0.0;
  const double q = 1.0 - s * s;
  const double p = mollifier_numerator(k)(s);
  if (p == 0.0) return 0.0;
  // log form keeps q^(-2k) from overflowing where exp(-1/q) underflows
  const double log_mag = -1.0 / q - 2.0 * k * std::log(q) + std::log(std::abs(p));
  return std::copysign(std::exp(log_mag), p);
}

ScalarBump::ScalarBump(double half_width, Polynomial weight, int derivative_shift)
    : c_(half_width), weight_(std::move(weight)), shift_(derivative_shift) {
  if (!(half_width > 0.0)) throw InputError("ScalarBump: half width must be positive");
  if (derivative_shift < 0) throw InputError("ScalarBump: negative derivative shift");
}

double ScalarBump::derivative(double x, int order) const {
  const int n = order + shift_;
  const double s = x / c_;
  if (!(std::abs(s) < 1.0)) return 0.0;
  // Leibniz rule for d^n/ds^n [ b(s) p(s) ], then chain rule factor C^-n.
  double acc = 0.0;
  Polynomial pj = weight_;
  for (int j = 0; j <= n && j <= std::max(0, weight_.degree()); ++j) {
    const double pv = pj(s);
    if (pv != 0.0) acc += binomial(n, j) * mollifier_derivative(s, n - j) * pv;
    pj = pj.derivative();
  }
  return acc / std::pow(c_, n);
}

ScalarBump ScalarBump::differentiated() const { return ScalarBump(c_, weight_, shift_ + 1); }

ScalarBump ScalarBump::scaled(double factor) const { return ScalarBump(c_, factor * weight_, shift_); }

ScalarBump ScalarBump::symmetric(double half_width) { return ScalarBump(half_width, Polynomial({1.0})); }

ScalarBump ScalarBump::asymmetric(double half_width) { return ScalarBump(half_width, Polynomial({0.5, 0.5})); }

std::vector<double> BumpProfile::derivative(double x, int order) const {
  std::vector<double> out(components.size());
  for (std::size_t k = 0; k < components.size(); ++k) out[k] = components[k].derivative(x, order);
  return out;
}

}  // namespace wavemap
