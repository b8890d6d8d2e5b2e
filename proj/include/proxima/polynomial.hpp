#pragma once

// Dense univariate polynomials in a local variable, Σ c_k t^k.
// Only the handful of operations the exact convolution and the
// segment integrals need.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace proxima::poly {

using Coeffs = std::vector<double>;

inline double eval(std::span<const double> c, double t) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * t + c[k];
  return acc;
}

// k-th derivative at t = 0 is k! c_k.
inline double derivative_at_zero(std::span<const double> c, std::size_t k) {
  if (k >= c.size()) return 0.0;
  double fact = 1.0;
  for (std::size_t i = 2; i <= k; ++i) fact *= static_cast<double>(i);
  return fact * c[k];
}

// ∫_0^w Σ c_k t^k dt
inline double integral(std::span<const double> c, double w) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * w + c[k] / static_cast<double>(k + 1);
  return acc * w;
}

inline void add_scaled(Coeffs& into, std::span<const double> c, double factor = 1.0) {
  if (into.size() < c.size()) into.resize(c.size(), 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) into[k] += factor * c[k];
}

inline Coeffs multiply(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  Coeffs out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

// Coefficients of (c0 + slope·t)^n.
inline Coeffs linear_power(double c0, double slope, std::size_t n) {
  Coeffs out{1.0};
  const Coeffs lin{c0, slope};
  for (std::size_t i = 0; i < n; ++i) out = multiply(out, lin);
  return out;
}

// Re-expand p(t) about a new origin: returns q with q(τ) = p(τ + shift).
inline Coeffs shifted(std::span<const double> c, double shift) {
  Coeffs out;
  for (std::size_t k = 0; k < c.size(); ++k) add_scaled(out, linear_power(shift, 1.0, k), c[k]);
  return out;
}

inline double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

inline void trim(Coeffs& c) {
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
}

}  // namespace proxima::poly
