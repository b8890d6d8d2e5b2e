#pragma once

// Proximity-approximation interaction integrals
//
//   I_PA(d) = ∫ ds f(s - d) α/s^ν
//
// Units: lengths in nm, α in nW·nm^(ν-2), so that I lands in nW.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "proxima/distribution.hpp"
#include "proxima/error.hpp"
#include "proxima/format.hpp"
#include "proxima/polynomial.hpp"
#include "proxima/quadrature.hpp"

namespace proxima {

struct Kernel {
  double alpha = 1.0;
  double nu = 2.0;
  std::string label;

  // SiO₂ radiative heat transfer, per unit area: α = 0.2558 nW, ν = 2.
  static Kernel heat_sio2() { return {0.2558, 2.0, "heat-sio2"}; }
  // Ideal-conductor Casimir energy, ν = 3, caller-supplied α.
  static Kernel casimir_ideal(double alpha) { return {alpha, 3.0, "casimir-ideal"}; }
};

inline void validate(const Kernel& k) {
  if (!(k.alpha > 0.0) || !std::isfinite(k.alpha)) throw InvalidParameter("kernel alpha must be positive");
  if (!(k.nu >= 0.0) || !std::isfinite(k.nu)) throw InvalidParameter("kernel exponent nu must be non-negative");
}

namespace detail {

inline double inv_pow(double y, double nu) {
  if (nu == 2.0) return 1.0 / (y * y);
  if (nu == 3.0) return 1.0 / (y * y * y);
  if (nu == 4.0) {
    const double y2 = y * y;
    return 1.0 / (y2 * y2);
  }
  return std::pow(y, -nu);
}

// ∫_{y1}^{y2} y^m dy, logarithmic when m = -1.
inline double power_integral(double y1, double y2, double m) {
  const double p = m + 1.0;
  const double lr = std::log(y2 / y1);
  if (std::abs(p) < 1e-12) return lr;
  return std::pow(y1, p) * std::expm1(p * lr) / p;
}

// ∫_0^w p(t) (t + a)^(-ν) dt, a > 0. Narrow segments (w <= a/10) go through
// 8-point Gauss–Legendre, which is exact to rounding there; wide ones use the
// closed-form antiderivative after the substitution y = t + a.
inline double segment_kernel_integral(std::span<const double> c, double w, double a, double nu) {
  if (w <= 0.1 * a) {
    return quad::gauss_legendre8([&](double t) { return poly::eval(c, t) * inv_pow(t + a, nu); }, 0.0, w);
  }
  double total = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k] == 0.0) continue;
    double term = 0.0;
    for (std::size_t j = 0; j <= k; ++j) {
      const double coeff = poly::binomial(k, j) * std::pow(-a, static_cast<double>(k - j));
      term += coeff * power_integral(a, a + w, static_cast<double>(j) - nu);
    }
    total += c[k] * term;
  }
  return total;
}

template <typename Visit>
void for_each_piece(const HeightDistribution& f, Visit&& visit) {
  if (f.is_analytic()) {
    for (const auto& seg : f.segments()) visit(seg.lo, seg.width(), std::span<const double>(seg.coeffs));
    return;
  }
  const auto& smp = f.sampled_form();
  for (std::size_t i = 0; i + 1 < smp.values.size(); ++i) {
    const double v0 = smp.values[i], v1 = smp.values[i + 1];
    if (v0 == 0.0 && v1 == 0.0) continue;
    const double c[2] = {v0, (v1 - v0) / smp.bin_width};
    visit(smp.origin + static_cast<double>(i) * smp.bin_width, smp.bin_width, std::span<const double>(c, 2));
  }
}

}  // namespace detail

inline double plate_plate(const Kernel& k, double d) {
  validate(k);
  if (!(d > 0.0)) throw DomainError("plate-plate separation must be positive");
  return k.alpha * detail::inv_pow(d, k.nu);
}

enum class Integration {
  exact,     // segment-wise antiderivatives
  adaptive,  // globally adaptive Gauss–Kronrod per segment, relative target 1e-9
};

inline double pa_interaction(const HeightDistribution& f, const Kernel& k, double d,
                             Integration method = Integration::exact) {
  validate(k);
  if (!(d > 0.0)) throw DomainError("separation d must be positive");
  double total = 0.0;
  if (method == Integration::exact) {
    detail::for_each_piece(f, [&](double lo, double w, std::span<const double> c) {
      total += detail::segment_kernel_integral(c, w, lo + d, k.nu);
    });
  } else {
    detail::for_each_piece(f, [&](double lo, double w, std::span<const double> c) {
      const double a = lo + d;
      total += quad::integrate_adaptive(
          [&](double t) { return poly::eval(c, t) * std::pow(t + a, -k.nu); }, 0.0, w);
    });
  }
  return k.alpha * total;
}

inline constexpr double default_reference_separation = 300.0;  // nm

inline double far_field_subtracted(const HeightDistribution& f, const Kernel& k, double d,
                                   double d_ref = default_reference_separation) {
  if (!(d_ref > 0.0)) throw DomainError("reference separation must be positive");
  return pa_interaction(f, k, d) - pa_interaction(f, k, d_ref);
}

struct CorrectionConfig {
  double beta = 1.0;
};

// First gradient correction beyond PA: β ∫ g(s - d) α/s^ν ds.
inline double gradient_correction(const HeightDistribution& g, const Kernel& k, double d,
                                  const CorrectionConfig& cfg = {}) {
  if (!std::isfinite(cfg.beta)) throw InvalidParameter("beta must be finite");
  if (cfg.beta == 0.0) {
    if (!(d > 0.0)) throw DomainError("separation d must be positive");
    return 0.0;
  }
  return cfg.beta * pa_interaction(g, k, d);
}

// ---------------------------------------------------------------------------

struct DiagnosticPoint {
  double d = 0.0;
  double pa = 0.0;
  double correction = 0.0;
  double ratio = 0.0;        // correction / PA
  double slope_ratio = 0.0;  // (∂_d correction) / (∂_d PA)
};

struct ExactnessReport {
  std::vector<DiagnosticPoint> points;
  bool asymptotically_exact = false;
};

inline constexpr double exactness_threshold = 0.01;

namespace detail {

inline void require_increasing(std::span<const double> d_list) {
  if (d_list.empty()) throw InvalidParameter("separation list is empty");
  for (std::size_t i = 0; i < d_list.size(); ++i) {
    if (!(d_list[i] > 0.0)) throw DomainError("separations must be positive");
    if (i > 0 && !(d_list[i] > d_list[i - 1])) throw InvalidParameter("separations must be strictly increasing");
  }
}

}  // namespace detail

// Compares the gradient correction (β = 1) with the PA term per separation.
// Besides the plain ratio, the ratio of d-derivatives is reported; the
// derivative of ∫ f(u) α/(u+d)^ν du is -να ∫ f(u)/(u+d)^(ν+1) du, so it is
// computed exactly with the kernel exponent raised by one. A shape is flagged
// asymptotically exact when the derivative ratio stays below 0.01 and does not
// grow towards smaller d over the smallest decade of the list.
inline ExactnessReport exactness_diagnostic(const HeightDistribution& f, const HeightDistribution& g,
                                            const Kernel& k, std::span<const double> d_list) {
  detail::require_increasing(d_list);
  const Kernel steeper{k.alpha, k.nu + 1.0, k.label};
  ExactnessReport report;
  for (double d : d_list) {
    DiagnosticPoint p;
    p.d = d;
    p.pa = pa_interaction(f, k, d);
    p.correction = gradient_correction(g, k, d);
    p.ratio = p.pa != 0.0 ? p.correction / p.pa : 0.0;
    const double dpa = pa_interaction(f, steeper, d);
    const double dcorr = gradient_correction(g, steeper, d);
    p.slope_ratio = dpa != 0.0 ? dcorr / dpa : 0.0;
    report.points.push_back(p);
  }
  const double decade_end = 10.0 * d_list.front() * (1.0 + 1e-12);
  bool exact = true;
  double previous = -1.0;
  for (const auto& p : report.points) {
    if (p.d > decade_end) break;
    const double r = std::abs(p.slope_ratio);
    if (!(r < exactness_threshold)) exact = false;
    if (previous >= 0.0 && r < previous * (1.0 - 1e-9) - 1e-300) exact = false;
    previous = r;
  }
  report.asymptotically_exact = exact;
  return report;
}

// ---------------------------------------------------------------------------

struct InteractionCurve {
  std::vector<double> d;
  std::vector<double> values;
  std::optional<double> d_ref;
  Kernel kernel;
  std::optional<std::vector<double>> correction;
};

// Evaluates I_PA on each separation, optionally minus its value at d_ref.
// When a gradient density is supplied the correction column is filled the
// same way (subtracted at d_ref as well).
inline InteractionCurve sweep(const HeightDistribution& f, const Kernel& k, std::span<const double> d_list,
                              std::optional<double> subtract_at = std::nullopt,
                              const HeightDistribution* gradient = nullptr, const CorrectionConfig& cfg = {}) {
  detail::require_increasing(d_list);
  if (subtract_at && !(*subtract_at > 0.0)) throw DomainError("reference separation must be positive");
  InteractionCurve curve;
  curve.kernel = k;
  curve.d_ref = subtract_at;
  curve.d.assign(d_list.begin(), d_list.end());
  const double base = subtract_at ? pa_interaction(f, k, *subtract_at) : 0.0;
  curve.values.reserve(d_list.size());
  for (double d : d_list) curve.values.push_back(pa_interaction(f, k, d) - base);
  if (gradient) {
    const double cbase = subtract_at ? gradient_correction(*gradient, k, *subtract_at, cfg) : 0.0;
    std::vector<double> corr;
    for (double d : d_list) corr.push_back(gradient_correction(*gradient, k, d, cfg) - cbase);
    curve.correction = std::move(corr);
  }
  return curve;
}

// Total transfer relative to the far field, when curves carry the near-field
// excess over the reference separation: (I_sub + far)/far.
inline double far_field_ratio(double subtracted, double far_field) { return 1.0 + subtracted / far_field; }

// `d_nm,I_nW[,corr_nW,ratio][,farfield_ratio]`, 17 significant digits.
inline void write_curve_csv(std::ostream& os, const InteractionCurve& c,
                            std::optional<double> far_field = std::nullopt) {
  os << "d_nm,I_nW";
  if (c.correction) os << ",corr_nW,ratio";
  if (far_field) os << ",farfield_ratio";
  os << '\n';
  for (std::size_t i = 0; i < c.d.size(); ++i) {
    os << fmt17(c.d[i]) << ',' << fmt17(c.values[i]);
    if (c.correction) {
      const double corr = (*c.correction)[i];
      os << ',' << fmt17(corr) << ',' << fmt17(c.values[i] != 0.0 ? corr / c.values[i] : 0.0);
    }
    if (far_field) os << ',' << fmt17(far_field_ratio(c.values[i], *far_field));
    os << '\n';
  }
}

// n log-spaced points per decade from lo to hi inclusive.
inline std::vector<double> log_spaced(double lo, double hi, int per_decade) {
  if (!(lo > 0.0) || !(hi >= lo) || per_decade < 1) throw InvalidParameter("bad log-spaced grid");
  const double decades = std::log10(hi / lo);
  const auto n = static_cast<std::size_t>(std::llround(decades * per_decade));
  std::vector<double> out;
  for (std::size_t i = 0; i <= n; ++i)
    out.push_back(n == 0 ? lo : lo * std::pow(10.0, decades * static_cast<double>(i) / static_cast<double>(n)));
  if (n > 0) out.back() = hi;
  return out;
}

}  // namespace proxima
