#pragma once

// Height distribution functions f(s): the projected area per unit
// separation at distance s above the point of closest approach.
//
// Two representations share one value type:
//   analytic  contiguous piecewise polynomials, each segment written in its
//             local variable t = s - lo;
//   sampled   node values on a uniform grid s_i = origin + i·Δ with linear
//             interpolation in between.
// Both vanish for s < 0 and beyond support_max().

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "proxima/error.hpp"
#include "proxima/polynomial.hpp"

namespace proxima {

struct PolySegment {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> coeffs;  // Σ c_k (s - lo)^k

  double width() const { return hi - lo; }
  double operator()(double s) const { return poly::eval(coeffs, s - lo); }
};

// Parameters of a truncated Gaussian, kept so that the sampled form can be
// regenerated exactly on any grid instead of being interpolated.
struct GaussianSource {
  double sigma = 0.0;
  double s0 = 0.0;
};

class HeightDistribution {
 public:
  struct Analytic {
    std::vector<PolySegment> segments;
  };
  struct Sampled {
    double origin = 0.0;
    double bin_width = 0.0;
    std::vector<double> values;
    std::optional<GaussianSource> gaussian;
  };

  HeightDistribution() = default;

  static HeightDistribution analytic(std::vector<PolySegment> segments, bool unit_area) {
    if (segments.empty()) throw InvalidParameter("analytic distribution needs at least one segment");
    for (std::size_t i = 0; i < segments.size(); ++i) {
      const auto& seg = segments[i];
      if (!(seg.lo < seg.hi)) throw InvalidParameter("segment with lo >= hi");
      if (seg.coeffs.empty()) throw InvalidParameter("segment without coefficients");
      if (seg.lo < 0.0) throw InvalidParameter("segment below s = 0");
      if (i > 0 && segments[i - 1].hi != seg.lo)
        throw InvalidParameter("analytic segments must be contiguous");
    }
    HeightDistribution f;
    f.form_ = Analytic{std::move(segments)};
    f.unit_area_ = unit_area;
    return f;
  }

  static HeightDistribution sampled(double origin, double bin_width, std::vector<double> values,
                                    bool unit_area,
                                    std::optional<GaussianSource> gaussian = std::nullopt) {
    if (!(bin_width > 0.0)) throw InvalidParameter("sampled distribution needs bin_width > 0");
    if (origin < 0.0) throw InvalidParameter("sampled distribution starts below s = 0");
    if (values.empty()) throw InvalidParameter("sampled distribution needs at least one node");
    HeightDistribution f;
    f.form_ = Sampled{origin, bin_width, std::move(values), gaussian};
    f.unit_area_ = unit_area;
    return f;
  }

  bool is_analytic() const { return std::holds_alternative<Analytic>(form_); }
  bool is_sampled() const { return std::holds_alternative<Sampled>(form_); }
  const Analytic& analytic_form() const { return std::get<Analytic>(form_); }
  const Sampled& sampled_form() const { return std::get<Sampled>(form_); }
  std::span<const PolySegment> segments() const { return analytic_form().segments; }

  bool unit_area_normalized() const { return unit_area_; }
  const std::optional<GaussianSource>& gaussian_source() const {
    static const std::optional<GaussianSource> none;
    return is_sampled() ? sampled_form().gaussian : none;
  }

  double support_min() const {
    if (is_analytic()) return segments().front().lo;
    return sampled_form().origin;
  }

  double support_max() const {
    if (is_analytic()) return segments().back().hi;
    const auto& s = sampled_form();
    return s.origin + static_cast<double>(s.values.size() - 1) * s.bin_width;
  }

  double operator()(double s) const {
    if (is_analytic()) {
      const auto segs = segments();
      if (s < segs.front().lo || s > segs.back().hi) return 0.0;
      auto it = std::upper_bound(segs.begin(), segs.end(), s,
                                 [](double x, const PolySegment& seg) { return x < seg.lo; });
      if (it != segs.begin()) --it;
      return (*it)(s);
    }
    const auto& smp = sampled_form();
    const double x = (s - smp.origin) / smp.bin_width;
    const auto last = static_cast<double>(smp.values.size() - 1);
    if (x < 0.0 || x > last) return 0.0;
    if (smp.values.size() == 1) return smp.values[0];
    auto i = static_cast<std::size_t>(std::floor(x));
    if (i >= smp.values.size() - 1) i = smp.values.size() - 2;
    const double frac = x - static_cast<double>(i);
    return smp.values[i] * (1.0 - frac) + smp.values[i + 1] * frac;
  }

 private:
  std::variant<Analytic, Sampled> form_ = Analytic{};
  bool unit_area_ = false;
};

inline double evaluate(const HeightDistribution& f, double s) { return f(s); }

// ∫ f(s) ds: exact on analytic segments, trapezoid on sampled nodes.
inline double projected_area(const HeightDistribution& f) {
  if (f.is_analytic()) {
    double total = 0.0;
    for (const auto& seg : f.segments()) total += poly::integral(seg.coeffs, seg.width());
    return total;
  }
  const auto& smp = f.sampled_form();
  const auto& v = smp.values;
  if (v.size() < 2) return 0.0;
  double total = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) total += v[i];
  return total * smp.bin_width;
}

// Largest value attained; segments are probed densely plus at their ends.
inline double max_value(const HeightDistribution& f) {
  if (f.is_sampled()) {
    const auto& v = f.sampled_form().values;
    return *std::max_element(v.begin(), v.end());
  }
  double best = 0.0;
  for (const auto& seg : f.segments()) {
    constexpr int probes = 256;
    for (int i = 0; i <= probes; ++i) {
      const double t = seg.width() * static_cast<double>(i) / probes;
      best = std::max(best, poly::eval(seg.coeffs, t));
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Catalog shapes

// Smooth sphere of radius R facing a plate: f = 2π(R - s) on [0, R].
inline HeightDistribution sphere_distribution(double radius) {
  if (!(radius > 0.0)) throw InvalidParameter("sphere radius must be positive");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return HeightDistribution::analytic({{0.0, radius, {two_pi * radius, -two_pi}}}, false);
}

// Square-base domes of height h, per unit area: f = 2(h - s)/h².
inline HeightDistribution dome_distribution(double h) {
  if (!(h > 0.0)) throw InvalidParameter("dome height must be positive");
  return HeightDistribution::analytic({{0.0, h, {2.0 / h, -2.0 / (h * h)}}}, true);
}

// Square-base pyramid of height h and base l, apex towards the plate.
// Absolute form 2 s l²/h²; per unit (tile) area 2 s/h².
inline HeightDistribution pyramid_distribution(double h, double l, bool per_unit_area) {
  if (!(h > 0.0) || !(l > 0.0)) throw InvalidParameter("pyramid height and base must be positive");
  const double slope = per_unit_area ? 2.0 / (h * h) : 2.0 * l * l / (h * h);
  return HeightDistribution::analytic({{0.0, h, {0.0, slope}}}, per_unit_area);
}

// s^(n-1)/(n-1)! on [0, width]; the cleanest representative of case n.
inline HeightDistribution monomial_distribution(int n, double width = 1.0) {
  if (n < 1) throw InvalidParameter("monomial case number must be >= 1");
  if (!(width > 0.0)) throw InvalidParameter("monomial width must be positive");
  std::vector<double> c(static_cast<std::size_t>(n), 0.0);
  double fact = 1.0;
  for (int i = 2; i < n; ++i) fact *= i;
  c.back() = 1.0 / fact;
  return HeightDistribution::analytic({{0.0, width, std::move(c)}}, false);
}

// Normalisation of the Gaussian restricted to s >= 0: (1 + erf(s0/(σ√2)))/2.
inline double truncated_gaussian_norm(double sigma, double s0) {
  return 0.5 * (1.0 + std::erf(s0 / (sigma * std::numbers::sqrt2)));
}

inline double truncated_gaussian_density(double sigma, double s0, double s) {
  if (s < 0.0) return 0.0;
  const double z = (s - s0) / sigma;
  return std::exp(-0.5 * z * z) /
         (truncated_gaussian_norm(sigma, s0) * sigma * std::sqrt(2.0 * std::numbers::pi));
}

// Cut-off of the truncated Gaussian support, in units of σ above s0.
inline constexpr double gaussian_support_sigmas = 8.0;

// Gaussian on [0, n·Δ] with n·Δ >= s0 + 8σ, renormalised so that the
// trapezoid area of the nodes is exactly one.
inline HeightDistribution gaussian_on_grid(const GaussianSource& g, double bin_width) {
  const double extent = g.s0 + gaussian_support_sigmas * g.sigma;
  const auto n = static_cast<std::size_t>(std::ceil(extent / bin_width - 1e-9));
  std::vector<double> v(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    v[i] = truncated_gaussian_density(g.sigma, g.s0, static_cast<double>(i) * bin_width);
  auto f = HeightDistribution::sampled(0.0, bin_width, std::move(v), true, g);
  const double area = projected_area(f);
  auto values = f.sampled_form().values;
  for (auto& x : values) x /= area;
  return HeightDistribution::sampled(0.0, bin_width, std::move(values), true, g);
}

inline HeightDistribution truncated_gaussian_distribution(double sigma, double s0,
                                                          std::optional<double> bin_width = {}) {
  if (!(sigma > 0.0)) throw InvalidParameter("roughness sigma must be positive");
  if (!(s0 >= 0.0)) throw InvalidParameter("touching distance s0 must be non-negative");
  const double dx = bin_width.value_or(sigma / 32.0);
  if (!(dx > 0.0)) throw InvalidParameter("bin width must be positive");
  return gaussian_on_grid({sigma, s0}, dx);
}

// ---------------------------------------------------------------------------
// Grid conversion

// Nodes of f on s_i = origin + i·Δ, covering the support. Gaussian sources
// are regenerated exactly; other sampled data is linearly interpolated.
inline HeightDistribution to_sampled(const HeightDistribution& f, double bin_width) {
  if (!(bin_width > 0.0)) throw InvalidParameter("bin width must be positive");
  if (const auto& g = f.gaussian_source()) return gaussian_on_grid(*g, bin_width);
  const double origin = f.is_analytic() ? 0.0 : f.support_min();
  const double span = f.support_max() - origin;
  const auto n = static_cast<std::size_t>(std::ceil(span / bin_width - 1e-9));
  std::vector<double> v(n + 1);
  for (std::size_t i = 0; i <= n; ++i) v[i] = f(origin + static_cast<double>(i) * bin_width);
  return HeightDistribution::sampled(origin, bin_width, std::move(v), f.unit_area_normalized());
}

// ---------------------------------------------------------------------------
// Linear combinations (used for composing gradient densities and for the
// linearity property of the interaction integral).

inline HeightDistribution scaled(const HeightDistribution& f, double factor) {
  if (f.is_analytic()) {
    auto segs = std::vector<PolySegment>(f.segments().begin(), f.segments().end());
    for (auto& seg : segs)
      for (auto& c : seg.coeffs) c *= factor;
    return HeightDistribution::analytic(std::move(segs), false);
  }
  const auto& smp = f.sampled_form();
  auto v = smp.values;
  for (auto& x : v) x *= factor;
  return HeightDistribution::sampled(smp.origin, smp.bin_width, std::move(v), false);
}

namespace detail {

inline std::vector<double> merged_breakpoints(std::vector<double> pts, double scale) {
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double p : pts)
    if (out.empty() || p - out.back() > 1e-12 * scale) out.push_back(p);
  return out;
}

// Polynomial of f restricted to [u, v], re-expanded about u (zero if f is
// zero there). Requires [u, v] to lie inside a single segment or a gap.
inline std::vector<double> local_piece(const HeightDistribution& f, double u, double v) {
  const double mid = 0.5 * (u + v);
  for (const auto& seg : f.segments())
    if (mid >= seg.lo && mid <= seg.hi) return poly::shifted(seg.coeffs, u - seg.lo);
  return {0.0};
}

}  // namespace detail

// a + b, exact for two analytic inputs, on the finer grid otherwise.
inline HeightDistribution sum(const HeightDistribution& a, const HeightDistribution& b) {
  if (a.is_analytic() && b.is_analytic()) {
    std::vector<double> pts;
    for (const auto* f : {&a, &b})
      for (const auto& seg : f->segments()) {
        pts.push_back(seg.lo);
        pts.push_back(seg.hi);
      }
    const double scale = std::max(a.support_max(), b.support_max());
    pts = detail::merged_breakpoints(std::move(pts), scale);
    std::vector<PolySegment> segs;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      auto c = detail::local_piece(a, pts[i], pts[i + 1]);
      poly::add_scaled(c, detail::local_piece(b, pts[i], pts[i + 1]));
      segs.push_back({pts[i], pts[i + 1], std::move(c)});
    }
    return HeightDistribution::analytic(std::move(segs), false);
  }
  double dx = 0.0;
  for (const auto* f : {&a, &b})
    if (f->is_sampled()) dx = dx > 0.0 ? std::min(dx, f->sampled_form().bin_width) : f->sampled_form().bin_width;
  const double hi = std::max(a.support_max(), b.support_max());
  const auto n = static_cast<std::size_t>(std::ceil(hi / dx - 1e-9));
  std::vector<double> v(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double s = static_cast<double>(i) * dx;
    v[i] = a(s) + b(s);
  }
  return HeightDistribution::sampled(0.0, dx, std::move(v), false);
}

}  // namespace proxima
