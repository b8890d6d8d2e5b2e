#pragma once

// f(s) = ∫_0^s f_c(s') f_r(s - s') ds'
//
// Analytic ⊗ analytic is exact: the result is piecewise polynomial with
// breakpoints at the pairwise sums of the input breakpoints. Anything that
// involves sampled data is carried out on a common uniform grid, where the
// convolution of the two piecewise-linear interpolants is integrated exactly
// cell by cell.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "proxima/distribution.hpp"
#include "proxima/format.hpp"
#include "proxima/polynomial.hpp"

namespace proxima {

namespace detail {

// Contribution of one pair of segments to the result piece [u, v], as a
// polynomial in t = s - u. Returns an empty vector when the pair does not
// overlap on this piece.
inline std::vector<double> segment_pair_convolution(const PolySegment& a, const PolySegment& b,
                                                    double u, double v) {
  const double wa = a.width();
  const double tm = 0.5 * (v - u);
  // X = x - a.lo ranges over [max(0, t + u - b.hi - a.lo), min(wa, t + c)].
  const double c = u - a.lo - b.lo;
  const double lo_shift = u - b.hi - a.lo;
  const bool lower_moves = tm + lo_shift > 0.0;
  const bool upper_moves = tm + c < wa;
  const double lower_mid = lower_moves ? tm + lo_shift : 0.0;
  const double upper_mid = upper_moves ? tm + c : wa;
  if (!(upper_mid > lower_mid)) return {};

  // q(t + c - X) = Σ_k C_k(t) X^k
  const auto& q = b.coeffs;
  std::vector<std::vector<double>> cx(q.size());
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (q[j] == 0.0) continue;
    for (std::size_t k = 0; k <= j; ++k) {
      const double w = q[j] * poly::binomial(j, k) * ((k % 2) ? -1.0 : 1.0);
      poly::add_scaled(cx[k], poly::linear_power(c, 1.0, j - k), w);
    }
  }
  // multiply by p(X)
  const auto& p = a.coeffs;
  std::vector<std::vector<double>> dx(p.size() + q.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    for (std::size_t k = 0; k < cx.size(); ++k)
      if (!cx[k].empty()) poly::add_scaled(dx[i + k], cx[k], p[i]);
  }
  // ∫ dX between the moving or fixed limits
  std::vector<double> out{0.0};
  for (std::size_t k = 0; k < dx.size(); ++k) {
    if (dx[k].empty()) continue;
    const auto hi_pow = upper_moves ? poly::linear_power(c, 1.0, k + 1)
                                    : std::vector<double>{std::pow(wa, static_cast<double>(k + 1))};
    const auto lo_pow = lower_moves ? poly::linear_power(lo_shift, 1.0, k + 1) : std::vector<double>{0.0};
    std::vector<double> diff = hi_pow;
    poly::add_scaled(diff, lo_pow, -1.0);
    poly::add_scaled(out, poly::multiply(dx[k], diff), 1.0 / static_cast<double>(k + 1));
  }
  return out;
}

inline HeightDistribution convolve_analytic(const HeightDistribution& fc, const HeightDistribution& fr) {
  std::vector<double> pts;
  for (const auto& a : fc.segments())
    for (const auto& b : fr.segments())
      for (double x : {a.lo, a.hi})
        for (double y : {b.lo, b.hi}) pts.push_back(x + y);
  const double scale = fc.support_max() + fr.support_max();
  pts = merged_breakpoints(std::move(pts), scale);
  // Support additivity holds exactly: pin the last breakpoint to the sum.
  pts.back() = scale;

  std::vector<PolySegment> segs;
  segs.reserve(pts.size());
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double u = pts[i], v = pts[i + 1];
    std::vector<double> acc{0.0};
    for (const auto& a : fc.segments()) {
      if (a.lo + fr.segments().front().lo >= v || a.hi + fr.segments().back().hi <= u) continue;
      for (const auto& b : fr.segments()) {
        if (a.lo + b.lo >= v || a.hi + b.hi <= u) continue;
        auto piece = segment_pair_convolution(a, b, u, v);
        if (!piece.empty()) poly::add_scaled(acc, piece);
      }
    }
    poly::trim(acc);
    segs.push_back({u, v, std::move(acc)});
  }
  return HeightDistribution::analytic(std::move(segs),
                                      fc.unit_area_normalized() && fr.unit_area_normalized());
}

// Exact convolution of two piecewise-linear node sequences on the same Δ.
inline std::vector<double> convolve_nodes(const std::vector<double>& a, const std::vector<double>& b,
                                          double dx) {
  const std::size_t na = a.size(), nb = b.size();
  std::vector<double> out(na + nb - 1, 0.0);
  if (na < 2 || nb < 2) return out;
  for (std::size_t m = 1; m + 1 < na + nb - 1; ++m) {
    const std::size_t i_lo = m + 1 > nb ? m + 1 - nb : 0;
    const std::size_t i_hi = std::min(na - 2, m - 1);
    double acc = 0.0;
    for (std::size_t i = i_lo; i <= i_hi; ++i) {
      const double a0 = a[i], a1 = a[i + 1];
      const double b0 = b[m - i], b1 = b[m - i - 1];
      acc += (2.0 * (a0 * b0 + a1 * b1) + a0 * b1 + a1 * b0);
    }
    out[m] = acc * dx / 6.0;
  }
  return out;
}

inline HeightDistribution convolve_sampled(const HeightDistribution& fc, const HeightDistribution& fr,
                                           std::vector<std::string>* notices) {
  double dx = 0.0;
  const GaussianSource* gauss = nullptr;
  const HeightDistribution* other = nullptr;
  if (fc.gaussian_source() && fr.is_analytic()) {
    gauss = &*fc.gaussian_source();
    other = &fr;
  } else if (fr.gaussian_source() && fc.is_analytic()) {
    gauss = &*fr.gaussian_source();
    other = &fc;
  }
  if (gauss) {
    // Analytic ⊗ Gaussian: spacing min(σ/32, H/256) with H the analytic support,
    // shrunk so that H is a whole number of cells.
    const double support = other->support_max();
    const double target = std::min(gauss->sigma / 32.0, support / 256.0);
    const double cells = std::ceil(support / target - 1e-9);
    dx = support / cells;
  } else if (fc.is_sampled() && fr.is_sampled()) {
    const double da = fc.sampled_form().bin_width, db = fr.sampled_form().bin_width;
    dx = std::min(da, db);
    if (std::abs(da - db) > 1e-12 * dx && notices)
      notices->push_back("bin widths differ (" + fmt6(da) + " vs " + fmt6(db) +
                         "); resampled to the finer grid");
  } else {
    dx = (fc.is_sampled() ? fc : fr).sampled_form().bin_width;
  }

  auto on_grid = [dx](const HeightDistribution& f) {
    if (f.is_sampled() && !f.gaussian_source() &&
        std::abs(f.sampled_form().bin_width - dx) <= 1e-12 * dx)
      return f;
    return to_sampled(f, dx);
  };
  const auto a = on_grid(fc);
  const auto b = on_grid(fr);
  auto values = convolve_nodes(a.sampled_form().values, b.sampled_form().values, dx);
  // The nodes of the exact convolution, joined linearly, lose O(Δ²) area;
  // restore the product of the input areas.
  const double target = projected_area(a) * projected_area(b);
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) area += 0.5 * (values[i] + values[i + 1]) * dx;
  if (area > 0.0)
    for (auto& v : values) v *= target / area;
  return HeightDistribution::sampled(a.sampled_form().origin + b.sampled_form().origin, dx,
                                     std::move(values),
                                     fc.unit_area_normalized() && fr.unit_area_normalized());
}

}  // namespace detail

// Convolution of a base-shape distribution with a modulation/roughness
// distribution normalised per unit area. When the modulation is not
// unit-area normalised the result is returned as is and a notice recorded.
inline HeightDistribution convolve(const HeightDistribution& base, const HeightDistribution& modulation,
                                   std::vector<std::string>* notices = nullptr) {
  if (!modulation.unit_area_normalized() && notices)
    notices->push_back("modulation distribution is not unit-area normalised; result scaled as-is");
  if (base.is_analytic() && modulation.is_analytic()) return detail::convolve_analytic(base, modulation);
  return detail::convolve_sampled(base, modulation, notices);
}

}  // namespace proxima
