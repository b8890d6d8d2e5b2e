#pragma once

// Gradient-weighted height distributions g(s) = ∫dxdy δ(S - d - s) |∇S|²
// for the catalog shapes.
//
// Curved shapes use the small-slope form |∇S|² ≈ 2s/ρ, where ρ is the apex
// radius of curvature. It is exact as s → 0, which is the only regime the
// gradient correction is used to judge, and it keeps g integrable where the
// exact profiles turn vertical (sphere equator, dome rim).

#include <cmath>
#include <numbers>

#include "proxima/convolution.hpp"
#include "proxima/distribution.hpp"

namespace proxima {

// Sphere: ρ = R, g = 2π(R - s)·2s/R.
inline HeightDistribution sphere_gradient_density(double radius) {
  if (!(radius > 0.0)) throw InvalidParameter("sphere radius must be positive");
  constexpr double four_pi = 4.0 * std::numbers::pi;
  return HeightDistribution::analytic({{0.0, radius, {0.0, four_pi, -four_pi / radius}}}, false);
}

// Square-base domes of height h on an l×l tile: apex radius ρ = l²/(4h).
inline HeightDistribution dome_gradient_density(double h, double l) {
  if (!(h > 0.0) || !(l > 0.0)) throw InvalidParameter("dome height and base must be positive");
  // f_D·8hs/l² = 16 s (h - s)/(h l²)
  const double k = 16.0 / (h * l * l);
  return HeightDistribution::analytic({{0.0, h, {0.0, k * h, -k}}}, false);
}

// Pyramid faces are planar with |∇S| = 2h/l.
inline HeightDistribution pyramid_gradient_density(double h, double l, bool per_unit_area) {
  return scaled(pyramid_distribution(h, l, per_unit_area), 4.0 * h * h / (l * l));
}

// Gaussian-correlated roughness (white noise smoothed by a Gaussian kernel of
// standard deviation ξ): slopes are independent of heights with
// ⟨|∇S|²⟩ = σ²/ξ².
inline HeightDistribution roughness_gradient_density(double sigma, double s0, double xi) {
  if (!(xi > 0.0)) throw InvalidParameter("roughness correlation length must be positive");
  return scaled(truncated_gaussian_distribution(sigma, s0), sigma * sigma / (xi * xi));
}

// Gradient density of S = S_c + S_r when the two vary on separated scales:
// the cross term 2∇S_c·∇S_r averages out over a modulation cell, leaving
// g = f_c ⊗ g_r + g_c ⊗ f_r.
inline HeightDistribution compose_gradient(const HeightDistribution& f_base, const HeightDistribution& g_base,
                                           const HeightDistribution& f_mod, const HeightDistribution& g_mod) {
  return sum(convolve(f_base, g_mod), convolve(g_base, f_mod));
}

}  // namespace proxima
