#pragma once

// Synthetic separation maps for the model surfaces: a spherical cap, regular
// tilings of square-base pyramids or domes, Gaussian-correlated roughness,
// and pointwise sums of a cap with tilings/roughness.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "proxima/error.hpp"
#include "proxima/heightmap.hpp"

namespace proxima {

struct SphericalCap {
  double radius = 0.0;
};
struct PyramidTiling {
  double h = 0.0, l = 0.0;
};
struct DomeTiling {
  double h = 0.0, l = 0.0;
};
struct GaussianRoughness {
  double sigma = 0.0;
  double xi = 0.0;  // std of the isotropic smoothing kernel
  std::uint64_t seed = 0;
};
using SurfaceLayer = std::variant<PyramidTiling, DomeTiling, GaussianRoughness>;

// Nodes sit at x_i = (i - nx/2)·dx, y_j = (j - ny/2)·dy, so the cap apex and
// one tile centre fall on node (nx/2, ny/2); tiles are centred on multiples
// of l.
struct SurfaceSpec {
  std::size_t nx = 256, ny = 256;
  double dx = 1.0, dy = 1.0;
  std::optional<SphericalCap> cap;
  std::vector<SurfaceLayer> layers;

  // nx×ny grid covering [-extent, extent) in both directions.
  static SurfaceSpec square(std::size_t n, double extent) {
    SurfaceSpec s;
    s.nx = s.ny = n;
    s.dx = s.dy = 2.0 * extent / static_cast<double>(n);
    return s;
  }
};

namespace detail {

inline double tile_coordinate(double x, double l) { return x - l * std::round(x / l); }

// 2·max(|x'|, |y'|)/l ∈ [0, 1] within a tile.
inline double tile_radius(double x, double y, double l) {
  return 2.0 * std::max(std::abs(tile_coordinate(x, l)), std::abs(tile_coordinate(y, l))) / l;
}

inline std::vector<double> gaussian_kernel(double sigma_cells) {
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma_cells));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * static_cast<double>(i * i) / (sigma_cells * sigma_cells));
    k[static_cast<std::size_t>(i + radius)] = v;
    total += v;
  }
  for (auto& v : k) v /= total;
  return k;
}

// Periodic separable smoothing of a row-major field.
inline std::vector<double> smooth_periodic(const std::vector<double>& field, std::size_t nx, std::size_t ny,
                                           double sx, double sy) {
  auto pass = [](const std::vector<double>& in, std::size_t n_outer, std::size_t n_inner, std::size_t stride_outer,
                 std::size_t stride_inner, const std::vector<double>& kernel) {
    std::vector<double> out(in.size(), 0.0);
    const auto r = static_cast<std::ptrdiff_t>(kernel.size() / 2);
    const auto n = static_cast<std::ptrdiff_t>(n_inner);
    for (std::size_t o = 0; o < n_outer; ++o) {
      for (std::ptrdiff_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::ptrdiff_t k = -r; k <= r; ++k) {
          const std::ptrdiff_t src = ((i + k) % n + n) % n;
          acc += kernel[static_cast<std::size_t>(k + r)] * in[o * stride_outer + static_cast<std::size_t>(src) * stride_inner];
        }
        out[o * stride_outer + static_cast<std::size_t>(i) * stride_inner] = acc;
      }
    }
    return out;
  };
  auto rows = sx > 0.0 ? pass(field, ny, nx, nx, 1, gaussian_kernel(sx)) : field;
  return sy > 0.0 ? pass(rows, nx, ny, 1, nx, gaussian_kernel(sy)) : rows;
}

inline std::vector<double> rough_field(const GaussianRoughness& r, std::size_t nx, std::size_t ny, double dx,
                                       double dy) {
  if (!(r.sigma > 0.0) || !(r.xi > 0.0)) throw InvalidParameter("roughness sigma and xi must be positive");
  std::mt19937_64 rng(r.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> noise(nx * ny);
  for (auto& v : noise) v = normal(rng);
  auto field = smooth_periodic(noise, nx, ny, r.xi / dx, r.xi / dy);
  double mean = 0.0;
  for (double v : field) mean += v;
  mean /= static_cast<double>(field.size());
  double var = 0.0;
  for (double v : field) var += (v - mean) * (v - mean);
  const double scale = r.sigma / std::sqrt(var / static_cast<double>(field.size()));
  for (auto& v : field) v = (v - mean) * scale;
  return field;
}

}  // namespace detail

inline Heightmap synthesize_surface(const SurfaceSpec& spec) {
  if (spec.nx < 2 || spec.ny < 2) throw InvalidParameter("grid needs at least 2x2 nodes");
  if (!(spec.dx > 0.0) || !(spec.dy > 0.0)) throw InvalidParameter("grid spacings must be positive");
  if (!spec.cap && spec.layers.empty()) throw InvalidParameter("surface has no components");

  Heightmap hm;
  hm.nx = spec.nx;
  hm.ny = spec.ny;
  hm.dx = spec.dx;
  hm.dy = spec.dy;
  hm.values.assign(spec.nx * spec.ny, 0.0);
  auto x_of = [&](std::size_t i) { return (static_cast<double>(i) - static_cast<double>(spec.nx / 2)) * spec.dx; };
  auto y_of = [&](std::size_t j) { return (static_cast<double>(j) - static_cast<double>(spec.ny / 2)) * spec.dy; };

  if (spec.cap) {
    const double R = spec.cap->radius;
    if (!(R > 0.0)) throw InvalidParameter("cap radius must be positive");
    const double xr = std::max(std::abs(x_of(0)), std::abs(x_of(spec.nx - 1)));
    const double yr = std::max(std::abs(y_of(0)), std::abs(y_of(spec.ny - 1)));
    if (xr * xr + yr * yr > R * R) throw InvalidParameter("cap extent exceeds the sphere radius (sag > R)");
    for (std::size_t j = 0; j < spec.ny; ++j)
      for (std::size_t i = 0; i < spec.nx; ++i) {
        const double r2 = x_of(i) * x_of(i) + y_of(j) * y_of(j);
        hm.values[j * spec.nx + i] += r2 / (R + std::sqrt(R * R - r2));  // R - √(R² - r²)
      }
  }

  for (const auto& layer : spec.layers) {
    if (const auto* p = std::get_if<PyramidTiling>(&layer)) {
      if (!(p->h > 0.0) || !(p->l > 0.0)) throw InvalidParameter("pyramid height and base must be positive");
      for (std::size_t j = 0; j < spec.ny; ++j)
        for (std::size_t i = 0; i < spec.nx; ++i)
          hm.values[j * spec.nx + i] += p->h * detail::tile_radius(x_of(i), y_of(j), p->l);
    } else if (const auto* d = std::get_if<DomeTiling>(&layer)) {
      if (!(d->h > 0.0) || !(d->l > 0.0)) throw InvalidParameter("dome height and base must be positive");
      for (std::size_t j = 0; j < spec.ny; ++j)
        for (std::size_t i = 0; i < spec.nx; ++i) {
          const double u = std::min(detail::tile_radius(x_of(i), y_of(j), d->l), 1.0);
          hm.values[j * spec.nx + i] += d->h * (1.0 - std::sqrt(1.0 - u * u));
        }
    } else {
      const auto field = detail::rough_field(std::get<GaussianRoughness>(layer), spec.nx, spec.ny, spec.dx, spec.dy);
      for (std::size_t n = 0; n < field.size(); ++n) hm.values[n] += field[n];
    }
  }
  return shift_to_contact(std::move(hm));
}

}  // namespace proxima
