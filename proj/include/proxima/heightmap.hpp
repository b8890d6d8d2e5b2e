#pragma once

// Discrete separation maps S(x, y) and the distributions extracted from them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "proxima/distribution.hpp"
#include "proxima/distribution_io.hpp"
#include "proxima/error.hpp"
#include "proxima/format.hpp"

namespace proxima {

// Row-major grid: values[j*nx + i] is S at column i (x) and row j (y).
struct Heightmap {
  std::size_t nx = 0, ny = 0;
  double dx = 1.0, dy = 1.0;
  std::vector<double> values;
  bool contact_shifted = false;

  double at(std::size_t i, std::size_t j) const { return values[j * nx + i]; }
  double cell_area() const { return dx * dy; }
  double total_area() const { return static_cast<double>(nx) * dx * static_cast<double>(ny) * dy; }
};

inline void validate(const Heightmap& hm) {
  if (hm.nx < 2 || hm.ny < 2) throw InvalidParameter("heightmap needs at least 2x2 cells");
  if (!(hm.dx > 0.0) || !(hm.dy > 0.0)) throw InvalidParameter("grid spacings must be positive");
  if (hm.values.size() != hm.nx * hm.ny) throw InvalidParameter("heightmap value count does not match nx*ny");
  for (double v : hm.values)
    if (!std::isfinite(v)) throw InvalidParameter("heightmap contains non-finite values");
}

// Histogram of separations, one weight (area) per bin [kΔ, (k+1)Δ).
struct EmpiricalDistribution {
  double bin_width = 0.0;
  std::vector<double> weights;

  double total() const {
    double t = 0.0;
    for (double w : weights) t += w;
    return t;
  }
  std::size_t nonempty_bins() const {
    return static_cast<std::size_t>(std::count_if(weights.begin(), weights.end(), [](double w) { return w > 0.0; }));
  }
  double center(std::size_t k) const { return (static_cast<double>(k) + 0.5) * bin_width; }

  // Densities weight/Δ placed at the bin centres.
  HeightDistribution density() const {
    std::vector<double> v(weights.size());
    for (std::size_t k = 0; k < weights.size(); ++k) v[k] = weights[k] / bin_width;
    if (v.size() == 1) v.push_back(0.0);
    return HeightDistribution::sampled(0.5 * bin_width, bin_width, std::move(v), false);
  }
};

// Same binning as EmpiricalDistribution, each cell weighted by dx·dy·|∇S|².
struct GradientDistribution {
  double bin_width = 0.0;
  std::vector<double> weights;

  double total() const {
    double t = 0.0;
    for (double w : weights) t += w;
    return t;
  }
  HeightDistribution density() const {
    return EmpiricalDistribution{bin_width, weights}.density();
  }
};

struct GaussianFit {
  double sigma = 0.0;
  double s0 = 0.0;
  double residual = 0.0;  // ||model - data||₂ / ||data||₂ on unit-area densities
};

// ---------------------------------------------------------------------------
// I/O
//
//   # heightmap v1 nx=<int> ny=<int> dx=<nm> dy=<nm>
//   ny rows of nx values, separated by whitespace and/or commas.
// Headerless files are plain CSV matrices; dx and dy then come from the caller.

struct LoadOptions {
  std::optional<double> dx;
  std::optional<double> dy;
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == ',' || text[i] == '\r')) {
      // An empty field between two commas is an error, not a skip.
      if (text[i] == ',' && i + 1 < text.size() && text[i + 1] == ',') return {std::string_view{}};
      ++i;
    }
    if (i >= text.size()) break;
    const std::size_t start = i;
    while (i < text.size() && text[i] != ' ' && text[i] != '\t' && text[i] != ',' && text[i] != '\r') ++i;
    out.push_back(text.substr(start, i - start));
  }
  return out;
}

inline std::string header_value(std::string_view header, std::string_view key, std::size_t line) {
  const std::string needle = std::string(key) + "=";
  const auto pos = header.find(needle);
  if (pos == std::string_view::npos) throw ParseError("heightmap header lacks '" + std::string(key) + "'", line);
  auto rest = header.substr(pos + needle.size());
  const auto end = rest.find_first_of(" \t");
  return std::string(rest.substr(0, end));
}

}  // namespace detail

inline Heightmap read_heightmap(std::istream& is, const LoadOptions& opt = {}) {
  Heightmap hm;
  std::optional<std::size_t> want_nx, want_ny;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto text = detail::trim_view(line);
    if (text.empty()) continue;
    // Comment lines are skipped; the one naming "heightmap" is the header
    // and must precede the data.
    if (text.front() == '#' && text.find("heightmap") != std::string_view::npos) {
      if (!first) throw ParseError("heightmap header after data or repeated", lineno);
      first = false;
      if (text.find("heightmap v1") == std::string_view::npos) throw ParseError("unsupported heightmap header", lineno);
      try {
        want_nx = std::stoul(detail::header_value(text, "nx", lineno));
        want_ny = std::stoul(detail::header_value(text, "ny", lineno));
        hm.dx = std::stod(detail::header_value(text, "dx", lineno));
        hm.dy = std::stod(detail::header_value(text, "dy", lineno));
      } catch (const ParseError&) {
        throw;
      } catch (const std::exception&) {
        throw ParseError("malformed heightmap header", lineno);
      }
      if (!(hm.dx > 0.0) || !(hm.dy > 0.0) || !std::isfinite(hm.dx) || !std::isfinite(hm.dy))
        throw ParseError("heightmap header spacings must be positive", lineno);
      continue;
    }
    if (text.front() == '#') continue;
    if (first) {
      first = false;
      if (!opt.dx || !opt.dy) throw ParseError("headerless heightmap requires dx and dy", lineno);
      hm.dx = *opt.dx;
      hm.dy = *opt.dy;
    }
    const auto fields = detail::split_fields(text);
    if (fields.size() == 1 && fields[0].empty()) throw ParseError("empty field", lineno);
    if (hm.nx == 0) hm.nx = fields.size();
    if (fields.size() != hm.nx || (want_nx && fields.size() != *want_nx))
      throw ParseError("row has " + std::to_string(fields.size()) + " values, expected " +
                           std::to_string(want_nx.value_or(hm.nx)),
                       lineno);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const double v = detail::parse_double(fields[i], lineno);
      if (!std::isfinite(v))
        throw ParseError("non-finite value at row " + std::to_string(rows) + ", column " + std::to_string(i), lineno);
      hm.values.push_back(v);
    }
    ++rows;
  }
  hm.ny = rows;
  if (want_ny && rows != *want_ny)
    throw ParseError("expected " + std::to_string(*want_ny) + " rows, found " + std::to_string(rows), lineno);
  if (rows == 0) throw ParseError("heightmap has no data rows", lineno);
  validate(hm);
  return hm;
}

inline Heightmap load_heightmap(const std::string& path, const LoadOptions& opt = {}) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open heightmap '" + path + "'");
  return read_heightmap(in, opt);
}

inline void write_heightmap(std::ostream& os, const Heightmap& hm) {
  os << "# heightmap v1 nx=" << hm.nx << " ny=" << hm.ny << " dx=" << fmt17(hm.dx) << " dy=" << fmt17(hm.dy)
     << '\n';
  for (std::size_t j = 0; j < hm.ny; ++j) {
    for (std::size_t i = 0; i < hm.nx; ++i) {
      if (i) os << ' ';
      os << fmt17(hm.at(i, j));
    }
    os << '\n';
  }
}

inline void save_heightmap(const std::string& path, const Heightmap& hm) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write heightmap '" + path + "'");
  write_heightmap(out, hm);
}

// ---------------------------------------------------------------------------

inline Heightmap shift_to_contact(Heightmap hm) {
  if (hm.values.empty()) return hm;
  const double lo = *std::min_element(hm.values.begin(), hm.values.end());
  for (auto& v : hm.values) v -= lo;
  hm.contact_shifted = true;
  return hm;
}

inline double max_separation(const Heightmap& hm) {
  return hm.values.empty() ? 0.0 : *std::max_element(hm.values.begin(), hm.values.end());
}

// Default bin width: support / bins (512 unless told otherwise); a flat map
// falls back to the larger grid spacing.
inline double default_bin_width(const Heightmap& hm, std::size_t bins = 512) {
  const double support = max_separation(hm);
  return support > 0.0 ? support / static_cast<double>(bins) : std::max(hm.dx, hm.dy);
}

namespace detail {

inline std::size_t bin_index(double s, double width) {
  return static_cast<std::size_t>(std::floor(s / width));
}

inline void require_shifted(const Heightmap& hm) {
  if (!hm.contact_shifted) throw PreconditionError("heightmap must be shifted to contact first");
}

}  // namespace detail

inline EmpiricalDistribution empirical_distribution(const Heightmap& hm, double bin_width) {
  detail::require_shifted(hm);
  if (!(bin_width > 0.0)) throw InvalidParameter("bin width must be positive");
  const std::size_t bins = detail::bin_index(max_separation(hm), bin_width) + 1;
  // Integer counts keep the result independent of accumulation order.
  std::vector<std::uint64_t> counts(bins, 0);
  for (double v : hm.values) ++counts[std::min(detail::bin_index(v, bin_width), bins - 1)];
  EmpiricalDistribution out{bin_width, std::vector<double>(bins)};
  for (std::size_t k = 0; k < bins; ++k) out.weights[k] = static_cast<double>(counts[k]) * hm.cell_area();
  return out;
}

// |∇S|² per node, averaged over the triangle fan formed by the node and each
// pair of consecutive neighbours among its eight (E, NE, N, NW, W, SW, S, SE).
// Each triangle carries an exact planar gradient, so the estimate is exact
// wherever the surrounding facets are planar, including apexes, ridges and
// tile boundaries of pyramid tilings where a plain difference stencil mixes
// facets. Border nodes use the triangles that lie inside the grid.
inline std::vector<double> gradient_squared(const Heightmap& hm) {
  static constexpr int di[8] = {1, 1, 0, -1, -1, -1, 0, 1};
  static constexpr int dj[8] = {0, 1, 1, 1, 0, -1, -1, -1};
  const auto nx = static_cast<std::ptrdiff_t>(hm.nx), ny = static_cast<std::ptrdiff_t>(hm.ny);
  std::vector<double> out(hm.values.size());
  for (std::ptrdiff_t j = 0; j < ny; ++j) {
    for (std::ptrdiff_t i = 0; i < nx; ++i) {
      const double c = hm.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      double acc = 0.0;
      int used = 0;
      for (int k = 0; k < 8; ++k) {
        const int k2 = (k + 1) % 8;
        const std::ptrdiff_t ia = i + di[k], ja = j + dj[k], ib = i + di[k2], jb = j + dj[k2];
        if (ia < 0 || ia >= nx || ja < 0 || ja >= ny || ib < 0 || ib >= nx || jb < 0 || jb >= ny) continue;
        // Plane through (0,0,c), (ua, va, a), (ub, vb, b) in physical units.
        const double ua = di[k] * hm.dx, va = dj[k] * hm.dy, ub = di[k2] * hm.dx, vb = dj[k2] * hm.dy;
        const double za = hm.at(static_cast<std::size_t>(ia), static_cast<std::size_t>(ja)) - c;
        const double zb = hm.at(static_cast<std::size_t>(ib), static_cast<std::size_t>(jb)) - c;
        const double det = ua * vb - ub * va;
        const double gx = (za * vb - zb * va) / det, gy = (ua * zb - ub * za) / det;
        acc += gx * gx + gy * gy;
        ++used;
      }
      out[static_cast<std::size_t>(j * nx + i)] = acc / used;
    }
  }
  return out;
}

inline GradientDistribution gradient_distribution(const Heightmap& hm, double bin_width) {
  detail::require_shifted(hm);
  if (!(bin_width > 0.0)) throw InvalidParameter("bin width must be positive");
  const std::size_t bins = detail::bin_index(max_separation(hm), bin_width) + 1;
  const auto g2 = gradient_squared(hm);
  GradientDistribution out{bin_width, std::vector<double>(bins, 0.0)};
  for (std::size_t n = 0; n < g2.size(); ++n)
    out.weights[std::min(detail::bin_index(hm.values[n], bin_width), bins - 1)] += g2[n] * hm.cell_area();
  return out;
}

// ---------------------------------------------------------------------------
// Gaussian roughness fit: Levenberg–Marquardt on (log σ, s0) against bin
// averages of the truncated, renormalised Gaussian.

namespace detail {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

inline std::vector<double> gaussian_bin_model(double sigma, double s0, double width, std::size_t bins) {
  const double norm = truncated_gaussian_norm(sigma, s0);
  std::vector<double> m(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    const double a = static_cast<double>(k) * width, b = a + width;
    m[k] = (normal_cdf((b - s0) / sigma) - normal_cdf((a - s0) / sigma)) / (norm * width);
  }
  return m;
}

inline double sq_misfit(const std::vector<double>& m, const std::vector<double>& y) {
  double r = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) r += (m[k] - y[k]) * (m[k] - y[k]);
  return r;
}

}  // namespace detail

inline GaussianFit fit_gaussian(const EmpiricalDistribution& f) {
  if (f.nonempty_bins() < 8) throw FitError("Gaussian fit needs at least 8 non-empty bins");
  const double total = f.total();
  const double width = f.bin_width;
  const std::size_t bins = f.weights.size();
  std::vector<double> y(bins);
  double mean = 0.0, ynorm = 0.0;
  for (std::size_t k = 0; k < bins; ++k) {
    y[k] = f.weights[k] / (total * width);
    mean += f.center(k) * f.weights[k] / total;
    ynorm += y[k] * y[k];
  }
  double var = 0.0;
  for (std::size_t k = 0; k < bins; ++k) var += (f.center(k) - mean) * (f.center(k) - mean) * f.weights[k] / total;

  double p0 = std::log(std::max(std::sqrt(var), 0.5 * width));  // log σ
  double p1 = mean;                                               // s0
  auto model = [&](double lp, double s0) { return detail::gaussian_bin_model(std::exp(lp), s0, width, bins); };
  auto m = model(p0, p1);
  double cost = detail::sq_misfit(m, y);
  double lambda = 1e-3;
  bool converged = false;
  for (int iter = 0; iter < 200 && !converged; ++iter) {
    const double h0 = 1e-6, h1 = 1e-6 * std::max(std::exp(p0), 1e-12);
    const auto m0 = model(p0 + h0, p1);
    const auto m1 = model(p0, p1 + h1);
    double a00 = 0, a01 = 0, a11 = 0, g0 = 0, g1 = 0;
    for (std::size_t k = 0; k < bins; ++k) {
      const double j0 = (m0[k] - m[k]) / h0, j1 = (m1[k] - m[k]) / h1, r = y[k] - m[k];
      a00 += j0 * j0;
      a01 += j0 * j1;
      a11 += j1 * j1;
      g0 += j0 * r;
      g1 += j1 * r;
    }
    bool improved = false;
    for (int tries = 0; tries < 20 && !improved; ++tries) {
      const double b00 = a00 * (1.0 + lambda), b11 = a11 * (1.0 + lambda);
      const double det = b00 * b11 - a01 * a01;
      if (!(std::abs(det) > 0.0)) break;
      const double dp0 = (b11 * g0 - a01 * g1) / det;
      const double dp1 = (b00 * g1 - a01 * g0) / det;
      const double q0 = p0 + dp0, q1 = std::max(0.0, p1 + dp1);
      const auto mq = model(q0, q1);
      const double cq = detail::sq_misfit(mq, y);
      if (cq < cost) {
        const double rel = (cost - cq) / std::max(cost, 1e-300);
        p0 = q0;
        p1 = q1;
        m = mq;
        cost = cq;
        lambda = std::max(lambda * 0.3, 1e-12);
        improved = true;
        converged = rel < 1e-14;
      } else {
        lambda *= 10.0;
      }
    }
    if (!improved) break;
  }
  GaussianFit fit{std::exp(p0), p1, std::sqrt(cost / ynorm)};
  if (!std::isfinite(fit.sigma) || !std::isfinite(fit.s0)) throw FitError("Gaussian fit diverged");
  return fit;
}

}  // namespace proxima
