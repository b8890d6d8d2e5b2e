#pragma once

#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "proxima/error.hpp"
#include "proxima/format.hpp"

namespace proxima::quad {

// Fixed 8-point Gauss–Legendre on [a, b].
template <typename F>
double gauss_legendre8(F&& f, double a, double b) {
  static constexpr std::array<double, 4> x{0.18343464249564980, 0.52553240991632899, 0.79666647741362674,
                                           0.96028985649753623};
  static constexpr std::array<double, 4> w{0.36268378337836198, 0.31370664587788729, 0.22238103445337447,
                                           0.10122853629037626};
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < 4; ++i) acc += w[i] * (f(mid - half * x[i]) + f(mid + half * x[i]));
  return acc * half;
}

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

// Gauss–Kronrod 7/15 on [a, b] with the embedded Gauss rule as error estimate.
template <typename F>
Estimate gauss_kronrod15(F&& f, double a, double b) {
  static constexpr std::array<double, 8> xgk{0.991455371120812639206854697526329,
                                             0.949107912342758524526189684047851,
                                             0.864864423359769072789712788640926,
                                             0.741531185599394439863864773280788,
                                             0.586087235467691130294144845693013,
                                             0.405845151377397166906606412076961,
                                             0.207784955007898467600689403773245,
                                             0.0};
  static constexpr std::array<double, 8> wgk{0.022935322010529224963732008058970,
                                             0.063092092629978553290700663189204,
                                             0.104790010322250183839876322541518,
                                             0.140653259715525918745189590510238,
                                             0.169004726639267902826583426598550,
                                             0.190350578064785409913256402421014,
                                             0.204432940075298892414161999234649,
                                             0.209482141084727828012999174891714};
  static constexpr std::array<double, 4> wg{0.129484966168869693270611432679082,
                                            0.279705391489276667901467771423780,
                                            0.381830050505118944950369775488975,
                                            0.417959183673469387755102040816327};
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  const double fc = f(mid);
  double kronrod = fc * wgk[7];
  double gauss = fc * wg[3];
  for (std::size_t i = 0; i < 7; ++i) {
    const double pair = f(mid - half * xgk[i]) + f(mid + half * xgk[i]);
    kronrod += wgk[i] * pair;
    if (i % 2 == 1) gauss += wg[i / 2] * pair;
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

struct AdaptiveOptions {
  double rel_tol = 1e-9;
  double abs_floor = 1e-15;
  std::size_t max_subdivisions = 1'000'000;
};

// Globally adaptive bisection: always split the interval with the largest
// error estimate until Σ error <= max(abs_floor, rel_tol·|Σ value|).
template <typename F>
double integrate_adaptive(F&& f, double a, double b, const AdaptiveOptions& opt = {}) {
  if (a == b) return 0.0;
  struct Piece {
    double a, b;
    Estimate est;
    bool operator<(const Piece& o) const { return est.error < o.est.error; }
  };
  std::priority_queue<Piece> heap;
  auto first = gauss_kronrod15(f, a, b);
  heap.push({a, b, first});
  double total = first.value, error = first.error;
  std::size_t pieces = 1;
  while (error > std::max(opt.abs_floor, opt.rel_tol * std::abs(total))) {
    if (pieces >= opt.max_subdivisions)
      throw NumericError("adaptive quadrature did not converge; achieved relative error " +
                         fmt6(error / std::max(std::abs(total), 1e-300)));
    const Piece worst = heap.top();
    heap.pop();
    const double m = 0.5 * (worst.a + worst.b);
    const auto left = gauss_kronrod15(f, worst.a, m);
    const auto right = gauss_kronrod15(f, m, worst.b);
    total += left.value + right.value - worst.est.value;
    error += left.error + right.error - worst.est.error;
    heap.push({worst.a, m, left});
    heap.push({m, worst.b, right});
    ++pieces;
    if (!(m > worst.a && m < worst.b)) {
      throw NumericError("adaptive quadrature hit floating-point resolution; achieved relative error " +
                         fmt6(error / std::max(std::abs(total), 1e-300)));
    }
  }
  // Re-sum to shed the drift of the running update.
  double resummed = 0.0;
  while (!heap.empty()) {
    resummed += heap.top().est.value;
    heap.pop();
  }
  return resummed;
}

}  // namespace proxima::quad
