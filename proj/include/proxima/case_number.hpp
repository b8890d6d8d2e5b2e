#pragma once

// Case number 𝒞 of a height distribution: the order n of the first
// non-vanishing Taylor coefficient f^(n-1)(0).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "proxima/distribution.hpp"
#include "proxima/format.hpp"

namespace proxima {

struct CaseReport {
  int case_number = 0;
  double leading_coefficient = 0.0;   // f^(n-1)(0)
  std::vector<double> taylor_coeffs;  // f^(k)(0), k = 0 .. K-1
};

struct CaseOptions {
  double tol = 1e-6;
  int probed_orders = 6;
  // Sampled data only: a polynomial of this degree is fitted by least
  // squares to the nodes in [0, w] with
  //   w = max(min(window_fraction·support, window_bins·Δ), (degree+2)·Δ).
  int degree = 5;
  double window_fraction = 0.05;
  double window_bins = 16.0;
  // Sampled data only: a coefficient also has to exceed `significance` times
  // the change between the degree and degree-1 fits. 0 disables the check.
  double significance = 3.0;
};

namespace detail {

inline std::vector<double> sampled_taylor(const HeightDistribution& f, const CaseOptions& opt, int degree) {
  const auto& smp = f.sampled_form();
  const double dx = smp.bin_width;
  const double support = f.support_max();
  double w = std::min(opt.window_fraction * support, opt.window_bins * dx);
  w = std::max(w, smp.origin + (opt.degree + 2) * dx);

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < smp.values.size(); ++i) {
    const double s = smp.origin + static_cast<double>(i) * dx;
    if (s > w * (1.0 + 1e-12)) break;
    xs.push_back(s / w);
    ys.push_back(smp.values[i]);
  }
  const int deg = std::min<int>(degree, static_cast<int>(xs.size()) - 1);
  if (deg < 0) throw UnclassifiableError("no samples near s = 0");

  Eigen::MatrixXd A(static_cast<Eigen::Index>(xs.size()), deg + 1);
  Eigen::VectorXd y(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t r = 0; r < xs.size(); ++r) {
    double p = 1.0;
    for (int k = 0; k <= deg; ++k) {
      A(static_cast<Eigen::Index>(r), k) = p;
      p *= xs[r];
    }
    y(static_cast<Eigen::Index>(r)) = ys[r];
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);

  std::vector<double> taylor(static_cast<std::size_t>(opt.probed_orders), 0.0);
  double fact = 1.0;
  for (int k = 0; k < opt.probed_orders && k <= deg; ++k) {
    if (k > 1) fact *= k;
    taylor[static_cast<std::size_t>(k)] = fact * c(k) / std::pow(w, k);
  }
  return taylor;
}

inline std::vector<double> analytic_taylor(const HeightDistribution& f, const CaseOptions& opt) {
  std::vector<double> taylor(static_cast<std::size_t>(opt.probed_orders), 0.0);
  const auto& first = f.segments().front();
  if (first.lo > 0.0) return taylor;  // identically zero near s = 0
  for (int k = 0; k < opt.probed_orders; ++k)
    taylor[static_cast<std::size_t>(k)] = poly::derivative_at_zero(first.coeffs, static_cast<std::size_t>(k));
  return taylor;
}

}  // namespace detail

// A probed derivative of order k counts as zero when
// |f^(k)(0)|·support^k / max f < tol.
inline CaseReport case_number(const HeightDistribution& f, const CaseOptions& opt = {}) {
  if (!(opt.tol > 0.0 && opt.tol < 1.0)) throw InvalidParameter("case tolerance must lie in (0, 1)");
  CaseReport report;
  report.taylor_coeffs =
      f.is_analytic() ? detail::analytic_taylor(f, opt) : detail::sampled_taylor(f, opt, opt.degree);
  std::vector<double> spread(report.taylor_coeffs.size(), 0.0);
  if (f.is_sampled() && opt.significance > 0.0 && opt.degree > 1) {
    const auto lower = detail::sampled_taylor(f, opt, opt.degree - 1);
    for (std::size_t k = 0; k < spread.size(); ++k)
      spread[k] = opt.significance * std::abs(report.taylor_coeffs[k] - lower[k]);
  }
  const double fmax = max_value(f);
  const double support = f.support_max();
  if (fmax > 0.0) {
    for (int k = 0; k < opt.probed_orders; ++k) {
      const double d = report.taylor_coeffs[static_cast<std::size_t>(k)];
      if (std::abs(d) * std::pow(support, k) / fmax >= opt.tol && std::abs(d) > spread[static_cast<std::size_t>(k)]) {
        report.case_number = k + 1;
        report.leading_coefficient = d;
        return report;
      }
    }
  }
  throw UnclassifiableError("no Taylor coefficient above tolerance " + fmt6(opt.tol) +
                            " for probed orders 0.." + std::to_string(opt.probed_orders - 1));
}

}  // namespace proxima
