#pragma once

// Small-d behaviour of I_PA(d) for a kernel α/s^ν and a distribution of case n:
//
//   ν > n   I ≈ A d^-(ν-n),  A = α f^(n-1)(0) / ((n-1)! (ν-n))
//   ν = n   I ≈ -b ln(d/d0), b = α f^(n-1)(0) / (n-1)!
//   ν < n   I → const
//
// plus a fitter that classifies a numeric curve into one of these forms.

#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "proxima/case_number.hpp"
#include "proxima/error.hpp"
#include "proxima/format.hpp"
#include "proxima/interaction.hpp"

namespace proxima {

enum class LawForm { constant, logarithmic, power_law };

inline std::string to_string(LawForm f) {
  switch (f) {
    case LawForm::constant: return "constant";
    case LawForm::logarithmic: return "logarithmic";
    case LawForm::power_law: return "power-law";
  }
  return "?";
}

// Relative L2 misfit of each candidate form on the fit window.
struct FitResiduals {
  double constant = std::numeric_limits<double>::infinity();
  double logarithmic = std::numeric_limits<double>::infinity();
  double power_law = std::numeric_limits<double>::infinity();
};

struct AsymptoticLaw {
  LawForm form = LawForm::constant;
  // power law: A in A·d^-p; logarithmic: b in -b·ln(d/d0); constant: the
  // fitted level (never predicted).
  std::optional<double> prefactor;
  std::optional<double> exponent;  // power law only
  std::optional<double> d0;        // logarithmic, fitted only
  int case_n = 0;
  double nu = 0.0;
  // Fit-only diagnostics.
  bool ambiguous = false;
  std::optional<double> local_exponent;  // -d ln(-dI/d ln d)/d ln d over the window
  std::optional<FitResiduals> residuals;
};

inline constexpr double marginal_tolerance = 1e-12;

inline AsymptoticLaw predict(const CaseReport& report, const Kernel& kernel) {
  validate(kernel);
  if (!(kernel.nu > 0.0)) throw InvalidParameter("prediction needs nu > 0");
  if (report.case_number < 1) throw InvalidParameter("case number must be at least 1");
  const int n = report.case_number;
  AsymptoticLaw law;
  law.case_n = n;
  law.nu = kernel.nu;
  const double leading = kernel.alpha * report.leading_coefficient;
  const double gap = kernel.nu - n;
  if (std::abs(gap) < marginal_tolerance) {
    law.form = LawForm::logarithmic;
    law.prefactor = leading / std::tgamma(static_cast<double>(n));
  } else if (gap > 0.0) {
    // ∫₀^∞ s^(n-1)/(n-1)!·(s+d)^-ν ds = d^(n-ν)·Γ(ν-n)/Γ(ν). For n = 1 this is
    // the familiar 1/(ν-1); for n > 1 it is smaller than 1/((n-1)!(ν-n)).
    law.form = LawForm::power_law;
    law.prefactor = leading * std::exp(std::lgamma(gap) - std::lgamma(kernel.nu));
    law.exponent = gap;
  } else {
    law.form = LawForm::constant;
  }
  return law;
}

inline int compose_cases(std::span<const int> cases) {
  if (cases.empty()) throw InvalidParameter("case list is empty");
  int total = 0;
  for (int c : cases) {
    if (c < 1) throw InvalidParameter("case numbers must be >= 1");
    total += c;
  }
  return total;
}

inline int compose_cases(std::initializer_list<int> cases) {
  return compose_cases(std::span<const int>(cases.begin(), cases.size()));
}

// ---------------------------------------------------------------------------

struct FitWindow {
  double lo = 0.0, hi = 0.0;
};

struct FitOptions {
  // Local exponent p of D = -dI/d ln d ∝ d^-p decides the form:
  //   p >= power_min -> power law, |p| <= log_band -> logarithmic,
  //   p <= -constant_min -> constant; anything else is reported ambiguous.
  double power_min = 0.1;
  double log_band = 0.05;
  double constant_min = 0.1;
  std::size_t min_points = 8;
};

namespace detail {

struct LineFit {
  double intercept = 0.0, slope = 0.0;
};

inline LineFit least_squares_line(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("degenerate abscissae in fit window");
  const double slope = sxy / sxx;
  return {my - slope * mx, slope};
}

inline double relative_misfit(std::span<const double> y, std::span<const double> model) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    num += (y[i] - model[i]) * (y[i] - model[i]);
    den += y[i] * y[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace detail

// Works on D(d) = -dI/d ln d (second-order differences on the non-uniform
// ln d grid), which removes additive offsets such as a far-field
// subtraction. A power law in I is a power law in D with the same exponent;
// a logarithm gives constant D; a constant limit gives D → 0 like a positive
// power of d. The window defaults to the smallest decade of the curve.
inline AsymptoticLaw fit_scaling(const InteractionCurve& curve, std::optional<FitWindow> window = std::nullopt,
                                 const FitOptions& opt = {}) {
  const auto& d = curve.d;
  const auto& I = curve.values;
  if (d.size() != I.size()) throw InvalidParameter("curve columns differ in length");
  if (d.empty()) throw FitError("empty curve");
  const FitWindow w = window.value_or(FitWindow{d.front(), 10.0 * d.front() * (1.0 + 1e-12)});
  if (!(w.lo > 0.0) || !(w.hi > w.lo)) throw InvalidParameter("fit window must satisfy 0 < lo < hi");

  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] >= w.lo * (1.0 - 1e-12) && d[i] <= w.hi) idx.push_back(i);
  if (idx.size() < opt.min_points)
    throw FitError("fit window [" + fmt6(w.lo) + ", " + fmt6(w.hi) + "] nm holds " + std::to_string(idx.size()) +
                   " points; at least " + std::to_string(opt.min_points) + " are needed");

  std::vector<double> lx, lI;
  for (std::size_t i : idx) {
    lx.push_back(std::log(d[i]));
    lI.push_back(I[i]);
  }

  // D at window points that have neighbours on both sides in the full curve.
  std::vector<double> xD, D;
  for (std::size_t i : idx) {
    if (i == 0 || i + 1 >= d.size()) continue;
    const double x0 = std::log(d[i - 1]), x1 = std::log(d[i]), x2 = std::log(d[i + 1]);
    const double h1 = x1 - x0, h2 = x2 - x1;
    const double deriv = -h2 / (h1 * (h1 + h2)) * I[i - 1] + (h2 - h1) / (h1 * h2) * I[i] +
                         h1 / (h2 * (h1 + h2)) * I[i + 1];
    xD.push_back(x1);
    D.push_back(-deriv);
  }

  AsymptoticLaw law;
  law.nu = curve.kernel.nu;
  FitResiduals res;

  const double mean_I = std::accumulate(lI.begin(), lI.end(), 0.0) / static_cast<double>(lI.size());
  res.constant = detail::relative_misfit(lI, std::vector<double>(lI.size(), mean_I));

  // I = a + c·ln d, i.e. b = -c and ln d0 = a/b.
  const auto logfit = detail::least_squares_line(lx, lI);
  {
    std::vector<double> model;
    for (double x : lx) model.push_back(logfit.intercept + logfit.slope * x);
    res.logarithmic = detail::relative_misfit(lI, model);
  }

  double max_abs_I = 0.0;
  for (double v : lI) max_abs_I = std::max(max_abs_I, std::abs(v));
  bool decaying = D.size() >= 3;
  for (double v : D) decaying = decaying && v > 1e-13 * max_abs_I;

  auto set_constant = [&] {
    law.form = LawForm::constant;
    law.prefactor = mean_I;
  };
  auto set_log = [&] {
    law.form = LawForm::logarithmic;
    law.prefactor = -logfit.slope;
    if (logfit.slope != 0.0) law.d0 = std::exp(logfit.intercept / -logfit.slope);
  };

  if (!decaying) {
    set_constant();
    law.residuals = res;
    return law;
  }

  std::vector<double> lD;
  for (double v : D) lD.push_back(std::log(v));
  const auto pfit = detail::least_squares_line(xD, lD);
  const double p = -pfit.slope;
  law.local_exponent = p;

  if (p > 0.0) {
    // I = c + A d^-p with p held at the D estimate; linear in (c, A).
    std::vector<double> basis;
    for (double x : lx) basis.push_back(std::exp(-p * x));
    const auto lin = detail::least_squares_line(basis, lI);
    std::vector<double> model;
    for (double b : basis) model.push_back(lin.intercept + lin.slope * b);
    res.power_law = detail::relative_misfit(lI, model);
  }
  law.residuals = res;

  auto set_power = [&] {
    law.form = LawForm::power_law;
    law.exponent = p;
    law.prefactor = std::exp(pfit.intercept) / p;
  };

  if (p >= opt.power_min) {
    set_power();
  } else if (std::abs(p) <= opt.log_band) {
    set_log();
  } else if (p <= -opt.constant_min) {
    set_constant();
  } else {
    law.ambiguous = true;
    if (p > 0.0 && p - opt.log_band > opt.power_min - p)
      set_power();
    else if (p < 0.0 && -p - opt.log_band > opt.constant_min + p)
      set_constant();
    else
      set_log();
  }
  return law;
}

// ---------------------------------------------------------------------------

struct VerificationReport {
  AsymptoticLaw predicted;
  AsymptoticLaw fitted;
  double tolerance = 0.0;
  bool form_ok = false;
  bool prefactor_ok = true;
  bool exponent_ok = true;
  bool pass = false;
  std::string text;
};

namespace detail {

inline bool within(double expected, double actual, double tol) {
  return std::abs(actual - expected) <= tol * std::abs(expected);
}

inline std::string opt_field(const std::optional<double>& v) { return v ? fmt17(*v) : std::string(); }
inline std::string opt_short(const std::optional<double>& v) { return v ? fmt6(*v) : std::string("-"); }

}  // namespace detail

// Form must match exactly and the fit must not be ambiguous; prefactor and
// exponent are compared with relative tolerance wherever the prediction
// carries them (a constant level is never predicted).
inline VerificationReport verify(const AsymptoticLaw& predicted, const AsymptoticLaw& fitted, double tol) {
  if (!(tol > 0.0)) throw InvalidParameter("verification tolerance must be positive");
  VerificationReport r;
  r.predicted = predicted;
  r.fitted = fitted;
  r.tolerance = tol;
  r.form_ok = predicted.form == fitted.form && !fitted.ambiguous;
  if (r.form_ok && predicted.prefactor)
    r.prefactor_ok = fitted.prefactor && detail::within(*predicted.prefactor, *fitted.prefactor, tol);
  if (r.form_ok && predicted.exponent)
    r.exponent_ok = fitted.exponent && detail::within(*predicted.exponent, *fitted.exponent, tol);
  r.pass = r.form_ok && r.prefactor_ok && r.exponent_ok;

  std::ostringstream os;
  os << "case n = " << predicted.case_n << ", nu = " << fmt6(predicted.nu) << '\n';
  os << "  form       predicted " << to_string(predicted.form) << ", fitted " << to_string(fitted.form)
     << (fitted.ambiguous ? " (ambiguous)" : "") << (r.form_ok ? "  ok" : "  MISMATCH") << '\n';
  os << "  prefactor  predicted " << detail::opt_short(predicted.prefactor) << ", fitted "
     << detail::opt_short(fitted.prefactor) << (r.prefactor_ok ? "  ok" : "  FAIL") << '\n';
  os << "  exponent   predicted " << detail::opt_short(predicted.exponent) << ", fitted "
     << detail::opt_short(fitted.exponent) << (r.exponent_ok ? "  ok" : "  FAIL") << '\n';
  if (fitted.d0) os << "  d0 (fit)   " << fmt6(*fitted.d0) << " nm\n";
  if (!r.form_ok && fitted.residuals) {
    const auto& res = *fitted.residuals;
    os << "  residuals  constant " << fmt6(res.constant) << ", logarithmic " << fmt6(res.logarithmic)
       << ", power-law " << fmt6(res.power_law);
    if (fitted.local_exponent) os << " (local exponent " << fmt6(*fitted.local_exponent) << ")";
    os << '\n';
  }
  os << "  tolerance  " << fmt6(tol) << "  => " << (r.pass ? "PASS" : "FAIL") << '\n';
  r.text = os.str();
  return r;
}

inline constexpr const char* verification_csv_header =
    "shape,case_n,nu,form_pred,form_fit,prefactor_pred,prefactor_fit,exponent_pred,exponent_fit,pass";

inline std::string csv_row(const VerificationReport& r, const std::string& shape) {
  return shape + ',' + std::to_string(r.predicted.case_n) + ',' + fmt17(r.predicted.nu) + ',' +
         to_string(r.predicted.form) + ',' + to_string(r.fitted.form) + ',' +
         detail::opt_field(r.predicted.prefactor) + ',' + detail::opt_field(r.fitted.prefactor) + ',' +
         detail::opt_field(r.predicted.exponent) + ',' + detail::opt_field(r.fitted.exponent) + ',' +
         (r.pass ? "true" : "false");
}

}  // namespace proxima
