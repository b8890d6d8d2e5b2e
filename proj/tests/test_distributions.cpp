#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "proxima/case_number.hpp"
#include "proxima/convolution.hpp"
#include "proxima/distribution.hpp"
#include "proxima/distribution_io.hpp"

using namespace proxima;

namespace {

constexpr double pi = std::numbers::pi;

// Closed forms of the sphere ⊗ dome and sphere ⊗ pyramid distributions for s <= h.
double sphere_dome(double R, double h, double s) {
  return 2.0 * pi * s * (6.0 * h * R - 3.0 * h * s - 3.0 * R * s + s * s) / (3.0 * h * h);
}
double sphere_pyramid(double R, double h, double s) { return 2.0 * pi * s * s * (3.0 * R - s) / (3.0 * h * h); }

// Composite Simpson on [a, b] with n (even) panels; oracle for areas.
template <typename F>
double simpson(F&& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

std::vector<HeightDistribution> catalog() {
  return {sphere_distribution(50000), dome_distribution(5000), pyramid_distribution(5000, 5000, true),
          pyramid_distribution(5000, 5000, false), truncated_gaussian_distribution(250, 500)};
}

}  // namespace

// --- catalog shapes --------------------------------------------------------

TEST(Sphere, ValueAtContactAndEdge) {
  const auto f = sphere_distribution(50000);
  EXPECT_NEAR(f(0.0), 2.0 * pi * 50000, 1e-9);
  EXPECT_DOUBLE_EQ(f(50000), 0.0);
  EXPECT_NEAR(f(25000), 2.0 * pi * 25000, 1e-9);
  EXPECT_EQ(f(-1.0), 0.0);
  EXPECT_EQ(f(50001), 0.0);
  EXPECT_FALSE(f.unit_area_normalized());
}

TEST(Sphere, AreaIsPiRSquared) {
  const auto f = sphere_distribution(50000);
  const double oracle = simpson([&](double s) { return 2.0 * pi * (50000 - s); }, 0.0, 50000.0);
  EXPECT_NEAR(projected_area(f), pi * 50000.0 * 50000.0, 1e-6);
  EXPECT_NEAR(projected_area(f) / oracle, 1.0, 1e-12);
}

TEST(Sphere, RejectsNonPositiveRadius) {
  EXPECT_THROW(sphere_distribution(0.0), InvalidParameter);
  EXPECT_THROW(sphere_distribution(-3.0), InvalidParameter);
}

TEST(Dome, UnitAreaAndContactValue) {
  const auto f = dome_distribution(5000);
  EXPECT_DOUBLE_EQ(f(0.0), 4.0e-4);
  EXPECT_NEAR(projected_area(f), 1.0, 1e-14);
  EXPECT_TRUE(f.unit_area_normalized());
  EXPECT_EQ(case_number(f).case_number, 1);
  EXPECT_THROW(dome_distribution(0.0), InvalidParameter);
}

TEST(Pyramid, AbsoluteForm) {
  const auto f = pyramid_distribution(5000, 5000, false);
  EXPECT_NEAR(f(5000), 1.0e4, 1e-9);
  EXPECT_NEAR(projected_area(f), 5000.0 * 5000.0, 1e-6);
  EXPECT_EQ(f(0.0), 0.0);
  const auto report = case_number(f);
  EXPECT_EQ(report.case_number, 2);
  EXPECT_NEAR(report.leading_coefficient, 2.0, 1e-14);  // 2 l²/h²
}

TEST(Pyramid, PerUnitAreaDividesByTileArea) {
  const auto abs = pyramid_distribution(300, 700, false);
  const auto unit = pyramid_distribution(300, 700, true);
  for (double s : {0.0, 10.0, 150.0, 300.0}) EXPECT_NEAR(unit(s) * 700.0 * 700.0, abs(s), 1e-9 * (1 + abs(s)));
  EXPECT_NEAR(projected_area(unit), 1.0, 1e-14);
  EXPECT_THROW(pyramid_distribution(1.0, 0.0, true), InvalidParameter);
  EXPECT_THROW(pyramid_distribution(-1.0, 1.0, true), InvalidParameter);
}

TEST(TruncatedGaussian, NormalisationMatchesErf) {
  EXPECT_NEAR(truncated_gaussian_norm(250, 500), 0.97724986805182079, 1e-12);
  EXPECT_DOUBLE_EQ(truncated_gaussian_norm(250, 0), 0.5);
  EXPECT_NEAR(truncated_gaussian_density(250, 500, 0.0), 2.2104e-4, 1e-7);
  // Independent of the erf expression: Simpson over [0, s0 + 12σ].
  const double area =
      simpson([](double s) { return truncated_gaussian_density(250, 500, s); }, 0.0, 500.0 + 12 * 250.0);
  EXPECT_NEAR(area, 1.0, 1e-10);
}

TEST(TruncatedGaussian, SampledFormIsUnitAreaAndCaseOne) {
  const auto f = truncated_gaussian_distribution(250, 500);
  ASSERT_TRUE(f.is_sampled());
  EXPECT_NEAR(projected_area(f), 1.0, 1e-12);
  EXPECT_NEAR(f.support_max(), 500.0 + 8.0 * 250.0, 250.0 / 32.0);
  EXPECT_NEAR(f(0.0), 2.2104e-4, 1e-7);
  EXPECT_EQ(case_number(f).case_number, 1);
  EXPECT_THROW(truncated_gaussian_distribution(0.0, 1.0), InvalidParameter);
  EXPECT_THROW(truncated_gaussian_distribution(1.0, -1.0), InvalidParameter);
}

TEST(Monomial, CaseAndLeadingCoefficient) {
  for (int n = 1; n <= 5; ++n) {
    const auto r = case_number(monomial_distribution(n));
    EXPECT_EQ(r.case_number, n);
    EXPECT_NEAR(r.leading_coefficient, 1.0, 1e-12);
  }
}

TEST(HeightDistribution, ConstructionInvariants) {
  EXPECT_THROW(HeightDistribution::analytic({}, false), InvalidParameter);
  EXPECT_THROW(HeightDistribution::analytic({{1.0, 1.0, {1.0}}}, false), InvalidParameter);
  EXPECT_THROW(HeightDistribution::analytic({{0.0, 1.0, {}}}, false), InvalidParameter);
  EXPECT_THROW(HeightDistribution::analytic({{0.0, 1.0, {1.0}}, {1.5, 2.0, {1.0}}}, false), InvalidParameter);
  EXPECT_THROW(HeightDistribution::analytic({{-1.0, 1.0, {1.0}}}, false), InvalidParameter);
  EXPECT_THROW(HeightDistribution::sampled(0.0, 0.0, {1.0}, false), InvalidParameter);
  EXPECT_THROW(HeightDistribution::sampled(0.0, 1.0, {}, false), InvalidParameter);
}

TEST(HeightDistribution, SampledInterpolatesLinearly) {
  const auto f = HeightDistribution::sampled(1.0, 0.5, {0.0, 2.0, 4.0}, false);
  EXPECT_DOUBLE_EQ(f(1.25), 1.0);
  EXPECT_DOUBLE_EQ(f(2.0), 4.0);
  EXPECT_EQ(f(0.9), 0.0);
  EXPECT_EQ(f(2.1), 0.0);
  EXPECT_DOUBLE_EQ(projected_area(f), 2.0);
}

// --- convolution -----------------------------------------------------------

TEST(Convolution, SphereDomeMatchesClosedForm) {
  const double R = 50000, h = 5000;
  const auto f = convolve(sphere_distribution(R), dome_distribution(h));
  ASSERT_TRUE(f.is_analytic());
  for (int i = 0; i <= 1000; ++i) {
    const double s = h * i / 1000.0;
    EXPECT_NEAR(f(s), sphere_dome(R, h, s), 1e-10 * (1.0 + sphere_dome(R, h, s)));
  }
  // Beyond the modulation height the sphere is shifted by the mean dome height h/3.
  EXPECT_NEAR(f(20000), 2.0 * pi * (R - 20000 + h / 3.0), 1e-8 * f(20000));
  EXPECT_NEAR(f(5000), 2.0 * pi * (R - 5000 + h / 3.0), 1e-8 * f(5000));
}

TEST(Convolution, SpherePyramidMatchesClosedForm) {
  const double R = 50000, h = 5000;
  const auto f = convolve(sphere_distribution(R), pyramid_distribution(h, 700, true));
  for (int i = 0; i <= 1000; ++i) {
    const double s = h * i / 1000.0;
    EXPECT_NEAR(f(s), sphere_pyramid(R, h, s), 1e-10 * (1.0 + sphere_pyramid(R, h, s)));
  }
}

TEST(Convolution, SampledGridReproducesClosedFormsAtNodes) {
  // Piecewise-linear inputs are represented exactly by their nodes; only the
  // area restoration of the linearly joined result moves the nodes.
  const double R = 50000, h = 5000, dx = h / 2047.0;
  const auto fs = to_sampled(sphere_distribution(R), dx);
  const auto fd = convolve(fs, to_sampled(dome_distribution(h), dx));
  const auto fp = convolve(fs, to_sampled(pyramid_distribution(h, h, true), dx));
  ASSERT_TRUE(fd.is_sampled());
  for (int i = 1; i <= 1000; ++i) {
    const double s = dx * std::round(2047.0 * i / 1000.0);
    EXPECT_NEAR(fd(s), sphere_dome(R, h, s), 1e-7 * sphere_dome(R, h, s)) << s;
    EXPECT_NEAR(fp(s), sphere_pyramid(R, h, s), 1e-7 * sphere_pyramid(R, h, s)) << s;
  }
}

TEST(Convolution, SupportAdditivityIsExactForAnalytic) {
  const auto cat = catalog();
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      EXPECT_EQ(convolve(cat[i], cat[j]).support_max(), cat[i].support_max() + cat[j].support_max());
}

TEST(Convolution, AreaIsMultiplicative) {
  const auto cat = catalog();
  for (const auto& a : cat)
    for (const auto& b : cat) {
      const double expect = projected_area(a) * projected_area(b);
      EXPECT_NEAR(projected_area(convolve(a, b)), expect, 1e-8 * expect);
    }
}

TEST(Convolution, IsCommutative) {
  const auto cat = catalog();
  for (const auto& a : cat)
    for (const auto& b : cat) {
      const auto ab = convolve(a, b), ba = convolve(b, a);
      const double top = ab.support_max();
      const double scale = max_value(ab);
      for (int i = 0; i <= 200; ++i) {
        const double s = top * i / 200.0;
        EXPECT_NEAR(ab(s), ba(s), 1e-10 * scale);
      }
    }
}

TEST(Convolution, StaysNonNegative) {
  const auto cat = catalog();
  for (const auto& a : cat)
    for (const auto& b : cat) {
      const auto f = convolve(a, b);
      const double floor = -1e-12 * max_value(f);
      for (int i = 0; i <= 10000; ++i) ASSERT_GE(f(f.support_max() * i / 10000.0), floor);
    }
}

TEST(Convolution, NarrowGaussianAtContactIsNearIdentity) {
  // The shift is the Gaussian mean σ√(2/π), so the deviation is O(σ).
  const double sigma = 1e-3;
  const auto fs = sphere_distribution(1.0);
  const auto f = convolve(fs, truncated_gaussian_distribution(sigma, 0.0));
  for (double s : {0.1, 0.5, 0.9}) EXPECT_NEAR(f(s), fs(s), 2.0 * pi * sigma);
  EXPECT_NEAR(projected_area(f), pi, 1e-8 * pi);
}

TEST(Convolution, NoticesForNonUnitModulationAndMixedGrids) {
  std::vector<std::string> notices;
  convolve(dome_distribution(10), sphere_distribution(100), &notices);
  ASSERT_EQ(notices.size(), 1u);
  EXPECT_NE(notices[0].find("not unit-area"), std::string::npos);

  notices.clear();
  const auto a = truncated_gaussian_distribution(10, 20, 0.5);
  const auto b = to_sampled(dome_distribution(40), 0.25);
  const auto f = convolve(a, b, &notices);
  ASSERT_EQ(notices.size(), 1u);
  EXPECT_NE(notices[0].find("finer grid"), std::string::npos);
  EXPECT_DOUBLE_EQ(f.sampled_form().bin_width, 0.25);
  EXPECT_NEAR(projected_area(f), 1.0, 1e-6);
}

TEST(Convolution, AnalyticTimesGaussianGrid) {
  const auto f = convolve(sphere_distribution(50000), truncated_gaussian_distribution(10, 20));
  ASSERT_TRUE(f.is_sampled());
  // Δ = min(σ/32, H/256), adjusted to divide the sphere support.
  EXPECT_LE(f.sampled_form().bin_width, 10.0 / 32.0);
  const double cells = 50000 / f.sampled_form().bin_width;
  EXPECT_NEAR(cells, std::round(cells), 1e-6);
  // Far from contact the rough sphere is the smooth one shifted by the mean height.
  const double mean = [] {
    const auto g = truncated_gaussian_distribution(10, 20);
    return simpson([&](double s) { return s * g(s); }, 0.0, g.support_max());
  }();
  EXPECT_NEAR(f(10000), 2.0 * pi * (50000 - 10000 + mean), 1e-6 * f(10000));
}

// --- case numbers ----------------------------------------------------------

TEST(CaseNumber, ClosedFormLeadingCoefficients) {
  const double R = 50000, h = 5000;
  const auto sphere = case_number(sphere_distribution(R));
  EXPECT_EQ(sphere.case_number, 1);
  EXPECT_NEAR(sphere.leading_coefficient, 2 * pi * R, 1e-8);

  const auto sd = case_number(convolve(sphere_distribution(R), dome_distribution(h)));
  EXPECT_EQ(sd.case_number, 2);
  EXPECT_NEAR(sd.leading_coefficient, 4 * pi * R / h, 1e-10);

  const auto sp = case_number(convolve(sphere_distribution(R), pyramid_distribution(h, h, true)));
  EXPECT_EQ(sp.case_number, 3);
  EXPECT_NEAR(sp.leading_coefficient, 4 * pi * R / (h * h), 1e-13);
}

TEST(CaseNumber, AdditiveUnderConvolutionForAllOrderedPairs) {
  const std::vector<std::pair<HeightDistribution, int>> shapes{
      {sphere_distribution(50000), 1},
      {dome_distribution(5000), 1},
      {pyramid_distribution(5000, 5000, true), 2},
      {truncated_gaussian_distribution(250, 500), 1}};
  for (const auto& [a, ca] : shapes)
    for (const auto& [b, cb] : shapes) EXPECT_EQ(case_number(convolve(a, b)).case_number, ca + cb);
}

TEST(CaseNumber, TripleScaleComposition) {
  const auto f = convolve(convolve(sphere_distribution(100000), dome_distribution(1000)),
                          pyramid_distribution(10, 10, true));
  EXPECT_EQ(case_number(f).case_number, 4);
}

TEST(CaseNumber, SampledCopiesAgreeWithAnalytic) {
  for (const auto& f : {sphere_distribution(50000), convolve(sphere_distribution(50000), dome_distribution(5000)),
                        convolve(sphere_distribution(50000), pyramid_distribution(5000, 5000, true))}) {
    const auto s = to_sampled(f, f.support_max() / 4096.0);
    const auto ra = case_number(f), rs = case_number(s);
    EXPECT_EQ(ra.case_number, rs.case_number);
    EXPECT_NEAR(rs.leading_coefficient / ra.leading_coefficient, 1.0, 1e-3);
  }
}

TEST(CaseNumber, UnclassifiableNamesProbedOrders) {
  // s^6 vanishes to order 6, beyond the probed range.
  const auto f = HeightDistribution::analytic({{0.0, 1.0, {0, 0, 0, 0, 0, 0, 1.0}}}, false);
  try {
    case_number(f);
    FAIL() << "expected UnclassifiableError";
  } catch (const UnclassifiableError& e) {
    EXPECT_NE(std::string(e.what()).find("0..5"), std::string::npos);
  }
  EXPECT_THROW(case_number(sphere_distribution(1), CaseOptions{0.0}), InvalidParameter);
  EXPECT_THROW(case_number(sphere_distribution(1), CaseOptions{1.0}), InvalidParameter);
}

TEST(CaseNumber, SegmentStartingAboveZeroVanishesAtContact) {
  const auto f = HeightDistribution::analytic({{0.0, 1.0, {0.0}}, {1.0, 2.0, {1.0}}}, false);
  EXPECT_THROW(case_number(f), UnclassifiableError);
}

// --- serialisation ---------------------------------------------------------

TEST(DistributionIo, AnalyticRoundTripIsBitExact) {
  const auto f = convolve(sphere_distribution(50000), dome_distribution(5000));
  const auto g = from_text(to_text(f));
  ASSERT_TRUE(g.is_analytic());
  ASSERT_EQ(g.segments().size(), f.segments().size());
  for (std::size_t i = 0; i < f.segments().size(); ++i) {
    EXPECT_EQ(g.segments()[i].lo, f.segments()[i].lo);
    EXPECT_EQ(g.segments()[i].hi, f.segments()[i].hi);
    EXPECT_EQ(g.segments()[i].coeffs, f.segments()[i].coeffs);
  }
  EXPECT_EQ(to_text(g), to_text(f));
}

TEST(DistributionIo, SampledRoundTrip) {
  const auto f = truncated_gaussian_distribution(10, 20);
  const auto g = from_text(to_text(f));
  ASSERT_TRUE(g.is_sampled());
  EXPECT_TRUE(g.unit_area_normalized());
  EXPECT_EQ(g.sampled_form().values, f.sampled_form().values);
  EXPECT_NEAR(g.sampled_form().bin_width, f.sampled_form().bin_width, 1e-15);
}

TEST(DistributionIo, HeaderFormat) {
  const auto text = to_text(dome_distribution(2));
  EXPECT_EQ(text.substr(0, text.find('\n')), "# height-distribution v1, kind=analytic, unit_area=1");
}

TEST(DistributionIo, ParseErrorsCarryLineNumbers) {
  EXPECT_THROW(from_text(""), ParseError);
  EXPECT_THROW(from_text("0,1,2\n"), ParseError);
  try {
    from_text("# height-distribution v1, kind=analytic, unit_area=0\n0,1,2\n1,2,x\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(from_text("# height-distribution v1, kind=sampled, unit_area=0\n0,1,2\n"), ParseError);
  EXPECT_THROW(from_text("# height-distribution v1, kind=weird, unit_area=0\n"), ParseError);
}
