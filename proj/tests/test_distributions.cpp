#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "skewt/distributions.hpp"
#include "skewt/quadrature.hpp"

using namespace skewt;

namespace {

double ks_vs_cdf(const Density& d, std::vector<double> s) {
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = d.cdf(s[i]);
    ks = std::max(ks, std::max(f - i / n, (i + 1) / n - f));
  }
  return ks;
}

}  // namespace

TEST_CASE("student t density pins and moments", "[distributions]") {
  StudentTDist d(StudentTParams{5.0, 11.37, 1.2});
  CHECK(d.pdf(11.37) == Catch::Approx(0.316338908185412).epsilon(1e-13));
  CHECK(d.mean() == Catch::Approx(11.37).margin(1e-12));
  CHECK(d.cdf(11.37) == Catch::Approx(0.5).margin(1e-14));
  CHECK(d.quantile(0.9) == Catch::Approx(11.37 + 1.2 * 1.4758840488558216).margin(1e-9));

  StudentTDist cauchy(StudentTParams{1.0, 0.0, 1.0});
  CHECK_THROWS_AS(cauchy.mean(), numeric_error);
}

TEST_CASE("multivariate student t normalizer via polar integration", "[distributions]") {
  StudentTParams pr;
  pr.p = 2;
  pr.nu = 5.0;
  pr.xi = {0.0, 0.0};
  pr.tau = 1.3;
  auto radial = [&](double r) {
    return 2.0 * pi * r * student_t_pdf(pr, std::vector<double>{r, 0.0});
  };
  const double total = integrate_adaptive(radial, 0.0, 2000.0, 1e-10, 4096);
  CHECK(total == Catch::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("skew t pdf closed-form pins", "[distributions]") {
  // one-sided: nu=5, a0=0.7, a1=1/sqrt(3), xi=1, tau=2 at y=2.3
  SkewTOneSidedParams one(5.0, 0.7, 1.0 / std::sqrt(3.0), 1.0, 2.0);
  CHECK(skew_t_one_sided_pdf(one, 2.3) == Catch::Approx(0.17687949185099264).epsilon(1e-12));

  // two-sided: nu=3, a0=2, a1=1/sqrt(3), a2=-2, standardized, at 0
  SkewTTwoSidedParams two(3.0, 2.0, 1.0 / std::sqrt(3.0), -2.0, 0.0, 1.0);
  CHECK(skew_t_two_sided_pdf(two, 0.0) == Catch::Approx(0.4122907193437485).epsilon(1e-12));
  const double den = student_t_cdf(3.0, std::sqrt(3.0)) - student_t_cdf(3.0, -std::sqrt(3.0));
  CHECK(den == Catch::Approx(0.8183098861837907).epsilon(1e-13));
}

TEST_CASE("skew t reduces to student t when both slants vanish", "[distributions]") {
  SkewTOneSidedParams pr(7.0, 0.0, 0.0, 2.5, 1.7);
  StudentTParams base{7.0, 2.5, 1.7};
  for (double y = -6.0; y <= 11.0; y += 0.7) {
    CHECK(skew_t_one_sided_pdf(pr, y) ==
          Catch::Approx(student_t_pdf(base, y)).epsilon(1e-13));
  }
}

TEST_CASE("density table normalizes and roundtrips", "[distributions]") {
  SkewTOneSidedDist d(SkewTOneSidedParams(5.0, 1.2, 1.0 / std::sqrt(3.0), 3.0, 1.4));
  CHECK(std::fabs(d.table().norm - 1.0) < 1e-6);

  for (double p : {0.001, 0.05, 0.1, 0.5, 0.9, 0.99, 0.9999}) {
    const double q = d.quantile(p);
    CHECK(d.cdf(q) == Catch::Approx(p).margin(1e-9));
  }
  for (double y : {-1.0, 2.2, 3.0, 4.5, 9.0}) {
    CHECK(d.quantile(d.cdf(y)) == Catch::Approx(y).margin(1e-7));
  }

  // cdf is the integral of pdf
  const double mass = integrate_adaptive([&](double y) { return d.pdf(y); }, -40.0, 2.0,
                                         1e-12, 4096);
  CHECK(d.cdf(2.0) == Catch::Approx(mass).margin(1e-9));
}

TEST_CASE("two-sided density mean lies between the slant cutoffs", "[distributions]") {
  SkewTTwoSidedDist d(SkewTTwoSidedParams(6.0, 1.5, 0.6, -0.5, 10.0, 2.0));
  CHECK(std::fabs(d.table().norm - 1.0) < 1e-6);
  const double m = d.mean();
  const double quad = integrate_adaptive([&](double y) { return y * d.pdf(y); }, -60.0,
                                         90.0, 1e-8, 4096);
  CHECK(m == Catch::Approx(quad).margin(1e-6));
}

TEST_CASE("sampling is deterministic and matches the cdf", "[distributions]") {
  SkewTOneSidedDist d(SkewTOneSidedParams(5.0, 1.0, 0.6, 0.0, 1.0));
  const auto a = d.sample(5000, 99);
  const auto b = d.sample(5000, 99);
  CHECK(a == b);
  const auto c = d.sample(5000, 100);
  CHECK(a != c);

  const double ks = ks_vs_cdf(d, a);
  const double dkw99 = std::sqrt(std::log(2.0 / 0.01) / (2.0 * 5000.0));
  CHECK(ks < dkw99);
}

TEST_CASE("skew normal analytic mean matches quadrature", "[distributions]") {
  SkewNormalDist one(SkewNormalParams(0.8, 1.3, 2.0, 1.5));
  CHECK(one.mean() == Catch::Approx(2.612855442239943).epsilon(1e-12));

  SkewNormalDist two(SkewNormalParams(0.8, 1.3, 2.0, 1.5), -0.9);
  CHECK(two.mean() == Catch::Approx(2.0331150847615804).epsilon(1e-11));
  CHECK(two.pdf(1.0) == Catch::Approx(0.23408706372687382).epsilon(1e-12));
  CHECK(std::fabs(two.table().norm - 1.0) < 1e-6);
}

TEST_CASE("scale-inv chi-squared distribution", "[distributions]") {
  ScaleInvChiSqDist d(ScaleInvChiSqParams(3.0, 1.5));
  CHECK(d.pdf(2.0) == Catch::Approx(0.22878039089538202).epsilon(1e-12));
  CHECK(d.cdf(1.0) == Catch::Approx(0.08030772655502627).epsilon(1e-11));
  CHECK(d.cdf(2.0) == Catch::Approx(0.33733970967227556).epsilon(1e-11));
  CHECK(d.cdf(5.0) == Catch::Approx(0.7172956929871677).epsilon(1e-11));
  CHECK(d.mean() == Catch::Approx(6.75).epsilon(1e-10));
  CHECK(d.quantile(d.cdf(2.0)) == Catch::Approx(2.0).epsilon(1e-9));
  CHECK(d.pdf(-1.0) == 0.0);

  ScaleInvChiSqDist heavy(ScaleInvChiSqParams(2.0, 1.0));
  CHECK_THROWS_AS(heavy.mean(), numeric_error);

  const auto s = d.sample(4000, 3);
  double below = 0;
  for (double v : s) {
    REQUIRE(v > 0.0);
    if (v <= 2.0) below += 1.0;
  }
  CHECK(below / 4000.0 == Catch::Approx(0.33733970967227556).margin(0.03));
}

TEST_CASE("parameter validation rejects bad inputs", "[distributions]") {
  CHECK_THROWS_AS(StudentTDist(StudentTParams{5.0, 0.0, -1.0}), validation_error);
  CHECK_THROWS_AS(
      SkewTTwoSidedDist(SkewTTwoSidedParams(3.0, -1.0, 0.5, 1.0, 0.0, 1.0)),
      validation_error);  // alpha0 <= alpha2
  SkewTOneSidedParams pv;
  pv.p = 2;
  pv.nu = 3.0;
  pv.alpha1 = {0.5, 0.5};
  pv.xi = {0.0, 0.0};
  pv.tau = 1.0;
  CHECK_THROWS_AS(SkewTOneSidedDist(pv), unsupported_dimension);
  CHECK_THROWS_AS(ScaleInvChiSqDist(ScaleInvChiSqParams(0.0, 1.0)), validation_error);
}

TEST_CASE("json round trip through make_density", "[distributions]") {
  std::vector<std::unique_ptr<Density>> ds;
  ds.push_back(std::make_unique<NormalDist>(1.5, 0.7));
  ds.push_back(std::make_unique<StudentTDist>(StudentTParams{5.0, 11.37, 1.2}));
  ds.push_back(std::make_unique<SkewNormalDist>(SkewNormalParams(0.8, 1.3, 2.0, 1.5)));
  ds.push_back(std::make_unique<SkewTOneSidedDist>(
      SkewTOneSidedParams(5.0, 1.2, 0.57, 3.0, 1.4)));
  ds.push_back(std::make_unique<SkewTTwoSidedDist>(
      SkewTTwoSidedParams(3.0, 2.0, 0.6, -2.0, 0.0, 1.0)));
  ds.push_back(std::make_unique<ScaleInvChiSqDist>(ScaleInvChiSqParams(3.0, 1.5)));

  for (const auto& d : ds) {
    const auto j = d->to_json();
    const auto back = make_density(j);
    CHECK(back->to_json() == j);
    for (double y : {0.5, 1.9, 4.2}) {
      CHECK(back->pdf(y) == Catch::Approx(d->pdf(y)).margin(1e-15));
    }
  }

  CHECK_THROWS_AS(make_density(nlohmann::json{{"family", "weibull"}}), validation_error);
  CHECK_THROWS_AS(make_density(nlohmann::json{{"nu", 3.0}}), validation_error);
}
