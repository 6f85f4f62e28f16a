#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "skewt/oracle.hpp"
#include "skewt/posterior.hpp"
#include "skewt/quadrature.hpp"

using namespace skewt;

namespace {

// sigma^2 integrated out of the joint (inverse-variance prior included)
double sigma2_integrated(double theta1, double theta2, const TwoSampleSummary& sm) {
  ModelPoint pt;
  pt.theta1 = {theta1};
  pt.theta2 = {theta2};
  auto f = [&](double u) {
    pt.sigma2 = std::exp(u);
    return std::exp(log_joint_density(pt, sm));
  };
  return integrate_adaptive(f, -30.0, 30.0, 1e-13, 4096);
}

// independent reconstruction of the theta1 marginal: integrate the
// sigma^2-collapsed joint over the theta2 region allowed by A
double marginal_indep(double theta1, const TwoSampleSummary& sm, const RestrictionSet& A) {
  const double C = sm.s2 + (sm.x1[0] - theta1) * (sm.x1[0] - theta1);
  const double expo = -(sm.k + 2.0) / 2.0;
  auto kernel = [&](double theta2) {
    const double w = sm.x2[0] - theta2;
    return std::pow(C + w * w, expo);
  };
  double lo, hi;
  if (A.kind == RestrictionKind::PositiveOrthant) {
    lo = sm.x2[0] - 100.0 * std::sqrt(C);
    hi = theta1;
  } else {
    lo = theta1 - A.m;
    hi = theta1 + A.m;
  }
  if (hi <= lo) return 0.0;
  return integrate_adaptive(kernel, lo, hi, 1e-14, 4096);
}

// total mass of the unnormalized marginal via a tan substitution
double marginal_mass(const TwoSampleSummary& sm, const RestrictionSet& A) {
  const double scale = std::sqrt(sm.s2 / sm.k);
  auto f = [&](double u) {
    const double t = std::tan(u);
    const double theta1 = sm.x1[0] + scale * t;
    const double jac = scale * (1.0 + t * t);
    return marginal_posterior_theta1_unnorm(theta1, sm, A) * jac;
  };
  return integrate_adaptive(f, -pi / 2 + 1e-12, pi / 2 - 1e-12, 1e-11, 4096);
}

double skew_normal_pdf_with(const ConditionalTheta1& cond, double y) {
  return std::exp(skew_normal_log_pdf(cond.params, y, cond.alpha2));
}

// mixture over eta of conditional theta1 density times the eta posterior
double conditional_mixture(double theta1, const TwoSampleSummary& sm,
                           const RestrictionSet& A) {
  const double w1 = sm.x1[0] - theta1;
  const double shape = (sm.k + 1.0) / 2.0;
  const double rate = (sm.s2 + w1 * w1) / 2.0;
  const double lo = std::log(detail::gamma_quantile(shape, rate, 1e-13)) - 2.0;
  const double hi = std::log(detail::gamma_quantile(shape, rate, 1.0 - 1e-13)) + 1.0;
  auto f = [&](double u) {
    const double eta = std::exp(u);
    const auto cond = conditional_theta1_given_eta(eta, sm, A);
    const double pdf = skew_normal_pdf_with(cond, theta1);
    return pdf * eta_posterior_pdf(eta, sm, A) * eta;
  };
  return integrate_adaptive(f, lo, hi, 1e-12, 4096);
}

}  // namespace

TEST_CASE("log joint density formula and invariances", "[posterior]") {
  TwoSampleSummary sm(1.2, 0.4, 2.0, 5.0);
  ModelPoint pt;
  pt.theta1 = {0.9};
  pt.theta2 = {0.1};
  pt.sigma2 = 1.7;

  const double direct = -0.5 * (2.0 + sm.k) * std::log(pt.sigma2) -
                        (0.09 + 0.09 + sm.s2) / (2.0 * pt.sigma2);
  CHECK(log_joint_density(pt, sm) == Catch::Approx(direct).epsilon(1e-13));

  // joint shift of data and parameters changes nothing
  TwoSampleSummary sm2(1.2 + 10.0, 0.4 - 3.0, 2.0, 5.0);
  ModelPoint pt2 = pt;
  pt2.theta1 = {0.9 + 10.0};
  pt2.theta2 = {0.1 - 3.0};
  CHECK(log_joint_density(pt2, sm2) ==
        Catch::Approx(log_joint_density(pt, sm)).epsilon(1e-13));

  // maximum over the means sits at the observed averages
  ModelPoint at_max = pt;
  at_max.theta1 = {sm.x1[0]};
  at_max.theta2 = {sm.x2[0]};
  CHECK(log_joint_density(at_max, sm) > log_joint_density(pt, sm));

  ModelPoint bad = pt;
  bad.sigma2 = -1.0;
  CHECK_THROWS_AS(log_joint_density(bad, sm), validation_error);
}

TEST_CASE("collapsing sigma^2 yields the lemma product form", "[posterior]") {
  TwoSampleSummary sm(0.7, -0.2, 1.5, 4.0);
  const double expo = -(1.0 + sm.k / 2.0);
  double ratio0 = 0.0;
  for (double t1 : {-0.5, 0.3, 0.9, 1.6}) {
    for (double t2 : {-1.0, -0.1, 0.8}) {
      const double a = (sm.x1[0] - t1) * (sm.x1[0] - t1);
      const double b = (sm.x2[0] - t2) * (sm.x2[0] - t2);
      const double product = std::pow(1.0 + b / (sm.s2 + a), expo) *
                             std::pow(1.0 + a / sm.s2, expo);
      const double ratio = sigma2_integrated(t1, t2, sm) / product;
      if (ratio0 == 0.0) ratio0 = ratio;
      CHECK(ratio == Catch::Approx(ratio0).epsilon(1e-8));
    }
  }
}

TEST_CASE("theta1 marginal matches an independent 2d reconstruction", "[posterior]") {
  TwoSampleSummary sm(0.9, 0.1, 1.3, 3.0);
  for (const auto& A : {RestrictionSet::positive(), RestrictionSet::interval(0.8)}) {
    double ratio0 = 0.0;
    for (double t1 : {-0.8, 0.0, 0.6, 1.2, 2.5}) {
      const double lhs = marginal_indep(t1, sm, A);
      const double rhs = marginal_posterior_theta1_unnorm(t1, sm, A);
      REQUIRE(rhs > 0.0);
      const double ratio = lhs / rhs;
      if (ratio0 == 0.0) ratio0 = ratio;
      CHECK(ratio == Catch::Approx(ratio0).epsilon(3e-6));
    }
  }
}

TEST_CASE("symmetric data gives marginal mass one half", "[posterior]") {
  TwoSampleSummary sm(0.0, 0.0, 1.0, 3.0);
  CHECK(marginal_mass(sm, RestrictionSet::positive()) ==
        Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("eta posterior reduces to a gamma when the weight is flat", "[posterior]") {
  TwoSampleSummary sym(2.0, 2.0, 1.8, 5.0);
  const auto A = RestrictionSet::positive();
  for (double eta : {0.01, 0.4, 1.0, 3.0, 12.0}) {
    const double shape = sym.k / 2.0;
    const double rate = sym.s2 / 2.0;
    const double gamma_pdf = std::exp(shape * std::log(rate) - log_gamma(shape) +
                                      (shape - 1.0) * std::log(eta) - rate * eta);
    CHECK(eta_posterior_pdf(eta, sym, A) == Catch::Approx(gamma_pdf).epsilon(1e-12));
  }

  // an enormous interval also flattens the weight
  TwoSampleSummary sm(1.4, 0.2, 1.8, 5.0);
  for (double eta : {0.3, 1.0, 4.0}) {
    const double shape = sm.k / 2.0;
    const double rate = sm.s2 / 2.0;
    const double gamma_pdf = std::exp(shape * std::log(rate) - log_gamma(shape) +
                                      (shape - 1.0) * std::log(eta) - rate * eta);
    CHECK(eta_posterior_pdf(eta, sm, RestrictionSet::interval(1e9)) ==
          Catch::Approx(gamma_pdf).epsilon(1e-9));
  }

  CHECK_THROWS_AS(eta_posterior_pdf(-1.0, sm, A), std::domain_error);
}

TEST_CASE("eta posterior integrates to one", "[posterior]") {
  const auto configs = std::vector<std::tuple<TwoSampleSummary, RestrictionSet>>{
      {TwoSampleSummary(1.0, 0.0, 1.0, 3.0), RestrictionSet::positive()},
      {TwoSampleSummary(-0.5, 0.7, 2.5, 8.0), RestrictionSet::positive()},
      {TwoSampleSummary(0.8, 0.3, 0.5, 4.0), RestrictionSet::interval(0.5)},
      {TwoSampleSummary(2.0, -1.0, 3.0, 20.0), RestrictionSet::interval(2.0)},
  };
  for (const auto& [sm, A] : configs) {
    const double shape = sm.k / 2.0;
    const double rate = sm.s2 / 2.0;
    const double lo = std::log(detail::gamma_quantile(shape, rate, 1e-13)) - 2.0;
    const double hi = std::log(detail::gamma_quantile(shape, rate, 1.0 - 1e-13)) + 2.0;
    const double mass = integrate_adaptive(
        [&](double u) { return eta_posterior_pdf(std::exp(u), sm, A) * std::exp(u); },
        lo, hi, 1e-11, 4096);
    CHECK(mass == Catch::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("conditional parameters carry the corrected slant", "[posterior]") {
  TwoSampleSummary sm(1.5, 0.3, 2.0, 6.0);
  const double eta = 0.7;

  const auto pos = conditional_theta1_given_eta(eta, sm, RestrictionSet::positive());
  CHECK(pos.params.alpha0 == Catch::Approx(1.2 * std::sqrt(eta)).epsilon(1e-14));
  CHECK(pos.params.alpha1[0] == Catch::Approx(1.0).epsilon(1e-14));
  CHECK(pos.params.xi[0] == Catch::Approx(1.5).epsilon(1e-14));
  CHECK(pos.params.tau == Catch::Approx(1.0 / std::sqrt(eta)).epsilon(1e-14));
  CHECK_FALSE(pos.alpha2.has_value());

  const auto intr = conditional_theta1_given_eta(eta, sm, RestrictionSet::interval(0.8));
  CHECK(intr.params.alpha0 == Catch::Approx((1.2 + 0.8) * std::sqrt(eta)).epsilon(1e-14));
  REQUIRE(intr.alpha2.has_value());
  CHECK(*intr.alpha2 == Catch::Approx((1.2 - 0.8) * std::sqrt(eta)).epsilon(1e-14));

  TwoSampleSummary sym(0.4, 0.4, 1.0, 3.0);
  CHECK(conditional_theta1_given_eta(1.0, sym, RestrictionSet::positive()).params.alpha0 ==
        Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("eta mixture of conditionals reproduces the marginal", "[posterior]") {
  // This factorization only closes with alpha0 = (x1-x2)*sqrt(eta); the
  // sqrt(eta/2) variant printed in the source misses by several percent.
  TwoSampleSummary sm(1.1, 0.2, 1.4, 3.0);
  const double scale = std::sqrt(sm.s2 / sm.k);
  for (const auto& A : {RestrictionSet::positive(), RestrictionSet::interval(0.8)}) {
    const double mass = marginal_mass(sm, A);
    REQUIRE(mass > 0.0);
    for (double z : {-2.5, -1.0, 0.0, 0.8, 1.7, 3.0}) {
      const double t1 = sm.x1[0] + scale * z;
      const double mixture = conditional_mixture(t1, sm, A);
      const double marginal = marginal_posterior_theta1_unnorm(t1, sm, A) / mass;
      CHECK(mixture == Catch::Approx(marginal).epsilon(1e-6));
    }
  }
}

TEST_CASE("azzalini identity analytic value and mc agreement", "[posterior]") {
  const auto rep = check_azzalini_identity(1.5, 1.0, 1.0, 100000, 31);
  CHECK(rep.analytic == Catch::Approx(0.8459659953748215).epsilon(1e-12));
  CHECK(rep.mc_se > 0.0);
  CHECK(std::fabs(rep.mc_estimate - rep.analytic) < 3.0 * rep.mc_se);

  const auto tiny = check_azzalini_identity(2.0, 3.0, 1e-12, 1000, 5);
  CHECK(tiny.analytic == Catch::Approx(0.5).margin(1e-9));

  const auto big = check_azzalini_identity(2.0, 3.0, 150.0, 1000, 5);
  CHECK(big.analytic > 1.0 - 1e-6);

  CHECK_THROWS_AS(check_azzalini_identity(-1.0, 1.0, 1.0, 10, 1), validation_error);
}
