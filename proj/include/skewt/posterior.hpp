#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "skewt/distributions.hpp"
#include "skewt/errors.hpp"
#include "skewt/rng.hpp"
#include "skewt/special.hpp"

namespace skewt {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

struct TwoSampleSummary {
  int p = 1;
  std::vector<double> x1;
  std::vector<double> x2;
  double s2 = 1.0;
  double k = 2.0;

  TwoSampleSummary() = default;
  TwoSampleSummary(double x1_, double x2_, double s2_, double k_)
      : p(1), x1{x1_}, x2{x2_}, s2(s2_), k(k_) {}

  void validate() const {
    if (p < 1) throw validation_error("TwoSampleSummary: p must be >= 1");
    if (static_cast<int>(x1.size()) != p || static_cast<int>(x2.size()) != p)
      throw validation_error("TwoSampleSummary: x1 and x2 must have length p");
    if (!(s2 > 0.0)) throw validation_error("TwoSampleSummary: s2 must be positive");
    if (!(k >= 2.0)) throw validation_error("TwoSampleSummary: k must be >= 2");
  }
  double d() const { return x1[0] - x2[0]; }
};

enum class RestrictionKind { PositiveOrthant, SymmetricInterval };

struct RestrictionSet {
  RestrictionKind kind = RestrictionKind::PositiveOrthant;
  double m = 0.0;

  static RestrictionSet positive() { return {RestrictionKind::PositiveOrthant, 0.0}; }
  static RestrictionSet interval(double m) { return {RestrictionKind::SymmetricInterval, m}; }

  void validate() const {
    if (kind == RestrictionKind::SymmetricInterval && !(m > 0.0 && std::isfinite(m)))
      throw validation_error("RestrictionSet: interval half-width m must be positive and finite");
  }
  bool contains(double diff) const {
    return kind == RestrictionKind::PositiveOrthant ? diff >= 0.0 : std::fabs(diff) <= m;
  }
  bool contains(const std::vector<double>& diff) const {
    for (double v : diff)
      if (!contains(v)) return false;
    return true;
  }
};

struct ModelPoint {
  std::vector<double> theta1;
  std::vector<double> theta2;
  double sigma2 = 1.0;

  ModelPoint() = default;
  ModelPoint(double t1, double t2, double s2v) : theta1{t1}, theta2{t2}, sigma2(s2v) {}
  void validate() const {
    if (!(sigma2 > 0.0)) throw validation_error("ModelPoint: sigma2 must be positive");
    if (theta1.size() != theta2.size())
      throw validation_error("ModelPoint: theta1 and theta2 must have the same length");
  }
};

// ---------------------------------------------------------------------------
// Joint and marginal posteriors (Lemma 2.1)
// ---------------------------------------------------------------------------

// Log of the model (7) sampling density of (X1, X2, S^2) as a function of the
// parameters, up to an additive constant free of (theta, sigma^2).
inline double log_joint_density(const ModelPoint& point, const TwoSampleSummary& summary) {
  point.validate();
  summary.validate();
  if (static_cast<int>(point.theta1.size()) != summary.p)
    throw validation_error("log_joint_density: dimension mismatch");
  const double q = detail::sq_norm(summary.x1, point.theta1) +
                   detail::sq_norm(summary.x2, point.theta2) + summary.s2;
  return -0.5 * (2.0 * summary.p + summary.k) * std::log(point.sigma2) -
         0.5 * q / point.sigma2;
}

// T(k, x1, s/sqrt(k)) density times P(V in A) with V ~ T(k+1, theta1 - x2,
// sqrt((s^2 + (x1-theta1)^2)/(1+k))).
inline double marginal_posterior_theta1_unnorm(double theta1, const TwoSampleSummary& summary,
                                               const RestrictionSet& A) {
  summary.validate();
  A.validate();
  detail::require_p1(summary.p, "marginal_posterior_theta1_unnorm");
  const double k = summary.k;
  const double tau_post = std::sqrt(summary.s2 / k);
  const double kernel = student_t_pdf_std(k, (theta1 - summary.x1[0]) / tau_post) / tau_post;
  const double xi_v = theta1 - summary.x2[0];
  const double r = theta1 - summary.x1[0];
  const double tau_v = std::sqrt((summary.s2 + r * r) / (1.0 + k));
  double w;
  if (A.kind == RestrictionKind::PositiveOrthant) {
    w = student_t_cdf(k + 1.0, xi_v / tau_v);
  } else {
    w = student_t_cdf(k + 1.0, (A.m - xi_v) / tau_v) - student_t_cdf(k + 1.0, (-A.m - xi_v) / tau_v);
  }
  return kernel * std::max(w, 0.0);
}

// ---------------------------------------------------------------------------
// Lemma 3.1 / 3.2 decomposition: eta marginal and theta1 | eta conditional
// ---------------------------------------------------------------------------

namespace detail {

// log(Phi(hi) - Phi(lo)) for hi > lo, stable in both tails.
inline double log_normal_cdf_diff(double hi, double lo) {
  if (hi + lo > 0.0) {
    const double la = normal_logcdf(-lo), lb = normal_logcdf(-hi);
    return la + std::log1p(-std::exp(lb - la));
  }
  const double la = normal_logcdf(hi), lb = normal_logcdf(lo);
  return la + std::log1p(-std::exp(lb - la));
}

// log(F(nu, hi) - F(nu, lo)) via the symmetric tail when both args are positive.
inline double log_t_cdf_diff(double nu, double hi, double lo) {
  if (hi + lo > 0.0) {
    const double a = student_t_cdf(nu, -lo), b = student_t_cdf(nu, -hi);
    return std::log(a) + std::log1p(-b / a);
  }
  const double a = student_t_cdf(nu, hi), b = student_t_cdf(nu, lo);
  return std::log(a) + std::log1p(-b / a);
}

}  // namespace detail

// Log of Eq (14): Gamma(k/2, rate s^2/2) reweighted by the restriction mass,
// normalized in closed form through identity (16).
inline double eta_posterior_log_pdf(double eta, const TwoSampleSummary& summary,
                                    const RestrictionSet& A) {
  if (!(eta > 0.0)) throw std::domain_error("eta_posterior_pdf: eta must be positive");
  summary.validate();
  A.validate();
  detail::require_p1(summary.p, "eta_posterior_pdf");
  const double k = summary.k, s2 = summary.s2, d = summary.d();
  const double lgamma_pdf = 0.5 * k * std::log(0.5 * s2) - log_gamma(0.5 * k) +
                            (0.5 * k - 1.0) * std::log(eta) - 0.5 * s2 * eta;
  const double rt = std::sqrt(0.5 * eta);
  const double scale = 1.0 / std::sqrt(2.0 * s2 / k);
  double lw, lz;
  if (A.kind == RestrictionKind::PositiveOrthant) {
    lw = normal_logcdf(d * rt);
    lz = std::log(student_t_cdf(k, d * scale));
  } else {
    lw = detail::log_normal_cdf_diff((d + A.m) * rt, (d - A.m) * rt);
    lz = detail::log_t_cdf_diff(k, (d + A.m) * scale, (d - A.m) * scale);
  }
  return lgamma_pdf + lw - lz;
}

inline double eta_posterior_pdf(double eta, const TwoSampleSummary& summary,
                                const RestrictionSet& A) {
  return std::exp(eta_posterior_log_pdf(eta, summary, A));
}

// theta1 | eta, data: extended skew normal with xi = x1, tau = 1/sqrt(eta),
// alpha1 = 1 and alpha0 = (x1-x2[+m]) sqrt(eta) (alpha2 with -m for intervals).
// The normalizer Phi(alpha0/sqrt(2)) then reproduces Eq (14)'s weight exactly,
// which is the factorization consistency the mixture tests pin down.
struct ConditionalTheta1 {
  SkewNormalParams params;
  std::optional<double> alpha2;
};

inline ConditionalTheta1 conditional_theta1_given_eta(double eta, const TwoSampleSummary& summary,
                                                      const RestrictionSet& A) {
  if (!(eta > 0.0)) throw std::domain_error("conditional_theta1_given_eta: eta must be positive");
  summary.validate();
  A.validate();
  detail::require_p1(summary.p, "conditional_theta1_given_eta");
  const double rt = std::sqrt(eta);
  ConditionalTheta1 out;
  out.params.p = 1;
  out.params.alpha1 = {1.0};
  out.params.xi = {summary.x1[0]};
  out.params.tau = 1.0 / rt;
  if (A.kind == RestrictionKind::PositiveOrthant) {
    out.params.alpha0 = summary.d() * rt;
  } else {
    out.params.alpha0 = (summary.d() + A.m) * rt;
    out.alpha2 = (summary.d() - A.m) * rt;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Identity (16): E[Phi(c sqrt(eta))] over eta ~ Gamma(a, rate b) = F(2a, c sqrt(a/b))
// ---------------------------------------------------------------------------

struct AzzaliniReport {
  double analytic = 0.0;
  double mc_estimate = 0.0;
  double mc_se = 0.0;
};

inline AzzaliniReport check_azzalini_identity(double a, double b, double c, std::size_t n_mc,
                                              std::uint64_t seed) {
  if (!(a > 0.0 && b > 0.0 && c > 0.0))
    throw validation_error("check_azzalini_identity: a, b, c must be positive");
  if (n_mc < 1) throw validation_error("check_azzalini_identity: n_mc must be >= 1");
  AzzaliniReport rep;
  rep.analytic = student_t_cdf(2.0 * a, c * std::sqrt(a / b));
  CounterRng rng(seed, 0);
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n_mc; ++i) {
    const double eta = rng.gamma(a) / b;
    const double v = normal_cdf(c * std::sqrt(eta));
    sum += v;
    sum2 += v * v;
  }
  const double n = static_cast<double>(n_mc);
  rep.mc_estimate = sum / n;
  const double var = std::max(0.0, (sum2 - sum * sum / n) / (n > 1 ? n - 1 : 1.0));
  rep.mc_se = std::sqrt(var / n);
  return rep;
}

}  // namespace skewt
