#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "skewt/errors.hpp"
#include "skewt/quadrature.hpp"
#include "skewt/rng.hpp"
#include "skewt/special.hpp"

namespace skewt {

// ---------------------------------------------------------------------------
// Parameter sets
// ---------------------------------------------------------------------------

struct StudentTParams {
  int p = 1;
  double nu = 1.0;
  std::vector<double> xi;
  double tau = 1.0;

  StudentTParams() = default;
  StudentTParams(double nu_, double xi_, double tau_) : p(1), nu(nu_), xi{xi_}, tau(tau_) {}
  void validate() const {
    if (p < 1) throw validation_error("StudentTParams: p must be >= 1");
    if (!(nu > 0.0)) throw validation_error("StudentTParams: nu must be positive");
    if (!(tau > 0.0)) throw validation_error("StudentTParams: tau must be positive");
    if (static_cast<int>(xi.size()) != p) throw validation_error("StudentTParams: xi must have length p");
  }
};

struct SkewNormalParams {
  int p = 1;
  double alpha0 = 0.0;
  std::vector<double> alpha1;
  std::vector<double> xi;
  double tau = 1.0;

  SkewNormalParams() = default;
  SkewNormalParams(double a0, double a1, double xi_, double tau_)
      : p(1), alpha0(a0), alpha1{a1}, xi{xi_}, tau(tau_) {}
  void validate() const {
    if (p < 1) throw validation_error("SkewNormalParams: p must be >= 1");
    if (!(tau > 0.0)) throw validation_error("SkewNormalParams: tau must be positive");
    if (static_cast<int>(xi.size()) != p || static_cast<int>(alpha1.size()) != p)
      throw validation_error("SkewNormalParams: xi and alpha1 must have length p");
  }
};

struct SkewTOneSidedParams {
  int p = 1;
  double nu = 1.0;
  double alpha0 = 0.0;
  std::vector<double> alpha1;
  std::vector<double> xi;
  double tau = 1.0;

  SkewTOneSidedParams() = default;
  SkewTOneSidedParams(double nu_, double a0, double a1, double xi_, double tau_)
      : p(1), nu(nu_), alpha0(a0), alpha1{a1}, xi{xi_}, tau(tau_) {}
  void validate() const {
    if (p < 1) throw validation_error("SkewTOneSidedParams: p must be >= 1");
    if (!(nu > 0.0)) throw validation_error("SkewTOneSidedParams: nu must be positive");
    if (!(tau > 0.0)) throw validation_error("SkewTOneSidedParams: tau must be positive");
    if (static_cast<int>(xi.size()) != p || static_cast<int>(alpha1.size()) != p)
      throw validation_error("SkewTOneSidedParams: xi and alpha1 must have length p");
  }
};

struct SkewTTwoSidedParams {
  int p = 1;
  double nu = 1.0;
  double alpha0 = 0.0;
  double alpha2 = -1.0;
  std::vector<double> alpha1;
  std::vector<double> xi;
  double tau = 1.0;

  SkewTTwoSidedParams() = default;
  SkewTTwoSidedParams(double nu_, double a0, double a1, double a2, double xi_, double tau_)
      : p(1), nu(nu_), alpha0(a0), alpha2(a2), alpha1{a1}, xi{xi_}, tau(tau_) {}
  void validate() const {
    if (p < 1) throw validation_error("SkewTTwoSidedParams: p must be >= 1");
    if (!(nu > 0.0)) throw validation_error("SkewTTwoSidedParams: nu must be positive");
    if (!(tau > 0.0)) throw validation_error("SkewTTwoSidedParams: tau must be positive");
    if (!(alpha0 > alpha2)) throw validation_error("SkewTTwoSidedParams: alpha0 must exceed alpha2");
    if (static_cast<int>(xi.size()) != p || static_cast<int>(alpha1.size()) != p)
      throw validation_error("SkewTTwoSidedParams: xi and alpha1 must have length p");
  }
};

struct ScaleInvChiSqParams {
  double nu = 1.0;
  double tau = 1.0;

  ScaleInvChiSqParams() = default;
  ScaleInvChiSqParams(double nu_, double tau_) : nu(nu_), tau(tau_) {}
  void validate() const {
    if (!(nu > 0.0)) throw validation_error("ScaleInvChiSqParams: nu must be positive");
    if (!(tau > 0.0)) throw validation_error("ScaleInvChiSqParams: tau must be positive");
  }
};

namespace detail {

inline double sq_norm(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline void require_p1(int p, const char* what) {
  if (p != 1) throw unsupported_dimension(std::string(what) + ": exact evaluation requires p=1");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// pdf operations (free functions, general p where the formulas allow it)
// ---------------------------------------------------------------------------

// Location-scale Student t density, any dimension p.
inline double student_t_pdf(const StudentTParams& params, const std::vector<double>& t) {
  params.validate();
  if (static_cast<int>(t.size()) != params.p)
    throw validation_error("student_t_pdf: point dimension must equal p");
  const double z2 = detail::sq_norm(t, params.xi) / (params.tau * params.tau);
  const double lp = log_gamma(0.5 * (params.nu + params.p)) - log_gamma(0.5 * params.nu) -
                    0.5 * params.p * std::log(params.nu * pi) - params.p * std::log(params.tau) -
                    0.5 * (params.nu + params.p) * std::log1p(z2 / params.nu);
  return std::exp(lp);
}

inline double student_t_pdf(const StudentTParams& params, double t) {
  return student_t_pdf(params, std::vector<double>{t});
}

inline double skew_t_one_sided_log_pdf(const SkewTOneSidedParams& pr, double t) {
  const double z = (t - pr.xi[0]) / pr.tau;
  const double a1 = pr.alpha1[0];
  const double g = std::sqrt((pr.nu + 1.0) / (pr.nu + z * z));
  const double num = student_t_cdf(pr.nu + 1.0, (pr.alpha0 + a1 * z) * g);
  const double den = student_t_cdf(pr.nu, pr.alpha0 / std::sqrt(1.0 + a1 * a1));
  return student_t_log_pdf(pr.nu, z) - std::log(pr.tau) + std::log(num) - std::log(den);
}

inline double skew_t_one_sided_pdf(const SkewTOneSidedParams& params, double t) {
  params.validate();
  detail::require_p1(params.p, "skew_t_one_sided_pdf");
  return std::exp(skew_t_one_sided_log_pdf(params, t));
}

inline double skew_t_two_sided_log_pdf(const SkewTTwoSidedParams& pr, double t) {
  const double z = (t - pr.xi[0]) / pr.tau;
  const double a1 = pr.alpha1[0];
  const double g = std::sqrt((pr.nu + 1.0) / (pr.nu + z * z));
  const double num = student_t_cdf(pr.nu + 1.0, (pr.alpha0 + a1 * z) * g) -
                     student_t_cdf(pr.nu + 1.0, (pr.alpha2 + a1 * z) * g);
  const double s = std::sqrt(1.0 + a1 * a1);
  const double den = student_t_cdf(pr.nu, pr.alpha0 / s) - student_t_cdf(pr.nu, pr.alpha2 / s);
  return student_t_log_pdf(pr.nu, z) - std::log(pr.tau) + std::log(num) - std::log(den);
}

inline double skew_t_two_sided_pdf(const SkewTTwoSidedParams& params, double t) {
  params.validate();
  detail::require_p1(params.p, "skew_t_two_sided_pdf");
  return std::exp(skew_t_two_sided_log_pdf(params, t));
}

// Extended skew-normal (Eq 2); alpha2 gives the two-sided weight used by the
// constrained-posterior conditionals.
inline double skew_normal_log_pdf(const SkewNormalParams& pr, double t,
                                  std::optional<double> alpha2 = std::nullopt) {
  const double z = (t - pr.xi[0]) / pr.tau;
  const double a1 = pr.alpha1[0];
  const double s = std::sqrt(1.0 + a1 * a1);
  const double lnum_hi = normal_logcdf(pr.alpha0 + a1 * z);
  const double lden_hi = normal_logcdf(pr.alpha0 / s);
  double lw, lW;
  if (alpha2) {
    const double lnum_lo = normal_logcdf(*alpha2 + a1 * z);
    const double lden_lo = normal_logcdf(*alpha2 / s);
    lw = lnum_hi + std::log1p(-std::exp(lnum_lo - lnum_hi));
    lW = lden_hi + std::log1p(-std::exp(lden_lo - lden_hi));
  } else {
    lw = lnum_hi;
    lW = lden_hi;
  }
  return -0.5 * z * z - log_sqrt_2pi - std::log(pr.tau) + lw - lW;
}

inline double skew_normal_pdf(const SkewNormalParams& params, double t) {
  params.validate();
  detail::require_p1(params.p, "skew_normal_pdf");
  return std::exp(skew_normal_log_pdf(params, t));
}

inline double scale_inv_chisq_log_pdf(const ScaleInvChiSqParams& pr, double x) {
  if (!(x > 0.0)) throw std::domain_error("scale_inv_chisq_pdf: x must be positive");
  const double a = 0.5 * pr.nu;
  const double b = 0.5 * pr.nu * pr.tau * pr.tau;
  return a * std::log(b) - log_gamma(a) - b / x - (1.0 + a) * std::log(x);
}

inline double scale_inv_chisq_pdf(const ScaleInvChiSqParams& params, double x) {
  params.validate();
  return std::exp(scale_inv_chisq_log_pdf(params, x));
}

// ---------------------------------------------------------------------------
// Density contract
// ---------------------------------------------------------------------------

struct Support {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

// Tail envelope used to compactify infinite domains: a location-scale Student
// t (nu = inf means normal) whose tails dominate the density's.
struct Envelope {
  double nu;
  double xi;
  double tau;

  double quantile(double u) const {
    return std::isinf(nu) ? xi + tau * normal_quantile(u) : xi + tau * student_t_quantile(nu, u);
  }
  double pdf(double y) const {
    const double z = (y - xi) / tau;
    return (std::isinf(nu) ? normal_pdf(z) : student_t_pdf_std(nu, z)) / tau;
  }
};

class Density {
 public:
  virtual ~Density() = default;

  virtual double pdf(double y) const = 0;
  virtual double log_pdf(double y) const {
    const double v = pdf(y);
    return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
  }
  virtual Support support() const { return {}; }
  virtual Envelope envelope() const = 0;

  virtual double cdf(double y) const;
  virtual double quantile(double pr) const;
  virtual double mean() const;
  virtual std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

  virtual nlohmann::json to_json() const = 0;

  // Monotone cubic Hermite inverse-cdf table, built lazily on first use.
  struct Table {
    std::vector<double> u;   // envelope grid (diagnostic)
    std::vector<double> y;   // node positions
    std::vector<double> F;   // cdf at nodes
    std::vector<double> m;   // dy/dF tangents after monotonicity fix
    double norm = 1.0;       // estimated total mass
  };
  const Table& table() const;

 private:
  mutable std::once_flag table_once_;
  mutable std::unique_ptr<Table> table_;
};

namespace detail {

inline std::vector<double> envelope_grid() {
  std::vector<double> tail;
  for (double u = 1e-13; u < 9e-3; u *= 3.16227766016838) tail.push_back(u);
  std::vector<double> out = tail;
  for (double u = 0.01; u < 0.9899; u += 0.0025) out.push_back(u);
  // mirror only the tail refinement; the body is already symmetric
  for (auto it = tail.rbegin(); it != tail.rend(); ++it) out.push_back(1.0 - *it);
  return out;
}

}  // namespace detail

inline const Density::Table& Density::table() const {
  std::call_once(table_once_, [this] {
    auto tbl = std::make_unique<Table>();
    const Envelope env = envelope();
    const Support sup = support();
    static const std::vector<double> us = detail::envelope_grid();
    for (double u : us) {
      double yv = env.quantile(u);
      if (yv <= sup.lo || yv >= sup.hi) continue;
      tbl->u.push_back(u);
      tbl->y.push_back(yv);
    }
    if (tbl->y.size() < 8) throw numeric_error("Density: envelope grid degenerate");
    const std::size_t n = tbl->y.size();
    // Left tail anchor: envelope mass scaled by the local density ratio.
    const double ratio0 = pdf(tbl->y.front()) / env.pdf(tbl->y.front());
    tbl->F.resize(n);
    tbl->F[0] = std::min(1e-10, tbl->u.front() * std::max(ratio0, 0.0));
    for (std::size_t i = 1; i < n; ++i) {
      const double gap = integrate_adaptive_small<32>([this](double t) { return pdf(t); },
                                                      tbl->y[i - 1], tbl->y[i], 5e-14, 2);
      tbl->F[i] = tbl->F[i - 1] + gap;
    }
    const double ratio1 = pdf(tbl->y.back()) / env.pdf(tbl->y.back());
    tbl->norm = tbl->F.back() + (1.0 - tbl->u.back()) * std::max(ratio1, 0.0);
    if (std::fabs(tbl->norm - 1.0) > 1e-6)
      throw numeric_error("Density: pdf does not integrate to 1 (numeric-integrity check)");
    // Tangents dy/dF = 1/pdf with the Fritsch-Carlson monotone limiter.
    tbl->m.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = pdf(tbl->y[i]);
      tbl->m[i] = d > 1e-280 ? 1.0 / d : 1e280;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double dF = tbl->F[i + 1] - tbl->F[i];
      if (dF <= 0.0) continue;
      const double sec = (tbl->y[i + 1] - tbl->y[i]) / dF;
      const double al = tbl->m[i] / sec, be = tbl->m[i + 1] / sec;
      const double r2 = al * al + be * be;
      if (r2 > 9.0) {
        const double t = 3.0 / std::sqrt(r2);
        tbl->m[i] = t * al * sec;
        tbl->m[i + 1] = t * be * sec;
      }
    }
    table_ = std::move(tbl);
  });
  return *table_;
}

namespace detail {

// Cubic Hermite evaluation of the inverse cdf on [F_i, F_{i+1}].
inline double hermite_inverse(const Density::Table& t, std::size_t i, double u) {
  const double dF = t.F[i + 1] - t.F[i];
  if (dF <= 0.0) return t.y[i];
  const double s = (u - t.F[i]) / dF;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * t.y[i] + (s3 - 2 * s2 + s) * dF * t.m[i] +
         (-2 * s3 + 3 * s2) * t.y[i + 1] + (s3 - s2) * dF * t.m[i + 1];
}

}  // namespace detail

inline double Density::cdf(double y) const {
  const Table& t = table();
  if (y <= t.y.front()) {
    const double env_u = t.u.front();
    const double r = pdf(y) / envelope().pdf(y);
    return std::clamp(std::min(t.F.front(), env_u * std::max(r, 0.0)), 0.0, 1.0);
  }
  if (y >= t.y.back()) {
    const double r = pdf(y) / envelope().pdf(y);
    return std::clamp(1.0 - (1.0 - t.u.back()) * std::max(r, 0.0), 0.0, 1.0);
  }
  const std::size_t j =
      static_cast<std::size_t>(std::upper_bound(t.y.begin(), t.y.end(), y) - t.y.begin()) - 1;
  const double inc = integrate_adaptive_small<32>([this](double x) { return pdf(x); }, t.y[j], y,
                                                  1e-12, 1);
  return std::clamp(t.F[j] + inc, 0.0, 1.0);
}

inline double Density::quantile(double pr) const {
  if (!(pr > 0.0 && pr < 1.0)) throw std::domain_error("Density::quantile: p must lie in (0,1)");
  const Table& t = table();
  double y;
  if (pr <= t.F.front())
    y = t.y.front();
  else if (pr >= t.F.back())
    y = t.y.back();
  else {
    const std::size_t i =
        static_cast<std::size_t>(std::upper_bound(t.F.begin(), t.F.end(), pr) - t.F.begin()) - 1;
    y = detail::hermite_inverse(t, std::min(i, t.F.size() - 2), pr);
  }
  // Polish with safeguarded Newton on the true cdf.
  double lo = t.y.front(), hi = t.y.back();
  for (int it = 0; it < 40; ++it) {
    const double f = cdf(y) - pr;
    if (std::fabs(f) <= 1e-11) return y;
    if (f > 0.0)
      hi = y;
    else
      lo = y;
    const double d = pdf(y);
    double cand = d > 0.0 ? y - f / d : 0.5 * (lo + hi);
    if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
    if (std::fabs(cand - y) <= 1e-14 * (1.0 + std::fabs(y))) return cand;
    y = cand;
  }
  return y;
}

inline double Density::mean() const {
  const Table& t = table();
  return integrate_adaptive([this](double y) { return y * pdf(y); }, t.y.front(), t.y.back(), 1e-9,
                            4096, &t.y);
}

inline std::vector<double> Density::sample(std::size_t n, std::uint64_t seed) const {
  const Table& t = table();
  CounterRng rng(seed, 0);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    if (u <= t.F.front())
      out[i] = t.y.front();
    else if (u >= t.F.back())
      out[i] = t.y.back();
    else {
      const std::size_t j =
          static_cast<std::size_t>(std::upper_bound(t.F.begin(), t.F.end(), u) - t.F.begin()) - 1;
      out[i] = detail::hermite_inverse(t, std::min(j, t.F.size() - 2), u);
    }
  }
  return out;
}

// Spec-facing free functions.
inline double density_cdf(const Density& d, double t) { return d.cdf(t); }
inline double density_quantile(const Density& d, double p) { return d.quantile(p); }
inline double density_mean(const Density& d) { return d.mean(); }
inline std::vector<double> density_sample(const Density& d, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw validation_error("density_sample: n must be >= 1");
  return d.sample(n, seed);
}

// cdf evaluated at many sorted points, each anchored at the nearest table node
// so no cumulative drift builds up. Used by the oracle's KS comparisons.
inline std::vector<double> cdf_at_sorted(const Density& d, const std::vector<double>& pts);

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

class NormalDist final : public Density {
 public:
  NormalDist(double mean, double sd) : mu_(mean), sd_(sd) {
    if (!(sd > 0.0)) throw validation_error("NormalDist: sd must be positive");
  }
  double pdf(double y) const override { return normal_pdf((y - mu_) / sd_) / sd_; }
  double log_pdf(double y) const override {
    const double z = (y - mu_) / sd_;
    return -0.5 * z * z - log_sqrt_2pi - std::log(sd_);
  }
  Envelope envelope() const override {
    return {std::numeric_limits<double>::infinity(), mu_, 1.25 * sd_};
  }
  double cdf(double y) const override { return normal_cdf((y - mu_) / sd_); }
  double quantile(double p) const override { return mu_ + sd_ * normal_quantile(p); }
  double mean() const override { return mu_; }
  nlohmann::json to_json() const override {
    return {{"family", "normal"}, {"p", 1}, {"xi", mu_}, {"tau", sd_}};
  }

 private:
  double mu_, sd_;
};

class StudentTDist final : public Density {
 public:
  explicit StudentTDist(StudentTParams params) : pr_(std::move(params)) {
    pr_.validate();
    detail::require_p1(pr_.p, "StudentTDist");
  }
  const StudentTParams& params() const { return pr_; }
  double pdf(double y) const override { return std::exp(log_pdf(y)); }
  double log_pdf(double y) const override {
    return student_t_log_pdf(pr_.nu, (y - pr_.xi[0]) / pr_.tau) - std::log(pr_.tau);
  }
  Envelope envelope() const override { return {pr_.nu, pr_.xi[0], 1.5 * pr_.tau}; }
  double cdf(double y) const override { return student_t_cdf(pr_.nu, (y - pr_.xi[0]) / pr_.tau); }
  double quantile(double p) const override {
    return pr_.xi[0] + pr_.tau * student_t_quantile(pr_.nu, p);
  }
  double mean() const override {
    if (!(pr_.nu > 1.0)) throw numeric_error("StudentTDist::mean: undefined for nu <= 1");
    return pr_.xi[0];
  }
  nlohmann::json to_json() const override {
    return {{"family", "student_t"}, {"p", pr_.p}, {"nu", pr_.nu}, {"xi", pr_.xi[0]}, {"tau", pr_.tau}};
  }

 private:
  StudentTParams pr_;
};

class SkewNormalDist final : public Density {
 public:
  explicit SkewNormalDist(SkewNormalParams params, std::optional<double> alpha2 = std::nullopt)
      : pr_(std::move(params)), alpha2_(alpha2) {
    pr_.validate();
    detail::require_p1(pr_.p, "SkewNormalDist");
    if (alpha2_ && !(pr_.alpha0 > *alpha2_))
      throw validation_error("SkewNormalDist: alpha0 must exceed alpha2");
  }
  double pdf(double y) const override { return std::exp(log_pdf(y)); }
  double log_pdf(double y) const override { return skew_normal_log_pdf(pr_, y, alpha2_); }
  Envelope envelope() const override {
    const double a1 = pr_.alpha1[0];
    return {std::numeric_limits<double>::infinity(), analytic_mean(),
            pr_.tau * (1.5 + std::fabs(a1))};
  }
  double mean() const override { return analytic_mean(); }
  nlohmann::json to_json() const override {
    nlohmann::json j{{"family", "skew_normal"}, {"p", pr_.p},      {"alpha0", pr_.alpha0},
                     {"alpha1", pr_.alpha1[0]}, {"xi", pr_.xi[0]}, {"tau", pr_.tau}};
    if (alpha2_) j["alpha2"] = *alpha2_;
    return j;
  }

 private:
  double analytic_mean() const {
    const double a1 = pr_.alpha1[0];
    const double s = std::sqrt(1.0 + a1 * a1);
    const double delta = a1 / s;
    const double t0 = pr_.alpha0 / s;
    if (!alpha2_) return pr_.xi[0] + pr_.tau * delta * std::exp(normal_log_mills(t0));
    const double t2 = *alpha2_ / s;
    const double W = normal_cdf(t0) - normal_cdf(t2);
    return pr_.xi[0] + pr_.tau * delta * (normal_pdf(t0) - normal_pdf(t2)) / W;
  }
  // log(phi(t)/Phi(t)), stable for very negative t.
  static double normal_log_mills(double t) {
    return -0.5 * t * t - log_sqrt_2pi - normal_logcdf(t);
  }

  SkewNormalParams pr_;
  std::optional<double> alpha2_;
};

class SkewTOneSidedDist final : public Density {
 public:
  explicit SkewTOneSidedDist(SkewTOneSidedParams params) : pr_(std::move(params)) {
    pr_.validate();
    detail::require_p1(pr_.p, "SkewTOneSidedDist");
    const double a1 = pr_.alpha1[0];
    log_den_ = std::log(student_t_cdf(pr_.nu, pr_.alpha0 / std::sqrt(1.0 + a1 * a1)));
  }
  const SkewTOneSidedParams& params() const { return pr_; }
  double pdf(double y) const override { return std::exp(log_pdf(y)); }
  double log_pdf(double y) const override {
    const double z = (y - pr_.xi[0]) / pr_.tau;
    const double a1 = pr_.alpha1[0];
    const double g = std::sqrt((pr_.nu + 1.0) / (pr_.nu + z * z));
    const double num = student_t_cdf(pr_.nu + 1.0, (pr_.alpha0 + a1 * z) * g);
    return student_t_log_pdf(pr_.nu, z) - std::log(pr_.tau) + std::log(num) - log_den_;
  }
  Envelope envelope() const override { return {pr_.nu, pr_.xi[0], 2.0 * pr_.tau}; }
  nlohmann::json to_json() const override {
    return {{"family", "skew_t_one_sided"}, {"p", pr_.p},          {"nu", pr_.nu},
            {"alpha0", pr_.alpha0},         {"alpha1", pr_.alpha1[0]}, {"xi", pr_.xi[0]},
            {"tau", pr_.tau}};
  }

 private:
  SkewTOneSidedParams pr_;
  double log_den_;
};

class SkewTTwoSidedDist final : public Density {
 public:
  explicit SkewTTwoSidedDist(SkewTTwoSidedParams params) : pr_(std::move(params)) {
    pr_.validate();
    detail::require_p1(pr_.p, "SkewTTwoSidedDist");
    const double a1 = pr_.alpha1[0];
    const double s = std::sqrt(1.0 + a1 * a1);
    den_ = student_t_cdf(pr_.nu, pr_.alpha0 / s) - student_t_cdf(pr_.nu, pr_.alpha2 / s);
  }
  const SkewTTwoSidedParams& params() const { return pr_; }
  double pdf(double y) const override { return std::exp(log_pdf(y)); }
  double log_pdf(double y) const override {
    const double z = (y - pr_.xi[0]) / pr_.tau;
    const double a1 = pr_.alpha1[0];
    const double g = std::sqrt((pr_.nu + 1.0) / (pr_.nu + z * z));
    const double num = student_t_cdf(pr_.nu + 1.0, (pr_.alpha0 + a1 * z) * g) -
                       student_t_cdf(pr_.nu + 1.0, (pr_.alpha2 + a1 * z) * g);
    return student_t_log_pdf(pr_.nu, z) - std::log(pr_.tau) + std::log(std::max(num, 0.0)) -
           std::log(den_);
  }
  Envelope envelope() const override { return {pr_.nu, pr_.xi[0], 2.0 * pr_.tau}; }
  nlohmann::json to_json() const override {
    return {{"family", "skew_t_two_sided"}, {"p", pr_.p},          {"nu", pr_.nu},
            {"alpha0", pr_.alpha0},         {"alpha1", pr_.alpha1[0]}, {"alpha2", pr_.alpha2},
            {"xi", pr_.xi[0]},              {"tau", pr_.tau}};
  }

 private:
  SkewTTwoSidedParams pr_;
  double den_;
};

class ScaleInvChiSqDist final : public Density {
 public:
  explicit ScaleInvChiSqDist(ScaleInvChiSqParams params) : pr_(params) { pr_.validate(); }
  const ScaleInvChiSqParams& params() const { return pr_; }
  double pdf(double x) const override {
    return x > 0.0 ? std::exp(scale_inv_chisq_log_pdf(pr_, x)) : 0.0;
  }
  Support support() const override { return {0.0, std::numeric_limits<double>::infinity()}; }
  Envelope envelope() const override {
    // Not used: cdf/quantile/mean/sample are overridden analytically.
    return {pr_.nu, 0.0, pr_.tau};
  }
  double cdf(double x) const override {
    if (x <= 0.0) return 0.0;
    return 1.0 - detail::gamma_p(0.5 * pr_.nu, 0.5 * pr_.nu * pr_.tau * pr_.tau / x);
  }
  double quantile(double p) const override {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("ScaleInvChiSqDist::quantile: p in (0,1)");
    double lo = pr_.tau * pr_.tau, hi = lo;
    while (cdf(lo) > p) lo *= 0.25;
    while (cdf(hi) < p) hi *= 4.0;
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const double f = cdf(x) - p;
      if (std::fabs(f) <= 1e-12) break;
      if (f > 0.0)
        hi = x;
      else
        lo = x;
      const double d = pdf(x);
      double cand = d > 0.0 ? x - f / d : 0.5 * (lo + hi);
      if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
      if (std::fabs(cand - x) <= 1e-15 * (1.0 + x)) {
        x = cand;
        break;
      }
      x = cand;
    }
    return x;
  }
  double mean() const override {
    if (!(pr_.nu > 2.0)) throw numeric_error("ScaleInvChiSqDist::mean: undefined for nu <= 2");
    return pr_.nu * pr_.tau * pr_.tau / (pr_.nu - 2.0);
  }
  std::vector<double> sample(std::size_t n, std::uint64_t seed) const override {
    CounterRng rng(seed, 0);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = quantile(rng.uniform());
    return out;
  }
  nlohmann::json to_json() const override {
    return {{"family", "scale_inv_chisq"}, {"nu", pr_.nu}, {"tau", pr_.tau}};
  }

 private:
  ScaleInvChiSqParams pr_;
};

inline std::vector<double> cdf_at_sorted(const Density& d, const std::vector<double>& pts) {
  std::vector<double> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = d.cdf(pts[i]);
  return out;
}

// ---------------------------------------------------------------------------
// JSON round trip
// ---------------------------------------------------------------------------

namespace detail {

inline double json_scalar(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_array()) {
    if (v.size() != 1) throw validation_error("parameter JSON: p>1 vectors are not supported here");
    return v[0].get<double>();
  }
  return v.get<double>();
}

}  // namespace detail

inline std::unique_ptr<Density> make_density(const nlohmann::json& j) {
  std::string family;
  try {
    family = j.at("family").get<std::string>();
    if (family == "normal") return std::make_unique<NormalDist>(detail::json_scalar(j, "xi"),
                                                                detail::json_scalar(j, "tau"));
    if (family == "student_t")
      return std::make_unique<StudentTDist>(StudentTParams(
          detail::json_scalar(j, "nu"), detail::json_scalar(j, "xi"), detail::json_scalar(j, "tau")));
    if (family == "skew_normal") {
      SkewNormalParams pr(detail::json_scalar(j, "alpha0"), detail::json_scalar(j, "alpha1"),
                          detail::json_scalar(j, "xi"), detail::json_scalar(j, "tau"));
      std::optional<double> a2;
      if (j.contains("alpha2")) a2 = detail::json_scalar(j, "alpha2");
      return std::make_unique<SkewNormalDist>(pr, a2);
    }
    if (family == "skew_t_one_sided")
      return std::make_unique<SkewTOneSidedDist>(SkewTOneSidedParams(
          detail::json_scalar(j, "nu"), detail::json_scalar(j, "alpha0"),
          detail::json_scalar(j, "alpha1"), detail::json_scalar(j, "xi"),
          detail::json_scalar(j, "tau")));
    if (family == "skew_t_two_sided")
      return std::make_unique<SkewTTwoSidedDist>(SkewTTwoSidedParams(
          detail::json_scalar(j, "nu"), detail::json_scalar(j, "alpha0"),
          detail::json_scalar(j, "alpha1"), detail::json_scalar(j, "alpha2"),
          detail::json_scalar(j, "xi"), detail::json_scalar(j, "tau")));
    if (family == "scale_inv_chisq")
      return std::make_unique<ScaleInvChiSqDist>(
          ScaleInvChiSqParams(detail::json_scalar(j, "nu"), detail::json_scalar(j, "tau")));
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("parameter JSON: ") + e.what());
  }
  throw validation_error("parameter JSON: unknown family '" + family + "'");
}

}  // namespace skewt
