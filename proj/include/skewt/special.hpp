#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "skewt/errors.hpp"

namespace skewt {

inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr double log_sqrt_2pi = 0.91893853320467274178032973640562;

inline double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma: x must be positive");
  return std::lgamma(x);
}

namespace detail {

// Lentz-style continued fraction for the incomplete beta (Numerical Recipes form).
inline double beta_cf(double a, double b, double x) {
  constexpr int max_iter = 400;
  constexpr double eps = 3e-16;
  constexpr double fpmin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  throw numeric_error("regularized_incomplete_beta: continued fraction did not converge");
}

}  // namespace detail

inline double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("regularized_incomplete_beta: a,b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("regularized_incomplete_beta: x must lie in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front =
      std::exp(log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) + b * std::log1p(-x));
  if (x > a / (a + b)) return 1.0 - front * detail::beta_cf(b, a, 1.0 - x) / b;
  return front * detail::beta_cf(a, b, x) / a;
}

namespace detail {

// Regularized lower incomplete gamma P(a,x); series + continued fraction split.
inline double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::domain_error("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-16)
        return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
    }
    throw numeric_error("gamma_p: series did not converge");
  }
  constexpr double fpmin = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / fpmin, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return 1.0 - h * std::exp(-x + a * std::log(x) - log_gamma(a));
}

}  // namespace detail

inline double normal_pdf(double z) { return std::exp(-0.5 * z * z - log_sqrt_2pi); }

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / 1.41421356237309504880168872420969808); }

// log Phi(z), stable far into the left tail where erfc underflows.
inline double normal_logcdf(double z) {
  if (z > -36.0) return std::log(normal_cdf(z));
  const double z2 = z * z;
  const double corr = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
  return -0.5 * z2 - log_sqrt_2pi - std::log(-z) + std::log(corr);
}

// Wichura's AS 241 (PPND16) inverse normal cdf.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must lie in (0,1)");
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num = (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                             6.7265770927008700853e+4) *
                                r +
                            4.5921953931549871457e+4) *
                               r +
                           1.3731693765509461125e+4) *
                              r +
                          1.9715909503065514427e+3) *
                             r +
                         1.3314166789178437745e+2) *
                            r +
                        3.3871328727963666080e+0);
    const double den = (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                             3.9307895800092710610e+4) *
                                r +
                            2.1213794301586595867e+4) *
                               r +
                           5.3941960214247511077e+3) *
                              r +
                          6.8718700749205790830e+2) *
                             r +
                         4.2313330701600911252e+1) *
                            r +
                        1.0);
    return q * num / den;
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    const double num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                             2.41780725177450611770e-1) *
                                r +
                            1.27045825245236838258e+0) *
                               r +
                           3.64784832476320460504e+0) *
                              r +
                          5.76949722146069140550e+0) *
                             r +
                         4.63033784615654529590e+0) *
                            r +
                        1.42343711074968357734e+0);
    const double den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                             1.51986665636164571966e-2) *
                                r +
                            1.48103976427480074590e-1) *
                               r +
                           6.89767334985100004550e-1) *
                              r +
                          1.67638483018380384940e+0) *
                             r +
                         2.05319162663775882187e+0) *
                            r +
                        1.0);
    x = num / den;
  } else {
    // Deep tail. Start from the classical asymptotic inversion and polish
    // with Newton on the log-cdf scale, which stays finite arbitrarily far out.
    const double lp = std::log((q < 0.0) ? p : 1.0 - p);
    const double t = -2.0 * lp;
    x = std::sqrt(t - std::log(t) - 2.0 * log_sqrt_2pi);
    for (int it = 0; it < 8; ++it) {
      const double z2 = x * x;
      const double mills = (1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2)) / x;
      const double step = (normal_logcdf(-x) - lp) * mills;
      x += step;
      if (std::fabs(step) <= 1e-15 * x) break;
    }
  }
  return (q < 0.0) ? -x : x;
}

inline double student_t_log_pdf(double nu, double z) {
  if (!(nu > 0.0)) throw std::domain_error("student_t_log_pdf: nu must be positive");
  return log_gamma(0.5 * (nu + 1.0)) - log_gamma(0.5 * nu) - 0.5 * std::log(nu * pi) -
         0.5 * (nu + 1.0) * std::log1p(z * z / nu);
}

inline double student_t_pdf_std(double nu, double z) { return std::exp(student_t_log_pdf(nu, z)); }

inline double student_t_cdf(double nu, double t) {
  if (!(nu > 0.0)) throw std::domain_error("student_t_cdf: nu must be positive");
  if (t == 0.0) return 0.5;
  if (std::isinf(t)) return t > 0.0 ? 1.0 : 0.0;
  const double x = nu / (nu + t * t);
  const double half_ib = 0.5 * regularized_incomplete_beta(0.5 * nu, 0.5, x);
  return t > 0.0 ? 1.0 - half_ib : half_ib;
}

// Closed-form t cdf for integer nu (classic trigonometric recurrences).
// Used in hot loops; agrees with the incomplete-beta path to ~1e-13.
inline double student_t_cdf_int(int nu, double t) {
  const double c2 = nu / (nu + t * t);
  const double s = t / std::sqrt(nu + t * t);
  if (nu & 1) {
    double sum = 0.0, term = std::sqrt(c2);
    for (int j = 0; 2 * j + 3 <= nu; ++j) {
      sum += term;
      term *= c2 * (2.0 * j + 2.0) / (2.0 * j + 3.0);
    }
    return 0.5 + (std::atan(t / std::sqrt(static_cast<double>(nu))) + s * sum) / pi;
  }
  double sum = 0.0, term = 1.0;
  for (int j = 0; 2 * j + 2 <= nu; ++j) {
    sum += term;
    term *= c2 * (2.0 * j + 1.0) / (2.0 * j + 2.0);
  }
  return 0.5 + 0.5 * s * sum;
}

inline double student_t_quantile(double nu, double p) {
  if (!(nu > 0.0)) throw std::domain_error("student_t_quantile: nu must be positive");
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("student_t_quantile: p must lie in (0,1)");
  if (p == 0.5) return 0.0;
  // Bracket from the normal approximation, expanding geometrically for heavy tails.
  double guess = normal_quantile(p);
  double lo, hi;
  if (p > 0.5) {
    lo = 0.0;
    hi = std::max(1.0, guess);
    while (student_t_cdf(nu, hi) < p) {
      hi *= 4.0;
      if (hi > 1e300) break;
    }
  } else {
    hi = 0.0;
    lo = std::min(-1.0, guess);
    while (student_t_cdf(nu, lo) > p) {
      lo *= 4.0;
      if (lo < -1e300) break;
    }
  }
  double q = (guess > lo && guess < hi) ? guess : 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = student_t_cdf(nu, q) - p;
    if (std::fabs(f) <= 1e-14) return q;
    if (f > 0.0)
      hi = q;
    else
      lo = q;
    if (hi - lo <= 1e-15 * (1.0 + std::fabs(q))) return q;
    // Newton step, safeguarded by the bracket.
    const double dens = student_t_pdf_std(nu, q);
    double cand = (dens > 0.0) ? q - f / dens : q;
    if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
    q = cand;
  }
  return q;
}

}  // namespace skewt
