#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

#include "skewt/distributions.hpp"
#include "skewt/posterior.hpp"
#include "skewt/predictive.hpp"
#include "skewt/quadrature.hpp"
#include "skewt/rng.hpp"

namespace skewt {

struct OracleReport {
  std::size_t n_samples = 0;
  double acceptance_rate = 0.0;
  double ks_statistic = 0.0;
  bool passed = false;
};

struct OracleSamples {
  std::vector<double> samples;  // row-major n x p
  OracleReport report;
};

// 99% DKW band half-width for an ecdf of n points.
inline double dkw_epsilon(std::size_t n, double alpha = 0.01) {
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

// sup |ecdf - cdf| over the sample points, both one-sided gaps.
template <class Cdf>
double ks_distance(const std::vector<double>& sorted, Cdf&& cdf) {
  if (sorted.empty()) throw validation_error("ks_distance: need at least one sample");
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max(d, std::max(f - static_cast<double>(i) / n,
                             static_cast<double>(i + 1) / n - f));
  }
  return d;
}

namespace detail {

struct ChunkStats {
  std::uint64_t proposals = 0;
  std::uint64_t accepts = 0;
};

// One deterministic substream: draws `quota` accepted predictive samples.
inline ChunkStats oracle_chunk(const TwoSampleSummary& sm, const std::optional<RestrictionSet>& A,
                               std::size_t quota, std::uint64_t seed, std::uint64_t chunk,
                               double* out) {
  CounterRng rng(seed, chunk);
  const int p = sm.p;
  std::vector<double> th1(p), th2(p);
  ChunkStats st;
  std::size_t got = 0;
  while (got < quota) {
    ++st.proposals;
    const double sigma2 = sm.s2 / rng.chisq(sm.k);
    const double sigma = std::sqrt(sigma2);
    for (int j = 0; j < p; ++j) th1[j] = sm.x1[j] + sigma * rng.normal();
    for (int j = 0; j < p; ++j) th2[j] = sm.x2[j] + sigma * rng.normal();
    bool ok = true;
    if (A) {
      for (int j = 0; j < p && ok; ++j) ok = A->contains(th1[j] - th2[j]);
    }
    if (!ok) {
      if (st.proposals >= 4000000 &&
          static_cast<double>(st.accepts) < 1e-6 * static_cast<double>(st.proposals))
        throw numeric_error("rejection_sample_predictive: restriction infeasible at this data "
                            "(acceptance rate below 1e-6)");
      continue;
    }
    ++st.accepts;
    for (int j = 0; j < p; ++j) out[got * p + j] = th1[j] + sigma * rng.normal();
    ++got;
  }
  return st;
}

}  // namespace detail

// Exact posterior-predictive draws under prior (9): sigma^2 from the scale
// inverse chi-square piece, theta from the unconstrained normal posterior,
// rejection on theta1 - theta2, then y ~ N(theta1, sigma^2 I). Chunked over
// substreams keyed by (seed, chunk) with a fixed concatenation order, so the
// output is independent of the worker count. A = nullopt means no restriction.
inline OracleSamples rejection_sample_predictive(const TwoSampleSummary& summary,
                                                 const std::optional<RestrictionSet>& A,
                                                 std::size_t n, std::uint64_t seed,
                                                 unsigned n_threads = 0) {
  summary.validate();
  if (A) A->validate();
  if (n < 1) throw validation_error("rejection_sample_predictive: n must be >= 1");
  constexpr std::size_t chunk_size = 16384;
  const std::size_t n_chunks = (n + chunk_size - 1) / chunk_size;
  OracleSamples out;
  out.samples.assign(n * static_cast<std::size_t>(summary.p), 0.0);
  std::vector<detail::ChunkStats> stats(n_chunks);

  unsigned workers = n_threads == 0 ? std::thread::hardware_concurrency() : n_threads;
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n_chunks)));
  std::vector<std::exception_ptr> errs(workers);
  auto run = [&](unsigned w) {
    try {
      for (std::size_t c = w; c < n_chunks; c += workers) {
        const std::size_t off = c * chunk_size;
        const std::size_t quota = std::min(chunk_size, n - off);
        stats[c] = detail::oracle_chunk(summary, A, quota, seed, c,
                                        out.samples.data() + off * summary.p);
      }
    } catch (...) {
      errs[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);

  std::uint64_t props = 0, accs = 0;
  for (const auto& st : stats) {
    props += st.proposals;
    accs += st.accepts;
  }
  out.report.n_samples = n;
  out.report.acceptance_rate = props > 0 ? static_cast<double>(accs) / static_cast<double>(props) : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Appendix A.2 eta-mixture quadrature
// ---------------------------------------------------------------------------

namespace detail {

inline double gamma_quantile(double shape, double rate, double u) {
  double x = shape / rate;
  double lo = x, hi = x;
  while (gamma_p(shape, rate * lo) > u && lo > 1e-300) lo *= 0.25;
  while (gamma_p(shape, rate * hi) < u && hi < 1e300) hi *= 4.0;
  x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = gamma_p(shape, rate * x) - u;
    if (f > 0.0)
      hi = x;
    else
      lo = x;
    const double lpdf = shape * std::log(rate) - log_gamma(shape) + (shape - 1.0) * std::log(x) -
                        rate * x;
    const double d = std::exp(lpdf);
    double cand = d > 0.0 ? x - f / d : 0.5 * (lo + hi);
    if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
    if (std::fabs(cand - x) <= 1e-13 * (1.0 + x)) return cand;
    x = cand;
  }
  return x;
}

}  // namespace detail

// Predictive density at y1 by integrating the conditional-on-eta predictive
// against the Eq (14) eta posterior. The conditional's skew-normal normalizer
// cancels the eta posterior's weight algebraically; after convolving with the
// N(theta1, 1/eta) observation noise the integrand below remains. Independent
// of the Theorem 3.1/3.2 closed forms.
inline double eta_mixture_pdf(double y1, const TwoSampleSummary& summary,
                              const std::optional<RestrictionSet>& A) {
  summary.validate();
  if (A) A->validate();
  detail::require_p1(summary.p, "eta_mixture_pdf");
  const double k = summary.k, s2 = summary.s2, d = summary.d();
  const double w = y1 - summary.x1[0];
  const double lgam_const = 0.5 * k * std::log(0.5 * s2) - log_gamma(0.5 * k);
  const double tau = predictive_tau(summary);
  const double c23 = std::sqrt(2.0 / 3.0);

  double log_den = 0.0;
  if (A) {
    const double inv = 1.0 / tau;
    if (A->kind == RestrictionKind::PositiveOrthant)
      log_den = std::log(student_t_cdf(k, d * inv));
    else
      log_den = detail::log_t_cdf_diff(k, (d + A->m) * inv, (d - A->m) * inv);
  }

  auto log_integrand = [&](double eta) {
    const double rt = std::sqrt(eta);
    double lf = lgam_const + (0.5 * k - 1.0) * std::log(eta) - 0.5 * s2 * eta;
    lf += 0.5 * std::log(0.5 * eta) - 0.5 * (0.5 * eta) * w * w - log_sqrt_2pi;
    if (A) {
      if (A->kind == RestrictionKind::PositiveOrthant)
        lf += normal_logcdf(c23 * rt * (d + 0.5 * w));
      else
        lf += detail::log_normal_cdf_diff(c23 * rt * (d + A->m + 0.5 * w),
                                          c23 * rt * (d - A->m + 0.5 * w));
      lf -= log_den;
    }
    return lf;
  };

  // Against eta the integrand is a reweighted Gamma((k+1)/2, (s^2 + w^2/2)/2);
  // integrate in log-eta between stretched extreme quantiles of that Gamma.
  const double shape = 0.5 * (k + 1.0);
  const double rate = 0.5 * (s2 + 0.5 * w * w);
  const double lo = detail::gamma_quantile(shape, rate, 1e-14);
  const double hi = detail::gamma_quantile(shape, rate, 1.0 - 1e-14);
  const double t_lo = std::log(lo) - 2.0, t_hi = std::log(hi) + 1.0;
  const double tol = 1e-9 * std::max(1.0, 1.0 / tau);
  return integrate_adaptive([&](double t) { const double eta = std::exp(t);
                                            return std::exp(log_integrand(eta) + t); },
                            t_lo, t_hi, tol, 2048);
}

// Sample, sort, and compare against a closed-form cdf; `passed` uses the 99%
// DKW band for the sample size.
inline OracleReport run_oracle_check(const TwoSampleSummary& summary,
                                     const std::optional<RestrictionSet>& A, std::size_t n,
                                     std::uint64_t seed, const Density& closed_form,
                                     unsigned n_threads = 0) {
  detail::require_p1(summary.p, "run_oracle_check");
  OracleSamples s = rejection_sample_predictive(summary, A, n, seed, n_threads);
  std::sort(s.samples.begin(), s.samples.end());
  OracleReport rep = s.report;
  rep.ks_statistic = ks_distance(s.samples, [&](double y) { return closed_form.cdf(y); });
  rep.passed = rep.ks_statistic < dkw_epsilon(n);
  return rep;
}

}  // namespace skewt
