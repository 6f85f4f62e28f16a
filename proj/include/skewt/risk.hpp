#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <thread>
#include <vector>

#include "skewt/distributions.hpp"
#include "skewt/posterior.hpp"
#include "skewt/predictive.hpp"
#include "skewt/quadrature.hpp"
#include "skewt/rng.hpp"

namespace skewt {

struct RiskScenario {
  int p = 1;
  double k = 3.0;
  double delta = 0.0;
  double sigma = 1.0;
  double theta1 = 0.0;
  RestrictionSet restriction;
  std::size_t n_mc = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (p != 1) throw unsupported_dimension("RiskScenario: p must be 1");
    if (!(k >= 2.0)) throw validation_error("RiskScenario: k must be >= 2");
    if (!(sigma > 0.0)) throw validation_error("RiskScenario: sigma must be positive");
    if (n_mc < 1) throw validation_error("RiskScenario: n_mc must be >= 1");
    restriction.validate();
    if (!restriction.contains(delta * sigma))
      throw validation_error("RiskScenario: theta1 - theta2 = delta*sigma violates the restriction");
  }
};

struct RiskCurveRow {
  double delta;
  double risk_baseline;
  double risk_restricted;
  double ratio;
  double mc_standard_error;
};

struct RiskCurve {
  std::vector<RiskCurveRow> rows;
};

struct RiskResult {
  double risk = 0.0;
  double se = 0.0;
};

enum class EstimatorKind { Baseline, Restricted };

// ---------------------------------------------------------------------------
// KL loss, Eq (6), truth N(theta1, sigma^2)
// ---------------------------------------------------------------------------

namespace detail {

inline double fast_t_cdf(double nu, double x) {
  if (nu == std::floor(nu) && nu <= 64.0) return student_t_cdf_int(static_cast<int>(nu), x);
  return student_t_cdf(nu, x);
}

// KL of a log-density against N(mu, sigma^2) over mu +- 10 sigma.
template <class LogQ>
double kl_core(double mu, double sigma, LogQ&& logq, bool& infinite) {
  const double lsig = std::log(sigma);
  const double val = integrate_adaptive_small<64>(
      [&](double z) {
        const double lt = -0.5 * z * z - log_sqrt_2pi;
        const double lq = logq(mu + sigma * z);
        if (!std::isfinite(lq)) {
          infinite = true;
          return 0.0;
        }
        return std::exp(lt) * (lt - lsig - lq);
      },
      -10.0, 10.0, 1e-9, 8);
  return std::max(val, 0.0);
}

// Hot-path evaluator for the restricted predictives: identical formulas to
// SkewT{One,Two}SidedDist::log_pdf with the denominator cached and the
// integer-nu cdf shortcut.
struct RestrictedEval {
  double nu, a0, a2, xi, tau, log_den;
  bool two_sided;

  static RestrictedEval make(const TwoSampleSummary& sm, const RestrictionSet& A) {
    RestrictedEval e;
    const double half = std::sqrt(3.0) / 2.0;  // 1/sqrt(1 + alpha1^2) with alpha1 = 1/sqrt(3)
    if (A.kind == RestrictionKind::PositiveOrthant) {
      const SkewTOneSidedParams pr = positive_restricted_predictive(sm);
      e = {pr.nu, pr.alpha0, 0.0, pr.xi[0], pr.tau, 0.0, false};
      e.log_den = std::log(fast_t_cdf(pr.nu, pr.alpha0 * half));
    } else {
      const SkewTTwoSidedParams pr = interval_restricted_predictive(sm, A.m);
      e = {pr.nu, pr.alpha0, pr.alpha2, pr.xi[0], pr.tau, 0.0, true};
      const double den = fast_t_cdf(pr.nu, pr.alpha0 * half) - fast_t_cdf(pr.nu, pr.alpha2 * half);
      e.log_den = std::log(den);
    }
    return e;
  }

  double log_pdf(double y) const {
    const double z = (y - xi) / tau;
    const double a1z = z / std::sqrt(3.0);
    const double g = std::sqrt((nu + 1.0) / (nu + z * z));
    double num;
    if (!two_sided) {
      num = fast_t_cdf(nu + 1.0, (a0 + a1z) * g);
    } else if ((a2 + a1z) * g > 8.0) {
      num = fast_t_cdf(nu + 1.0, -(a2 + a1z) * g) - fast_t_cdf(nu + 1.0, -(a0 + a1z) * g);
    } else {
      num = fast_t_cdf(nu + 1.0, (a0 + a1z) * g) - fast_t_cdf(nu + 1.0, (a2 + a1z) * g);
    }
    return student_t_log_pdf(nu, z) - std::log(tau) + std::log(std::max(num, 0.0)) - log_den;
  }
};

struct BaselineEval {
  double nu, xi, tau;
  explicit BaselineEval(const StudentTParams& pr) : nu(pr.nu), xi(pr.xi[0]), tau(pr.tau) {}
  double log_pdf(double y) const {
    return student_t_log_pdf(nu, (y - xi) / tau) - std::log(tau);
  }
};

}  // namespace detail

// Public Eq (6) loss: truth N(true_mean, true_var) against any Density.
// Returns +inf when the estimate vanishes where the truth has mass.
inline double kl_divergence(double true_mean, double true_var, const Density& estimate) {
  if (!(true_var > 0.0)) throw validation_error("kl_divergence: true_var must be positive");
  bool infinite = false;
  const double v = detail::kl_core(true_mean, std::sqrt(true_var),
                                   [&](double y) { return estimate.log_pdf(y); }, infinite);
  return infinite ? std::numeric_limits<double>::infinity() : v;
}

// ---------------------------------------------------------------------------
// Monte Carlo risk
// ---------------------------------------------------------------------------

namespace detail {

// One model (7) replicate with the substream keyed by (seed, index).
inline TwoSampleSummary draw_summary(double theta1, double delta, double sigma, double k,
                                     std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(seed, index);
  const double x1 = theta1 + sigma * rng.normal();
  const double x2 = (theta1 - delta * sigma) + sigma * rng.normal();
  const double s2 = sigma * sigma * rng.chisq(k);
  return TwoSampleSummary(x1, x2, s2, k);
}

constexpr std::size_t risk_block = 4096;

// Runs fn(replicate_index) for every replicate, parallel over fixed-size
// blocks; per-block partial sums are combined in block order so results do
// not depend on the worker count.
template <class BlockSums, class PerReplicate>
std::vector<BlockSums> run_blocked(std::size_t n, unsigned n_threads, PerReplicate&& fn) {
  const std::size_t n_blocks = (n + risk_block - 1) / risk_block;
  std::vector<BlockSums> sums(n_blocks);
  unsigned workers = n_threads == 0 ? std::thread::hardware_concurrency() : n_threads;
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n_blocks)));
  std::vector<std::exception_ptr> errs(workers);
  auto run = [&](unsigned w) {
    try {
      for (std::size_t b = w; b < n_blocks; b += workers) {
        const std::size_t lo = b * risk_block, hi = std::min(n, lo + risk_block);
        for (std::size_t i = lo; i < hi; ++i) fn(i, sums[b]);
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
  return sums;
}

}  // namespace detail

inline RiskResult kl_risk(const RiskScenario& sc, EstimatorKind estimator, unsigned n_threads = 0) {
  sc.validate();
  struct Sums {
    double s = 0.0, s2 = 0.0;
  };
  const bool restricted = estimator == EstimatorKind::Restricted;
  std::vector<Sums> blocks = detail::run_blocked<Sums>(
      sc.n_mc, n_threads, [&](std::size_t i, Sums& acc) {
        const TwoSampleSummary sm =
            detail::draw_summary(sc.theta1, sc.delta, sc.sigma, sc.k, sc.seed, i);
        bool inf_flag = false;
        double kl;
        if (restricted) {
          const detail::RestrictedEval ev = detail::RestrictedEval::make(sm, sc.restriction);
          kl = detail::kl_core(sc.theta1, sc.sigma, [&](double y) { return ev.log_pdf(y); },
                               inf_flag);
        } else {
          const detail::BaselineEval ev(baseline_predictive(sm));
          kl = detail::kl_core(sc.theta1, sc.sigma, [&](double y) { return ev.log_pdf(y); },
                               inf_flag);
        }
        if (inf_flag) kl = std::numeric_limits<double>::infinity();
        acc.s += kl;
        acc.s2 += kl * kl;
      });
  double s = 0.0, s2 = 0.0;
  for (const auto& b : blocks) {
    s += b.s;
    s2 += b.s2;
  }
  const double n = static_cast<double>(sc.n_mc);
  RiskResult out;
  out.risk = s / n;
  out.se = sc.n_mc > 1 ? std::sqrt(std::max(0.0, (s2 - s * s / n) / (n - 1.0)) / n)
                       : std::numeric_limits<double>::infinity();
  return out;
}

// Ratio curve with full common-random-numbers coupling: the replicate stream
// depends only on (seed, replicate index), shared across estimators and
// across the delta grid, so the baseline column is exactly constant and the
// ratio curve is smooth in delta.
inline RiskCurve risk_ratio_curve(const std::vector<double>& deltas, double k, int p,
                                  const RestrictionSet& restriction, std::size_t n_mc,
                                  std::uint64_t seed, unsigned n_threads = 0) {
  if (deltas.empty()) throw validation_error("risk_ratio_curve: empty delta grid");
  if (p != 1) throw unsupported_dimension("risk_ratio_curve: p must be 1");
  if (!(k >= 2.0)) throw validation_error("risk_ratio_curve: k must be >= 2");
  if (n_mc < 1) throw validation_error("risk_ratio_curve: n_mc must be >= 1");
  restriction.validate();
  for (double d : deltas)
    if (!restriction.contains(d))
      throw validation_error("risk_ratio_curve: delta grid point violates the restriction");

  const std::size_t nd = deltas.size();
  struct Sums {
    double b = 0.0, b2 = 0.0;
    std::vector<double> r, r2, rb;
    bool init = false;
  };
  std::vector<Sums> blocks = detail::run_blocked<Sums>(
      n_mc, n_threads, [&](std::size_t i, Sums& acc) {
        if (!acc.init) {
          acc.r.assign(nd, 0.0);
          acc.r2.assign(nd, 0.0);
          acc.rb.assign(nd, 0.0);
          acc.init = true;
        }
        CounterRng rng(seed, i);
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        const double w = rng.chisq(k);
        bool inf_flag = false;
        // theta1 = 0, sigma = 1; x2 shifts with delta while z-draws are shared.
        const TwoSampleSummary base_sm(z1, z2, w, k);
        const detail::BaselineEval bev(baseline_predictive(base_sm));
        const double bkl =
            detail::kl_core(0.0, 1.0, [&](double y) { return bev.log_pdf(y); }, inf_flag);
        acc.b += bkl;
        acc.b2 += bkl * bkl;
        for (std::size_t j = 0; j < nd; ++j) {
          const TwoSampleSummary sm(z1, -deltas[j] + z2, w, k);
          const detail::RestrictedEval ev = detail::RestrictedEval::make(sm, restriction);
          bool rinf = false;
          double rkl =
              detail::kl_core(0.0, 1.0, [&](double y) { return ev.log_pdf(y); }, rinf);
          if (rinf) rkl = std::numeric_limits<double>::infinity();
          acc.r[j] += rkl;
          acc.r2[j] += rkl * rkl;
          acc.rb[j] += rkl * bkl;
        }
      });

  double sb = 0.0, sb2 = 0.0;
  std::vector<double> sr(nd, 0.0), sr2(nd, 0.0), srb(nd, 0.0);
  for (const auto& blk : blocks) {
    sb += blk.b;
    sb2 += blk.b2;
    for (std::size_t j = 0; j < nd; ++j) {
      sr[j] += blk.r[j];
      sr2[j] += blk.r2[j];
      srb[j] += blk.rb[j];
    }
  }
  const double n = static_cast<double>(n_mc);
  RiskCurve curve;
  curve.rows.reserve(nd);
  const double bbar = sb / n;
  for (std::size_t j = 0; j < nd; ++j) {
    RiskCurveRow row;
    row.delta = deltas[j];
    row.risk_baseline = bbar;
    row.risk_restricted = sr[j] / n;
    row.ratio = row.risk_restricted / bbar;
    // Delta-method se of the ratio under CRN coupling.
    if (n_mc > 1) {
      const double sv2 = sr2[j] - 2.0 * row.ratio * srb[j] + row.ratio * row.ratio * sb2;
      row.mc_standard_error = std::sqrt(std::max(0.0, sv2 / (n - 1.0)) / n) / bbar;
    } else {
      row.mc_standard_error = std::numeric_limits<double>::infinity();
    }
    curve.rows.push_back(row);
  }
  return curve;
}

}  // namespace skewt
