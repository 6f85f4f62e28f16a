// Fits the two predictive estimators to the body-mass summary data and prints
// the reports, then shows the interval-restricted variant on the walking data.

#include <cstdio>

#include "skewt/skewt.hpp"

int main() {
  using namespace skewt;

  // Group summaries: n1=429 (mean 31, sd 5.7), group-2 mean 30.4.
  const TwoSampleSummary body(31.0, 30.4, 5.7 * 5.7, 428.0);

  const StudentTParams t = baseline_predictive(body);
  const SkewTOneSidedParams st = positive_restricted_predictive(body);
  std::printf("baseline   T(nu=%g, xi=%g, tau=%.4f)\n", t.nu, t.xi[0], t.tau);
  std::printf("restricted ST(nu=%g, alpha0=%.4f, alpha1=%.4f, xi=%g, tau=%.4f)\n", st.nu,
              st.alpha0, st.alpha1[0], st.xi[0], st.tau);

  const PredictiveReport rb = summarize(t);
  const PredictiveReport rr = summarize(st);
  std::printf("baseline   mean=%.4f p10=%.4f p50=%.4f p90=%.4f\n", rb.mean, rb.p10, rb.p50, rb.p90);
  std::printf("restricted mean=%.4f p10=%.4f p50=%.4f p90=%.4f\n", rr.mean, rr.p10, rr.p50, rr.p90);

  // Interval restriction |theta1 - theta2| <= 2 on the walking-age data.
  const RawTwoGroupData walking{{11.0, 10.0, 10.0, 11.75, 10.5, 15.0},
                                {9.0, 9.5, 9.75, 10.0, 13.0, 9.5}};
  const TwoSampleSummary sm = summarize_raw(walking);
  const PredictiveReport ri = summarize(interval_restricted_predictive(sm, 2.0));
  std::printf("interval   mean=%.4f p10=%.4f p50=%.4f p90=%.4f\n", ri.mean, ri.p10, ri.p50, ri.p90);
  return 0;
}
