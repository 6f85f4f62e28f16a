#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "skewt/errors.hpp"

namespace skewt {

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights (QUADPACK dqk15).
inline constexpr double gk_nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr double gk_wk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr double gk_wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

}  // namespace detail

struct PanelResult {
  double value;
  double error;
};

template <class F>
PanelResult gauss_kronrod_15(F&& f, double a, double b) {
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  const double fc = f(c);
  double resk = detail::gk_wk[7] * fc;
  double resg = detail::gk_wg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double x = h * detail::gk_nodes[i];
    const double fsum = f(c - x) + f(c + x);
    resk += detail::gk_wk[i] * fsum;
    if (i % 2 == 1) resg += detail::gk_wg[i / 2] * fsum;
  }
  return {resk * h, std::fabs((resk - resg) * h)};
}

// Globally adaptive integration: repeatedly split the panel with largest
// error estimate until the total estimated error is below abs_tol.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double abs_tol, int max_panels = 1024,
                          const std::vector<double>* seeds = nullptr) {
  struct Panel {
    double a, b, value, error;
  };
  std::vector<Panel> panels;
  panels.reserve(64);
  auto push = [&](double lo, double hi) {
    const PanelResult r = gauss_kronrod_15(f, lo, hi);
    panels.push_back({lo, hi, r.value, r.error});
  };
  if (seeds != nullptr && seeds->size() >= 2) {
    for (std::size_t i = 0; i + 1 < seeds->size(); ++i) push((*seeds)[i], (*seeds)[i + 1]);
  } else {
    push(a, b);
  }
  double total_err = 0.0;
  for (const auto& p : panels) total_err += p.error;
  while (total_err > abs_tol && static_cast<int>(panels.size()) < max_panels) {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < panels.size(); ++i)
      if (panels[i].error > panels[worst].error) worst = i;
    const Panel p = panels[worst];
    if (p.b - p.a <= 1e-15 * (std::fabs(p.a) + std::fabs(p.b)) + 1e-300) break;
    const double mid = 0.5 * (p.a + p.b);
    panels.erase(panels.begin() + static_cast<std::ptrdiff_t>(worst));
    push(p.a, mid);
    push(mid, p.b);
    total_err = 0.0;
    for (const auto& q : panels) total_err += q.error;
  }
  if (total_err > std::max(abs_tol * 1e3, 1e-7))
    throw numeric_error("integrate_adaptive: failed to reach requested tolerance");
  double sum = 0.0, comp = 0.0;
  for (const auto& p : panels) {
    const double y = p.value - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

// Lean fixed-capacity variant for hot loops: same splitting strategy but no
// heap allocation and a bounded panel count.
template <int Cap = 48, class F>
double integrate_adaptive_small(F&& f, double a, double b, double abs_tol, int init_panels = 4) {
  struct Panel {
    double a, b, value, error;
  };
  Panel panels[Cap];
  int n = 0;
  const double w = (b - a) / init_panels;
  for (int i = 0; i < init_panels; ++i) {
    const double lo = a + i * w;
    const double hi = (i == init_panels - 1) ? b : lo + w;
    const PanelResult r = gauss_kronrod_15(f, lo, hi);
    panels[n++] = {lo, hi, r.value, r.error};
  }
  for (;;) {
    double total_err = 0.0;
    int worst = 0;
    for (int i = 0; i < n; ++i) {
      total_err += panels[i].error;
      if (panels[i].error > panels[worst].error) worst = i;
    }
    if (total_err <= abs_tol || n >= Cap) break;
    const Panel p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    const PanelResult r1 = gauss_kronrod_15(f, p.a, mid);
    const PanelResult r2 = gauss_kronrod_15(f, mid, p.b);
    panels[worst] = {p.a, mid, r1.value, r1.error};
    panels[n++] = {mid, p.b, r2.value, r2.error};
  }
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += panels[i].value;
  return sum;
}

}  // namespace skewt
