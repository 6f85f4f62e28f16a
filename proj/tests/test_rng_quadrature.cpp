#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "skewt/quadrature.hpp"
#include "skewt/rng.hpp"
#include "skewt/special.hpp"

using namespace skewt;

TEST_CASE("counter rng is deterministic and stream-separated", "[rng]") {
  CounterRng a(42, 0), b(42, 0), c(42, 1), d(43, 0);
  bool same = true, sep_stream = false, sep_seed = false;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t va = a.next_u64();
    same = same && (va == b.next_u64());
    sep_stream = sep_stream || (va != c.next_u64());
    sep_seed = sep_seed || (va != d.next_u64());
  }
  CHECK(same);
  CHECK(sep_stream);
  CHECK(sep_seed);
}

TEST_CASE("uniform stays inside the open unit interval", "[rng]") {
  CounterRng rng(7, 3);
  double lo = 1.0, hi = 0.0, sum = 0.0, sum2 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
    sum2 += u * u;
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(mean == Catch::Approx(0.5).margin(4.0 / std::sqrt(12.0 * n)));
  CHECK(var == Catch::Approx(1.0 / 12.0).margin(0.002));
}

TEST_CASE("normal and gamma moments", "[rng]") {
  CounterRng rng(11, 0);
  const int n = 100000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(s / n == Catch::Approx(0.0).margin(4.0 / std::sqrt(double(n))));
  CHECK(s2 / n == Catch::Approx(1.0).margin(0.02));

  for (double shape : {0.5, 1.0, 3.7}) {
    CounterRng g(5, 17);
    double gs = 0, gs2 = 0;
    for (int i = 0; i < n; ++i) {
      const double x = g.gamma(shape);
      REQUIRE(x > 0.0);
      gs += x;
      gs2 += x * x;
    }
    const double mean = gs / n;
    const double var = gs2 / n - mean * mean;
    CHECK(mean == Catch::Approx(shape).margin(4 * std::sqrt(shape / n)));
    CHECK(var == Catch::Approx(shape).epsilon(0.05));
  }

  CounterRng h(5, 18);
  double cs = 0;
  for (int i = 0; i < n; ++i) cs += h.chisq(5.0);
  CHECK(cs / n == Catch::Approx(5.0).margin(4 * std::sqrt(10.0 / n)));
}

TEST_CASE("normal draws pass a KS check against Phi", "[rng]") {
  CounterRng rng(2024, 9);
  std::vector<double> z(20000);
  for (auto& v : z) v = rng.normal();
  std::sort(z.begin(), z.end());
  const double n = static_cast<double>(z.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double f = normal_cdf(z[i]);
    ks = std::max(ks, std::max(f - i / n, (i + 1) / n - f));
  }
  const double dkw99 = std::sqrt(std::log(2.0 / 0.01) / (2.0 * n));
  CHECK(ks < dkw99);
}

TEST_CASE("gauss-kronrod panel is exact on low-degree polynomials", "[quadrature]") {
  auto cube = [](double x) { return x * x * x - 2 * x + 1; };
  const auto r = gauss_kronrod_15(cube, -1.0, 3.0);
  // exact: x^4/4 - x^2 + x over [-1,3]
  const double exact = (81.0 / 4 - 9 + 3) - (0.25 - 1 - 1);
  CHECK(r.value == Catch::Approx(exact).epsilon(1e-14));
  CHECK(r.error < 1e-10);

  const auto s = gauss_kronrod_15([](double x) { return std::pow(x, 12); }, 0.0, 1.0);
  CHECK(s.value == Catch::Approx(1.0 / 13.0).epsilon(1e-13));
}

TEST_CASE("adaptive integrator handles smooth and spiky integrands", "[quadrature]") {
  CHECK(integrate_adaptive([](double x) { return std::sin(x); }, 0.0, pi, 1e-13) ==
        Catch::Approx(2.0).epsilon(1e-12));

  CHECK(integrate_adaptive([](double z) { return normal_pdf(z); }, -10.0, 10.0, 1e-12) ==
        Catch::Approx(1.0).epsilon(1e-11));

  // spike at the panel centre needs refinement to resolve
  const double w = 0.02;
  auto spike = [w](double x) { return normal_pdf((x - 0.5) / w) / w; };
  CHECK(integrate_adaptive(spike, 0.0, 1.0, 1e-10, 4096) ==
        Catch::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("adaptive integrator honors breakpoint seeds", "[quadrature]") {
  // a very narrow spike is invisible to the default panel; breakpoints
  // bracketing it let the worst-first refinement find it
  const double w = 1e-5;
  auto spike = [w](double x) { return normal_pdf((x - 0.25) / w) / w; };
  std::vector<double> seeds{0.0, 0.24, 0.26, 1.0};
  CHECK(integrate_adaptive(spike, 0.0, 1.0, 1e-10, 4096, &seeds) ==
        Catch::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("fixed-capacity integrator matches the adaptive one", "[quadrature]") {
  auto f = [](double x) { return std::exp(-x) * std::cos(3 * x); };
  const double exact = (1.0 - std::exp(-2.0) * (std::cos(6.0) - 3 * std::sin(6.0))) / 10.0;
  CHECK(integrate_adaptive_small<48>(f, 0.0, 2.0, 1e-12) ==
        Catch::Approx(exact).epsilon(1e-11));
  CHECK(integrate_adaptive_small<16>([](double z) { return normal_pdf(z); }, -8.0, 8.0,
                                     1e-12) == Catch::Approx(1.0).epsilon(1e-10));
}
