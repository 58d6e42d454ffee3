#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "fairround/rng.hpp"
#include "fairround/stats.hpp"

using namespace fairround;

TEST_CASE("mean_stderr on known samples") {
  MeanStderr ms = mean_stderr({1.0, 2.0, 3.0, 4.0});
  CHECK(ms.mean == doctest::Approx(2.5));
  // sample stddev = sqrt(5/3), stderr = that / 2
  CHECK(ms.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(mean_stderr({}).mean == 0.0);
  CHECK(mean_stderr({7.0}).stderr_ == 0.0);
}

TEST_CASE("binom_stderr matches the formula") {
  CHECK(binom_stderr(0.5, 100) == doctest::Approx(0.05));
  CHECK(binom_stderr(0.0, 100) == 0.0);
  CHECK(binom_stderr(1.0, 100) == 0.0);
}

TEST_CASE("igamc reproduces chi-square tail values") {
  // Q(df/2, x/2) for known chi-square quantiles.
  CHECK(igamc(0.5, 3.841 / 2) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(igamc(1.0, 5.991 / 2) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(igamc(2.5, 11.070 / 2) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(igamc(1.0, 0.0) == 1.0);
}

TEST_CASE("chi_square_p accepts true distributions and rejects wrong ones") {
  Rng rng(7);
  const int n = 100000;
  std::vector<double> observed(6, 0.0);
  for (int i = 0; i < n; ++i) observed[rng.below(6)] += 1.0;
  std::vector<double> uniform(6, n / 6.0);
  CHECK(chi_square_p(observed, uniform) > 0.001);

  std::vector<double> skewed = {n * 0.3, n * 0.14, n * 0.14,
                                n * 0.14, n * 0.14, n * 0.14};
  CHECK(chi_square_p(observed, skewed) < 1e-6);
}

TEST_CASE("ks test accepts the true CDF and rejects a shifted one") {
  Rng rng(11);
  std::vector<double> xs(20000);
  for (double& x : xs) x = rng.uniform();
  CHECK(ks_test_p(xs, [](double v) {
          return std::clamp(v, 0.0, 1.0);
        }) > 0.001);
  CHECK(ks_test_p(xs, [](double v) {
          return std::clamp(v * v, 0.0, 1.0);
        }) < 1e-6);
}

TEST_CASE("parallel trials cover every index exactly once") {
  const int64_t n = 10000;
  std::vector<int> hits(n, 0);
  parallel_for_trials(n, [&](int64_t t) { hits[t] += 1; });
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("results are independent of the thread count") {
  auto run = [](const char* threads) {
    setenv("FAIRROUND_THREADS", threads, 1);
    std::vector<double> out(5000);
    parallel_for_trials(5000, [&](int64_t t) {
      Rng r = Rng(99).split(t);
      out[t] = r.uniform();
    });
    unsetenv("FAIRROUND_THREADS");
    return out;
  };
  CHECK(run("1") == run("7"));
}
