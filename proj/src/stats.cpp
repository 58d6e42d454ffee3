#include "fairround/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace fairround {

MeanStderr mean_stderr(const std::vector<double>& samples) {
  MeanStderr out;
  const size_t n = samples.size();
  if (n == 0) return out;
  double sum = 0.0;
  for (double v : samples) sum += v;
  out.mean = sum / n;
  if (n < 2) return out;
  double ss = 0.0;
  for (double v : samples) {
    const double d = v - out.mean;
    ss += d * d;
  }
  out.stderr_ = std::sqrt(ss / (n - 1) / n);
  return out;
}

double binom_stderr(double p_hat, int64_t n) {
  if (n <= 0) return 0.0;
  const double p = std::clamp(p_hat, 0.0, 1.0);
  return std::sqrt(p * (1.0 - p) / n);
}

namespace {

// Lower regularized gamma P(a, x) by series expansion (x < a + 1).
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < 1000; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized gamma Q(a, x) by continued fraction (x >= a + 1).
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double igamc(double a, double x) {
  if (x <= 0.0) return 1.0;
  if (a <= 0.0) return 0.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_square_p(const std::vector<double>& observed,
                    const std::vector<double>& expected) {
  double chi2 = 0.0;
  int df = -1;  // total count is fixed
  for (size_t b = 0; b < observed.size(); ++b) {
    if (expected[b] <= 0.0) continue;
    const double d = observed[b] - expected[b];
    chi2 += d * d / expected[b];
    ++df;
  }
  if (df < 1) return 1.0;
  return igamc(df / 2.0, chi2 / 2.0);
}

double ks_test_p(std::vector<double> samples,
                 const std::function<double(double)>& cdf) {
  const size_t n = samples.size();
  if (n == 0) return 1.0;
  std::sort(samples.begin(), samples.end());
  double d_stat = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double f = cdf(samples[i]);
    d_stat = std::max(d_stat, std::fabs(f - static_cast<double>(i) / n));
    d_stat = std::max(d_stat, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  // Asymptotic Kolmogorov tail with the Stephens small-sample correction.
  const double rn = std::sqrt(static_cast<double>(n));
  const double lam = (rn + 0.12 + 0.11 / rn) * d_stat;
  double p = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lam * lam);
    p += sign * term;
    sign = -sign;
    if (term < 1e-12) break;
  }
  return std::clamp(2.0 * p, 0.0, 1.0);
}

void parallel_for_trials(int64_t trials,
                         const std::function<void(int64_t)>& body) {
  unsigned threads = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("FAIRROUND_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) threads = static_cast<unsigned>(v);
  }
  if (threads <= 1 || trials < 2) {
    for (int64_t t = 0; t < trials; ++t) body(t);
    return;
  }
  if (static_cast<int64_t>(threads) > trials)
    threads = static_cast<unsigned>(trials);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (int64_t t = w; t < trials; t += threads) body(t);
    });
  }
  for (std::thread& th : pool) th.join();
}

}  // namespace fairround
