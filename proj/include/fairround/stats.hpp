#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace fairround {

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Sample mean and stderr of the mean (sample stddev / sqrt(n)).
MeanStderr mean_stderr(const std::vector<double>& samples);

// Binomial stderr sqrt(p(1-p)/n) for an indicator frequency.
double binom_stderr(double p_hat, int64_t n);

// Regularized upper incomplete gamma Q(a, x); Q(df/2, chi2/2) is the
// chi-square upper tail.
double igamc(double a, double x);

// Upper-tail p-value of Pearson's statistic; expected given as counts.
double chi_square_p(const std::vector<double>& observed,
                    const std::vector<double>& expected);

// Two-sided Kolmogorov-Smirnov p-value of samples against a CDF.
double ks_test_p(std::vector<double> samples,
                 const std::function<double(double)>& cdf);

// Runs body(t) for t in [0, trials); thread count from FAIRROUND_THREADS
// (default: hardware concurrency). The body must write only to its own
// trial's slots; the schedule is deterministic in results because each
// trial owns its seed.
void parallel_for_trials(int64_t trials,
                         const std::function<void(int64_t)>& body);

}  // namespace fairround
