#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace loclim {

// Neumaier-compensated running sum.
class KahanSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double sum(std::span<const double> xs);
double mean(std::span<const double> xs);
// Unbiased sample variance (n - 1 denominator).
double variance(std::span<const double> xs);
double standard_deviation(std::span<const double> xs);
// Sample excess kurtosis m4 / m2^2 - 3 with population moments.
double excess_kurtosis(std::span<const double> xs);
double correlation(std::span<const double> xs, std::span<const double> ys);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_se = 0.0;  // classical OLS standard error
};

// Unweighted least squares y = a + b x. Needs at least two points.
LinearFit fit_line(std::span<const double> xs, std::span<const double> ys);

// Statistic evaluated on a bootstrap resample: indices[i] selects the
// replicate used in position i.
using ResampleStatistic = std::function<double(std::span<const std::size_t>)>;

// Standard deviation of `stat` over `resamples` bootstrap draws of n indices.
// Draws come from stream_id(seed, stream_tag::kBootstrap, tag).
double bootstrap_se(std::size_t n, std::size_t resamples, std::uint64_t seed, std::uint64_t tag,
                    const ResampleStatistic& stat);

}  // namespace loclim
