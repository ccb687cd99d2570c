#include "loclim/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "loclim/rng.hpp"

namespace loclim {

void KahanSum::add(double x) noexcept {
  double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

double sum(std::span<const double> xs) {
  KahanSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  return sum(xs) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  double m = mean(xs);
  KahanSum s;
  for (double x : xs) s.add((x - m) * (x - m));
  return s.value() / static_cast<double>(xs.size() - 1);
}

double standard_deviation(std::span<const double> xs) { return std::sqrt(variance(xs)); }

double excess_kurtosis(std::span<const double> xs) {
  if (xs.size() < 4) return 0.0;
  double m = mean(xs);
  KahanSum s2, s4;
  for (double x : xs) {
    double d2 = (x - m) * (x - m);
    s2.add(d2);
    s4.add(d2 * d2);
  }
  double n = static_cast<double>(xs.size());
  double m2 = s2.value() / n;
  if (m2 <= 0.0) return 0.0;
  return s4.value() / n / (m2 * m2) - 3.0;
}

double correlation(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("correlation: length mismatch");
  if (xs.size() < 2) return 0.0;
  double mx = mean(xs), my = mean(ys);
  KahanSum sxy, sxx, syy;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double a = xs[i] - mx, b = ys[i] - my;
    sxy.add(a * b);
    sxx.add(a * a);
    syy.add(b * b);
  }
  double den = std::sqrt(sxx.value() * syy.value());
  return den > 0.0 ? sxy.value() / den : 0.0;
}

LinearFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("fit_line: need >= 2 paired points");
  double mx = mean(xs), my = mean(ys);
  KahanSum sxy, sxx;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy.add((xs[i] - mx) * (ys[i] - my));
    sxx.add((xs[i] - mx) * (xs[i] - mx));
  }
  if (sxx.value() <= 0.0) throw std::invalid_argument("fit_line: abscissae are all equal");
  LinearFit fit;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  if (xs.size() > 2) {
    KahanSum rss;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double r = ys[i] - fit.intercept - fit.slope * xs[i];
      rss.add(r * r);
    }
    fit.slope_se = std::sqrt(rss.value() / static_cast<double>(xs.size() - 2) / sxx.value());
  }
  return fit;
}

double bootstrap_se(std::size_t n, std::size_t resamples, std::uint64_t seed, std::uint64_t tag,
                    const ResampleStatistic& stat) {
  if (n == 0 || resamples < 2) return 0.0;
  Engine eng = make_engine(stream_id(seed, stream_tag::kBootstrap, tag));
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> idx(n);
  std::vector<double> values(resamples);
  for (std::size_t r = 0; r < resamples; ++r) {
    for (auto& i : idx) i = pick(eng);
    values[r] = stat(idx);
  }
  return standard_deviation(values);
}

}  // namespace loclim
