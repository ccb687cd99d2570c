#include "loclim/heat_kernel.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "loclim/quadrature.hpp"

#include "loclim/errors.hpp"

namespace loclim {
namespace {

constexpr double kPi = std::numbers::pi;

bool is_integer(double k) { return std::floor(k) == k; }

void check_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ParameterDomainError("heat kernel needs eps > 0");
}

}  // namespace

MultiIndex::MultiIndex(std::vector<double> k) : k_(std::move(k)) {
  for (double v : k_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ParameterDomainError("multi-index components must be >= 0");
    order_ += v;
    all_integer_ = all_integer_ && is_integer(v);
  }
}

MultiIndex MultiIndex::zero(int dim) { return MultiIndex(std::vector<double>(static_cast<std::size_t>(dim), 0.0)); }

MultiIndex MultiIndex::plus_unit(int i) const {
  std::vector<double> k = k_;
  k.at(static_cast<std::size_t>(i)) += 1.0;
  return MultiIndex(std::move(k));
}

bool MultiIndex::has_odd_integer_component() const noexcept {
  for (double v : k_) {
    if (is_integer(v) && static_cast<long long>(v) % 2 == 1) return true;
  }
  return false;
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < k_.size(); ++i) os << (i ? "," : "") << k_[i];
  os << ")";
  return os.str();
}

double hermite_he(int n, double x) {
  if (n < 0) throw ParameterDomainError("Hermite degree must be >= 0");
  if (n == 0) return 1.0;
  double h0 = 1.0, h1 = x;
  for (int j = 1; j < n; ++j) {
    const double h2 = x * h1 - j * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

double heat_kernel_1d(double x, double eps) {
  check_eps(eps);
  return std::exp(-0.5 * x * x / eps) / std::sqrt(2.0 * kPi * eps);
}

double heat_kernel(std::span<const double> x, double eps) {
  check_eps(eps);
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  const double d = static_cast<double>(x.size());
  return std::exp(-0.5 * r2 / eps) * std::pow(2.0 * kPi * eps, -0.5 * d);
}

std::complex<double> frac_power(double x, double k) {
  if (!(k >= 0.0)) throw ParameterDomainError("frac_power needs k >= 0");
  if (is_integer(k)) {
    const auto n = static_cast<long long>(k);
    const double mag = std::pow(x, static_cast<double>(n));
    switch (n % 4) {
      case 0: return {mag, 0.0};
      case 1: return {0.0, mag};
      case 2: return {-mag, 0.0};
      default: return {0.0, -mag};
    }
  }
  if (x == 0.0) return {0.0, 0.0};
  const double mag = std::pow(std::abs(x), k);
  const double phase = 0.5 * kPi * k * (x > 0.0 ? 1.0 : -1.0);
  return {mag * std::cos(phase), mag * std::sin(phase)};
}

double fourier_truncation(double eps, double k, double tol) {
  const double lt = std::log(1.0 / tol);
  double u = std::sqrt(2.0 * lt / eps);
  for (int it = 0; it < 8; ++it) u = std::sqrt(2.0 * (lt + (k + 1.0) * std::log(std::max(u, 1.0))) / eps);
  return u;
}

namespace {

// p_1^(k)(z) for non-integer k. The Fourier integral over the real line is
// moved onto Im u = z. For z > 0 the shift wraps the branch cut of (iu)^k on
// the positive imaginary axis, which contributes the slowly decaying part
//   -2 sin(pi k) int_0^z s^k exp(-s (z - s/2)) ds.
// Neither piece oscillates, so tails keep full relative accuracy.
double fractional_deriv_unit(double z, double k) {
  constexpr double kTail = 40.0;
  double err = 0.0, l1 = 0.0;
  auto run = [&](const std::function<double(double)>& f, double a, double b) {
    const auto q = tanh_sinh(f, a, b, 1e-15);
    err += q.error;
    l1 += q.l1;
    return q.value;
  };
  double total = 0.0;
  if (z <= 0.0) {
    const double a = -z;
    total = 2.0 * run(
                      [&](double t) {
                        const double r2 = a * a + t * t;
                        if (r2 == 0.0) return 0.0;
                        return std::exp(-0.5 * r2 + 0.5 * k * std::log(r2)) * std::cos(k * std::atan2(t, a));
                      },
                      0.0, kTail);
  } else {
    const double cut = run(
        [&](double s) { return s > 0.0 ? std::exp(k * std::log(s) - s * (z - 0.5 * s)) : 0.0; }, 0.0, z);
    const double line = run(
        [&](double t) {
          const double r2 = z * z + t * t;
          return std::exp(-0.5 * r2 + 0.5 * k * std::log(r2)) * std::cos(0.5 * kPi * k + k * std::atan2(z, t));
        },
        0.0, kTail);
    total = -2.0 * std::sin(kPi * k) * cut + 2.0 * line;
  }
  if (err > 1e-12 * std::max(l1, 1e-300)) {
    throw AccuracyError("fractional heat-kernel quadrature did not converge", err / std::max(l1, 1e-300));
  }
  return total / (2.0 * kPi);
}

}  // namespace

double heat_kernel_deriv_fourier_1d(double x, double eps, double k, double tol) {
  check_eps(eps);
  if (!(k >= 0.0)) throw ParameterDomainError("derivative order must be >= 0");
  if (!is_integer(k)) return fractional_deriv_unit(x / std::sqrt(eps), k) * std::pow(eps, -0.5 * (k + 1.0));

  // integer k: trapezoid on the truncated real line (spectrally accurate here)
  const double big_u = fourier_truncation(eps, k, tol);
  auto integrand = [&](double u) { return frac_power(u, k) * std::exp(std::complex<double>(-0.5 * eps * u * u, x * u)); };
  std::complex<double> total;
  double l1 = 0.0;
  const double h = std::min(0.01, 1.0 / (4.0 * (1.0 + std::abs(x))));
  const auto n = static_cast<long long>(std::ceil(2.0 * big_u / h));
  const double step = 2.0 * big_u / static_cast<double>(n);
  for (long long j = 0; j <= n; ++j) {
    const double u = -big_u + step * static_cast<double>(j);
    const double w = (j == 0 || j == n) ? 0.5 * step : step;
    const auto v = integrand(u);
    total += w * v;
    l1 += w * std::abs(v);
  }
  total /= 2.0 * kPi;
  l1 /= 2.0 * kPi;
  if (std::abs(total.imag()) > 1e-9 * std::max(1.0, l1)) {
    throw AccuracyError("heat-kernel Fourier integral has a non-real residue", std::abs(total.imag()));
  }
  return total.real();
}

double heat_kernel_deriv_1d(double x, double eps, double k, const KernelOptions& opt) {
  check_eps(eps);
  if (!(k >= 0.0)) throw ParameterDomainError("derivative order must be >= 0");
  if (opt.method == KernelMethod::Auto && is_integer(k)) {
    const int n = static_cast<int>(k);
    const double se = std::sqrt(eps);
    const double z = x / se;
    const double he = hermite_he(n, z);
    if (he == 0.0) return 0.0;
    // one exp at the end so deep-tail values round once, not per factor
    const double log_mag = std::log(std::abs(he)) - (n + 1) * std::log(se) - 0.5 * z * z - 0.5 * std::log(2.0 * kPi);
    return ((n % 2 == 0) == (he > 0.0) ? 1.0 : -1.0) * std::exp(log_mag);
  }
  return heat_kernel_deriv_fourier_1d(x, eps, k, opt.tolerance);
}

double heat_kernel_deriv(std::span<const double> x, double eps, const MultiIndex& k, const KernelOptions& opt) {
  if (static_cast<int>(x.size()) != k.dim()) throw ShapeError("point and multi-index dimensions differ");
  double v = 1.0;
  for (int l = 0; l < k.dim(); ++l) v *= heat_kernel_deriv_1d(x[static_cast<std::size_t>(l)], eps, k[l], opt);
  return v;
}

}  // namespace loclim
