#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "loclim/errors.hpp"
#include "loclim/heat_kernel.hpp"

using namespace loclim;

namespace {

constexpr double kPi = std::numbers::pi;

// p_1^(k)(x) in one dimension from Kummer's function, valid for any k >= 0.
double kummer_deriv(double x, double k) {
  using boost::math::hypergeometric_1F1;
  using boost::math::tgamma;
  const double c = std::pow(2.0, (k - 1.0) / 2.0) * tgamma((k + 1.0) / 2.0) *
                   hypergeometric_1F1((k + 1.0) / 2.0, 0.5, -x * x / 2.0);
  const double s = x * std::pow(2.0, k / 2.0) * tgamma(k / 2.0 + 1.0) *
                   hypergeometric_1F1(k / 2.0 + 1.0, 1.5, -x * x / 2.0);
  return (std::cos(kPi * k / 2.0) * c - std::sin(kPi * k / 2.0) * s) / kPi;
}

}  // namespace

TEST(Hermite, LowOrders) {
  EXPECT_DOUBLE_EQ(hermite_he(0, 1.7), 1.0);
  EXPECT_DOUBLE_EQ(hermite_he(1, 1.7), 1.7);
  EXPECT_NEAR(hermite_he(3, 2.0), 8.0 - 6.0, 1e-14);
  EXPECT_NEAR(hermite_he(4, 1.5), std::pow(1.5, 4) - 6 * 1.5 * 1.5 + 3, 1e-13);
}

TEST(HeatKernel, DensityAndProduct) {
  const std::vector<double> x{0.3, -0.2};
  const double eps = 0.7;
  EXPECT_NEAR(heat_kernel(x, eps), heat_kernel_1d(0.3, eps) * heat_kernel_1d(-0.2, eps), 1e-15);
  EXPECT_NEAR(heat_kernel_1d(0.0, 1.0), 1.0 / std::sqrt(2 * kPi), 1e-15);
  EXPECT_THROW(heat_kernel_1d(0.0, 0.0), ParameterDomainError);
}

TEST(HeatKernel, FirstDerivativeClosedForm) {
  for (double x : {-1.3, 0.0, 0.4, 2.2}) {
    const double eps = 0.35;
    EXPECT_NEAR(heat_kernel_deriv_1d(x, eps, 1), -x / eps * heat_kernel_1d(x, eps), 1e-14);
  }
}

TEST(HeatKernel, FiniteDifferencesMatchHermite) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(-2.0, 2.0), ue(0.2, 2.0);
  for (int d = 1; d <= 3; ++d) {
    for (int total = 1; total <= 4; ++total) {
      for (const auto& alpha : multi_indices(d, total)) {
        std::vector<double> kv(alpha.begin(), alpha.end());
        const MultiIndex k(kv);
        int axis = 0;
        while (alpha[static_cast<std::size_t>(axis)] == 0) ++axis;
        kv[static_cast<std::size_t>(axis)] -= 1.0;
        const MultiIndex lower(kv);
        for (int rep = 0; rep < 5; ++rep) {
          std::vector<double> x(static_cast<std::size_t>(d));
          for (auto& v : x) v = ux(rng);
          const double eps = ue(rng);
          auto diff = [&](double h) {
            auto xp = x, xm = x;
            xp[static_cast<std::size_t>(axis)] += h;
            xm[static_cast<std::size_t>(axis)] -= h;
            return (heat_kernel_deriv(xp, eps, lower) - heat_kernel_deriv(xm, eps, lower)) / (2 * h);
          };
          const double h = 1e-3;
          const double fd = (4.0 * diff(h / 2) - diff(h)) / 3.0;  // Richardson
          const double exact = heat_kernel_deriv(x, eps, k);
          EXPECT_LE(std::abs(fd - exact), 1e-6 * std::abs(exact) + 1e-12) << k.to_string();
        }
      }
    }
  }
}

TEST(HeatKernel, FourierPathMatchesHermite) {
  KernelOptions fourier;
  fourier.method = KernelMethod::Fourier;
  for (int k = 0; k <= 4; ++k) {
    for (double x : {-1.7, -0.3, 0.25, 1.1}) {
      for (double eps : {0.3, 1.0, 2.5}) {
        const double h = heat_kernel_deriv_1d(x, eps, k);
        const double f = heat_kernel_deriv_1d(x, eps, k, fourier);
        EXPECT_NEAR(f, h, 1e-8 * std::abs(h)) << "k=" << k << " x=" << x << " eps=" << eps;
      }
    }
  }
}

TEST(HeatKernel, FractionalMatchesKummer) {
  for (double k : {0.25, 0.5, 1.5, 2.7}) {
    for (double x : {-1.2, -0.4, 0.0, 0.6, 1.9}) {
      const double expect = kummer_deriv(x, k);
      EXPECT_NEAR(heat_kernel_deriv_1d(x, 1.0, k), expect, 1e-9 * std::max(1.0, std::abs(expect)))
          << "k=" << k << " x=" << x;
    }
  }
}

TEST(HeatKernel, FractionalAtOriginClosedForm) {
  // (1/pi) cos(pi k / 2) 2^{(k-1)/2} Gamma((k+1)/2)
  for (double k : {0.3, 0.5, 1.25}) {
    const double expect =
        std::cos(kPi * k / 2) * std::pow(2.0, (k - 1) / 2) * std::tgamma((k + 1) / 2) / kPi;
    EXPECT_NEAR(heat_kernel_deriv_1d(0.0, 1.0, k), expect, 1e-11);
  }
}

TEST(HeatKernel, ScalingIdentity) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ux(-1.5, 1.5), ule(-3.0, 0.5), uk(0.0, 2.5);
  for (int rep = 0; rep < 200; ++rep) {
    const double x = ux(rng);
    const double eps = std::pow(10.0, ule(rng));
    const double k = rep % 2 ? std::floor(uk(rng) + 0.5) : uk(rng);
    const double lhs = heat_kernel_deriv_1d(x, eps, k);
    const double rhs = std::pow(eps, -(k + 1) / 2) * heat_kernel_deriv_1d(x / std::sqrt(eps), 1.0, k);
    EXPECT_NEAR(lhs, rhs, 1e-10 * std::abs(rhs) + 1e-300) << "k=" << k << " x=" << x << " eps=" << eps;
  }
}

TEST(FracPower, Convention) {
  const auto v = frac_power(-1.0, 0.5);
  EXPECT_NEAR(v.real(), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(v.imag(), -std::sqrt(0.5), 1e-15);
  const auto i3 = frac_power(2.0, 3.0);
  EXPECT_NEAR(i3.imag(), -8.0, 1e-14);
  EXPECT_THROW(frac_power(1.0, -0.5), ParameterDomainError);
}

TEST(FracPower, ContinuousAtIntegers) {
  for (int n = 0; n <= 4; ++n) {
    for (double x : {0.3, 1.0, 2.4}) {
      const auto base = frac_power(x, n);
      EXPECT_LE(std::abs(frac_power(x, n + 1e-9) - base), 1e-6);
      if (n > 0) EXPECT_LE(std::abs(frac_power(x, n - 1e-9) - base), 1e-6);
    }
  }
}

TEST(TestFunctionSpace, Membership) {
  EXPECT_TRUE(verify_space_membership(TestFunction::heat_kernel(1), 2).member);
  EXPECT_FALSE(verify_space_membership(TestFunction::heat_kernel(1), 3).member);
  EXPECT_TRUE(verify_space_membership(TestFunction::flat_gaussian(1), 4).member);
  const auto m2 = verify_space_membership(TestFunction::heat_kernel(2), 2);
  EXPECT_TRUE(m2.member);
}

TEST(TestFunctionSpace, MomentsOfGaussian) {
  const auto f = TestFunction::heat_kernel(1);
  const std::vector<int> a0{0}, a2{2}, a4{4};
  EXPECT_NEAR(moment(f, a0), 1.0, 1e-12);
  EXPECT_NEAR(moment(f, a2), 1.0, 1e-12);
  EXPECT_NEAR(moment(f, a4), 3.0, 1e-11);
}

TEST(MultiIndexTest, Basics) {
  const MultiIndex k{0.5, 2.0};
  EXPECT_DOUBLE_EQ(k.order(), 2.5);
  EXPECT_FALSE(k.all_integer());
  EXPECT_TRUE(MultiIndex({1.0, 2.0}).has_odd_integer_component());
  EXPECT_THROW(MultiIndex({-1.0}), ParameterDomainError);
  EXPECT_EQ(multi_indices(2, 2).size(), 3u);
}
