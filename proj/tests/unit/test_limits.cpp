#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "loclim/errors.hpp"
#include "loclim/limits.hpp"

using namespace loclim;

namespace {

const double kPi = std::numbers::pi;

ConstantParams params(Quantity h, int d = 1, std::vector<double> k = {}, int n = 2) {
  ConstantParams p;
  p.hurst = h;
  p.dim = d;
  p.k = k.empty() ? MultiIndex::zero(d) : MultiIndex(k);
  p.order_n = n;
  return p;
}

double value(ConstantName name, const ConstantParams& p) { return constant(name, p).value; }

// int x^4 e^{-x^2/2} dx by composite Simpson on [-40, 40]
double fourth_gaussian_moment() {
  const int n = 200000;
  const double a = -40.0, b = 40.0, h = (b - a) / n;
  auto f = [](double x) { return x * x * x * x * std::exp(-0.5 * x * x); };
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST(Classify, ExactBoundaryOneDim) {
  const auto r = classify(Quantity(Rational(1, 5)), MultiIndex::zero(1), 1, 2);
  EXPECT_EQ(r.regime, Regime::BOUNDARY_LOG);
  EXPECT_TRUE(r.boundary_exact);
  EXPECT_TRUE(r.scaling.has_log);
  EXPECT_DOUBLE_EQ(r.scaling.exponent, -1.0);
}

TEST(Classify, ExactBoundaryTwoDims) {
  const auto r = classify(Quantity(Rational(1, 6)), MultiIndex::zero(2), 2, 2);
  EXPECT_EQ(r.regime, Regime::BOUNDARY_LOG);
  EXPECT_TRUE(r.exact_inputs);
}

TEST(Classify, RegimesAndSummaries) {
  EXPECT_EQ(classify(Quantity(Rational(1, 10)), MultiIndex::zero(1), 1, 2).regime, Regime::LP_LIMIT);
  const auto clt = classify(Quantity(Rational(1, 3)), MultiIndex::zero(1), 1, 2);
  EXPECT_EQ(clt.regime, Regime::CLT);
  EXPECT_NEAR(clt.scaling.exponent, -0.5, 1e-15);
  EXPECT_EQ(clt.summary(), "CLT, ℓ(ε)=ε^-0.5");
  const auto none = classify(Quantity(Rational(1, 2)), std::vector<Quantity>{Quantity(Rational(1, 2))}, 1, 2);
  EXPECT_EQ(none.regime, Regime::NONEXISTENT);
}

TEST(Classify, PartitionIsTotal) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> num(1, 59), dd(1, 3), nn(1, 4), kk(0, 6);
  for (int rep = 0; rep < 2000; ++rep) {
    const int d = dd(rng), n = nn(rng);
    const Rational h(num(rng), 60);
    std::vector<Quantity> k;
    Rational ksum(0);
    for (int l = 0; l < d; ++l) {
      const Rational kl(kk(rng), 4);
      ksum = ksum + kl;
      k.emplace_back(kl);
    }
    const auto r = classify(Quantity(h), k, d, n);
    const Rational lhs = h * (Rational(2) * ksum + Rational(d));
    const Rational thr = Rational(1) - Rational(2 * n) * h;
    Regime want;
    if (lhs >= Rational(1)) want = Regime::NONEXISTENT;
    else if (lhs < thr) want = Regime::LP_LIMIT;
    else if (lhs == thr) want = Regime::BOUNDARY_LOG;
    else want = Regime::CLT;
    EXPECT_EQ(r.regime, want) << h.to_string() << " d=" << d << " N=" << n;
  }
}

TEST(Classify, ExponentContinuousAcrossBoundary) {
  // just above the boundary the CLT power tends to -N/2, the LP / boundary power
  const int n = 2;
  for (double dh : {1e-3, 1e-6, 1e-9}) {
    const auto clt = classify(Quantity(0.2 + dh), MultiIndex::zero(1), 1, n);
    ASSERT_EQ(clt.regime, Regime::CLT);
    EXPECT_NEAR(clt.scaling.exponent, -n / 2.0, 10 * dh);
  }
  const auto lp = classify(Quantity(0.2 - 1e-9), MultiIndex::zero(1), 1, n);
  EXPECT_EQ(lp.regime, Regime::LP_LIMIT);
  EXPECT_DOUBLE_EQ(lp.scaling.exponent, -n / 2.0);
}

TEST(Constants, Dtilde1AgainstIndependentQuadrature) {
  const double h = 0.2;
  const double oracle = fourth_gaussian_moment() / (2 * h * 2 * kPi);
  EXPECT_NEAR(oracle, 15.0 / (2 * std::sqrt(2 * kPi)), 1e-10);
  const double d1 = value(ConstantName::Dtilde1, params(Rational(1, 5)));
  EXPECT_NEAR(d1, oracle, 1e-6 * oracle);
  EXPECT_NEAR(value(ConstantName::D_Hd_boundary, params(Rational(1, 5))), d1, 1e-8 * d1);
}

TEST(Constants, Dtilde2FrozenValues) {
  EXPECT_NEAR(value(ConstantName::Dtilde2, params(Rational(1, 3))), 0.8295771505992246, 1e-10);
  EXPECT_NEAR(value(ConstantName::D_Hd_clt, params(Rational(1, 3))), 0.8295771505992246, 1e-10);
  EXPECT_NEAR(value(ConstantName::Dtilde2, params(0.3, 2, {0.25, 0.0})), 1.0601607559086687, 1e-9);
  EXPECT_NEAR(value(ConstantName::D_Hd_clt, params(0.3, 2, {0.25, 0.0})), 1.0601607559086687, 1e-9);
  EXPECT_NEAR(value(ConstantName::Dtilde2, params(0.2, 3)), 0.6601565209697814, 1e-9);
}

TEST(Constants, FlatGaussianOrderFour) {
  auto p = params(Rational(1, 3), 1, {}, 4);
  p.f = std::make_shared<const TestFunction>(TestFunction::flat_gaussian(1));
  EXPECT_NEAR(value(ConstantName::D_Hd_clt, p), 0.2992067103010745, 1e-9);
}

TEST(Constants, GenericRouteMatchesRadial) {
  // p_1 wrapped as an opaque function forces the angular quadrature
  auto base = TestFunction::heat_kernel(2);
  auto generic = std::make_shared<const TestFunction>(
      "gauss2", 2, [base](std::span<const double> u) { return base(u); },
      [base](std::span<const double> x) { return base.fourier(x); }, 2, false);
  auto p = params(0.3, 2, {0.25, 0.0});
  p.f = generic;
  EXPECT_NEAR(value(ConstantName::D_Hd_clt, p), 1.0601607559086687, 1e-7);
}

TEST(Constants, ImportedConstants) {
  EXPECT_NEAR(value(ConstantName::D_Hdf, params(Rational(1, 5))), 0.2 * 2.99206710301, 1e-9);
  EXPECT_NEAR(value(ConstantName::D_Hd_p1, params(Rational(1, 5))), 2.99206710301, 1e-9);
  EXPECT_NEAR(value(ConstantName::C_Hdf, params(0.3, 2)), value(ConstantName::C_Hd_p1, params(0.3, 2)), 1e-10);
}

TEST(Constants, LpCoefficientSigns) {
  const auto c = constant(ConstantName::LP_COEFFICIENT, params(Rational(1, 10)));
  ASSERT_EQ(c.lp_terms.size(), 1u);
  EXPECT_NEAR(c.lp_terms[0].derivative_coefficient, 0.5, 1e-10);
  EXPECT_NEAR(c.lp_terms[0].coefficient.real(), -0.5, 1e-10);
  EXPECT_NEAR(c.lp_terms[0].moment, 1.0, 1e-10);
}

TEST(Constants, CoarserQuadratureSelfConsistent) {
  struct Case {
    ConstantName name;
    ConstantParams p;
  };
  std::vector<Case> cases{
      {ConstantName::Dtilde1, params(Rational(1, 5))},
      {ConstantName::D_Hd_boundary, params(Rational(1, 5))},
      {ConstantName::Dtilde2, params(Rational(1, 3))},
      {ConstantName::D_Hd_clt, params(0.3, 2, {0.25, 0.0})},
      {ConstantName::C_Hdf, params(0.3, 2)},
  };
  for (auto& c : cases) {
    const double fine = value(c.name, c.p);
    c.p.quad = c.p.quad.coarser();
    const double coarse = value(c.name, c.p);
    EXPECT_NEAR(coarse, fine, 1e-6 * std::abs(fine)) << to_string(c.name);
  }
}

TEST(Constants, RegimeGuards) {
  EXPECT_THROW(constant(ConstantName::Dtilde2, params(Rational(1, 5))), ParameterDomainError);
  EXPECT_THROW(constant(ConstantName::Dtilde1, params(Rational(1, 3))), ParameterDomainError);
  auto p = params(Rational(1, 3), 1, {}, 2);
  p.f = std::make_shared<const TestFunction>(TestFunction::odd_gaussian());
  EXPECT_THROW(constant(ConstantName::D_Hd_clt, p), ParameterDomainError);
  EXPECT_THROW(parse_constant_name("D_nope"), ConfigError);
}

TEST(Constants, CacheKeepsOneEntryPerQuery) {
  clear_constant_cache();
  value(ConstantName::Dtilde2, params(Rational(1, 3)));
  value(ConstantName::Dtilde2, params(Rational(1, 3)));
  EXPECT_EQ(constant_cache_size(), 1u);
  clear_constant_cache();
  EXPECT_EQ(constant_cache_size(), 0u);
}

TEST(SpecialIntegrals, ClosedForms) {
  // unnormalised: int_R |x|^p e^{-x^2/2} dx
  EXPECT_NEAR(gaussian_abs_moment(4.0), 3.0 * std::sqrt(2 * kPi), 1e-12);
  EXPECT_NEAR(gaussian_abs_moment(1.0), 2.0, 1e-13);
  EXPECT_NEAR(radial_gap_integral_closed(-2.0), std::log(2.0) / 2.0, 1e-13);
  EXPECT_NEAR(radial_gap_integral_closed(-1.0), 0.7341744237254845, 1e-12);
  EXPECT_NEAR(radial_gap_integral_closed(-0.5), 1.6709606442496215, 1e-12);
  EXPECT_NEAR(radial_gap_integral_closed(-3.5), 0.5599273747356116, 1e-12);
}

TEST(Scaling, FactorValues) {
  const auto r = classify(Quantity(Rational(1, 5)), MultiIndex::zero(1), 1, 2);
  const double eps = 1e-3;
  EXPECT_NEAR(scaling(r, eps), std::pow(eps, -1.0) / std::sqrt(std::log(1.0 + std::pow(eps, -0.5))), 1e-9);
}
