#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "loclim/conditions.hpp"
#include "loclim/errors.hpp"
#include "loclim/process.hpp"
#include "loclim/rng.hpp"

using namespace loclim;

TEST(Covariance, FbmAndBrownian) {
  const auto bm = ProcessSpec::fbm(0.5);
  for (double s : {0.1, 0.4, 0.9})
    for (double t : {0.2, 0.5, 1.0}) EXPECT_NEAR(covariance_value(bm, s, t), std::min(s, t), 1e-15);
  const auto f = ProcessSpec::fbm(0.3, 2.0);
  const double s = 0.3, t = 0.8, h = 0.3;
  const double expect = 0.5 * 2.0 * (std::pow(s, 2 * h) + std::pow(t, 2 * h) - std::pow(t - s, 2 * h));
  EXPECT_NEAR(covariance_value(f, s, t), expect, 1e-14);
}

TEST(Covariance, SubFbm) {
  const double h = 0.35, s = 0.4, t = 0.9;
  const double expect = std::pow(s, 2 * h) + std::pow(t, 2 * h) -
                        0.5 * (std::pow(s + t, 2 * h) + std::pow(t - s, 2 * h));
  EXPECT_NEAR(covariance_value(ProcessSpec::sub_fbm(h), s, t), expect, 1e-14);
}

TEST(Covariance, BiFbmReducesToFbm) {
  const auto b = ProcessSpec::bi_fbm(0.4, 1.0);
  const auto f = ProcessSpec::fbm(0.4);
  EXPECT_NEAR(covariance_value(b, 0.3, 0.7), covariance_value(f, 0.3, 0.7), 1e-14);
}

TEST(Spec, DomainChecks) {
  EXPECT_THROW(ProcessSpec::fbm(1.2).validate(), ParameterDomainError);
  EXPECT_THROW(ProcessSpec::fbm(0.0).validate(), ParameterDomainError);
  EXPECT_THROW(ProcessSpec::fbm(0.5, -1.0).validate(), ParameterDomainError);
  EXPECT_THROW(parse_process_kind("levy"), ConfigError);
}

TEST(Sampler, DeterministicPerReplicate) {
  const auto spec = ProcessSpec::fbm(0.3, 1.0, 2);
  const auto a = sample_path(spec, 1.0, 256, 9, 4);
  const auto b = sample_path(spec, 1.0, 256, 9, 4);
  const auto c = sample_path(spec, 1.0, 256, 9, 5);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
  EXPECT_EQ(a.values.rows(), 2);
  EXPECT_EQ(a.values.cols(), 257);
  EXPECT_EQ(a.values(0, 0), 0.0);
  EXPECT_EQ(a.values(1, 0), 0.0);
}

TEST(Sampler, CirculantAndCholeskyAgreeInLaw) {
  const auto spec = ProcessSpec::fbm(0.7);
  PathSampler circ(spec, 1.0, 32, SamplingMethod::Circulant);
  PathSampler chol(spec, 1.0, 32, SamplingMethod::Cholesky);
  const int m = 4000;
  double vc = 0.0, vh = 0.0;
  for (int r = 0; r < m; ++r) {
    const double a = circ.sample(3, static_cast<std::uint64_t>(r)).values(0, 32);
    const double b = chol.sample(3, static_cast<std::uint64_t>(r)).values(0, 32);
    vc += a * a;
    vh += b * b;
  }
  vc /= m;
  vh /= m;
  // Var X_1 = 1; each estimate has SE sqrt(2/m)
  EXPECT_NEAR(vc, 1.0, 4 * std::sqrt(2.0 / m));
  EXPECT_NEAR(vh, 1.0, 4 * std::sqrt(2.0 / m));
}

TEST(Sampler, SubFbmFallsBackOrSucceeds) {
  const auto spec = ProcessSpec::sub_fbm(0.4);
  PathSampler s(spec, 1.0, 128);
  const auto p = s.sample(1, 0);
  EXPECT_EQ(p.values.cols(), 129);
  EXPECT_TRUE(std::isfinite(p.values(0, 128)));
}

TEST(Rng, StreamsDiffer) {
  EXPECT_NE(stream_id(1, 2, 3), stream_id(1, 3, 2));
  EXPECT_NE(stream_id(1, 2, 3), stream_id(2, 2, 3));
  auto e1 = make_engine(stream_id(1, 2, 3));
  auto e2 = make_engine(stream_id(1, 2, 3));
  EXPECT_EQ(e1(), e2());
}

TEST(Conditions, FbmSatisfiesAll) {
  const auto spec = ProcessSpec::fbm(0.3);
  for (auto c : {Condition::LND, Condition::StrongLND_A, Condition::VarianceEnvelope_B, Condition::Decorrelation_C}) {
    const auto r = check_condition(spec, c);
    EXPECT_TRUE(r.pass) << to_string(c) << " worst " << r.worst_ratio;
  }
}

TEST(Conditions, BrownianStrongLndRatio) {
  const auto spec = ProcessSpec::fbm(0.5);
  const std::vector<double> s{0.2, 0.5};
  // Var(X_t | X_s) for BM is the gap to the nearest earlier point.
  EXPECT_NEAR(conditional_variance(spec, 0.9, s), 0.4, 1e-12);
  EXPECT_NEAR(increment_variance_ratio(spec, 0.5, 0.1), 1.0, 1e-12);
}
