#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Core>

#include "loclim/rational.hpp"

namespace loclim {

enum class ProcessKind { FBM, SubFBM, BiFBM, CustomCovariance };

std::string to_string(ProcessKind kind);
ProcessKind parse_process_kind(const std::string& text);

// One-component covariance R(s, t).
using CovarianceFn = std::function<double(double, double)>;

struct ProcessSpec {
  ProcessKind kind = ProcessKind::FBM;
  double hurst = 0.5;
  // Exact value of H when it was given as a rational (used by regime checks).
  std::optional<Rational> hurst_exact;
  // Increment variance scale. Only FBM uses it in the covariance; other
  // models derive it from their small-increment limit (see increment_sigma).
  double sigma = 1.0;
  int dim = 1;
  // Bi-fractional parameters, H = H' * K.
  double bifbm_hprime = 0.0;
  double bifbm_k = 1.0;
  CovarianceFn custom;

  static ProcessSpec fbm(double hurst, double sigma = 1.0, int dim = 1);
  static ProcessSpec fbm(const Rational& hurst, double sigma = 1.0, int dim = 1);
  static ProcessSpec sub_fbm(double hurst, int dim = 1);
  static ProcessSpec bi_fbm(double hprime, double k, int dim = 1);
  static ProcessSpec custom_covariance(double hurst, CovarianceFn r, int dim = 1);

  Quantity hurst_quantity() const;
  // Throws ParameterDomainError when an invariant is violated.
  void validate() const;
};

CovarianceFn covariance(const ProcessSpec& spec);
double covariance_value(const ProcessSpec& spec, double s, double t);

// sigma of the small-increment law Var(X_{t+h} - X_t) ~ sigma h^{2H}. Exact
// for FBM; estimated from the covariance at h/t = 1e-6 otherwise.
double increment_sigma(const ProcessSpec& spec);

enum class SamplingMethod { Auto, Circulant, Cholesky };

std::string to_string(SamplingMethod method);

struct SamplerProvenance {
  SamplingMethod method = SamplingMethod::Auto;
  bool fell_back = false;       // circulant embedding rejected, Cholesky used
  double jitter = 0.0;          // relative diagonal jitter that made Cholesky succeed
  double min_eigen_ratio = 0.0; // most negative circulant eigenvalue / largest
};

using PathMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct PathSample {
  ProcessSpec spec;
  double horizon = 1.0;
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  PathMatrix values;  // dim x (steps + 1), values(l, 0) == 0
  SamplerProvenance provenance;

  int dim() const noexcept { return static_cast<int>(values.rows()); }
  double step() const noexcept { return horizon / static_cast<double>(steps); }
  double time(std::size_t i) const noexcept { return horizon * static_cast<double>(i) / static_cast<double>(steps); }
  std::span<const double> component(int l) const {
    return {values.data() + static_cast<std::ptrdiff_t>(l) * values.cols(), static_cast<std::size_t>(values.cols())};
  }
};

// Factorization for one (spec, T, n_t), shared read-only across threads.
// Component l of replicate r draws from stream_id(seed, l, r).
class PathSampler {
 public:
  PathSampler(const ProcessSpec& spec, double horizon, std::size_t steps,
              SamplingMethod method = SamplingMethod::Auto);

  PathSample sample(std::uint64_t seed, std::uint64_t replicate = 0) const;
  const SamplerProvenance& provenance() const noexcept;
  const ProcessSpec& spec() const noexcept;
  double horizon() const noexcept;
  std::size_t steps() const noexcept;

  // Largest grid accepted by the Cholesky sampler.
  static constexpr std::size_t kMaxCholeskySteps = 4096;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

PathSample sample_path(const ProcessSpec& spec, double horizon, std::size_t steps, std::uint64_t seed,
                       std::uint64_t replicate = 0);

// Degenerate all-zero path on the same grid (test input).
PathSample zero_path(const ProcessSpec& spec, double horizon, std::size_t steps);

}  // namespace loclim
