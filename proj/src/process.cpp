#include "loclim/process.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>

#include "fft.hpp"
#include "loclim/errors.hpp"
#include "loclim/rng.hpp"

namespace loclim {

std::string to_string(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::FBM: return "fbm";
    case ProcessKind::SubFBM: return "sfbm";
    case ProcessKind::BiFBM: return "bifbm";
    case ProcessKind::CustomCovariance: return "custom";
  }
  return "?";
}

ProcessKind parse_process_kind(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "fbm") return ProcessKind::FBM;
  if (t == "sfbm" || t == "subfbm") return ProcessKind::SubFBM;
  if (t == "bifbm") return ProcessKind::BiFBM;
  if (t == "custom") return ProcessKind::CustomCovariance;
  throw ConfigError("unknown process kind '" + text + "' (expected fbm, sfbm, bifbm)");
}

std::string to_string(SamplingMethod method) {
  switch (method) {
    case SamplingMethod::Auto: return "auto";
    case SamplingMethod::Circulant: return "circulant";
    case SamplingMethod::Cholesky: return "cholesky";
  }
  return "?";
}

ProcessSpec ProcessSpec::fbm(double hurst, double sigma, int dim) {
  ProcessSpec s;
  s.kind = ProcessKind::FBM;
  s.hurst = hurst;
  s.sigma = sigma;
  s.dim = dim;
  s.validate();
  return s;
}

ProcessSpec ProcessSpec::fbm(const Rational& hurst, double sigma, int dim) {
  ProcessSpec s = fbm(hurst.to_double(), sigma, dim);
  s.hurst_exact = hurst;
  return s;
}

ProcessSpec ProcessSpec::sub_fbm(double hurst, int dim) {
  ProcessSpec s;
  s.kind = ProcessKind::SubFBM;
  s.hurst = hurst;
  s.dim = dim;
  s.validate();
  return s;
}

ProcessSpec ProcessSpec::bi_fbm(double hprime, double k, int dim) {
  ProcessSpec s;
  s.kind = ProcessKind::BiFBM;
  s.bifbm_hprime = hprime;
  s.bifbm_k = k;
  s.hurst = hprime * k;
  s.sigma = std::pow(2.0, 1.0 - k);
  s.dim = dim;
  s.validate();
  return s;
}

ProcessSpec ProcessSpec::custom_covariance(double hurst, CovarianceFn r, int dim) {
  ProcessSpec s;
  s.kind = ProcessKind::CustomCovariance;
  s.hurst = hurst;
  s.custom = std::move(r);
  s.dim = dim;
  s.validate();
  return s;
}

Quantity ProcessSpec::hurst_quantity() const {
  if (hurst_exact) return Quantity(*hurst_exact);
  return Quantity(hurst);
}

void ProcessSpec::validate() const {
  if (!(hurst > 0.0 && hurst < 1.0)) throw ParameterDomainError("Hurst index must lie in (0,1)");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterDomainError("sigma must be positive");
  if (dim < 1) throw ParameterDomainError("dimension must be >= 1");
  if (hurst_exact && std::abs(hurst_exact->to_double() - hurst) > 1e-15) {
    throw ParameterDomainError("exact Hurst value disagrees with its floating value");
  }
  if (kind == ProcessKind::BiFBM) {
    if (!(bifbm_hprime > 0.0 && bifbm_hprime < 1.0)) throw ParameterDomainError("bi-fBm H' must lie in (0,1)");
    if (!(bifbm_k > 0.0 && bifbm_k <= 1.0)) throw ParameterDomainError("bi-fBm K must lie in (0,1]");
    if (std::abs(bifbm_hprime * bifbm_k - hurst) > 1e-12) throw ParameterDomainError("bi-fBm requires H = H' K");
  }
  if (kind == ProcessKind::CustomCovariance && !custom) {
    throw ParameterDomainError("custom covariance kind needs a covariance function");
  }
}

double covariance_value(const ProcessSpec& spec, double s, double t) {
  const double h2 = 2.0 * spec.hurst;
  switch (spec.kind) {
    case ProcessKind::FBM:
      return 0.5 * spec.sigma * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::abs(t - s), h2));
    case ProcessKind::SubFBM:
      return std::pow(s, h2) + std::pow(t, h2) - 0.5 * (std::pow(s + t, h2) + std::pow(std::abs(t - s), h2));
    case ProcessKind::BiFBM: {
      const double hp2 = 2.0 * spec.bifbm_hprime;
      const double k = spec.bifbm_k;
      return std::pow(2.0, -k) *
             (std::pow(std::pow(s, hp2) + std::pow(t, hp2), k) - std::pow(std::abs(t - s), hp2 * k));
    }
    case ProcessKind::CustomCovariance:
      return spec.custom(s, t);
  }
  return 0.0;
}

CovarianceFn covariance(const ProcessSpec& spec) {
  spec.validate();
  return [spec](double s, double t) { return covariance_value(spec, s, t); };
}

namespace {

long double increment_ratio(const ProcessSpec& spec, long double h) {
  // Long double keeps the cancellation in R(t+h,t+h) + R(t,t) - 2R(t,t+h) small.
  auto r = [&](long double s, long double t) -> long double {
    const long double h2 = 2.0L * spec.hurst;
    switch (spec.kind) {
      case ProcessKind::FBM:
        return 0.5L * spec.sigma * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::fabs(t - s), h2));
      case ProcessKind::SubFBM:
        return std::pow(s, h2) + std::pow(t, h2) - 0.5L * (std::pow(s + t, h2) + std::pow(std::fabs(t - s), h2));
      case ProcessKind::BiFBM: {
        const long double hp2 = 2.0L * spec.bifbm_hprime;
        const long double k = spec.bifbm_k;
        return std::pow(2.0L, -k) *
               (std::pow(std::pow(s, hp2) + std::pow(t, hp2), k) - std::pow(std::fabs(t - s), hp2 * k));
      }
      case ProcessKind::CustomCovariance:
        return spec.custom(static_cast<double>(s), static_cast<double>(t));
    }
    return 0.0L;
  };
  const long double t = 1.0L;
  long double v = r(t + h, t + h) + r(t, t) - 2.0L * r(t, t + h);
  return v / std::pow(h, 2.0L * spec.hurst);
}

}  // namespace

double increment_sigma(const ProcessSpec& spec) {
  spec.validate();
  if (spec.kind == ProcessKind::FBM) return spec.sigma;
  // ratio(h) = sigma + c h^p + ...; extrapolate from three geometric h.
  const long double r1 = increment_ratio(spec, 1e-3L);
  const long double r2 = increment_ratio(spec, 1e-4L);
  const long double r3 = increment_ratio(spec, 1e-5L);
  const long double d12 = r1 - r2, d23 = r2 - r3;
  if (std::fabs(d23) < 1e-14L * std::fabs(r3) || d12 / d23 <= 1.0L) return static_cast<double>(r3);
  const long double q = d12 / d23;  // = 10^p
  return static_cast<double>(r3 - d23 / (q - 1.0L));
}

struct PathSampler::Impl {
  ProcessSpec spec;
  double horizon = 1.0;
  std::size_t steps = 0;
  SamplerProvenance provenance;
  std::size_t embed = 0;              // circulant size m = 2 n
  std::vector<double> sqrt_lambda;    // sqrt(lambda_j / m)
  Eigen::MatrixXd chol;               // lower factor of the grid Gram matrix

  bool build_circulant();
  void build_cholesky();
};

bool PathSampler::Impl::build_circulant() {
  const std::size_t n = steps;
  const double h2 = 2.0 * spec.hurst;
  const double dt = horizon / static_cast<double>(n);
  const double scale = 0.5 * spec.sigma * std::pow(dt, h2);
  auto gamma = [&](double j) {
    return scale * (std::pow(std::abs(j + 1.0), h2) - 2.0 * std::pow(std::abs(j), h2) + std::pow(std::abs(j - 1.0), h2));
  };
  embed = 2 * n;
  auto in = detail::fft_buffer(embed);
  auto out = detail::fft_buffer(embed);
  for (std::size_t j = 0; j <= n; ++j) in[j] = gamma(static_cast<double>(j));
  for (std::size_t j = 1; j < n; ++j) in[embed - j] = in[j];
  detail::fft_forward(embed, in.get(), out.get());
  double lmax = 0.0, lmin = 0.0;
  for (std::size_t j = 0; j < embed; ++j) {
    lmax = std::max(lmax, out[j].real());
    lmin = std::min(lmin, out[j].real());
  }
  provenance.min_eigen_ratio = lmax > 0.0 ? lmin / lmax : -1.0;
  if (lmax <= 0.0 || lmin < -1e-10 * lmax) return false;
  sqrt_lambda.resize(embed);
  const double inv_m = 1.0 / static_cast<double>(embed);
  for (std::size_t j = 0; j < embed; ++j) sqrt_lambda[j] = std::sqrt(std::max(out[j].real(), 0.0) * inv_m);
  provenance.method = SamplingMethod::Circulant;
  return true;
}

void PathSampler::Impl::build_cholesky() {
  const std::size_t n = steps;
  if (n > kMaxCholeskySteps) {
    throw CapacityError("Cholesky sampler supports at most " + std::to_string(kMaxCholeskySteps) + " steps");
  }
  Eigen::MatrixXd gram(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ti = horizon * static_cast<double>(i + 1) / static_cast<double>(n);
    for (std::size_t j = 0; j <= i; ++j) {
      const double tj = horizon * static_cast<double>(j + 1) / static_cast<double>(n);
      gram(i, j) = gram(j, i) = covariance_value(spec, tj, ti);
    }
  }
  const double maxdiag = gram.diagonal().maxCoeff();
  for (double delta : {0.0, 1e-14, 1e-12, 1e-10}) {
    Eigen::MatrixXd g = gram;
    g.diagonal().array() += delta * maxdiag;
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() == Eigen::Success) {
      chol = llt.matrixL();
      provenance.method = SamplingMethod::Cholesky;
      provenance.jitter = delta;
      return;
    }
  }
  throw FactorizationError("grid Gram matrix is not positive definite after maximum jitter 1e-10");
}

PathSampler::PathSampler(const ProcessSpec& spec, double horizon, std::size_t steps, SamplingMethod method) {
  spec.validate();
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ParameterDomainError("horizon must be positive");
  if (steps < 2) throw ParameterDomainError("need at least 2 time steps");
  auto impl = std::make_shared<Impl>();
  impl->spec = spec;
  impl->horizon = horizon;
  impl->steps = steps;
  if (method == SamplingMethod::Circulant && spec.kind != ProcessKind::FBM) {
    throw ParameterDomainError("circulant embedding needs stationary increments (FBM only)");
  }
  bool use_circulant = spec.kind == ProcessKind::FBM && method != SamplingMethod::Cholesky;
  if (use_circulant && !impl->build_circulant()) {
    impl->provenance.fell_back = true;
    use_circulant = false;
  }
  if (!use_circulant) impl->build_cholesky();
  impl_ = std::move(impl);
}

PathSample PathSampler::sample(std::uint64_t seed, std::uint64_t replicate) const {
  const Impl& im = *impl_;
  const std::size_t n = im.steps;
  PathSample path;
  path.spec = im.spec;
  path.horizon = im.horizon;
  path.steps = n;
  path.seed = seed;
  path.replicate = replicate;
  path.provenance = im.provenance;
  path.values.setZero(im.spec.dim, static_cast<Eigen::Index>(n + 1));
  std::normal_distribution<double> normal;

  if (im.provenance.method == SamplingMethod::Circulant) {
    const std::size_t m = im.embed;
    auto in = detail::fft_buffer(m);
    auto out = detail::fft_buffer(m);
    for (int l = 0; l < im.spec.dim; ++l) {
      Engine eng = make_engine(stream_id(seed, static_cast<std::uint64_t>(l), replicate));
      for (std::size_t j = 0; j < m; ++j) {
        const double a = normal(eng);
        const double b = normal(eng);
        in[j] = std::complex<double>(im.sqrt_lambda[j] * a, im.sqrt_lambda[j] * b);
      }
      detail::fft_forward(m, in.get(), out.get());
      double* row = path.values.data() + static_cast<std::ptrdiff_t>(l) * path.values.cols();
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += out[i].real();
        row[i + 1] = acc;
      }
    }
  } else {
    Eigen::VectorXd z(static_cast<Eigen::Index>(n));
    for (int l = 0; l < im.spec.dim; ++l) {
      Engine eng = make_engine(stream_id(seed, static_cast<std::uint64_t>(l), replicate));
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(eng);
      Eigen::VectorXd x = im.chol.triangularView<Eigen::Lower>() * z;
      path.values.row(l).tail(static_cast<Eigen::Index>(n)) = x.transpose();
    }
  }
  return path;
}

const SamplerProvenance& PathSampler::provenance() const noexcept { return impl_->provenance; }
const ProcessSpec& PathSampler::spec() const noexcept { return impl_->spec; }
double PathSampler::horizon() const noexcept { return impl_->horizon; }
std::size_t PathSampler::steps() const noexcept { return impl_->steps; }

PathSample sample_path(const ProcessSpec& spec, double horizon, std::size_t steps, std::uint64_t seed,
                       std::uint64_t replicate) {
  return PathSampler(spec, horizon, steps).sample(seed, replicate);
}

PathSample zero_path(const ProcessSpec& spec, double horizon, std::size_t steps) {
  spec.validate();
  if (!(horizon > 0.0) || steps < 2) throw ParameterDomainError("zero_path needs horizon > 0 and >= 2 steps");
  PathSample path;
  path.spec = spec;
  path.horizon = horizon;
  path.steps = steps;
  path.values.setZero(spec.dim, static_cast<Eigen::Index>(steps + 1));
  return path;
}

}  // namespace loclim
