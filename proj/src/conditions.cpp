#include "loclim/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "loclim/errors.hpp"
#include "loclim/rng.hpp"

namespace loclim {

std::string to_string(Condition c) {
  switch (c) {
    case Condition::LND: return "LND";
    case Condition::StrongLND_A: return "A";
    case Condition::VarianceEnvelope_B: return "B";
    case Condition::Decorrelation_C: return "C";
  }
  return "?";
}

Condition parse_condition(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (t == "LND") return Condition::LND;
  if (t == "A") return Condition::StrongLND_A;
  if (t == "B") return Condition::VarianceEnvelope_B;
  if (t == "C") return Condition::Decorrelation_C;
  throw ConfigError("unknown condition '" + text + "' (expected LND, A, B, C)");
}

std::string ConditionGrid::describe(Condition c) const {
  std::ostringstream os;
  switch (c) {
    case Condition::LND:
    case Condition::StrongLND_A:
      os << "random sets in (0,1], sizes 1.." << max_points << ", " << probes_per_size << " per size, seed " << seed;
      break;
    case Condition::VarianceEnvelope_B:
      os << times.size() << " times x " << h_over_t.size() << " ratios h/t in [" << h_over_t.front() << ", "
         << h_over_t.back() << "]";
      break;
    case Condition::Decorrelation_C:
      os << "nested/separated increment pairs, eta in [2, " << eta_max << "]";
      break;
  }
  return os.str();
}

namespace {

// Cov(X_b1 - X_a1, X_b2 - X_a2).
double increment_covariance(const ProcessSpec& spec, double a1, double b1, double a2, double b2) {
  if (spec.kind == ProcessKind::FBM) {
    const double h2 = 2.0 * spec.hurst;
    auto p = [&](double u) { return std::pow(std::abs(u), h2); };
    return 0.5 * spec.sigma * (p(b1 - a2) + p(a1 - b2) - p(b1 - b2) - p(a1 - a2));
  }
  return covariance_value(spec, b1, b2) - covariance_value(spec, b1, a2) - covariance_value(spec, a1, b2) +
         covariance_value(spec, a1, a2);
}

std::vector<double> random_times(Engine& eng, int n, bool clustered) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> t(static_cast<std::size_t>(n));
  if (clustered) {
    // log-uniform gaps give sets mixing tiny and large spacings
    double acc = 0.0;
    for (auto& v : t) {
      acc += std::pow(10.0, -4.0 * u(eng));
      v = acc;
    }
    const double scale = 1.0 / (acc * (1.0 + 0.5 * u(eng)));
    for (auto& v : t) v *= scale;
  } else {
    for (auto& v : t) v = u(eng);
    std::sort(t.begin(), t.end());
  }
  return t;
}

std::string join(std::span<const double> xs) {
  std::ostringstream os;
  os.precision(4);
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
  return os.str();
}

ConditionReport check_lnd(const ProcessSpec& spec, const ConditionGrid& grid) {
  ConditionReport rep;
  rep.worst_ratio = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= grid.max_points; ++n) {
    Engine eng = make_engine(stream_id(grid.seed, stream_tag::kProbe, static_cast<std::uint64_t>(n)));
    for (int p = 0; p < grid.probes_per_size; ++p) {
      auto t = random_times(eng, n, p % 2 == 1);
      if (std::adjacent_find(t.begin(), t.end(), std::greater_equal<>()) != t.end() || t.front() <= 0.0) {
        ++rep.skipped;
        continue;
      }
      const double kappa = lnd_constant(spec, t);
      rep.details.push_back({"t=" + join(t), kappa});
      rep.worst_ratio = std::min(rep.worst_ratio, kappa);
    }
  }
  rep.pass = rep.worst_ratio > grid.min_ratio;
  return rep;
}

ConditionReport check_strong_lnd(const ProcessSpec& spec, const ConditionGrid& grid) {
  ConditionReport rep;
  rep.worst_ratio = std::numeric_limits<double>::infinity();
  auto probe = [&](double t, const std::vector<double>& s) {
    try {
      const double kappa = strong_lnd_ratio(spec, t, s);
      rep.details.push_back({"t=" + join(std::span<const double>(&t, 1)) + " s=" + join(s), kappa});
      rep.worst_ratio = std::min(rep.worst_ratio, kappa);
    } catch (const FactorizationError&) {
      ++rep.skipped;
    }
  };
  probe(1.0, {0.5});
  for (int m = 1; m <= grid.max_points; ++m) {
    Engine eng = make_engine(stream_id(grid.seed, stream_tag::kProbe, 100 + static_cast<std::uint64_t>(m)));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int p = 0; p < grid.probes_per_size; ++p) {
      auto all = random_times(eng, m + 1, p % 2 == 1);
      const double t = all.back();
      std::vector<double> s(all.begin(), all.end() - 1);
      // some probes put t just after the last conditioning time
      if (p % 3 == 2) s.back() = t * (1.0 - std::pow(10.0, -1.0 - 3.0 * u(eng)));
      if (std::adjacent_find(s.begin(), s.end(), std::greater_equal<>()) != s.end() || s.front() <= 0.0 ||
          s.back() >= t) {
        ++rep.skipped;
        continue;
      }
      probe(t, s);
    }
  }
  rep.pass = rep.worst_ratio > grid.min_ratio;
  return rep;
}

ConditionReport check_variance_envelope(const ProcessSpec& spec, const ConditionGrid& grid) {
  ConditionReport rep;
  rep.sigma_estimate = increment_sigma(spec);
  std::vector<double> ratios = grid.h_over_t;
  std::sort(ratios.begin(), ratios.end());
  std::vector<double> worst(ratios.size(), 0.0);
  for (std::size_t j = 0; j < ratios.size(); ++j) {
    for (double t : grid.times) {
      const double h = ratios[j] * t;
      const double r = increment_variance_ratio(spec, t, h);
      const double dev = std::abs(r - rep.sigma_estimate);
      std::ostringstream label;
      label << "t=" << t << " h/t=" << ratios[j];
      rep.details.push_back({label.str(), r});
      worst[j] = std::max(worst[j], dev);
    }
  }
  // phi(r) = sup of deviations over probes with h/t <= r
  double running = 0.0;
  for (std::size_t j = 0; j < ratios.size(); ++j) {
    running = std::max(running, worst[j]);
    rep.envelope.push_back({ratios[j], running});
  }
  const double sigma = rep.sigma_estimate;
  rep.worst_ratio = rep.envelope.front().value / sigma;
  const bool small_scale = rep.worst_ratio <= grid.b_tolerance;
  const bool lower_bound = sigma - rep.envelope.back().value >= -1e-9 * sigma;
  rep.pass = small_scale && lower_bound;
  return rep;
}

ConditionReport check_decorrelation(const ProcessSpec& spec, const ConditionGrid& grid) {
  ConditionReport rep;
  struct Probe {
    double eta;
    double ratio;
  };
  std::vector<Probe> probes;
  const std::vector<double> starts{0.0, 0.1, 0.5, 1.0};
  const std::vector<double> scales{0.01, 0.1, 1.0};
  std::vector<double> etas;
  for (double e = 2.0; e <= grid.eta_max * 1.000001; e *= std::sqrt(10.0)) etas.push_back(e);
  if (etas.empty() || etas.back() < grid.eta_max) etas.push_back(grid.eta_max);
  auto add = [&](double t1, double d2, double d3, double d4) {
    const double t2 = t1 + d2, t3 = t2 + d3, t4 = t3 + d4;
    const double eta = std::max({d4 / d2, d2 / d4, d3 / std::max(d2, d4)});
    probes.push_back({eta, decorrelation_ratio(spec, t1, t2, t3, t4)});
  };
  for (double t1 : starts) {
    for (double b : scales) {
      for (double e : etas) {
        const double small = b / e;
        for (double gap : {0.0, small, b}) {
          add(t1, small, gap, b);  // (i) short early increment
          add(t1, b, gap, small);  // (ii) short late increment
        }
        add(t1, small, b, small);  // (iii) both short, far apart
        add(t1, small, b, 0.5 * small);
      }
    }
  }
  for (double e : etas) {
    double psi = 0.0;
    for (const auto& p : probes) {
      if (p.eta >= e * (1.0 - 1e-9)) psi = std::max(psi, p.ratio);
    }
    rep.envelope.push_back({e, psi});
  }
  for (const auto& p : probes) {
    std::ostringstream label;
    label << "eta=" << p.eta;
    rep.details.push_back({label.str(), p.ratio});
  }
  const double psi_first = rep.envelope.front().value;
  const double psi_last = rep.envelope.back().value;
  rep.worst_ratio = psi_last;
  rep.pass = psi_last <= 1e-12 || psi_last <= grid.c_decay * psi_first;
  return rep;
}

}  // namespace

double lnd_constant(const ProcessSpec& spec, std::span<const double> times) {
  const auto n = static_cast<Eigen::Index>(times.size());
  if (n == 0) throw ParameterDomainError("lnd_constant needs at least one time");
  Eigen::MatrixXd c(n, n);
  Eigen::VectorXd dscale(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ai = i == 0 ? 0.0 : times[static_cast<std::size_t>(i - 1)];
    const double bi = times[static_cast<std::size_t>(i)];
    if (!(bi > ai)) throw ParameterDomainError("lnd_constant needs strictly increasing positive times");
    dscale[i] = std::pow(bi - ai, -spec.hurst);
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double aj = j == 0 ? 0.0 : times[static_cast<std::size_t>(j - 1)];
      const double bj = times[static_cast<std::size_t>(j)];
      c(i, j) = c(j, i) = increment_covariance(spec, ai, bi, aj, bj);
    }
  }
  Eigen::MatrixXd m = dscale.asDiagonal() * c * dscale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double conditional_variance(const ProcessSpec& spec, double t, std::span<const double> s) {
  const auto m = static_cast<Eigen::Index>(s.size());
  if (m == 0) return covariance_value(spec, t, t);
  Eigen::MatrixXd g(m, m);
  Eigen::VectorXd r(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double si = s[static_cast<std::size_t>(i)];
    r[i] = covariance_value(spec, si, t);
    for (Eigen::Index j = 0; j <= i; ++j) g(i, j) = g(j, i) = covariance_value(spec, s[static_cast<std::size_t>(j)], si);
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(g);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.rcond() < 1e-13) {
    throw FactorizationError("conditioning Gram matrix is numerically singular");
  }
  const double v = covariance_value(spec, t, t) - r.dot(ldlt.solve(r));
  return v;
}

double strong_lnd_ratio(const ProcessSpec& spec, double t, std::span<const double> s) {
  double gap = std::numeric_limits<double>::infinity();
  for (double sj : s) gap = std::min(gap, std::abs(t - sj));
  return conditional_variance(spec, t, s) / std::pow(gap, 2.0 * spec.hurst);
}

double increment_variance_ratio(const ProcessSpec& spec, double t, double h) {
  return increment_covariance(spec, t, t + h, t, t + h) / std::pow(h, 2.0 * spec.hurst);
}

double decorrelation_ratio(const ProcessSpec& spec, double t1, double t2, double t3, double t4) {
  const double c = increment_covariance(spec, t3, t4, t1, t2);
  return std::abs(c) / (std::pow(t4 - t3, spec.hurst) * std::pow(t2 - t1, spec.hurst));
}

ConditionReport check_condition(const ProcessSpec& spec, Condition condition, const ConditionGrid& grid) {
  spec.validate();
  if (grid.max_points < 1 || grid.max_points > 8) throw ConfigError("conditioning sets are limited to 1..8 points");
  ConditionReport rep;
  switch (condition) {
    case Condition::LND: rep = check_lnd(spec, grid); break;
    case Condition::StrongLND_A: rep = check_strong_lnd(spec, grid); break;
    case Condition::VarianceEnvelope_B: rep = check_variance_envelope(spec, grid); break;
    case Condition::Decorrelation_C: rep = check_decorrelation(spec, grid); break;
  }
  rep.condition = condition;
  rep.grid = grid.describe(condition);
  return rep;
}

}  // namespace loclim
