#include "loclim/local_time.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>


#include "loclim/errors.hpp"
#include "loclim/quadrature.hpp"
#include "loclim/stats.hpp"

namespace loclim {

std::string to_string(IntegrationRule rule) {
  switch (rule) {
    case IntegrationRule::RiemannLeft: return "riemann";
    case IntegrationRule::Trapezoid: return "trapezoid";
    case IntegrationRule::Conditional: return "conditional";
  }
  return "?";
}

IntegrationRule parse_integration_rule(const std::string& text) {
  if (text == "riemann" || text == "riemann-left") return IntegrationRule::RiemannLeft;
  if (text == "trapezoid") return IntegrationRule::Trapezoid;
  if (text == "conditional" || text == "bridge") return IntegrationRule::Conditional;
  throw ConfigError("unknown integration rule '" + text + "' (expected riemann, trapezoid, conditional)");
}

std::vector<double> EstimatorConfig::level_for(int dim) const {
  if (level.empty()) return std::vector<double>(static_cast<std::size_t>(dim), 0.0);
  if (static_cast<int>(level.size()) != dim) throw ShapeError("level point dimension does not match the process");
  return level;
}

MultiIndex EstimatorConfig::order_for(int dim) const {
  if (k.dim() == 0) return MultiIndex::zero(dim);
  if (k.dim() != dim) throw ShapeError("multi-index dimension does not match the process");
  return k;
}

bool existence_gate(double hurst, const MultiIndex& k, int dim) {
  return hurst * (2.0 * k.order() + dim) < 1.0;
}

std::size_t recommended_steps(double hurst, double eps, double horizon) {
  if (!(eps > 0.0) || !(hurst > 0.0) || !(horizon > 0.0)) throw ParameterDomainError("recommended_steps needs positive inputs");
  const double want = 32.0 * horizon * std::pow(eps, -1.0 / (2.0 * hurst));
  std::size_t n = 16;
  while (n < kMaxRecommendedSteps && static_cast<double>(n) < want) n <<= 1;
  return n;
}

namespace {

// One-dimensional p_s2^(k)(y) with s2 = eps + v; integer k uses Hermite.
struct Kernel1d {
  bool integer = true;
  int n = 0;
  double k = 0.0;
  double s2 = 1.0;
  double inv_s = 1.0;
  double pref = 1.0;  // (-1)^n s^{-n} / (s sqrt(2 pi))
  KernelOptions opt;

  Kernel1d(double order, double variance, const KernelOptions& o) : k(order), s2(variance), opt(o) {
    integer = std::floor(order) == order && o.method == KernelMethod::Auto;
    n = static_cast<int>(order);
    const double s = std::sqrt(variance);
    inv_s = 1.0 / s;
    pref = ((n % 2 == 0) ? 1.0 : -1.0) * std::pow(inv_s, n) * inv_s / std::sqrt(2.0 * std::numbers::pi);
  }

  double operator()(double y) const {
    if (!integer) return heat_kernel_deriv_1d(y, s2, k, opt);
    const double z = y * inv_s;
    double he = 1.0;
    if (n >= 1) {
      double h0 = 1.0, h1 = z;
      for (int j = 1; j < n; ++j) {
        const double h2 = z * h1 - j * h0;
        h0 = h1;
        h1 = h2;
      }
      he = h1;
    }
    return pref * he * std::exp(-0.5 * z * z);
  }
};

}  // namespace

struct LocalTimeEvaluator::BridgePlan {
  int nodes = 0;
  std::vector<double> weights;  // Gauss-Legendre weights on (0, 1)
  bool stationary = false;
  // stationary: mean = X_a + coef_b[q] (X_b - X_a), variance var[q]
  // general:    mean = coef_a[i q] X_a + coef_b[i q] X_b, variance var[i q]
  std::vector<double> coef_a, coef_b, var;
};

LocalTimeEvaluator::LocalTimeEvaluator(const ProcessSpec& spec, double path_horizon, std::size_t steps,
                                       IntegrationRule rule, int bridge_nodes)
    : spec_(spec), horizon_(path_horizon), steps_(steps), rule_(rule) {
  spec_.validate();
  if (steps_ < 1 || !(horizon_ > 0.0)) throw ParameterDomainError("evaluator needs a non-empty grid");
  if (rule_ != IntegrationRule::Conditional) return;
  if (bridge_nodes < 1 || bridge_nodes > 16) throw ConfigError("bridge_nodes must lie in 1..16");
  auto plan = std::make_shared<BridgePlan>();
  plan->nodes = bridge_nodes;
  const GaussRule gl = gauss_legendre(bridge_nodes, 0.0, 1.0);
  plan->weights = gl.weights;
  const double dt = horizon_ / static_cast<double>(steps_);
  const auto q = static_cast<std::size_t>(bridge_nodes);
  if (spec_.kind == ProcessKind::FBM) {
    // stationary increments: condition on the increment over the cell
    plan->stationary = true;
    const double h2 = 2.0 * spec_.hurst, sig = spec_.sigma;
    const double vz = sig * std::pow(dt, h2);
    for (std::size_t j = 0; j < q; ++j) {
      const double s = gl.nodes[j] * dt;
      const double vy = sig * std::pow(s, h2);
      const double cyz = 0.5 * sig * (std::pow(s, h2) + std::pow(dt, h2) - std::pow(dt - s, h2));
      plan->coef_b.push_back(cyz / vz);
      plan->var.push_back(std::max(0.0, vy - cyz * cyz / vz));
    }
  } else {
    plan->coef_a.resize(steps_ * q);
    plan->coef_b.resize(steps_ * q);
    plan->var.resize(steps_ * q);
    for (std::size_t i = 0; i < steps_; ++i) {
      const double a = dt * static_cast<double>(i), b = dt * static_cast<double>(i + 1);
      const double raa = covariance_value(spec_, a, a), rab = covariance_value(spec_, a, b);
      const double rbb = covariance_value(spec_, b, b);
      const double det = raa * rbb - rab * rab;
      for (std::size_t j = 0; j < q; ++j) {
        const double t = a + gl.nodes[j] * dt;
        const double rtt = covariance_value(spec_, t, t), rta = covariance_value(spec_, t, a);
        const double rtb = covariance_value(spec_, t, b);
        double ca = 0.0, cb = 0.0, v = 0.0;
        if (i == 0 || det <= 1e-14 * raa * rbb) {
          cb = rtb / rbb;
          v = rtt - rtb * cb;
        } else {
          ca = (rbb * rta - rab * rtb) / det;
          cb = (raa * rtb - rab * rta) / det;
          v = rtt - (ca * rta + cb * rtb);
        }
        plan->coef_a[i * q + j] = ca;
        plan->coef_b[i * q + j] = cb;
        plan->var[i * q + j] = std::max(0.0, v);
      }
    }
  }
  bridge_ = std::move(plan);
}

std::vector<double> LocalTimeEvaluator::evaluate(const PathSample& path, double eps, std::span<const double> level,
                                                 const MultiIndex& k, std::span<const double> horizons,
                                                 const KernelOptions& kernel) const {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ParameterDomainError("estimator needs eps > 0");
  const int d = path.dim();
  if (static_cast<int>(level.size()) != d || k.dim() != d) throw ShapeError("path, level and multi-index dimensions differ");
  if (path.steps != steps_ || std::abs(path.horizon - horizon_) > 1e-12 * horizon_) {
    throw ShapeError("path grid differs from the evaluator grid");
  }
  const double dt = path.step();
  std::vector<std::size_t> ends;
  ends.reserve(horizons.size());
  for (double h : horizons) {
    const double m = h / dt;
    const double mr = std::round(m);
    if (!(h >= 0.0) || std::abs(m - mr) > 1e-8 * std::max(1.0, m) || mr > static_cast<double>(steps_)) {
      throw ShapeError("horizon must be a grid time not beyond the path horizon");
    }
    ends.push_back(static_cast<std::size_t>(mr));
  }
  const std::size_t last = ends.empty() ? 0 : *std::max_element(ends.begin(), ends.end());
  std::vector<double> out(horizons.size(), 0.0);
  if (last == 0) return out;

  // cumulative sums recorded at every requested end index
  std::vector<double> at(last + 1, 0.0);
  std::vector<char> wanted(last + 1, 0);
  for (auto e : ends) wanted[e] = 1;
  KahanSum acc;

  if (rule_ == IntegrationRule::Conditional) {
    const BridgePlan& bp = *bridge_;
    const auto q = static_cast<std::size_t>(bp.nodes);
    // kernels per node (stationary) or rebuilt per cell (general)
    std::vector<std::vector<Kernel1d>> kern;  // [component][node]
    auto build = [&](std::size_t cell) {
      kern.assign(static_cast<std::size_t>(d), {});
      for (int l = 0; l < d; ++l) {
        for (std::size_t j = 0; j < q; ++j) {
          const double v = bp.stationary ? bp.var[j] : bp.var[cell * q + j];
          kern[static_cast<std::size_t>(l)].emplace_back(k[l], eps + v, kernel);
        }
      }
    };
    if (bp.stationary) build(0);
    for (std::size_t i = 0; i < last; ++i) {
      if (!bp.stationary) build(i);
      double cell = 0.0;
      for (std::size_t j = 0; j < q; ++j) {
        double g = 1.0;
        for (int l = 0; l < d; ++l) {
          const auto row = path.component(l);
          const double xa = row[i], xb = row[i + 1];
          const double m = bp.stationary ? xa + bp.coef_b[j] * (xb - xa)
                                         : bp.coef_a[i * q + j] * xa + bp.coef_b[i * q + j] * xb;
          g *= kern[static_cast<std::size_t>(l)][j](m + level[static_cast<std::size_t>(l)]);
        }
        cell += bp.weights[j] * g;
      }
      acc.add(cell * dt);
      if (wanted[i + 1]) at[i + 1] = acc.value();
    }
  } else {
    std::vector<Kernel1d> kern;
    for (int l = 0; l < d; ++l) kern.emplace_back(k[l], eps, kernel);
    auto g = [&](std::size_t i) {
      double v = 1.0;
      for (int l = 0; l < d; ++l) v *= kern[static_cast<std::size_t>(l)](path.component(l)[i] + level[static_cast<std::size_t>(l)]);
      return v;
    };
    const bool trap = rule_ == IntegrationRule::Trapezoid;
    const double g0 = g(0);
    for (std::size_t i = 0; i < last; ++i) {
      // Riemann: sum_{j<m} g_j; trapezoid: sum_{j<=m} g_j - (g_0 + g_m)/2
      acc.add(g(i) * dt);
      if (wanted[i + 1]) {
        if (trap) {
          const double gm = g(i + 1);
          KahanSum t = acc;
          t.add(gm * dt);
          t.add(-0.5 * (g0 + gm) * dt);
          at[i + 1] = t.value();
        } else {
          at[i + 1] = acc.value();
        }
      }
    }
  }
  for (std::size_t j = 0; j < ends.size(); ++j) out[j] = at[ends[j]];
  return out;
}

EstimateValue estimate(const PathSample& path, const EstimatorConfig& cfg) {
  const int d = path.dim();
  const auto level = cfg.level_for(d);
  const auto k = cfg.order_for(d);
  if (!(cfg.horizon > 0.0) || cfg.horizon > path.horizon * (1.0 + 1e-12)) {
    throw ShapeError("estimator horizon exceeds the path horizon");
  }
  LocalTimeEvaluator ev(path.spec, path.horizon, path.steps, cfg.rule, cfg.bridge_nodes);
  const double horizon[] = {std::min(cfg.horizon, path.horizon)};
  EstimateValue out;
  out.value = ev.evaluate(path, cfg.epsilon, level, k, horizon, cfg.kernel)[0];
  out.config = cfg;
  out.seed = path.seed;
  out.replicate = path.replicate;
  out.steps_used = static_cast<std::size_t>(std::llround(horizon[0] / path.step()));
  out.time_step = path.step();
  out.existence_gate = existence_gate(path.spec.hurst, k, d);
  return out;
}

EstimateValue reference_local_time(const PathSample& path, const EstimatorConfig& cfg, double eps_ref) {
  EstimatorConfig c = cfg;
  c.epsilon = eps_ref;
  return estimate(path, c);
}

double expected_estimate(const ProcessSpec& spec, const EstimatorConfig& cfg) {
  spec.validate();
  if (!(cfg.epsilon > 0.0)) throw ParameterDomainError("expected_estimate needs eps > 0");
  if (!(cfg.horizon > 0.0)) throw ParameterDomainError("expected_estimate needs T > 0");
  const int d = spec.dim;
  const auto level = cfg.level_for(d);
  const auto k = cfg.order_for(d);
  auto f = [&](double t) {
    const double v = cfg.epsilon + covariance_value(spec, t, t);
    double g = 1.0;
    for (int l = 0; l < d; ++l) g *= heat_kernel_deriv_1d(level[static_cast<std::size_t>(l)], v, k[l], cfg.kernel);
    return g;
  };
  const auto q = tanh_sinh(f, 0.0, cfg.horizon, 1e-13);
  const double value = q.value, err = q.error, l1 = q.l1;
  if (!std::isfinite(value) || err > 1e-9 * std::max(l1, 1e-300)) {
    throw AccuracyError("expected_estimate quadrature did not converge", err / std::max(l1, 1e-300));
  }
  return value;
}

}  // namespace loclim
