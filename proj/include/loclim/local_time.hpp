#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "loclim/heat_kernel.hpp"
#include "loclim/process.hpp"

namespace loclim {

enum class IntegrationRule {
  RiemannLeft,
  Trapezoid,
  // Integrates E[p_eps^(k)(X_t + x) | X at the two cell endpoints] with
  // Gauss-Legendre nodes inside every cell. The conditional law is Gaussian,
  // so the integrand becomes p_{eps + v(t)}^(k)(m(t) + x); this stays accurate
  // when eps is far below the grid's own resolution.
  Conditional,
};

std::string to_string(IntegrationRule rule);
IntegrationRule parse_integration_rule(const std::string& text);

struct EstimatorConfig {
  double epsilon = 0.01;
  std::vector<double> level;  // x; empty means the origin
  MultiIndex k;               // empty means k = 0
  double horizon = 1.0;       // T
  std::size_t steps = 0;      // n_t used when sampling; 0 picks recommended_steps
  IntegrationRule rule = IntegrationRule::Trapezoid;
  int bridge_nodes = 4;       // Gauss-Legendre nodes per cell (Conditional)
  KernelOptions kernel;

  // Level point and multi-index padded to dimension d.
  std::vector<double> level_for(int dim) const;
  MultiIndex order_for(int dim) const;
};

struct EstimateValue {
  double value = 0.0;
  EstimatorConfig config;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  std::size_t steps_used = 0;
  double time_step = 0.0;
  bool existence_gate = true;  // H(2|k| + d) < 1
};

bool existence_gate(double hurst, const MultiIndex& k, int dim);

// Power of two >= 32 T eps^{-1/(2H)}, clamped to [16, 2^20].
std::size_t recommended_steps(double hurst, double eps, double horizon);
inline constexpr std::size_t kMaxRecommendedSteps = std::size_t{1} << 20;

// Precomputed cell data for one (spec, grid, rule). Shareable across threads.
class LocalTimeEvaluator {
 public:
  LocalTimeEvaluator(const ProcessSpec& spec, double path_horizon, std::size_t steps, IntegrationRule rule,
                     int bridge_nodes = 4);

  // L_eps^(k)(T_j, x) for every T_j in `horizons`; each T_j must sit on the grid.
  std::vector<double> evaluate(const PathSample& path, double eps, std::span<const double> level, const MultiIndex& k,
                               std::span<const double> horizons, const KernelOptions& kernel = {}) const;

  IntegrationRule rule() const noexcept { return rule_; }

 private:
  struct BridgePlan;
  ProcessSpec spec_;
  double horizon_;
  std::size_t steps_;
  IntegrationRule rule_;
  std::shared_ptr<const BridgePlan> bridge_;
};

EstimateValue estimate(const PathSample& path, const EstimatorConfig& cfg);

// int_0^T p^(k)_{eps + R(t,t)}(x) dt by tanh-sinh quadrature.
double expected_estimate(const ProcessSpec& spec, const EstimatorConfig& cfg);

// Same path and rule at eps_ref.
EstimateValue reference_local_time(const PathSample& path, const EstimatorConfig& cfg, double eps_ref);

}  // namespace loclim
