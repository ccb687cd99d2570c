#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "loclim/heat_kernel.hpp"
#include "loclim/local_time.hpp"
#include "loclim/process.hpp"

namespace loclim {

// E prod_i [W(L(b_i, x)) - W(L(a_i, x))]^{m_i}, W a Brownian motion
// independent of X.
struct MomentQuery {
  std::vector<std::pair<double, double>> intervals;  // (a_i, b_i], disjoint
  std::vector<int> m;                                // m_i >= 1
  std::vector<double> level;                         // x; empty means the origin
  ProcessSpec spec;

  // Throws ShapeError / ParameterDomainError on malformed queries.
  void validate() const;
  int total_order() const;
};

enum class MomentMethod { FORMULA_MC, SIMULATION_MC };

std::string to_string(MomentMethod m);

struct MomentResult {
  double value = 0.0;
  double standard_error = 0.0;
  MomentMethod method = MomentMethod::FORMULA_MC;
  std::size_t samples = 0;
};

struct FormulaBudget {
  std::size_t samples = 1 << 18;
  std::size_t chunk = 4096;  // draws per sub-stream
  std::uint64_t seed = 1;
  unsigned workers = 0;
  int dimension_cap = 6;     // limit on |m| d / 2
  double ridge = 1e-10;      // relative to the largest Gram diagonal
};

// Evaluates the (u, y) integral representation of the moment. The time
// points u are drawn from a Dirichlet proposal on the gaps inside each
// interval (exponent 1 - Hd, which matches the u^{-Hd} singularity of the
// Gaussian density at coinciding times); the frequency variables y are drawn
// from N(0, (G + ridge)^{-1}) per spatial component, G the Gram matrix of the
// chosen times. Intervals are sorted first, so relabeling does not change the
// result. Odd orders return exactly 0.
MomentResult moment_formula(const MomentQuery& q, const FormulaBudget& budget = {});

struct SimulationBudget {
  std::size_t replicates = 10000;
  std::size_t steps = 1024;      // grid on [0, max b_i]; every a_i, b_i must sit on it
  double eps_proxy = 1e-6;
  IntegrationRule rule = IntegrationRule::Conditional;
  std::uint64_t seed = 1;
  unsigned workers = 0;
};

// Simulates X, forms local-time increments with the smoothed proxy, draws
// independent W increments and averages the product.
MomentResult moment_simulated(const MomentQuery& q, const SimulationBudget& budget = {});

// Empirical checks of the two Fourier-side bounds used for test functions
// with vanishing low moments.
struct InequalityResult {
  std::string name;
  double max_ratio = 0.0;          // trials, seed A
  double max_ratio_alt_seed = 0.0; // trials, seed B
  double max_ratio_doubled = 0.0;  // 2 * trials, seed A
  std::size_t zero_cases = 0;      // draws with LHS = RHS = 0
  bool finite = false;
  bool stable = false;             // all three maxima within 10%
};

struct InequalityReport {
  std::vector<InequalityResult> results;
  bool pass = false;
};

struct InequalityOptions {
  std::size_t trials = 10000;
  int max_n = 2;                     // products over j = 1..n
  std::vector<MultiIndex> k_values;  // integer k; empty means {0, e_1, 2 e_1}
  double log10_min = -3.0;           // magnitudes 10^U(min, max)
  double log10_max = 3.0;
  double zero_probability = 0.05;    // chance that a y draw is exactly 0
  std::uint64_t seed = 11;
  double drift_tolerance = 0.10;
};

InequalityReport lemma_inequality_suite(const TestFunction& f, int order_n, const InequalityOptions& opt = {});

}  // namespace loclim
