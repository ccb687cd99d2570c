#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "loclim/process.hpp"

namespace loclim {

enum class Condition { LND, StrongLND_A, VarianceEnvelope_B, Decorrelation_C };

std::string to_string(Condition c);
Condition parse_condition(const std::string& text);

struct ConditionGrid {
  // LND and (A): random probe sets inside (0, 1].
  int max_points = 8;
  int probes_per_size = 24;
  double min_ratio = 1e-6;  // pass needs the worst constant above this

  // (B): probe times and h/t ratios.
  std::vector<double> times{0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0};
  std::vector<double> h_over_t{1e-5, 1e-4, 1e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0, 3.0, 10.0};
  double b_tolerance = 1e-2;  // phi at the smallest h/t, relative to sigma

  // (C): probes span eta in [2, eta_max]; psi(eta_max) must fall below
  // c_decay * psi(2) (or vanish).
  double eta_max = 1e6;
  double c_decay = 0.5;

  std::uint64_t seed = 7;

  std::string describe(Condition c) const;
};

struct ConditionProbe {
  std::string label;
  double ratio = 0.0;
};

struct EnvelopePoint {
  double abscissa = 0.0;  // h/t for (B), eta for (C)
  double value = 0.0;     // phi or psi
};

struct ConditionReport {
  Condition condition = Condition::LND;
  std::string grid;
  double worst_ratio = 0.0;
  bool pass = false;
  std::size_t skipped = 0;       // probes dropped for singular Gram matrices
  double sigma_estimate = 0.0;   // (B) only
  std::vector<ConditionProbe> details;
  std::vector<EnvelopePoint> envelope;
};

ConditionReport check_condition(const ProcessSpec& spec, Condition condition, const ConditionGrid& grid = {});

// Smallest kappa with Var(sum x_j dX_j) >= kappa sum x_j^2 dt_j^{2H} on the
// increments of 0 < t_1 < ... < t_n.
double lnd_constant(const ProcessSpec& spec, std::span<const double> times);

// Var(X_t | X_{s_1..s_m}) by Schur complement. Throws FactorizationError on a
// numerically singular conditioning Gram matrix.
double conditional_variance(const ProcessSpec& spec, double t, std::span<const double> s);

// conditional_variance / min_j |t - s_j|^{2H}.
double strong_lnd_ratio(const ProcessSpec& spec, double t, std::span<const double> s);

// Var(X_{t+h} - X_t) / h^{2H}.
double increment_variance_ratio(const ProcessSpec& spec, double t, double h);

// |E (X_t4 - X_t3)(X_t2 - X_t1)| / ((t4 - t3)^H (t2 - t1)^H).
double decorrelation_ratio(const ProcessSpec& spec, double t1, double t2, double t3, double t4);

}  // namespace loclim
