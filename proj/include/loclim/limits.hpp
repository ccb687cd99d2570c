#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "loclim/heat_kernel.hpp"
#include "loclim/rational.hpp"

namespace loclim {

enum class Regime { LP_LIMIT, BOUNDARY_LOG, CLT, NONEXISTENT };

std::string to_string(Regime r);

struct ScalingFactor {
  Regime branch = Regime::NONEXISTENT;
  double exponent = 0.0;  // power of eps
  bool has_log = false;   // extra 1/sqrt(ln(1 + eps^{-1/2}))

  double operator()(double eps) const;
  std::string describe() const;  // e.g. "ε^-0.5"
};

struct RegimeReport {
  Regime regime = Regime::NONEXISTENT;
  Quantity hurst;
  double k_order = 0.0;
  int dim = 1;
  int order_n = 2;
  double lhs = 0.0;           // H(2|k| + d)
  double lp_threshold = 0.0;  // 1 - 2 N H
  bool exact_inputs = false;  // H and k were all rational
  bool boundary_exact = false;
  ScalingFactor scaling;
  std::string constant_name;

  std::string summary() const;  // "CLT, ℓ(ε)=ε^-0.5"
};

RegimeReport classify(const Quantity& hurst, const std::vector<Quantity>& k, int dim, int order_n);
RegimeReport classify(const Quantity& hurst, const MultiIndex& k, int dim, int order_n);

// Throws ParameterDomainError for the NONEXISTENT regime.
double scaling(const RegimeReport& report, double eps);

enum class ConstantName { D_Hd_boundary, D_Hd_clt, Dtilde1, Dtilde2, D_Hdf, C_Hdf, D_Hd_p1, C_Hd_p1, LP_COEFFICIENT };

std::string to_string(ConstantName name);
ConstantName parse_constant_name(const std::string& text);

struct QuadratureSettings {
  double tolerance = 1e-12;  // tanh-sinh target (relative)
  int tensor_nodes = 64;     // moments of f, per axis on [-radius, radius]
  int angular_nodes = 40;    // Gauss-Legendre nodes per quarter arc
  double radius = 10.0;

  QuadratureSettings coarser() const;  // every mesh parameter halved
};

struct ConstantParams {
  Quantity hurst;
  double sigma = 1.0;
  int dim = 1;
  MultiIndex k;   // empty means zero
  int order_n = 2;
  std::shared_ptr<const TestFunction> f;  // null means p_1
  QuadratureSettings quad;
};

struct LpTerm {
  std::vector<int> alpha;               // |alpha| = N
  double moment = 0.0;                  // int v^alpha f(v) dv
  std::complex<double> coefficient;     // i^N M_alpha / alpha!
  double derivative_coefficient = 0.0;  // (-1)^N M_alpha / alpha!
};

struct LimitConstant {
  ConstantName name = ConstantName::Dtilde1;
  double value = 0.0;
  double error = 0.0;  // quadrature error estimate (absolute)
  // LP_COEFFICIENT only: the limit is sum_alpha coefficient * L^(k + alpha).
  // `value` holds Re(i^N / N!) * M_{N e_1}.
  std::vector<LpTerm> lp_terms;
};

// Deterministic quadrature. Throws ParameterDomainError outside the
// constant's validity region and AccuracyError on unresolved quadrature.
// Results for built-in test functions are memoized.
LimitConstant constant(ConstantName name, const ConstantParams& params);

void clear_constant_cache();
std::size_t constant_cache_size();

// int_R |t|^p exp(-t^2/2) dt by quadrature.
double gaussian_abs_moment(double p);

// Closed form of int_0^inf r^{a-1} (1 - exp(-r^2/2))^2 dr for -4 < a < 0.
double radial_gap_integral_closed(double a);

}  // namespace loclim
