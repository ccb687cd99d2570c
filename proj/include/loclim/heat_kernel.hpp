#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace loclim {

// Derivative order k = (k_1..k_d), non-negative reals.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<double> k);
  MultiIndex(std::initializer_list<double> k) : MultiIndex(std::vector<double>(k)) {}
  static MultiIndex zero(int dim);
  // k + e_i
  MultiIndex plus_unit(int i) const;

  int dim() const noexcept { return static_cast<int>(k_.size()); }
  double operator[](int l) const { return k_[static_cast<std::size_t>(l)]; }
  const std::vector<double>& components() const noexcept { return k_; }
  double order() const noexcept { return order_; }
  bool all_integer() const noexcept { return all_integer_; }
  bool has_odd_integer_component() const noexcept;
  std::string to_string() const;

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.k_ == b.k_; }

 private:
  std::vector<double> k_;
  double order_ = 0.0;
  bool all_integer_ = true;
};

// Probabilists' Hermite polynomial He_n(x).
double hermite_he(int n, double x);

// (2 pi eps)^{-d/2} exp(-|x|^2 / (2 eps)).
double heat_kernel(std::span<const double> x, double eps);
double heat_kernel_1d(double x, double eps);

// (i x)^k: i^k x^k for integer k, |x|^k exp(i pi k sgn(x) / 2) otherwise.
std::complex<double> frac_power(double x, double k);

enum class KernelMethod {
  Auto,     // Hermite closed form for integer components, Fourier otherwise
  Fourier,  // Fourier quadrature for every component
};

struct KernelOptions {
  KernelMethod method = KernelMethod::Auto;
  double tolerance = 1e-13;  // tail truncation and quadrature target
};

// One-dimensional k-th derivative of p_eps at x.
double heat_kernel_deriv_1d(double x, double eps, double k, const KernelOptions& opt = {});

// Product over components of the one-dimensional derivatives.
double heat_kernel_deriv(std::span<const double> x, double eps, const MultiIndex& k, const KernelOptions& opt = {});

// (2 pi)^{-1} int (i u)^k exp(-eps u^2 / 2) exp(i x u) du by quadrature.
// Integer k: trapezoid on [-U, U] with U from exp(-eps U^2/2) U^{k+1} < tol
// and spacing min(0.01, 1/(4(1+|x|))). Non-integer k: the kink of |u|^k at
// u = 0 limits the trapezoid to O(h^{k+1}), so each half line is integrated
// with tanh-sinh quadrature instead. Real part returned after checking the
// imaginary residue is below 1e-9.
double heat_kernel_deriv_fourier_1d(double x, double eps, double k, double tol = 1e-13);

// Truncation radius U(eps, k, tol).
double fourier_truncation(double eps, double k, double tol);

class TestFunction {
 public:
  using Value = std::function<double(std::span<const double>)>;
  using Fourier = std::function<std::complex<double>(std::span<const double>)>;

  // `fourier` may be empty; the transform is then computed by quadrature on
  // [-radius, radius]^d.
  TestFunction(std::string name, int dim, Value value, Fourier fourier, int declared_order, bool radial = false);

  // p_1 in dimension d, declared order 2.
  static TestFunction heat_kernel(int dim);
  // u_1 exp(-|u|^2/2), d = 1, not centred (order 1).
  static TestFunction odd_gaussian();
  // p_1(u) (d + 2 - |u|^2) / 2: mass 1 and vanishing moments of order 1..3.
  static TestFunction flat_gaussian(int dim);

  const std::string& name() const noexcept { return name_; }
  int dim() const noexcept { return dim_; }
  int declared_order() const noexcept { return declared_order_; }
  bool radial() const noexcept { return radial_; }
  bool has_analytic_fourier() const noexcept { return static_cast<bool>(fourier_); }

  double operator()(std::span<const double> u) const { return value_(u); }
  // f^(x) = int f(u) exp(-i x.u) du.
  std::complex<double> fourier(std::span<const double> x) const;

  double radius = 10.0;
  int nodes_per_axis = 64;

 private:
  std::string name_;
  int dim_;
  Value value_;
  Fourier fourier_;
  int declared_order_;
  bool radial_;
};

// Mixed moment int u^alpha f(u) du on [-R, R]^d by tensor Gauss-Legendre.
double moment(const TestFunction& f, std::span<const int> alpha, int nodes_per_axis = 0);

struct MomentEntry {
  std::vector<int> alpha;
  double value = 0.0;
};

struct MembershipReport {
  bool member = false;
  int order = 0;
  double tolerance = 0.0;
  double max_abs_moment = 0.0;
  std::vector<MomentEntry> moments;
};

// True iff every mixed moment of order 1..N-1 vanishes within tol. Each
// moment is computed at two resolutions; disagreement above tol raises
// AccuracyError.
MembershipReport verify_space_membership(const TestFunction& f, int order, double tol = 1e-10);

// f^(x + y) - f^(x).
std::complex<double> fourier_difference(const TestFunction& f, std::span<const double> x, std::span<const double> y);

// All multi-indices alpha in N^d with |alpha| = n, in lexicographic order.
std::vector<std::vector<int>> multi_indices(int dim, int n);

}  // namespace loclim
