#include "loclim/limits.hpp"

#include <cmath>
#include <sstream>

#include "loclim/errors.hpp"

namespace loclim {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::LP_LIMIT: return "LP_LIMIT";
    case Regime::BOUNDARY_LOG: return "BOUNDARY_LOG";
    case Regime::CLT: return "CLT";
    case Regime::NONEXISTENT: return "NONEXISTENT";
  }
  return "?";
}

namespace {

std::string short_number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

double ScalingFactor::operator()(double eps) const {
  if (branch == Regime::NONEXISTENT) throw ParameterDomainError("no scaling factor in the NONEXISTENT regime");
  if (!(eps > 0.0)) throw ParameterDomainError("scaling needs eps > 0");
  double v = std::pow(eps, exponent);
  if (has_log) v /= std::sqrt(std::log1p(1.0 / std::sqrt(eps)));
  return v;
}

std::string ScalingFactor::describe() const {
  if (branch == Regime::NONEXISTENT) return "undefined";
  std::string s = "ε^" + short_number(exponent);
  if (has_log) s += "/sqrt(ln(1+ε^-0.5))";
  return s;
}

std::string RegimeReport::summary() const {
  if (regime == Regime::NONEXISTENT) return "NONEXISTENT, H(2|k|+d)=" + short_number(lhs) + " >= 1";
  return to_string(regime) + ", ℓ(ε)=" + scaling.describe();
}

RegimeReport classify(const Quantity& hurst, const std::vector<Quantity>& k, int dim, int order_n) {
  if (!(hurst.value > 0.0 && hurst.value < 1.0)) throw ParameterDomainError("H must lie in (0,1)");
  if (dim < 1) throw ParameterDomainError("d must be >= 1");
  if (order_n < 1) throw ParameterDomainError("N must be >= 1");
  RegimeReport rep;
  rep.hurst = hurst;
  rep.dim = dim;
  rep.order_n = order_n;
  bool exact = hurst.exact.has_value();
  for (const auto& q : k) {
    if (!(q.value >= 0.0)) throw ParameterDomainError("k components must be >= 0");
    rep.k_order += q.value;
    exact = exact && q.exact.has_value();
  }
  rep.exact_inputs = exact;
  const double h = hurst.value;
  rep.lhs = h * (2.0 * rep.k_order + dim);
  rep.lp_threshold = 1.0 - 2.0 * order_n * h;

  enum class Cmp { Less, Equal, Greater };
  Cmp vs_one, vs_threshold;
  double exponent = 0.0;
  if (exact) {
    Rational ksum(0);
    for (const auto& q : k) ksum = ksum + *q.exact;
    const Rational hh = *hurst.exact;
    const Rational lhs = hh * (Rational(2) * ksum + Rational(dim));
    const Rational thr = Rational(1) - Rational(2 * order_n) * hh;
    vs_one = lhs < Rational(1) ? Cmp::Less : (lhs == Rational(1) ? Cmp::Equal : Cmp::Greater);
    vs_threshold = lhs < thr ? Cmp::Less : (lhs == thr ? Cmp::Equal : Cmp::Greater);
    exponent = ((Rational(2) * ksum + Rational(dim) - Rational(1) / hh) / Rational(4)).to_double();
  } else {
    auto cmp = [](double a, double b) {
      if (std::abs(a - b) <= 1e-12 * std::max({std::abs(a), std::abs(b), 1e-300})) return Cmp::Equal;
      return a < b ? Cmp::Less : Cmp::Greater;
    };
    vs_one = cmp(rep.lhs, 1.0);
    vs_threshold = cmp(rep.lhs, rep.lp_threshold);
    exponent = (2.0 * rep.k_order + dim - 1.0 / h) / 4.0;
  }

  if (vs_one != Cmp::Less) {
    rep.regime = Regime::NONEXISTENT;
  } else if (vs_threshold == Cmp::Less) {
    rep.regime = Regime::LP_LIMIT;
    rep.scaling = {Regime::LP_LIMIT, -0.5 * order_n, false};
    rep.constant_name = "LP_COEFFICIENT";
  } else if (vs_threshold == Cmp::Equal) {
    rep.regime = Regime::BOUNDARY_LOG;
    rep.boundary_exact = exact;
    rep.scaling = {Regime::BOUNDARY_LOG, -0.5 * order_n, true};
    rep.constant_name = order_n == 2 ? "Dtilde1" : "D_Hd_boundary";
  } else {
    rep.regime = Regime::CLT;
    rep.scaling = {Regime::CLT, exponent, false};
    rep.constant_name = order_n == 2 ? "Dtilde2" : "D_Hd_clt";
  }
  if (rep.regime == Regime::NONEXISTENT) rep.scaling = {Regime::NONEXISTENT, 0.0, false};
  return rep;
}

RegimeReport classify(const Quantity& hurst, const MultiIndex& k, int dim, int order_n) {
  std::vector<Quantity> q;
  for (double v : k.components()) {
    if (std::floor(v) == v && std::abs(v) < 1e15) {
      q.emplace_back(Rational(static_cast<std::int64_t>(v)));
    } else {
      q.emplace_back(v);
    }
  }
  return classify(hurst, q, dim, order_n);
}

double scaling(const RegimeReport& report, double eps) { return report.scaling(eps); }

}  // namespace loclim
