#include <array>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

#include "loclim/errors.hpp"
#include "loclim/limits.hpp"
#include "loclim/quadrature.hpp"
#include "loclim/stats.hpp"

namespace loclim {

namespace {

constexpr double kPi = std::numbers::pi;

struct NamedConstant {
  ConstantName name;
  const char* text;
};

constexpr std::array<NamedConstant, 9> kNames{{
    {ConstantName::D_Hd_boundary, "D_Hd_boundary"},
    {ConstantName::D_Hd_clt, "D_Hd_clt"},
    {ConstantName::Dtilde1, "Dtilde1"},
    {ConstantName::Dtilde2, "Dtilde2"},
    {ConstantName::D_Hdf, "D_Hdf"},
    {ConstantName::C_Hdf, "C_Hdf"},
    {ConstantName::D_Hd_p1, "D_Hd_p1"},
    {ConstantName::C_Hd_p1, "C_Hd_p1"},
    {ConstantName::LP_COEFFICIENT, "LP_COEFFICIENT"},
}};

std::shared_mutex g_cache_mutex;
std::unordered_map<std::string, LimitConstant> g_cache;

bool is_builtin(const std::string& name) {
  return name == "p1" || name == "odd_gaussian" || name == "flat_gaussian";
}

double factorial(int n) { return std::tgamma(n + 1.0); }

// int_R t^m |t|^{2k} exp(-t^2/2) dt
double gaussian_signed_moment(int m, double k) {
  if (m % 2 != 0) return 0.0;
  return gaussian_abs_moment(m + 2.0 * k);
}

MultiIndex padded(const MultiIndex& k, int dim) {
  if (k.dim() == 0) return MultiIndex::zero(dim);
  if (k.dim() != dim) throw ShapeError("k has " + std::to_string(k.dim()) + " components, d = " + std::to_string(dim));
  return k;
}

struct Resolved {
  double h = 0.0;
  double sigma = 1.0;
  int dim = 1;
  MultiIndex k;
  int n = 2;
  std::shared_ptr<const TestFunction> f;
  bool f_is_p1 = true;
};

Resolved resolve(const ConstantParams& p) {
  Resolved r;
  r.h = p.hurst.value;
  if (!(r.h > 0.0 && r.h < 1.0)) throw ParameterDomainError("H must lie in (0,1)");
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) throw ParameterDomainError("sigma must be positive");
  if (p.dim < 1) throw ParameterDomainError("d must be >= 1");
  if (p.order_n < 1) throw ParameterDomainError("N must be >= 1");
  r.sigma = p.sigma;
  r.dim = p.dim;
  r.k = padded(p.k, p.dim);
  r.n = p.order_n;
  if (p.f) {
    if (p.f->dim() != p.dim) throw ShapeError("test function dimension differs from d");
    auto g = std::make_shared<TestFunction>(*p.f);
    g->radius = p.quad.radius;
    r.f = g;
    r.f_is_p1 = p.f->name() == "p1";
  } else {
    auto g = std::make_shared<TestFunction>(TestFunction::heat_kernel(p.dim));
    g->radius = p.quad.radius;
    r.f = g;
  }
  return r;
}

void require_regime(const ConstantParams& p, const MultiIndex& k, int n, Regime want, ConstantName name) {
  const auto rep = classify(p.hurst, k, p.dim, n);
  if (rep.regime != want) {
    throw ParameterDomainError(to_string(name) + " needs the " + to_string(want) + " regime; got " + rep.summary());
  }
}

void require_member(const TestFunction& f, int n, ConstantName name) {
  const auto m = verify_space_membership(f, n);
  if (!m.member) {
    throw ParameterDomainError(to_string(name) + ": " + f.name() + " has a non-vanishing moment of order < " +
                               std::to_string(n));
  }
}

double sigma_factor(double h, double sigma, int dim) {
  return std::pow(2.0 * kPi, dim) * std::pow(sigma, 1.0 / (2.0 * h));
}

// 2 Gamma(1 + 1/(2H)) 2^{1/(2H)} / ((2 pi)^d sigma^{1/(2H)}): the s-integral
// of exp(-sigma |x|^2 s^{2H} / 2) pulled out of the CLT constants.
double clt_prefactor(double h, double sigma, int dim) {
  const double q = 1.0 / (2.0 * h);
  return 2.0 * std::tgamma(1.0 + q) * std::pow(2.0, q) / sigma_factor(h, sigma, dim);
}

// int_{S^{d-1}} prod |w_l|^{2 k_l} dw
double sphere_weight(const MultiIndex& k) {
  double num = 2.0;
  for (double v : k.components()) num *= std::tgamma(v + 0.5);
  return num / std::tgamma(k.order() + 0.5 * k.dim());
}

// int_0^inf r^{a-1} A(r) dr, split at r = 1 with r = 1/s on the tail.
QuadResult radial_integral(const std::function<double(double)>& amp, double a, double tol) {
  // amp(r) vanishes like r^{2N} at 0, so 0 * inf at the far endpoints is 0
  auto head = tanh_sinh(
      [&](double r) {
        if (!(r > 0.0)) return 0.0;
        const double v = amp(r);
        return v == 0.0 ? 0.0 : std::pow(r, a - 1.0) * v;
      },
      0.0, 1.0, tol);
  auto tail = tanh_sinh(
      [&](double s) {
        if (!(s > 0.0)) return 0.0;
        return std::pow(s, -a - 1.0) * amp(1.0 / std::max(s, 1e-100));
      },
      0.0, 1.0, tol);
  QuadResult q;
  q.value = head.value + tail.value;
  q.error = head.error + tail.error;
  q.l1 = head.l1 + tail.l1;
  if (!std::isfinite(q.value)) throw AccuracyError("radial integral is not finite", INFINITY);
  return q;
}

struct Direction {
  std::vector<double> w;
  double weight;
};

// Product rule on S^{d-1} (d <= 3), nodes split at the coordinate planes
// where prod |w_l|^{2 k_l} has kinks.
// Gauss-Legendre on [a, b] after the map u - sin(2 pi u) / (2 pi), which flattens
// the |cos|^{2k} kinks sitting at the arc ends.
std::vector<std::pair<double, double>> arc_rule(int nodes, double a, double b) {
  const auto g = gauss_legendre(nodes, 0.0, 1.0);
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double u = g.nodes[i];
    const double m = u - std::sin(2 * kPi * u) / (2 * kPi);
    const double dm = 1.0 - std::cos(2 * kPi * u);
    out.emplace_back(a + (b - a) * m, (b - a) * dm * g.weights[i]);
  }
  return out;
}

std::vector<Direction> sphere_rule(const MultiIndex& k, int nodes) {
  const int d = k.dim();
  auto kink = [&](const std::vector<double>& w) {
    double v = 1.0;
    for (int l = 0; l < d; ++l) v *= std::pow(std::abs(w[static_cast<std::size_t>(l)]), 2.0 * k[l]);
    return v;
  };
  std::vector<Direction> out;
  if (d == 1) {
    out.push_back({{1.0}, 1.0});
    out.push_back({{-1.0}, 1.0});
    return out;
  }
  std::vector<std::pair<double, double>> phi;
  for (int q = 0; q < 4; ++q) {
    const auto g = arc_rule(nodes, q * kPi / 2, (q + 1) * kPi / 2);
    phi.insert(phi.end(), g.begin(), g.end());
  }
  if (d == 2) {
    for (auto [p, wp] : phi) {
      std::vector<double> w{std::cos(p), std::sin(p)};
      out.push_back({w, wp * kink(w)});
    }
    return out;
  }
  for (int half = 0; half < 2; ++half) {
    for (auto [th, wt] : arc_rule(nodes, half * kPi / 2, (half + 1) * kPi / 2)) {
      for (auto [p, wp] : phi) {
        std::vector<double> w{std::cos(th), std::sin(th) * std::cos(p), std::sin(th) * std::sin(p)};
        out.push_back({w, wt * std::sin(th) * wp * kink(w)});
      }
    }
  }
  return out;
}

// H(2|k| + d) = 1 - 2NH branch:
// 2/(H (2pi)^d sigma^{1/2H}) sum_{|a|=|b|=N} M_a M_b/(a! b!) prod G'(a_l + b_l, k_l).
LimitConstant boundary_constant(const Resolved& r, const QuadratureSettings& quad) {
  const auto idx = multi_indices(r.dim, r.n);
  std::vector<double> m(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    m[i] = moment(*r.f, idx[i], quad.tensor_nodes);
    for (int a : idx[i]) m[i] /= factorial(a);
  }
  KahanSum acc;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (m[i] == 0.0) continue;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      if (m[j] == 0.0) continue;
      double g = 1.0;
      for (int l = 0; l < r.dim; ++l) {
        g *= gaussian_signed_moment(idx[i][static_cast<std::size_t>(l)] + idx[j][static_cast<std::size_t>(l)], r.k[l]);
        if (g == 0.0) break;
      }
      acc.add(m[i] * m[j] * g);
    }
  }
  LimitConstant c;
  c.value = 2.0 / (r.h * sigma_factor(r.h, r.sigma, r.dim)) * acc.value();
  c.error = std::abs(c.value) * 1e-12;
  return c;
}

// CLT branch: prefactor * int |f^(x) - f^(0)|^2 prod |x_l|^{2k_l} |x|^{-1/H} dx.
LimitConstant clt_constant(const Resolved& r, const QuadratureSettings& quad) {
  const double a = r.dim + 2.0 * r.k.order() - 1.0 / r.h;
  const std::vector<double> origin(static_cast<std::size_t>(r.dim), 0.0);
  const std::complex<double> f0 = r.f->fourier(origin);
  QuadResult q;
  if (r.f_is_p1) {
    const double sw = sphere_weight(r.k);
    q = radial_integral(
        [&](double rr) {
          const double g = -std::expm1(-0.5 * rr * rr);
          return sw * g * g;
        },
        a, quad.tolerance);
  } else if (r.f->radial()) {
    const double sw = sphere_weight(r.k);
    q = radial_integral(
        [&](double rr) {
          std::vector<double> x(static_cast<std::size_t>(r.dim), 0.0);
          x[0] = rr;
          return sw * std::norm(r.f->fourier(x) - f0);
        },
        a, quad.tolerance);
  } else {
    if (r.dim > 3) throw CapacityError("non-radial CLT constants are limited to d <= 3");
    if (r.dim > 1 && !r.f->has_analytic_fourier()) {
      throw CapacityError("non-radial CLT constants in d > 1 need an analytic Fourier transform");
    }
    const auto dirs = sphere_rule(r.k, quad.angular_nodes);
    q = radial_integral(
        [&](double rr) {
          KahanSum s;
          std::vector<double> x(static_cast<std::size_t>(r.dim));
          for (const auto& dir : dirs) {
            for (std::size_t l = 0; l < x.size(); ++l) x[l] = rr * dir.w[l];
            s.add(dir.weight * std::norm(r.f->fourier(x) - f0));
          }
          return s.value();
        },
        a, quad.tolerance);
  }
  const double pre = clt_prefactor(r.h, r.sigma, r.dim);
  if (q.error > 1e-8 * std::max(std::abs(q.value), 1e-300)) {
    throw AccuracyError("CLT constant quadrature did not converge", q.error / std::max(std::abs(q.value), 1e-300));
  }
  LimitConstant c;
  c.value = pre * q.value;
  c.error = pre * q.error;
  return c;
}

LimitConstant lp_coefficient(const Resolved& r, const QuadratureSettings& quad) {
  LimitConstant c;
  const int n = r.n;
  std::complex<double> in{1.0, 0.0};
  for (int i = 0; i < n; ++i) in *= std::complex<double>(0.0, 1.0);
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  for (const auto& alpha : multi_indices(r.dim, n)) {
    LpTerm t;
    t.alpha = alpha;
    t.moment = moment(*r.f, alpha, quad.tensor_nodes);
    double af = 1.0;
    for (int v : alpha) af *= factorial(v);
    t.coefficient = in * (t.moment / af);
    t.derivative_coefficient = sign * t.moment / af;
    if (alpha[0] == n) c.value = in.real() / factorial(n) * t.moment;
    c.lp_terms.push_back(std::move(t));
  }
  c.error = 1e-12 * std::max(std::abs(c.value), 1.0);
  return c;
}

std::string cache_key(ConstantName name, const ConstantParams& p, const Resolved& r) {
  std::ostringstream os;
  os.precision(17);
  os << to_string(name) << '|' << p.hurst.value << '|' << r.sigma << '|' << r.dim << '|' << r.k.to_string() << '|'
     << r.n << '|' << r.f->name() << '|' << p.quad.tolerance << '|' << p.quad.tensor_nodes << '|'
     << p.quad.angular_nodes << '|' << p.quad.radius;
  return os.str();
}

LimitConstant compute(ConstantName name, const ConstantParams& p, Resolved r) {
  LimitConstant out;
  switch (name) {
    case ConstantName::Dtilde1:
    case ConstantName::D_Hd_p1: {
      if (!r.f_is_p1) throw ParameterDomainError(to_string(name) + " is defined for f = p_1 only");
      if (name == ConstantName::D_Hd_p1) r.k = MultiIndex::zero(r.dim);
      r.n = 2;
      require_regime(p, r.k, 2, Regime::BOUNDARY_LOG, name);
      // closed form in Gaussian absolute moments
      const int d = r.dim;
      KahanSum acc;
      for (int l = 0; l < d; ++l) {
        double t = gaussian_abs_moment(2 * r.k[l] + 4);
        for (int j = 0; j < d; ++j)
          if (j != l) t *= gaussian_abs_moment(2 * r.k[j]);
        acc.add(t);
        for (int m = 0; m < d; ++m) {
          if (m == l) continue;
          double u = gaussian_abs_moment(2 * r.k[l] + 2) * gaussian_abs_moment(2 * r.k[m] + 2);
          for (int j = 0; j < d; ++j)
            if (j != l && j != m) u *= gaussian_abs_moment(2 * r.k[j]);
          acc.add(u);
        }
      }
      out.value = acc.value() / (2.0 * r.h * sigma_factor(r.h, r.sigma, d));
      out.error = 1e-13 * out.value;
      break;
    }
    case ConstantName::Dtilde2:
    case ConstantName::C_Hd_p1: {
      if (!r.f_is_p1) throw ParameterDomainError(to_string(name) + " is defined for f = p_1 only");
      if (name == ConstantName::C_Hd_p1) r.k = MultiIndex::zero(r.dim);
      r.n = 2;
      require_regime(p, r.k, 2, Regime::CLT, name);
      out = clt_constant(r, p.quad);
      break;
    }
    case ConstantName::D_Hd_boundary:
      require_regime(p, r.k, r.n, Regime::BOUNDARY_LOG, name);
      require_member(*r.f, r.n, name);
      out = boundary_constant(r, p.quad);
      break;
    case ConstantName::D_Hd_clt:
      require_regime(p, r.k, r.n, Regime::CLT, name);
      require_member(*r.f, r.n, name);
      out = clt_constant(r, p.quad);
      break;
    case ConstantName::D_Hdf: {
      r.k = MultiIndex::zero(r.dim);
      r.n = 2;
      require_regime(p, r.k, 2, Regime::BOUNDARY_LOG, name);
      require_member(*r.f, 2, name);
      out = boundary_constant(r, p.quad);
      out.value *= r.h;
      out.error *= r.h;
      break;
    }
    case ConstantName::C_Hdf:
      r.k = MultiIndex::zero(r.dim);
      r.n = 2;
      require_regime(p, r.k, 2, Regime::CLT, name);
      require_member(*r.f, 2, name);
      out = clt_constant(r, p.quad);
      break;
    case ConstantName::LP_COEFFICIENT:
      require_regime(p, r.k, r.n, Regime::LP_LIMIT, name);
      require_member(*r.f, r.n, name);
      out = lp_coefficient(r, p.quad);
      break;
  }
  out.name = name;
  return out;
}

}  // namespace

std::string to_string(ConstantName name) {
  for (const auto& n : kNames)
    if (n.name == name) return n.text;
  return "?";
}

ConstantName parse_constant_name(const std::string& text) {
  for (const auto& n : kNames)
    if (text == n.text) return n.name;
  throw ConfigError("unknown constant name: " + text);
}

QuadratureSettings QuadratureSettings::coarser() const {
  QuadratureSettings q = *this;
  q.tolerance = std::sqrt(tolerance) * 1e-3;
  q.tensor_nodes = std::max(8, tensor_nodes / 2);
  q.angular_nodes = std::max(4, angular_nodes / 2);
  q.radius = 0.75 * radius;
  return q;
}

double gaussian_abs_moment(double p) {
  if (!(p > -1.0)) throw ParameterDomainError("gaussian_abs_moment needs p > -1");
  const auto q = tanh_sinh(
      [p](double t) { return t > 0.0 && t < 80.0 ? std::pow(t, p) * std::exp(-0.5 * t * t) : 0.0; }, 0.0, INFINITY,
      1e-14);
  if (q.error > 1e-11 * q.l1) throw AccuracyError("Gaussian moment quadrature", q.error / q.l1);
  return 2.0 * q.value;
}

double radial_gap_integral_closed(double a) {
  if (!(a > -4.0 && a < 0.0)) throw ParameterDomainError("closed form needs -4 < a < 0");
  // 2^{s-1} Gamma(s) (2^{-s} - 2) with s = a/2; the pole of Gamma at s = -1
  // cancels against the zero of the bracket, so write it as
  // Gamma(s + 2) / s * 2 expm1(-(s + 1) ln 2) / (s + 1).
  const double s = 0.5 * a;
  const double t = s + 1.0;
  const double bracket = t == 0.0 ? -2.0 * std::numbers::ln2 : 2.0 * std::expm1(-t * std::numbers::ln2) / t;
  return std::pow(2.0, s - 1.0) * std::tgamma(s + 2.0) / s * bracket;
}

LimitConstant constant(ConstantName name, const ConstantParams& params) {
  Resolved r = resolve(params);
  const bool cacheable = is_builtin(r.f->name());
  std::string key;
  if (cacheable) {
    key = cache_key(name, params, r);
    std::shared_lock lock(g_cache_mutex);
    if (auto it = g_cache.find(key); it != g_cache.end()) return it->second;
  }
  LimitConstant c = compute(name, params, std::move(r));
  if (cacheable) {
    std::unique_lock lock(g_cache_mutex);
    g_cache.emplace(key, c);
  }
  return c;
}

void clear_constant_cache() {
  std::unique_lock lock(g_cache_mutex);
  g_cache.clear();
}

std::size_t constant_cache_size() {
  std::shared_lock lock(g_cache_mutex);
  return g_cache.size();
}

}  // namespace loclim
