#include "loclim/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "loclim/errors.hpp"
#include "loclim/parallel.hpp"
#include "loclim/rng.hpp"
#include "loclim/stats.hpp"

namespace loclim {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2 pi)

struct Canonical {
  std::vector<std::pair<double, double>> intervals;
  std::vector<int> m;
};

Canonical canonical(const MomentQuery& q) {
  std::vector<std::size_t> order(q.intervals.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return q.intervals[a].first < q.intervals[b].first; });
  Canonical c;
  for (auto i : order) {
    c.intervals.push_back(q.intervals[i]);
    c.m.push_back(q.m[i]);
  }
  return c;
}

// log of a Gamma(alpha, 1) draw without underflow for small alpha
double log_gamma_draw(Engine& eng, double alpha) {
  std::gamma_distribution<double> g(alpha + 1.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double v = g(eng);
  double w = u(eng);
  while (w <= 0.0) w = u(eng);
  return std::log(v) + std::log(w) / alpha;
}

double log_sum_exp(const std::vector<double>& v) {
  double mx = -INFINITY;
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

struct Partial {
  KahanSum s1, s2;
  std::size_t degenerate = 0;
};

}  // namespace

std::string to_string(MomentMethod m) { return m == MomentMethod::FORMULA_MC ? "FORMULA_MC" : "SIMULATION_MC"; }

void MomentQuery::validate() const {
  if (intervals.empty()) throw ShapeError("moment query needs at least one interval");
  if (intervals.size() != m.size()) throw ShapeError("intervals and m differ in length");
  for (int v : m)
    if (v < 1) throw ParameterDomainError("every m_i must be >= 1");
  if (!level.empty() && static_cast<int>(level.size()) != spec.dim) throw ShapeError("level dimension differs from d");
  spec.validate();
  if (!(spec.hurst * spec.dim < 1.0)) throw ParameterDomainError("moment oracle needs Hd < 1");
  auto sorted = intervals;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto [a, b] = sorted[i];
    if (!(a >= 0.0) || !(b > a) || !std::isfinite(b)) throw ParameterDomainError("intervals need 0 <= a < b");
    if (i > 0 && sorted[i - 1].second > a) throw ParameterDomainError("intervals overlap");
  }
}

int MomentQuery::total_order() const {
  int t = 0;
  for (int v : m) t += v;
  return t;
}

MomentResult moment_formula(const MomentQuery& query, const FormulaBudget& budget) {
  query.validate();
  MomentResult res;
  res.method = MomentMethod::FORMULA_MC;
  const bool any_odd = std::any_of(query.m.begin(), query.m.end(), [](int v) { return v % 2 != 0; });
  if (any_odd) return res;  // exact zero

  const int d = query.spec.dim;
  const int total = query.total_order() / 2;  // number of time points
  if (total * d > budget.dimension_cap) {
    throw CapacityError("moment integral dimension " + std::to_string(total * d) + " exceeds the cap " +
                        std::to_string(budget.dimension_cap));
  }
  if (budget.samples < 2 || budget.chunk == 0) throw ConfigError("moment budget needs >= 2 samples");

  const Canonical c = canonical(query);
  const std::vector<double> level = query.level.empty() ? std::vector<double>(static_cast<std::size_t>(d), 0.0)
                                                        : query.level;
  const auto cov = covariance(query.spec);
  const double alpha = 1.0 - query.spec.hurst * d;

  // log of the combinatorial prefactor times the in-interval orderings
  double log_pref = 0.0;
  for (int mi : c.m) {
    const int half = mi / 2;
    log_pref += std::lgamma(mi + 1.0) - half * std::log(2.0) - half * d * kLog2Pi - std::lgamma(half + 1.0);
    log_pref += std::lgamma(half + 1.0);  // sorted points only
  }

  const std::size_t nchunks = (budget.samples + budget.chunk - 1) / budget.chunk;
  std::vector<Partial> parts(nchunks);
  parallel_for(nchunks, worker_count(budget.workers), [&](std::size_t ci) {
    Engine eng = make_engine(stream_id(budget.seed, stream_tag::kMomentChunk, ci));
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t begin = ci * budget.chunk;
    const std::size_t end = std::min(budget.samples, begin + budget.chunk);
    std::vector<double> u(static_cast<std::size_t>(total));
    std::vector<double> lg;
    Eigen::MatrixXd gram(total, total);
    Eigen::VectorXd z(total), y(total);
    Partial& p = parts[ci];
    for (std::size_t s = begin; s < end; ++s) {
      // Dirichlet(alpha, ..., alpha, 1) gaps inside each interval
      double log_q = 0.0;
      std::size_t pos = 0;
      for (std::size_t i = 0; i < c.intervals.size(); ++i) {
        const int half = c.m[i] / 2;
        const auto [a, b] = c.intervals[i];
        const double len = b - a;
        lg.assign(static_cast<std::size_t>(half) + 1, 0.0);
        for (int j = 0; j < half; ++j) lg[static_cast<std::size_t>(j)] = log_gamma_draw(eng, alpha);
        lg[static_cast<std::size_t>(half)] = log_gamma_draw(eng, 1.0);
        const double lt = log_sum_exp(lg);
        double acc = a;
        for (int j = 0; j < half; ++j) {
          const double lgap = lg[static_cast<std::size_t>(j)] - lt;
          acc += len * std::exp(lgap);
          u[pos++] = std::min(acc, b);
          log_q += (alpha - 1.0) * lgap;
        }
        log_q += -half * std::log(len) + std::lgamma(half * alpha + 1.0) - half * std::lgamma(alpha);
      }
      double maxdiag = 0.0;
      for (int j = 0; j < total; ++j) {
        for (int l = 0; l <= j; ++l) {
          const double v = cov(u[static_cast<std::size_t>(j)], u[static_cast<std::size_t>(l)]);
          gram(j, l) = v;
          gram(l, j) = v;
        }
        maxdiag = std::max(maxdiag, gram(j, j));
      }
      const double ridge = budget.ridge * maxdiag;
      Eigen::MatrixXd shifted = gram;
      shifted.diagonal().array() += ridge;
      Eigen::LLT<Eigen::MatrixXd> llt(shifted);
      if (llt.info() != Eigen::Success || !(maxdiag > 0.0)) {
        ++p.degenerate;
        p.s1.add(0.0);
        p.s2.add(0.0);
        continue;
      }
      const Eigen::MatrixXd lmat = llt.matrixL();
      double log_det = 0.0;
      for (int j = 0; j < total; ++j) log_det += 2.0 * std::log(lmat(j, j));
      double log_w = 0.0, phase = 0.0;
      for (int l = 0; l < d; ++l) {
        for (int j = 0; j < total; ++j) z(j) = normal(eng);
        y = lmat.transpose().triangularView<Eigen::Upper>().solve(z);
        log_w += 0.5 * total * kLog2Pi - 0.5 * log_det + 0.5 * ridge * y.squaredNorm();
        phase += level[static_cast<std::size_t>(l)] * y.sum();
      }
      const double w = std::exp(log_pref + log_w - log_q) * std::cos(phase);
      if (!std::isfinite(w)) {
        ++p.degenerate;
        p.s1.add(0.0);
        p.s2.add(0.0);
        continue;
      }
      p.s1.add(w);
      p.s2.add(w * w);
    }
  });

  KahanSum s1, s2;
  std::size_t degenerate = 0;
  for (const auto& p : parts) {
    s1.add(p.s1.value());
    s2.add(p.s2.value());
    degenerate += p.degenerate;
  }
  const double n = static_cast<double>(budget.samples);
  if (static_cast<double>(degenerate) > 1e-3 * n) {
    throw AccuracyError("moment proposal produced degenerate Gram matrices", static_cast<double>(degenerate) / n);
  }
  res.samples = budget.samples;
  res.value = s1.value() / n;
  const double var = std::max(0.0, (s2.value() / n - res.value * res.value) * n / (n - 1.0));
  res.standard_error = std::sqrt(var / n);
  return res;
}

MomentResult moment_simulated(const MomentQuery& query, const SimulationBudget& budget) {
  query.validate();
  if (budget.replicates < 2) throw ConfigError("moment simulation needs >= 2 replicates");
  if (!(budget.eps_proxy > 0.0)) throw ParameterDomainError("eps_proxy must be positive");
  const int d = query.spec.dim;
  const std::vector<double> level = query.level.empty() ? std::vector<double>(static_cast<std::size_t>(d), 0.0)
                                                        : query.level;
  double horizon = 0.0;
  std::vector<double> times;
  for (auto [a, b] : query.intervals) {
    horizon = std::max(horizon, b);
    times.push_back(a);
    times.push_back(b);
  }
  const PathSampler sampler(query.spec, horizon, budget.steps);
  const LocalTimeEvaluator ev(query.spec, horizon, budget.steps, budget.rule);
  const MultiIndex k0 = MultiIndex::zero(d);
  std::vector<double> prod(budget.replicates, 0.0);
  parallel_for(budget.replicates, worker_count(budget.workers), [&](std::size_t r) {
    const auto path = sampler.sample(budget.seed, r);
    const auto lt = ev.evaluate(path, budget.eps_proxy, level, k0, times);
    Engine eng = make_engine(stream_id(budget.seed, stream_tag::kBrownianClock, r));
    std::normal_distribution<double> normal(0.0, 1.0);
    double v = 1.0;
    for (std::size_t i = 0; i < query.intervals.size(); ++i) {
      const double dl = std::max(0.0, lt[2 * i + 1] - lt[2 * i]);
      const double dw = std::sqrt(dl) * normal(eng);
      v *= std::pow(dw, query.m[i]);
    }
    prod[r] = v;
  });
  MomentResult res;
  res.method = MomentMethod::SIMULATION_MC;
  res.samples = budget.replicates;
  res.value = mean(prod);
  res.standard_error = standard_deviation(prod) / std::sqrt(static_cast<double>(prod.size()));
  return res;
}

}  // namespace loclim
