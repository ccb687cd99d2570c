#include "loclim/harness.hpp"

#include <algorithm>
#include <cmath>

#include "loclim/errors.hpp"
#include "loclim/parallel.hpp"
#include "loclim/stats.hpp"

namespace loclim {

namespace {

struct Setup {
  ExperimentConfig cfg;
  RegimeReport regime;
  std::vector<double> eps;
  std::vector<double> level;
  MultiIndex k;
  std::size_t steps = 0;
  double fhat0 = 1.0;  // f^(0) for p_1
};

Setup make_setup(const ExperimentConfig& cfg) {
  cfg.validate();
  Setup s;
  s.cfg = cfg;
  s.regime = experiment_regime(cfg);
  s.eps = cfg.eps_grid();
  s.level = cfg.estimator.level_for(cfg.spec.dim);
  s.k = cfg.estimator.order_for(cfg.spec.dim);
  s.steps = cfg.estimator.steps ? cfg.estimator.steps
                                : recommended_steps(cfg.spec.hurst, s.eps.back(), cfg.estimator.horizon);
  if (!existence_gate(cfg.spec.hurst, s.k, cfg.spec.dim)) {
    throw ParameterDomainError("H(2|k|+d) >= 1: the local time derivative does not exist");
  }
  return s;
}

ExperimentRecord base_record(const Setup& s, const std::string& kind) {
  ExperimentRecord r;
  r.kind = kind;
  r.config = s.cfg.canonical();
  r.config_hash = fnv1a_hex(r.config);
  r.regime = s.regime.summary();
  r.boundary_exact = s.regime.boundary_exact;
  r.gates["existence"] = existence_gate(s.cfg.spec.hurst, s.k, s.cfg.spec.dim);
  r.version = LOCLIM_VERSION;
  r.started_at = utc_timestamp();
  return r;
}

// log-log slope of stat_j(indices) against eps_j, with bootstrap SE
struct SlopeFit {
  double slope = 0.0;
  double se = 0.0;
};

SlopeFit fit_loglog(const std::vector<double>& xs,
                    const std::function<double(std::size_t, std::span<const std::size_t>)>& stat, std::size_t n,
                    const ExperimentConfig& cfg, std::uint64_t tag) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  std::vector<double> lx(xs.size()), ly(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) lx[j] = std::log(xs[j]);
  auto slope_of = [&](std::span<const std::size_t> idx) {
    for (std::size_t j = 0; j < xs.size(); ++j) ly[j] = std::log(stat(j, idx));
    return fit_line(lx, ly).slope;
  };
  SlopeFit f;
  f.slope = slope_of(all);
  f.se = bootstrap_se(n, cfg.bootstrap, cfg.seed, tag, slope_of);
  return f;
}

double mean_of(const std::vector<double>& v, std::span<const std::size_t> idx) {
  KahanSum s;
  for (auto i : idx) s.add(v[i]);
  return s.value() / static_cast<double>(idx.size());
}

double mean_abs_of(const std::vector<double>& v, std::span<const std::size_t> idx) {
  KahanSum s;
  for (auto i : idx) s.add(std::abs(v[i]));
  return s.value() / static_cast<double>(idx.size());
}

double var_of(const std::vector<double>& v, std::span<const std::size_t> idx) {
  const double m = mean_of(v, idx);
  KahanSum s;
  for (auto i : idx) s.add((v[i] - m) * (v[i] - m));
  return s.value() / static_cast<double>(idx.size() - 1);
}

std::vector<double> pick(const std::vector<double>& v, std::span<const std::size_t> idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(v[i]);
  return out;
}

double proxy_eps(const ExperimentConfig& cfg, double eps) {
  return cfg.proxy_ratio > 0.0 ? eps * cfg.proxy_ratio : cfg.eps_ref;
}

double increment_scale(const ProcessSpec& spec) {
  return spec.kind == ProcessKind::FBM ? spec.sigma : increment_sigma(spec);
}

}  // namespace

RegimeReport experiment_regime(const ExperimentConfig& cfg) {
  return classify(cfg.spec.hurst_quantity(), cfg.estimator.order_for(cfg.spec.dim), cfg.spec.dim, cfg.order_n);
}

ExperimentRecord run_rate_experiment(const ExperimentConfig& config) {
  if (config.eps_count < 3) throw ConfigError("rate fit needs at least 3 eps values");
  const Setup s = make_setup(config);
  const auto& cfg = s.cfg;
  ExperimentRecord rec = base_record(s, "rate");
  const bool is_lp = s.regime.regime == Regime::LP_LIMIT;
  rec.gates["regime_lp"] = is_lp;

  const std::size_t m = cfg.replicates;
  const std::size_t ne = s.eps.size();
  const double horizon = cfg.estimator.horizon;
  const PathSampler sampler(cfg.spec, horizon, s.steps);
  const LocalTimeEvaluator ev(cfg.spec, horizon, s.steps, cfg.estimator.rule, cfg.estimator.bridge_nodes);
  const LocalTimeEvaluator pev(cfg.spec, horizon, s.steps, cfg.proxy_rule, cfg.estimator.bridge_nodes);
  const std::vector<double> th{horizon};

  // LP prediction: sum over |alpha| = N of coefficient * L^(k + alpha)
  std::vector<LpTerm> terms;
  bool derivative_gate = false;
  if (is_lp) {
    ConstantParams cp;
    cp.hurst = cfg.spec.hurst_quantity();
    cp.sigma = increment_scale(cfg.spec);
    cp.dim = cfg.spec.dim;
    cp.k = s.k;
    cp.order_n = cfg.order_n;
    terms = constant(ConstantName::LP_COEFFICIENT, cp).lp_terms;
    derivative_gate = cfg.spec.hurst * (2.0 * (s.k.order() + cfg.order_n) + cfg.spec.dim) < 1.0;
  }
  rec.gates["derivative_proxy_exists"] = derivative_gate;
  const bool lp_check = is_lp && derivative_gate;

  std::vector<std::vector<double>> delta(ne, std::vector<double>(m));
  std::vector<double> lam(m, 0.0);
  parallel_for(m, worker_count(cfg.workers), [&](std::size_t r) {
    const auto path = sampler.sample(cfg.seed, r);
    double fixed_proxy = 0.0;
    if (cfg.proxy_ratio <= 0.0) fixed_proxy = pev.evaluate(path, cfg.eps_ref, s.level, s.k, th)[0];
    for (std::size_t j = 0; j < ne; ++j) {
      const double le = ev.evaluate(path, s.eps[j], s.level, s.k, th)[0];
      const double lp = cfg.proxy_ratio > 0.0 ? pev.evaluate(path, proxy_eps(cfg, s.eps[j]), s.level, s.k, th)[0]
                                              : fixed_proxy;
      delta[j][r] = le - s.fhat0 * lp;
    }
    if (lp_check) {
      double v = 0.0;
      for (const auto& t : terms) {
        if (t.derivative_coefficient == 0.0) continue;
        MultiIndex ka = s.k;
        for (std::size_t l = 0; l < t.alpha.size(); ++l)
          for (int c = 0; c < t.alpha[l]; ++c) ka = ka.plus_unit(static_cast<int>(l));
        v += t.derivative_coefficient * pev.evaluate(path, cfg.eps_ref, s.level, ka, th)[0];
      }
      lam[r] = v;
    }
  });

  for (std::size_t j = 0; j < ne; ++j) rec.rows.push_back({s.eps[j], delta[j]});
  const auto fit = fit_loglog(
      s.eps, [&](std::size_t j, std::span<const std::size_t> idx) { return mean_abs_of(delta[j], idx); }, m, cfg, 1);
  rec.slope = fit.slope;
  rec.slope_se = fit.se;
  rec.metrics["slope"] = fit.slope;
  rec.metrics["slope_se"] = fit.se;
  rec.metrics["regime_is_lp"] = is_lp ? 1.0 : 0.0;
  rec.metrics["steps"] = static_cast<double>(s.steps);

  std::vector<std::size_t> all(m);
  for (std::size_t i = 0; i < m; ++i) all[i] = i;
  auto& mean_abs = rec.series["mean_abs"];
  auto& sd = rec.series["sd"];
  for (std::size_t j = 0; j < ne; ++j) {
    mean_abs.push_back(mean_abs_of(delta[j], all));
    sd.push_back(std::sqrt(var_of(delta[j], all)));
  }
  if (lp_check) {
    const double scale_n = 0.5 * cfg.order_n;
    const double lam_mean = mean_of(lam, all);
    // the stated coefficient i^N M_alpha / alpha! differs from the derivative
    // convention by the factor i^N (-1)^N
    std::complex<double> in{1.0, 0.0};
    for (int i = 0; i < cfg.order_n; ++i) in *= std::complex<double>(0.0, 1.0);
    const double stated_factor = in.real() * ((cfg.order_n % 2 == 0) ? 1.0 : -1.0);
    auto& ratio_d = rec.series["lp_ratio_derivative"];
    auto& ratio_s = rec.series["lp_ratio_stated"];
    auto& corr = rec.series["lp_corr"];
    for (std::size_t j = 0; j < ne; ++j) {
      std::vector<double> scaled(m);
      for (std::size_t r = 0; r < m; ++r) scaled[r] = delta[j][r] * std::pow(s.eps[j], -scale_n);
      const double sm = mean_of(scaled, all);
      ratio_d.push_back(sm / lam_mean);
      ratio_s.push_back(stated_factor != 0.0 ? sm / (stated_factor * lam_mean) : NAN);
      corr.push_back(correlation(scaled, lam));
    }
    rec.metrics["lp_ratio_derivative"] = ratio_d.back();
    rec.metrics["lp_ratio_stated"] = ratio_s.back();
    rec.metrics["lp_corr"] = corr.back();
    rec.metrics["lp_prediction_mean"] = lam_mean;
  }
  rec.finished_at = utc_timestamp();
  rec.seal();
  return rec;
}

ExperimentRecord run_clt_experiment(const ExperimentConfig& config) {
  if (config.eps_count < 2) throw ConfigError("CLT experiment needs at least 2 eps values");
  const Setup s = make_setup(config);
  const auto& cfg = s.cfg;
  ExperimentRecord rec = base_record(s, "clt");
  const bool ok_regime = s.regime.regime == Regime::CLT || s.regime.regime == Regime::BOUNDARY_LOG;
  rec.gates["regime_clt_or_boundary"] = ok_regime;
  if (!ok_regime) throw ParameterDomainError("CLT experiment needs the CLT or BOUNDARY_LOG regime; got " + s.regime.summary());

  const std::size_t m = cfg.replicates;
  const std::size_t ne = s.eps.size();
  const double horizon = cfg.estimator.horizon;
  const PathSampler sampler(cfg.spec, horizon, s.steps);
  const LocalTimeEvaluator ev(cfg.spec, horizon, s.steps, cfg.estimator.rule, cfg.estimator.bridge_nodes);
  const LocalTimeEvaluator pev(cfg.spec, horizon, s.steps, cfg.proxy_rule, cfg.estimator.bridge_nodes);

  // horizons: T first, then t0 (if > 0) and t0 + gaps
  std::vector<double> hs{horizon};
  const bool t0_zero = cfg.tightness_start == 0.0;
  if (!t0_zero) hs.push_back(cfg.tightness_start);
  for (double g : cfg.tightness_gaps) hs.push_back(cfg.tightness_start + g);
  const std::size_t gap0 = t0_zero ? 1 : 2;

  ConstantParams cp;
  cp.hurst = cfg.spec.hurst_quantity();
  cp.sigma = increment_scale(cfg.spec);
  cp.dim = cfg.spec.dim;
  cp.k = s.k;
  cp.order_n = cfg.order_n;
  const auto cname = s.regime.regime == Regime::CLT ? ConstantName::Dtilde2 : ConstantName::Dtilde1;
  const double dconst = constant(cname, cp).value;
  rec.metrics["D"] = dconst;

  std::vector<std::vector<double>> fvals(ne, std::vector<double>(m));   // F_eps(T)
  std::vector<std::vector<double>> delta(ne, std::vector<double>(m));   // L_eps(T) - L_proxy(T)
  std::vector<std::vector<double>> proxy(ne, std::vector<double>(m));   // L_proxy(T)
  std::vector<std::vector<double>> incr(cfg.tightness_gaps.size(), std::vector<double>(m));  // smallest eps
  std::vector<double> xt(m);
  parallel_for(m, worker_count(cfg.workers), [&](std::size_t r) {
    const auto path = sampler.sample(cfg.seed, r);
    xt[r] = path.component(0).back();
    std::vector<double> fixed;
    if (cfg.proxy_ratio <= 0.0) fixed = pev.evaluate(path, cfg.eps_ref, s.level, s.k, hs);
    for (std::size_t j = 0; j < ne; ++j) {
      const double ell = s.regime.scaling(s.eps[j]);
      const auto le = ev.evaluate(path, s.eps[j], s.level, s.k, hs);
      const auto lp = cfg.proxy_ratio > 0.0 ? pev.evaluate(path, proxy_eps(cfg, s.eps[j]), s.level, s.k, hs) : fixed;
      delta[j][r] = le[0] - s.fhat0 * lp[0];
      fvals[j][r] = ell * delta[j][r];
      proxy[j][r] = lp[0];
      if (j + 1 == ne) {
        const double f0 = t0_zero ? 0.0 : ell * (le[1] - s.fhat0 * lp[1]);
        for (std::size_t g = 0; g < cfg.tightness_gaps.size(); ++g) {
          incr[g][r] = ell * (le[gap0 + g] - s.fhat0 * lp[gap0 + g]) - f0;
        }
      }
    }
  });

  for (std::size_t j = 0; j < ne; ++j) rec.rows.push_back({s.eps[j], fvals[j]});
  std::vector<std::size_t> all(m);
  for (std::size_t i = 0; i < m; ++i) all[i] = i;

  auto& var_f = rec.series["var_F"];
  auto& sd_delta = rec.series["sd_delta"];
  auto& ratio = rec.series["var_ratio"];
  auto& mean_proxy = rec.series["mean_proxy"];
  for (std::size_t j = 0; j < ne; ++j) {
    var_f.push_back(var_of(fvals[j], all));
    sd_delta.push_back(std::sqrt(var_of(delta[j], all)));
    mean_proxy.push_back(mean_of(proxy[j], all));
    ratio.push_back(var_f.back() / (dconst * mean_proxy.back()));
  }

  const auto sd_fit = fit_loglog(
      s.eps, [&](std::size_t j, std::span<const std::size_t> idx) { return std::sqrt(var_of(delta[j], idx)); }, m,
      cfg, 2);
  rec.slope = sd_fit.slope;
  rec.slope_se = sd_fit.se;
  rec.metrics["sd_slope"] = sd_fit.slope;
  rec.metrics["sd_slope_se"] = sd_fit.se;
  const double expected_sd_slope = -s.regime.scaling.exponent;  // sd ~ 1 / l(eps)
  rec.metrics["sd_slope_expected"] = expected_sd_slope;

  const std::size_t last = ne - 1;
  const auto& fl = fvals[last];
  const auto& pl = proxy[last];
  rec.metrics["eps_min"] = s.eps[last];
  rec.metrics["var_ratio"] = ratio.back();
  rec.metrics["var_ratio_se"] = bootstrap_se(m, cfg.bootstrap, cfg.seed, 3, [&](std::span<const std::size_t> idx) {
    return var_of(fl, idx) / (dconst * mean_of(pl, idx));
  });
  {
    EstimatorConfig ec = cfg.estimator;
    ec.epsilon = cfg.eps_ref;
    const double el = expected_estimate(cfg.spec, ec);
    rec.metrics["expected_local_time"] = el;
    rec.metrics["var_ratio_expected"] = var_f.back() / (dconst * el);
  }

  // mixed-normal shape: F / sqrt(D L) should be standard normal
  std::vector<double> g(m);
  for (std::size_t r = 0; r < m; ++r) g[r] = pl[r] > 0.0 ? fl[r] / std::sqrt(dconst * pl[r]) : 0.0;
  rec.series["normalized_F"] = g;
  rec.metrics["normalized_var"] = var_of(g, all);
  rec.metrics["kurtosis"] = excess_kurtosis(g);
  rec.metrics["kurtosis_se"] = bootstrap_se(m, cfg.bootstrap, cfg.seed, 4, [&](std::span<const std::size_t> idx) {
    const auto v = pick(g, idx);
    return excess_kurtosis(v);
  });
  rec.metrics["kurtosis_F"] = excess_kurtosis(fl);

  const double rho = correlation(fl, xt);
  rec.metrics["corr_xt"] = rho;
  rec.metrics["corr_xt_se"] = (1.0 - rho * rho) / std::sqrt(static_cast<double>(m) - 1.0);

  if (cfg.tightness_gaps.size() >= 2) {
    auto& m2 = rec.series["tightness_m2"];
    for (const auto& v : incr) {
      KahanSum acc;
      for (double x : v) acc.add(x * x);
      m2.push_back(acc.value() / static_cast<double>(m));
    }
    const auto tf = fit_loglog(
        cfg.tightness_gaps,
        [&](std::size_t j, std::span<const std::size_t> idx) {
          KahanSum acc;
          for (auto i : idx) acc.add(incr[j][i] * incr[j][i]);
          return acc.value() / static_cast<double>(idx.size());
        },
        m, cfg, 5);
    rec.series["tightness_gaps"] = cfg.tightness_gaps;
    rec.metrics["tightness_exponent"] = tf.slope;
    rec.metrics["tightness_exponent_se"] = tf.se;
    rec.metrics["tightness_threshold"] = 0.8 * (1.0 - cfg.spec.hurst * cfg.spec.dim);
  }
  rec.metrics["steps"] = static_cast<double>(s.steps);
  rec.finished_at = utc_timestamp();
  rec.seal();
  return rec;
}

void persist(const ExperimentConfig& cfg, const ExperimentRecord& rec) {
  if (!cfg.records_path.empty()) RecordStore(cfg.records_path).append(rec);
  if (!cfg.csv_path.empty()) {
    std::vector<std::string> header{"eps"};
    for (const auto& [name, v] : rec.series)
      if (v.size() == rec.rows.size()) header.push_back(name);
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0; j < rec.rows.size(); ++j) {
      std::vector<double> row{rec.rows[j].eps};
      for (const auto& [name, v] : rec.series)
        if (v.size() == rec.rows.size()) row.push_back(v[j]);
      rows.push_back(row);
    }
    write_csv(cfg.csv_path, header, rows);
  }
}

}  // namespace loclim
