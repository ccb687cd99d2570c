#include "loclim/cli.hpp"

#include <cmath>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "loclim/conditions.hpp"
#include "loclim/config.hpp"
#include "loclim/errors.hpp"
#include "loclim/harness.hpp"
#include "loclim/limits.hpp"
#include "loclim/local_time.hpp"
#include "loclim/oracles.hpp"
#include "loclim/process.hpp"
#include "loclim/records.hpp"

namespace loclim::cli {

namespace {

struct ProcessOpts {
  std::string kind = "fbm";
  std::string hurst = "1/2";
  double sigma = 1.0;
  int dim = 1;
  double hprime = 0.5;
  double bik = 1.0;

  void add(CLI::App* app) {
    app->add_option("--kind", kind, "fbm | sfbm | bifbm")->capture_default_str();
    app->add_option("--H", hurst, "Hurst index (rational p/q or decimal)")->capture_default_str();
    app->add_option("--sigma", sigma, "FBM increment variance scale")->capture_default_str();
    app->add_option("--d", dim, "spatial dimension")->capture_default_str();
    app->add_option("--hprime", hprime, "bi-fractional H'")->capture_default_str();
    app->add_option("--K", bik, "bi-fractional K")->capture_default_str();
  }

  ProcessSpec spec() const {
    const Quantity h = Quantity::parse(hurst);
    switch (parse_process_kind(kind)) {
      case ProcessKind::FBM:
        return h.exact ? ProcessSpec::fbm(*h.exact, sigma, dim) : ProcessSpec::fbm(h.value, sigma, dim);
      case ProcessKind::SubFBM: {
        auto s = ProcessSpec::sub_fbm(h.value, dim);
        if (h.exact) s.hurst_exact = h.exact;
        return s;
      }
      case ProcessKind::BiFBM:
        return ProcessSpec::bi_fbm(hprime, bik, dim);
      case ProcessKind::CustomCovariance:
        break;
    }
    throw ConfigError("custom covariances are not available from the command line");
  }
};

std::vector<double> list_or(const std::string& text, int dim, double fill) {
  if (text.empty()) return std::vector<double>(static_cast<std::size_t>(dim), fill);
  auto v = parse_list(text);
  if (v.size() == 1 && dim > 1) v.assign(static_cast<std::size_t>(dim), v[0]);
  if (static_cast<int>(v.size()) != dim) throw ConfigError("list '" + text + "' does not have d entries");
  return v;
}

std::vector<Quantity> quantity_list(const std::string& text, int dim) {
  std::vector<Quantity> out;
  if (text.empty()) {
    out.assign(static_cast<std::size_t>(dim), Quantity(Rational(0)));
    return out;
  }
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) out.push_back(Quantity::parse(item));
  if (out.size() == 1 && dim > 1) out.assign(static_cast<std::size_t>(dim), out[0]);
  if (static_cast<int>(out.size()) != dim) throw ConfigError("k must have d entries");
  return out;
}

std::shared_ptr<const TestFunction> test_function(const std::string& name, int dim) {
  if (name == "p1") return std::make_shared<const TestFunction>(TestFunction::heat_kernel(dim));
  if (name == "flat_gaussian") return std::make_shared<const TestFunction>(TestFunction::flat_gaussian(dim));
  if (name == "odd_gaussian") {
    if (dim != 1) throw ConfigError("odd_gaussian is one-dimensional");
    return std::make_shared<const TestFunction>(TestFunction::odd_gaussian());
  }
  throw ConfigError("unknown test function " + name + " (p1 | flat_gaussian | odd_gaussian)");
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

struct ExperimentOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string records;
  std::string csv;
  unsigned workers = 0;

  void add(CLI::App* app) {
    app->add_option("--config", config_path, "experiment config file ([section] key = value)");
    app->add_option("--set", overrides, "override, section.key=value (repeatable)");
    app->add_option("--records", records, "append the record to this JSON-lines store");
    app->add_option("--csv", csv, "write a per-eps table");
    app->add_option("--workers", workers, "worker threads (0 = all cores)");
  }

  ExperimentConfig load() const {
    ConfigDocument doc = ConfigDocument::load(config_path);
    for (const auto& o : overrides) doc.set(o);
    if (!records.empty()) doc.set("output.records", records);
    if (!csv.empty()) doc.set("output.csv", csv);
    if (workers) doc.set("experiment.workers", std::to_string(workers));
    return experiment_config(doc);
  }
};

void print_record(const ExperimentRecord& r, std::ostream& out) {
  out << "kind: " << r.kind << "\nregime: " << r.regime << "\nconfig_hash: " << r.config_hash
      << "\npayload_hash: " << r.payload_hash << "\n";
  out << "gates:";
  for (const auto& [k, v] : r.gates) out << ' ' << k << '=' << (v ? "yes" : "no");
  out << "\nslope: " << num(r.slope) << " +- " << num(r.slope_se) << "\n";
  out << "eps";
  std::vector<std::string> cols;
  for (const auto& [k, v] : r.series)
    if (v.size() == r.rows.size()) cols.push_back(k);
  for (const auto& c : cols) out << '\t' << c;
  out << '\n';
  for (std::size_t j = 0; j < r.rows.size(); ++j) {
    out << num(r.rows[j].eps);
    for (const auto& c : cols) out << '\t' << num(r.series.at(c)[j]);
    out << '\n';
  }
  for (const auto& [k, v] : r.metrics) out << k << ": " << num(v) << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Smoothed local times of Gaussian processes: simulation, estimators, limit constants"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(LOCLIM_VERSION));

  // simulate
  auto* sim = app.add_subcommand("simulate", "sample a path and print it as CSV");
  ProcessOpts sim_p;
  sim_p.add(sim);
  double sim_t = 1.0;
  std::size_t sim_n = 1024;
  std::uint64_t sim_seed = 1, sim_rep = 0;
  std::string sim_method = "auto";
  sim->add_option("--T", sim_t, "horizon")->capture_default_str();
  sim->add_option("--n", sim_n, "grid steps")->capture_default_str();
  sim->add_option("--seed", sim_seed, "master seed")->capture_default_str();
  sim->add_option("--replicate", sim_rep, "replicate index")->capture_default_str();
  sim->add_option("--method", sim_method, "auto | circulant | cholesky")->capture_default_str();

  // estimate
  auto* est = app.add_subcommand("estimate", "smoothed local time L_eps^(k)(T, x) on one sampled path");
  ProcessOpts est_p;
  est_p.add(est);
  double est_eps = 0.01, est_t = 1.0;
  std::size_t est_n = 0;
  std::string est_x, est_k, est_rule = "trapezoid";
  std::uint64_t est_seed = 1, est_rep = 0;
  bool est_expected = false;
  est->add_option("--eps", est_eps, "smoothing parameter")->capture_default_str();
  est->add_option("--x", est_x, "level point, comma separated (default origin)");
  est->add_option("--k", est_k, "derivative order, comma separated (default 0)");
  est->add_option("--T", est_t, "horizon")->capture_default_str();
  est->add_option("--n", est_n, "grid steps (0 = recommended)")->capture_default_str();
  est->add_option("--rule", est_rule, "riemann | trapezoid | conditional")->capture_default_str();
  est->add_option("--seed", est_seed, "master seed")->capture_default_str();
  est->add_option("--replicate", est_rep, "replicate index")->capture_default_str();
  est->add_flag("--expected", est_expected, "also print E L_eps by quadrature");

  // constants
  auto* con = app.add_subcommand("constants", "evaluate a limiting constant");
  std::string con_name = "Dtilde1", con_h = "1/5", con_k, con_f = "p1";
  double con_sigma = 1.0;
  int con_d = 1, con_n = 2;
  con->add_option("--name", con_name, "constant name")->capture_default_str();
  con->add_option("--H", con_h, "Hurst index")->capture_default_str();
  con->add_option("--d", con_d, "dimension")->capture_default_str();
  con->add_option("--sigma", con_sigma, "increment variance scale")->capture_default_str();
  con->add_option("--k", con_k, "derivative order, comma separated");
  con->add_option("--N", con_n, "test-function order")->capture_default_str();
  con->add_option("--f", con_f, "p1 | flat_gaussian | odd_gaussian")->capture_default_str();

  // classify
  auto* cls = app.add_subcommand("classify", "regime and scaling factor for (H, k, d, N)");
  std::string cls_h = "1/3", cls_k;
  int cls_d = 1, cls_n = 2;
  cls->add_option("--H", cls_h, "Hurst index")->capture_default_str();
  cls->add_option("--d", cls_d, "dimension")->capture_default_str();
  cls->add_option("--k", cls_k, "derivative order, comma separated");
  cls->add_option("--N", cls_n, "test-function order")->capture_default_str();

  // rates / clt
  auto* rates = app.add_subcommand("rates", "convergence-rate experiment");
  ExperimentOpts rate_o;
  rate_o.add(rates);
  auto* clt = app.add_subcommand("clt", "fluctuation (mixed-normal) experiment");
  ExperimentOpts clt_o;
  clt_o.add(clt);

  // moments
  auto* mom = app.add_subcommand("moments", "mixed moments of W(L(., x)) increments");
  ProcessOpts mom_p;
  mom_p.add(mom);
  std::string mom_iv = "0:1", mom_m = "2", mom_x, mom_method = "formula";
  std::size_t mom_samples = 1 << 18, mom_reps = 10000, mom_steps = 1024;
  std::uint64_t mom_seed = 1;
  int mom_cap = 6;
  mom->add_option("--intervals", mom_iv, "a:b pairs, comma separated")->capture_default_str();
  mom->add_option("--m", mom_m, "exponents m_i, comma separated")->capture_default_str();
  mom->add_option("--x", mom_x, "level point");
  mom->add_option("--method", mom_method, "formula | simulation | both")->capture_default_str();
  mom->add_option("--samples", mom_samples, "formula draws")->capture_default_str();
  mom->add_option("--replicates", mom_reps, "simulation paths")->capture_default_str();
  mom->add_option("--n", mom_steps, "simulation grid steps")->capture_default_str();
  mom->add_option("--seed", mom_seed, "master seed")->capture_default_str();
  mom->add_option("--cap", mom_cap, "dimension cap for |m| d / 2")->capture_default_str();

  // verify-conditions
  auto* ver = app.add_subcommand("verify-conditions", "numerical checks of LND, (A), (B), (C)");
  ProcessOpts ver_p;
  ver_p.add(ver);
  std::string ver_c = "all";
  ver->add_option("--condition", ver_c, "LND | A | B | C | all")->capture_default_str();

  // report
  auto* rep = app.add_subcommand("report", "summarize a record store");
  std::string rep_path;
  bool rep_verify = false;
  rep->add_option("--records", rep_path, "JSON-lines record store")->required();
  rep->add_flag("--verify", rep_verify, "recompute payload hashes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << LOCLIM_VERSION << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return kConfigError;
  }

  try {
    if (*sim) {
      SamplingMethod method = SamplingMethod::Auto;
      if (sim_method == "circulant") method = SamplingMethod::Circulant;
      else if (sim_method == "cholesky") method = SamplingMethod::Cholesky;
      else if (sim_method != "auto") throw ConfigError("unknown method " + sim_method);
      const PathSampler sampler(sim_p.spec(), sim_t, sim_n, method);
      const auto path = sampler.sample(sim_seed, sim_rep);
      out << "t";
      for (int l = 0; l < path.dim(); ++l) out << ",x" << l + 1;
      out << '\n';
      for (std::size_t i = 0; i <= path.steps; ++i) {
        out << format_double(path.time(i));
        for (int l = 0; l < path.dim(); ++l) out << ',' << format_double(path.values(l, static_cast<Eigen::Index>(i)));
        out << '\n';
      }
    } else if (*est) {
      const auto spec = est_p.spec();
      EstimatorConfig cfg;
      cfg.epsilon = est_eps;
      cfg.level = list_or(est_x, spec.dim, 0.0);
      cfg.k = MultiIndex(list_or(est_k, spec.dim, 0.0));
      cfg.horizon = est_t;
      cfg.rule = parse_integration_rule(est_rule);
      const std::size_t n = est_n ? est_n : recommended_steps(spec.hurst, est_eps, est_t);
      const auto path = sample_path(spec, est_t, n, est_seed, est_rep);
      const auto v = estimate(path, cfg);
      out << "value: " << num(v.value) << "\nsteps: " << v.steps_used << "\nexistence_gate: "
          << (v.existence_gate ? "yes" : "no") << '\n';
      if (est_expected) out << "expected: " << num(expected_estimate(spec, cfg)) << '\n';
    } else if (*con) {
      ConstantParams p;
      p.hurst = Quantity::parse(con_h);
      p.dim = con_d;
      p.sigma = con_sigma;
      p.k = MultiIndex(list_or(con_k, con_d, 0.0));
      p.order_n = con_n;
      p.f = test_function(con_f, con_d);
      const auto c = constant(parse_constant_name(con_name), p);
      out << to_string(c.name) << " = " << num(c.value) << "\nquadrature residual: " << std::setprecision(3)
          << c.error << '\n';
      for (const auto& t : c.lp_terms) {
        out << "alpha=(";
        for (std::size_t i = 0; i < t.alpha.size(); ++i) out << (i ? "," : "") << t.alpha[i];
        out << ") moment=" << num(t.moment) << " coefficient=" << num(t.coefficient.real())
            << (t.coefficient.imag() != 0.0 ? "+" + num(t.coefficient.imag()) + "i" : "")
            << " derivative_coefficient=" << num(t.derivative_coefficient) << '\n';
      }
    } else if (*cls) {
      const auto r = classify(Quantity::parse(cls_h), quantity_list(cls_k, cls_d), cls_d, cls_n);
      out << r.summary() << '\n';
    } else if (*rates || *clt) {
      const auto& o = *rates ? rate_o : clt_o;
      if (o.config_path.empty()) {
        err << (*rates ? rates->help() : clt->help());
        return kConfigError;
      }
      const auto cfg = o.load();
      const auto rec = *rates ? run_rate_experiment(cfg) : run_clt_experiment(cfg);
      persist(cfg, rec);
      print_record(rec, out);
    } else if (*mom) {
      MomentQuery q;
      q.spec = mom_p.spec();
      std::string item;
      std::istringstream in(mom_iv);
      while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("interval must be a:b, got " + item);
        q.intervals.emplace_back(Quantity::parse(item.substr(0, colon)).value,
                                 Quantity::parse(item.substr(colon + 1)).value);
      }
      for (double v : parse_list(mom_m)) q.m.push_back(static_cast<int>(v));
      if (!mom_x.empty()) q.level = list_or(mom_x, q.spec.dim, 0.0);
      if (mom_method == "formula" || mom_method == "both") {
        FormulaBudget b;
        b.samples = mom_samples;
        b.seed = mom_seed;
        b.dimension_cap = mom_cap;
        const auto r = moment_formula(q, b);
        out << "FORMULA_MC: " << num(r.value) << " +- " << num(r.standard_error) << '\n';
      }
      if (mom_method == "simulation" || mom_method == "both") {
        SimulationBudget b;
        b.replicates = mom_reps;
        b.steps = mom_steps;
        b.seed = mom_seed;
        const auto r = moment_simulated(q, b);
        out << "SIMULATION_MC: " << num(r.value) << " +- " << num(r.standard_error) << '\n';
      }
      if (mom_method != "formula" && mom_method != "simulation" && mom_method != "both")
        throw ConfigError("unknown method " + mom_method);
    } else if (*ver) {
      const auto spec = ver_p.spec();
      std::vector<Condition> which;
      if (ver_c == "all") which = {Condition::LND, Condition::StrongLND_A, Condition::VarianceEnvelope_B, Condition::Decorrelation_C};
      else which = {parse_condition(ver_c)};
      bool all = true;
      for (auto c : which) {
        const auto r = check_condition(spec, c);
        all = all && r.pass;
        out << to_string(c) << ": " << (r.pass ? "pass" : "fail") << " worst=" << num(r.worst_ratio);
        if (c == Condition::VarianceEnvelope_B) out << " sigma=" << num(r.sigma_estimate);
        if (r.skipped) out << " skipped=" << r.skipped;
        out << "  [" << r.grid << "]\n";
      }
      return all ? kOk : kFailure;
    } else if (*rep) {
      const RecordStore store(rep_path);
      const auto recs = store.read_all();
      bool ok = true;
      for (std::size_t i = 0; i < recs.size(); ++i) {
        out << "== record " << i + 1 << " (" << recs[i].started_at << ")\n";
        print_record(recs[i], out);
        if (rep_verify) {
          const bool same = recs[i].compute_payload_hash() == recs[i].payload_hash;
          ok = ok && same;
          out << "hash check: " << (same ? "ok" : "MISMATCH") << '\n';
        }
      }
      return ok ? kOk : kFailure;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ParameterDomainError& e) {
    err << "parameter error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ShapeError& e) {
    err << "shape error: " << e.what() << '\n';
    return kConfigError;
  } catch (const AccuracyError& e) {
    err << "accuracy error: " << e.what() << '\n';
    return kAccuracyError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}

}  // namespace loclim::cli
