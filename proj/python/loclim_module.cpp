#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <string>
#include <vector>

#include "loclim/errors.hpp"
#include "loclim/heat_kernel.hpp"
#include "loclim/limits.hpp"
#include "loclim/local_time.hpp"
#include "loclim/oracles.hpp"
#include "loclim/process.hpp"

namespace py = pybind11;
using namespace loclim;

namespace {

// H may be passed as a float or as a string such as "1/3" (kept exact).
Quantity to_quantity(const py::object& h) {
  if (py::isinstance<py::str>(h)) return Quantity::parse(h.cast<std::string>());
  return Quantity(h.cast<double>());
}

ProcessSpec make_spec(const std::string& kind, const py::object& hurst, double sigma, int dim) {
  const Quantity h = to_quantity(hurst);
  switch (parse_process_kind(kind)) {
    case ProcessKind::FBM:
      return h.exact ? ProcessSpec::fbm(*h.exact, sigma, dim) : ProcessSpec::fbm(h.value, sigma, dim);
    case ProcessKind::SubFBM: {
      auto s = ProcessSpec::sub_fbm(h.value, dim);
      if (h.exact) s.hurst_exact = h.exact;
      return s;
    }
    default:
      throw ConfigError("kind must be fbm or sfbm here");
  }
}

std::shared_ptr<const TestFunction> builtin_function(const std::string& name, int dim) {
  if (name == "p1") return std::make_shared<const TestFunction>(TestFunction::heat_kernel(dim));
  if (name == "flat_gaussian") return std::make_shared<const TestFunction>(TestFunction::flat_gaussian(dim));
  if (name == "odd_gaussian") return std::make_shared<const TestFunction>(TestFunction::odd_gaussian());
  throw ConfigError("unknown test function " + name);
}

MultiIndex index_or_zero(const std::vector<double>& k, int dim) {
  return k.empty() ? MultiIndex::zero(dim) : MultiIndex(k);
}

EstimatorConfig estimator(double eps, const std::vector<double>& level, const std::vector<double>& k, double horizon,
                          std::size_t steps, const std::string& rule) {
  EstimatorConfig cfg;
  cfg.epsilon = eps;
  cfg.level = level;
  if (!k.empty()) cfg.k = MultiIndex(k);
  cfg.horizon = horizon;
  cfg.steps = steps;
  cfg.rule = parse_integration_rule(rule);
  return cfg;
}

MomentQuery moment_query(const std::vector<std::pair<double, double>>& intervals, const std::vector<int>& m,
                         const py::object& hurst, int dim) {
  MomentQuery q;
  q.intervals = intervals;
  q.m = m;
  q.spec = make_spec("fbm", hurst, 1.0, dim);
  return q;
}

py::dict moment_dict(const MomentResult& r) {
  py::dict d;
  d["value"] = r.value;
  d["standard_error"] = r.standard_error;
  d["method"] = to_string(r.method);
  d["samples"] = r.samples;
  return d;
}

}  // namespace

PYBIND11_MODULE(_loclim, m) {
  m.doc() = "Smoothed local-time estimators of Gaussian self-similar processes";
  m.attr("__version__") = LOCLIM_VERSION;

  py::register_exception<AccuracyError>(m, "AccuracyError", PyExc_RuntimeError);
  py::register_exception<ParameterDomainError>(m, "ParameterDomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);

  m.def(
      "classify",
      [](const py::object& hurst, const std::vector<py::object>& k, int dim, int order_n) {
        std::vector<Quantity> kq;
        for (const auto& v : k) kq.push_back(to_quantity(v));
        if (kq.empty()) kq.assign(static_cast<std::size_t>(dim), Quantity(Rational(0)));
        const RegimeReport r = classify(to_quantity(hurst), kq, dim, order_n);
        py::dict d;
        d["regime"] = to_string(r.regime);
        d["lhs"] = r.lhs;
        d["lp_threshold"] = r.lp_threshold;
        d["exact_inputs"] = r.exact_inputs;
        d["boundary_exact"] = r.boundary_exact;
        d["exponent"] = r.scaling.exponent;
        d["has_log"] = r.scaling.has_log;
        d["constant"] = r.constant_name;
        d["summary"] = r.summary();
        return d;
      },
      py::arg("H"), py::arg("k") = std::vector<py::object>{}, py::arg("d") = 1, py::arg("N") = 2);

  m.def(
      "constant",
      [](const std::string& name, const py::object& hurst, int dim, double sigma, const std::vector<double>& k,
         int order_n, const std::string& f) {
        ConstantParams p;
        p.hurst = to_quantity(hurst);
        p.sigma = sigma;
        p.dim = dim;
        p.k = index_or_zero(k, dim);
        p.order_n = order_n;
        p.f = builtin_function(f, dim);
        const LimitConstant c = constant(parse_constant_name(name), p);
        py::dict d;
        d["name"] = to_string(c.name);
        d["value"] = c.value;
        d["error"] = c.error;
        py::list terms;
        for (const auto& t : c.lp_terms) {
          py::dict td;
          td["alpha"] = t.alpha;
          td["moment"] = t.moment;
          td["coefficient"] = t.coefficient;
          td["derivative_coefficient"] = t.derivative_coefficient;
          terms.append(td);
        }
        d["lp_terms"] = terms;
        return d;
      },
      py::arg("name"), py::arg("H"), py::arg("d") = 1, py::arg("sigma") = 1.0, py::arg("k") = std::vector<double>{},
      py::arg("N") = 2, py::arg("f") = "p1");

  m.def(
      "sample_path",
      [](const py::object& hurst, std::size_t steps, std::uint64_t seed, std::uint64_t replicate, double horizon,
         int dim, const std::string& kind, double sigma) {
        const PathSample p = sample_path(make_spec(kind, hurst, sigma, dim), horizon, steps, seed, replicate);
        py::array_t<double> out({p.values.rows(), p.values.cols()});
        std::copy(p.values.data(), p.values.data() + p.values.size(), out.mutable_data());
        return out;
      },
      py::arg("H"), py::arg("steps"), py::arg("seed"), py::arg("replicate") = 0, py::arg("T") = 1.0,
      py::arg("d") = 1, py::arg("kind") = "fbm", py::arg("sigma") = 1.0,
      "Path values on the uniform grid, shape (d, steps + 1).");

  m.def(
      "estimate",
      [](const py::object& hurst, double eps, std::uint64_t seed, std::uint64_t replicate, std::size_t steps,
         const std::vector<double>& level, const std::vector<double>& k, double horizon, const std::string& rule,
         int dim, const std::string& kind) {
        const EstimatorConfig cfg = estimator(eps, level, k, horizon, steps, rule);
        const ProcessSpec spec = make_spec(kind, hurst, 1.0, dim);
        const std::size_t n = steps ? steps : recommended_steps(spec.hurst, eps, horizon);
        const PathSample path = sample_path(spec, horizon, n, seed, replicate);
        return estimate(path, cfg).value;
      },
      py::arg("H"), py::arg("eps"), py::arg("seed"), py::arg("replicate") = 0, py::arg("steps") = 0,
      py::arg("level") = std::vector<double>{}, py::arg("k") = std::vector<double>{}, py::arg("T") = 1.0,
      py::arg("rule") = "trapezoid", py::arg("d") = 1, py::arg("kind") = "fbm",
      "L_eps^(k)(T, x) on one sampled path.");

  m.def(
      "expected_estimate",
      [](const py::object& hurst, double eps, const std::vector<double>& level, const std::vector<double>& k,
         double horizon, int dim, const std::string& kind) {
        const EstimatorConfig cfg = estimator(eps, level, k, horizon, 0, "trapezoid");
        return expected_estimate(make_spec(kind, hurst, 1.0, dim), cfg);
      },
      py::arg("H"), py::arg("eps"), py::arg("level") = std::vector<double>{}, py::arg("k") = std::vector<double>{},
      py::arg("T") = 1.0, py::arg("d") = 1, py::arg("kind") = "fbm");

  m.def(
      "heat_kernel_deriv",
      [](const std::vector<double>& x, double eps, const std::vector<double>& k, const std::string& method) {
        KernelOptions opt;
        if (method == "fourier") opt.method = KernelMethod::Fourier;
        else if (method != "auto") throw ConfigError("method must be auto or fourier");
        return heat_kernel_deriv(x, eps, index_or_zero(k, static_cast<int>(x.size())), opt);
      },
      py::arg("x"), py::arg("eps"), py::arg("k") = std::vector<double>{}, py::arg("method") = "auto");

  m.def(
      "moment_formula",
      [](const std::vector<std::pair<double, double>>& intervals, const std::vector<int>& mm, const py::object& hurst,
         int dim, std::size_t samples, std::uint64_t seed) {
        FormulaBudget b;
        b.samples = samples;
        b.seed = seed;
        const MomentQuery q = moment_query(intervals, mm, hurst, dim);
        MomentResult r;
        {
          py::gil_scoped_release release;
          r = moment_formula(q, b);
        }
        return moment_dict(r);
      },
      py::arg("intervals"), py::arg("m"), py::arg("H") = 0.5, py::arg("d") = 1, py::arg("samples") = 1 << 16,
      py::arg("seed") = 1);

  m.def(
      "moment_simulated",
      [](const std::vector<std::pair<double, double>>& intervals, const std::vector<int>& mm, const py::object& hurst,
         int dim, std::size_t replicates, std::size_t steps, std::uint64_t seed) {
        SimulationBudget b;
        b.replicates = replicates;
        b.steps = steps;
        b.seed = seed;
        const MomentQuery q = moment_query(intervals, mm, hurst, dim);
        MomentResult r;
        {
          py::gil_scoped_release release;
          r = moment_simulated(q, b);
        }
        return moment_dict(r);
      },
      py::arg("intervals"), py::arg("m"), py::arg("H") = 0.5, py::arg("d") = 1, py::arg("replicates") = 1000,
      py::arg("steps") = 256, py::arg("seed") = 1);
}
