#include "loclim/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "loclim/errors.hpp"

namespace loclim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double number(const std::string& key, const std::string& text) {
  try {
    return Quantity::parse(text).value;
  } catch (const ConfigError&) {
    throw ConfigError("key " + key + ": not a number: " + text);
  }
}

long long integer(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("key " + key + ": not an integer: " + text);
  }
  if (used != text.size()) throw ConfigError("key " + key + ": not an integer: " + text);
  return v;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ConfigDocument ConfigDocument::parse(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  ConfigDocument doc;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config key outside a [section]: " + section);
    for (const auto& [key, value] : body) doc.set(section + "." + key, trim(value.data()));
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void ConfigDocument::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override must look like section.key=value: " + assignment);
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void ConfigDocument::set(const std::string& key, const std::string& value) {
  if (key.find('.') == std::string::npos) throw ConfigError("config key must be section.key: " + key);
  entries_[key] = value;
}

bool ConfigDocument::has(const std::string& key) const { return entries_.count(key) != 0; }

const std::string& ConfigDocument::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing config key " + key);
  return it->second;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(number("list", item));
  }
  return out;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "process.kind",          "process.H",              "process.sigma",
      "process.d",             "process.hprime",         "process.K",
      "estimator.level",       "estimator.k",            "estimator.T",
      "estimator.steps",       "estimator.rule",         "estimator.bridge_nodes",
      "estimator.proxy_rule",  "experiment.eps0",        "experiment.eps_ratio",
      "experiment.eps_count",  "experiment.eps_ref",     "experiment.proxy_ratio",
      "experiment.replicates", "experiment.N",           "experiment.f",
      "experiment.seed",       "experiment.workers",     "experiment.bootstrap",
      "experiment.tightness_start", "experiment.tightness_gaps", "output.records",
      "output.csv",
  };
  return keys;
}

ExperimentConfig experiment_config(const ConfigDocument& doc) {
  const auto& keys = config_keys();
  for (const auto& [k, v] : doc.entries()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw ConfigError("unknown config key: " + k);
  }
  auto opt = [&](const std::string& k) -> const std::string* { return doc.has(k) ? &doc.get(k) : nullptr; };

  ExperimentConfig c;
  const std::string kind = opt("process.kind") ? *opt("process.kind") : "fbm";
  const int dim = opt("process.d") ? static_cast<int>(integer("process.d", *opt("process.d"))) : 1;
  const double sigma = opt("process.sigma") ? number("process.sigma", *opt("process.sigma")) : 1.0;
  Quantity h(0.5);
  if (opt("process.H")) h = Quantity::parse(*opt("process.H"));
  try {
    switch (parse_process_kind(kind)) {
      case ProcessKind::FBM:
        c.spec = h.exact ? ProcessSpec::fbm(*h.exact, sigma, dim) : ProcessSpec::fbm(h.value, sigma, dim);
        break;
      case ProcessKind::SubFBM:
        c.spec = ProcessSpec::sub_fbm(h.value, dim);
        if (h.exact) c.spec.hurst_exact = h.exact;
        break;
      case ProcessKind::BiFBM: {
        const double hp = opt("process.hprime") ? number("process.hprime", *opt("process.hprime")) : h.value;
        const double kk = opt("process.K") ? number("process.K", *opt("process.K")) : 1.0;
        c.spec = ProcessSpec::bi_fbm(hp, kk, dim);
        break;
      }
      case ProcessKind::CustomCovariance:
        throw ConfigError("custom covariances cannot be configured from text");
    }
  } catch (const ParameterDomainError& e) {
    throw ConfigError(std::string("process: ") + e.what());
  }

  auto& est = c.estimator;
  if (auto* v = opt("estimator.level")) est.level = parse_list(*v);
  if (auto* v = opt("estimator.k")) est.k = MultiIndex(parse_list(*v));
  if (auto* v = opt("estimator.T")) est.horizon = number("estimator.T", *v);
  if (auto* v = opt("estimator.steps")) est.steps = static_cast<std::size_t>(integer("estimator.steps", *v));
  if (auto* v = opt("estimator.rule")) est.rule = parse_integration_rule(*v);
  if (auto* v = opt("estimator.bridge_nodes")) est.bridge_nodes = static_cast<int>(integer("estimator.bridge_nodes", *v));
  if (auto* v = opt("estimator.proxy_rule")) c.proxy_rule = parse_integration_rule(*v);

  if (auto* v = opt("experiment.eps0")) c.eps0 = number("experiment.eps0", *v);
  if (auto* v = opt("experiment.eps_ratio")) c.eps_ratio = number("experiment.eps_ratio", *v);
  if (auto* v = opt("experiment.eps_count")) c.eps_count = static_cast<int>(integer("experiment.eps_count", *v));
  if (auto* v = opt("experiment.eps_ref")) c.eps_ref = number("experiment.eps_ref", *v);
  if (auto* v = opt("experiment.proxy_ratio")) c.proxy_ratio = number("experiment.proxy_ratio", *v);
  if (auto* v = opt("experiment.replicates")) {
    const auto m = integer("experiment.replicates", *v);
    if (m < 0) throw ConfigError("experiment.replicates must be non-negative");
    c.replicates = static_cast<std::size_t>(m);
  }
  if (auto* v = opt("experiment.N")) c.order_n = static_cast<int>(integer("experiment.N", *v));
  if (auto* v = opt("experiment.f")) c.test_function = *v;
  if (auto* v = opt("experiment.seed")) c.seed = static_cast<std::uint64_t>(integer("experiment.seed", *v));
  if (auto* v = opt("experiment.workers")) c.workers = static_cast<unsigned>(integer("experiment.workers", *v));
  if (auto* v = opt("experiment.bootstrap")) c.bootstrap = static_cast<std::size_t>(integer("experiment.bootstrap", *v));
  if (auto* v = opt("experiment.tightness_start")) c.tightness_start = number("experiment.tightness_start", *v);
  if (auto* v = opt("experiment.tightness_gaps")) c.tightness_gaps = parse_list(*v);
  if (auto* v = opt("output.records")) c.records_path = *v;
  if (auto* v = opt("output.csv")) c.csv_path = *v;
  c.validate();
  return c;
}

std::vector<double> ExperimentConfig::eps_grid() const {
  std::vector<double> g;
  double e = eps0;
  for (int i = 0; i < eps_count; ++i) {
    g.push_back(e);
    e *= eps_ratio;
  }
  return g;
}

void ExperimentConfig::validate() const {
  if (!(eps0 > 0.0)) throw ConfigError("eps0 must be positive");
  if (!(eps_ratio > 0.0 && eps_ratio < 1.0)) throw ConfigError("eps_ratio must lie in (0,1) for a decreasing grid");
  if (eps_count < 1) throw ConfigError("eps_count must be >= 1");
  if (replicates < 2) throw ConfigError("at least 2 replicates are required");
  if (!(eps_ref > 0.0)) throw ConfigError("eps_ref must be positive");
  if (proxy_ratio < 0.0 || proxy_ratio >= 1.0) throw ConfigError("proxy_ratio must lie in [0,1)");
  if (order_n < 1) throw ConfigError("N must be >= 1");
  if (test_function != "p1") throw ConfigError("experiments support f = p1 only (got " + test_function + ")");
  if (order_n != 2) throw ConfigError("f = p1 has order N = 2");
  if (!(estimator.horizon > 0.0)) throw ConfigError("T must be positive");
  if (!estimator.level.empty() && static_cast<int>(estimator.level.size()) != spec.dim)
    throw ConfigError("estimator.level has the wrong dimension");
  if (estimator.k.dim() != 0 && estimator.k.dim() != spec.dim) throw ConfigError("estimator.k has the wrong dimension");
  if (bootstrap < 2) throw ConfigError("bootstrap needs >= 2 resamples");
  double prev = 0.0;
  for (double g : tightness_gaps) {
    if (!(g > prev)) throw ConfigError("tightness gaps must be positive and increasing");
    prev = g;
  }
  if (!tightness_gaps.empty() && tightness_start + tightness_gaps.back() > estimator.horizon * (1 + 1e-12))
    throw ConfigError("tightness window exceeds T");
  if (tightness_start < 0.0) throw ConfigError("tightness_start must be >= 0");
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  os << "kind=" << to_string(spec.kind) << ";H=" << spec.hurst_quantity().to_string() << ";sigma=" << fmt(spec.sigma)
     << ";d=" << spec.dim << ";hprime=" << fmt(spec.bifbm_hprime) << ";K=" << fmt(spec.bifbm_k);
  os << ";level=";
  for (double v : estimator.level_for(spec.dim)) os << fmt(v) << ',';
  os << ";k=" << estimator.order_for(spec.dim).to_string() << ";T=" << fmt(estimator.horizon)
     << ";steps=" << estimator.steps << ";rule=" << to_string(estimator.rule)
     << ";bridge_nodes=" << estimator.bridge_nodes << ";proxy_rule=" << to_string(proxy_rule);
  os << ";eps0=" << fmt(eps0) << ";eps_ratio=" << fmt(eps_ratio) << ";eps_count=" << eps_count
     << ";eps_ref=" << fmt(eps_ref) << ";proxy_ratio=" << fmt(proxy_ratio) << ";M=" << replicates
     << ";N=" << order_n << ";f=" << test_function << ";seed=" << seed << ";bootstrap=" << bootstrap
     << ";t0=" << fmt(tightness_start) << ";gaps=";
  for (double g : tightness_gaps) os << fmt(g) << ',';
  return os.str();
}

}  // namespace loclim
