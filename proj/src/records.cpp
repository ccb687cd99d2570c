#include "loclim/records.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>

#include "loclim/errors.hpp"

namespace loclim {

namespace {

using nlohmann::json;

// NaN and infinities have no JSON literal; store them as strings.
json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double read_num(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    throw ConfigError("record: bad number " + s);
  }
  return j.get<double>();
}

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::vector<double> read_nums(const json& j) {
  std::vector<double> v;
  for (const auto& x : j) v.push_back(read_num(x));
  return v;
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json ExperimentRecord::payload() const {
  json j;
  j["kind"] = kind;
  j["config"] = config;
  j["config_hash"] = config_hash;
  j["regime"] = regime;
  j["boundary_exact"] = boundary_exact;
  j["gates"] = gates;
  json rs = json::array();
  for (const auto& r : rows) rs.push_back({{"eps", num(r.eps)}, {"values", nums(r.values)}});
  j["rows"] = rs;
  j["slope"] = num(slope);
  j["slope_se"] = num(slope_se);
  json m = json::object();
  for (const auto& [k, v] : metrics) m[k] = num(v);
  j["metrics"] = m;
  json s = json::object();
  for (const auto& [k, v] : series) s[k] = nums(v);
  j["series"] = s;
  j["version"] = version;
  return j;
}

json ExperimentRecord::to_json() const {
  json j = payload();
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  j["payload_hash"] = payload_hash;
  return j;
}

ExperimentRecord ExperimentRecord::from_json(const json& j) {
  ExperimentRecord r;
  try {
    r.kind = j.at("kind").get<std::string>();
    r.config = j.at("config").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.regime = j.at("regime").get<std::string>();
    r.boundary_exact = j.at("boundary_exact").get<bool>();
    r.gates = j.at("gates").get<std::map<std::string, bool>>();
    for (const auto& row : j.at("rows")) r.rows.push_back({read_num(row.at("eps")), read_nums(row.at("values"))});
    r.slope = read_num(j.at("slope"));
    r.slope_se = read_num(j.at("slope_se"));
    for (const auto& [k, v] : j.at("metrics").items()) r.metrics[k] = read_num(v);
    for (const auto& [k, v] : j.at("series").items()) r.series[k] = read_nums(v);
    r.version = j.at("version").get<std::string>();
    r.started_at = j.value("started_at", "");
    r.finished_at = j.value("finished_at", "");
    r.payload_hash = j.value("payload_hash", "");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed record: ") + e.what());
  }
  return r;
}

std::string ExperimentRecord::compute_payload_hash() const { return fnv1a_hex(payload().dump()); }

void ExperimentRecord::seal() { payload_hash = compute_payload_hash(); }

RecordStore::RecordStore(std::string path) : path_(std::move(path)) {}

void RecordStore::append(const ExperimentRecord& rec) {
  std::lock_guard lock(mutex_);
  std::ofstream out(path_, std::ios::app);
  if (!out) throw ConfigError("cannot open record store " + path_);
  out << rec.to_json().dump() << '\n';
  out.flush();
  if (!out) throw ConfigError("write to record store failed: " + path_);
}

std::vector<ExperimentRecord> RecordStore::read_all() const {
  std::lock_guard lock(mutex_);
  std::vector<ExperimentRecord> out;
  std::ifstream in(path_);
  if (!in) return out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ConfigError(path_ + ":" + std::to_string(n) + ": " + e.what());
    }
    out.push_back(ExperimentRecord::from_json(j));
  }
  return out;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_double(r[i]);
    out << '\n';
  }
}

}  // namespace loclim
