#include "smab/experiment_io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "smab/errors.hpp"

namespace smab {
namespace {

using nlohmann::ordered_json;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ordered_json experiment_doc(const Experiment& e) {
  ordered_json d;
  d["schema_version"] = kSchemaVersion;
  d["algorithm"] = e.algorithm;
  d["instance"] = e.instance;
  d["n"] = e.n;
  d["m"] = e.m;
  d["P"] = e.passes;
  d["T"] = e.horizon;
  d["reps"] = e.reps;
  d["seed"] = e.seed;
  d["jobs"] = e.jobs;
  d["gap"] = e.gap;
  d["hard_j"] = e.hard_j;
  d["hard_level"] = e.hard_level;
  d["c1"] = e.c1;
  d["delta"] = e.delta;
  d["eps"] = e.eps;
  d["levels"] = e.levels;
  d["eps0"] = e.eps0;
  d["eps1"] = e.eps1;
  d["explore_only"] = e.explore_only;
  d["out"] = e.out;
  return d;
}

template <typename T>
T read_as(const nlohmann::json& v, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError("");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError("");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError("");
    }
    return v.get<T>();
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

template <typename T>
std::vector<T> read_list(const nlohmann::json& v, const std::string& key) {
  if (!v.is_array()) return {read_as<T>(v, key)};
  std::vector<T> out;
  for (const auto& item : v) out.push_back(read_as<T>(item, key));
  return out;
}

void set_key(Experiment& e, const std::string& key, const nlohmann::json& v) {
  if (key == "schema_version") {
    if (read_as<int>(v, key) != kSchemaVersion) {
      throw ConfigError("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
    }
  } else if (key == "algorithm") e.algorithm = read_as<std::string>(v, key);
  else if (key == "instance") e.instance = read_as<std::string>(v, key);
  else if (key == "n") e.n = read_list<int>(v, key);
  else if (key == "m") e.m = read_list<int>(v, key);
  else if (key == "P") e.passes = read_list<int>(v, key);
  else if (key == "T") e.horizon = read_list<Rounds>(v, key);
  else if (key == "reps") e.reps = read_as<int>(v, key);
  else if (key == "seed") e.seed = read_as<Seed>(v, key);
  else if (key == "jobs") e.jobs = read_as<int>(v, key);
  else if (key == "gap") e.gap = read_as<double>(v, key);
  else if (key == "hard_j") e.hard_j = read_as<int>(v, key);
  else if (key == "hard_level") e.hard_level = read_as<int>(v, key);
  else if (key == "c1") e.c1 = read_as<double>(v, key);
  else if (key == "delta") e.delta = read_as<double>(v, key);
  else if (key == "eps") e.eps = read_as<double>(v, key);
  else if (key == "levels") e.levels = read_as<int>(v, key);
  else if (key == "eps0") e.eps0 = read_as<double>(v, key);
  else if (key == "eps1") e.eps1 = read_as<double>(v, key);
  else if (key == "explore_only") e.explore_only = read_as<bool>(v, key);
  else if (key == "out") e.out = read_as<std::string>(v, key);
  else throw ConfigError("unknown config key '" + key + "'");
}

bool is_list_key(const std::string& key) { return key == "n" || key == "m" || key == "P" || key == "T"; }

nlohmann::json parse_scalar(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    return nlohmann::json(text);  // bare string
  }
}

ordered_json stat_doc(const Stat& s) {
  ordered_json d;
  d["mean"] = s.mean;
  d["se"] = s.se;
  d["count"] = s.count;
  return d;
}

}  // namespace

std::string experiment_to_json(const Experiment& exp) { return experiment_doc(exp).dump(); }

Experiment experiment_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  Experiment exp;
  for (const auto& [key, value] : doc.items()) set_key(exp, key, value);
  return exp;
}

void apply_override(Experiment& exp, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  if (is_list_key(key)) {
    nlohmann::json list = nlohmann::json::array();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) list.push_back(parse_scalar(item));
    set_key(exp, key, list);
  } else {
    set_key(exp, key, parse_scalar(value));
  }
}

std::string summary_csv(const Summary& s) {
  std::ostringstream out;
  out << "# config: " << experiment_to_json(s.experiment) << "\n";
  int max_passes = 0;
  for (const auto& p : s.points) max_passes = std::max(max_passes, p.point.passes);
  out << "schema_version,run_id,algorithm,n,m,P,T,seed,pseudo_regret";
  for (int p = 1; p <= max_passes; ++p) out << ",L_" << p;
  out << ",violation\n";
  for (std::size_t i = 0; i < s.runs.size(); ++i) {
    const RunOutcome& r = s.runs[i];
    const GridPoint& g = s.points[static_cast<std::size_t>(r.point)].point;
    out << kSchemaVersion << ',' << i << ',' << to_string(g.algorithm) << ',' << g.n << ','
        << g.m << ',' << g.passes << ',' << g.horizon << ',' << r.seed << ','
        << fmt(r.pseudo_regret);
    for (int p = 0; p < max_passes; ++p) {
      out << ',';
      if (p < static_cast<int>(r.pass_rounds.size())) out << r.pass_rounds[static_cast<std::size_t>(p)];
    }
    out << ',' << ((r.violation || !r.error.empty()) ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string summary_json(const Summary& s) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["config"] = experiment_doc(s.experiment);
  doc["seed"] = s.experiment.seed;
  ordered_json points = ordered_json::array();
  for (const auto& p : s.points) {
    ordered_json d;
    d["algorithm"] = to_string(p.point.algorithm);
    d["n"] = p.point.n;
    d["m"] = p.point.m;
    d["P"] = p.point.passes;
    d["T"] = p.point.horizon;
    d["reps"] = p.reps;
    d["regret"] = stat_doc(p.regret);
    if (s.experiment.instance == "hard-worst") d["worst_j"] = p.worst_variant;
    d["mean_pass_rounds"] = p.mean_pass_rounds;
    d["violations"] = p.violations;
    d["truncated"] = p.truncated;
    ordered_json kings = ordered_json::array();
    for (const auto& k : p.king_gap) kings.push_back(stat_doc(k));
    d["king_gap"] = kings;
    if (p.output_gap) d["output_gap"] = stat_doc(*p.output_gap);
    if (p.sample_bound > 0) {
      d["max_samples"] = p.max_samples;
      d["sample_bound"] = p.sample_bound;
    }
    points.push_back(d);
  }
  doc["points"] = points;
  ordered_json fits = ordered_json::array();
  for (const auto& f : s.fits) {
    ordered_json d;
    d["algorithm"] = to_string(f.algorithm);
    d["n"] = f.n;
    d["m"] = f.m;
    d["P"] = f.passes;
    d["slope"] = f.fit.slope;
    d["stderr"] = f.fit.stderr_;
    d["intercept"] = f.fit.intercept;
    d["points_used"] = f.fit.used;
    d["target"] = f.target;
    fits.push_back(d);
  }
  doc["fits"] = fits;
  doc["warnings"] = s.warnings;
  return doc.dump(2) + "\n";
}

}  // namespace smab
