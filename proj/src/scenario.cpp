#include "sumrate/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "sumrate/errors.hpp"

namespace sumrate {

using nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw DomainError("scenario field '" + field + "': " + what);
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) field_error(field, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) field_error(field, "must be finite");
  return x;
}

VectorXd vector_of(const json& j, Index n, const std::string& field) {
  if (!j.is_array() || static_cast<Index>(j.size()) != n) {
    field_error(field, "expected an array of " + std::to_string(n) + " numbers");
  }
  VectorXd out(n);
  for (Index i = 0; i < n; ++i) {
    out[i] = number(j[static_cast<std::size_t>(i)],
                    field + "[" + std::to_string(i) + "]");
  }
  return out;
}

MatrixXd matrix_of(const json& j, Index rows, Index cols,
                   const std::string& field) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows) {
    field_error(field, "expected " + std::to_string(rows) + " rows");
  }
  MatrixXd out(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    out.row(r) = vector_of(j[static_cast<std::size_t>(r)], cols,
                           field + "[" + std::to_string(r) + "]")
                     .transpose();
  }
  return out;
}

json vector_json(const VectorXd& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json matrix_json(const MatrixXd& m) {
  json out = json::array();
  for (Index r = 0; r < m.rows(); ++r) out.push_back(vector_json(m.row(r).transpose()));
  return out;
}

std::string unit_of(const json& j, const char* key, const char* fallback,
                    std::initializer_list<const char*> allowed) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) field_error(key, "expected a string");
  const std::string u = j[key].get<std::string>();
  std::string list;
  for (const char* a : allowed) {
    if (u == a) return u;
    list += list.empty() ? a : std::string(", ") + a;
  }
  field_error(key, "unknown unit '" + u + "'; valid: " + list);
}

double from_decibel(double db) { return std::pow(10.0, db / 10.0); }

SolverSettings parse_solver(const json& j) {
  SolverSettings s;
  if (!j.is_object()) field_error("solver", "expected an object");
  for (const auto& [key, value] : j.items()) {
    const std::string f = "solver." + key;
    if (key == "algorithm") {
      if (!value.is_string()) field_error(f, "expected a string");
      s.algorithm = value.get<std::string>();
      if (s.algorithm != "gradient" && s.algorithm != "linearized" &&
          s.algorithm != "lp") {
        field_error(f, "unknown algorithm '" + s.algorithm +
                           "'; valid: gradient, linearized, lp");
      }
    } else if (key == "log_floor") {
      s.log_floor = number(value, f);
    } else if (key == "grid") {
      if (!value.is_array()) field_error(f, "expected an array of counts");
      for (const json& g : value) {
        if (!g.is_number_integer() || g.get<long long>() < 2) {
          field_error(f, "counts must be integers >= 2");
        }
        s.grid.push_back(g.get<Index>());
      }
    } else if (key == "kkt_tol") {
      s.kkt_tol = number(value, f);
      if (!(s.kkt_tol > 0)) field_error(f, "must be positive");
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) field_error(f, "expected a nonnegative integer");
      s.seed = value.get<std::uint64_t>();
    } else if (key == "multistart") {
      if (!value.is_number_integer() || value.get<long long>() < 1) {
        field_error(f, "expected an integer >= 1");
      }
      s.multistart = value.get<int>();
    } else if (key == "max_iters") {
      if (!value.is_number_integer() || value.get<long long>() < 1) {
        field_error(f, "expected an integer >= 1");
      }
      s.max_iters = value.get<long>();
    } else if (key == "oracle_resolution") {
      if (!value.is_number_integer() || value.get<long long>() < 11) {
        field_error(f, "expected an integer >= 11");
      }
      s.oracle_resolution = value.get<Index>();
    } else {
      field_error(f, "unknown key");
    }
  }
  return s;
}

json solver_json(const SolverSettings& s) {
  json j;
  j["algorithm"] = s.algorithm;
  if (s.log_floor) j["log_floor"] = *s.log_floor;
  if (!s.grid.empty()) j["grid"] = s.grid;
  j["kkt_tol"] = s.kkt_tol;
  j["seed"] = s.seed;
  j["multistart"] = s.multistart;
  j["max_iters"] = s.max_iters;
  j["oracle_resolution"] = s.oracle_resolution;
  return j;
}

// Channel content only, so that solver settings do not change the hash.
json channel_json(const Scenario& s) {
  json j;
  j["version"] = kScenarioVersion;
  j["users"] = s.users;
  j["tones"] = s.tones;
  if (s.tones == 1) {
    j["gains"] = matrix_json(s.gains[0]);
    j["noise"] = vector_json(s.noise[0]);
  } else {
    j["gains"] = json::array();
    j["noise"] = json::array();
    for (Index k = 0; k < s.tones; ++k) {
      j["gains"].push_back(matrix_json(s.gains[k]));
      j["noise"].push_back(vector_json(s.noise[k]));
    }
  }
  j["gain_unit"] = "linear";
  j["noise_unit"] = "linear";
  j["caps"] = vector_json(s.caps);
  j["weights"] = vector_json(s.weights);
  j["snr_gap"] = s.snr_gap;
  if (s.interference) j["interference"] = matrix_json(*s.interference);
  return j;
}

}  // namespace

ChannelInstance Scenario::channel() const {
  if (!single_tone()) {
    throw DomainError("scenario has several tones; use the multi-tone form");
  }
  ChannelInstance c;
  c.gains = gains[0];
  c.noise = noise[0];
  c.caps = caps;
  c.weights = weights;
  c.snr_gap = snr_gap;
  return c;
}

MultiToneInstance Scenario::multitone() const {
  MultiToneInstance m;
  m.users = users;
  m.tones = tones;
  m.gains = gains;
  m.noise = noise;
  m.caps = caps;
  m.weights = weights;
  m.snr_gap = snr_gap;
  m.interference = interference;
  return m;
}

Problem Scenario::problem() const {
  if (single_tone()) return Problem::from(channel());
  return stack_multitone(multitone()).problem;
}

Scenario parse_scenario(const json& j) {
  if (!j.is_object()) throw DomainError("scenario must be a JSON object");
  static const char* known[] = {"version", "users",     "tones",  "gains",
                                "gain_unit", "noise",   "noise_unit", "caps",
                                "weights", "snr_gap",   "interference", "solver"};
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) field_error(key, "unknown key");
  }
  if (!j.contains("version") || j["version"] != kScenarioVersion) {
    field_error("version", std::string("must be \"") + kScenarioVersion + "\"");
  }
  Scenario s;
  if (!j.contains("users") || !j["users"].is_number_integer() ||
      j["users"].get<long long>() < 2) {
    field_error("users", "expected an integer >= 2");
  }
  s.users = j["users"].get<Index>();
  if (j.contains("tones")) {
    if (!j["tones"].is_number_integer() || j["tones"].get<long long>() < 1) {
      field_error("tones", "expected an integer >= 1");
    }
    s.tones = j["tones"].get<Index>();
  }
  const Index n = s.users;
  const std::string gain_unit = unit_of(j, "gain_unit", "linear", {"linear", "dB"});
  const std::string noise_unit =
      unit_of(j, "noise_unit", "linear", {"linear", "dBm"});
  if (!j.contains("gains")) field_error("gains", "missing");
  if (!j.contains("noise")) field_error("noise", "missing");

  // A single tone may be written either as L x L or as 1 x L x L.
  const json& g = j["gains"];
  const bool stacked =
      g.is_array() && !g.empty() && g[0].is_array() && !g[0].empty() &&
      g[0][0].is_array();
  if (s.tones == 1 && !stacked) {
    s.gains.push_back(matrix_of(g, n, n, "gains"));
    s.noise.push_back(vector_of(j["noise"], n, "noise"));
  } else {
    if (!g.is_array() || static_cast<Index>(g.size()) != s.tones) {
      field_error("gains", "expected " + std::to_string(s.tones) + " tone matrices");
    }
    const json& nz = j["noise"];
    if (!nz.is_array() || static_cast<Index>(nz.size()) != s.tones) {
      field_error("noise", "expected " + std::to_string(s.tones) + " tone vectors");
    }
    for (Index k = 0; k < s.tones; ++k) {
      const std::string tk = "[" + std::to_string(k) + "]";
      s.gains.push_back(matrix_of(g[static_cast<std::size_t>(k)], n, n, "gains" + tk));
      s.noise.push_back(vector_of(nz[static_cast<std::size_t>(k)], n, "noise" + tk));
    }
  }
  for (Index k = 0; k < s.tones; ++k) {
    if (gain_unit == "dB") s.gains[k] = s.gains[k].unaryExpr(&from_decibel);
    if (noise_unit == "dBm") s.noise[k] = s.noise[k].unaryExpr(&from_decibel);
  }
  if (!j.contains("caps")) field_error("caps", "missing");
  s.caps = vector_of(j["caps"], n, "caps");
  if (j.contains("weights")) {
    s.weights = vector_of(j["weights"], n, "weights");
  } else {
    s.weights = VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  }
  if (j.contains("snr_gap")) s.snr_gap = number(j["snr_gap"], "snr_gap");
  if (j.contains("interference")) {
    if (s.tones == 1) {
      field_error("interference", "only meaningful with more than one tone");
    }
    const Index m = n * s.tones;
    s.interference = matrix_of(j["interference"], m, m, "interference");
  }
  if (j.contains("solver")) s.solver = parse_solver(j["solver"]);

  try {
    if (s.single_tone()) {
      s.channel().validate();
    } else {
      s.multitone().validate();
    }
  } catch (const DomainError& e) {
    throw DomainError(std::string("scenario is not a valid channel: ") + e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open scenario file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw DomainError("scenario file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_scenario(j);
}

json scenario_to_json(const Scenario& s) {
  json j = channel_json(s);
  j["solver"] = solver_json(s.solver);
  return j;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write scenario file '" + path + "'");
  out << dump_json(scenario_to_json(s));
}

std::string scenario_hash(const Scenario& s) {
  const std::string text = channel_json(s).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Scenario generate_instance(Index users, Index tones, std::uint64_t seed,
                           const GenerateOptions& options) {
  if (users < 2) throw DomainError("generated instances need at least 2 users");
  if (tones < 1) throw DomainError("generated instances need at least 1 tone");
  std::mt19937_64 rng(seed);
  const auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * unit_uniform(rng);
  };
  Scenario s;
  s.users = users;
  s.tones = tones;
  for (Index k = 0; k < tones; ++k) {
    MatrixXd g(users, users);
    VectorXd nz(users);
    for (Index r = 0; r < users; ++r) {
      for (Index c = 0; c < users; ++c) {
        g(r, c) = r == c ? uniform(0.5, 1.5) : uniform(0.01, options.cross_max);
      }
      nz[r] = uniform(options.noise_min, options.noise_max);
    }
    s.gains.push_back(g);
    s.noise.push_back(nz);
  }
  s.caps.resize(users);
  s.weights.resize(users);
  for (Index l = 0; l < users; ++l) s.caps[l] = uniform(options.cap_min, options.cap_max);
  for (Index l = 0; l < users; ++l) s.weights[l] = uniform(0.1, 1.0);
  s.weights /= s.weights.sum();
  s.solver.seed = seed;
  return s;
}

}  // namespace sumrate
