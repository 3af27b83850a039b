#include "nlslab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "nlslab/error.hpp"

namespace nlslab {

namespace {

struct Key {
  const char* name;
  const char* section;
};

const Key kKeys[] = {
    {"experiment", ""},  {"dimension", ""},        {"seed", ""},         {"output_dir", ""},
    {"n", "grid"},       {"box", "grid"},          {"tol_ode", "tolerances"}, {"tol_orth", "tolerances"},
    {"tol_id", "tolerances"}, {"dt", "evolve"},    {"t_end", "evolve"},  {"record_every", "evolve"},
    {"initial", "evolve"}, {"trials", "extra"},   {"alpha", "extra"},   {"t_stop", "extra"},
};

const Key* find_key(const std::string& name) {
  for (const auto& k : kKeys)
    if (name == k.name) return &k;
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Thrown by the value converters; callers attach the key or position.
struct BadValue {
  std::string why;
};

double to_double(const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end || v.empty()) throw BadValue{"expected a number, got '" + v + "'"};
  return out;
}

template <class T = int>
T to_int(const std::string& v) {
  T out = 0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end || v.empty()) throw BadValue{"expected an integer, got '" + v + "'"};
  return out;
}

std::string unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

void assign(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = unquote(raw);
  if (key == "experiment") c.experiment = v;
  else if (key == "dimension") c.dimension = to_int(v);
  else if (key == "seed") {
    c.seed = to_int<std::uint64_t>(v);  // from_chars rejects a leading '-' here
  } else if (key == "output_dir") c.output_dir = v;
  else if (key == "n") c.n = to_int(v);
  else if (key == "box") c.box = to_double(v);
  else if (key == "tol_ode") c.tol_ode = to_double(v);
  else if (key == "tol_orth") c.tol_orth = to_double(v);
  else if (key == "tol_id") c.tol_id = to_double(v);
  else if (key == "dt") c.dt = to_double(v);
  else if (key == "t_end") c.t_end = to_double(v);
  else if (key == "record_every") c.record_every = to_int(v);
  else if (key == "initial") c.initial = v;
  else if (key == "trials") c.trials = to_int(v);
  else if (key == "alpha") c.alpha = to_double(v);
  else if (key == "t_stop") c.t_stop = to_double(v);
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool is_field_experiment(const std::string& e) {
  return e == "decompose" || e == "evolve" || e == "pc-blowup" || e == "gn-sweep";
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"groundstate", "spectrum",  "decompose",     "evolve",
                                                 "pc-blowup",   "gn-sweep", "identity-suite"};
  return names;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : kKeys) out.emplace_back(k.name);
  return out;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (!find_key(key)) throw ValidationError(key, "unknown key");
  try {
    assign(cfg, key, trim(value));
  } catch (const BadValue& b) {
    throw ValidationError(key, b.why);
  }
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Strip comments outside double quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (!quoted && (line[i] == '#' || line[i] == ';')) {
        line.resize(i);
        break;
      }
    }
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const std::size_t col = first + 1;
    if (line[first] == '[') {
      const auto close = line.find(']', first);
      if (close == std::string::npos) throw ParseError(lineno, col, "unterminated section header");
      if (!trim(line.substr(close + 1)).empty()) throw ParseError(lineno, close + 2, "text after section header");
      section = trim(line.substr(first + 1, close - first - 1));
      if (section != "grid" && section != "tolerances" && section != "evolve" && section != "extra")
        throw ParseError(lineno, col + 1, "unknown section '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, col, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(lineno, col, "missing key");
    const Key* k = find_key(key);
    if (!k) throw ParseError(lineno, col, "unknown key '" + key + "'");
    if (!section.empty() && section != k->section)
      throw ParseError(lineno, col, "key '" + key + "' does not belong in [" + section + "]");
    if (!seen.insert(key).second) throw ParseError(lineno, col, "duplicate key '" + key + "'");
    const auto vstart = line.find_first_not_of(" \t", eq + 1);
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ParseError(lineno, eq + 2, "missing value for '" + key + "'");
    try {
      assign(cfg, key, value);
    } catch (const BadValue& b) {
      throw ParseError(lineno, vstart + 1, key + ": " + b.why);
    }
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("config", "cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "experiment = " << c.experiment << "\n"
     << "dimension = " << c.dimension << "\n"
     << "seed = " << c.seed << "\n"
     << "output_dir = \"" << c.output_dir << "\"\n"
     << "\n[grid]\n"
     << "n = " << c.n << "\n"
     << "box = " << num(c.box) << "\n"
     << "\n[tolerances]\n"
     << "tol_ode = " << num(c.tol_ode) << "\n"
     << "tol_orth = " << num(c.tol_orth) << "\n"
     << "tol_id = " << num(c.tol_id) << "\n"
     << "\n[evolve]\n"
     << "dt = " << num(c.dt) << "\n"
     << "t_end = " << num(c.t_end) << "\n"
     << "record_every = " << c.record_every << "\n"
     << "initial = " << c.initial << "\n"
     << "\n[extra]\n"
     << "trials = " << c.trials << "\n"
     << "alpha = " << num(c.alpha) << "\n"
     << "t_stop = " << num(c.t_stop) << "\n";
  return os.str();
}

void validate(const RunConfig& c) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end())
    throw ValidationError("experiment", "unknown experiment '" + c.experiment + "'");
  const int dmax = is_field_experiment(c.experiment) ? 2 : 15;
  if (c.dimension < 1 || c.dimension > dmax)
    throw ValidationError("dimension", "must lie in [1, " + std::to_string(dmax) + "] for " + c.experiment);
  if (c.output_dir.empty()) throw ValidationError("output_dir", "must not be empty");
  if (c.n < 0) throw ValidationError("n", "must be non-negative");
  if (c.n > 0 && is_field_experiment(c.experiment) && (c.n < 16 || (c.n & (c.n - 1)) != 0))
    throw ValidationError("n", "must be a power of two >= 16");
  if (c.n > 0 && !is_field_experiment(c.experiment) && c.n < 200)
    throw ValidationError("n", "radial grids need n >= 200");
  if (!(c.box >= 0) || !std::isfinite(c.box)) throw ValidationError("box", "must be finite and non-negative");
  for (const auto& [name, v] : {std::pair{"tol_ode", c.tol_ode}, {"tol_orth", c.tol_orth}, {"tol_id", c.tol_id}})
    if (!(v > 0) || !std::isfinite(v)) throw ValidationError(name, "must be positive");
  if (!(c.dt > 0) || !std::isfinite(c.dt)) throw ValidationError("dt", "must be positive");
  if (!(c.t_end > 0) || !std::isfinite(c.t_end)) throw ValidationError("t_end", "must be positive");
  if (c.record_every < 1) throw ValidationError("record_every", "must be at least 1");
  if (c.initial != "soliton" && c.initial != "gaussian")
    throw ValidationError("initial", "must be 'soliton' or 'gaussian'");
  if (c.trials < 0) throw ValidationError("trials", "must be non-negative");
  if (!(c.alpha >= 0) || !std::isfinite(c.alpha)) throw ValidationError("alpha", "must be non-negative");
  if (!(c.t_stop > 0 && c.t_stop < 1)) throw ValidationError("t_stop", "must lie in (0, 1)");
}

RunConfig resolve(const RunConfig& cfg) {
  RunConfig c = cfg;
  const std::string& e = c.experiment;
  if (c.n == 0) {
    if (e == "decompose") c.n = c.dimension == 1 ? 512 : 256;
    else if (e == "evolve") c.n = c.dimension == 1 ? 512 : 128;
    else if (e == "pc-blowup") c.n = c.dimension == 1 ? 1024 : 512;
    else if (e == "gn-sweep") c.n = c.dimension == 1 ? 256 : 128;
    else c.n = 800;
  }
  if (c.box == 0) {
    if (e == "decompose") c.box = c.dimension == 1 ? 40 : 36;
    else if (e == "evolve") c.box = c.dimension == 1 ? 30 : 32;
    else if (e == "pc-blowup") c.box = c.dimension == 1 ? 40 : 32;
    else if (e == "gn-sweep") c.box = c.dimension == 1 ? 30 : 32;
    else c.box = 20;
  }
  if (c.trials == 0) c.trials = e == "spectrum" || e == "gn-sweep" ? 1000 : 100;
  if (c.alpha == 0) c.alpha = e == "pc-blowup" ? 0.7 : 0.3;
  return c;
}

}  // namespace nlslab
