#include "ioncav/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace ioncav {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

int levenshtein(const std::string& a, const std::string& b) {
  const size_t n = a.size();
  const size_t m = b.size();
  std::vector<int> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= m; ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

const std::vector<std::string> kExperiments = {
    "params", "evolve", "regimes", "squeeze", "filter", "semiclassical"};

// Every key the format knows, with its human-readable type label.
const std::vector<std::pair<std::string, std::string>> kKeyRegistry = {
    {"omega", "real (rad/s)"},
    {"nu", "real (rad/s)"},
    {"delta", "real (rad/s) or auto"},
    {"Delta", "real (rad/s)"},
    {"lambda1", "complex (rad/s)"},
    {"lambda2", "complex (rad/s)"},
    {"Omega_abs", "real (rad/s)"},
    {"phi_drive", "real (rad)"},
    {"eta", "real"},
    {"eta_L", "real"},
    {"varphi", "real (rad)"},
    {"N_cav", "integer"},
    {"N_vib", "integer"},
    {"experiment", "string"},
    {"regime", "string"},
    {"out", "string"},
    {"format", "string"},
    {"t_final", "real (s)"},
    {"samples", "integer"},
    {"engine", "string"},
    {"M", "integer"},
    {"beta", "complex"},
    {"n_threshold", "real"},
    {"delta_list", "list of real (rad/s)"},
    {"m_max", "integer"},
    {"beta_list", "list of complex"},
    {"r_max", "real"},
};

bool key_known(const std::string& key) {
  for (const auto& [name, type] : kKeyRegistry) {
    if (name == key) return true;
  }
  return false;
}

std::string suggest(const std::string& key,
                    const std::vector<std::string>& candidates) {
  int best = 3;  // suggest only within edit distance 2
  std::string pick;
  for (const auto& c : candidates) {
    const int d = levenshtein(key, c);
    if (d < best) {
      best = d;
      pick = c;
    }
  }
  return pick;
}

std::string suggest_key(const std::string& key) {
  std::vector<std::string> names;
  names.reserve(kKeyRegistry.size());
  for (const auto& [name, type] : kKeyRegistry) names.push_back(name);
  return suggest(key, names);
}

// Keys accepted by every experiment.
const std::set<std::string> kCommonKeys = {
    "omega", "nu",     "delta",  "Delta",  "lambda1", "lambda2",
    "Omega_abs", "phi_drive", "eta", "eta_L", "varphi", "N_cav",
    "N_vib", "experiment", "regime", "out", "format"};

std::set<std::string> applicable_keys(const std::string& experiment) {
  std::set<std::string> keys = kCommonKeys;
  if (experiment == "squeeze") {
    keys.insert({"t_final", "samples", "engine", "beta"});
  } else if (experiment == "evolve") {
    keys.insert({"t_final", "samples"});
  } else if (experiment == "regimes") {
    keys.insert({"delta_list", "m_max"});
  } else if (experiment == "filter") {
    keys.insert({"t_final", "samples", "M", "beta", "n_threshold"});
  } else if (experiment == "semiclassical") {
    keys.insert({"beta_list", "r_max", "samples"});
  }
  return keys;
}

std::vector<std::string> required_keys(const std::string& experiment) {
  std::vector<std::string> req = {"lambda1", "lambda2", "Delta", "Omega_abs"};
  if (experiment != "semiclassical") req.push_back("delta");
  if (experiment == "squeeze") {
    req.insert(req.end(), {"varphi", "t_final", "samples", "engine", "N_cav"});
  } else if (experiment == "evolve") {
    req.insert(req.end(), {"varphi", "nu", "eta", "t_final", "samples",
                           "N_cav", "N_vib"});
  } else if (experiment == "regimes") {
    req.insert(req.end(), {"eta", "delta_list", "m_max"});
  } else if (experiment == "filter") {
    req.insert(req.end(), {"eta", "M", "beta", "t_final", "samples",
                           "n_threshold", "N_cav", "N_vib"});
  } else if (experiment == "semiclassical") {
    req.insert(req.end(), {"eta", "beta_list", "r_max", "samples", "N_cav",
                           "N_vib"});
  }
  return req;
}

double parse_double(const std::string& key, const std::string& value) {
  if (value.empty()) {
    throw ConfigError("key \"" + key + "\": empty value, expected a real number");
  }
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end != value.c_str() + value.size()) {
    throw ConfigError("key \"" + key + "\": cannot parse \"" + value +
                      "\" as a real number");
  }
  return v;
}

int parse_int(const std::string& key, const std::string& value) {
  if (value.empty()) {
    throw ConfigError("key \"" + key + "\": empty value, expected an integer");
  }
  char* end = nullptr;
  const long v = std::strtol(value.c_str(), &end, 10);
  if (end != value.c_str() + value.size()) {
    throw ConfigError("key \"" + key + "\": cannot parse \"" + value +
                      "\" as an integer");
  }
  return static_cast<int>(v);
}

cplx parse_complex(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (!v.empty() && v.front() == '(') {
    if (v.back() != ')') {
      throw ConfigError("key \"" + key + "\": expected \"(re,im)\", got \"" +
                        value + "\"");
    }
    const std::string inner = v.substr(1, v.size() - 2);
    const size_t comma = inner.find(',');
    if (comma == std::string::npos ||
        inner.find(',', comma + 1) != std::string::npos) {
      throw ConfigError("key \"" + key + "\": expected \"(re,im)\", got \"" +
                        value + "\"");
    }
    const double re = parse_double(key, trim(inner.substr(0, comma)));
    const double im = parse_double(key, trim(inner.substr(comma + 1)));
    return cplx{re, im};
  }
  return cplx{parse_double(key, v), 0.0};
}

// Splits on commas that are not inside parentheses.
std::vector<std::string> split_list(const std::string& key,
                                    const std::string& value) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char ch : value) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (depth < 0) {
      throw ConfigError("key \"" + key + "\": unbalanced parentheses in \"" +
                        value + "\"");
    }
    if (ch == ',' && depth == 0) {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (depth != 0) {
    throw ConfigError("key \"" + key + "\": unbalanced parentheses in \"" +
                      value + "\"");
  }
  parts.push_back(trim(cur));
  if (parts.size() == 1 && parts[0].empty()) parts.clear();
  return parts;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_complex(cplx v) {
  return "(" + fmt_double(v.real()) + "," + fmt_double(v.imag()) + ")";
}

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
  return system == o.system && delta_auto == o.delta_auto &&
         n_cav == o.n_cav && n_vib == o.n_vib && experiment == o.experiment &&
         regime == o.regime && out == o.out && format == o.format &&
         t_final == o.t_final && samples == o.samples && engine == o.engine &&
         M == o.M && beta == o.beta && n_threshold == o.n_threshold &&
         delta_list == o.delta_list && m_max == o.m_max &&
         beta_list == o.beta_list && r_max == o.r_max;
}

RunConfig parse_config(const std::string& text,
                       const std::string& expected_experiment) {
  std::map<std::string, std::string> kv;
  {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const size_t hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      line = trim(line);
      if (line.empty()) continue;
      const size_t eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("line " + std::to_string(lineno) +
                          ": expected `key = value`, got \"" + line + "\"");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) {
        throw ConfigError("line " + std::to_string(lineno) +
                          ": missing key before '='");
      }
      if (value.empty()) {
        throw ConfigError("key \"" + key + "\": empty value");
      }
      if (kv.count(key) != 0) {
        throw ConfigError("duplicate key \"" + key + "\"");
      }
      kv[key] = value;
    }
  }

  // Resolve the experiment first; key applicability depends on it.
  std::string experiment;
  if (auto it = kv.find("experiment"); it != kv.end()) {
    experiment = it->second;
    if (!expected_experiment.empty() && experiment != expected_experiment) {
      throw ConfigError("config sets experiment = \"" + experiment +
                        "\" but the subcommand requests \"" +
                        expected_experiment + "\"");
    }
  } else if (!expected_experiment.empty()) {
    experiment = expected_experiment;
  } else {
    throw ConfigError("missing required key \"experiment\"");
  }
  if (std::find(kExperiments.begin(), kExperiments.end(), experiment) ==
      kExperiments.end()) {
    std::string msg = "unknown experiment \"" + experiment + "\"";
    const std::string s = suggest(experiment, kExperiments);
    if (!s.empty()) msg += "; did you mean \"" + s + "\"?";
    throw ConfigError(msg);
  }

  // Strict key checking.
  const std::set<std::string> allowed = applicable_keys(experiment);
  for (const auto& [key, value] : kv) {
    if (!key_known(key)) {
      std::string msg = "unknown key \"" + key + "\"";
      const std::string s = suggest_key(key);
      if (!s.empty()) msg += "; did you mean \"" + s + "\"?";
      throw ConfigError(msg);
    }
    if (allowed.count(key) == 0) {
      throw ConfigError("key \"" + key + "\" is not used by experiment \"" +
                        experiment + "\"");
    }
  }
  for (const std::string& req : required_keys(experiment)) {
    if (kv.count(req) == 0) {
      throw ConfigError("missing required key \"" + req +
                        "\" for experiment \"" + experiment + "\"");
    }
  }

  RunConfig cfg;
  cfg.experiment = experiment;
  const auto has = [&](const char* k) { return kv.count(k) != 0; };
  const auto raw = [&](const char* k) -> const std::string& { return kv[k]; };

  if (has("omega")) cfg.system.omega = parse_double("omega", raw("omega"));
  if (has("nu")) cfg.system.nu = parse_double("nu", raw("nu"));
  if (has("Delta")) cfg.system.Delta = parse_double("Delta", raw("Delta"));
  if (has("lambda1"))
    cfg.system.lambda1 = parse_complex("lambda1", raw("lambda1"));
  if (has("lambda2"))
    cfg.system.lambda2 = parse_complex("lambda2", raw("lambda2"));
  if (has("Omega_abs"))
    cfg.system.Omega_abs = parse_double("Omega_abs", raw("Omega_abs"));
  if (has("phi_drive"))
    cfg.system.phi_drive = parse_double("phi_drive", raw("phi_drive"));
  if (has("eta")) cfg.system.eta = parse_double("eta", raw("eta"));
  if (has("eta_L")) cfg.system.eta_L = parse_double("eta_L", raw("eta_L"));
  if (has("varphi")) cfg.system.varphi = parse_double("varphi", raw("varphi"));

  if (has("delta")) {
    if (raw("delta") == "auto") {
      if (experiment == "params" || experiment == "evolve" ||
          experiment == "regimes") {
        throw ConfigError("delta = auto is not defined for experiment \"" +
                          experiment + "\"; give a numeric detuning");
      }
      cfg.delta_auto = true;
    } else if (experiment == "semiclassical") {
      throw ConfigError(
          "key \"delta\": the semiclassical experiment resolves the detuning "
          "per beta (delta = 2 eta^2 |beta|^2 omega_ii); omit it or write "
          "delta = auto");
    } else {
      cfg.system.delta = parse_double("delta", raw("delta"));
    }
  } else if (experiment == "semiclassical") {
    cfg.delta_auto = true;
  }

  if (has("N_cav")) {
    cfg.n_cav = parse_int("N_cav", raw("N_cav"));
    if (cfg.n_cav < 2) {
      throw ConfigError("N_cav = " + std::to_string(cfg.n_cav) +
                        ": truncated mode dimension must be >= 2");
    }
  }
  if (has("N_vib")) {
    cfg.n_vib = parse_int("N_vib", raw("N_vib"));
    if (cfg.n_vib < 2) {
      throw ConfigError("N_vib = " + std::to_string(cfg.n_vib) +
                        ": truncated mode dimension must be >= 2");
    }
  }

  if (has("regime")) {
    cfg.regime = raw("regime");
    if (cfg.regime != "auto" && cfg.regime != "weak" && cfg.regime != "strong") {
      throw ConfigError("key \"regime\": expected auto, weak, or strong, got \"" +
                        cfg.regime + "\"");
    }
  }
  if (has("out")) cfg.out = raw("out");
  if (has("format")) {
    cfg.format = raw("format");
    if (cfg.format != "csv" && cfg.format != "json") {
      throw ConfigError("key \"format\": expected csv or json, got \"" +
                        cfg.format + "\"");
    }
  }

  if (has("t_final")) {
    cfg.t_final = parse_double("t_final", raw("t_final"));
    if (cfg.t_final < 0.0) {
      throw ConfigError("key \"t_final\": must be non-negative");
    }
  }
  if (has("samples")) {
    cfg.samples = parse_int("samples", raw("samples"));
    if (cfg.samples < 1) {
      throw ConfigError("key \"samples\": must be >= 1");
    }
  }
  if (has("engine")) {
    cfg.engine = raw("engine");
    if (cfg.engine != "analytic" && cfg.engine != "numeric") {
      throw ConfigError("key \"engine\": expected analytic or numeric, got \"" +
                        cfg.engine + "\"");
    }
  }
  if (has("M")) {
    cfg.M = parse_int("M", raw("M"));
    if (cfg.M < 0) throw ConfigError("key \"M\": must be >= 0");
  }
  if (has("beta")) cfg.beta = parse_complex("beta", raw("beta"));
  if (has("n_threshold")) {
    cfg.n_threshold = parse_double("n_threshold", raw("n_threshold"));
    if (cfg.n_threshold < 0.0) {
      throw ConfigError("key \"n_threshold\": must be non-negative");
    }
  }
  if (has("delta_list")) {
    for (const std::string& part : split_list("delta_list", raw("delta_list"))) {
      cfg.delta_list.push_back(parse_double("delta_list", part));
    }
    if (cfg.delta_list.empty()) {
      throw ConfigError("key \"delta_list\": empty list");
    }
  }
  if (has("m_max")) {
    cfg.m_max = parse_int("m_max", raw("m_max"));
    if (cfg.m_max < 1) throw ConfigError("key \"m_max\": must be >= 1");
  }
  if (has("beta_list")) {
    for (const std::string& part : split_list("beta_list", raw("beta_list"))) {
      cfg.beta_list.push_back(parse_complex("beta_list", part));
    }
    if (cfg.beta_list.empty()) {
      throw ConfigError("key \"beta_list\": empty list");
    }
  }
  if (has("r_max")) {
    cfg.r_max = parse_double("r_max", raw("r_max"));
    if (cfg.r_max < 0.0) throw ConfigError("key \"r_max\": must be non-negative");
  }

  // Unit sanity: frequencies are rad/s; sub-1 magnitudes usually mean the
  // value was written in MHz or similar. Warning, never an error.
  const auto freq_warn = [&](const char* key, double v) {
    if (v != 0.0 && std::abs(v) < 1.0) {
      cfg.warnings.push_back(std::string(key) + " = " + fmt_double(v) +
                             " rad/s looks suspiciously small; frequencies "
                             "are expected in rad/s");
    }
  };
  freq_warn("omega", cfg.system.omega);
  freq_warn("nu", cfg.system.nu);
  freq_warn("Delta", cfg.system.Delta);
  freq_warn("Omega_abs", cfg.system.Omega_abs);
  freq_warn("lambda1", std::abs(cfg.system.lambda1));
  freq_warn("lambda2", std::abs(cfg.system.lambda2));
  if (!cfg.delta_auto) freq_warn("delta", cfg.system.delta);

  return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream os;
  os << "experiment = " << cfg.experiment << "\n";
  os << "omega = " << fmt_double(cfg.system.omega) << "\n";
  os << "nu = " << fmt_double(cfg.system.nu) << "\n";
  if (cfg.delta_auto) {
    os << "delta = auto\n";
  } else if (cfg.experiment != "semiclassical") {
    os << "delta = " << fmt_double(cfg.system.delta) << "\n";
  }
  os << "Delta = " << fmt_double(cfg.system.Delta) << "\n";
  os << "lambda1 = " << fmt_complex(cfg.system.lambda1) << "\n";
  os << "lambda2 = " << fmt_complex(cfg.system.lambda2) << "\n";
  os << "Omega_abs = " << fmt_double(cfg.system.Omega_abs) << "\n";
  os << "phi_drive = " << fmt_double(cfg.system.phi_drive) << "\n";
  os << "eta = " << fmt_double(cfg.system.eta) << "\n";
  os << "eta_L = " << fmt_double(cfg.system.eta_L) << "\n";
  os << "varphi = " << fmt_double(cfg.system.varphi) << "\n";
  if (cfg.n_cav != 0) os << "N_cav = " << cfg.n_cav << "\n";
  if (cfg.n_vib != 0) os << "N_vib = " << cfg.n_vib << "\n";
  os << "regime = " << cfg.regime << "\n";
  if (!cfg.out.empty()) os << "out = " << cfg.out << "\n";
  os << "format = " << cfg.format << "\n";

  const std::string& e = cfg.experiment;
  if (e == "squeeze" || e == "evolve" || e == "filter") {
    os << "t_final = " << fmt_double(cfg.t_final) << "\n";
  }
  if (e == "squeeze" || e == "evolve" || e == "filter" ||
      e == "semiclassical") {
    os << "samples = " << cfg.samples << "\n";
  }
  if (e == "squeeze") {
    os << "engine = " << cfg.engine << "\n";
    os << "beta = " << fmt_complex(cfg.beta) << "\n";
  }
  if (e == "filter") {
    os << "M = " << cfg.M << "\n";
    os << "beta = " << fmt_complex(cfg.beta) << "\n";
    os << "n_threshold = " << fmt_double(cfg.n_threshold) << "\n";
  }
  if (e == "regimes") {
    os << "delta_list = ";
    for (size_t i = 0; i < cfg.delta_list.size(); ++i) {
      if (i) os << ", ";
      os << fmt_double(cfg.delta_list[i]);
    }
    os << "\n";
    os << "m_max = " << cfg.m_max << "\n";
  }
  if (e == "semiclassical") {
    os << "beta_list = ";
    for (size_t i = 0; i < cfg.beta_list.size(); ++i) {
      if (i) os << ", ";
      os << fmt_complex(cfg.beta_list[i]);
    }
    os << "\n";
    os << "r_max = " << fmt_double(cfg.r_max) << "\n";
  }
  return os.str();
}

RunConfig load_config(const std::string& path,
                      const std::string& expected_experiment) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open config file \"" + path + "\"");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), expected_experiment);
}

bool set_sweep_value(RunConfig& cfg, const std::string& key, double value) {
  if (key == "omega") cfg.system.omega = value;
  else if (key == "nu") cfg.system.nu = value;
  else if (key == "delta") { cfg.system.delta = value; cfg.delta_auto = false; }
  else if (key == "Delta") cfg.system.Delta = value;
  else if (key == "Omega_abs") cfg.system.Omega_abs = value;
  else if (key == "phi_drive") cfg.system.phi_drive = value;
  else if (key == "eta") cfg.system.eta = value;
  else if (key == "eta_L") cfg.system.eta_L = value;
  else if (key == "varphi") cfg.system.varphi = value;
  else if (key == "t_final") cfg.t_final = value;
  else if (key == "r_max") cfg.r_max = value;
  else if (key == "n_threshold") cfg.n_threshold = value;
  else return false;
  return true;
}

}  // namespace ioncav
