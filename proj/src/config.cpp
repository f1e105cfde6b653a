#include "bslab/config.hpp"

#include <fstream>
#include <sstream>

namespace bslab {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": malformed section");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty())
        throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
      cfg.data_[section];
      continue;
    }
    size_t eq = s.find('=');
    if (eq == std::string::npos || section.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.data_[section][key] = val;
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse(ss.str());
}

std::string RunConfig::serialize() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [sec, kv] : data_) {
    if (!first) os << "\n";
    first = false;
    os << "[" << sec << "]\n";
    for (const auto& [k, v] : kv) os << k << " = " << v << "\n";
  }
  return os.str();
}

std::string RunConfig::params_hash() const {
  std::ostringstream os;
  os << std::hex << fnv1a64(serialize());
  return os.str();
}

bool RunConfig::has(const std::string& sec, const std::string& key) const {
  auto it = data_.find(sec);
  return it != data_.end() && it->second.count(key) > 0;
}

void RunConfig::set(const std::string& sec, const std::string& key, const std::string& value) {
  data_[sec][key] = trim(value);
}

std::string RunConfig::get_str(const std::string& sec, const std::string& key,
                               const std::string& dflt) const {
  auto it = data_.find(sec);
  if (it == data_.end()) return dflt;
  auto jt = it->second.find(key);
  return jt == it->second.end() ? dflt : jt->second;
}

double RunConfig::get_num(const std::string& sec, const std::string& key, double dflt) const {
  std::string s = get_str(sec, key, "");
  if (s.empty()) return dflt;
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw ConfigError("");
    return v;
  } catch (...) {
    throw ConfigError("config key " + sec + "." + key + ": not a number: " + s);
  }
}

int RunConfig::get_int(const std::string& sec, const std::string& key, int dflt) const {
  double v = get_num(sec, key, dflt);
  int i = int(v);
  if (double(i) != v)
    throw ConfigError("config key " + sec + "." + key + ": expected an integer");
  return i;
}

bool RunConfig::get_bool(const std::string& sec, const std::string& key, bool dflt) const {
  std::string s = get_str(sec, key, "");
  if (s.empty()) return dflt;
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("config key " + sec + "." + key + ": expected a boolean");
}

std::vector<double> RunConfig::get_list(const std::string& sec, const std::string& key) const {
  std::vector<double> out;
  std::istringstream is(get_str(sec, key, ""));
  double v;
  while (is >> v) out.push_back(v);
  return out;
}

Potential RunConfig::make_potential() const {
  std::string prof = get_str("potential", "profile", "gaussian");
  Profile p = profile_from_string(prof);
  Complex g(get_num("potential", "g_re", 1.0), get_num("potential", "g_im", 0.0));
  double shape = get_num("potential", "shape", 1.0);
  double R = get_num("potential", "R", 0.0);
  int m = get_int("potential", "smoothness_m", p == Profile::gaussian ? 3 : 0);
  if (p == Profile::table) {
    std::string path = get_str("potential", "table_file", "");
    if (path.empty()) throw ConfigError("table potential needs potential.table_file");
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open table file: " + path);
    TableData td;
    double r, re, im;
    while (is >> r >> re >> im) {
      td.r.push_back(r);
      td.v.push_back(Complex(re, im));
    }
    return Potential::make_table(std::move(td), m);
  }
  return Potential::make(p, g, shape, R, m);
}

NumericsConfig RunConfig::make_numerics() const {
  NumericsConfig cfg;
  cfg.quad_n = get_int("numerics", "quad_n", cfg.quad_n);
  cfg.ell_eps = get_num("numerics", "ell_eps", cfg.ell_eps);
  cfg.L_max = get_int("numerics", "L_max", cfg.L_max);
  cfg.auto_L = get_bool("numerics", "auto_L", cfg.auto_L);
  cfg.det_eps = get_num("numerics", "det_eps", cfg.det_eps);
  std::string pm = get_str("numerics", "psi2_mode", "closed");
  if (pm == "closed")
    cfg.psi2_mode = Psi2Mode::closed;
  else if (pm == "channels")
    cfg.psi2_mode = Psi2Mode::channels;
  else
    throw ConfigError("numerics.psi2_mode must be 'closed' or 'channels'");
  std::string dr = get_str("numerics", "det_route", "transfer");
  if (dr == "transfer")
    cfg.det_route = DetRoute::transfer;
  else if (dr == "eigen")
    cfg.det_route = DetRoute::eigen;
  else
    throw ConfigError("numerics.det_route must be 'transfer' or 'eigen'");
  if (cfg.quad_n < 2 || !(cfg.ell_eps > 0.0) || cfg.L_max < 0)
    throw ConfigError("numerics: quad_n >= 2, ell_eps > 0, L_max >= 0 required");
  return cfg;
}

SpectraConfig RunConfig::make_spectra() const {
  SpectraConfig cfg;
  cfg.tol_zero = get_num("spectra", "tol_zero", cfg.tol_zero);
  cfg.delta_floor = get_num("spectra", "delta_floor", cfg.delta_floor);
  cfg.max_depth = get_int("spectra", "max_depth", cfg.max_depth);
  cfg.tol_edge = get_num("spectra", "tol_edge", cfg.tol_edge);
  cfg.nmax_B = get_int("spectra", "nmax_B", cfg.nmax_B);
  cfg.contour_panels = get_int("spectra", "contour_panels", cfg.contour_panels);
  cfg.estimate_r0 = get_bool("spectra", "estimate_r0", cfg.estimate_r0);
  if (!(cfg.tol_zero > 0.0) || !(cfg.delta_floor > 0.0))
    throw ConfigError("spectra: tolerances must be positive");
  return cfg;
}

}  // namespace bslab
