#include "fracwave/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "fracwave/io.hpp"

namespace fracwave::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(out)) {
    throw ConfigError(key, "expected a finite number, got '" + v + "'");
  }
  return out;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& v) {
  Int out = 0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::string body = v;
  if (!body.empty() && body.front() == '[') body.erase(body.begin());
  if (!body.empty() && body.back() == ']') body.pop_back();
  std::vector<int> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_int<int>(key, trim(item)));
  if (out.empty()) throw ConfigError(key, "expected a comma-separated list of integers");
  return out;
}

struct Entry {
  const char* key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define REAL_KEY(name)                                                                      \
  Entry {                                                                                   \
    #name, [](RunConfig& c, const std::string& v) { c.name = parse_double(#name, v); },     \
        [](const RunConfig& c) { return io::format_double(c.name); }                        \
  }
#define INT_KEY(name)                                                                       \
  Entry {                                                                                   \
    #name, [](RunConfig& c, const std::string& v) { c.name = parse_int<int>(#name, v); },   \
        [](const RunConfig& c) { return std::to_string(c.name); }                           \
  }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      REAL_KEY(c),
      REAL_KEY(gamma),
      REAL_KEY(k),
      REAL_KEY(alpha),
      REAL_KEY(tau),
      REAL_KEY(t),
      INT_KEY(L),
      INT_KEY(L_ref),
      INT_KEY(n_realizations),
      REAL_KEY(kappa1),
      REAL_KEY(kappa2),
      REAL_KEY(c_tilde),
      REAL_KEY(d_tilde),
      REAL_KEY(a_tilde),
      REAL_KEY(k_tilde),
      Entry{"seed",
            [](RunConfig& c, const std::string& v) { c.seed = parse_int<std::uint64_t>("seed", v); },
            [](const RunConfig& c) { return std::to_string(c.seed); }},
      INT_KEY(grid_L),
      Entry{"out_dir", [](RunConfig& c, const std::string& v) { c.out_dir = v; },
            [](const RunConfig& c) { return c.out_dir; }},
      REAL_KEY(step),
      Entry{"L_list",
            [](RunConfig& c, const std::string& v) { c.L_list = parse_int_list("L_list", v); },
            [](const RunConfig& c) {
              std::string s;
              for (std::size_t i = 0; i < c.L_list.size(); ++i) {
                if (i) s += ',';
                s += std::to_string(c.L_list[i]);
              }
              return s;
            }},
      REAL_KEY(beta_star),
      INT_KEY(ell_min),
      INT_KEY(ell_max),
      Entry{"share_abs_m",
            [](RunConfig& c, const std::string& v) { c.share_abs_m = parse_bool("share_abs_m", v); },
            [](const RunConfig& c) { return std::string(c.share_abs_m ? "true" : "false"); }},
  };
  return table;
}

#undef REAL_KEY
#undef INT_KEY

}  // namespace

spectral::ModelParams RunConfig::params() const {
  spectral::ModelParams p;
  p.c = c;
  p.gamma = gamma;
  p.k = k;
  p.alpha = alpha;
  p.tau = tau;
  return p;
}

PowerSpectrum RunConfig::cspec() const { return PowerSpectrum{d_tilde, c_tilde, kappa1}; }
PowerSpectrum RunConfig::aspec() const { return PowerSpectrum{k_tilde, a_tilde, kappa2}; }

fields::NoiseConvention RunConfig::convention() const {
  return share_abs_m ? fields::NoiseConvention::shared_abs_m : fields::NoiseConvention::independent;
}

void RunConfig::validate() const {
  auto positive = [](const char* key, double v) {
    if (!(v > 0.0)) throw ConfigError(key, "must be > 0");
  };
  auto nonneg = [](const char* key, double v) {
    if (!(v >= 0.0)) throw ConfigError(key, "must be >= 0");
  };
  positive("c", c);
  positive("gamma", gamma);
  positive("k", k);
  if (!(alpha > 0.5 && alpha <= 1.0)) throw ConfigError("alpha", "must lie in (0.5, 1]");
  nonneg("tau", tau);
  nonneg("t", t);
  if (L < 0) throw ConfigError("L", "must be >= 0");
  if (L > L_ref) throw ConfigError("L", "must not exceed L_ref");
  if (n_realizations < 2) throw ConfigError("n_realizations", "must be >= 2");
  if (!(kappa1 > 2.0)) throw ConfigError("kappa1", "must exceed 2");
  if (!(kappa2 > 2.0)) throw ConfigError("kappa2", "must exceed 2");
  nonneg("c_tilde", c_tilde);
  nonneg("d_tilde", d_tilde);
  nonneg("a_tilde", a_tilde);
  nonneg("k_tilde", k_tilde);
  if (grid_L < 0) throw ConfigError("grid_L", "must be >= 0");
  if (grid_L > 0 && grid_L < L) throw ConfigError("grid_L", "must be 0 or at least L");
  if (out_dir.empty()) throw ConfigError("out_dir", "must not be empty");
  positive("step", step);
  for (int v : L_list) {
    if (v < 0 || v >= L_ref) throw ConfigError("L_list", "entries must lie in [0, L_ref)");
  }
  if (!(beta_star > 0.0 && beta_star <= 1.0)) throw ConfigError("beta_star", "must lie in (0, 1]");
  if (ell_min < 0) throw ConfigError("ell_min", "must be >= 0");
  if (ell_max < ell_min) throw ConfigError("ell_max", "must be >= ell_min");
}

std::string RunConfig::canonical() const {
  std::string out;
  for (const Entry& e : entries()) {
    if (std::string(e.key) == "out_dir") continue;
    out += e.key;
    out += " = ";
    out += e.get(*this);
    out += '\n';
  }
  return out;
}

std::string RunConfig::hash() const { return io::fnv1a_hex(canonical()); }

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const Entry& e : entries()) k.emplace_back(e.key);
    return k;
  }();
  return keys;
}

void set_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const Entry& e : entries()) {
    if (key == e.key) {
      e.set(cfg, value);
      return;
    }
  }
  throw ConfigError(key, "unknown key");
}

void apply_text(RunConfig& cfg, const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("", origin + ":" + std::to_string(lineno) + ": empty key");
    set_value(cfg, key, trim(line.substr(eq + 1)));
  }
}

void apply_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_text(cfg, ss.str(), path);
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("", "--set expects key=value, got '" + assignment + "'");
  set_value(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

}  // namespace fracwave::config
