// Copyright 2026 The ctmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CTMC_HARNESS_CONFIG_HPP
#define CTMC_HARNESS_CONFIG_HPP

#include <ctmc/errors.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace ctmc::harness {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double parse_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError{"config key '" + key + "': expected a number, got '" + text + "'"};
  }
  return value;
}

inline std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec == std::errc{} && ptr == end) return value;
  // Accept integral values written in floating-point notation, e.g. 1e4.
  const double d = parse_double(key, text);
  if (!(d >= 0.0) || d != std::floor(d) || d > 1.8e19) {
    throw ConfigError{"config key '" + key + "': expected a non-negative integer, got '" + text + "'"};
  }
  return static_cast<std::uint64_t>(d);
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss{text};
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) {
    throw ConfigError{"config key '" + key + "': empty list"};
  }
  return out;
}

inline std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

inline std::string format_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += format_double(xs[i]);
  }
  return out;
}

inline void require_one_of(const std::string& key, const std::string& value, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (value == a) return;
  }
  std::string list;
  for (const char* a : allowed) list += std::string{list.empty() ? "" : "|"} + a;
  throw ConfigError{"config key '" + key + "': '" + value + "' is not one of " + list};
}

}  // namespace detail

/// Output directory used when no `out` is configured.
inline std::string default_output_dir() {
  const char* env = std::getenv("CTMC_OUTPUT_DIR");
  return env && *env ? std::string{env} : std::string{"ctmc_out"};
}

/// Declarative description of one run. Every field has a key=value spelling.
struct ExperimentConfig {
  // Continuous-time MCMC.
  std::string algo = "reflect";
  std::string estimator = "exact";
  std::string bound = "sum";
  double T = 1000.0;
  double burn_in = 0.1;
  double refresh_rate = 1.0;
  double epsilon = 0.0;
  double hybrid_k = 5.0;
  std::string x0 = "mode";

  // Target.
  std::string target = "mixture";
  std::uint64_t n = 150;
  double p = 0.95;
  double x_true = 4.0;
  std::uint64_t dim = 1;
  std::string dataset;

  // CIS and SMC.
  std::uint64_t particles = 200;
  double h = 1.0;
  std::uint64_t steps = 100;
  double ess_threshold = 100.0;
  double rate = 12.0;
  std::string rho = "exact";
  std::string proposal = "brownian";
  double nu = 5.0;
  std::string init = "prior";
  double init_lo = -10.0;
  double init_hi = -5.0;

  // Sweeps and exports.
  std::vector<double> ns{150, 1500, 15000};
  std::vector<double> table1_T{2000, 400, 40};
  std::vector<double> xhat_offsets{0, 1, 3};
  std::uint64_t replicates = 2000;
  std::string kind = "rates_curves";
  std::uint64_t grid = 401;

  // Reproducibility and output.
  std::uint64_t seed = 2024;
  std::uint64_t stream = 0;
  std::string out = default_output_dir();

  /// Sets one field from its text form; unknown keys and malformed values raise ConfigError.
  void set(const std::string& key, const std::string& raw) {
    const std::string value = detail::trim(raw);
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) {
      throw ConfigError{"unknown config key '" + key + "'"};
    }
    it->second(*this, key, value);
  }

  /// All fields as ordered (key, value) text pairs; feeding them back through set() reproduces the config.
  [[nodiscard]] std::vector<std::pair<std::string, std::string>> entries() const {
    using detail::format_double;
    using detail::format_list;
    return {{"algo", algo},
            {"estimator", estimator},
            {"bound", bound},
            {"T", format_double(T)},
            {"burn_in", format_double(burn_in)},
            {"refresh_rate", format_double(refresh_rate)},
            {"epsilon", format_double(epsilon)},
            {"hybrid_k", format_double(hybrid_k)},
            {"x0", x0},
            {"target", target},
            {"n", std::to_string(n)},
            {"p", format_double(p)},
            {"x_true", format_double(x_true)},
            {"dim", std::to_string(dim)},
            {"dataset", dataset},
            {"particles", std::to_string(particles)},
            {"h", format_double(h)},
            {"steps", std::to_string(steps)},
            {"ess_threshold", format_double(ess_threshold)},
            {"rate", format_double(rate)},
            {"rho", rho},
            {"proposal", proposal},
            {"nu", format_double(nu)},
            {"init", init},
            {"init_lo", format_double(init_lo)},
            {"init_hi", format_double(init_hi)},
            {"ns", format_list(ns)},
            {"table1_T", format_list(table1_T)},
            {"xhat_offsets", format_list(xhat_offsets)},
            {"replicates", std::to_string(replicates)},
            {"kind", kind},
            {"grid", std::to_string(grid)},
            {"seed", std::to_string(seed)},
            {"stream", std::to_string(stream)},
            {"out", out}};
  }

  /// key=value text, one entry per line.
  [[nodiscard]] std::string to_text() const {
    std::string text;
    for (const auto& [k, v] : entries()) text += k + "=" + v + "\n";
    return text;
  }

  /// Checks value ranges and the sampler capability matrix.
  void validate() const {
    using detail::require_one_of;
    require_one_of("algo", algo, {"reflect", "bps", "zigzag"});
    require_one_of("estimator", estimator, {"exact", "simple", "nonuniform", "cv", "hybrid"});
    require_one_of("bound", bound, {"simple", "sum", "max", "cv", "hybrid", "exact"});
    require_one_of("target", target, {"mixture", "gaussian"});
    require_one_of("rho", rho, {"exact", "subsample", "cv"});
    require_one_of("proposal", proposal, {"brownian", "student"});
    require_one_of("init", init, {"prior", "posterior", "uniform"});
    require_one_of("kind", kind, {"rates_curves", "variance_curves", "posterior_hist"});
    const auto positive = [](const char* key, double v) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError{std::string{"config key '"} + key + "' must be positive"};
    };
    positive("T", T);
    positive("h", h);
    positive("rate", rate);
    positive("nu", nu);
    positive("hybrid_k", hybrid_k);
    if (!(burn_in >= 0.0 && burn_in < 1.0)) throw ConfigError{"config key 'burn_in' must be a fraction in [0, 1)"};
    if (!(epsilon >= 0.0)) throw ConfigError{"config key 'epsilon' must be non-negative"};
    if (!(refresh_rate >= 0.0)) throw ConfigError{"config key 'refresh_rate' must be non-negative"};
    if (!(p > 0.0 && p < 1.0)) throw ConfigError{"config key 'p' must lie in (0, 1)"};
    if (n == 0 || dim == 0) throw ConfigError{"config keys 'n' and 'dim' must be positive"};
    if (particles < 2) throw ConfigError{"config key 'particles' must be at least 2"};
    if (steps == 0) throw ConfigError{"config key 'steps' must be positive"};
    if (replicates < 2) throw ConfigError{"config key 'replicates' must be at least 2"};
    if (grid < 2) throw ConfigError{"config key 'grid' must be at least 2"};
    if (!(init_hi > init_lo)) throw ConfigError{"config keys need init_lo < init_hi"};
    if (table1_T.size() != ns.size()) throw ConfigError{"config key 'table1_T' needs one horizon per entry of 'ns'"};
    for (double v : ns) {
      if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError{"config key 'ns' must hold positive integers"};
    }
    for (double v : table1_T) positive("table1_T", v);

    if (algo == "bps" && !(refresh_rate > 0.0)) {
      throw ConfigError{"the bouncy particle sampler needs refresh_rate > 0"};
    }
    if (algo == "reflect" && dim > 1 && target == "gaussian" && !(refresh_rate > 0.0)) {
      throw ConfigError{"this process would be reducible: pure reflection in d > 1 needs refresh_rate > 0"};
    }
    if (target == "gaussian") {
      if (estimator != "exact" || bound != "exact") {
        throw ConfigError{"the gaussian target supports estimator=exact with bound=exact only"};
      }
      if (rho == "cv") throw ConfigError{"rho=cv needs the mixture target"};
      return;
    }
    if (bound == "exact") throw ConfigError{"bound=exact is only available for the gaussian target"};
    static const std::map<std::string, std::vector<std::string>> allowed{
        {"simple", {"exact", "simple", "nonuniform"}},
        {"sum", {"exact", "nonuniform"}},
        {"max", {"exact"}},
        {"cv", {"exact", "cv"}},
        {"hybrid", {"hybrid"}}};
    const auto& ok = allowed.at(bound);
    if (std::find(ok.begin(), ok.end(), estimator) == ok.end()) {
      throw ConfigError{"bound '" + bound + "' does not dominate the '" + estimator + "' estimator"};
    }
    if (x0 != "mode") (void)detail::parse_double("x0", x0);
  }

 private:
  using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

  template <class Member>
  static Setter text(Member member) {
    return [member](ExperimentConfig& c, const std::string&, const std::string& v) { c.*member = v; };
  }
  template <class Member>
  static Setter number(Member member) {
    return [member](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.*member = detail::parse_double(k, v);
    };
  }
  template <class Member>
  static Setter count(Member member) {
    return [member](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.*member = detail::parse_unsigned(k, v);
    };
  }
  template <class Member>
  static Setter list(Member member) {
    return [member](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.*member = detail::parse_list(k, v);
    };
  }

  static const std::map<std::string, Setter>& setters() {
    using C = ExperimentConfig;
    static const std::map<std::string, Setter> table{
        {"algo", text(&C::algo)},
        {"estimator", text(&C::estimator)},
        {"bound", text(&C::bound)},
        {"T", number(&C::T)},
        {"burn_in", number(&C::burn_in)},
        {"refresh_rate", number(&C::refresh_rate)},
        {"epsilon", number(&C::epsilon)},
        {"hybrid_k", number(&C::hybrid_k)},
        {"x0", text(&C::x0)},
        {"target", text(&C::target)},
        {"n", count(&C::n)},
        {"p", number(&C::p)},
        {"x_true", number(&C::x_true)},
        {"dim", count(&C::dim)},
        {"dataset", text(&C::dataset)},
        {"particles", count(&C::particles)},
        {"h", number(&C::h)},
        {"steps", count(&C::steps)},
        {"ess_threshold", number(&C::ess_threshold)},
        {"rate", number(&C::rate)},
        {"rho", text(&C::rho)},
        {"proposal", text(&C::proposal)},
        {"nu", number(&C::nu)},
        {"init", text(&C::init)},
        {"init_lo", number(&C::init_lo)},
        {"init_hi", number(&C::init_hi)},
        {"ns", list(&C::ns)},
        {"table1_T", list(&C::table1_T)},
        {"xhat_offsets", list(&C::xhat_offsets)},
        {"replicates", count(&C::replicates)},
        {"kind", text(&C::kind)},
        {"grid", count(&C::grid)},
        {"seed", count(&C::seed)},
        {"stream", count(&C::stream)},
        {"out", text(&C::out)}};
    return table;
  }
};

/// Parses key=value lines; blank lines and lines starting with '#' are skipped.
inline std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& is,
                                                                         const std::string& origin = "config") {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(is, line)) {
    ++number;
    const std::string body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError{origin + ":" + std::to_string(number) + ": expected key=value"};
    }
    out.emplace_back(detail::trim(body.substr(0, eq)), detail::trim(body.substr(eq + 1)));
  }
  return out;
}

/// Defaults, then the file (if any), then command-line overrides; the result is validated.
inline ExperimentConfig resolve_config(const std::string& file,
                                       const std::vector<std::pair<std::string, std::string>>& overrides) {
  ExperimentConfig config;
  if (!file.empty()) {
    std::ifstream is{file};
    if (!is) {
      throw ConfigError{"cannot open config file '" + file + "'"};
    }
    for (const auto& [k, v] : parse_key_values(is, file)) config.set(k, v);
  }
  for (const auto& [k, v] : overrides) config.set(k, v);
  config.validate();
  return config;
}

}  // namespace ctmc::harness

#endif  // CTMC_HARNESS_CONFIG_HPP
