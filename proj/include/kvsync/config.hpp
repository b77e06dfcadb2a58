#pragma once

// Flat `key = value` config files for ModelParams.
//
//   # comment
//   gamma_noise = 1
//   variant = Unnormalised
//   potential = [1, 0.5]
//
// Unknown keys are rejected. When variant, radius or dimension are given but
// kappa0 is not, kappa0 is re-derived from them.

#include "kvsync/model.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace kvsync {

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(int line, const std::string& what)
      : std::invalid_argument("config line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(std::string_view s, int line) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || t.empty()) {
    throw ConfigError(line, "expected a number, got '" + t + "'");
  }
  return v;
}

inline std::vector<double> parse_list(std::string_view s, int line) {
  std::string t = trim(s);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') {
    throw ConfigError(line, "expected a list '[a1, a2, ...]', got '" + t + "'");
  }
  t = t.substr(1, t.size() - 2);
  std::vector<double> out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, line));
  return out;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Applies `key = value` lines on top of `base`.
inline ModelParams parse_params(std::istream& in, ModelParams base = {}) {
  ModelParams p = std::move(base);
  bool kappa_given = false;
  bool geometry_given = false;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = detail::trim(std::string_view(raw).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    const std::string key = detail::trim(std::string_view(body).substr(0, eq));
    const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
    if (key == "gamma_noise") p.gamma_noise = detail::parse_double(value, line);
    else if (key == "tilt") p.tilt = detail::parse_double(value, line);
    else if (key == "field") p.field = detail::parse_double(value, line);
    else if (key == "coupling") p.coupling = detail::parse_double(value, line);
    else if (key == "speed") p.speed = detail::parse_double(value, line);
    else if (key == "radius") { p.radius = detail::parse_double(value, line); geometry_given = true; }
    else if (key == "kappa0") { p.kappa0 = detail::parse_double(value, line); kappa_given = true; }
    else if (key == "dimension") {
      const double d = detail::parse_double(value, line);
      if (d != 1.0 && d != 2.0) throw ConfigError(line, "dimension must be 1 or 2");
      p.dimension = static_cast<int>(d);
      geometry_given = true;
    } else if (key == "variant") {
      try {
        p.variant = parse_variant(value);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(line, e.what());
      }
      geometry_given = true;
    } else if (key == "potential") p.potential = detail::parse_list(value, line);
    else throw ConfigError(line, "unknown key '" + key + "'");
  }
  if (geometry_given && !kappa_given) p.sync_kappa();
  return p;
}

inline ModelParams parse_params(const std::string& text, ModelParams base = {}) {
  std::istringstream in(text);
  return parse_params(in, std::move(base));
}

inline ModelParams load_params(const std::string& path, ModelParams base = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  return parse_params(in, std::move(base));
}

/// Full-precision serialization; parse_params(serialize_params(p)) == p.
inline std::string serialize_params(const ModelParams& p) {
  std::ostringstream out;
  out << "gamma_noise = " << detail::format_double(p.gamma_noise) << '\n'
      << "tilt = " << detail::format_double(p.tilt) << '\n'
      << "field = " << detail::format_double(p.field) << '\n'
      << "coupling = " << detail::format_double(p.coupling) << '\n'
      << "speed = " << detail::format_double(p.speed) << '\n'
      << "radius = " << detail::format_double(p.radius) << '\n'
      << "dimension = " << p.dimension << '\n'
      << "variant = " << to_string(p.variant) << '\n'
      << "kappa0 = " << detail::format_double(p.kappa0) << '\n'
      << "potential = [";
  for (std::size_t i = 0; i < p.potential.size(); ++i) {
    if (i) out << ", ";
    out << detail::format_double(p.potential[i]);
  }
  out << "]\n";
  return out.str();
}

}  // namespace kvsync
