#pragma once

// CSV tables and JSON records for solver output.

#include "kvsync/config.hpp"
#include "kvsync/galerkin.hpp"
#include "kvsync/linstab.hpp"
#include "kvsync/model.hpp"
#include "kvsync/pde.hpp"
#include "kvsync/stationary.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace kvsync {

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kSuiteVersion = "1.0.0";

using Json = nlohmann::ordered_json;

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Comma-separated table with a header row. Cells are pre-formatted strings.
struct CsvTable {
  using Cell = std::variant<double, long long, std::string>;

  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  CsvTable() = default;
  CsvTable(std::string stem, std::vector<std::string> columns) : name(std::move(stem)), header(std::move(columns)) {}

  void add_row(const std::vector<Cell>& cells) {
    if (cells.size() != header.size()) throw std::invalid_argument("CsvTable: row width does not match header");
    std::vector<std::string> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      if (const auto* d = std::get_if<double>(&c)) row.push_back(format_number(*d));
      else if (const auto* i = std::get_if<long long>(&c)) row.push_back(std::to_string(*i));
      else row.push_back(std::get<std::string>(c));
    }
    rows.push_back(std::move(row));
  }

  std::string str() const {
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "," : "") << r[j];
      out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out.str();
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    f << str();
  }
};

inline Json to_json(cplx z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

inline Json to_json(const ModelParams& p) {
  return Json{{"gamma_noise", p.gamma_noise}, {"tilt", p.tilt},         {"field", p.field},
              {"coupling", p.coupling},       {"speed", p.speed},       {"radius", p.radius},
              {"dimension", p.dimension},     {"variant", std::string(to_string(p.variant))},
              {"kappa0", p.kappa0},           {"potential", p.potential}};
}

inline Json to_json(const SelfConsistencyConfig& c) {
  return Json{{"quad_points", c.quad_points},
              {"tol", c.tol},
              {"max_iter", c.max_iter},
              {"damping", c.damping},
              {"rule", c.rule == QuadratureRule::Spectral ? "spectral" : "trapezoid"}};
}

inline Json to_json(const EvolveConfig& c) {
  return Json{{"n_theta", c.n_theta}, {"n_x", c.n_x},           {"dt", c.dt},
              {"t_max", c.t_max},     {"steady_tol", c.steady_tol}, {"dealias", c.dealias}};
}

inline Json to_json(const ThresholdResult& t) {
  return Json{{"gamma_c", t.gamma_c},
              {"variant", std::string(to_string(t.variant))},
              {"dimension", t.dimension},
              {"method", std::string(to_string(t.method))}};
}

/// theta, rho(theta) on an m-node grid.
inline CsvTable density_table(const AngularDensity& rho, const std::string& stem, int m = 512) {
  CsvTable t(stem, {"theta", "rho"});
  const auto v = rho.sample(m);
  const auto g = uniform_grid(m);
  for (int j = 0; j < m; ++j) t.add_row({g[static_cast<std::size_t>(j)], v[static_cast<std::size_t>(j)]});
  return t;
}

/// x, theta, rho(x, theta) on an nx-by-ntheta grid.
inline CsvTable spatial_density_table(const SpatialAngularDensity& rho, const std::string& stem, int nx = 0,
                                      int ntheta = 128) {
  if (nx <= 0) nx = std::max(2 * rho.spatial_modes() + 1, 16);
  CsvTable t(stem, {"x", "theta", "rho"});
  const auto slices = rho.slices(nx);
  const auto xs = uniform_grid(nx, 1.0);
  const auto th = uniform_grid(ntheta);
  for (int i = 0; i < nx; ++i) {
    const auto v = slices[static_cast<std::size_t>(i)].sample(ntheta);
    for (int j = 0; j < ntheta; ++j) {
      t.add_row({xs[static_cast<std::size_t>(i)], th[static_cast<std::size_t>(j)], v[static_cast<std::size_t>(j)]});
    }
  }
  return t;
}

template <class State>
CsvTable trajectory_table(const Trajectory<State>& tr, const std::string& stem) {
  CsvTable t(stem, {"t", "r"});
  for (std::size_t j = 0; j < tr.times.size(); ++j) t.add_row({tr.times[j], tr.order_params[j]});
  return t;
}

inline CsvTable dispersion_table(const std::vector<ModeGrowth>& rows, const std::string& stem) {
  CsvTable t(stem, {"k", "m", "re_lambda", "im_lambda"});
  for (const auto& g : rows) t.add_row({g.spatial_mode, static_cast<long long>(g.angular_mode), g.re_lambda, g.im_lambda});
  return t;
}

/// h, numerical branch and its second-order prediction lambda0 + h^2 lambda2.
inline CsvTable branch_table(const EigenBranch& br, cplx lambda2_value, const std::string& stem) {
  CsvTable t(stem, {"h", "re_lambda", "im_lambda", "re_lambda_pert", "im_lambda_pert"});
  for (std::size_t j = 0; j < br.h_grid.size(); ++j) {
    const double h = br.h_grid[j];
    const cplx pert = br.start + h * h * lambda2_value;
    t.add_row({h, br.lambdas[j].real(), br.lambdas[j].imag(), pert.real(), pert.imag()});
  }
  return t;
}

/// Metadata record written next to every data file.
inline Json run_metadata(const std::string& command, const ModelParams& params, Json extra = Json::object()) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["suite_version"] = kSuiteVersion;
  j["command"] = command;
  j["params"] = to_json(params);
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  return j;
}

inline void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << j.dump(2) << '\n';
}

}  // namespace kvsync
