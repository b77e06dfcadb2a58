#pragma once

// Command-line driver. `run_cli` parses argv, runs one subcommand, writes its
// data files plus a metadata JSON into the output directory and returns the
// process exit status. Errors end in one JSON line on the error stream:
//   {"error":"<kind>","message":"<text>"}
//
// Exit codes: 0 success, 2 usage or config error, 3 solver error,
// 4 a reproduce check failed under --strict.

#include "kvsync/config.hpp"
#include "kvsync/experiments.hpp"
#include "kvsync/galerkin.hpp"
#include "kvsync/io.hpp"
#include "kvsync/kato.hpp"
#include "kvsync/linstab.hpp"
#include "kvsync/pde.hpp"
#include "kvsync/stationary.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace kvsync::cli {

namespace fs = std::filesystem;

enum class OutputFormat { Csv, Json };

struct ParamFlags {
  std::string config_path;
  double gamma_noise = 1.0, tilt = 0.0, field = 0.0, coupling = 1.0, speed = 0.0, radius = 0.2, kappa0 = 1.0;
  int dimension = 2;
  std::string variant;
  std::vector<double> potential;
  CLI::Option *o_gamma_noise{}, *o_tilt{}, *o_field{}, *o_coupling{}, *o_speed{}, *o_radius{}, *o_kappa0{},
      *o_dimension{}, *o_variant{}, *o_potential{};
};

struct Common {
  std::string output_dir;
  std::string format = "csv";
  unsigned seed = 42;
  int threads = 0;
};

inline void add_param_flags(CLI::App* sub, ParamFlags& f) {
  sub->add_option("--config", f.config_path, "key = value parameter file (flags override it)");
  f.o_gamma_noise = sub->add_option("--gamma-noise", f.gamma_noise, "angular diffusion Gamma");
  f.o_tilt = sub->add_option("--tilt", f.tilt, "tilt F");
  f.o_field = sub->add_option("--field,--h", f.field, "confining field h");
  f.o_coupling = sub->add_option("--coupling", f.coupling, "alignment strength gamma");
  f.o_speed = sub->add_option("--speed", f.speed, "self-propulsion speed v0");
  f.o_radius = sub->add_option("--radius", f.radius, "interaction radius R");
  f.o_dimension = sub->add_option("--dimension", f.dimension, "spatial dimension convention (1 or 2)");
  f.o_variant = sub->add_option("--variant", f.variant, "FullyNormalised | Unnormalised | PartialTheta | PartialX");
  f.o_kappa0 = sub->add_option("--kappa0", f.kappa0, "kernel mass (derived from the variant when omitted)");
  f.o_potential = sub->add_option("--potential", f.potential, "potential coefficients a_1 ... a_n")->delimiter(',');
}

inline void add_common_flags(CLI::App* sub, Common& c) {
  sub->add_option("--output-dir,-o", c.output_dir, "output directory (default $KVSYNC_OUTPUT_DIR or .)");
  sub->add_option("--format", c.format, "data file format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--seed", c.seed, "seed for random initial densities");
  sub->add_option("--threads", c.threads, "worker threads for sweeps (0 = all cores)");
}

inline ModelParams resolve_params(const ParamFlags& f) {
  ModelParams p;
  if (!f.config_path.empty()) p = load_params(f.config_path);
  bool geometry = false;
  if (f.o_gamma_noise->count()) p.gamma_noise = f.gamma_noise;
  if (f.o_tilt->count()) p.tilt = f.tilt;
  if (f.o_field->count()) p.field = f.field;
  if (f.o_coupling->count()) p.coupling = f.coupling;
  if (f.o_speed->count()) p.speed = f.speed;
  if (f.o_radius->count()) { p.radius = f.radius; geometry = true; }
  if (f.o_dimension->count()) { p.dimension = f.dimension; geometry = true; }
  if (f.o_variant->count()) { p.variant = parse_variant(f.variant); geometry = true; }
  if (f.o_potential->count()) p.potential = f.potential;
  if (f.o_kappa0->count()) p.kappa0 = f.kappa0;
  else if (geometry) p.sync_kappa();
  p.validate();
  return p;
}

class Emitter {
 public:
  Emitter(const Common& c, std::string command, std::ostream& out)
      : command_(std::move(command)), out_(out), start_(std::chrono::steady_clock::now()) {
    std::string dir = c.output_dir;
    if (dir.empty()) {
      const char* env = std::getenv("KVSYNC_OUTPUT_DIR");
      dir = env && *env ? env : ".";
    }
    dir_ = dir;
    fs::create_directories(dir_);
    format_ = c.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
  }

  const fs::path& dir() const { return dir_; }

  void table(const CsvTable& t, const fs::path& subdir = {}) {
    const fs::path base = subdir.empty() ? dir_ : dir_ / subdir;
    fs::create_directories(base);
    fs::path path;
    if (format_ == OutputFormat::Csv) {
      path = base / (t.name + ".csv");
      t.write(path);
    } else {
      path = base / (t.name + ".json");
      Json j;
      j["schema_version"] = kSchemaVersion;
      j["columns"] = t.header;
      Json rows = Json::array();
      for (const auto& r : t.rows) {
        Json row = Json::array();
        for (const auto& cell : r) {
          char* end = nullptr;
          const double v = std::strtod(cell.c_str(), &end);
          if (!cell.empty() && end && *end == '\0') row.push_back(v);
          else row.push_back(cell);
        }
        rows.push_back(std::move(row));
      }
      j["rows"] = std::move(rows);
      write_json(path, j);
    }
    files_.push_back(fs::relative(path, dir_).generic_string());
  }

  void json_file(const std::string& stem, const Json& j) {
    const auto path = dir_ / (stem + ".json");
    Json body = j;
    body["schema_version"] = kSchemaVersion;
    write_json(path, body);
    files_.push_back(stem + ".json");
  }

  /// Writes <command>_metadata.json with resolved parameters, files and timing.
  void metadata(const ModelParams& params, Json extra = Json::object()) {
    extra["files"] = files_;
    extra["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    extra["timestamp"] = static_cast<long long>(std::time(nullptr));
    write_json(dir_ / (command_ + "_metadata.json"), run_metadata(command_, params, std::move(extra)));
  }

  std::ostream& out() { return out_; }

 private:
  std::string command_;
  std::ostream& out_;
  fs::path dir_;
  OutputFormat format_ = OutputFormat::Csv;
  std::vector<std::string> files_;
  std::chrono::steady_clock::time_point start_;
};

inline void emit_error(std::ostream& err, const std::string& kind, const std::string& message) {
  Json j{{"error", kind}, {"message", message}};
  err << j.dump() << std::endl;
}

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(j)] = n == 1 ? a : a + (b - a) * j / (n - 1);
  return v;
}

inline int run_cli(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Mean-field Kuramoto-Vicsek solver suite with tilt and confining field"};
  app.set_help_flag("--help", "print this help message and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", kSuiteVersion);

  // One flag set per subcommand; option handles are not shared.
  std::map<std::string, ParamFlags> flags;
  Common common;
  auto add_params = [&](CLI::App* sub) { add_param_flags(sub, flags[sub->get_name()]); };

  // stationary
  auto* s_stat = app.add_subcommand("stationary", "self-consistent stationary state");
  add_params(s_stat);
  add_common_flags(s_stat, common);
  int stat_modes = 32, stat_quad = 512, stat_iter = 10000, stat_spatial = 0;
  double stat_tol = 1e-10, stat_damping = 1.0;
  std::string stat_rule = "spectral", stat_init = "uniform";
  s_stat->add_option("--max-mode", stat_modes, "angular modes N");
  s_stat->add_option("--quad-points", stat_quad, "quadrature nodes");
  s_stat->add_option("--tol", stat_tol, "L1 fixed-point tolerance");
  s_stat->add_option("--max-iter", stat_iter, "iteration cap");
  s_stat->add_option("--damping", stat_damping, "mixing factor in (0, 1]");
  s_stat->add_option("--rule", stat_rule, "periodic integral rule")->check(CLI::IsMember({"spectral", "trapezoid"}));
  s_stat->add_option("--init", stat_init, "initial density")->check(CLI::IsMember({"uniform", "cosine", "random"}));
  s_stat->add_option("--spatial-modes", stat_spatial, "solve on periodic x with K spatial modes (requires speed 0)");

  // thresholds
  auto* s_thr = app.add_subcommand("thresholds", "closed-form critical couplings for all four variants");
  add_params(s_thr);
  add_common_flags(s_thr, common);

  // dispersion
  auto* s_disp = app.add_subcommand("dispersion", "growth rates Re/Im lambda_m(|k|) of the uniform state");
  add_params(s_disp);
  add_common_flags(s_disp, common);
  double disp_kmax = 40.0;
  int disp_points = 201, disp_mmax = 3;
  s_disp->add_option("--k-max", disp_kmax, "largest |k|");
  s_disp->add_option("--k-points", disp_points, "number of |k| samples");
  s_disp->add_option("--m-max", disp_mmax, "angular modes -m_max..m_max (0 excluded)");

  // kato
  auto* s_kato = app.add_subcommand("kato", "perturbative coefficients and gamma_c(h)");
  add_params(s_kato);
  add_common_flags(s_kato, common);

  // branch
  auto* s_branch = app.add_subcommand("branch", "Galerkin eigenvalue branch lambda(h)");
  add_params(s_branch);
  add_common_flags(s_branch, common);
  double br_hmax = 0.2;
  int br_steps = 20, br_modes = 32;
  s_branch->add_option("--h-max", br_hmax, "largest field value");
  s_branch->add_option("--steps", br_steps, "grid intervals on [0, h_max]");
  s_branch->add_option("--max-mode", br_modes, "Galerkin truncation N");

  // critical
  auto* s_crit = app.add_subcommand("critical", "numerical critical coupling by bisection");
  add_params(s_crit);
  add_common_flags(s_crit, common);
  int crit_modes = 32;
  double crit_tol = 1e-10;
  s_crit->add_option("--max-mode", crit_modes, "Galerkin truncation N");
  s_crit->add_option("--tol", crit_tol, "tolerance on |Re lambda|");

  // evolve-angular
  auto* s_ea = app.add_subcommand("evolve-angular", "time integration on the circle");
  add_params(s_ea);
  add_common_flags(s_ea, common);
  EvolveConfig ea_cfg;
  std::string ea_init = "sine";
  s_ea->add_option("--n-theta", ea_cfg.n_theta, "angular grid size");
  s_ea->add_option("--dt", ea_cfg.dt, "time step");
  s_ea->add_option("--t-max", ea_cfg.t_max, "final time");
  s_ea->add_option("--steady-tol", ea_cfg.steady_tol, "early exit threshold on the L1 change per unit time (<= 0 disables)");
  s_ea->add_option("--record-every", ea_cfg.record_every, "sampling interval of r(t)");
  s_ea->add_option("--init", ea_init, "initial density")->check(CLI::IsMember({"sine", "uniform", "random"}));

  // evolve-spatial
  auto* s_es = app.add_subcommand("evolve-spatial", "time integration on periodic x times the circle");
  add_params(s_es);
  add_common_flags(s_es, common);
  EvolveConfig es_cfg;
  es_cfg.n_theta = 40;
  es_cfg.t_max = 250.0;
  bool es_no_dealias = false;
  s_es->add_option("--n-theta", es_cfg.n_theta, "angular grid size");
  s_es->add_option("--n-x", es_cfg.n_x, "spatial grid size");
  s_es->add_option("--dt", es_cfg.dt, "time step");
  s_es->add_option("--t-max", es_cfg.t_max, "final time");
  s_es->add_option("--steady-tol", es_cfg.steady_tol, "early exit threshold (<= 0 disables)");
  s_es->add_option("--record-every", es_cfg.record_every, "sampling interval of r(t)");
  s_es->add_flag("--no-dealias", es_no_dealias, "disable the 2/3 rule");

  // sweep
  auto* s_sweep = app.add_subcommand("sweep", "Re/Im lambda_+ and gamma_c over a (gamma, h, F) grid");
  add_params(s_sweep);
  add_common_flags(s_sweep, common);
  std::vector<double> sw_gammas, sw_hs, sw_tilts;
  int sw_modes = 32;
  s_sweep->add_option("--gammas", sw_gammas, "coupling values")->delimiter(',');
  s_sweep->add_option("--hs", sw_hs, "field values")->delimiter(',');
  s_sweep->add_option("--tilts", sw_tilts, "tilt values")->delimiter(',');
  s_sweep->add_option("--max-mode", sw_modes, "Galerkin truncation N");

  // dominance
  auto* s_dom = app.add_subcommand("dominance", "k = 0 dominance of the spatial Galerkin operator");
  add_params(s_dom);
  add_common_flags(s_dom, common);
  int dom_samples = 12, dom_modes = 32;
  std::vector<double> dom_speeds{0.0, 0.1, 0.5};
  double dom_k = kTwoPi;
  s_dom->add_option("--samples", dom_samples, "number of W(k)/kappa0 values in [0, 1)");
  s_dom->add_option("--speeds", dom_speeds, "v0 values")->delimiter(',');
  s_dom->add_option("--k", dom_k, "wavenumber magnitude along x");
  s_dom->add_option("--max-mode", dom_modes, "Galerkin truncation N");

  // reproduce
  auto* s_rep = app.add_subcommand("reproduce", "regenerate the data behind a figure or table");
  add_common_flags(s_rep, common);
  std::string rep_id;
  bool rep_strict = false;
  ReproduceOptions rep_opt;
  s_rep->add_option("figure", rep_id, "fig1..fig7 or table1")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "table1"}));
  s_rep->add_option("--angular-dt", rep_opt.angular_dt, "time step of angular evolutions");
  s_rep->add_option("--spatial-dt", rep_opt.spatial_dt, "time step of spatial evolutions");
  s_rep->add_flag("--strict", rep_strict, "exit with status 4 when a check fails");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::Success& e) {
    out << kSuiteVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "usage", e.what());
    return 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string cmd = sub->get_name();

    if (cmd == "reproduce") {
      rep_opt.threads = common.threads;
      rep_opt.seed = common.seed;
      Emitter em(common, "reproduce_" + rep_id, out);
      const auto res = reproduce(rep_id, rep_opt);
      for (const auto& t : res.tables) em.table(t, rep_id);
      Json checks = Json::array();
      for (const auto& c : res.checks) {
        out << (c.pass ? "PASS " : "FAIL ") << c.name << " :: " << c.detail << "\n";
        checks.push_back(Json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
      }
      Json extra{{"figure", rep_id}, {"checks", checks}, {"all_pass", res.all_pass()}, {"summary", res.summary}};
      extra["options"] = Json{{"angular_dt", rep_opt.angular_dt}, {"spatial_dt", rep_opt.spatial_dt}};
      em.metadata(ModelParams{}, extra);
      return (rep_strict && !res.all_pass()) ? 4 : 0;
    }

    const ModelParams p = resolve_params(flags.at(cmd));
    Emitter em(common, cmd, out);

    if (cmd == "stationary") {
      SelfConsistencyConfig sc{stat_quad, stat_tol, stat_iter, stat_damping,
                               stat_rule == "spectral" ? QuadratureRule::Spectral : QuadratureRule::Trapezoid};
      std::mt19937_64 rng(common.seed);
      AngularDensity init = AngularDensity::uniform(stat_modes);
      if (stat_init == "cosine") {
        FourierSeries s = init.series();
        s.set(1, cplx{0.05, 0.0});
        init = AngularDensity(std::move(s));
      } else if (stat_init == "random") {
        init = random_density(rng, stat_modes);
      }
      Json extra{{"config", to_json(sc)}, {"init", stat_init}, {"seed", common.seed}};
      if (stat_spatial > 0) {
        const auto kernel = top_hat_kernel(p, stat_spatial);
        const auto res = solve_stationary_spatial(p, kernel, sc, SpatialAngularDensity::homogeneous(init, stat_spatial));
        em.table(spatial_density_table(res.density, "stationary_spatial_density"));
        extra["iterations"] = res.iterations;
        extra["residual"] = res.residual;
        extra["order_parameter"] = order_parameter(res.density);
        out << "iterations=" << res.iterations << " residual=" << format_number(res.residual)
            << " r=" << format_number(order_parameter(res.density)) << "\n";
      } else {
        const auto res = solve_stationary_homogeneous(p, sc, init);
        em.table(density_table(res.density, "stationary_density"));
        const auto m1 = moments(res.density, 1);
        extra["iterations"] = res.iterations;
        extra["residual"] = res.residual;
        extra["r1c"] = m1.cos_moment;
        extra["r1s"] = m1.sin_moment;
        extra["order_parameter"] = m1.magnitude();
        em.json_file("stationary", Json{{"params", to_json(p)}, {"iterations", res.iterations}, {"residual", res.residual},
                                        {"r1c", m1.cos_moment}, {"r1s", m1.sin_moment}});
        out << "iterations=" << res.iterations << " residual=" << format_number(res.residual)
            << " r1c=" << format_number(m1.cos_moment) << " r1s=" << format_number(m1.sin_moment) << "\n";
      }
      em.metadata(p, extra);
    } else if (cmd == "thresholds") {
      CsvTable t("thresholds", {"variant", "dimension", "gamma_c"});
      out << "variant,dimension,gamma_c\n";
      for (auto v : kAllVariants) {
        const auto r = critical_coupling_h0(v, p.gamma_noise, p.radius, p.dimension);
        t.add_row({std::string(to_string(v)), static_cast<long long>(p.dimension), r.gamma_c});
        out << to_string(v) << "," << p.dimension << "," << format_number(r.gamma_c) << "\n";
      }
      em.table(t);
      em.metadata(p);
    } else if (cmd == "dispersion") {
      std::vector<int> modes;
      for (int m = -disp_mmax; m <= disp_mmax; ++m)
        if (m != 0) modes.push_back(m);
      const auto rows = dispersion_curve(linspace(0.0, disp_kmax, disp_points), modes, p, p.dimension);
      em.table(dispersion_table(rows, "dispersion"));
      em.metadata(p, Json{{"k_max", disp_kmax}, {"k_points", disp_points}, {"m_max", disp_mmax}});
      out << "wrote " << rows.size() << " rows\n";
    } else if (cmd == "kato") {
      const auto pc = perturbation_coeffs(p);
      Json records = Json::array();
      for (auto mode : {PerturbativeMode::LeadingOrder, PerturbativeMode::SelfConsistentAlpha}) {
        const auto t = gamma_c_perturbative(p.field, p.tilt, p.gamma_noise, mode, p.kappa0, p.variant);
        records.push_back(Json{{"h", p.field},
                               {"gamma_c", t.gamma_c},
                               {"mode", std::string(to_string(mode))},
                               {"F", p.tilt},
                               {"Gamma", p.gamma_noise},
                               {"lambda0", to_json(pc.lambda0)},
                               {"lambda2", to_json(pc.lambda2)}});
      }
      Json body{{"records", records},
                {"alpha", pc.alpha},
                {"A", pc.A},
                {"B", pc.B},
                {"c1", to_json(pc.c1)},
                {"a", to_json(pc.a_coeff)},
                {"b", to_json(pc.b_coeff)}};
      em.json_file("kato", body);
      em.metadata(p);
      out << records.dump(2) << "\n";
    } else if (cmd == "branch") {
      if (br_steps < 1) throw std::invalid_argument("--steps must be >= 1");
      const auto br = eigen_branch(p, linspace(0.0, br_hmax, br_steps + 1), br_modes);
      const cplx l2 = lambda2(p);
      em.table(branch_table(br, l2, "branch"));
      em.metadata(p, Json{{"h_max", br_hmax}, {"steps", br_steps}, {"max_mode", br_modes}, {"tie_points", br.tie_points},
                          {"lambda2", to_json(l2)}});
      out << "lambda(h_max) = " << format_number(br.lambdas.back().real()) << " "
          << format_number(br.lambdas.back().imag()) << "i\n";
    } else if (cmd == "critical") {
      const auto t = critical_coupling_numeric(p.field, p, crit_modes, crit_tol);
      em.json_file("critical", Json{{"h", p.field}, {"threshold", to_json(t)}, {"tol", crit_tol}});
      em.metadata(p, Json{{"max_mode", crit_modes}, {"tol", crit_tol}});
      out << "gamma_c = " << format_number(t.gamma_c) << "\n";
    } else if (cmd == "evolve-angular") {
      const int N = ea_cfg.n_theta / 2 - 1;
      std::mt19937_64 rng(common.seed);
      AngularDensity init = ea_init == "sine"      ? sine_bump_density(N)
                            : ea_init == "uniform" ? AngularDensity::uniform(N)
                                                   : random_density(rng, N);
      const auto tr = evolve_angular(p, init, ea_cfg);
      em.table(trajectory_table(tr, "trajectory"));
      em.table(density_table(tr.final_state, "profile"));
      em.metadata(p, Json{{"config", to_json(ea_cfg)}, {"init", ea_init}, {"converged", tr.converged},
                          {"residual", tr.residual}, {"final_time", tr.final_time}});
      out << "t=" << format_number(tr.final_time) << " r=" << format_number(tr.order_params.back())
          << " converged=" << (tr.converged ? "true" : "false") << "\n";
    } else if (cmd == "evolve-spatial") {
      es_cfg.dealias = !es_no_dealias;
      const auto tr = evolve_spatial(p, cosine_wave_density(es_cfg.n_x / 2 - 1, es_cfg.n_theta / 2 - 1), es_cfg);
      em.table(trajectory_table(tr, "trajectory"));
      em.table(spatial_density_table(tr.final_state, "profile", es_cfg.n_x, 64));
      em.metadata(p, Json{{"config", to_json(es_cfg)}, {"converged", tr.converged}, {"residual", tr.residual},
                          {"final_time", tr.final_time}});
      out << "t=" << format_number(tr.final_time) << " r=" << format_number(tr.order_params.back())
          << " converged=" << (tr.converged ? "true" : "false") << "\n";
    } else if (cmd == "sweep") {
      if (sw_gammas.empty() && sw_hs.empty() && sw_tilts.empty()) {
        throw std::invalid_argument("sweep needs at least one of --gammas, --hs, --tilts");
      }
      if (sw_gammas.empty()) sw_gammas = {p.coupling};
      if (sw_hs.empty()) sw_hs = {p.field};
      if (sw_tilts.empty()) sw_tilts = {p.tilt};
      std::set<std::tuple<double, double, double>> pts;
      for (double g : sw_gammas)
        for (double h : sw_hs)
          for (double F : sw_tilts) pts.emplace(g, h, F);
      const std::vector<std::tuple<double, double, double>> grid(pts.begin(), pts.end());
      auto rows = parallel_map(static_cast<int>(grid.size()), common.threads, [&](int j) {
        auto [g, h, F] = grid[static_cast<std::size_t>(j)];
        ModelParams q = p;
        q.coupling = g;
        q.field = h;
        q.tilt = F;
        const cplx lam = eigen_branch(q, continuation_grid(h), sw_modes).lambdas.back();
        const double gp = F > 0.0 ? gamma_c_perturbative(h, F, q.gamma_noise, PerturbativeMode::LeadingOrder, q.kappa0).gamma_c
                                  : std::numeric_limits<double>::quiet_NaN();
        return std::array<double, 6>{g, h, F, lam.real(), lam.imag(), gp};
      });
      CsvTable t("sweep", {"gamma", "h", "F", "re_lambda", "im_lambda", "gamma_c_pert"});
      for (const auto& r : rows) t.add_row({r[0], r[1], r[2], r[3], r[4], r[5]});
      em.table(t);
      em.metadata(p, Json{{"gammas", sw_gammas}, {"hs", sw_hs}, {"tilts", sw_tilts}, {"max_mode", sw_modes}});
      out << "wrote " << rows.size() << " sweep points\n";
    } else if (cmd == "dominance") {
      CsvTable t("dominance", {"v0", "kernel_ratio", "max_re_k", "max_re_0", "gap"});
      int violations = 0;
      for (double v0 : dom_speeds) {
        ModelParams q = p;
        q.speed = v0;
        const double base = max_real_eigenvalue(assemble_Mh_spatial(q, q.field, {0.0, 0.0}, q.kappa0, dom_modes));
        for (int j = 0; j < dom_samples; ++j) {
          const double ratio = static_cast<double>(j) / dom_samples;
          const double top = max_real_eigenvalue(assemble_Mh_spatial(q, q.field, {dom_k, 0.0}, ratio * q.kappa0, dom_modes));
          if (!(top < base)) ++violations;
          t.add_row({v0, ratio, top, base, top - base});
        }
      }
      em.table(t);
      std::vector<double> ks = linspace(0.0, 50.0, 101);
      CsvTable g("dominance_gap", {"k", "gap"});
      for (const auto& [k, gap] : dominance_gap(ks, p, p.dimension)) g.add_row({k, gap});
      em.table(g);
      em.metadata(p, Json{{"violations", violations}, {"k", dom_k}, {"speeds", dom_speeds}});
      out << "violations=" << violations << "\n";
    }
    return 0;
  } catch (const ConfigError& e) {
    emit_error(err, "config", e.what());
    return 2;
  } catch (const SolverError& e) {
    emit_error(err, e.kind(), e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    emit_error(err, "invalid_argument", e.what());
    return 2;
  } catch (const std::exception& e) {
    emit_error(err, "runtime", e.what());
    return 3;
  }
}

}  // namespace kvsync::cli
