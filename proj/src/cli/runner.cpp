#include "runner.hpp"

#include <boost/version.hpp>
#include <openssl/evp.h>
#include <openssl/opensslv.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "svg.hpp"

namespace urysohn::cli {

namespace {

using json = nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string eigen_version() {
  return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
         std::to_string(EIGEN_MINOR_VERSION);
}

std::string boost_version() {
  return std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." +
         std::to_string(BOOST_VERSION % 100);
}

ExperimentOptions experiment_options(const RunConfig& cfg) {
  ExperimentOptions o;
  o.sample_count = cfg.sample_count;
  o.cap = cfg.cap;
  o.random_members = cfg.random_members;
  o.seed = cfg.seed;
  o.tol = cfg.tol;
  o.max_iter = cfg.max_iter;
  o.workers = cfg.workers;
  return o;
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error("cannot write '" + path.string() + "'");
  out << data;
  if (!out)
    throw Error("write failed for '" + path.string() + "'");
}

json stage_json(const StageSummary<double>& s) {
  return {{"max_excess_measure", s.max_excess_measure},
          {"max_truncation_sup", s.max_truncation_sup},
          {"max_steklov_l2_change", s.max_steklov_l2_change},
          {"min_eta", s.min_eta},
          {"max_cell_sup", s.max_cell_sup},
          {"max_magnitude_sup", s.max_magnitude_sup},
          {"max_direction_sup", s.max_direction_sup},
          {"truncation_violations", s.truncation_violations},
          {"cell_violations", s.cell_violations},
          {"magnitude_violations", s.magnitude_violations},
          {"direction_violations", s.direction_violations},
          {"resource_violations", s.resource_violations},
          {"membership_violations", s.membership_violations}};
}

} // namespace

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{"epsilon", "alpha_star", "Delta_star", "delta_star",
                                             "sigma_star", "c_star", "g1", "g2",
                                             "bound", "sampled_max_distance", "pass"};
  return cols;
}

bool RunResult::all_passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const EpsilonResult& r) { return r.report.passed; });
}

double resolve_R_star(const RunConfig& cfg, const SystemSpec<double>& sys, const GridDiscretization<double>& grid,
                      double alpha_star, bool& estimated) {
  estimated = !cfg.R_star;
  if (cfg.R_star)
    return *cfg.R_star;
  return estimate_R_star(sys, grid, alpha_star, std::min<std::size_t>(cfg.sample_count, 64), cfg.seed, cfg.workers);
}

RunResult run_experiment(const RunConfig& cfg, std::ostream* log) {
  const auto start = std::chrono::steady_clock::now();
  const auto sys = make_system(cfg);
  const auto base = build_grid(sys.domain, cfg.resolution);
  RunResult result;
  result.system_name = sys.name;
  result.constants = compute_constants(sys, base);
  const auto opt = experiment_options(cfg);
  for (double eps : cfg.epsilons) {
    EpsilonResult row;
    const auto probe = schedule(result.constants, eps, 1.0, cfg.tau_cap);
    const double R = resolve_R_star(cfg, sys, base, probe.alpha_star, row.R_star_estimated);
    row.schedule = schedule(result.constants, eps, R, cfg.tau_cap);
    const auto fam = build_family(sys, row.schedule, cfg.resolution);
    row.report = verify_theorem(sys, result.constants, row.schedule, fam, opt);
    if (log)
      *log << "eps=" << fmt(eps) << " mode=" << to_string(row.report.mode)
           << " finite=" << row.report.finite_set_size << " max_distance=" << fmt(row.report.sampled_max_distance)
           << " bound=" << fmt(row.report.bound) << (row.report.passed ? " pass" : " FAIL")
           << " time=" << std::fixed << std::setprecision(2) << row.report.wall_time << "s" << std::defaultfloat
           << '\n';
    result.rows.push_back(std::move(row));
  }
  result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string results_csv(const RunResult& result) {
  std::string out;
  for (std::size_t i = 0; i < csv_columns().size(); ++i)
    out += (i ? "," : "") + csv_columns()[i];
  out += '\n';
  for (const auto& r : result.rows) {
    const auto& s = r.schedule;
    const auto& c = result.constants;
    out += fmt(s.epsilon) + ',' + fmt(s.alpha_star) + ',' + fmt(s.Delta_star) + ',' + fmt(s.delta_star) + ',' +
           fmt(s.sigma_star) + ',' + fmt(c.c_star) + ',' + fmt(c.g1) + ',' + fmt(c.g2) + ',' + fmt(r.report.bound) +
           ',' + fmt(r.report.sampled_max_distance) + ',' + (r.report.passed ? "true" : "false") + '\n';
  }
  return out;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 computation failed");
  std::ostringstream o;
  for (unsigned int i = 0; i < len; ++i)
    o << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return o.str();
}

std::string manifest_json(const RunConfig& cfg, const RunResult& result) {
  const auto& c = result.constants;
  json m;
  m["tool"] = {{"name", "urysohn"}, {"version", kToolVersion}};
  m["versions"] = {{"eigen", eigen_version()},
                   {"boost", boost_version()},
                   {"openssl", OPENSSL_VERSION_TEXT},
                   {"compiler", __VERSION__}};
  m["config_sha256"] = sha256_hex(cfg.source);
  m["seed"] = cfg.seed;
  m["csv"] = {{"columns_version", kCsvColumnsVersion}, {"columns", csv_columns()}};
  m["inputs"] = {{"system", result.system_name},
                 {"resolution", cfg.resolution},
                 {"epsilon", cfg.epsilons},
                 {"sample_count", cfg.sample_count},
                 {"cap", cfg.cap},
                 {"random_members", cfg.random_members},
                 {"tol", cfg.tol},
                 {"max_iter", cfg.max_iter},
                 {"R_star", cfg.R_star ? json(*cfg.R_star) : json(nullptr)},
                 {"tau_cap", cfg.tau_cap ? json(*cfg.tau_cap) : json(nullptr)}};
  m["constants"] = {{"kappa0", c.contraction.kappa0},
                    {"kappa1", c.contraction.kappa1},
                    {"kappa2", c.contraction.kappa2},
                    {"mu_E", c.contraction.mu_E},
                    {"condition_value", c.contraction.condition_value},
                    {"contraction_factor", c.contraction.contraction_factor},
                    {"omega_star", c.omega_star},
                    {"M", c.M_eps},
                    {"h_norm", c.h_norm},
                    {"psi", c.psi},
                    {"beta_star", c.beta_star},
                    {"c_star", c.c_star},
                    {"g1", c.g1},
                    {"g2", c.g2}};
  json rows = json::array();
  for (const auto& r : result.rows) {
    const auto& s = r.schedule;
    const auto& rep = r.report;
    rows.push_back({{"epsilon", s.epsilon},
                    {"tau_star", s.tau_star},
                    {"alpha_star", s.alpha_star},
                    {"R_star", s.R_star},
                    {"R_star_estimated", r.R_star_estimated},
                    {"Delta_star", s.Delta_star},
                    {"delta_star", s.delta_star},
                    {"sigma_star", s.sigma_star},
                    {"bound", rep.bound},
                    {"sampled_max_distance", rep.sampled_max_distance},
                    {"reverse_distance", rep.reverse_distance},
                    {"generation", to_string(rep.mode)},
                    {"finite_set_size", rep.finite_set_size},
                    {"partition_cells", rep.partition_cells},
                    {"ladder_levels", rep.ladder_levels},
                    {"net_size", rep.net_size},
                    {"grid_nodes", rep.grid_nodes},
                    {"max_finite_residual", rep.max_finite_residual},
                    {"residual_violations", rep.residual_violations},
                    {"stages", stage_json(rep.stages)},
                    {"pass", rep.passed}});
  }
  m["results"] = rows;
  m["note"] = "sampled_max_distance is a maximum over sampled admissible controls and can only under-report the "
              "one-sided Hausdorff distance";
  return m.dump(2) + "\n";
}

std::string convergence_svg(const RunResult& result) {
  Series measured{"sampled max distance", "#1f77b4", {}, false};
  Series bound{"(c*+1) eps", "#d62728", {}, true};
  auto rows = result.rows;
  std::sort(rows.begin(), rows.end(),
            [](const EpsilonResult& a, const EpsilonResult& b) { return a.schedule.epsilon < b.schedule.epsilon; });
  for (const auto& r : rows) {
    measured.points.emplace_back(r.schedule.epsilon, r.report.sampled_max_distance);
    bound.points.emplace_back(r.schedule.epsilon, r.report.bound);
  }
  return loglog_svg(result.system_name + ": distance to the finite trajectory set", "epsilon", "L2 distance",
                    {measured, bound});
}

std::string dry_run_report(const RunConfig& cfg) {
  const auto sys = make_system(cfg);
  const auto base = build_grid(sys.domain, cfg.resolution);
  const auto consts = compute_constants(sys, base);
  std::ostringstream o;
  o << "system " << sys.name << ", grid " << base.size() << " nodes, c* = " << fmt(consts.c_star)
    << ", g2 = " << fmt(consts.g2) << '\n';
  for (double eps : cfg.epsilons) {
    const auto probe = schedule(consts, eps, 1.0, cfg.tau_cap);
    bool estimated = false;
    const double R = resolve_R_star(cfg, sys, base, probe.alpha_star, estimated);
    const auto s = schedule(consts, eps, R, cfg.tau_cap);
    const auto fam = build_family(sys, s, cfg.resolution);
    const auto count = count_controls(fam.partition, fam.ladder, fam.net, sys.rho, cfg.cap);
    o << "eps " << fmt(eps) << ": tau* " << fmt(s.tau_star) << ", alpha* " << fmt(s.alpha_star) << ", R* " << fmt(R)
      << (estimated ? " (estimated)" : "") << ", Delta* " << fmt(s.Delta_star) << ", delta* " << fmt(s.delta_star)
      << ", sigma* " << fmt(s.sigma_star) << ", bound " << fmt(s.bound) << '\n';
    o << "  family: " << fam.partition.size() << " cells, " << fam.ladder.levels.size() << " levels, "
      << fam.net.size() << " directions, grid " << fam.grid.size() << " nodes; ";
    if (count > cfg.cap)
      o << "more than " << cfg.cap << " controls (sampled: " << cfg.sample_count << " images + "
        << cfg.random_members << " random members)\n";
    else
      o << count << " controls (enumerated)\n";
  }
  return o.str();
}

std::string constants_table(const SystemSpec<double>& sys, Index resolution, bool& passes) {
  const auto grid = build_grid(sys.domain, resolution);
  const auto c = check_condition_2d(sys, grid);
  passes = c.passes;
  std::ostringstream o;
  auto row = [&](const std::string& name, const std::string& value, const std::string& flag = "") {
    o << std::left << std::setw(18) << name << std::right << std::setw(16) << value << flag << '\n';
  };
  o << "system " << sys.name << " on " << grid.size() << " grid nodes\n";
  row("kappa0", fmt(c.kappa0));
  row("kappa1", fmt(c.kappa1));
  row("kappa2", fmt(c.kappa2));
  row("mu(E)", fmt(c.mu_E));
  if (c.passes) {
    const auto b = compute_constants(sys, grid);
    row("omega*", fmt(b.omega_star));
    row("M", fmt(b.M_eps));
    row("beta*", fmt(b.beta_star));
    row("c*", fmt(b.c_star));
    row("g1", fmt(b.g1));
    row("g2", fmt(b.g2));
  } else {
    for (const char* name : {"omega*", "M", "beta*", "c*", "g1", "g2"})
      row(name, "n/a");
  }
  row("condition", fmt(c.condition_value), c.passes ? "  ok" : "  FAILS");
  return o.str();
}

int run_command(const RunConfig& cfg, bool dry_run, std::ostream& out, std::ostream& err) {
  try {
    if (dry_run) {
      out << dry_run_report(cfg);
      return kSuccess;
    }
    const auto result = run_experiment(cfg, &out);
    // all files written together after the experiment
    std::filesystem::create_directories(cfg.out_dir);
    const std::filesystem::path dir(cfg.out_dir);
    if (cfg.emit_csv)
      write_file(dir / "results.csv", results_csv(result));
    if (cfg.emit_json)
      write_file(dir / "manifest.json", manifest_json(cfg, result));
    if (cfg.emit_svg)
      write_file(dir / "convergence.svg", convergence_svg(result));
    out << "wall time " << std::fixed << std::setprecision(2) << result.wall_time << "s, outputs in " << cfg.out_dir
        << '\n';
    if (!result.all_passed()) {
      err << "bound violated for at least one epsilon\n";
      return kBoundViolation;
    }
    return kSuccess;
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const LookupError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "output error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

int constants_command(const std::string& system, Index resolution, std::ostream& out, std::ostream& err) {
  try {
    if (resolution < 1)
      throw ConfigError("--grid: must be >= 1");
    const auto names = builtin_system_names();
    SystemSpec<double> sys;
    if (std::find(names.begin(), names.end(), system) != names.end())
      sys = builtin_system(system);
    else if (std::filesystem::is_regular_file(system))
      sys = make_system(load_config(system));
    else
      throw LookupError("unknown system '" + system + "' (not a built-in name or a config file)");
    bool passes = false;
    out << constants_table(sys, resolution, passes);
    return passes ? kSuccess : kNumericalFailure;
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const LookupError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

} // namespace urysohn::cli
