// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "config.hpp"
#include "runner.hpp"
#include "urysohn/urysohn.hpp"

using namespace urysohn;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("criterion %2d: %s  %s (%s)\n", id, ok ? "PASS" : "FAIL", what.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Criterion 7 accumulates over every ensemble solved below.
std::size_t finite_trajectories = 0;
std::size_t residual_violations = 0;
double worst_residual = 0.0;

void oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto spec = lin1_spec();
  const auto sys = builtin_system("LIN1");
  const auto g = build_grid(sys.domain, Index(1024));
  SolveOptions o;
  o.tol = 1e-10;
  const TrajectorySolver<double> solver(sys, g, o);
  double worst = 0.0;
  for (const auto& u : sample_admissible(sys, g, 50, 2024))
    worst = std::max(worst, l2_distance(solver.solve(u).values, linear_trajectory(spec, u, g).values, g));
  const double t = seconds_since(t0);
  report(1, worst <= 1e-8 && t <= 10.0, "oracle equivalence on LIN1, 50 controls, grid 1024",
         "max L2 gap " + fmt(worst) + ", " + fmt(t) + " s");
}

void gronwall_tightness() {
  // y = 1 + 0.5 int_0^1 y solved on a grid
  const auto g = build_grid(Box<double>::unit(1), Index(100));
  GridFunction<double> y = GridFunction<double>::Zero(1, g.size());
  for (int k = 0; k < 200; ++k)
    y.setConstant(1.0 + 0.5 * integrate(y.row(0), g));
  const double equality = std::abs(gronwall_bound(1.0, 0.5) - l2_norm(y, g));
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> c_dist(0.0, 10.0), p_dist(0.0, 1.0 / std::sqrt(2.0));
  int violations = 0;
  for (int k = 0; k < 1000; ++k) {
    const double c = c_dist(rng), p = p_dist(rng);
    violations += c / (1.0 - p) > gronwall_bound(c, p);
  }
  report(2, equality <= 1e-12 && violations == 0, "Gronwall bound tight at (1, 0.5) and dominant on 1000 draws",
         "equality gap " + fmt(equality) + ", " + std::to_string(violations) + " violations");
}

void lin1_constants() {
  const auto sys = builtin_system("LIN1");
  const auto c = compute_constants(sys, build_grid(sys.domain, Index(64)));
  const bool ok = std::abs(c.c_star - 0.628539) <= 1e-6 && std::abs(c.g2 - 0.222222) <= 1e-6 &&
                  std::abs(c.contraction.condition_value - 0.06) <= 1e-12;
  char detail[128];
  std::snprintf(detail, sizeof detail, "c* %.7f, g2 %.7f, condition %.15g", c.c_star, c.g2,
                c.contraction.condition_value);
  report(3, ok, "LIN1 constants", detail);
}

void quantisation_certificates() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  int mag_bad = 0, dir_bad = 0, cell_bad = 0;
  for (int k = 0; k < 1000; ++k) {
    const Index m = 1 + k % 3;
    const auto part = delta_partition(Box<double>::unit(1 + k % 2), 0.2 + 0.6 * unit(rng));
    const double alpha = 0.5 + 5.0 * unit(rng);
    const auto ladder = uniform_levels(alpha, 1 + static_cast<Index>(20 * unit(rng)));
    const auto net = sphere_net(m, 0.1 + 0.9 * unit(rng));
    MatrixXd v(m, part.size());
    for (Index i = 0; i < part.size(); ++i) {
      VectorXd d(m);
      for (Index a = 0; a < m; ++a)
        d[a] = normal(rng);
      v.col(i) = alpha * unit(rng) * d.normalized();
    }
    const auto u = from_cell_values(part, v);
    const auto leveled = quantize_magnitude(u, ladder);
    const auto snapped = quantize_direction(leveled, net);
    mag_bad += u.sup_distance(leveled) > ladder.step * (1 + 1e-12);
    dir_bad += leveled.sup_distance(snapped) > alpha * net.sigma * (1 + 1e-12);

    // smooth input: sum of a few random sinusoids in one dimension
    const auto part1 = delta_partition(Box<double>::unit(1), 0.05 + 0.5 * unit(rng));
    const auto g = refined_grid(part1, 8);
    const double a1 = 10 * unit(rng), a2 = 10 * unit(rng), ph = 6.3 * unit(rng);
    const auto w = sample(g, 1, [&](const VectorXd& s) {
      return VectorXd::Constant(1, std::sin(a1 * s[0] + ph) + 0.5 * std::cos(a2 * s[0]));
    });
    const double R = lipschitz_estimate(w, g);
    cell_bad += sup_norm(w - cell_average(w, g, part1).to_grid(g)) > R * part1.max_cell_diameter() + 1e-12;
  }
  report(4, mag_bad == 0 && dir_bad == 0 && cell_bad == 0,
         "magnitude, direction and cell-average error certificates on 1000 random controls",
         std::to_string(mag_bad) + "/" + std::to_string(dir_bad) + "/" + std::to_string(cell_bad) + " violations");
}

void truncation() {
  const auto sys = builtin_system("ROT2");
  const auto g = build_grid(sys.domain, Index(256));
  int violations = 0;
  double worst_ratio = 0.0;
  for (const auto& u : sample_admissible(sys, g, 1000, 5))
    for (double alpha : {1.0, 2.0, 5.0}) {
      const double excess = truncate_control(u, g, alpha).excess_measure;
      const double bound = sys.rho * sys.rho / (alpha * alpha);
      violations += excess > bound;
      worst_ratio = std::max(worst_ratio, excess / bound);
    }
  report(5, violations == 0, "Chebyshev bound on the truncation set, 1000 controls x 3 levels",
         std::to_string(violations) + " violations, worst ratio " + fmt(worst_ratio));
}

void theorem_check() {
  const auto t0 = std::chrono::steady_clock::now();
  auto cfg = cli::parse_config("[system]\nname = LIN1\n[grid]\nresolution = 64\n[experiment]\nepsilon = 0.2, 0.1\n"
                               "samples = 200\ncap = 100000\nseed = 1\ntol = 1e-10\n");
  const auto result = cli::run_experiment(cfg);
  const auto& a = result.rows[0].report;
  const auto& b = result.rows[1].report;
  for (const auto* r : {&a, &b}) {
    finite_trajectories += r->finite_set_size;
    residual_violations += static_cast<std::size_t>(r->residual_violations);
    worst_residual = std::max(worst_residual, r->max_finite_residual);
  }
  const double t = seconds_since(t0);
  const bool ok = std::abs(a.bound - 0.325708) <= 1e-6 && a.passed && 10 * a.sampled_max_distance <= a.bound &&
                  std::abs(b.bound - a.bound / 2) <= 1e-12 && b.passed && t <= 300.0;
  report(6, ok, "approximation bound on LIN1 at eps 0.2 and 0.1, 200 samples",
         "eps 0.2: " + fmt(a.sampled_max_distance) + " <= " + fmt(a.bound) + " (" + std::string(to_string(a.mode)) +
             ", " + std::to_string(a.finite_set_size) + " members); eps 0.1: " + fmt(b.sampled_max_distance) +
             " <= " + fmt(b.bound) + "; " + fmt(t) + " s");
}

void internal_approximation() {
  // an enumerated family as well: LIN1 at eps 0.4 with R* = 1
  const auto sys = builtin_system("LIN1");
  const auto consts = compute_constants(sys, build_grid(sys.domain, Index(64)));
  const auto sched = schedule(consts, 0.4, 1.0);
  ExperimentOptions opt;
  opt.sample_count = 20;
  const auto rep = verify_theorem(sys, consts, sched, build_family(sys, sched, 64), opt);
  finite_trajectories += rep.finite_set_size;
  residual_violations += static_cast<std::size_t>(rep.residual_violations);
  worst_residual = std::max(worst_residual, rep.max_finite_residual);

  const auto rot = builtin_system("ROT2");
  const auto part = delta_partition(rot.domain, 0.5);
  const auto e = enumerate_controls(part, uniform_levels(1.0, 2), sphere_net(2, 1.0), rot.rho, 100000);
  for (const auto& t : trajectory_set(rot, e, refined_grid(part, 16), 1e-10)) {
    ++finite_trajectories;
    residual_violations += t.residual_l2 > 1e-10;
    worst_residual = std::max(worst_residual, t.residual_l2);
  }
  report(7, residual_violations == 0 && rep.mode == Generation::enumerated,
         "finite-set trajectories solve the equation to tolerance",
         std::to_string(finite_trajectories) + " trajectories, worst residual " + fmt(worst_residual) + ", " +
             std::to_string(residual_violations) + " violations");
}

void enumeration_oracle() {
  const auto part = delta_partition(Box<double>::unit(1), 0.5);
  LevelLadder<double> ladder;
  ladder.levels = {0.0, 1.0, 2.0};
  ladder.step = 1.0;
  const auto net = sphere_net(1, 1.0);
  const auto e = enumerate_controls(part, ladder, net, 1.0, 1000);
  std::set<std::pair<double, double>> brute;
  int raw = 0;
  for (int l0 = 0; l0 < 3; ++l0)
    for (int l1 = 0; l1 < 3; ++l1)
      for (int d0 = 0; d0 < 2; ++d0)
        for (int d1 = 0; d1 < 2; ++d1) {
          ++raw;
          const double r0 = l0, r1 = l1;
          if (0.5 * r0 * r0 + 0.5 * r1 * r1 <= 1.0)
            brute.insert({r0 * net.points[d0][0], r1 * net.points[d1][0]});
        }
  report(8, e.size() == 9 && brute.size() == 9 && raw == 36, "two-cell enumeration matches brute force",
         std::to_string(e.size()) + " enumerated, " + std::to_string(brute.size()) + " from " + std::to_string(raw) +
             " raw assignments");
}

void hausdorff_axioms() {
  const auto sys = builtin_system("ROT2");
  const auto g = build_grid(sys.domain, Index(32));
  const TrajectorySolver<double> solver(sys, g);
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> size(1, 5);
  auto random_set = [&](std::uint64_t seed) {
    std::vector<GridFunction<double>> out;
    for (const auto& t : trajectory_set(solver, sample_admissible(sys, g, size(rng), seed)))
      out.push_back(t.values);
    return out;
  };
  int violations = 0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    const auto A = random_set(3 * k + 100), B = random_set(3 * k + 101), C = random_set(3 * k + 102);
    const double ab = hausdorff_l2(A, B, g);
    violations += std::abs(ab - hausdorff_l2(B, A, g)) > 1e-12;
    violations += hausdorff_l2(A, A, g) > 1e-12;
    violations += !(ab > 1e-12);
    violations += hausdorff_l2(A, C, g) > ab + hausdorff_l2(B, C, g) + 1e-12;
  }
  report(9, violations == 0, "Hausdorff symmetry, identity and triangle inequality on 100 triples",
         std::to_string(violations) + " violations");
}

void determinism() {
  const auto dir = fs::temp_directory_path() / ("urysohn_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "run.ini") << "[system]\nname = ROT2\n[grid]\nresolution = 32\n[experiment]\n"
                                    "epsilon = 0.8, 0.4\nsamples = 40\nseed = 11\n";
  auto run = [&](const std::string& out) {
    const std::string cmd = std::string(URYSOHN_CLI_PATH) + " run " + (dir / "run.ini").string() + " --out " +
                            (dir / out).string() + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream o;
    o << in.rdbuf();
    return o.str();
  };
  const int ca = run("a"), cb = run("b");
  const std::string a = slurp(dir / "a" / "results.csv"), b = slurp(dir / "b" / "results.csv");
  report(10, ca == 0 && cb == 0 && !a.empty() && a == b, "two CLI runs give byte-identical results.csv",
         "exit codes " + std::to_string(ca) + "/" + std::to_string(cb) + ", " + std::to_string(a.size()) + " bytes");
  fs::remove_all(dir);
}

} // namespace

int main() {
  const std::pair<int, void (*)()> criteria[] = {
      {1, oracle_equivalence}, {2, gronwall_tightness},     {3, lin1_constants},
      {4, quantisation_certificates}, {5, truncation},      {6, theorem_check},
      {7, internal_approximation},    {8, enumeration_oracle}, {9, hausdorff_axioms},
      {10, determinism}};
  for (const auto& [id, fn] : criteria) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(id, false, "raised an exception", e.what());
    }
  }
  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
