#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "urysohn/urysohn.hpp"

using namespace urysohn;

namespace {

GridFunction<double> constant(Index m, Index N, double c) { return GridFunction<double>::Constant(m, N, c); }

SystemSpec<double> failing_system() {
  // kappa0 = 0.5, lambda = 1, kappa1 = 0.3, kappa2 = 0, rho = 1 on [0,1]
  using V = VectorXd;
  SystemSpec<double> s;
  s.name = "FAIL";
  s.state_dim = s.control_dim = 1;
  s.domain = Box<double>::unit(1);
  s.lambda = 1.0;
  s.rho = 1.0;
  s.f = [](const V&, const V& x) -> V { return 0.5 * x; };
  s.k1 = [](const V&, const V&, const V& x) -> V { return 0.3 * x; };
  s.gamma1 = [](const V&, const V&) { return 0.3; };
  s.k2 = [](const V&, const V&, const V&) { return MatrixXd::Zero(1, 1); };
  s.gamma0_bound = 0.5;
  s.gamma2_bound = 0.0;
  return s;
}

} // namespace

TEST_CASE("contraction condition examples") {
  const auto g = build_grid(Box<double>::unit(1), Index(32));
  const auto lin = check_condition_2d(builtin_system("LIN1"), g);
  CHECK(std::abs(lin.condition_value - 0.06) <= 1e-12);
  CHECK(lin.contraction_factor == doctest::Approx(0.1));
  CHECK(lin.passes);

  const auto bad = check_condition_2d(failing_system(), g);
  CHECK(bad.kappa1 == doctest::Approx(0.3));
  CHECK(bad.condition_value == doctest::Approx(2.04));
  CHECK_FALSE(bad.passes);
  CHECK_THROWS_AS(TrajectorySolver<double>(failing_system(), g), DomainError);

  const auto zero = check_condition_2d(builtin_system("ZERO"), g);
  CHECK(zero.condition_value == 0.0);
  CHECK(zero.passes);
}

TEST_CASE("LIN1 fixed points") {
  const auto sys = builtin_system("LIN1");
  const auto g = build_grid(sys.domain, Index(64));
  const auto one = solve_trajectory(sys, constant(1, 64, 1.0), g, 1e-12, 200);
  CHECK((one.values.array() - 1.0 / 9.0).abs().maxCoeff() <= 1e-12);
  CHECK(one.residual_l2 <= 1e-12);
  const auto zero = solve_trajectory(sys, constant(1, 64, 0.0), g, 1e-12, 200);
  CHECK(zero.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("LIN1 Picard iterates from zero") {
  const auto sys = builtin_system("LIN1");
  const auto g = build_grid(sys.domain, Index(16));
  const double expected[] = {0.1, 0.11, 0.111};
  for (Index k = 1; k <= 3; ++k) {
    SolveOptions o;
    o.tol = 1e-14;
    o.max_iter = k;
    const TrajectorySolver<double> solver(sys, g, o);
    try {
      (void)solver.solve(constant(1, 16, 1.0));
      FAIL("expected non-convergence");
    } catch (const NonConvergenceError<double>& e) {
      CHECK((e.last_iterate().array() - expected[k - 1]).abs().maxCoeff() <= 1e-14);
      CHECK(e.gap() > 0.0);
    }
  }
}

TEST_CASE("residual examples") {
  const auto sys = builtin_system("LIN1");
  for (Index n : {8, 100}) {
    const auto g = build_grid(sys.domain, n);
    const auto x = linear_trajectory(lin1_spec(), constant(1, n, 1.0), g).values;
    CHECK(residual(sys, constant(1, n, 1.0), x, g) <= 1e-12);
    CHECK(residual(sys, constant(1, n, 1.0), constant(1, n, 0.0), g) == doctest::Approx(0.1).epsilon(1e-12));
  }
  const auto z = builtin_system("ZERO");
  const auto g = build_grid(z.domain, Index(10));
  CHECK(residual(z, constant(1, 10, 0.7), constant(1, 10, 0.0), g) == 0.0);
}

TEST_CASE("control shape is checked") {
  const auto sys = builtin_system("ROT2");
  const auto g = build_grid(sys.domain, Index(8));
  const TrajectorySolver<double> solver(sys, g);
  CHECK_THROWS_AS(solver.solve(constant(1, 8, 0.0)), ValidationError);
  CHECK_THROWS_AS(solver.solve(constant(2, 7, 0.0)), ValidationError);
}

TEST_CASE("over-budget controls carry a warning") {
  const auto sys = builtin_system("LIN1");
  const auto g = build_grid(sys.domain, Index(8));
  CHECK(solve_trajectory(sys, constant(1, 8, 2.0), g, 1e-10, 100).constraint_warning);
  CHECK_FALSE(solve_trajectory(sys, constant(1, 8, 1.0), g, 1e-10, 100).constraint_warning);
}

TEST_CASE("geometric convergence, uniqueness, boundedness and residuals") {
  for (const auto& name : builtin_system_names()) {
    CAPTURE(name);
    const auto sys = builtin_system(name);
    const auto g = build_grid(sys.domain, Index(sys.domain_dim() == 1 ? 48 : 12));
    SolveOptions o;
    o.tol = 1e-10;
    const TrajectorySolver<double> solver(sys, g, o);
    const double L = solver.contraction().contraction_factor;
    const auto consts = compute_constants(sys, g);
    const auto controls = sample_admissible(sys, g, 100, 7);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unif(-5.0, 5.0);
    for (std::size_t c = 0; c < controls.size(); ++c) {
      const auto t = solver.solve(controls[c]);
      for (std::size_t k = 1; k < t.gaps.size(); ++k)
        CHECK(t.gaps[k] <= (L + 0.05) * t.gaps[k - 1] + 1e-300);
      CHECK(t.residual_l2 <= o.tol);
      CHECK(l2_norm(t.values, g) <= consts.beta_star + 1e-12);
      if (c < 10) {
        GridFunction<double> start(sys.state_dim, g.size());
        for (Index j = 0; j < start.size(); ++j)
          start.data()[j] = unif(rng);
        const auto t2 = solver.solve(controls[c], "restart", start);
        CHECK(l2_distance(t.values, t2.values, g) <= 10 * o.tol);
      }
    }
  }
}

TEST_CASE("worker count and kernel cache do not change results") {
  const auto sys = builtin_system("HEAT2");
  const auto g = build_grid(sys.domain, Index(10));
  const auto u = sample_admissible(sys, g, 1, 3).front();
  SolveOptions a, b, c;
  a.workers = 1;
  b.workers = 4;
  c.workers = 3;
  c.cache_kernel = false;
  const auto ta = TrajectorySolver<double>(sys, g, a).solve(u);
  const auto tb = TrajectorySolver<double>(sys, g, b).solve(u);
  const auto tc = TrajectorySolver<double>(sys, g, c).solve(u);
  CHECK(ta.values == tb.values);
  CHECK(l2_distance(ta.values, tc.values, g) <= 1e-12);
}
