#include <doctest.h>

#include <random>

#include "drmdp/fixed_point.hpp"
#include "drmdp/inventory.hpp"
#include "oracles.hpp"

using namespace drmdp;

TEST_CASE("fixed_point options are validated") {
  auto identity = [](const QFunction<double>& u) { return u; };
  const QFunction<double> init = QFunction<double>::Zero(2);
  CHECK_THROWS_AS(fixed_point<double>(identity, init, {1.0, 1e-8, 10, StoppingRule::Certified}), Error);
  CHECK_THROWS_AS(fixed_point<double>(identity, init, {0.5, 0.0, 10, StoppingRule::Certified}), Error);
  CHECK_THROWS_AS(fixed_point<double>(identity, init, {0.5, 1e-8, 0, StoppingRule::Certified}), Error);
}

TEST_CASE("certified stopping lands within tol of the fixed point") {
  // Affine contraction U -> c + 0.9 U with fixed point 10 c.
  QFunction<double> c(3);
  c << 1.0, -2.0, 0.5;
  auto op = [&](const QFunction<double>& u) { return QFunction<double>(c + 0.9 * u); };
  for (double tol : {1e-3, 1e-6, 1e-10}) {
    const auto report =
        fixed_point<double>(op, QFunction<double>::Zero(3), {0.9, tol, 100000, StoppingRule::Certified});
    CHECK(report.converged);
    CHECK(report.certified);
    CHECK(inf_norm_diff(report.solution, QFunction<double>(10.0 * c)) <= tol);
  }
}

TEST_CASE("hitting max_iter reports the best iterate without convergence") {
  auto op = [](const QFunction<double>& u) { return QFunction<double>(u.array() + 1.0); };
  const auto report =
      fixed_point<double>(op, QFunction<double>::Zero(1), {0.5, 1e-8, 5, StoppingRule::Uncertified});
  CHECK_FALSE(report.converged);
  CHECK(report.iterations == 1);
  CHECK(report.residual == 1.0);
}

TEST_CASE("solve_approx agrees with plain-loop value iteration on the inventory model") {
  const auto [mdp, params] = inventory::benchmark_instance(0.7);
  const auto report = solve_approx(mdp, AmbiguityConfig<double>{0.1, 1e-6});
  CHECK(report.converged);
  CHECK_FALSE(report.certified);  // L = 1.013 at the benchmark setting
  const auto loops = oracle::mean_std_value_iteration(mdp, 0.1, 1e-6, 400);
  CHECK(inf_norm_diff(report.solution, loops) < 1e-9);

  // Frozen from the plain-loop oracle.
  CHECK(loops(0) == doctest::Approx(-24.257233636905).epsilon(1e-11));
  CHECK(loops(32) == doctest::Approx(0.682960418462).epsilon(1e-10));
  CHECK(loops(33) == doctest::Approx(1.162960418462).epsilon(1e-10));
  CHECK(loops(95) == doctest::Approx(12.986744795417).epsilon(1e-11));
}

TEST_CASE("nominal fixed points match policy iteration") {
  const auto [mdp, params] = inventory::benchmark_instance(0.7);
  const auto pi = oracle::policy_iteration(mdp);
  CHECK(inf_norm_diff(solve_exact(mdp, 0.0).solution, pi) < 1e-9);
  CHECK(inf_norm_diff(solve_approx(mdp, AmbiguityConfig<double>{0.0, 0.0}).solution, pi) < 1e-9);

  // Frozen from the policy-iteration oracle.
  CHECK(pi(0) == doctest::Approx(-22.492953066667).epsilon(1e-11));
  CHECK(pi(32) == doctest::Approx(3.053333333333).epsilon(1e-11));
  CHECK(pi(33) == doctest::Approx(3.533333333333).epsilon(1e-11));
  CHECK(pi(95) == doctest::Approx(14.446868413262).epsilon(1e-11));
}

TEST_CASE("property: contraction of both operators on random pairs") {
  std::mt19937_64 rng(19);
  for (int k = 0; k < 3; ++k) {
    const Mdp mdp = oracle::random_mdp(rng, 4, 3, 0.6);
    const AmbiguityConfig<double> cfg{0.04, 1e-6};
    const double lip = cfg.lipschitz(mdp.gamma());
    REQUIRE(lip < 1.0);
    for (int trial = 0; trial < 30; ++trial) {
      const Vector<double> u1 = 5.0 * Vector<double>::Random(mdp.dim());
      const Vector<double> u2 = 5.0 * Vector<double>::Random(mdp.dim());
      const double gap = inf_norm_diff(u1, u2);
      CHECK(inf_norm_diff(approx_bellman(mdp, u1, cfg), approx_bellman(mdp, u2, cfg)) <=
            lip * gap + 1e-10);
      CHECK(inf_norm_diff(exact_robust_bellman(mdp, u1, cfg.delta),
                          exact_robust_bellman(mdp, u2, cfg.delta)) <= mdp.gamma() * gap + 1e-10);
    }
  }
}

TEST_CASE("approximation and stabilization bounds on random models") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 5; ++k) {
    const Mdp mdp = oracle::random_mdp(rng, 5, 2, 0.5);
    const double delta = 0.02;
    const auto u = solve_approx(mdp, AmbiguityConfig<double>{delta, 0.0});
    const auto q = solve_exact(mdp, delta);
    REQUIRE(u.certified);
    const double g = mdp.gamma();
    CHECK(inf_norm_diff(u.solution, q.solution) <= g * delta * span(u.solution) / (1 - g) + 1e-9);

    const double eps = 1e-3;
    const double lip = AmbiguityConfig<double>{delta, eps}.lipschitz(g);
    const auto ue = solve_approx(mdp, AmbiguityConfig<double>{delta, eps});
    CHECK(inf_norm_diff(u.solution, ue.solution) <= g * std::sqrt(2 * delta * eps) / (1 - lip) + 1e-9);
  }
}
