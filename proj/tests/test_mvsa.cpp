#include <doctest.h>

#include <random>

#include "drmdp/fixed_point.hpp"
#include "drmdp/inventory.hpp"
#include "drmdp/mvsa.hpp"
#include "oracles.hpp"

using namespace drmdp;
using namespace drmdp::mvsa;

TEST_CASE("step schedule") {
  const auto s = StepSchedule::standard();
  CHECK(s.a == 3.0);
  CHECK(s.tau == 0.9);
  CHECK(s.b == doctest::Approx(std::pow(3.0, 0.9)));
  const auto st = step_sizes(s, 1);
  CHECK(st.alpha == doctest::Approx(0.75));
  CHECK(st.beta == doctest::Approx(s.b / std::pow(4.0, 0.9)));
  CHECK_THROWS_AS(step_sizes(s, 0), Error);

  CHECK_THROWS_AS((StepSchedule{3.0, 1.0, 0.5}.validate()), Error);
  CHECK_THROWS_AS((StepSchedule{0.0, 1.0, 0.9}.validate()), Error);
  CHECK_THROWS_AS((StepSchedule{3.0, 10.0, 0.9}.validate()), Error);
  CHECK(s.theory_warnings(0.5).empty());
  CHECK(s.theory_warnings(0.9).size() == 1);  // a <= 1/(2(1-L)) = 5
  CHECK(s.theory_warnings(1.2).size() == 1);
  CHECK(StepSchedule::with_default_b(2.5, 0.8).theory_warnings(0.1).size() == 1);
}

TEST_CASE("random stream is reproducible and lies in [0, 1)") {
  RandomStream a(99), b(99), c(100);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    differs = differs || x != c.uniform();
  }
  CHECK(differs);
}

TEST_CASE("generative model frequencies follow the kernel") {
  Matrix<double> kernel(1, 4);
  kernel << 0.1, 0.0, 0.6, 0.3;
  const Mdp mdp(4, 1, Matrix<double>(kernel.replicate(4, 1)), Vector<double>::Zero(4), 0.5);
  const GenerativeModel model(mdp);
  RandomStream rng(5);
  std::vector<int> counts(4, 0);
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) ++counts[static_cast<std::size_t>(model.sample(2, rng))];
  CHECK(counts[1] == 0);
  for (int s : {0, 2, 3}) {
    const double p = kernel(0, s);
    CHECK(std::abs(counts[static_cast<std::size_t>(s)] / double(draws) - p) <
          5.0 * std::sqrt(p * (1 - p) / draws));
  }
}

TEST_CASE("first step from the canonical initialization") {
  std::mt19937_64 gen(1);
  const Mdp mdp = oracle::random_mdp(gen, 3, 2, 0.5);
  const AmbiguityConfig<double> cfg{0.02, 1e-6};
  const auto sched = StepSchedule::standard();
  const GenerativeModel model(mdp);
  RandomStream rng(4);
  const MvsaState s0 = MvsaState::initial(mdp.dim());
  const MvsaState s1 = mvsa_step(mdp, model, s0, cfg, sched, rng);
  CHECK(s1.n == 2);
  // m = 0 and g = 1 give sigma = sqrt(1 + eps); U_0 = 0 makes every draw zero.
  const double alpha = 0.75;
  for (Index z = 0; z < mdp.dim(); ++z) {
    const double expected =
        alpha * (mdp.reward()(z) - mdp.gamma() * std::sqrt(2 * cfg.delta) * std::sqrt(1 + cfg.epsilon));
    CHECK(s1.u(z) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(s1.m(z) == 0.0);
    CHECK(s1.g(z) == doctest::Approx(1.0 - step_sizes(sched, 1).beta));
  }
}

TEST_CASE("runs are deterministic and independent of thread count") {
  const auto [mdp, params] = inventory::benchmark_instance(0.7);
  const AmbiguityConfig<double> cfg{0.05, 1e-6};
  const auto sched = StepSchedule::standard();
  const auto u_ref = solve_approx(mdp, cfg).solution;
  const auto grid = log_grid(300, 10);
  const std::vector<std::uint64_t> seeds{3, 1, 4, 15, 9};
  const auto serial = batch_runs(mdp, cfg, sched, 300, seeds, u_ref, grid, 1);
  const auto parallel = batch_runs(mdp, cfg, sched, 300, seeds, u_ref, grid, 3);
  REQUIRE(serial.size() == seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    CHECK(serial[i].seed == seeds[i]);
    CHECK(serial[i].checkpoints == parallel[i].checkpoints);
    CHECK(serial[i].final_state.u == parallel[i].final_state.u);
    CHECK(serial[i].checkpoints.back().n == 300);
    CHECK(serial[i].checkpoints.back().error ==
          inf_norm_diff(serial[i].final_state.u, u_ref));
  }
  CHECK(serial[0].final_state.u != serial[1].final_state.u);
  CHECK_THROWS_AS(batch_runs(mdp, cfg, sched, 10, {1, 1}, u_ref, {}, 1), Error);
}

TEST_CASE("checkpoint grids are validated") {
  const auto [mdp, params] = inventory::benchmark_instance(0.7);
  const AmbiguityConfig<double> cfg{0.05, 1e-6};
  const auto sched = StepSchedule::standard();
  const QFunction<double> ref = QFunction<double>::Zero(mdp.dim());
  CHECK_THROWS_AS(run_mvsa(mdp, cfg, sched, 10, 1, ref, {0, 5}), Error);
  CHECK_THROWS_AS(run_mvsa(mdp, cfg, sched, 10, 1, ref, {5, 5}), Error);
  CHECK_THROWS_AS(run_mvsa(mdp, cfg, sched, 10, 1, ref, {11}), Error);
  CHECK_THROWS_AS(run_mvsa(mdp, cfg, sched, 10, 1, QFunction<double>::Zero(3), {}), Error);
}

TEST_CASE("log grid") {
  const auto grid = log_grid(20000, 60);
  CHECK(grid.front() == 1);
  CHECK(grid.back() == 20000);
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
  CHECK(log_grid(1, 5) == std::vector<long>{1});
}

TEST_CASE("iterates stay bounded and g - m^2 stays nonnegative") {
  const auto [mdp, params] = inventory::benchmark_instance(0.7);
  const AmbiguityConfig<double> cfg{0.05, 1e-6};
  const double bound = iterate_bound(mdp, cfg);
  REQUIRE(std::isfinite(bound));
  CHECK(std::isinf(iterate_bound(mdp, AmbiguityConfig<double>{0.1, 1e-6})));
  double worst_gap = 0.0;
  double worst_norm = 0.0;
  auto observe = [&](const MvsaState& s) {
    worst_gap = std::min(worst_gap, (s.g - s.m.cwiseAbs2()).minCoeff());
    worst_norm = std::max(worst_norm, s.u.cwiseAbs().maxCoeff());
  };
  run_mvsa(mdp, cfg, StepSchedule::standard(), 2000, 8, QFunction<double>::Zero(mdp.dim()), {},
           observe);
  CHECK(worst_gap >= -1e-12);
  CHECK(worst_norm <= bound + 1e-9);
}

TEST_CASE("error decays on a small model") {
  std::mt19937_64 gen(2);
  const Mdp mdp = oracle::random_mdp(gen, 3, 2, 0.5);
  const AmbiguityConfig<double> cfg{0.02, 1e-6};
  const auto u_star = solve_approx(mdp, cfg).solution;
  const auto runs = batch_runs(mdp, cfg, StepSchedule::with_default_b(2.0, 0.7), 20000,
                               {1, 2, 3, 4, 5, 6, 7, 8}, u_star, {200, 20000}, 1);
  double early = 0.0, late = 0.0;
  for (const auto& r : runs) {
    early += r.checkpoints[0].error;
    late += r.checkpoints[1].error;
  }
  CHECK(late < 0.3 * early);
}
