#include <doctest.h>

#include <algorithm>

#include "drmdp/inventory.hpp"

using namespace drmdp;
using inventory::InventoryParams;

TEST_CASE("benchmark instance dimensions") {
  const auto [mdp, params] = inventory::benchmark_instance(0.9);
  CHECK(mdp.n_states() == 16);
  CHECK(mdp.n_actions() == 6);
  CHECK(mdp.gamma() == 0.9);
  CHECK(params.state_index(0) == 5);
  CHECK(params.level(15) == 10);
}

TEST_CASE("dynamics clip orders at capacity and sales at the backlog limit") {
  const InventoryParams p;
  CHECK(p.effective_order(8, 5) == 2);
  CHECK(p.effective_order(-5, 5) == 5);
  CHECK(p.next_level(8, 5, 0) == 10);
  CHECK(p.next_level(-4, 0, 4) == -5);
  CHECK(p.next_level(2, 1, 1) == 2);
}

TEST_CASE("kernel and reward by hand at level 2, order 1") {
  const InventoryParams p;
  const Mdp mdp = inventory::build_inventory_mdp(p);
  const Index z = mdp.index(p.state_index(2), 1);
  // Demand 0..4 takes level 3 to 3, 2, 1, 0, -1.
  for (int d = 0; d <= 4; ++d) {
    CHECK(mdp.kernel()(z, p.state_index(3 - d)) == doctest::Approx(p.demand_pmf[d]));
  }
  double expected = 0.0;
  for (int d = 0; d <= 4; ++d) {
    const int next = 3 - d;
    const double sold = 3 - next;
    expected += p.demand_pmf[d] * (p.price * sold + p.backlog_penalty * std::min(next, 0) -
                                   p.holding_cost * std::max(next, 0) - p.order_cost * 1.0);
  }
  CHECK(mdp.reward()(z) == doctest::Approx(expected));
}

TEST_CASE("actions beyond capacity alias the clipped order") {
  const InventoryParams p;
  const Mdp mdp = inventory::build_inventory_mdp(p);
  const Index s = p.state_index(10);
  for (Index a = 1; a < mdp.n_actions(); ++a) {
    CHECK(mdp.kernel().row(mdp.index(s, a)) == mdp.kernel().row(mdp.index(s, 0)));
    CHECK(mdp.reward()(mdp.index(s, a)) == mdp.reward()(mdp.index(s, 0)));
  }
}

TEST_CASE("parameter validation") {
  InventoryParams p;
  p.demand_pmf = {0.5, 0.4};
  CHECK_THROWS_AS(p.validate(), Error);
  p = InventoryParams{};
  p.capacity = 0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = InventoryParams{};
  p.gamma = 1.0;
  CHECK_THROWS_AS(inventory::build_inventory_mdp(p), Error);
}
