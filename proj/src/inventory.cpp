#include "drmdp/inventory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "drmdp/error.hpp"

namespace drmdp::inventory {

void InventoryParams::validate() const {
  require(capacity > 0 && max_backlog > 0 && max_order > 0, ErrorKind::InvalidArgument,
          "capacity, max_backlog and max_order must be positive");
  require(price > 0 && order_cost > 0 && holding_cost > 0 && backlog_penalty > 0,
          ErrorKind::InvalidArgument, "prices and costs must be positive");
  require(!demand_pmf.empty(), ErrorKind::InvalidDistribution, "demand_pmf is empty");
  for (double q : demand_pmf) {
    require(q >= 0.0 && std::isfinite(q), ErrorKind::InvalidDistribution,
            "demand_pmf has a negative entry");
  }
  const double total = std::accumulate(demand_pmf.begin(), demand_pmf.end(), 0.0);
  require(std::abs(total - 1.0) <= 1e-12, ErrorKind::InvalidDistribution,
          "demand_pmf does not sum to 1");
  require(gamma > 0.0 && gamma < 1.0, ErrorKind::InvalidArgument, "gamma must lie in (0, 1)");
}

int InventoryParams::effective_order(int level, int action) const {
  return std::min(action, capacity - level);
}

int InventoryParams::next_level(int level, int action, int demand) const {
  return std::max(level + effective_order(level, action) - demand, -max_backlog);
}

Mdp build_inventory_mdp(const InventoryParams& params) {
  params.validate();
  const Index n_states = params.n_states();
  const Index n_actions = params.n_actions();
  Matrix<double> kernel = Matrix<double>::Zero(n_states * n_actions, n_states);
  Vector<double> reward = Vector<double>::Zero(n_states * n_actions);

  for (Index s = 0; s < n_states; ++s) {
    const int level = params.level(s);
    for (Index a = 0; a < n_actions; ++a) {
      const Index z = s * n_actions + a;
      const int order = params.effective_order(level, static_cast<int>(a));
      for (std::size_t d = 0; d < params.demand_pmf.size(); ++d) {
        const double q = params.demand_pmf[d];
        const int next = params.next_level(level, static_cast<int>(a), static_cast<int>(d));
        kernel(z, params.state_index(next)) += q;
        const double realized = params.price * (level - next + order) +
                                params.backlog_penalty * std::min(next, 0) -
                                params.holding_cost * std::max(next, 0) -
                                params.order_cost * order;
        reward(z) += q * realized;
      }
    }
  }
  return Mdp(n_states, n_actions, std::move(kernel), std::move(reward), params.gamma);
}

std::pair<Mdp, InventoryParams> benchmark_instance(double gamma) {
  InventoryParams params;
  params.gamma = gamma;
  return {build_inventory_mdp(params), params};
}

}  // namespace drmdp::inventory
