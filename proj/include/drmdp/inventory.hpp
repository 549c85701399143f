#pragma once

#include <utility>
#include <vector>

#include "drmdp/mdp.hpp"

namespace drmdp::inventory {

/// Backlogged single-item inventory model. States are inventory levels -backlog..capacity,
/// actions are order quantities 0..max_order, demand is i.i.d. on 0..demand_pmf.size()-1.
struct InventoryParams {
  int capacity = 10;
  int max_backlog = 5;
  int max_order = 5;
  double price = 3.0;
  double order_cost = 2.0;
  double holding_cost = 0.2;
  double backlog_penalty = 3.0;
  std::vector<double> demand_pmf{0.1, 0.2, 0.3, 0.3, 0.1};
  double gamma = 0.7;

  void validate() const;

  int n_states() const { return capacity + max_backlog + 1; }
  int n_actions() const { return max_order + 1; }
  int level(Index state) const { return static_cast<int>(state) - max_backlog; }
  Index state_index(int level) const { return level + max_backlog; }
  /// Order actually placed once the capacity clips it.
  int effective_order(int level, int action) const;
  /// max(level + order - demand, -max_backlog).
  int next_level(int level, int action, int demand) const;
};

/// Kernel and expected one-step reward under the nominal demand distribution.
Mdp build_inventory_mdp(const InventoryParams& params);

/// The benchmark configuration (I=10, B=5, O=5, p=3, c=2, h=0.2, b=3,
/// P_D = [0.1, 0.2, 0.3, 0.3, 0.1]) at the given discount.
std::pair<Mdp, InventoryParams> benchmark_instance(double gamma);

}  // namespace drmdp::inventory
