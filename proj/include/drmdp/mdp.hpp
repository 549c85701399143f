#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "drmdp/error.hpp"

namespace drmdp {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Real vector over state-action pairs, flattened as z = s * n_actions + a.
template <typename Scalar>
using QFunction = Vector<Scalar>;

/// Real vector over states.
template <typename Scalar>
using StateValue = Vector<Scalar>;

/// Finite MDP with a nominal kernel of shape (n_states * n_actions) x n_states.
///
/// Row z of the kernel is P0(. | z) in the canonical z = s * n_actions + a order.
/// Rows are renormalized on construction when they sum to one within 1e-9 and
/// rejected otherwise.
template <typename Scalar>
class TabularMdp {
 public:
  TabularMdp(Index n_states, Index n_actions, Matrix<Scalar> kernel,
             Vector<Scalar> reward, Scalar gamma)
      : n_states_(n_states),
        n_actions_(n_actions),
        kernel_(std::move(kernel)),
        reward_(std::move(reward)),
        gamma_(gamma) {
    require(n_states > 0 && n_actions > 0, ErrorKind::InvalidArgument,
            "n_states and n_actions must be positive");
    const Index d = n_states * n_actions;
    require(kernel_.rows() == d && kernel_.cols() == n_states, ErrorKind::ShapeMismatch,
            "kernel must have shape (n_states*n_actions) x n_states");
    require(reward_.size() == d, ErrorKind::ShapeMismatch, "reward must have length d");
    require(gamma > Scalar(0) && gamma < Scalar(1), ErrorKind::InvalidArgument,
            "gamma must lie in (0, 1)");
    require(reward_.allFinite(), ErrorKind::InvalidArgument, "reward must be finite");

    for (Index z = 0; z < d; ++z) {
      for (Index s = 0; s < n_states; ++s) {
        const Scalar p = kernel_(z, s);
        require(std::isfinite(static_cast<double>(p)) && p >= Scalar(-1e-12),
                ErrorKind::InvalidDistribution,
                "kernel row " + std::to_string(z) + " has a negative or non-finite entry");
        if (p < Scalar(0)) kernel_(z, s) = Scalar(0);
      }
      const Scalar total = kernel_.row(z).sum();
      using std::abs;
      require(abs(total - Scalar(1)) <= Scalar(1e-9), ErrorKind::InvalidDistribution,
              "kernel row " + std::to_string(z) + " does not sum to 1");
      kernel_.row(z) /= total;
    }
  }

  Index n_states() const { return n_states_; }
  Index n_actions() const { return n_actions_; }
  Index dim() const { return n_states_ * n_actions_; }
  Index index(Index s, Index a) const { return s * n_actions_ + a; }

  const Matrix<Scalar>& kernel() const { return kernel_; }
  const Vector<Scalar>& reward() const { return reward_; }
  Scalar gamma() const { return gamma_; }
  Scalar r_max() const { return reward_.cwiseAbs().maxCoeff(); }

  /// Same model with a different discount.
  TabularMdp with_gamma(Scalar gamma) const {
    return TabularMdp(n_states_, n_actions_, kernel_, reward_, gamma);
  }

 private:
  Index n_states_;
  Index n_actions_;
  Matrix<Scalar> kernel_;
  Vector<Scalar> reward_;
  Scalar gamma_;
};

using Mdp = TabularMdp<double>;

/// Greedy action per state plus the gap to the runner-up action.
template <typename Scalar>
struct GreedyPolicy {
  std::vector<Index> action;
  Vector<Scalar> gap;
  /// States whose gap is at or below the tie tolerance used to build the policy.
  std::vector<Index> tied_states;

  bool has_tie() const { return !tied_states.empty(); }
};

/// v(s) = max_a U(s, a).
template <typename Scalar>
StateValue<Scalar> v_max(const QFunction<Scalar>& u, Index n_actions) {
  require(n_actions > 0 && u.size() % n_actions == 0, ErrorKind::ShapeMismatch,
          "Q-function length is not a multiple of n_actions");
  const Index n_states = u.size() / n_actions;
  Eigen::Map<const Matrix<Scalar>> table(u.data(), n_actions, n_states);
  return table.colwise().maxCoeff().transpose();
}

template <typename Scalar>
StateValue<Scalar> v_max(const TabularMdp<Scalar>& mdp, const QFunction<Scalar>& u) {
  require(u.size() == mdp.dim(), ErrorKind::ShapeMismatch, "Q-function length != d");
  return v_max(u, mdp.n_actions());
}

/// Lowest-index argmax per state. Ties (gap <= tie_tol) are reported in tied_states.
template <typename Scalar>
GreedyPolicy<Scalar> greedy(const QFunction<Scalar>& u, Index n_actions, Scalar tie_tol) {
  require(tie_tol >= Scalar(0), ErrorKind::InvalidArgument, "tie_tol must be >= 0");
  require(n_actions > 0 && u.size() % n_actions == 0, ErrorKind::ShapeMismatch,
          "Q-function length is not a multiple of n_actions");
  const Index n_states = u.size() / n_actions;
  GreedyPolicy<Scalar> policy;
  policy.action.resize(static_cast<std::size_t>(n_states));
  policy.gap.resize(n_states);
  for (Index s = 0; s < n_states; ++s) {
    const auto row = u.segment(s * n_actions, n_actions);
    Index best = 0;
    for (Index a = 1; a < n_actions; ++a) {
      if (row(a) > row(best)) best = a;
    }
    Scalar runner_up = -std::numeric_limits<Scalar>::infinity();
    for (Index a = 0; a < n_actions; ++a) {
      if (a != best && row(a) > runner_up) runner_up = row(a);
    }
    policy.action[static_cast<std::size_t>(s)] = best;
    policy.gap(s) = row(best) - runner_up;
    if (policy.gap(s) <= tie_tol) policy.tied_states.push_back(s);
  }
  return policy;
}

template <typename Scalar>
GreedyPolicy<Scalar> greedy(const TabularMdp<Scalar>& mdp, const QFunction<Scalar>& u,
                            Scalar tie_tol) {
  require(u.size() == mdp.dim(), ErrorKind::ShapeMismatch, "Q-function length != d");
  return greedy(u, mdp.n_actions(), tie_tol);
}

/// max - min of the entries.
template <typename Derived>
typename Derived::Scalar span(const Eigen::MatrixBase<Derived>& u) {
  if (u.size() == 0) return typename Derived::Scalar(0);
  return u.maxCoeff() - u.minCoeff();
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar inf_norm_diff(const Eigen::MatrixBase<DerivedA>& u1,
                                        const Eigen::MatrixBase<DerivedB>& u2) {
  require(u1.size() == u2.size(), ErrorKind::ShapeMismatch, "length mismatch");
  if (u1.size() == 0) return typename DerivedA::Scalar(0);
  return (u1 - u2).cwiseAbs().maxCoeff();
}

}  // namespace drmdp
