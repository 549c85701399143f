#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "drmdp/error.hpp"
#include "drmdp/mdp.hpp"
#include "drmdp/robust.hpp"

namespace drmdp {

enum class StoppingRule {
  /// Stop once ||U_{k+1} - U_k|| <= tol (1 - L) / L, which bounds the distance to the fixed
  /// point by tol. Requires 0 < L < 1.
  Certified,
  /// Stop once ||U_{k+1} - U_k|| <= tol. For operators with no contraction guarantee.
  Uncertified,
};

template <typename Scalar>
struct FixedPointOptions {
  Scalar modulus = Scalar(0.9);
  Scalar tol = Scalar(1e-10);
  long max_iter = 100000;
  StoppingRule rule = StoppingRule::Certified;
};

template <typename Scalar>
struct FixedPointReport {
  QFunction<Scalar> solution;
  long iterations = 0;
  /// ||F(U_k) - U_k||_inf at exit.
  Scalar residual = Scalar(0);
  Scalar contraction_modulus = Scalar(0);
  bool converged = false;
  bool certified = false;
};

/// Picard iteration U_{k+1} = F(U_k). On hitting max_iter the lowest-residual iterate is
/// returned with converged = false.
template <typename Scalar, typename Operator>
FixedPointReport<Scalar> fixed_point(Operator&& op, QFunction<Scalar> init,
                                     const FixedPointOptions<Scalar>& opts) {
  require(opts.tol > Scalar(0), ErrorKind::InvalidArgument, "tol must be positive");
  require(opts.max_iter >= 1, ErrorKind::InvalidArgument, "max_iter must be >= 1");
  const bool certified = opts.rule == StoppingRule::Certified;
  if (certified) {
    require(opts.modulus > Scalar(0) && opts.modulus < Scalar(1), ErrorKind::InvalidArgument,
            "certified stopping needs a contraction modulus in (0, 1)");
  }
  const Scalar threshold =
      certified ? opts.tol * (Scalar(1) - opts.modulus) / opts.modulus : opts.tol;

  FixedPointReport<Scalar> report;
  report.contraction_modulus = opts.modulus;
  report.certified = certified;
  report.residual = std::numeric_limits<Scalar>::infinity();

  QFunction<Scalar> current = std::move(init);
  for (long k = 1; k <= opts.max_iter; ++k) {
    QFunction<Scalar> next = op(current);
    require(next.size() == current.size(), ErrorKind::ShapeMismatch,
            "operator changed the vector length");
    const Scalar residual = inf_norm_diff(next, current);
    if (!std::isfinite(static_cast<double>(residual))) break;
    if (residual < report.residual) {
      report.residual = residual;
      report.solution = next;
      report.iterations = k;
    }
    if (residual <= threshold) {
      report.converged = true;
      report.solution = std::move(next);
      report.residual = residual;
      report.iterations = k;
      return report;
    }
    current = std::move(next);
  }
  if (report.solution.size() == 0) report.solution = current;
  return report;
}

/// Fixed point of the stabilized approximate operator. Certified when L < 1.
template <typename Scalar>
FixedPointReport<Scalar> solve_approx(const TabularMdp<Scalar>& mdp,
                                      const AmbiguityConfig<Scalar>& cfg,
                                      Scalar tol = Scalar(1e-10), long max_iter = 100000) {
  const Scalar lip = cfg.lipschitz(mdp.gamma());
  FixedPointOptions<Scalar> opts{lip, tol, max_iter,
                                 lip < Scalar(1) ? StoppingRule::Certified
                                                 : StoppingRule::Uncertified};
  return fixed_point<Scalar>([&](const QFunction<Scalar>& u) { return approx_bellman(mdp, u, cfg); },
                             QFunction<Scalar>::Zero(mdp.dim()), opts);
}

/// Fixed point of the exact KL-robust operator (a gamma-contraction).
template <typename Scalar>
FixedPointReport<Scalar> solve_exact(const TabularMdp<Scalar>& mdp, Scalar delta,
                                     Scalar tol = Scalar(1e-10), long max_iter = 100000) {
  FixedPointOptions<Scalar> opts{mdp.gamma(), tol, max_iter, StoppingRule::Certified};
  return fixed_point<Scalar>(
      [&](const QFunction<Scalar>& q) { return exact_robust_bellman(mdp, q, delta); },
      QFunction<Scalar>::Zero(mdp.dim()), opts);
}

}  // namespace drmdp
