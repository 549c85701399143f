#pragma once

#include <Eigen/Core>

#include <cmath>
#include <string>

#include "drmdp/error.hpp"
#include "drmdp/mdp.hpp"

namespace drmdp {

/// KL radius and variance safety parameter.
template <typename Scalar>
struct AmbiguityConfig {
  Scalar delta = Scalar(0);
  Scalar epsilon = Scalar(0);

  void validate() const {
    require(delta >= Scalar(0), ErrorKind::InvalidArgument, "delta must be >= 0");
    require(epsilon >= Scalar(0), ErrorKind::InvalidArgument, "epsilon must be >= 0");
  }

  /// L = gamma * (1 + sqrt(2 delta)), the Lipschitz constant of the approximate operator.
  Scalar lipschitz(Scalar gamma) const {
    using std::sqrt;
    return gamma * (Scalar(1) + sqrt(Scalar(2) * delta));
  }
};

/// First and second conditional moments of v_max(U) under the nominal kernel.
template <typename Scalar>
struct Moments {
  QFunction<Scalar> mu;
  QFunction<Scalar> nu;
};

template <typename Scalar>
Moments<Scalar> moments(const TabularMdp<Scalar>& mdp, const QFunction<Scalar>& u) {
  const StateValue<Scalar> v = v_max(mdp, u);
  return {mdp.kernel() * v, mdp.kernel() * v.cwiseAbs2()};
}

/// sqrt(nu - mu^2 + epsilon), with variance round-off down to -1e-12 clamped to zero.
template <typename Scalar>
QFunction<Scalar> sigma_eps(const QFunction<Scalar>& mu, const QFunction<Scalar>& nu,
                            Scalar epsilon) {
  require(mu.size() == nu.size(), ErrorKind::ShapeMismatch, "mu/nu length mismatch");
  require(epsilon >= Scalar(0), ErrorKind::InvalidArgument, "epsilon must be >= 0");
  QFunction<Scalar> out(mu.size());
  for (Index z = 0; z < mu.size(); ++z) {
    Scalar var = nu(z) - mu(z) * mu(z);
    if (var < Scalar(-1e-9)) {
      throw Error(ErrorKind::NegativeVariance,
                  "nu - mu^2 = " + std::to_string(static_cast<double>(var)) +
                      " at z = " + std::to_string(z));
    }
    if (var < Scalar(0)) var = Scalar(0);
    using std::sqrt;
    out(z) = sqrt(var + epsilon);
  }
  return out;
}

/// r + gamma * mu[U]: the non-robust Bellman optimality operator.
template <typename Scalar>
QFunction<Scalar> classical_bellman(const TabularMdp<Scalar>& mdp, const QFunction<Scalar>& u) {
  return mdp.reward() + mdp.gamma() * (mdp.kernel() * v_max(mdp, u));
}

/// r + gamma * mu[U] - gamma * sqrt(2 delta) * sigma_eps[U].
template <typename Scalar>
QFunction<Scalar> approx_bellman(const TabularMdp<Scalar>& mdp, const QFunction<Scalar>& u,
                                 const AmbiguityConfig<Scalar>& cfg) {
  cfg.validate();
  using std::sqrt;
  const Moments<Scalar> mom = moments(mdp, u);
  const Scalar gamma = mdp.gamma();
  if (cfg.delta == Scalar(0)) return mdp.reward() + gamma * mom.mu;
  return mdp.reward() + gamma * mom.mu -
         gamma * sqrt(Scalar(2) * cfg.delta) * sigma_eps(mom.mu, mom.nu, cfg.epsilon);
}

namespace detail {

// Dual objective of the KL-constrained worst case, written around the support
// minimum: g(alpha) = vmin - alpha * log E[exp(-(v - vmin)/alpha)] - alpha * delta.
template <typename Scalar>
struct KlDual {
  const Vector<Scalar>& p;
  const Vector<Scalar>& shifted;  // v - vmin, zero-mass atoms removed
  Scalar vmin;
  Scalar delta;

  // log E[exp(-w/alpha)] computed via expm1/log1p so large alpha stays accurate.
  Scalar log_mgf(Scalar alpha) const {
    using std::expm1;
    using std::log1p;
    Scalar acc(0);
    for (Index i = 0; i < p.size(); ++i) acc += p(i) * expm1(-shifted(i) / alpha);
    return log1p(acc);
  }

  Scalar value(Scalar alpha) const { return vmin - alpha * log_mgf(alpha) - alpha * delta; }

  Scalar derivative(Scalar alpha) const {
    using std::exp;
    Scalar mass(0);
    Scalar tilt(0);
    for (Index i = 0; i < p.size(); ++i) {
      const Scalar e = p(i) * exp(-shifted(i) / alpha);
      mass += e;
      tilt += e * shifted(i);
    }
    return -log_mgf(alpha) - tilt / (alpha * mass) - delta;
  }
};

}  // namespace detail

/// inf { E_P[values] : KL(P || p0) <= delta }, evaluated through the concave scalar dual
/// sup_{alpha > 0} -alpha log E_p0[exp(-values/alpha)] - alpha delta.
///
/// The maximizer is bracketed in [1e-8, max(1, span/delta)] (the upper end expanded
/// geometrically until the derivative turns negative) and located by golden section to
/// 1e-10 in alpha.
template <typename DerivedP, typename DerivedV>
typename DerivedP::Scalar kl_worst_case(const Eigen::MatrixBase<DerivedP>& p0,
                                        const Eigen::MatrixBase<DerivedV>& values,
                                        typename DerivedP::Scalar delta) {
  using Scalar = typename DerivedP::Scalar;
  using std::abs;
  using std::log;
  using std::sqrt;
  require(p0.size() == values.size() && p0.size() > 0, ErrorKind::ShapeMismatch,
          "p0 and values must have equal, nonzero length");
  require(delta >= Scalar(0), ErrorKind::InvalidArgument, "delta must be >= 0");
  require(values.allFinite(), ErrorKind::InvalidArgument, "values must be finite");
  require((p0.array() >= Scalar(0)).all(), ErrorKind::InvalidDistribution,
          "p0 has negative mass");
  require(abs(p0.sum() - Scalar(1)) <= Scalar(1e-9), ErrorKind::InvalidDistribution,
          "p0 does not sum to 1");

  Index support = 0;
  for (Index i = 0; i < p0.size(); ++i) support += p0(i) > Scalar(0) ? 1 : 0;
  Vector<Scalar> p(support);
  Vector<Scalar> v(support);
  for (Index i = 0, k = 0; i < p0.size(); ++i) {
    if (p0(i) > Scalar(0)) {
      p(k) = p0(i);
      v(k) = values(i);
      ++k;
    }
  }
  const Scalar mean = p.dot(v);
  const Scalar vmin = v.minCoeff();
  const Scalar width = v.maxCoeff() - vmin;
  if (width <= Scalar(1e-12) || delta == Scalar(0)) return mean;

  const Vector<Scalar> shifted = v.array() - vmin;
  Scalar min_mass(0);
  for (Index i = 0; i < support; ++i) min_mass += shifted(i) == Scalar(0) ? p(i) : Scalar(0);
  // The adversary can move all mass onto the minimizers: the supremum sits at alpha -> 0.
  if (-log(min_mass) <= delta) return vmin;

  const detail::KlDual<Scalar> dual{p, shifted, vmin, delta};
  Scalar lo(1e-8);
  Scalar hi = std::max(Scalar(1), width / delta);
  for (int k = 0; k < 200 && dual.derivative(hi) > Scalar(0); ++k) hi *= Scalar(2);

  const Scalar ratio = (sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
  Scalar x1 = hi - ratio * (hi - lo);
  Scalar x2 = lo + ratio * (hi - lo);
  Scalar f1 = dual.value(x1);
  Scalar f2 = dual.value(x2);
  while (hi - lo > Scalar(1e-10)) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = dual.value(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = dual.value(x1);
    }
  }
  const Scalar best = dual.value((lo + hi) / Scalar(2));
  return std::min(std::max(best, vmin), mean);
}

/// Exact KL-robust Bellman operator: r(z) + gamma * inf_{KL(P||P0(.|z)) <= delta} E_P[v_max(Q)].
template <typename Scalar>
QFunction<Scalar> exact_robust_bellman(const TabularMdp<Scalar>& mdp, const QFunction<Scalar>& q,
                                       Scalar delta) {
  require(delta >= Scalar(0), ErrorKind::InvalidArgument, "delta must be >= 0");
  if (delta == Scalar(0)) return classical_bellman(mdp, q);
  const StateValue<Scalar> v = v_max(mdp, q);
  QFunction<Scalar> out(mdp.dim());
  for (Index z = 0; z < mdp.dim(); ++z) {
    const Vector<Scalar> row = mdp.kernel().row(z).transpose();
    out(z) = mdp.reward()(z) + mdp.gamma() * kl_worst_case(row, v, delta);
  }
  return out;
}

}  // namespace drmdp
