#include "drmdp/clt.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

#include "drmdp/error.hpp"

namespace drmdp::clt {

MomentQuantities moment_quantities(const Mdp& mdp, const QFunction<double>& u_star_eps,
                                   double epsilon) {
  require(epsilon >= 0.0, ErrorKind::InvalidArgument, "epsilon must be >= 0");
  const StateValue<double> v = v_max(mdp, u_star_eps);
  const Vector<double> m1 = mdp.kernel() * v;
  const Vector<double> m2 = mdp.kernel() * v.array().pow(2).matrix();
  const Vector<double> m3 = mdp.kernel() * v.array().pow(3).matrix();
  const Vector<double> m4 = mdp.kernel() * v.array().pow(4).matrix();

  MomentQuantities mq;
  mq.m_star = m1;
  mq.g_star = m2;
  mq.V = (m2.array() - m1.array().square()).max(0.0).matrix();
  mq.C = (m3.array() - m1.array() * m2.array()).matrix();
  mq.W = (m4.array() - m2.array().square()).max(0.0).matrix();
  mq.sigma_star = (mq.V.array() + epsilon).sqrt().matrix();
  return mq;
}

namespace {

void require_nondegenerate(const MomentQuantities& mq, double delta) {
  if (delta == 0.0) return;
  for (Index z = 0; z < mq.sigma_star.size(); ++z) {
    if (!(mq.sigma_star(z) > 1e-300)) {
      throw Error(ErrorKind::DegenerateVariance,
                  "sigma* vanishes at z = " + std::to_string(z) + "; use epsilon > 0");
    }
  }
}

// Diagonals of A = dR/dm and B = dR/dg at the fixed point.
std::pair<Vector<double>, Vector<double>> moment_sensitivities(const MomentQuantities& mq,
                                                               double delta, double gamma) {
  const double root = std::sqrt(2.0 * delta);
  const Index d = mq.V.size();
  if (delta == 0.0) return {Vector<double>::Constant(d, gamma), Vector<double>::Zero(d)};
  Vector<double> a = (gamma * (1.0 + root * mq.m_star.array() / mq.sigma_star.array())).matrix();
  Vector<double> b = (-gamma * root / (2.0 * mq.sigma_star.array())).matrix();
  return {std::move(a), std::move(b)};
}

}  // namespace

std::vector<Index> genuine_ties(const Mdp& mdp, const QFunction<double>& u, double tie_tol) {
  const GreedyPolicy<double> policy = greedy(mdp, u, tie_tol);
  std::vector<Index> out;
  for (Index s : policy.tied_states) {
    const Index best = mdp.index(s, policy.action[static_cast<std::size_t>(s)]);
    for (Index a = 0; a < mdp.n_actions(); ++a) {
      const Index z = mdp.index(s, a);
      if (z == best || u(z) < u(best) - tie_tol) continue;
      const bool aliased = mdp.reward()(z) == mdp.reward()(best) &&
                           mdp.kernel().row(z) == mdp.kernel().row(best);
      if (!aliased) {
        out.push_back(s);
        break;
      }
    }
  }
  return out;
}

Matrix<double> build_h(const Mdp& mdp, const QFunction<double>& u_star_eps,
                       const MomentQuantities& mq, double delta, double tie_tol) {
  require(delta >= 0.0, ErrorKind::InvalidArgument, "delta must be >= 0");
  const GreedyPolicy<double> policy = greedy(mdp, u_star_eps, tie_tol);
  const std::vector<Index> ties = genuine_ties(mdp, u_star_eps, tie_tol);
  if (!ties.empty()) {
    std::string states;
    for (Index s : ties) states += (states.empty() ? "" : ",") + std::to_string(s);
    throw Error(ErrorKind::GreedyTie, "greedy action not unique at states [" + states + "]");
  }
  require_nondegenerate(mq, delta);

  const Index d = mdp.dim();
  const double root = std::sqrt(2.0 * delta);
  Matrix<double> h = -Matrix<double>::Identity(d, d);
  for (Index z = 0; z < d; ++z) {
    const double inv_sigma = delta == 0.0 ? 0.0 : 1.0 / mq.sigma_star(z);
    for (Index s = 0; s < mdp.n_states(); ++s) {
      const double p = mdp.kernel()(z, s);
      if (p == 0.0) continue;
      const Index next = mdp.index(s, policy.action[static_cast<std::size_t>(s)]);
      const double weight =
          1.0 + root * mq.m_star(z) * inv_sigma - root * u_star_eps(next) * inv_sigma;
      h(z, next) += mdp.gamma() * weight * p;
    }
  }
  return h;
}

Vector<double> gamma_u(const MomentQuantities& mq, double delta, double gamma) {
  require_nondegenerate(mq, delta);
  const auto [a, b] = moment_sensitivities(mq, delta, gamma);
  return (a.array().square() * mq.V.array() + 2.0 * a.array() * b.array() * mq.C.array() +
          b.array().square() * mq.W.array())
      .matrix();
}

Matrix<double> fast_covariance(const MomentQuantities& mq) {
  const Index d = mq.V.size();
  Matrix<double> gamma22 = Matrix<double>::Zero(2 * d, 2 * d);
  gamma22.topLeftCorner(d, d) = mq.V.asDiagonal();
  gamma22.topRightCorner(d, d) = mq.C.asDiagonal();
  gamma22.bottomLeftCorner(d, d) = mq.C.asDiagonal();
  gamma22.bottomRightCorner(d, d) = mq.W.asDiagonal();
  return 0.5 * gamma22;
}

Matrix<double> gamma_u_from_blocks(const MomentQuantities& mq, double delta, double gamma) {
  require_nondegenerate(mq, delta);
  const auto [a, b] = moment_sensitivities(mq, delta, gamma);
  const Index d = mq.V.size();
  Matrix<double> q12(d, 2 * d);
  q12 << Matrix<double>(a.asDiagonal()), Matrix<double>(b.asDiagonal());
  const Matrix<double> gamma22 = 2.0 * fast_covariance(mq);
  return q12 * gamma22 * q12.transpose();
}

double spectral_abscissa(const Matrix<double>& m) {
  Eigen::EigenSolver<Matrix<double>> solver(m, false);
  require(solver.info() == Eigen::Success, ErrorKind::Singular, "eigenvalue solver failed");
  return solver.eigenvalues().real().maxCoeff();
}

namespace {

Matrix<double> solve_kronecker(const Matrix<double>& m, const Matrix<double>& gamma) {
  const Index d = m.rows();
  const Matrix<double> eye = Matrix<double>::Identity(d, d);
  Matrix<double> system = Matrix<double>::Zero(d * d, d * d);
  // Column-major vec: vec(M S) = (I (x) M) vec S, vec(S M^T) = (M (x) I) vec S.
  for (Index j = 0; j < d; ++j) {
    system.block(j * d, j * d, d, d) += m;
    for (Index k = 0; k < d; ++k) {
      if (m(j, k) != 0.0) system.block(j * d, k * d, d, d) += m(j, k) * eye;
    }
  }
  Eigen::PartialPivLU<Matrix<double>> lu(system);
  if (!(lu.rcond() > 1e-14)) throw Error(ErrorKind::Singular, "Lyapunov system is singular");
  const Vector<double> rhs = -Eigen::Map<const Vector<double>>(gamma.data(), d * d);
  const Vector<double> sol = lu.solve(rhs);
  return Eigen::Map<const Matrix<double>>(sol.data(), d, d);
}

Matrix<double> solve_schur(const Matrix<double>& m, const Matrix<double>& gamma) {
  using Complex = std::complex<double>;
  using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  using CVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
  const Index d = m.rows();
  Eigen::ComplexSchur<Matrix<double>> schur(m);
  require(schur.info() == Eigen::Success, ErrorKind::Singular, "Schur decomposition failed");
  const CMatrix& t = schur.matrixT();
  const CMatrix& q = schur.matrixU();
  // With M = Q T Q^*, Y = Q^* S Q solves T Y + Y T^* = -Q^* Gamma Q.
  const CMatrix f = -(q.adjoint() * gamma.cast<Complex>() * q);
  CMatrix y = CMatrix::Zero(d, d);
  for (Index j = d - 1; j >= 0; --j) {
    CVector rhs = f.col(j);
    for (Index k = j + 1; k < d; ++k) rhs -= std::conj(t(j, k)) * y.col(k);
    CMatrix shifted = t;
    shifted.diagonal().array() += std::conj(t(j, j));
    if (!(shifted.diagonal().cwiseAbs().minCoeff() > 1e-300)) {
      throw Error(ErrorKind::Singular, "Lyapunov system is singular");
    }
    y.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  return (q * y * q.adjoint()).real();
}

}  // namespace

Matrix<double> solve_lyapunov(const Matrix<double>& m, const Matrix<double>& gamma,
                              LyapunovMethod method) {
  require(m.rows() == m.cols() && gamma.rows() == m.rows() && gamma.cols() == m.cols(),
          ErrorKind::ShapeMismatch, "Lyapunov operands must be square and equal size");
  const double abscissa = spectral_abscissa(m);
  if (!(abscissa < 0.0)) {
    throw Error(ErrorKind::Unstable,
                "matrix is not Hurwitz: max Re(eig) = " + std::to_string(abscissa));
  }
  if (method == LyapunovMethod::Automatic) {
    method = m.rows() <= kKroneckerMaxDim ? LyapunovMethod::Kronecker : LyapunovMethod::Schur;
  }
  Matrix<double> sigma =
      method == LyapunovMethod::Kronecker ? solve_kronecker(m, gamma) : solve_schur(m, gamma);
  return 0.5 * (sigma + sigma.transpose());
}

CltArtifacts clt_artifacts(const Mdp& mdp, const QFunction<double>& u_star_eps,
                           const AmbiguityConfig<double>& cfg, const mvsa::StepSchedule& sched,
                           double tie_tol, LyapunovMethod method) {
  cfg.validate();
  sched.validate();
  CltArtifacts out;
  out.moments = moment_quantities(mdp, u_star_eps, cfg.epsilon);
  out.greedy_map = greedy(mdp, u_star_eps, tie_tol);
  out.H = build_h(mdp, u_star_eps, out.moments, cfg.delta, tie_tol);
  out.spectral_abscissa_H = spectral_abscissa(out.H);
  out.Gamma_U = gamma_u(out.moments, cfg.delta, mdp.gamma()).asDiagonal();
  out.Sigma_fast = fast_covariance(out.moments);
  out.a_step = sched.a;

  const Index d = mdp.dim();
  const Matrix<double> drift = out.H + Matrix<double>::Identity(d, d) / (2.0 * sched.a);
  out.Sigma_U = solve_lyapunov(drift, out.Gamma_U, method);
  out.lyapunov_residual =
      (drift * out.Sigma_U + out.Sigma_U * drift.transpose() + out.Gamma_U).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Matrix<double>> eig(out.Sigma_U, Eigen::EigenvaluesOnly);
  out.sigma_u_min_eigenvalue = eig.eigenvalues().minCoeff();
  return out;
}

double chi2_2dof_quantile(double level) {
  require(level > 0.0 && level < 1.0, ErrorKind::InvalidArgument, "level must lie in (0, 1)");
  return -2.0 * std::log1p(-level);
}

double ellipse_coverage(const Matrix<double>& samples, const Matrix<double>& sigma2,
                        double level) {
  require(samples.cols() == 2 && sigma2.rows() == 2 && sigma2.cols() == 2,
          ErrorKind::ShapeMismatch, "ellipse coverage needs n x 2 samples and a 2 x 2 matrix");
  require(samples.rows() > 0, ErrorKind::InvalidArgument, "no samples");
  const double threshold = chi2_2dof_quantile(level);
  Eigen::LLT<Matrix<double>> llt(sigma2);
  const double scale = sigma2.cwiseAbs().maxCoeff();
  if (llt.info() != Eigen::Success || !(sigma2.determinant() > 1e-14 * scale * scale)) {
    throw Error(ErrorKind::Singular, "covariance block is singular");
  }
  const Matrix<double> whitened = llt.matrixL().solve(samples.transpose());
  const auto inside = (whitened.colwise().squaredNorm().array() <= threshold).count();
  return static_cast<double>(inside) / static_cast<double>(samples.rows());
}

Matrix<double> scaled_slow_errors(const std::vector<mvsa::RunRecord>& runs,
                                  const QFunction<double>& u_star_eps, double a,
                                  const std::vector<Index>& coordinates) {
  Matrix<double> out(static_cast<Index>(runs.size()), static_cast<Index>(coordinates.size()));
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const double n = static_cast<double>(runs[i].elapsed_steps);
    for (std::size_t j = 0; j < coordinates.size(); ++j) {
      const Index z = coordinates[j];
      out(static_cast<Index>(i), static_cast<Index>(j)) =
          std::sqrt(n / a) * (runs[i].final_state.u(z) - u_star_eps(z));
    }
  }
  return out;
}

Matrix<double> scaled_fast_errors(const std::vector<mvsa::RunRecord>& runs,
                                  const QFunction<double>& m_star,
                                  const mvsa::StepSchedule& sched,
                                  const std::vector<Index>& coordinates) {
  Matrix<double> out(static_cast<Index>(runs.size()), static_cast<Index>(coordinates.size()));
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const double n = static_cast<double>(runs[i].elapsed_steps);
    const double scale = std::pow(n, sched.tau / 2.0) / std::sqrt(sched.b);
    for (std::size_t j = 0; j < coordinates.size(); ++j) {
      const Index z = coordinates[j];
      out(static_cast<Index>(i), static_cast<Index>(j)) =
          scale * (runs[i].final_state.m(z) - m_star(z));
    }
  }
  return out;
}

Vector<double> column_variance(const Matrix<double>& samples) {
  require(samples.rows() >= 2, ErrorKind::InvalidArgument, "need at least two samples");
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  return ((samples.rowwise() - mean).colwise().squaredNorm() /
          static_cast<double>(samples.rows() - 1))
      .transpose();
}

}  // namespace drmdp::clt
