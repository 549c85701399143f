#pragma once

#include <utility>
#include <vector>

#include "drmdp/mdp.hpp"
#include "drmdp/mvsa.hpp"
#include "drmdp/robust.hpp"

namespace drmdp::clt {

/// Conditional moments of Z(z) = v_max(U*)(X'), X' ~ P0(.|z), at the stabilized fixed point.
struct MomentQuantities {
  Vector<double> V;  // Var Z
  Vector<double> C;  // Cov(Z, Z^2)
  Vector<double> W;  // Var Z^2
  QFunction<double> m_star;
  QFunction<double> g_star;
  QFunction<double> sigma_star;  // sqrt(g* - m*^2 + eps)
};

MomentQuantities moment_quantities(const Mdp& mdp, const QFunction<double>& u_star_eps,
                                   double epsilon);

/// States with a greedy tie between actions that differ as decisions. Tied actions with
/// identical kernel rows and rewards are aliases of one decision and do not count.
std::vector<Index> genuine_ties(const Mdp& mdp, const QFunction<double>& u, double tie_tol);

/// Jacobian-based drift matrix of the slow iterate:
/// H(z, z') = -1{z = z'} + gamma (1 + sqrt(2 delta) m*(z)/sigma*(z)
///            - sqrt(2 delta) U*(z')/sigma*(z)) P0(s'|z) 1{a' = a*(s')}.
/// Throws GreedyTie when genuine_ties is nonempty and DegenerateVariance when
/// delta > 0 and some sigma*(z) vanishes.
Matrix<double> build_h(const Mdp& mdp, const QFunction<double>& u_star_eps,
                       const MomentQuantities& mq, double delta, double tie_tol = 1e-8);

/// Diagonal of Gamma_U in closed form: A^2 V + 2 A B C + B^2 W with
/// A = gamma (1 + sqrt(2 delta) m*/sigma*) and B = -gamma sqrt(2 delta) / (2 sigma*).
Vector<double> gamma_u(const MomentQuantities& mq, double delta, double gamma);

/// Gamma_U assembled as Q12 Gamma22 Q12^T from the dense blocks.
Matrix<double> gamma_u_from_blocks(const MomentQuantities& mq, double delta, double gamma);

/// Sigma_(m,g) = Gamma22 / 2 with Gamma22 = [[diag V, diag C], [diag C, diag W]].
Matrix<double> fast_covariance(const MomentQuantities& mq);

enum class LyapunovMethod {
  /// Dense (I (x) M + M (x) I) vec(Sigma) = -vec(Gamma), d^2 unknowns.
  Kronecker,
  /// Bartels-Stewart on the complex Schur form of M.
  Schur,
  /// Kronecker up to kKroneckerMaxDim, Schur above.
  Automatic,
};

inline constexpr Index kKroneckerMaxDim = 40;

/// Largest real part over the eigenvalues of M.
double spectral_abscissa(const Matrix<double>& m);

/// Sigma with M Sigma + Sigma M^T = -Gamma, symmetrized. Throws Unstable when M has an
/// eigenvalue with nonnegative real part and Singular when the linear system is singular.
Matrix<double> solve_lyapunov(const Matrix<double>& m, const Matrix<double>& gamma,
                              LyapunovMethod method = LyapunovMethod::Automatic);

struct CltArtifacts {
  Matrix<double> H;
  Matrix<double> Gamma_U;     // diagonal
  Matrix<double> Sigma_U;     // solves (H + I/2a) S + S (H + I/2a)^T = -Gamma_U
  Matrix<double> Sigma_fast;  // 2d x 2d
  MomentQuantities moments;
  GreedyPolicy<double> greedy_map;
  double a_step = 0.0;
  double spectral_abscissa_H = 0.0;
  double lyapunov_residual = 0.0;     // ||M S + S M^T + Gamma_U||_inf
  double sigma_u_min_eigenvalue = 0.0;
};

CltArtifacts clt_artifacts(const Mdp& mdp, const QFunction<double>& u_star_eps,
                           const AmbiguityConfig<double>& cfg, const mvsa::StepSchedule& sched,
                           double tie_tol = 1e-8,
                           LyapunovMethod method = LyapunovMethod::Automatic);

/// -2 ln(1 - level), the chi-square(2) quantile.
double chi2_2dof_quantile(double level);

/// Fraction of rows x of `samples` (n x 2) with x^T Sigma2^{-1} x <= chi2_2dof_quantile(level).
double ellipse_coverage(const Matrix<double>& samples, const Matrix<double>& sigma2,
                        double level);

/// sqrt(n/a) (U_n(z) - U*(z)) for each run (rows) and coordinate (columns), with n the
/// number of updates the run performed.
Matrix<double> scaled_slow_errors(const std::vector<mvsa::RunRecord>& runs,
                                  const QFunction<double>& u_star_eps, double a,
                                  const std::vector<Index>& coordinates);

/// n^{tau/2} (m_n(z) - m*(z)) / sqrt(b) per run and coordinate.
Matrix<double> scaled_fast_errors(const std::vector<mvsa::RunRecord>& runs,
                                  const QFunction<double>& m_star,
                                  const mvsa::StepSchedule& sched,
                                  const std::vector<Index>& coordinates);

/// Unbiased column variances.
Vector<double> column_variance(const Matrix<double>& samples);

}  // namespace drmdp::clt
