#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "cartpole/pid.hpp"
#include "cartpole/plant.hpp"

namespace cartpole {

struct RiccatiError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Solve the continuous algebraic Riccati equation
//   A'P + PA - P B R^-1 B' P + Q = 0
// for the stabilizing P = P' >= 0 via the matrix sign function of the
// Hamiltonian H = [[A, -B R^-1 B'], [-Q, -A']] (Byers 1987, with
// determinant scaling). P is extracted from the stable invariant
// subspace by a least-squares solve.
inline Eigen::MatrixXd care_solve(const Eigen::MatrixXd& A,
                                  const Eigen::MatrixXd& B,
                                  const Eigen::MatrixXd& Q,
                                  const Eigen::MatrixXd& R) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || Q.rows() != n || Q.cols() != n || B.rows() != n)
    throw std::invalid_argument("care_solve: dimension mismatch");
  if (R.rows() != B.cols() || R.cols() != B.cols())
    throw std::invalid_argument("care_solve: R must be square with B.cols() rows");
  if ((Q - Q.transpose()).lpNorm<Eigen::Infinity>() > 1e-10)
    throw std::invalid_argument("care_solve: Q must be symmetric");

  Eigen::LLT<Eigen::MatrixXd> r_chol(R);
  if (r_chol.info() != Eigen::Success)
    throw std::invalid_argument("care_solve: R must be positive definite");
  const Eigen::MatrixXd G = B * r_chol.solve(B.transpose());

  Eigen::MatrixXd Z(2 * n, 2 * n);
  Z << A, -G, -Q, -A.transpose();

  const double tol = 1e-12;
  const int max_iterations = 100;
  const double dim = static_cast<double>(2 * n);
  bool converged = false;
  for (int it = 0; it < max_iterations; ++it) {
    const Eigen::MatrixXd Z_prev = Z;
    // scale by the reciprocal geometric mean of |eigenvalues|
    const double ck = std::pow(std::abs(Z.determinant()), -1.0 / dim);
    Z *= ck;
    Z = 0.5 * (Z + Z.inverse());
    if ((Z - Z_prev).norm() < tol) {
      converged = true;
      break;
    }
  }
  if (!converged) throw RiccatiError("care_solve: sign iteration did not converge");

  // Stable subspace satisfies (sign(H) + I)[X; PX] = 0:
  //   [W12; W22 + I] P = -[W11 + I; W21]
  const Eigen::MatrixXd W11 = Z.topLeftCorner(n, n);
  const Eigen::MatrixXd W12 = Z.topRightCorner(n, n);
  const Eigen::MatrixXd W21 = Z.bottomLeftCorner(n, n);
  const Eigen::MatrixXd W22 = Z.bottomRightCorner(n, n);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd lhs(2 * n, n);
  Eigen::MatrixXd rhs(2 * n, n);
  lhs << W12, W22 + eye;
  rhs << -(W11 + eye), -W21;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(lhs, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::MatrixXd P = svd.solve(rhs);
  P = 0.5 * (P + P.transpose());

  // A - G P must be Hurwitz and P positive semidefinite, otherwise the
  // pair was not stabilizable (or the subspace extraction failed).
  const Eigen::VectorXcd cl = (A - G * P).eigenvalues();
  for (Eigen::Index i = 0; i < cl.size(); ++i)
    if (cl(i).real() >= 0.0)
      throw RiccatiError("care_solve: closed loop not Hurwitz (non-stabilizable pair?)");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
  if (es.eigenvalues().minCoeff() < -1e-8 * (1.0 + P.norm()))
    throw RiccatiError("care_solve: extracted P is indefinite");
  return P;
}

// K = R^-1 B' P, the optimal state-feedback row for u = -K x.
inline Eigen::RowVector4d lqr_gain(const LinearModel& model,
                                   const Eigen::Matrix4d& Q, double R) {
  const Eigen::MatrixXd P = care_solve(
      model.A, model.B, Q, Eigen::MatrixXd::Constant(1, 1, R));
  return (model.B.transpose() * P) / R;
}

// Full-state LQR configuration for the inner-loop replacement.
struct LqrConfig {
  Eigen::Matrix4d Q = Eigen::Matrix4d::Zero();
  double R = 1.0;
  double force_min = -12.0;
  double force_max = 12.0;
  double ts = 1e-3;

  void validate() const {
    if (!(R > 0.0)) throw std::invalid_argument("lqr: R must be > 0");
    if (!(force_min < force_max)) throw std::invalid_argument("lqr: force limits inverted");
    if (!(ts > 0.0)) throw std::invalid_argument("lqr: sample period must be > 0");
    if ((Q - Q.transpose()).lpNorm<Eigen::Infinity>() > 1e-10)
      throw std::invalid_argument("lqr: Q must be symmetric");
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(Q);
    if (es.eigenvalues().minCoeff() < -1e-12)
      throw std::invalid_argument("lqr: Q must be positive semidefinite");
  }
};

// State feedback about the shifted reference [x_ref, 0, 0, 0]. The
// position error is clamped before the gain so that pendulum regulation
// keeps priority over homing during large recoveries; without the clamp
// the saturated loop loses the rod on far excursions.
struct HybridConfig {
  LqrConfig lqr;
  double x_error_limit = 0.05;  // m

  void validate() const {
    lqr.validate();
    if (!(x_error_limit > 0.0))
      throw std::invalid_argument("hybrid: x error limit must be > 0");
  }
};

inline double hybrid_step(const HybridConfig& cfg, const Eigen::RowVector4d& K,
                          double x_ref, const State& s) {
  const double ex = saturate(s.x - x_ref, -cfg.x_error_limit, cfg.x_error_limit);
  const double u = -(K(0) * ex + K(1) * s.v + K(2) * s.theta + K(3) * s.omega);
  return saturate(u, cfg.lqr.force_min, cfg.lqr.force_max);
}

}  // namespace cartpole
