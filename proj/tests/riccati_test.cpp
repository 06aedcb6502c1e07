#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cartpole/catalog.hpp"
#include "cartpole/riccati.hpp"

using namespace cartpole;

namespace {

double care_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                     const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                     const Eigen::MatrixXd& P) {
  const Eigen::MatrixXd res =
      A.transpose() * P + P * A - P * B * R.inverse() * B.transpose() * P + Q;
  return res.norm();
}

bool hurwitz(const Eigen::MatrixXd& M) {
  const Eigen::VectorXcd eig = M.eigenvalues();
  for (Eigen::Index i = 0; i < eig.size(); ++i)
    if (eig(i).real() >= 0.0) return false;
  return true;
}

}  // namespace

TEST_CASE("scalar Riccati, neutrally stable plant") {
  // A=0, B=1, Q=1, R=1: p^2 = 1, stabilizing root p = 1
  const Eigen::MatrixXd one = Eigen::MatrixXd::Constant(1, 1, 1.0);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 1);
  const Eigen::MatrixXd P = care_solve(zero, one, one, one);
  CHECK(P(0, 0) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("scalar Riccati, unstable plant with zero state weight") {
  // A=1, B=1, Q=0, R=1: p^2 - 2p = 0; the stabilizing root is p = 2
  const Eigen::MatrixXd one = Eigen::MatrixXd::Constant(1, 1, 1.0);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 1);
  const Eigen::MatrixXd P = care_solve(one, one, zero, one);
  CHECK(P(0, 0) == Catch::Approx(2.0).margin(1e-10));
}

TEST_CASE("scalar lqr gain") {
  const Eigen::MatrixXd one = Eigen::MatrixXd::Constant(1, 1, 1.0);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 1);
  const Eigen::MatrixXd P = care_solve(zero, one, one, one);
  const Eigen::MatrixXd K = one.inverse() * one.transpose() * P;
  CHECK(K(0, 0) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("benchmark plant with the disturbance-study weights") {
  const LinearModel lm = linearize(PlantParams::benchmark());
  const Eigen::Matrix4d Q = lqr_weight_q();
  const double R = 0.001;
  const Eigen::MatrixXd P =
      care_solve(lm.A, lm.B, Q, Eigen::MatrixXd::Constant(1, 1, R));
  const double res = care_residual(lm.A, lm.B, Q, Eigen::MatrixXd::Constant(1, 1, R), P);
  CHECK(res < 1e-8 * (1.0 + Q.norm()));
  const Eigen::RowVector4d K = lqr_gain(lm, Q, R);
  CHECK(hurwitz(lm.A - lm.B * K));
}

TEST_CASE("heavy plant gain stabilizes") {
  const LinearModel lm = linearize(PlantParams::heavy());
  const Eigen::RowVector4d K = lqr_gain(lm, lqr_weight_q(), 0.001);
  CHECK(hurwitz(lm.A - lm.B * K));
}

TEST_CASE("random stabilizable systems: residual and closed-loop stability") {
  std::mt19937 rng(314);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd S(4, 4), B(4, 1);
    for (int i = 0; i < 4; ++i) {
      B(i, 0) = u(rng);
      for (int j = 0; j < 4; ++j) S(i, j) = 2.0 * u(rng);
    }
    if (B.norm() < 0.1) B(0, 0) += 1.0;
    // shift left so every mode is stable: (A, B) trivially stabilizable
    const Eigen::MatrixXd A = S - 5.0 * Eigen::MatrixXd::Identity(4, 4);
    Eigen::MatrixXd Qh(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) Qh(i, j) = u(rng);
    const Eigen::MatrixXd Q = Qh * Qh.transpose();  // PSD
    const Eigen::MatrixXd R = Eigen::MatrixXd::Constant(1, 1, 0.5 + std::abs(u(rng)));

    const Eigen::MatrixXd P = care_solve(A, B, Q, R);
    REQUIRE(care_residual(A, B, Q, R, P) < 1e-8 * (1.0 + Q.norm()));
    REQUIRE(hurwitz(A - B * R.inverse() * B.transpose() * P));
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
    REQUIRE(es.eigenvalues().minCoeff() > -1e-8 * (1.0 + P.norm()));
  }
}

TEST_CASE("K is invariant to scaling Q and R together") {
  const LinearModel lm = linearize(PlantParams::benchmark());
  const Eigen::Matrix4d Q = lqr_weight_q();
  const Eigen::RowVector4d k1 = lqr_gain(lm, Q, 0.001);
  const Eigen::RowVector4d k2 = lqr_gain(lm, Eigen::Matrix4d(37.0 * Q), 0.037);
  for (int i = 0; i < 4; ++i) CHECK(k1(i) == Catch::Approx(k2(i)).margin(1e-9 * std::abs(k1(i)) + 1e-9));
}

TEST_CASE("non-stabilizable pair is reported") {
  // unstable mode decoupled from the input
  Eigen::MatrixXd A(2, 2), B(2, 1), Q(2, 2), R(1, 1);
  A << 1.0, 0.0, 0.0, -1.0;
  B << 0.0, 1.0;
  Q.setIdentity();
  R.setIdentity();
  CHECK_THROWS_AS(care_solve(A, B, Q, R), RiccatiError);
}

TEST_CASE("input validation") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
  Eigen::MatrixXd B = Eigen::MatrixXd::Ones(2, 1);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd Rbad = Eigen::MatrixXd::Constant(1, 1, -1.0);
  CHECK_THROWS_AS(care_solve(A, B, Q, Rbad), std::invalid_argument);
  Eigen::MatrixXd Qasym = Q;
  Qasym(0, 1) = 0.5;
  CHECK_THROWS_AS(care_solve(A, B, Qasym, Eigen::MatrixXd::Identity(1, 1)),
                  std::invalid_argument);
}

TEST_CASE("hybrid force is zero at the reference and saturates") {
  HybridConfig h;
  h.lqr.Q = lqr_weight_q();
  h.lqr.R = 0.001;
  const Eigen::RowVector4d K = lqr_gain(linearize(PlantParams::heavy()), h.lqr.Q, h.lqr.R);
  CHECK(hybrid_step(h, K, 0.10, State{0.10, 0.0, 0.0, 0.0}) == 0.0);
  CHECK(hybrid_step(h, K, 0.0, State{0.0, 0.0, 0.5, 0.0}) == 12.0);
  CHECK(hybrid_step(h, K, 0.0, State{0.0, 0.0, -0.5, 0.0}) == -12.0);
}
