#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cartpole/plant.hpp"

using namespace cartpole;

namespace {

PlantParams random_params(std::mt19937& rng) {
  std::uniform_real_distribution<double> mass(0.05, 5.0);
  std::uniform_real_distribution<double> len(0.1, 2.0);
  std::uniform_real_distribution<double> frac(0.3, 1.0);
  std::uniform_real_distribution<double> fric(0.0, 2.0);
  const double m = mass(rng);
  const double l = len(rng);
  const double lc = frac(rng) * l;
  // inertia of the same order as a rod's, scaled randomly
  const double I = m * l * l / 12.0 * std::uniform_real_distribution<double>(0.2, 3.0)(rng);
  return PlantParams(mass(rng), m, l, lc, I, 9.81, fric(rng));
}

// Independent 2x2 solve of the governing equations by Cramer's rule,
// written from the equations directly rather than via accelerations().
Accel cramer_oracle(const PlantParams& p, const State& s, double F) {
  const double c = std::cos(s.theta), sn = std::sin(s.theta);
  const double a = p.M + p.m;
  const double b2 = p.m * p.lc * c;
  const double d = p.I + p.m * p.lc * p.lc;
  const double r1 = F - p.b * s.v + p.m * p.lc * sn * s.omega * s.omega;
  const double r2 = p.m * p.g * p.lc * sn;
  const double det = a * d - b2 * b2;
  return {(r1 * d - b2 * r2) / det, (a * r2 - b2 * r1) / det};
}

}  // namespace

TEST_CASE("accelerations vanish at both equilibria") {
  std::mt19937 rng(1234);
  for (int i = 0; i < 101; ++i) {
    const PlantParams p = i == 0 ? PlantParams::benchmark() : random_params(rng);
    for (const double th : {0.0, M_PI}) {
      const Accel a = accelerations(p, State{0.3, 0.0, th, 0.0}, 0.0);
      REQUIRE(std::abs(a.xdd) < 1e-12);
      REQUIRE(std::abs(a.thetadd) < 1e-12);
    }
  }
}

TEST_CASE("unit force at upright, benchmark parameters") {
  // uniform-rod lc with the rig's tabulated inertia
  const PlantParams p = PlantParams::benchmark();
  const Accel a = accelerations(p, State{}, 1.0);
  // hand-solved 2x2 system, verified against a 30-digit solve
  CHECK(a.xdd == Catch::Approx(1.73444916669685).epsilon(1e-10));
  CHECK(a.thetadd == Catch::Approx(-6.84604083660469).epsilon(1e-10));
}

TEST_CASE("accelerations agree with an independent Cramer solve") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> ang(-2.0 * M_PI, 2.0 * M_PI);
  std::uniform_real_distribution<double> vel(-3.0, 3.0);
  std::uniform_real_distribution<double> f(-20.0, 20.0);
  for (int i = 0; i < 200; ++i) {
    const PlantParams p = random_params(rng);
    const State s{vel(rng), vel(rng), ang(rng), vel(rng)};
    const double F = f(rng);
    const Accel got = accelerations(p, s, F);
    const Accel want = cramer_oracle(p, s, F);
    CHECK(got.xdd == Catch::Approx(want.xdd).margin(1e-12));
    CHECK(got.thetadd == Catch::Approx(want.thetadd).margin(1e-12));
  }
}

TEST_CASE("mirror symmetry: negating state and force negates accelerations") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 500; ++i) {
    const PlantParams p = random_params(rng);
    const State s{u(rng), u(rng), u(rng), u(rng)};
    const double F = 10.0 * u(rng);
    const Accel a = accelerations(p, s, F);
    const Accel b = accelerations(p, State{-s.x, -s.v, -s.theta, -s.omega}, -F);
    CHECK(b.xdd == Catch::Approx(-a.xdd).margin(1e-12));
    CHECK(b.thetadd == Catch::Approx(-a.thetadd).margin(1e-12));
  }
}

TEST_CASE("mass matrix determinant positive over random draws") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  for (int i = 0; i < 10000; ++i) {
    const PlantParams p = random_params(rng);
    const double c = std::cos(ang(rng));
    const double det = (p.M + p.m) * (p.I + p.m * p.lc * p.lc) -
                       (p.m * p.lc * c) * (p.m * p.lc * c);
    REQUIRE(det > 0.0);
  }
}

TEST_CASE("step holds equilibria to machine precision") {
  const PlantParams p = PlantParams::benchmark();
  for (const double th : {0.0, M_PI}) {
    State s{0.1, 0.0, th, 0.0};
    for (int i = 0; i < 10; ++i) s = step(p, s, 0.0, 0.0, 1e-3);
    CHECK(s.x == Catch::Approx(0.1).margin(1e-15));
    CHECK(s.v == Catch::Approx(0.0).margin(1e-15));
    CHECK(s.theta == Catch::Approx(th).margin(1e-15));
    CHECK(s.omega == Catch::Approx(0.0).margin(1e-15));
  }
}

TEST_CASE("disturbance channel is exactly additive") {
  const PlantParams p = PlantParams::benchmark();
  const State s{0.0, 0.2, 0.3, -0.1};
  const State a = step(p, s, 2.0, 0.7, 1e-3);
  const State b = step(p, s, 2.7, 0.0, 1e-3);
  CHECK(a.x == b.x);
  CHECK(a.v == b.v);
  CHECK(a.theta == b.theta);
  CHECK(a.omega == b.omega);
}

TEST_CASE("rk4 order: halved step agrees to 1e-8") {
  const PlantParams p = PlantParams::benchmark();
  State coarse{0.0, 0.0, 0.1, 0.0};
  State fine = coarse;
  for (int i = 0; i < 100; ++i) coarse = step(p, coarse, 0.0, 0.0, 1e-3);
  for (int i = 0; i < 1000; ++i) fine = step(p, fine, 0.0, 0.0, 1e-4);
  CHECK(coarse.x == Catch::Approx(fine.x).margin(1e-8));
  CHECK(coarse.v == Catch::Approx(fine.v).margin(1e-8));
  CHECK(coarse.theta == Catch::Approx(fine.theta).margin(1e-8));
  CHECK(coarse.omega == Catch::Approx(fine.omega).margin(1e-8));
}

TEST_CASE("integration failure surfaces as an error") {
  const PlantParams p = PlantParams::benchmark();
  State s{};
  CHECK_THROWS_AS(
      [&] {
        for (int i = 0; i < 200; ++i) s = step(p, s, 1e300, 0.0, 1.0);
        return s;
      }(),
      IntegrationError);
}

TEST_CASE("energy values at rest") {
  const PlantParams p = PlantParams::benchmark();
  const double mgl = p.m * p.g * p.lc;
  CHECK(energy(p, State{}) == Catch::Approx(mgl).epsilon(1e-12));
  CHECK(energy(p, State{}) == Catch::Approx(0.06970986).epsilon(1e-9));
  CHECK(energy(p, State{0.0, 0.0, M_PI, 0.0}) == Catch::Approx(-mgl).epsilon(1e-12));
  // any state at rest carries only the potential term
  CHECK(energy(p, State{0.4, 0.0, 1.1, 0.0}) ==
        Catch::Approx(mgl * std::cos(1.1)).epsilon(1e-12));
}

TEST_CASE("energy conserved over 10 s of free swing") {
  const PlantParams p = PlantParams::benchmark();
  State s{0.0, 0.0, 170.0 * M_PI / 180.0, 0.0};
  const double e0 = energy(p, s);
  double max_drift = 0.0;
  for (int i = 0; i < 10000; ++i) {
    s = step(p, s, 0.0, 0.0, 1e-3);
    max_drift = std::max(max_drift, std::abs(energy(p, s) - e0));
  }
  CHECK(max_drift < 1e-6 * std::abs(e0) + 1e-9);
}

TEST_CASE("with friction, energy is non-increasing") {
  const PlantParams p = PlantParams::benchmark(0.8);
  State s{0.0, 1.5, 2.0, 0.0};
  double prev = energy(p, s);
  for (int i = 0; i < 5000; ++i) {
    s = step(p, s, 0.0, 0.0, 1e-3);
    const double e = energy(p, s);
    REQUIRE(e <= prev + 1e-12);
    prev = e;
  }
}

TEST_CASE("linearize matches central finite differences") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 101; ++trial) {
    const PlantParams p = trial == 0 ? PlantParams::benchmark() : random_params(rng);
    const LinearModel lm = linearize(p);
    const double h = 1e-6;
    auto fd = [&](int out, int in, double force) {
      State plus{}, minus{};
      double* pf = in == 0 ? &plus.x : in == 1 ? &plus.v : in == 2 ? &plus.theta : &plus.omega;
      double* mf = in == 0 ? &minus.x : in == 1 ? &minus.v : in == 2 ? &minus.theta : &minus.omega;
      *pf += h;
      *mf -= h;
      const Accel ap = accelerations(p, plus, force);
      const Accel am = accelerations(p, minus, force);
      return out == 1 ? (ap.xdd - am.xdd) / (2 * h) : (ap.thetadd - am.thetadd) / (2 * h);
    };
    for (int col = 0; col < 4; ++col) {
      for (int row : {1, 3}) {
        const double want = fd(row, col, 0.0);
        const double got = lm.A(row, col);
        CHECK(got == Catch::Approx(want).epsilon(1e-6).margin(1e-6));
      }
    }
    const Accel bp = accelerations(p, State{}, h);
    const Accel bm = accelerations(p, State{}, -h);
    CHECK(lm.B(1) == Catch::Approx((bp.xdd - bm.xdd) / (2 * h)).epsilon(1e-6));
    CHECK(lm.B(3) == Catch::Approx((bp.thetadd - bm.thetadd) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("dynamics independent of cart position") {
  const LinearModel lm = linearize(PlantParams::benchmark());
  for (int row = 0; row < 4; ++row) CHECK(lm.A(row, 0) == 0.0);
}

TEST_CASE("exactly one unstable mode at the upright equilibrium") {
  const LinearModel lm = linearize(PlantParams::benchmark());
  const Eigen::Vector4cd eig = lm.A.eigenvalues();
  int positive = 0;
  for (int i = 0; i < 4; ++i)
    if (eig(i).real() > 1e-9) ++positive;
  CHECK(positive == 1);
}

TEST_CASE("parameter validation rejects bad values") {
  CHECK_THROWS_AS(PlantParams(0.0, 0.1, 0.5, 0.25, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(PlantParams(1.0, -0.1, 0.5, 0.25, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(PlantParams(1.0, 0.1, 0.5, 0.6, 1e-3), std::invalid_argument);  // lc > l
  CHECK_THROWS_AS(PlantParams(1.0, 0.1, 0.5, 0.25, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(PlantParams(1.0, 0.1, 0.5, 0.25, 1e-3, -9.81), std::invalid_argument);
}

TEST_CASE("benchmark inertia is rod-consistent within 0.1%") {
  const PlantParams p = PlantParams::benchmark();
  const double rod = p.m * p.l * p.l / 12.0;
  CHECK(std::abs(rod - p.I) / p.I < 1e-3);
}

TEST_CASE("wrap_angle reduces to (-pi, pi]") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(3.0 * M_PI) == Catch::Approx(M_PI));
  CHECK(wrap_angle(-3.0 * M_PI) == Catch::Approx(M_PI));
  CHECK(wrap_angle(2.0 * M_PI + 0.25) == Catch::Approx(0.25));
  CHECK(wrap_angle(-0.25) == Catch::Approx(-0.25));
}
