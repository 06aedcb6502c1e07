#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cartpole {

// State vector of the cart-pole: [x, v, theta, omega].
// x: cart position (m), positive rightward.
// theta: pendulum angle (rad), 0 = upright, pi = hanging down. Stored
// unwrapped so large excursions stay visible in traces.
struct State {
  double x = 0.0;
  double v = 0.0;
  double theta = 0.0;
  double omega = 0.0;
};

// Reduce an unwrapped angle to (-pi, pi] for reporting.
inline double wrap_angle(double theta) {
  double a = std::remainder(theta, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

// Physical parameters of the cart-pole.
//   M  cart mass (kg)
//   m  pendulum mass (kg)
//   l  full rod length, pivot to tip (m)
//   lc distance pivot to rod centre of mass (m)
//   I  rod inertia about its centre of mass (kg m^2)
//   g  gravity (m/s^2)
//   b  cart viscous friction (N s/m)
struct PlantParams {
  double M;
  double m;
  double l;
  double lc;
  double I;
  double g = 9.81;
  double b = 0.0;

  PlantParams(double cart_mass, double pendulum_mass, double length,
              double com_distance, double inertia, double gravity = 9.81,
              double friction = 0.0)
      : M(cart_mass), m(pendulum_mass), l(length), lc(com_distance),
        I(inertia), g(gravity), b(friction) {
    validate();
  }

  // Uniform rod pivoted at one end: lc = l/2, I = m l^2 / 12.
  static PlantParams uniform_rod(double cart_mass, double pendulum_mass,
                                 double length, double gravity = 9.81,
                                 double friction = 0.0) {
    return PlantParams(cart_mass, pendulum_mass, length, length / 2.0,
                       pendulum_mass * length * length / 12.0, gravity,
                       friction);
  }

  // Benchmark rig: M = 0.5672 kg, m = 0.0374 kg, l = 0.38 m, with the
  // rig's measured rod inertia (within 0.03% of the uniform-rod value).
  static PlantParams benchmark(double friction = 0.0) {
    return PlantParams(0.5672, 0.0374, 0.38, 0.19, 4.5017e-4, 9.81, friction);
  }

  // Heavy-rod variant used by the disturbance-rejection scenarios:
  // m = 0.6 kg, l = 0.5 m, rod-recomputed lc and I.
  static PlantParams heavy(double friction = 0.0) {
    return uniform_rod(0.5672, 0.6, 0.5, 9.81, friction);
  }

  void validate() const {
    if (!(M > 0.0) || !std::isfinite(M)) throw std::invalid_argument("cart mass must be > 0");
    if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("pendulum mass must be > 0");
    if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument("pendulum length must be > 0");
    if (!(lc > 0.0) || !(lc <= l)) throw std::invalid_argument("com distance must satisfy 0 < lc <= l");
    if (!(I > 0.0) || !std::isfinite(I)) throw std::invalid_argument("pendulum inertia must be > 0");
    if (!(g > 0.0) || !std::isfinite(g)) throw std::invalid_argument("gravity must be > 0");
    if (!(b >= 0.0) || !std::isfinite(b)) throw std::invalid_argument("friction must be >= 0");
  }
};

struct Accel {
  double xdd;      // cart acceleration (m/s^2)
  double thetadd;  // angular acceleration (rad/s^2)
};

// Solve the 2x2 coupled rigid-body system
//   (M+m) xdd + m lc cos(th) thdd - m lc sin(th) w^2 + b v = F_cart
//   (I + m lc^2) thdd + m lc cos(th) xdd - m g lc sin(th)  = tau_pend
// F_cart is the total horizontal force on the cart; pend_force is an
// optional horizontal force on the rod at distance pend_arm from the
// pivot (it contributes to both the translation and the pivot moment).
// The mass matrix determinant is provably positive for valid params.
inline Accel accelerations(const PlantParams& p, const State& s,
                           double force_total, double pend_force = 0.0,
                           double pend_arm = 0.0) {
  const double c = std::cos(s.theta);
  const double sn = std::sin(s.theta);
  const double a11 = p.M + p.m;
  const double a12 = p.m * p.lc * c;
  const double a22 = p.I + p.m * p.lc * p.lc;
  const double r1 =
      force_total + pend_force - p.b * s.v + p.m * p.lc * sn * s.omega * s.omega;
  const double r2 = p.m * p.g * p.lc * sn + pend_force * pend_arm * c;
  const double det = a11 * a22 - a12 * a12;
  return {(a22 * r1 - a12 * r2) / det, (a11 * r2 - a12 * r1) / det};
}

struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
struct Deriv {
  double dx, dv, dth, dom;
};
inline Deriv deriv(const PlantParams& p, const State& s, double f, double fp,
                   double arm) {
  const Accel a = accelerations(p, s, f, fp, arm);
  return {s.v, a.xdd, s.omega, a.thetadd};
}
}  // namespace detail

// One classical RK4 step with all inputs held constant over the step
// (zero-order hold). pend_force acts at pend_arm from the pivot.
inline State rk4_step(const PlantParams& p, const State& s, double force,
                      double dt, double pend_force = 0.0,
                      double pend_arm = 0.0) {
  using detail::Deriv;
  auto shift = [&](const Deriv& d, double h) {
    return State{s.x + h * d.dx, s.v + h * d.dv, s.theta + h * d.dth,
                 s.omega + h * d.dom};
  };
  const Deriv k1 = detail::deriv(p, s, force, pend_force, pend_arm);
  const Deriv k2 = detail::deriv(p, shift(k1, dt / 2.0), force, pend_force, pend_arm);
  const Deriv k3 = detail::deriv(p, shift(k2, dt / 2.0), force, pend_force, pend_arm);
  const Deriv k4 = detail::deriv(p, shift(k3, dt), force, pend_force, pend_arm);
  State out;
  out.x = s.x + dt / 6.0 * (k1.dx + 2.0 * (k2.dx + k3.dx) + k4.dx);
  out.v = s.v + dt / 6.0 * (k1.dv + 2.0 * (k2.dv + k3.dv) + k4.dv);
  out.theta = s.theta + dt / 6.0 * (k1.dth + 2.0 * (k2.dth + k3.dth) + k4.dth);
  out.omega = s.omega + dt / 6.0 * (k1.dom + 2.0 * (k2.dom + k3.dom) + k4.dom);
  return out;
}

// ODE step with the cart force/disturbance contract: force and
// disturbance are both horizontal forces on the cart, so
// step(p,s,F,d,dt) == step(p,s,F+d,0,dt) exactly.
inline State step(const PlantParams& p, const State& s, double force,
                  double disturbance, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  State out = rk4_step(p, s, force + disturbance, dt);
  if (!std::isfinite(out.x) || !std::isfinite(out.v) ||
      !std::isfinite(out.theta) || !std::isfinite(out.omega)) {
    throw IntegrationError("non-finite state after step from x=" +
                           std::to_string(s.x) + " theta=" +
                           std::to_string(s.theta));
  }
  return out;
}

// Total mechanical energy T + V with the potential zero level at pivot
// height for the rod centre of mass.
inline double energy(const PlantParams& p, const State& s) {
  const double T = 0.5 * (p.M + p.m) * s.v * s.v +
                   p.m * p.lc * s.v * s.omega * std::cos(s.theta) +
                   0.5 * (p.I + p.m * p.lc * p.lc) * s.omega * s.omega;
  const double V = p.m * p.g * p.lc * std::cos(s.theta);
  return T + V;
}

// Continuous-time linear model xdot = A x + B F about the upright
// equilibrium, state order [x, v, theta, omega].
struct LinearModel {
  Eigen::Matrix4d A;
  Eigen::Vector4d B;
};

inline LinearModel linearize(const PlantParams& p) {
  const double mlc = p.m * p.lc;
  const double J = p.I + p.m * p.lc * p.lc;
  const double D = (p.M + p.m) * J - mlc * mlc;
  LinearModel lm;
  lm.A.setZero();
  lm.B.setZero();
  lm.A(0, 1) = 1.0;
  lm.A(2, 3) = 1.0;
  lm.A(1, 1) = -J * p.b / D;
  lm.A(1, 2) = -mlc * mlc * p.g / D;
  lm.A(3, 1) = mlc * p.b / D;
  lm.A(3, 2) = (p.M + p.m) * p.m * p.g * p.lc / D;
  lm.B(1) = J / D;
  lm.B(3) = -mlc / D;
  return lm;
}

}  // namespace cartpole
