#pragma once

#include <Eigen/Core>

#include "kdplan/types.hpp"

namespace kdplan {

inline constexpr int kStateDim = 12;
inline constexpr int kControlDim = 4;

// x = [p v r w]: position, velocity (world frame), rotation vector
// (axis * angle, body-to-world), body angular rate.
using State = Eigen::Matrix<double, kStateDim, 1>;
// Rotor thrusts u1..u4 (N).
using Control = Eigen::Matrix<double, kControlDim, 1>;
using StateMatrix = Eigen::Matrix<double, kStateDim, kStateDim>;
using InputMatrix = Eigen::Matrix<double, kStateDim, kControlDim>;

inline auto position(State& x) { return x.segment<3>(0); }
inline auto velocity(State& x) { return x.segment<3>(3); }
inline auto attitude(State& x) { return x.segment<3>(6); }
inline auto body_rate(State& x) { return x.segment<3>(9); }
inline Vec3 position(const State& x) { return x.segment<3>(0); }
inline Vec3 velocity(const State& x) { return x.segment<3>(3); }
inline Vec3 attitude(const State& x) { return x.segment<3>(6); }
inline Vec3 body_rate(const State& x) { return x.segment<3>(9); }

State make_state(const Vec3& p, const Vec3& v = Vec3::Zero(), const Vec3& r = Vec3::Zero(),
                 const Vec3& w = Vec3::Zero());

struct VehicleParams {
  double mass = 0.5;                                    // kg
  Vec3 inertia_diag{3.2e-3, 3.2e-3, 5.5e-3};            // kg m^2 (principal axes)
  double arm = 0.17;                                    // rotor distance from center (m)
  double k_v = 0.25;                                    // linear drag
  double k_m = 0.025;                                   // rotor moment constant
  double gravity = 9.81;                                // m/s^2
  bool clamp_thrust = false;                            // clamp u_i >= 0 before use

  Mat3 inertia() const { return inertia_diag.asDiagonal(); }
  // Per-rotor thrust that balances gravity.
  double hover_thrust() const { return mass * gravity / 4.0; }
  Control hover() const { return Control::Constant(hover_thrust()); }

  void validate() const;
};

Mat3 skew(const Vec3& a);

// exp([r]) via the Rodrigues closed form.
Mat3 rotation_from_vector(const Vec3& r);

// Time derivative of the rotation vector for body rate w. Uses a
// second-order series when |r| is below kSeriesThreshold.
inline constexpr double kSeriesThreshold = 1e-4;
Vec3 rotation_vector_rate(const Vec3& r, const Vec3& w);

State f_continuous(const State& x, const Control& u, const VehicleParams& params);

// Classical RK4 with zero-order-hold input.
State rk4_step(const State& x, const Control& u, double dt, const VehicleParams& params);

struct LinearizedDynamics {
  StateMatrix A;
  InputMatrix B;
  State x_bar;
  Control u_bar;
  State x_next;  // rk4_step(x_bar, u_bar)
  double dt = 0.0;

  // First-order prediction of rk4_step(x, u).
  State predict(const State& x, const Control& u) const {
    return x_next + A * (x - x_bar) + B * (u - u_bar);
  }
};

// Jacobians of the RK4 map at (x_bar, u_bar) by central differences with
// step rel_step * max(1, |component|).
inline constexpr double kDefaultJacobianStep = 1e-5;
LinearizedDynamics linearize(const State& x_bar, const Control& u_bar, double dt,
                             const VehicleParams& params,
                             double rel_step = kDefaultJacobianStep);

}  // namespace kdplan
