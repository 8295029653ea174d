#include "kdplan/dynamics.hpp"

#include <cmath>

namespace kdplan {

State make_state(const Vec3& p, const Vec3& v, const Vec3& r, const Vec3& w) {
  State x;
  x << p, v, r, w;
  return x;
}

void VehicleParams::validate() const {
  if (!(mass > 0.0)) throw ValidationError("mass", "must be > 0");
  if (!(inertia_diag.array() > 0.0).all()) throw ValidationError("inertia", "must be positive definite");
  if (!(arm > 0.0)) throw ValidationError("arm", "must be > 0");
  if (!(gravity > 0.0)) throw ValidationError("gravity", "must be > 0");
  if (!(k_v >= 0.0)) throw ValidationError("k_v", "must be >= 0");
}

Mat3 skew(const Vec3& a) {
  Mat3 s;
  s << 0, -a.z(), a.y(),
       a.z(), 0, -a.x(),
       -a.y(), a.x(), 0;
  return s;
}

Mat3 rotation_from_vector(const Vec3& r) {
  const double theta = r.norm();
  const Mat3 k = skew(r);
  if (theta < 1e-8) return Mat3::Identity() + k + 0.5 * k * k;
  return Mat3::Identity() + (std::sin(theta) / theta) * k +
         ((1.0 - std::cos(theta)) / (theta * theta)) * k * k;
}

Vec3 rotation_vector_rate(const Vec3& r, const Vec3& w) {
  const double theta = r.norm();
  const Vec3 rw = r.cross(w);
  const Vec3 rrw = r.cross(rw);
  double coeff;
  if (theta < kSeriesThreshold) {
    coeff = 1.0 / 12.0;
  } else {
    coeff = (1.0 - theta / (2.0 * std::tan(0.5 * theta))) / (theta * theta);
  }
  return w + 0.5 * rw + coeff * rrw;
}

State f_continuous(const State& x, const Control& u_in, const VehicleParams& params) {
  Control u = u_in;
  if (params.clamp_thrust) u = u.cwiseMax(0.0);

  const Vec3 v = velocity(x);
  const Vec3 r = attitude(x);
  const Vec3 w = body_rate(x);
  const Vec3 e3 = Vec3::UnitZ();

  const double thrust = u.sum();
  const Vec3 v_dot = -params.gravity * e3 +
                     (thrust * (rotation_from_vector(r) * e3) - params.k_v * v) / params.mass;

  const Mat3 J = params.inertia();
  const Vec3 torque(params.arm * (u(1) - u(3)), params.arm * (u(2) - u(0)),
                    params.k_m * (u(0) - u(1) + u(2) - u(3)));
  const Vec3 w_dot = params.inertia_diag.cwiseInverse().cwiseProduct(torque - w.cross(J * w));

  State dx;
  dx << v, v_dot, rotation_vector_rate(r, w), w_dot;
  return dx;
}

State rk4_step(const State& x, const Control& u, double dt, const VehicleParams& params) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk4 step must have dt > 0");
  const State k1 = f_continuous(x, u, params);
  const State k2 = f_continuous(x + 0.5 * dt * k1, u, params);
  const State k3 = f_continuous(x + 0.5 * dt * k2, u, params);
  const State k4 = f_continuous(x + dt * k3, u, params);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

LinearizedDynamics linearize(const State& x_bar, const Control& u_bar, double dt,
                             const VehicleParams& params, double rel_step) {
  LinearizedDynamics lin;
  lin.x_bar = x_bar;
  lin.u_bar = u_bar;
  lin.dt = dt;
  lin.x_next = rk4_step(x_bar, u_bar, dt, params);

  for (int i = 0; i < kStateDim; ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x_bar(i)));
    State xp = x_bar, xm = x_bar;
    xp(i) += h;
    xm(i) -= h;
    lin.A.col(i) = (rk4_step(xp, u_bar, dt, params) - rk4_step(xm, u_bar, dt, params)) / (2.0 * h);
  }
  for (int i = 0; i < kControlDim; ++i) {
    const double h = rel_step * std::max(1.0, std::abs(u_bar(i)));
    Control up = u_bar, um = u_bar;
    up(i) += h;
    um(i) -= h;
    lin.B.col(i) = (rk4_step(x_bar, up, dt, params) - rk4_step(x_bar, um, dt, params)) / (2.0 * h);
  }
  return lin;
}

}  // namespace kdplan
