#include "walkguide/vehicle.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "walkguide/errors.h"

namespace walkguide {

namespace {

void require_positive_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::kNonPositiveDt,
                "time step must be > 0, got " + std::to_string(dt));
  }
}

// Closed-form pose update for constant (v, omega) over dt.
void advance_pose(VehicleState& s, double v, double omega, double dt) {
  if (omega == 0.0) {
    s.x += v * dt * std::cos(s.theta);
    s.y += v * dt * std::sin(s.theta);
    return;
  }
  const double radius = v / omega;
  const double th1 = s.theta + omega * dt;
  s.x += radius * (std::sin(th1) - std::sin(s.theta));
  s.y -= radius * (std::cos(th1) - std::cos(s.theta));
  s.theta = th1;
}

using Vec5 = std::array<double, 5>;  // x, y, theta, v, omega

enum class Lock { kNone, kRight, kLeft, kBoth };

Lock lock_for(bool right, bool left) {
  if (right && left) return Lock::kBoth;
  if (right) return Lock::kRight;
  if (left) return Lock::kLeft;
  return Lock::kNone;
}

// Time derivative of (x, y, theta, v, omega) with the given wheels locked.
Vec5 derivative(const Vec5& q, Lock lock, BrakeCommand cmd,
                const UserInput& user, const VehicleParams& p) {
  const double v = q[3];
  const double w = q[4];
  const double R = p.turning_radius();
  const double r = p.wheel_radius;
  Vec5 dq{v * std::cos(q[2]), v * std::sin(q[2]), w, 0.0, 0.0};

  switch (lock) {
    case Lock::kBoth:
      break;
    case Lock::kRight:
    case Lock::kLeft: {
      // One wheel pinned: a single degree of freedom along the circle of
      // radius R, with effective mass m + J / R^2 driven by the free wheel.
      const double m_eff = p.mass + p.yaw_inertia / (R * R);
      const bool right_locked = lock == Lock::kRight;
      const double free_rate = 2.0 * v / r;
      const double tau_h = right_locked ? user.tau_left : user.tau_right;
      const WheelBrake free_brake =
          right_locked ? cmd.left(p.brake_friction) : cmd.right(p.brake_friction);
      const double tau = effective_wheel_torque(tau_h, free_brake, free_rate, p);
      const double v_dot = 2.0 * tau / (r * m_eff);
      dq[3] = v_dot;
      dq[4] = right_locked ? -v_dot / R : v_dot / R;
      break;
    }
    case Lock::kNone: {
      const double rate_r = (v + w * R) / r;
      const double rate_l = (v - w * R) / r;
      const double tau_r = effective_wheel_torque(
          user.tau_right, cmd.right(p.brake_friction), rate_r, p);
      const double tau_l = effective_wheel_torque(
          user.tau_left, cmd.left(p.brake_friction), rate_l, p);
      const Wrench wr = torques_to_wrench(tau_r, tau_l, p);
      dq[3] = wr.force / p.mass;
      dq[4] = wr.torque / p.yaw_inertia;
      break;
    }
  }
  return dq;
}

Vec5 axpy(const Vec5& a, double h, const Vec5& b) {
  Vec5 out;
  for (std::size_t i = 0; i < 5; ++i) out[i] = a[i] + h * b[i];
  return out;
}

// Energy-metric projection of (v, omega) onto the constraint that the given
// wheel does not rotate. Never increases kinetic energy.
void project_lock(double& v, double& w, bool right_wheel,
                  const VehicleParams& p) {
  const double R = p.turning_radius();
  const double arm = right_wheel ? R : -R;  // wheel rate ~ v + arm * omega
  const double residual = v + arm * w;
  const double lambda =
      -residual / (1.0 / p.mass + arm * arm / p.yaw_inertia);
  v += lambda / p.mass;
  w += lambda * arm / p.yaw_inertia;
}

}  // namespace

void VehicleParams::validate() const {
  const std::array<std::pair<const char*, double>, 7> fields{{
      {"mass", mass},
      {"yaw_inertia", yaw_inertia},
      {"wheel_inertia", wheel_inertia},
      {"axle_length", axle_length},
      {"wheel_radius", wheel_radius},
      {"rolling_friction", rolling_friction},
      {"brake_friction", brake_friction},
  }};
  for (const auto& [name, value] : fields) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("vehicle parameter ") + name + " must be > 0");
    }
  }
}

VehicleState with_wheel_rates(VehicleState s, const VehicleParams& p) {
  const double R = p.turning_radius();
  s.alpha_dot_r = (s.v + s.omega * R) / p.wheel_radius;
  s.alpha_dot_l = (s.v - s.omega * R) / p.wheel_radius;
  return s;
}

const char* maneuver_name(Maneuver m) {
  switch (m) {
    case Maneuver::kGoStraight:
      return "GoStraight";
    case Maneuver::kTurnRight:
      return "TurnRight";
    case Maneuver::kTurnLeft:
      return "TurnLeft";
    case Maneuver::kStop:
      return "Stop";
  }
  return "Unknown";
}

bool parse_maneuver(std::string_view name, Maneuver* out) {
  for (Maneuver m : {Maneuver::kGoStraight, Maneuver::kTurnRight,
                     Maneuver::kTurnLeft, Maneuver::kStop}) {
    if (name == maneuver_name(m)) {
      *out = m;
      return true;
    }
  }
  return false;
}

WheelBrake BrakeCommand::right(double b_max) const {
  if (maneuver_ == Maneuver::kTurnRight || maneuver_ == Maneuver::kStop) {
    return {b_max, 1.0};
  }
  return {};
}

WheelBrake BrakeCommand::left(double b_max) const {
  if (maneuver_ == Maneuver::kTurnLeft || maneuver_ == Maneuver::kStop) {
    return {b_max, 1.0};
  }
  return {};
}

Wrench torques_to_wrench(double tau_r, double tau_l, const VehicleParams& p) {
  return {(tau_r + tau_l) / p.wheel_radius,
          (tau_r - tau_l) * p.axle_length / (2.0 * p.wheel_radius)};
}

UserInput wrench_to_torques(const Wrench& w, const VehicleParams& p) {
  const double sum = w.force * p.wheel_radius;
  const double diff = 2.0 * w.torque * p.wheel_radius / p.axle_length;
  return {0.5 * (sum + diff), 0.5 * (sum - diff)};
}

double effective_wheel_torque(double tau_h, const WheelBrake& brake,
                              double alpha_dot, const VehicleParams& p) {
  if (alpha_dot == 0.0) return (1.0 - brake.holding) * tau_h;
  return tau_h - brake.viscous * alpha_dot - p.rolling_friction * alpha_dot;
}

VehicleState step_kinematic(const VehicleState& state, BrakeCommand command,
                            double v_user, double dt, const VehicleParams& p) {
  require_positive_dt(dt);
  if (!(v_user >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "user speed must be >= 0");
  }
  VehicleState next = state;
  const double R = p.turning_radius();
  switch (command.maneuver()) {
    case Maneuver::kGoStraight:
      next.v = v_user;
      next.omega = 0.0;
      break;
    case Maneuver::kTurnRight:
      next.v = v_user;
      next.omega = -v_user / R;
      break;
    case Maneuver::kTurnLeft:
      next.v = v_user;
      next.omega = v_user / R;
      break;
    case Maneuver::kStop:
      next.v = 0.0;
      next.omega = 0.0;
      break;
  }
  advance_pose(next, next.v, next.omega, dt);
  return with_wheel_rates(next, p);
}

VehicleState step_dynamic(const VehicleState& state, BrakeCommand command,
                          const UserInput& user, double dt,
                          const VehicleParams& p, BrakeTransient transient) {
  require_positive_dt(dt);
  const bool brake_r = command.right(p.brake_friction).engaged();
  const bool brake_l = command.left(p.brake_friction).engaged();

  double v = state.v;
  double w = state.omega;
  const double R = p.turning_radius();
  const double r = p.wheel_radius;
  // A braked wheel is locked when it is already at rest or when the
  // transient is instantaneous.
  bool lock_r = brake_r && (transient == BrakeTransient::kInstantaneous ||
                            state.alpha_dot_r == 0.0);
  bool lock_l = brake_l && (transient == BrakeTransient::kInstantaneous ||
                            state.alpha_dot_l == 0.0);
  if (lock_r && lock_l) {
    v = 0.0;
    w = 0.0;
  } else if (lock_r) {
    project_lock(v, w, true, p);
  } else if (lock_l) {
    project_lock(v, w, false, p);
  }
  if (v < 0.0) {
    v = 0.0;
    w = 0.0;
  }

  const Lock lock = lock_for(lock_r, lock_l);
  const Vec5 q0{state.x, state.y, state.theta, v, w};
  const Vec5 k1 = derivative(q0, lock, command, user, p);
  const Vec5 k2 = derivative(axpy(q0, 0.5 * dt, k1), lock, command, user, p);
  const Vec5 k3 = derivative(axpy(q0, 0.5 * dt, k2), lock, command, user, p);
  const Vec5 k4 = derivative(axpy(q0, dt, k3), lock, command, user, p);
  Vec5 q1;
  for (std::size_t i = 0; i < 5; ++i) {
    q1[i] = q0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }

  VehicleState next;
  next.x = q1[0];
  next.y = q1[1];
  next.theta = q1[2];
  next.v = q1[3];
  next.omega = q1[4];
  if (lock == Lock::kBoth) {
    next.x = state.x;
    next.y = state.y;
    next.theta = state.theta;
    next.v = 0.0;
    next.omega = 0.0;
  }

  // A braked wheel whose rate crossed zero during the step is held at rest.
  const double rate_r0 = (v + w * R) / r;
  const double rate_l0 = (v - w * R) / r;
  const double rate_r1 = (next.v + next.omega * R) / r;
  const double rate_l1 = (next.v - next.omega * R) / r;
  const bool stop_r = brake_r && !lock_r && (rate_r0 * rate_r1 <= 0.0);
  const bool stop_l = brake_l && !lock_l && (rate_l0 * rate_l1 <= 0.0);
  if (stop_r && stop_l) {
    next.v = 0.0;
    next.omega = 0.0;
  } else if (stop_r) {
    project_lock(next.v, next.omega, true, p);
  } else if (stop_l) {
    project_lock(next.v, next.omega, false, p);
  }

  if (next.v < 0.0) {
    next.v = 0.0;
    next.omega = 0.0;
  }
  next = with_wheel_rates(next, p);
  // Exactly zero rather than round-off so the lock persists next step.
  if ((lock_r || stop_r) && std::abs(next.alpha_dot_r) < 1e-12) next.alpha_dot_r = 0.0;
  if ((lock_l || stop_l) && std::abs(next.alpha_dot_l) < 1e-12) next.alpha_dot_l = 0.0;
  return next;
}

double kinetic_energy(const VehicleState& s, const VehicleParams& p) {
  return 0.5 * p.mass * s.v * s.v + 0.5 * p.yaw_inertia * s.omega * s.omega;
}

}  // namespace walkguide
