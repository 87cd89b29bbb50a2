#ifndef WALKGUIDE_VEHICLE_H_
#define WALKGUIDE_VEHICLE_H_

#include <string_view>

#include "walkguide/angle.h"

namespace walkguide {

// Physical parameters of the walker (SI units). The defaults are plausible
// rollator values, not measured data.
struct VehicleParams {
  double mass = 20.0;            // m, kg
  double yaw_inertia = 1.0;      // J, kg m^2
  double wheel_inertia = 0.01;   // J_w, kg m^2
  double axle_length = 0.6;      // d, m
  double wheel_radius = 0.1;     // r, m
  double rolling_friction = 0.05;  // b_w, N m s
  double brake_friction = 50.0;    // b_max, N m s

  // Minimum turning radius under single-wheel braking.
  double turning_radius() const { return axle_length / 2.0; }

  // Throws Error(kInvalidArgument) unless every field is finite and > 0.
  void validate() const;
};

struct VehicleState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double v = 0.0;
  double omega = 0.0;
  double alpha_dot_r = 0.0;
  double alpha_dot_l = 0.0;

  Pose2 pose() const { return {x, y, theta}; }
};

// Returns `state` with wheel rates recomputed from (v, omega) by rolling.
VehicleState with_wheel_rates(VehicleState state, const VehicleParams& params);

// The four admissible brake actions.
enum class Maneuver { kGoStraight, kTurnRight, kTurnLeft, kStop };

const char* maneuver_name(Maneuver m);
bool parse_maneuver(std::string_view name, Maneuver* out);

// Per-wheel brake setting: viscous coefficient b^b and holding fraction c^b.
struct WheelBrake {
  double viscous = 0.0;
  double holding = 0.0;

  bool engaged() const { return holding > 0.0; }
};

// A quantised brake command. Only the four tuples produced from a Maneuver
// are representable.
class BrakeCommand {
 public:
  constexpr BrakeCommand() = default;
  constexpr explicit BrakeCommand(Maneuver m) : maneuver_(m) {}

  constexpr Maneuver maneuver() const { return maneuver_; }
  WheelBrake right(double b_max) const;
  WheelBrake left(double b_max) const;

  friend constexpr bool operator==(BrakeCommand, BrakeCommand) = default;

 private:
  Maneuver maneuver_ = Maneuver::kGoStraight;
};

// Torques transmitted by the user through the handles to each wheel hub.
struct UserInput {
  double tau_right = 0.0;
  double tau_left = 0.0;
};

struct Wrench {
  double force = 0.0;   // F along the heading, N
  double torque = 0.0;  // N about the vertical axis, N m
};

Wrench torques_to_wrench(double tau_r, double tau_l, const VehicleParams& params);
UserInput wrench_to_torques(const Wrench& wrench, const VehicleParams& params);

// Net wheel torque from the user torque, brake setting and rolling friction.
// At alpha_dot == 0 the brake holds the fraction c^b of the user torque.
double effective_wheel_torque(double tau_h, const WheelBrake& brake,
                              double alpha_dot, const VehicleParams& params);

// Kinematic step: the user imposes forward speed `v_user`; braking a single
// wheel pins the vehicle to a circle of radius d/2. Pose is advanced in closed
// form over `dt`.
VehicleState step_kinematic(const VehicleState& state, BrakeCommand command,
                            double v_user, double dt,
                            const VehicleParams& params);

enum class BrakeTransient {
  // Braked wheels stop at command application and are then held.
  kInstantaneous,
  // Braked wheels decelerate under the viscous brake torque -b_max * alpha_dot.
  // A braked wheel that reaches rest is held.
  kViscous,
};

// Dynamic step: integrates the unicycle dynamics driven by wheel torques with
// one fixed RK4 step. Wheels that are fully braked and at rest stay locked
// (rolling constraint enforced); forward speed is clamped to v >= 0.
VehicleState step_dynamic(const VehicleState& state, BrakeCommand command,
                          const UserInput& user, double dt,
                          const VehicleParams& params,
                          BrakeTransient transient = BrakeTransient::kInstantaneous);

double kinetic_energy(const VehicleState& state, const VehicleParams& params);

}  // namespace walkguide

#endif  // WALKGUIDE_VEHICLE_H_
