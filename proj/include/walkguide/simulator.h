#ifndef WALKGUIDE_SIMULATOR_H_
#define WALKGUIDE_SIMULATOR_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "walkguide/controller.h"
#include "walkguide/path.h"
#include "walkguide/vehicle.h"

namespace walkguide {

enum class FidelityMode { kKinematic, kDynamic };

const char* fidelity_mode_name(FidelityMode mode);

// Initial condition given relative to the path instead of as a world pose.
struct FrenetInitial {
  double s = 0.0;
  double l_norm = 0.0;
  double theta_tilde = 0.0;
};

using InitialCondition = std::variant<Pose2, FrenetInitial>;

struct UserModel {
  double v_user = 1.0;      // kinematic mode, m/s
  double tau_right = 0.5;   // dynamic mode, N m
  double tau_left = 0.5;
  double noise = 0.0;       // half-width of the uniform perturbation
};

struct Scenario {
  Path path;
  InitialCondition initial = Pose2{};
  VehicleParams vehicle;
  ControllerConfig controller;
  UserModel user;
  double dt_control = 0.01;
  double dt_physics = 0.001;
  double t_max = 60.0;
  FidelityMode mode = FidelityMode::kKinematic;
  BrakeTransient transient = BrakeTransient::kInstantaneous;
  std::uint64_t seed = 0;
};

// Checks the invariants `run` relies on. Throws Error(kScenarioInvalid) on a
// hard failure and returns warnings for soft ones (path curvature beyond the
// vehicle's reach).
std::vector<std::string> validate_scenario(const Scenario& scenario);

// World pose for the scenario's initial condition.
Pose2 initial_pose(const Scenario& scenario);

struct TraceRow {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double v = 0.0;
  double omega = 0.0;
  double s = 0.0;
  double l = 0.0;
  double theta_tilde = 0.0;
  Maneuver maneuver = Maneuver::kGoStraight;
  HybridState hybrid_state = HybridState::kStraight;
  Phase phase = Phase::kApproach;
  double V = 0.0;
};

enum class Termination { kTimeLimit, kPathEnd, kStopped };

const char* termination_name(Termination t);

// Everything about the run that post-processing needs besides the rows.
struct TraceInfo {
  double turning_radius = 0.3;
  double dt_control = 0.01;
  double v_nominal = 1.0;
  ControllerConfig controller;
  Termination termination = Termination::kTimeLimit;
  std::string stop_reason;
  std::vector<std::string> warnings;
};

struct Trace {
  std::vector<TraceRow> rows;
  TraceInfo info;
};

// Closed-loop run: project (hinted after the first step), controller
// transition, command applied over dt_control, log. Stops at t_max, at the
// path end, or when projection fails (a Stop row is logged; a failure on
// the initial pose is thrown instead). Deterministic for a given scenario
// and seed.
Trace run(const Scenario& scenario);

// CSV with header t,x,y,theta,v,omega,s,l,theta_tilde,maneuver,
// hybrid_state,phase,V and floats at 9 significant digits.
void write_trace_csv(const Trace& trace, std::ostream& os);
std::string trace_csv(const Trace& trace);

}  // namespace walkguide

#endif  // WALKGUIDE_SIMULATOR_H_
