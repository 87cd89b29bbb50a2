#include "walkguide/simulator.h"

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "walkguide/analysis.h"
#include "walkguide/errors.h"

namespace walkguide {

namespace {

constexpr double kPathEndTol = 1e-9;

// Uniform sample in [-1, 1] built from raw engine bits so the stream does
// not depend on the standard library's distribution implementation.
class Noise {
 public:
  Noise(std::uint64_t seed, double amplitude)
      : engine_(seed), amplitude_(amplitude) {}

  double sample() {
    if (amplitude_ == 0.0) return 0.0;
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return amplitude_ * (2.0 * u - 1.0);
  }

 private:
  std::mt19937_64 engine_;
  double amplitude_;
};

void append_number(std::string& out, double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  out += buf;
}

}  // namespace

const char* fidelity_mode_name(FidelityMode mode) {
  return mode == FidelityMode::kKinematic ? "kinematic" : "dynamic";
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::kTimeLimit:
      return "time_limit";
    case Termination::kPathEnd:
      return "path_end";
    case Termination::kStopped:
      return "stopped";
  }
  return "unknown";
}

std::vector<std::string> validate_scenario(const Scenario& sc) {
  auto invalid = [](const std::string& why) {
    return Error(ErrorCode::kScenarioInvalid, why);
  };
  try {
    sc.vehicle.validate();
    sc.controller.validate();
  } catch (const Error& e) {
    throw invalid(e.what());
  }
  if (sc.path.segments().empty()) throw invalid("scenario has no path");
  if (!(sc.t_max > 0.0)) throw invalid("t_max must be > 0");
  if (!(sc.dt_control > 0.0)) throw invalid("dt_control must be > 0");
  if (!(sc.dt_physics > 0.0)) throw invalid("dt_physics must be > 0");
  if (sc.dt_physics > sc.dt_control * (1.0 + 1e-12)) {
    throw invalid("dt_physics must not exceed dt_control");
  }
  const double ratio = sc.dt_control / sc.dt_physics;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    throw invalid("dt_control must be an integer multiple of dt_physics");
  }
  if (!(sc.user.v_user >= 0.0)) throw invalid("v_user must be >= 0");
  if (!(sc.user.noise >= 0.0)) throw invalid("noise amplitude must be >= 0");
  if (const auto* fi = std::get_if<FrenetInitial>(&sc.initial)) {
    if (!(fi->s >= 0.0 && fi->s <= sc.path.total_length())) {
      throw invalid("initial s outside the path");
    }
  }

  std::vector<std::string> warnings;
  const double R = sc.vehicle.turning_radius();
  const auto& segs = sc.path.segments();
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const double c = std::max(std::abs(segs[i].curvature_start),
                              std::abs(segs[i].curvature_end));
    if (c * R > 1.0) {
      warnings.push_back("segment " + std::to_string(i) + " (" +
                         segment_kind_name(segs[i].kind) + ") curvature " +
                         std::to_string(c) + " exceeds 1/R = " +
                         std::to_string(1.0 / R));
    }
  }
  return warnings;
}

Pose2 initial_pose(const Scenario& sc) {
  if (const auto* p = std::get_if<Pose2>(&sc.initial)) return *p;
  const auto& fi = std::get<FrenetInitial>(sc.initial);
  const Pose2 base = sc.path.pose_at(fi.s);
  const double l = fi.l_norm * sc.vehicle.turning_radius();
  return {base.x - l * std::sin(base.theta), base.y + l * std::cos(base.theta),
          wrap_angle(base.theta + fi.theta_tilde)};
}

Trace run(const Scenario& sc) {
  Trace trace;
  trace.info.warnings = validate_scenario(sc);
  const double R = sc.vehicle.turning_radius();
  trace.info.turning_radius = R;
  trace.info.dt_control = sc.dt_control;
  trace.info.v_nominal = sc.user.v_user;
  trace.info.controller = sc.controller;

  const Pose2 p0 = initial_pose(sc);
  VehicleState state;
  state.x = p0.x;
  state.y = p0.y;
  state.theta = p0.theta;
  if (sc.mode == FidelityMode::kKinematic) state.v = sc.user.v_user;
  state = with_wheel_rates(state, sc.vehicle);

  Noise noise(sc.seed, sc.user.noise);
  const auto substeps =
      static_cast<int>(std::llround(sc.dt_control / sc.dt_physics));
  const auto max_steps =
      static_cast<long>(std::floor(sc.t_max / sc.dt_control + 1e-9));

  std::optional<double> hint;
  ControllerState ctrl;
  bool first = true;
  for (long k = 0;; ++k) {
    const double t = static_cast<double>(k) * sc.dt_control;
    TraceRow row;
    row.t = t;
    row.x = state.x;
    row.y = state.y;
    row.theta = wrap_angle(state.theta);
    row.v = state.v;
    row.omega = state.omega;

    auto stop_here = [&](Termination why, const std::string& reason) {
      row.maneuver = Maneuver::kStop;
      row.hybrid_state = HybridState::kStopped;
      row.phase = ctrl.phase;
      trace.rows.push_back(row);
      trace.info.termination = why;
      trace.info.stop_reason = reason;
    };

    FrenetState fs;
    try {
      fs = sc.path.frenet_project(state.pose(), hint, R);
    } catch (const Error& e) {
      // Nothing to stop if the vehicle cannot even be placed on the path.
      if (trace.rows.empty()) throw;
      row.V = trace.rows.back().V;
      stop_here(Termination::kStopped, e.what());
      break;
    }
    row.s = fs.s;
    row.l = fs.l;
    row.theta_tilde = fs.theta_tilde;
    row.V = lyapunov(fs.l / R, fs.theta_tilde);
    if (first) {
      ctrl = initial_controller_state(fs.l / R, sc.controller);
      first = false;
    }
    if (fs.s >= sc.path.total_length() - kPathEndTol) {
      stop_here(Termination::kPathEnd, "reached end of path");
      break;
    }

    ManeuverDecision decision;
    try {
      decision = controller_step(fs, ctrl, sc.controller, R);
    } catch (const Error& e) {
      stop_here(Termination::kStopped, e.what());
      break;
    }
    ctrl = decision.state;
    row.maneuver = decision.command.maneuver();
    row.hybrid_state = ctrl.hybrid_state;
    row.phase = ctrl.phase;
    trace.rows.push_back(row);
    if (k >= max_steps) {
      trace.info.termination = Termination::kTimeLimit;
      break;
    }

    if (sc.mode == FidelityMode::kKinematic) {
      const double v = std::max(0.0, sc.user.v_user + noise.sample());
      state = step_kinematic(state, decision.command, v, sc.dt_control,
                             sc.vehicle);
    } else {
      const double n = noise.sample();
      const UserInput user{sc.user.tau_right + n, sc.user.tau_left + n};
      for (int i = 0; i < substeps; ++i) {
        state = step_dynamic(state, decision.command, user, sc.dt_physics,
                             sc.vehicle, sc.transient);
      }
    }
    hint = fs.s;
  }
  return trace;
}

void write_trace_csv(const Trace& trace, std::ostream& os) {
  os << trace_csv(trace);
}

std::string trace_csv(const Trace& trace) {
  std::string out = "t,x,y,theta,v,omega,s,l,theta_tilde,maneuver,hybrid_state,phase,V\n";
  out.reserve(out.size() + trace.rows.size() * 160);
  for (const TraceRow& r : trace.rows) {
    for (double x : {r.t, r.x, r.y, r.theta, r.v, r.omega, r.s, r.l,
                     r.theta_tilde}) {
      append_number(out, x);
      out += ',';
    }
    out += maneuver_name(r.maneuver);
    out += ',';
    out += hybrid_state_name(r.hybrid_state);
    out += ',';
    out += phase_name(r.phase);
    out += ',';
    append_number(out, r.V);
    out += '\n';
  }
  return out;
}

}  // namespace walkguide
