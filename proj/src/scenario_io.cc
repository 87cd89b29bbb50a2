#include "walkguide/scenario_io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "walkguide/errors.h"

namespace walkguide {

namespace {

#include "demo_config.inc"

[[noreturn]] void config_error(const std::string& why) {
  throw Error(ErrorCode::kConfig, why);
}

void check_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      config_error("unknown key '" + item.key() + "' in " + where);
    }
  }
}

double number(const Json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) config_error(where + " is missing '" + key + "'");
  if (!it->is_number()) config_error(where + "." + key + " must be a number");
  return it->get<double>();
}

void read_number(const Json& obj, const char* key, const std::string& where,
                 double& out) {
  if (obj.contains(key)) out = number(obj, key, where);
}

std::string text(const Json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) config_error(where + " is missing '" + key + "'");
  if (!it->is_string()) config_error(where + "." + key + " must be a string");
  return it->get<std::string>();
}

Pose2 pose_from_json(const Json& obj, const std::string& where) {
  check_keys(obj, {"x", "y", "theta"}, where);
  return {number(obj, "x", where), number(obj, "y", where),
          number(obj, "theta", where)};
}

SegmentSpec segment_from_json(const Json& obj, const std::string& where) {
  check_keys(obj,
             {"kind", "length", "curvature", "curvature_start", "curvature_end",
              "start"},
             where);
  SegmentSpec spec;
  const std::string kind = text(obj, "kind", where);
  if (kind == "line") {
    spec.kind = SegmentKind::kLine;
  } else if (kind == "arc") {
    spec.kind = SegmentKind::kArc;
  } else if (kind == "clothoid") {
    spec.kind = SegmentKind::kClothoid;
  } else {
    config_error(where + ".kind must be line, arc or clothoid");
  }
  spec.length = number(obj, "length", where);
  if (obj.contains("curvature")) {
    spec.curvature_start = spec.curvature_end = number(obj, "curvature", where);
  }
  read_number(obj, "curvature_start", where, spec.curvature_start);
  read_number(obj, "curvature_end", where, spec.curvature_end);
  if (obj.contains("start")) spec.start = pose_from_json(obj["start"], where + ".start");
  return spec;
}

VehicleParams vehicle_from_json(const Json& obj) {
  const std::string where = "vehicle";
  check_keys(obj,
             {"mass", "yaw_inertia", "wheel_inertia", "axle_length",
              "wheel_radius", "rolling_friction", "brake_friction"},
             where);
  VehicleParams p;
  read_number(obj, "mass", where, p.mass);
  read_number(obj, "yaw_inertia", where, p.yaw_inertia);
  read_number(obj, "wheel_inertia", where, p.wheel_inertia);
  read_number(obj, "axle_length", where, p.axle_length);
  read_number(obj, "wheel_radius", where, p.wheel_radius);
  read_number(obj, "rolling_friction", where, p.rolling_friction);
  read_number(obj, "brake_friction", where, p.brake_friction);
  return p;
}

ControllerConfig controller_from_json(const Json& obj) {
  const std::string where = "controller";
  check_keys(obj,
             {"delta_approach", "delta_profile", "eps_theta", "eps_b",
              "threshold_l", "re_approach_factor"},
             where);
  ControllerConfig c;
  read_number(obj, "delta_approach", where, c.delta_approach);
  if (obj.contains("delta_profile")) {
    c.delta_profile = delta_profile_from_json(obj["delta_profile"]);
  }
  read_number(obj, "eps_theta", where, c.eps_theta);
  read_number(obj, "eps_b", where, c.eps_b);
  read_number(obj, "threshold_l", where, c.threshold_l);
  read_number(obj, "re_approach_factor", where, c.re_approach_factor);
  return c;
}

UserModel user_from_json(const Json& obj) {
  const std::string where = "user";
  check_keys(obj, {"v_user", "tau_right", "tau_left", "noise"}, where);
  UserModel u;
  read_number(obj, "v_user", where, u.v_user);
  read_number(obj, "tau_right", where, u.tau_right);
  read_number(obj, "tau_left", where, u.tau_left);
  read_number(obj, "noise", where, u.noise);
  return u;
}

InitialCondition initial_from_json(const Json& obj) {
  const std::string where = "initial";
  if (!obj.is_object()) config_error("initial must be an object");
  if (obj.contains("x") || obj.contains("y") || obj.contains("theta")) {
    return pose_from_json(obj, where);
  }
  check_keys(obj, {"s", "l_norm", "theta_tilde"}, where);
  FrenetInitial fi;
  fi.s = number(obj, "s", where);
  fi.l_norm = number(obj, "l_norm", where);
  fi.theta_tilde = number(obj, "theta_tilde", where);
  return fi;
}

Json load_path_file(const Json& value, const std::filesystem::path& base_dir) {
  std::filesystem::path file(value.get<std::string>());
  if (file.is_relative() && !base_dir.empty()) file = base_dir / file;
  return load_config_file(file);
}

std::vector<double> axis_values(const Json& axis, const std::string& where) {
  std::vector<double> out;
  if (axis.is_array()) {
    for (const Json& v : axis) {
      if (!v.is_number()) config_error(where + " values must be numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }
  if (axis.is_number()) return {axis.get<double>()};
  check_keys(axis, {"from", "to", "count"}, where);
  const double from = number(axis, "from", where);
  const double to = number(axis, "to", where);
  const Json& count_json = axis.at("count");
  if (!count_json.is_number_integer() || count_json.get<long>() < 1) {
    config_error(where + ".count must be a positive integer");
  }
  const long count = count_json.get<long>();
  if (count == 1) return {from};
  for (long i = 0; i < count; ++i) {
    out.push_back(from + (to - from) * static_cast<double>(i) /
                             static_cast<double>(count - 1));
  }
  return out;
}

std::string value_text(const Json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

Json nullable(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

Json load_config_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot read config '" + file.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const Error& e) {
    throw Error(e.code(), file.string() + ": " + e.what());
  }
}

Json parse_config(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
}

std::string_view demo_config_text() { return kDemoConfig; }

void set_value(Json& config, std::string_view dotted_key, const Json& value) {
  if (dotted_key.empty()) config_error("empty override key");
  Json* node = &config;
  std::size_t pos = 0;
  while (true) {
    const std::size_t dot = dotted_key.find('.', pos);
    const std::string part(dotted_key.substr(
        pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos));
    if (part.empty()) {
      config_error("malformed override key '" + std::string(dotted_key) + "'");
    }
    std::size_t index = 0;
    const auto [end, ec] =
        std::from_chars(part.data(), part.data() + part.size(), index);
    const bool numeric = ec == std::errc() && end == part.data() + part.size();
    Json* child = nullptr;
    if (node->is_array() && numeric) {
      if (index >= node->size()) {
        config_error("override index " + part + " out of range in '" +
                     std::string(dotted_key) + "'");
      }
      child = &(*node)[index];
    } else {
      if (node->is_null()) *node = Json::object();
      if (!node->is_object()) {
        config_error("override '" + std::string(dotted_key) +
                     "' descends into a non-object");
      }
      child = &(*node)[part];
    }
    if (dot == std::string_view::npos) {
      *child = value;
      return;
    }
    node = child;
    pos = dot + 1;
  }
}

void apply_override(Json& config, std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    config_error("override must look like key=value, got '" +
                 std::string(assignment) + "'");
  }
  const std::string_view key = assignment.substr(0, eq);
  const std::string raw(assignment.substr(eq + 1));
  Json value = Json::parse(raw, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = raw;
  set_value(config, key, value);
}

DeltaProfile delta_profile_from_json(const Json& spec) {
  const std::string where = "delta_profile";
  if (!spec.is_object()) config_error(where + " must be an object");
  const std::string kind = text(spec, "kind", where);
  try {
    if (kind == "constant") {
      check_keys(spec, {"kind", "delta0"}, where);
      return DeltaProfile::constant(number(spec, "delta0", where));
    }
    if (kind == "tanh") {
      check_keys(spec, {"kind", "A", "k"}, where);
      return DeltaProfile::tanh(number(spec, "A", where),
                                number(spec, "k", where));
    }
    if (kind == "custom") {
      check_keys(spec, {"kind", "table"}, where);
      std::vector<std::pair<double, double>> knots;
      for (const Json& row : spec.at("table")) {
        if (!row.is_array() || row.size() != 2 || !row[0].is_number() ||
            !row[1].is_number()) {
          config_error(where + ".table rows must be [l, delta] pairs");
        }
        knots.emplace_back(row[0].get<double>(), row[1].get<double>());
      }
      return DeltaProfile::custom(std::move(knots));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    config_error(where + ": " + e.what());
  }
  config_error(where + ".kind must be constant, tanh or custom");
}

Path path_from_json(const Json& path_spec) {
  check_keys(path_spec, {"start", "segments"}, "path");
  const Pose2 start = path_spec.contains("start")
                          ? pose_from_json(path_spec["start"], "path.start")
                          : Pose2{};
  const auto it = path_spec.find("segments");
  if (it == path_spec.end() || !it->is_array()) {
    config_error("path.segments must be a list");
  }
  std::vector<SegmentSpec> specs;
  for (std::size_t i = 0; i < it->size(); ++i) {
    specs.push_back(
        segment_from_json((*it)[i], "path.segments." + std::to_string(i)));
  }
  return build_path(start, specs);
}

Scenario scenario_from_json(const Json& config,
                            const std::filesystem::path& base_dir) {
  check_keys(config,
             {"path", "initial", "vehicle", "controller", "user", "dt_control",
              "dt_physics", "t_max", "mode", "brake_transient", "rng_seed",
              "sweep"},
             "config");
  Scenario sc;
  const auto path_it = config.find("path");
  if (path_it == config.end()) config_error("config is missing 'path'");
  sc.path = path_it->is_string() ? path_from_json(load_path_file(*path_it, base_dir))
                                 : path_from_json(*path_it);
  if (!config.contains("initial")) config_error("config is missing 'initial'");
  sc.initial = initial_from_json(config["initial"]);
  if (config.contains("vehicle")) sc.vehicle = vehicle_from_json(config["vehicle"]);
  if (config.contains("controller")) {
    sc.controller = controller_from_json(config["controller"]);
  }
  if (config.contains("user")) sc.user = user_from_json(config["user"]);
  read_number(config, "dt_control", "config", sc.dt_control);
  read_number(config, "dt_physics", "config", sc.dt_physics);
  read_number(config, "t_max", "config", sc.t_max);
  if (config.contains("mode")) {
    const std::string mode = text(config, "mode", "config");
    if (mode == "kinematic") {
      sc.mode = FidelityMode::kKinematic;
    } else if (mode == "dynamic") {
      sc.mode = FidelityMode::kDynamic;
    } else {
      config_error("mode must be kinematic or dynamic");
    }
  }
  if (config.contains("brake_transient")) {
    const std::string t = text(config, "brake_transient", "config");
    if (t == "instantaneous") {
      sc.transient = BrakeTransient::kInstantaneous;
    } else if (t == "viscous") {
      sc.transient = BrakeTransient::kViscous;
    } else {
      config_error("brake_transient must be instantaneous or viscous");
    }
  }
  if (config.contains("rng_seed")) {
    const Json& seed = config["rng_seed"];
    if (!seed.is_number_unsigned()) {
      config_error("rng_seed must be a non-negative integer");
    }
    sc.seed = seed.get<std::uint64_t>();
  }
  return sc;
}

std::vector<SweepJob> sweep_jobs(const Json& config,
                                 const std::filesystem::path& base_dir) {
  const auto it = config.find("sweep");
  if (it == config.end()) {
    throw Error(ErrorCode::kEmptyGrid, "config has no sweep block");
  }
  const Json& grid = *it;
  check_keys(grid, {"l_norm", "theta_tilde", "s", "parameters"}, "sweep");
  if (grid.contains("l_norm") != grid.contains("theta_tilde")) {
    config_error("sweep needs both l_norm and theta_tilde or neither");
  }

  Json base = config;
  base.erase("sweep");

  std::vector<std::pair<std::string, std::vector<Json>>> axes;
  if (grid.contains("parameters")) {
    const Json& params = grid["parameters"];
    if (!params.is_object()) config_error("sweep.parameters must be an object");
    for (const auto& item : params.items()) {
      std::vector<Json> values;
      if (item.value().is_array()) {
        values.assign(item.value().begin(), item.value().end());
      } else {
        for (double v : axis_values(item.value(), "sweep.parameters." + item.key())) {
          values.emplace_back(v);
        }
      }
      axes.emplace_back(item.key(), std::move(values));
    }
  }

  std::vector<double> ls{0.0};
  std::vector<double> ths{0.0};
  const bool offsets = grid.contains("l_norm");
  if (offsets) {
    ls = axis_values(grid["l_norm"], "sweep.l_norm");
    ths = axis_values(grid["theta_tilde"], "sweep.theta_tilde");
  }

  std::size_t cells = ls.size() * ths.size();
  for (const auto& axis : axes) cells *= axis.second.size();
  if (cells == 0 || (!offsets && axes.empty())) {
    throw Error(ErrorCode::kEmptyGrid, "sweep grid is empty");
  }

  std::vector<SweepJob> jobs;
  jobs.reserve(cells);
  std::vector<std::size_t> counter(axes.size(), 0);
  for (std::size_t cell = 0; cell < cells / (ls.size() * ths.size()); ++cell) {
    Json params_cfg = base;
    ScenarioDelta param_delta;
    std::string param_error;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const Json& v = axes[a].second[counter[a]];
      param_delta.emplace_back(axes[a].first, value_text(v));
      try {
        set_value(params_cfg, axes[a].first, v);
      } catch (const Error& e) {
        param_error = std::string(error_code_name(e.code())) + ": " + e.what();
      }
    }
    for (std::size_t a = axes.size(); a-- > 0;) {
      if (++counter[a] < axes[a].second.size()) break;
      counter[a] = 0;
    }

    for (double l : ls) {
      for (double th : ths) {
        SweepJob job;
        job.delta = param_delta;
        if (!param_error.empty()) {
          job.error = param_error;
          jobs.push_back(std::move(job));
          continue;
        }
        try {
          Json cfg = params_cfg;
          if (offsets) {
            double s = 0.0;
            if (grid.contains("s")) {
              s = number(grid, "s", "sweep");
            } else {
              const Scenario probe = scenario_from_json(cfg, base_dir);
              if (const auto* fi = std::get_if<FrenetInitial>(&probe.initial)) {
                s = fi->s;
              } else {
                s = probe.path
                        .frenet_project(std::get<Pose2>(probe.initial),
                                        std::nullopt,
                                        probe.vehicle.turning_radius())
                        .s;
              }
            }
            cfg["initial"] = {{"s", s}, {"l_norm", l}, {"theta_tilde", th}};
            job.delta.emplace_back("initial.l_norm", Json(l).dump());
            job.delta.emplace_back("initial.theta_tilde", Json(th).dump());
          }
          job.scenario = scenario_from_json(cfg, base_dir);
        } catch (const Error& e) {
          job.error = std::string(error_code_name(e.code())) + ": " + e.what();
        }
        jobs.push_back(std::move(job));
      }
    }
  }
  return jobs;
}

Json summary_to_json(const RunSummary& s, const TraceInfo& info) {
  Json warnings = Json::array();
  for (const auto& w : info.warnings) warnings.push_back(w);
  return Json{
      {"converged", s.converged},
      {"t_converge", nullable(s.t_converge)},
      {"path_length", s.path_length},
      {"switch_count", s.switch_count},
      {"max_V", s.max_V},
      {"final_V", s.final_V},
      {"lyapunov_violations", s.lyapunov_violations},
      {"rows", s.rows},
      {"t_final", s.t_final},
      {"termination", termination_name(info.termination)},
      {"stop_reason", info.stop_reason},
      {"warnings", warnings},
  };
}

Json sweep_to_json(const std::vector<SweepOutcome>& outcomes) {
  Json out = Json::array();
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const SweepOutcome& o = outcomes[i];
    Json delta = Json::object();
    for (const auto& [k, v] : o.delta) delta[k] = v;
    Json entry{{"index", i}, {"delta", delta}};
    if (o.summary) {
      entry["summary"] = Json{
          {"converged", o.summary->converged},
          {"t_converge", nullable(o.summary->t_converge)},
          {"path_length", o.summary->path_length},
          {"switch_count", o.summary->switch_count},
          {"max_V", o.summary->max_V},
          {"final_V", o.summary->final_V},
          {"lyapunov_violations", o.summary->lyapunov_violations},
      };
      entry["error"] = nullptr;
    } else {
      entry["summary"] = nullptr;
      entry["error"] = o.error;
    }
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace walkguide
