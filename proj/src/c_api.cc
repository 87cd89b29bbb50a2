#include "walkguide/walkguide.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <limits>
#include <new>
#include <string>

#include "walkguide/analysis.h"
#include "walkguide/errors.h"
#include "walkguide/scenario_io.h"
#include "walkguide/simulator.h"
#include "walkguide/sweep.h"

struct wg_config {
  walkguide::Json json;
  std::filesystem::path base_dir;
};

struct wg_run {
  walkguide::Trace trace;
  walkguide::RunSummary summary;
};

struct wg_sweep_result {
  std::vector<walkguide::SweepOutcome> outcomes;
};

namespace {

thread_local std::string g_last_error;

wg_status to_status(walkguide::ErrorCode code) {
  using walkguide::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return WG_ERR_INVALID_ARGUMENT;
    case ErrorCode::kEmptyPath:
      return WG_ERR_EMPTY_PATH;
    case ErrorCode::kContinuity:
      return WG_ERR_CONTINUITY;
    case ErrorCode::kOutOfRange:
      return WG_ERR_OUT_OF_RANGE;
    case ErrorCode::kSingularProjection:
      return WG_ERR_SINGULAR_PROJECTION;
    case ErrorCode::kAmbiguousProjection:
      return WG_ERR_AMBIGUOUS_PROJECTION;
    case ErrorCode::kNonPositiveDt:
      return WG_ERR_NON_POSITIVE_DT;
    case ErrorCode::kProjectionLost:
      return WG_ERR_PROJECTION_LOST;
    case ErrorCode::kScenarioInvalid:
      return WG_ERR_SCENARIO_INVALID;
    case ErrorCode::kEmptyTrace:
      return WG_ERR_EMPTY_TRACE;
    case ErrorCode::kEmptyGrid:
      return WG_ERR_EMPTY_GRID;
    case ErrorCode::kConfig:
      return WG_ERR_CONFIG;
    case ErrorCode::kIo:
      return WG_ERR_IO;
  }
  return WG_ERR_INTERNAL;
}

wg_status fail(wg_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into a status and the thread's last
// error message.
template <typename F>
wg_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const walkguide::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(WG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(WG_ERR_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

double* dup_doubles(const std::vector<double>& v) {
  auto* out = static_cast<double*>(std::malloc((v.empty() ? 1 : v.size()) * sizeof(double)));
  if (out == nullptr) throw std::bad_alloc();
  if (!v.empty()) std::memcpy(out, v.data(), v.size() * sizeof(double));
  return out;
}

void fill_summary(const walkguide::RunSummary& s, wg_summary* out) {
  out->converged = s.converged ? 1 : 0;
  out->has_t_converge = s.t_converge ? 1 : 0;
  out->t_converge = s.t_converge.value_or(std::numeric_limits<double>::quiet_NaN());
  out->path_length = s.path_length;
  out->switch_count = s.switch_count;
  out->max_V = s.max_V;
  out->final_V = s.final_V;
  out->lyapunov_violations = s.lyapunov_violations;
}

std::string format(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, value);
  return buf;
}

#define WG_REQUIRE(cond, what)                                   \
  do {                                                           \
    if (!(cond)) return fail(WG_ERR_INVALID_ARGUMENT, (what));   \
  } while (0)

}  // namespace

extern "C" {

const char* wg_last_error(void) { return g_last_error.c_str(); }

const char* wg_status_name(wg_status status) {
  switch (status) {
    case WG_OK:
      return "OK";
    case WG_ERR_INVALID_ARGUMENT:
      return "InvalidArgument";
    case WG_ERR_EMPTY_PATH:
      return "EmptyPath";
    case WG_ERR_CONTINUITY:
      return "Continuity";
    case WG_ERR_OUT_OF_RANGE:
      return "OutOfRange";
    case WG_ERR_SINGULAR_PROJECTION:
      return "SingularProjection";
    case WG_ERR_AMBIGUOUS_PROJECTION:
      return "AmbiguousProjection";
    case WG_ERR_NON_POSITIVE_DT:
      return "NonPositiveDt";
    case WG_ERR_PROJECTION_LOST:
      return "ProjectionLost";
    case WG_ERR_SCENARIO_INVALID:
      return "ScenarioInvalid";
    case WG_ERR_EMPTY_TRACE:
      return "EmptyTrace";
    case WG_ERR_EMPTY_GRID:
      return "EmptyGrid";
    case WG_ERR_CONFIG:
      return "Config";
    case WG_ERR_IO:
      return "Io";
    case WG_ERR_INTERNAL:
      return "Internal";
  }
  return "Unknown";
}

void wg_string_free(char* s) { std::free(s); }

void wg_doubles_free(double* values) { std::free(values); }

wg_status wg_config_load_file(const char* path, wg_config** out) {
  WG_REQUIRE(path != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    auto cfg = std::make_unique<wg_config>();
    cfg->json = walkguide::load_config_file(path);
    cfg->base_dir = std::filesystem::path(path).parent_path();
    *out = cfg.release();
    return WG_OK;
  });
}

wg_status wg_config_load_string(const char* json, wg_config** out) {
  WG_REQUIRE(json != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    auto cfg = std::make_unique<wg_config>();
    cfg->json = walkguide::parse_config(json);
    *out = cfg.release();
    return WG_OK;
  });
}

wg_status wg_config_demo(wg_config** out) {
  WG_REQUIRE(out != nullptr, "null argument");
  return guarded([&] {
    auto cfg = std::make_unique<wg_config>();
    cfg->json = walkguide::parse_config(walkguide::demo_config_text());
    *out = cfg.release();
    return WG_OK;
  });
}

wg_status wg_config_set(wg_config* config, const char* assignment) {
  WG_REQUIRE(config != nullptr && assignment != nullptr, "null argument");
  return guarded([&] {
    walkguide::apply_override(config->json, assignment);
    return WG_OK;
  });
}

wg_status wg_config_to_json(const wg_config* config, char** out) {
  WG_REQUIRE(config != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    *out = dup_string(config->json.dump(2) + "\n");
    return WG_OK;
  });
}

void wg_config_free(wg_config* config) { delete config; }

wg_status wg_validate(const wg_config* config, char** report) {
  WG_REQUIRE(config != nullptr && report != nullptr, "null argument");
  *report = nullptr;
  std::string text;
  const wg_status status = guarded([&] {
    const walkguide::Scenario sc =
        walkguide::scenario_from_json(config->json, config->base_dir);
    text += "path: " + std::to_string(sc.path.segments().size()) +
            " segments, length " + format("%.6g", sc.path.total_length()) +
            " m, continuity ok\n";
    for (const std::string& w : walkguide::validate_scenario(sc)) {
      text += "warning: " + w + "\n";
    }

    const double R = sc.vehicle.turning_radius();
    std::string bad_segments;
    const auto& segs = sc.path.segments();
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const double c = std::max(std::abs(segs[i].curvature_start),
                                std::abs(segs[i].curvature_end));
      const bool ok = c * R <= 1.0;
      text += "segment " + std::to_string(i) + " (" +
              walkguide::segment_kind_name(segs[i].kind) + "): |c|*R = " +
              format("%.6g", c * R) + (ok ? " ok\n" : " exceeds 1\n");
      if (!ok) {
        if (!bad_segments.empty()) bad_segments += ", ";
        bad_segments += std::to_string(i);
      }
    }

    const walkguide::FeasibilityReport fr = walkguide::curvature_feasible(
        sc.controller.delta_profile, sc.user.v_user, R);
    text += std::string("delta profile feasible: ") + (fr.feasible ? "yes" : "no") + "\n";
    text += "delta profile max |delta' sin(delta)|: " + format("%.6g", fr.max_ratio) + "\n";
    if (!fr.feasible) {
      text += "warning: delta profile demands more than v/R turn rate; l_hat = " +
              format("%.6g", fr.l_hat) + " (infeasible up to |l/R| = " +
              format("%.6g", fr.l_infeasible_max) + ")\n";
    }
    if (!bad_segments.empty()) {
      return fail(WG_ERR_SCENARIO_INVALID,
                  "path curvature exceeds 1/R on segment(s) " + bad_segments);
    }
    return WG_OK;
  });
  if (status != WG_OK && !g_last_error.empty()) {
    text += "error: " + g_last_error + "\n";
  }
  try {
    *report = dup_string(text);
  } catch (const std::bad_alloc&) {
    return fail(WG_ERR_INTERNAL, "out of memory");
  }
  return status;
}

wg_status wg_run_simulation(const wg_config* config, wg_run** out) {
  WG_REQUIRE(config != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    const walkguide::Scenario sc =
        walkguide::scenario_from_json(config->json, config->base_dir);
    auto r = std::make_unique<wg_run>();
    r->trace = walkguide::run(sc);
    r->summary = walkguide::summarize(r->trace);
    *out = r.release();
    return WG_OK;
  });
}

void wg_run_free(wg_run* run) { delete run; }

size_t wg_run_row_count(const wg_run* run) {
  return run == nullptr ? 0 : run->trace.rows.size();
}

wg_status wg_run_row(const wg_run* run, size_t index, wg_trace_row* out) {
  WG_REQUIRE(run != nullptr && out != nullptr, "null argument");
  if (index >= run->trace.rows.size()) {
    return fail(WG_ERR_OUT_OF_RANGE, "row index out of range");
  }
  const walkguide::TraceRow& r = run->trace.rows[index];
  *out = {r.t, r.x, r.y, r.theta, r.v, r.omega, r.s, r.l, r.theta_tilde,
          static_cast<int>(r.maneuver), static_cast<int>(r.hybrid_state),
          static_cast<int>(r.phase), r.V};
  return WG_OK;
}

wg_status wg_run_summary(const wg_run* run, wg_summary* out) {
  WG_REQUIRE(run != nullptr && out != nullptr, "null argument");
  fill_summary(run->summary, out);
  return WG_OK;
}

wg_status wg_run_trace_csv(const wg_run* run, char** out) {
  WG_REQUIRE(run != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    *out = dup_string(walkguide::trace_csv(run->trace));
    return WG_OK;
  });
}

wg_status wg_run_summary_json(const wg_run* run, char** out) {
  WG_REQUIRE(run != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    *out = dup_string(
        walkguide::summary_to_json(run->summary, run->trace.info).dump(2) + "\n");
    return WG_OK;
  });
}

wg_status wg_run_lyapunov_samples(const wg_run* run, double** out,
                                  size_t* count) {
  WG_REQUIRE(run != nullptr && out != nullptr && count != nullptr,
             "null argument");
  return guarded([&] {
    std::vector<double> flat;
    for (const auto& s : walkguide::lyapunov_samples(run->trace)) {
      flat.insert(flat.end(), {s.t, s.l_norm, s.V});
    }
    *out = dup_doubles(flat);
    *count = flat.size() / 3;
    return WG_OK;
  });
}

wg_status wg_run_reentries(const wg_run* run, double** out, size_t* count) {
  WG_REQUIRE(run != nullptr && out != nullptr && count != nullptr,
             "null argument");
  return guarded([&] {
    std::vector<double> flat;
    for (const auto& e : walkguide::manifold_reentries(run->trace)) {
      flat.insert(flat.end(), {e.t_depart, e.l_depart, e.theta_depart,
                               e.t_reenter, e.l_reenter, e.theta_reenter});
    }
    *out = dup_doubles(flat);
    *count = flat.size() / 6;
    return WG_OK;
  });
}

double wg_run_ripple_bound(const wg_run* run, double l_norm) {
  if (run == nullptr) return std::numeric_limits<double>::quiet_NaN();
  const walkguide::TraceInfo& info = run->trace.info;
  return walkguide::ripple_bound(l_norm, info.controller.eps_theta,
                                 info.dt_control, info.v_nominal,
                                 info.turning_radius);
}

wg_status wg_sweep(const wg_config* config, int parallel, int keep_traces,
                   wg_sweep_result** out) {
  WG_REQUIRE(config != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    const auto jobs = walkguide::sweep_jobs(config->json, config->base_dir);
    auto r = std::make_unique<wg_sweep_result>();
    r->outcomes = walkguide::sweep(jobs, parallel, keep_traces != 0);
    *out = r.release();
    return WG_OK;
  });
}

void wg_sweep_free(wg_sweep_result* result) { delete result; }

size_t wg_sweep_count(const wg_sweep_result* result) {
  return result == nullptr ? 0 : result->outcomes.size();
}

wg_status wg_sweep_json(const wg_sweep_result* result, char** out) {
  WG_REQUIRE(result != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    *out = dup_string(walkguide::sweep_to_json(result->outcomes).dump(2) + "\n");
    return WG_OK;
  });
}

wg_status wg_sweep_trace_csv(const wg_sweep_result* result, size_t index,
                             char** out) {
  WG_REQUIRE(result != nullptr && out != nullptr, "null argument");
  if (index >= result->outcomes.size() || !result->outcomes[index].trace) {
    return fail(WG_ERR_OUT_OF_RANGE, "no trace for sweep entry");
  }
  return guarded([&] {
    *out = dup_string(walkguide::trace_csv(*result->outcomes[index].trace));
    return WG_OK;
  });
}

wg_status wg_sweep_entry(const wg_sweep_result* result, size_t index, int* ok,
                         wg_summary* summary) {
  WG_REQUIRE(result != nullptr && ok != nullptr && summary != nullptr,
             "null argument");
  if (index >= result->outcomes.size()) {
    return fail(WG_ERR_OUT_OF_RANGE, "sweep index out of range");
  }
  const walkguide::SweepOutcome& o = result->outcomes[index];
  *ok = o.summary ? 1 : 0;
  *summary = wg_summary{};
  if (o.summary) {
    fill_summary(*o.summary, summary);
  } else {
    g_last_error = o.error;
  }
  return WG_OK;
}

wg_status wg_field_csv(double delta, double l_max, int resolution, double band,
                       char** out) {
  WG_REQUIRE(out != nullptr, "null argument");
  WG_REQUIRE(std::isfinite(delta) && std::isfinite(l_max) && std::isfinite(band),
             "field bounds must be finite");
  WG_REQUIRE(band >= 0.0, "field band must be >= 0");
  return guarded([&] {
    walkguide::FieldSpec spec;
    spec.delta = delta;
    spec.l_max = l_max;
    spec.resolution = resolution;
    spec.band = band;
    *out = dup_string(walkguide::field_csv(spec));
    return WG_OK;
  });
}

wg_status wg_curvature_feasible(const char* kind, double a, double k, double v,
                                double turning_radius, wg_feasibility* out) {
  WG_REQUIRE(kind != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    walkguide::DeltaProfile profile;
    if (std::strcmp(kind, "constant") == 0) {
      profile = walkguide::DeltaProfile::constant(a);
    } else if (std::strcmp(kind, "tanh") == 0) {
      profile = walkguide::DeltaProfile::tanh(a, k);
    } else {
      return fail(WG_ERR_INVALID_ARGUMENT, "profile kind must be constant or tanh");
    }
    const auto r = walkguide::curvature_feasible(profile, v, turning_radius);
    *out = {r.feasible ? 1 : 0, r.l_hat, r.l_infeasible_max, r.max_ratio};
    return WG_OK;
  });
}

}  // extern "C"
