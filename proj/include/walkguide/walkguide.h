/* C interface to the walkguide simulator. */
#ifndef WALKGUIDE_WALKGUIDE_H_
#define WALKGUIDE_WALKGUIDE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(WALKGUIDE_BUILDING)
#define WG_API __declspec(dllexport)
#else
#define WG_API __declspec(dllimport)
#endif
#else
#define WG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wg_status {
  WG_OK = 0,
  WG_ERR_INVALID_ARGUMENT = 1,
  WG_ERR_EMPTY_PATH = 2,
  WG_ERR_CONTINUITY = 3,
  WG_ERR_OUT_OF_RANGE = 4,
  WG_ERR_SINGULAR_PROJECTION = 5,
  WG_ERR_AMBIGUOUS_PROJECTION = 6,
  WG_ERR_NON_POSITIVE_DT = 7,
  WG_ERR_PROJECTION_LOST = 8,
  WG_ERR_SCENARIO_INVALID = 9,
  WG_ERR_EMPTY_TRACE = 10,
  WG_ERR_EMPTY_GRID = 11,
  WG_ERR_CONFIG = 12,
  WG_ERR_IO = 13,
  WG_ERR_INTERNAL = 99
} wg_status;

typedef struct wg_config wg_config;
typedef struct wg_run wg_run;
typedef struct wg_sweep_result wg_sweep_result;

typedef struct wg_trace_row {
  double t, x, y, theta, v, omega, s, l, theta_tilde;
  int maneuver;     /* 0 GoStraight, 1 TurnRight, 2 TurnLeft, 3 Stop */
  int hybrid_state; /* 0 Turning, 1 Straight, 2 Controlled, 3 Stopped */
  int phase;        /* 0 Approach, 1 Track */
  double V;
} wg_trace_row;

typedef struct wg_summary {
  int converged;
  int has_t_converge;
  double t_converge;
  double path_length;
  size_t switch_count;
  double max_V;
  double final_V;
  size_t lyapunov_violations;
} wg_summary;

typedef struct wg_feasibility {
  int feasible;
  double l_hat; /* +inf when feasible everywhere */
  double l_infeasible_max;
  double max_ratio;
} wg_feasibility;

/* Message of the last failed call on this thread; never NULL. */
WG_API const char* wg_last_error(void);
WG_API const char* wg_status_name(wg_status status);
/* Frees strings returned through char** out-parameters. */
WG_API void wg_string_free(char* s);

/* Configs are JSON documents; overrides are "dotted.key=value". */
WG_API wg_status wg_config_load_file(const char* path, wg_config** out);
WG_API wg_status wg_config_load_string(const char* json, wg_config** out);
WG_API wg_status wg_config_demo(wg_config** out);
WG_API wg_status wg_config_set(wg_config* config, const char* assignment);
WG_API wg_status wg_config_to_json(const wg_config* config, char** out);
WG_API void wg_config_free(wg_config* config);

/* Builds the scenario and checks it. `report` receives one line per finding
 * (curvature per segment, delta profile feasibility). Returns WG_OK when the
 * scenario can run; warnings do not fail validation. */
WG_API wg_status wg_validate(const wg_config* config, char** report);

WG_API wg_status wg_run_simulation(const wg_config* config, wg_run** out);
WG_API void wg_run_free(wg_run* run);
WG_API size_t wg_run_row_count(const wg_run* run);
WG_API wg_status wg_run_row(const wg_run* run, size_t index, wg_trace_row* out);
WG_API wg_status wg_run_summary(const wg_run* run, wg_summary* out);
WG_API wg_status wg_run_trace_csv(const wg_run* run, char** out);
WG_API wg_status wg_run_summary_json(const wg_run* run, char** out);
/* Samples used by the Lyapunov check: (t, l/R, V) triples. */
WG_API wg_status wg_run_lyapunov_samples(const wg_run* run, double** out,
                                         size_t* count);
/* Returns to the delta manifold after infeasible departures: six doubles per
 * event (t, l/R, theta_tilde at departure, then at re-entry). */
WG_API wg_status wg_run_reentries(const wg_run* run, double** out,
                                  size_t* count);
WG_API double wg_run_ripple_bound(const wg_run* run, double l_norm);
WG_API void wg_doubles_free(double* values);

/* Sweep over the config's "sweep" block with up to `parallel` threads. */
WG_API wg_status wg_sweep(const wg_config* config, int parallel,
                          int keep_traces, wg_sweep_result** out);
WG_API void wg_sweep_free(wg_sweep_result* result);
WG_API size_t wg_sweep_count(const wg_sweep_result* result);
WG_API wg_status wg_sweep_json(const wg_sweep_result* result, char** out);
/* WG_ERR_OUT_OF_RANGE when the run failed or traces were not kept. */
WG_API wg_status wg_sweep_trace_csv(const wg_sweep_result* result,
                                    size_t index, char** out);
WG_API wg_status wg_sweep_entry(const wg_sweep_result* result, size_t index,
                                int* ok, wg_summary* summary);

/* Boundary-function grid over l/R in [-l_max, l_max], theta in [-pi, pi]. */
WG_API wg_status wg_field_csv(double delta, double l_max, int resolution,
                              double band, char** out);

/* kind: "constant" (a = delta0), "tanh" (a = amplitude, k = gain). */
WG_API wg_status wg_curvature_feasible(const char* kind, double a, double k,
                                       double v, double turning_radius,
                                       wg_feasibility* out);

#ifdef __cplusplus
}
#endif

#endif /* WALKGUIDE_WALKGUIDE_H_ */
