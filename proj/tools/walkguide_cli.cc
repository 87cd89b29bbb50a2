// walkguide: command-line driver over the C API.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "walkguide/walkguide.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

struct ConfigDeleter {
  void operator()(wg_config* c) const { wg_config_free(c); }
};
struct RunDeleter {
  void operator()(wg_run* r) const { wg_run_free(r); }
};
struct SweepDeleter {
  void operator()(wg_sweep_result* r) const { wg_sweep_free(r); }
};
struct StringDeleter {
  void operator()(char* s) const { wg_string_free(s); }
};

using ConfigPtr = std::unique_ptr<wg_config, ConfigDeleter>;
using RunPtr = std::unique_ptr<wg_run, RunDeleter>;
using SweepPtr = std::unique_ptr<wg_sweep_result, SweepDeleter>;
using CString = std::unique_ptr<char, StringDeleter>;

struct Options {
  std::string config;
  std::string out = "out";
  std::optional<unsigned long long> seed;
  std::vector<std::string> overrides;
  std::string mode;
  int parallel = 1;
  bool traces = false;
  bool dump_config = false;
  double delta = 1.0471975511965976;
  double l_max = 3.0;
  int resolution = 101;
  double band = 1e-2;
};

int report_failure(const char* what, wg_status status) {
  std::cerr << "walkguide: " << what << ": " << wg_status_name(status) << ": "
            << wg_last_error() << "\n";
  return kExitError;
}

bool write_file(const fs::path& file, const char* contents) {
  std::error_code ec;
  if (file.has_parent_path()) fs::create_directories(file.parent_path(), ec);
  std::ofstream out(file, std::ios::binary);
  out << contents;
  out.close();
  if (!out) {
    std::cerr << "walkguide: cannot write " << file << "\n";
    return false;
  }
  return true;
}

// Loads the config (or the built-in demo) and applies seed, mode and --set
// overrides in that order.
ConfigPtr load_config(const Options& opt, bool demo, int* exit_code) {
  wg_config* raw = nullptr;
  wg_status st = demo ? wg_config_demo(&raw)
                      : wg_config_load_file(opt.config.c_str(), &raw);
  if (st != WG_OK) {
    *exit_code = report_failure("loading config", st);
    return nullptr;
  }
  ConfigPtr cfg(raw);
  std::vector<std::string> assignments;
  if (opt.seed) assignments.push_back("rng_seed=" + std::to_string(*opt.seed));
  if (!opt.mode.empty()) assignments.push_back("mode=\"" + opt.mode + "\"");
  assignments.insert(assignments.end(), opt.overrides.begin(), opt.overrides.end());
  for (const std::string& a : assignments) {
    st = wg_config_set(cfg.get(), a.c_str());
    if (st != WG_OK) {
      *exit_code = report_failure(("applying " + a).c_str(), st);
      return nullptr;
    }
  }
  return cfg;
}

int cmd_simulate(const Options& opt, bool demo) {
  int code = kExitOk;
  ConfigPtr cfg = load_config(opt, demo, &code);
  if (!cfg) return code;
  if (opt.dump_config) {
    char* text = nullptr;
    if (wg_config_to_json(cfg.get(), &text) != WG_OK) return kExitError;
    CString owned(text);
    std::cout << text;
    return kExitOk;
  }

  wg_run* raw = nullptr;
  const wg_status st = wg_run_simulation(cfg.get(), &raw);
  if (st != WG_OK) return report_failure("simulation", st);
  RunPtr run(raw);

  char* csv = nullptr;
  char* summary = nullptr;
  if (wg_run_trace_csv(run.get(), &csv) != WG_OK ||
      wg_run_summary_json(run.get(), &summary) != WG_OK) {
    return report_failure("formatting output", WG_ERR_INTERNAL);
  }
  CString csv_owned(csv);
  CString summary_owned(summary);
  const fs::path out(opt.out);
  if (!write_file(out / "trace.csv", csv) ||
      !write_file(out / "summary.json", summary)) {
    return kExitError;
  }

  wg_summary s{};
  wg_run_summary(run.get(), &s);
  std::cout << "rows: " << wg_run_row_count(run.get()) << "\n"
            << "converged: " << (s.converged ? "yes" : "no") << "\n";
  if (s.has_t_converge) std::cout << "t_converge: " << s.t_converge << " s\n";
  std::cout << "final V: " << s.final_V << "\n"
            << "lyapunov violations: " << s.lyapunov_violations << "\n"
            << "wrote " << (out / "trace.csv").string() << " and "
            << (out / "summary.json").string() << "\n";
  return s.converged ? kExitOk : kExitNotConverged;
}

int cmd_sweep(const Options& opt) {
  int code = kExitOk;
  ConfigPtr cfg = load_config(opt, false, &code);
  if (!cfg) return code;
  wg_sweep_result* raw = nullptr;
  const wg_status st =
      wg_sweep(cfg.get(), opt.parallel, opt.traces ? 1 : 0, &raw);
  if (st != WG_OK) return report_failure("sweep", st);
  SweepPtr result(raw);

  char* json = nullptr;
  if (wg_sweep_json(result.get(), &json) != WG_OK) {
    return report_failure("formatting output", WG_ERR_INTERNAL);
  }
  CString json_owned(json);
  const fs::path out(opt.out);
  if (!write_file(out / "sweep.json", json)) return kExitError;

  const size_t n = wg_sweep_count(result.get());
  size_t converged = 0;
  size_t failed = 0;
  for (size_t i = 0; i < n; ++i) {
    int ok = 0;
    wg_summary s{};
    wg_sweep_entry(result.get(), i, &ok, &s);
    if (!ok) {
      ++failed;
      std::cerr << "run " << i << ": " << wg_last_error() << "\n";
    } else if (s.converged) {
      ++converged;
    }
    if (opt.traces && ok) {
      char* csv = nullptr;
      if (wg_sweep_trace_csv(result.get(), i, &csv) == WG_OK) {
        CString csv_owned(csv);
        char name[32];
        std::snprintf(name, sizeof(name), "run_%04zu.csv", i);
        if (!write_file(out / "traces" / name, csv)) return kExitError;
      }
    }
  }
  std::cout << "runs: " << n << ", converged: " << converged
            << ", errors: " << failed << "\n"
            << "wrote " << (out / "sweep.json").string() << "\n";
  return converged == n ? kExitOk : kExitNotConverged;
}

int cmd_field(const Options& opt) {
  char* csv = nullptr;
  const wg_status st =
      wg_field_csv(opt.delta, opt.l_max, opt.resolution, opt.band, &csv);
  if (st != WG_OK) return report_failure("field", st);
  CString owned(csv);
  const fs::path file = fs::path(opt.out) / "field.csv";
  if (!write_file(file, csv)) return kExitError;
  std::cout << "wrote " << file.string() << " ("
            << static_cast<long>(opt.resolution) * opt.resolution << " rows)\n";
  return kExitOk;
}

int cmd_validate(const Options& opt) {
  int code = kExitOk;
  ConfigPtr cfg = load_config(opt, opt.config.empty(), &code);
  if (!cfg) return code;
  char* report = nullptr;
  const wg_status st = wg_validate(cfg.get(), &report);
  CString owned(report);
  if (report != nullptr) std::cout << report;
  if (st != WG_OK) return report_failure("validate", st);
  std::cout << "valid\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Brake-steered walker guidance simulator"};
  app.require_subcommand(1);
  Options opt;

  auto add_run_flags = [&opt](CLI::App* sub) {
    sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", opt.seed, "Override rng_seed");
    sub->add_option("--set", opt.overrides, "Override a config value (key=value)")
        ->allow_extra_args(false);
    sub->add_option("--mode", opt.mode, "Vehicle model")
        ->check(CLI::IsMember({"kinematic", "dynamic"}));
  };

  CLI::App* simulate = app.add_subcommand("simulate", "Run one scenario");
  simulate->add_option("--config", opt.config, "Scenario JSON")->required();
  add_run_flags(simulate);

  CLI::App* sweep = app.add_subcommand("sweep", "Run the config's sweep grid");
  sweep->add_option("--config", opt.config, "Scenario JSON with a sweep block")
      ->required();
  add_run_flags(sweep);
  sweep->add_option("--parallel", opt.parallel, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep->add_flag("--traces", opt.traces, "Also write traces/run_NNNN.csv");

  CLI::App* field = app.add_subcommand("field", "Dump the boundary-function grid");
  field->add_option("--delta", opt.delta, "Approach angle (rad)")->capture_default_str();
  field->add_option("--l-max", opt.l_max, "Grid half-width in l/R")->capture_default_str();
  field->add_option("--resolution", opt.resolution, "Points per axis (>= 2)")
      ->capture_default_str();
  field->add_option("--band", opt.band, "Boundary half-thickness")->capture_default_str();
  field->add_option("--out", opt.out, "Output directory")->capture_default_str();

  CLI::App* validate = app.add_subcommand("validate", "Check a scenario");
  validate->add_option("--config", opt.config, "Scenario JSON (default: demo)");
  validate->add_option("--set", opt.overrides, "Override a config value (key=value)")
      ->allow_extra_args(false);
  validate->add_option("--mode", opt.mode, "Vehicle model")
      ->check(CLI::IsMember({"kinematic", "dynamic"}));

  CLI::App* demo = app.add_subcommand("demo", "Run the built-in demo scenario");
  add_run_flags(demo);
  demo->add_flag("--dump-config", opt.dump_config, "Print the demo config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitError;
  }

  if (simulate->parsed()) return cmd_simulate(opt, false);
  if (sweep->parsed()) return cmd_sweep(opt);
  if (field->parsed()) return cmd_field(opt);
  if (validate->parsed()) return cmd_validate(opt);
  if (demo->parsed()) return cmd_simulate(opt, true);
  return kExitError;
}
