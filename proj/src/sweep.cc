#include "walkguide/sweep.h"

#include <algorithm>
#include <atomic>
#include <thread>

#include "walkguide/errors.h"

namespace walkguide {

namespace {

SweepOutcome run_job(const SweepJob& job, bool keep_traces) {
  SweepOutcome out;
  out.delta = job.delta;
  if (!job.scenario) {
    out.error = job.error.empty() ? "scenario unavailable" : job.error;
    return out;
  }
  try {
    Trace trace = run(*job.scenario);
    out.summary = summarize(trace);
    if (keep_traces) out.trace = std::move(trace);
  } catch (const Error& e) {
    out.error = std::string(error_code_name(e.code())) + ": " + e.what();
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

std::vector<SweepOutcome> sweep(const std::vector<SweepJob>& jobs,
                                int parallel, bool keep_traces) {
  if (jobs.empty()) throw Error(ErrorCode::kEmptyGrid, "sweep grid is empty");
  std::vector<SweepOutcome> results(jobs.size());
  const auto workers = static_cast<std::size_t>(std::clamp<long>(
      parallel, 1, static_cast<long>(jobs.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      results[i] = run_job(jobs[i], keep_traces);
    }
    return results;
  }

  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
          results[i] = run_job(jobs[i], keep_traces);
        }
      });
    }
  }
  return results;
}

}  // namespace walkguide
