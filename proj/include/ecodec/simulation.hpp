#pragma once

#include <functional>
#include <vector>

#include "ecodec/ecosystem.hpp"
#include "ecodec/metrics.hpp"

namespace ecodec {

struct RunHooks {
  /// Fired every snapshot_interval ticks (and after the last step).
  std::function<void(const Ecosystem&, const MetricsRow&)> on_metrics;
  std::function<void(const Ecosystem&, const std::vector<RequestOutcome>&)> on_step;
};

struct RunResult {
  Ecosystem ecosystem;
  std::vector<MetricsRow> timeline;
  std::vector<RequestOutcome> outcomes;
};

/// Take `steps` more steps on an existing ecosystem.
inline RunResult advance(Ecosystem e, Tick steps, const RunHooks& hooks = {}) {
  RunResult out;
  std::vector<RequestOutcome> interval;
  const Tick every = e.scenario.snapshot_interval;
  for (Tick i = 0; i < steps; ++i) {
    auto outcomes = step(e);
    if (hooks.on_step) hooks.on_step(e, outcomes);
    interval.insert(interval.end(), outcomes.begin(), outcomes.end());
    out.outcomes.insert(out.outcomes.end(), std::make_move_iterator(outcomes.begin()),
                        std::make_move_iterator(outcomes.end()));
    if (e.tick % every == 0 || i + 1 == steps) {
      out.timeline.push_back(metrics_row(e, interval));
      if (hooks.on_metrics) hooks.on_metrics(e, out.timeline.back());
      interval.clear();
    }
  }
  out.ecosystem = std::move(e);
  return out;
}

inline RunResult run_scenario(const ScenarioConfig& scenario, std::uint64_t seed, Tick steps,
                              const RunHooks& hooks = {}) {
  if (steps < 1) throw ArgumentError("run_scenario: steps must be at least 1");
  return advance(build_ecosystem(scenario, seed), steps, hooks);
}

}  // namespace ecodec
