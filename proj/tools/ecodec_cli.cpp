// Command-line front end: run / resume simulations, the evolution oracle
// comparison, and offline metrics over a saved snapshot.
//
// Exit codes: 0 success, 1 validation error, 2 internal invariant violation.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ecodec/ecodec.hpp"
#include "ecodec/log.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json alignment_json(const ecodec::Alignment& a) {
  return {{"intra_mean", a.intra_mean}, {"inter_mean", a.inter_mean}, {"ratio", a.ratio}};
}

json analysis_json(const ecodec::Ecosystem& e) {
  const auto topo = ecodec::topology_snapshot(e);
  const auto frag = ecodec::fragmentation_report(topo, e.scenario.habitat.cluster_edge_threshold);
  const auto ab = ecodec::abundance_distribution(e);
  json isolated = json::array();
  for (auto h : frag.isolated) isolated.push_back(h.value);
  json histogram = json::object();
  for (const auto& [bucket, n] : ab.histogram) histogram[std::to_string(bucket)] = n;
  std::size_t occupancy = 0;
  for (const auto& [_, n] : ab.copies) occupancy += n;
  return {
      {"tick", e.tick},
      {"clock", e.clock},
      {"habitats", e.habitats.size()},
      {"connections", topo.edges.size()},
      {"alignment", alignment_json(ecodec::community_alignment(topo, ecodec::community_labels(e)))},
      {"fragmentation", {{"components", frag.components}, {"isolated", isolated}}},
      {"abundance", {{"distinct_genes", ab.copies.size()}, {"pool_occupancy", occupancy}, {"log2_histogram", histogram}}},
  };
}

void write_outputs(const fs::path& out, const ecodec::RunResult& result, const json& header) {
  const auto& e = result.ecosystem;
  ecodec::write_file_atomic(out / "timeline.csv", ecodec::timeline_csv(result.timeline));
  ecodec::write_file_atomic(out / "outcomes.csv", ecodec::outcomes_csv(result.outcomes));
  ecodec::write_file_atomic(out / "events.log", ecodec::event_log_text(e.event_log));
  ecodec::write_file_atomic(out / "topology_final.edges", ecodec::edge_list(ecodec::topology_snapshot(e)));
  ecodec::write_file_atomic(out / "snapshot_final.json", ecodec::snapshot_save(e));

  json summary = header;
  summary["analysis"] = analysis_json(e);
  json curve = json::array();
  const ecodec::Tick steps = header.at("steps").get<ecodec::Tick>();
  const ecodec::Tick epoch = e.scenario.epoch_length;
  if (!result.outcomes.empty() && steps % epoch == 0) {
    // outcome ticks are absolute; shift so the curve covers this run only
    auto records = ecodec::outcome_records(result.outcomes);
    const ecodec::Tick first = e.tick - steps;
    for (auto& r : records) r.tick -= first;
    for (const auto& s : ecodec::acceleration_curve(records, steps, epoch)) {
      curve.push_back({{"epoch", s.epoch},
                       {"median_generations", s.median_generations ? json(*s.median_generations) : json(nullptr)},
                       {"successes", s.successes},
                       {"failures", s.failures}});
    }
  }
  summary["acceleration_curve"] = curve;
  std::size_t executed = 0, reached = 0;
  for (const auto& o : result.outcomes) {
    executed += o.status == ecodec::OutcomeStatus::executed;
    reached += o.reached_target;
  }
  summary["outcomes"] = {{"total", result.outcomes.size()}, {"executed", executed}, {"reached_target", reached}};
  ecodec::write_file_atomic(out / "summary.json", summary.dump(2) + "\n");
}

ecodec::RunHooks periodic_outputs(const fs::path& out) {
  ecodec::RunHooks hooks;
  hooks.on_metrics = [out](const ecodec::Ecosystem& e, const ecodec::MetricsRow& row) {
    const std::string tag = std::to_string(e.tick);
    ecodec::write_file_atomic(out / ("topology_" + tag + ".edges"), ecodec::edge_list(ecodec::topology_snapshot(e)));
    ecodec::write_file_atomic(out / ("snapshot_" + tag + ".json"), ecodec::snapshot_save(e));
    ecodec::log::info("tick " + tag + ": requests=" + std::to_string(row.requests) +
                      " reached_target=" + std::to_string(row.reached_target) +
                      " alignment_ratio=" + std::to_string(row.alignment.ratio));
  };
  return hooks;
}

void prepare_out(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw ecodec::ValidationError("--out: cannot create " + out.string() + ": " + ec.message());
}

int cmd_run(const std::string& scenario_path, std::uint64_t seed, ecodec::Tick steps, const fs::path& out) {
  if (steps < 1) throw ecodec::ValidationError("--steps: must be at least 1");
  const auto scenario = ecodec::parse_scenario(ecodec::read_file(scenario_path));
  prepare_out(out);
  ecodec::log::info("run: " + scenario_path + " seed=" + std::to_string(seed) + " steps=" + std::to_string(steps));
  auto result = ecodec::run_scenario(scenario, seed, steps, periodic_outputs(out));
  ecodec::verify_invariants(result.ecosystem);
  write_outputs(out, result, {{"command", "run"}, {"scenario", scenario_path}, {"seed", seed}, {"steps", steps}});
  return 0;
}

int cmd_resume(const std::string& snapshot_path, ecodec::Tick steps, const fs::path& out) {
  if (steps < 1) throw ecodec::ValidationError("--steps: must be at least 1");
  auto e = ecodec::snapshot_load(ecodec::read_file(snapshot_path));
  prepare_out(out);
  ecodec::log::info("resume: " + snapshot_path + " at tick " + std::to_string(e.tick));
  const std::uint64_t seed = e.rng.seed();
  auto result = ecodec::advance(std::move(e), steps, periodic_outputs(out));
  ecodec::verify_invariants(result.ecosystem);
  write_outputs(out, result, {{"command", "resume"}, {"snapshot", snapshot_path}, {"seed", seed}, {"steps", steps}});
  return 0;
}

int cmd_oracle(std::size_t pool_size, std::size_t trials, std::uint64_t seed) {
  if (pool_size > ecodec::kBruteForcePoolLimit)
    throw ecodec::ValidationError("--pool-size: at most " + std::to_string(ecodec::kBruteForcePoolLimit));
  if (pool_size < 1 || trials < 1) throw ecodec::ValidationError("--pool-size and --trials must be positive");
  const auto report = ecodec::run_oracle(pool_size, trials, seed);
  json j = {{"pool_size", pool_size},
            {"trials", trials},
            {"seed", seed},
            {"matches", report.matches},
            {"match_rate", report.match_rate()},
            {"seconds", report.seconds}};
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_metrics(const std::string& snapshot_path) {
  const auto e = ecodec::snapshot_load(ecodec::read_file(snapshot_path));
  std::cout << analysis_json(e).dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ecodec: ecosystem-oriented distributed evolution simulator"};
  app.require_subcommand(1);

  std::string scenario_path, snapshot_path, out_dir;
  std::uint64_t seed = 1;
  ecodec::Tick steps = 0;
  std::size_t pool_size = 12, trials = 100;

  auto* run = app.add_subcommand("run", "Build a scenario and simulate it");
  run->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  run->add_option("--seed", seed, "Master seed")->required();
  run->add_option("--steps", steps, "Ticks to simulate")->required();
  run->add_option("--out", out_dir, "Output directory")->required();

  auto* resume = app.add_subcommand("resume", "Continue a run from a snapshot");
  resume->add_option("--snapshot", snapshot_path, "Snapshot JSON")->required();
  resume->add_option("--steps", steps, "Additional ticks")->required();
  resume->add_option("--out", out_dir, "Output directory")->required();

  auto* oracle = app.add_subcommand("oracle", "Compare evolution against exhaustive search");
  oracle->add_option("--pool-size", pool_size, "Genes per instance (<= 20)");
  oracle->add_option("--trials", trials, "Number of random instances");
  oracle->add_option("--seed", seed, "Master seed");

  auto* metrics = app.add_subcommand("metrics", "Recompute analyses from a snapshot");
  metrics->add_option("--snapshot", snapshot_path, "Snapshot JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*run) return cmd_run(scenario_path, seed, steps, out_dir);
    if (*resume) return cmd_resume(snapshot_path, steps, out_dir);
    if (*oracle) return cmd_oracle(pool_size, trials, seed);
    if (*metrics) return cmd_metrics(snapshot_path);
  } catch (const ecodec::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ecodec::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
