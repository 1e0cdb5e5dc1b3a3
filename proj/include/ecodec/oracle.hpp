#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "ecodec/evolution.hpp"
#include "ecodec/gene_model.hpp"
#include "ecodec/rng.hpp"

namespace ecodec {

// Evolution-versus-exhaustive-search comparison on random instances.

struct OracleInstance {
  GeneRegistry registry;
  std::vector<GeneId> pool;
  Request request;
};

struct OracleInstanceShape {
  std::uint32_t vocabulary{10};
  std::uint32_t min_attributes{1};
  std::uint32_t max_attributes{3};
  std::uint32_t min_request{3};
  std::uint32_t max_request{5};
};

inline OracleInstance random_oracle_instance(std::size_t pool_size, RngStream& rng,
                                             const OracleInstanceShape& shape = {}) {
  OracleInstance inst;
  std::vector<AttributeId> vocab(shape.vocabulary);
  for (std::uint32_t a = 0; a < shape.vocabulary; ++a) vocab[a] = a;
  auto pick = [&](std::size_t n) {
    std::vector<AttributeId> v = vocab;
    for (std::size_t k = 0; k < n; ++k) std::swap(v[k], v[k + rng.below(v.size() - k)]);
    v.resize(n);
    normalize_set(v);
    return v;
  };
  for (std::size_t i = 0; i < pool_size; ++i) {
    Gene g;
    g.id = GeneId(i + 1);
    g.provides = pick(rng.between(shape.min_attributes, shape.max_attributes));
    g.cost = rng.uniform(0.5, 2.0);
    g.origin = HabitatId(0);
    inst.pool.push_back(g.id);
    inst.registry.add(std::move(g));
  }
  for (AttributeId a : pick(rng.between(shape.min_request, shape.max_request))) inst.request.wants[a] = 1.0;
  return inst;
}

struct OracleTrial {
  double evolved_scalar{0.0};
  double optimal_scalar{0.0};
  std::uint32_t generations{0};
  bool match{false};
};

struct OracleReport {
  std::vector<OracleTrial> trials;
  std::size_t matches{0};
  double seconds{0.0};

  double match_rate() const { return trials.empty() ? 0.0 : static_cast<double>(matches) / trials.size(); }
};

inline constexpr double kOracleTolerance = 1e-12;

inline OracleReport run_oracle(std::size_t pool_size, std::size_t trials, std::uint64_t seed,
                               const EvolutionParams& params = {}) {
  const auto start = std::chrono::steady_clock::now();
  OracleReport report;
  RngStream instances = RngStream::from_seed(seed, "oracle/instances");
  for (std::size_t t = 0; t < trials; ++t) {
    const auto inst = random_oracle_instance(pool_size, instances);
    const auto evolved = run_evolution(inst.request, HabitatId(0), inst.pool, {}, params, inst.registry,
                                       RngStream::from_seed(seed, "oracle/run/" + std::to_string(t)));
    const auto best = brute_force_optimal(inst.pool, inst.request, inst.pool.size(), inst.registry, params.alpha);
    OracleTrial trial{evolved.best_fitness.scalar, best.best_scalar, evolved.generations, false};
    trial.match = std::abs(trial.evolved_scalar - trial.optimal_scalar) <= kOracleTolerance;
    report.matches += trial.match;
    report.trials.push_back(trial);
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace ecodec
