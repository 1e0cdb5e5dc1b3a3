#pragma once

#include <algorithm>
#include <bit>
#include <concepts>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ecodec/errors.hpp"
#include "ecodec/gene_model.hpp"
#include "ecodec/rng.hpp"

namespace ecodec {

/// Anything that hands out uniform doubles in [0,1) and bounded integers.
template <typename R>
concept UniformRandom = requires(R& r, std::uint64_t n) {
  { r.uniform() } -> std::convertible_to<double>;
  { r.below(n) } -> std::convertible_to<std::uint64_t>;
};

struct EvolutionParams {
  double alpha{0.05};
  std::size_t population_size{20};
  double p_cross{0.7};
  double p_mut{1.0};  // expected number of toggles per individual
  std::uint32_t max_generations{100};
  double target_coverage{0.95};
  double seed_fraction{0.25};
  std::size_t max_initial_size{8};
  // after the target is hit, keep going until the elite stalls this long
  std::uint32_t settle_generations{10};

  bool operator==(const EvolutionParams&) const = default;
};

struct FitnessValue {
  double coverage{0.0};
  double total_cost{0.0};
  double scalar{0.0};

  bool operator==(const FitnessValue&) const = default;
};

/// A past solution together with the request that produced it.
struct ArchiveEntry {
  GeneSet set;
  Request request;
  Tick registered_at{0};

  bool operator==(const ArchiveEntry&) const = default;
};

inline FitnessValue fitness(const GeneSet& gs, const Request& r, const GeneRegistry& registry,
                            double alpha) {
  if (gs.empty()) return {};
  FitnessValue f;
  std::vector<AttributeId> present;
  for (GeneId g : gs.members) {
    const Gene& gene = registry.at(g);
    f.total_cost += gene.cost;
    for (AttributeId a : gene.provides) {
      if (r.wants.count(a)) present.push_back(a);
    }
  }
  normalize_set(present);
  double covered = 0.0;
  for (AttributeId a : present) covered += r.wants.at(a);
  const double total = r.total_weight();
  f.coverage = total > 0.0 ? covered / total : 0.0;
  f.scalar = f.coverage - alpha * static_cast<double>(gs.size());
  return f;
}

/// Pareto domination on (coverage up, cost down).
inline bool dominates(const FitnessValue& a, const FitnessValue& b) {
  return a.coverage >= b.coverage && a.total_cost <= b.total_cost &&
         (a.coverage > b.coverage || a.total_cost < b.total_cost);
}

/// Nondominated sorting: rank 0 is the first front.
inline std::vector<std::size_t> pareto_ranks(std::span<const FitnessValue> fs) {
  const std::size_t n = fs.size();
  std::vector<std::size_t> dominated_by(n, 0);
  std::vector<std::vector<std::size_t>> dominates_list(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (dominates(fs[i], fs[j])) dominates_list[i].push_back(j);
      else if (dominates(fs[j], fs[i])) ++dominated_by[i];
    }
  }
  std::vector<std::size_t> rank(n, 0);
  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < n; ++i)
    if (dominated_by[i] == 0) current.push_back(i);
  std::size_t level = 0;
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t i : current) {
      rank[i] = level;
      for (std::size_t j : dominates_list[i])
        if (--dominated_by[j] == 0) next.push_back(j);
    }
    current = std::move(next);
    ++level;
  }
  return rank;
}

inline std::vector<GeneSet> nondominated_front(std::span<const GeneSet> individuals, const Request& r,
                                               const GeneRegistry& registry) {
  if (individuals.empty()) throw ArgumentError("nondominated_front: empty population");
  std::vector<FitnessValue> fs;
  fs.reserve(individuals.size());
  for (const auto& gs : individuals) fs.push_back(fitness(gs, r, registry, 0.0));
  const auto ranks = pareto_ranks(fs);
  std::vector<GeneSet> front;
  for (std::size_t i = 0; i < individuals.size(); ++i)
    if (ranks[i] == 0) front.push_back(individuals[i]);
  return front;
}

/// Toggle each pool gene independently with probability rate/|pool| (capped
/// at 1). Provenance is carried over unchanged.
template <UniformRandom Rng>
GeneSet mutate(const GeneSet& gs, std::span<const GeneId> pool, double rate, Rng& rng) {
  if (rate < 0.0) throw ArgumentError("mutate: negative rate");
  if (pool.empty() || rate == 0.0) return gs;
  const double p = std::min(1.0, rate / static_cast<double>(pool.size()));
  GeneSet out;
  out.provenance = gs.provenance;
  out.members.reserve(gs.members.size() + 2);
  std::vector<GeneId> toggled;
  for (GeneId g : pool) {
    if (rng.uniform() < p) toggled.push_back(g);
  }
  normalize_set(toggled);
  std::set_symmetric_difference(gs.members.begin(), gs.members.end(), toggled.begin(), toggled.end(),
                                std::back_inserter(out.members));
  return out;
}

/// Uniform set crossover. Shared genes go to both children; each gene held by
/// only one parent lands in exactly one child, chosen by a fair coin.
template <UniformRandom Rng>
std::pair<GeneSet, GeneSet> crossover(const GeneSet& a, const GeneSet& b, Rng& rng,
                                      HabitatId created_at) {
  std::pair<GeneSet, GeneSet> kids;
  auto prov = merge_provenance(a, b, created_at);
  kids.first.provenance = prov;
  kids.second.provenance = std::move(prov);
  auto ia = a.members.begin();
  auto ib = b.members.begin();
  auto route = [&](GeneId g) {
    if (rng.uniform() < 0.5) kids.first.members.push_back(g);
    else kids.second.members.push_back(g);
  };
  while (ia != a.members.end() || ib != b.members.end()) {
    if (ib == b.members.end() || (ia != a.members.end() && *ia < *ib)) {
      route(*ia++);
    } else if (ia == a.members.end() || *ib < *ia) {
      route(*ib++);
    } else {
      kids.first.members.push_back(*ia);
      kids.second.members.push_back(*ia);
      ++ia;
      ++ib;
    }
  }
  return kids;
}

/// One evolving island for one request at one habitat.
struct Population {
  Request request;
  HabitatId habitat;
  std::vector<GeneId> pool;  // founding gene-pool snapshot, sorted
  std::vector<GeneSet> individuals;
  std::vector<FitnessValue> fitness;  // parallel to individuals once evaluated
  std::uint32_t generation{0};
  RngStream rng;
};

inline void evaluate(Population& p, const GeneRegistry& registry, double alpha) {
  p.fitness.clear();
  p.fitness.reserve(p.individuals.size());
  for (const auto& gs : p.individuals) p.fitness.push_back(fitness(gs, p.request, registry, alpha));
}

namespace detail {

/// Strict "a beats b": scalar, then Pareto rank, then cost, then id sum.
struct Ranking {
  std::span<const FitnessValue> fit;
  std::span<const std::size_t> rank;
  std::span<const GeneSet> sets;

  bool better(std::size_t a, std::size_t b) const {
    if (fit[a].scalar != fit[b].scalar) return fit[a].scalar > fit[b].scalar;
    if (rank[a] != rank[b]) return rank[a] < rank[b];
    if (fit[a].total_cost != fit[b].total_cost) return fit[a].total_cost < fit[b].total_cost;
    return sets[a].id_sum() < sets[b].id_sum();
  }

  std::size_t best() const {
    std::size_t idx = 0;
    for (std::size_t i = 1; i < fit.size(); ++i)
      if (better(i, idx)) idx = i;
    return idx;
  }
};

}  // namespace detail

/// Index of the elite individual. Requires an evaluated population.
inline std::size_t elite_index(const Population& p) {
  const auto ranks = pareto_ranks(p.fitness);
  return detail::Ranking{p.fitness, ranks, p.individuals}.best();
}

/// Seed the population from the most similar archived solutions, then fill
/// with random subsets of the pool. Archived members missing from the pool
/// are dropped; entries with nothing left, or with zero similarity, are
/// skipped.
inline Population init_population(const Request& r, HabitatId habitat, std::vector<GeneId> pool,
                                  std::span<const ArchiveEntry> archive, std::size_t n,
                                  double seed_fraction, std::size_t max_initial_size, RngStream rng) {
  normalize_set(pool);
  if (pool.empty()) throw NoGenesAvailable();
  if (n < 2) throw ArgumentError("init_population: population size must be at least 2");

  Population p;
  p.request = r;
  p.habitat = habitat;
  p.rng = rng;

  struct Candidate {
    double similarity;
    std::uint64_t id_sum;
    std::size_t order;
    GeneSet set;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < archive.size(); ++i) {
    const double sim = request_similarity(archive[i].request, r);
    if (sim <= 0.0) continue;
    GeneSet s;
    s.provenance = archive[i].set.provenance;
    std::set_intersection(archive[i].set.members.begin(), archive[i].set.members.end(), pool.begin(),
                          pool.end(), std::back_inserter(s.members));
    if (s.empty()) continue;
    const auto sum = s.id_sum();
    candidates.push_back({sim, sum, i, std::move(s)});
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    if (a.id_sum != b.id_sum) return a.id_sum < b.id_sum;
    return a.order < b.order;
  });
  const auto seed_slots = static_cast<std::size_t>(seed_fraction * static_cast<double>(n));
  for (auto& c : candidates) {
    if (p.individuals.size() >= seed_slots) break;
    const bool duplicate = std::any_of(p.individuals.begin(), p.individuals.end(),
                                       [&](const GeneSet& s) { return s.members == c.set.members; });
    if (!duplicate) p.individuals.push_back(std::move(c.set));
  }

  const std::size_t cap = std::min<std::size_t>(std::max<std::size_t>(max_initial_size, 1), pool.size());
  while (p.individuals.size() < n) {
    const std::size_t size = p.rng.between(1, cap);
    // partial Fisher-Yates over a scratch copy
    std::vector<GeneId> scratch = pool;
    GeneSet s;
    for (std::size_t k = 0; k < size; ++k) {
      const std::size_t j = k + p.rng.below(scratch.size() - k);
      std::swap(scratch[k], scratch[j]);
      s.members.push_back(scratch[k]);
    }
    normalize_set(s.members);
    s.provenance = {habitat};
    p.individuals.push_back(std::move(s));
  }
  p.pool = std::move(pool);
  return p;
}

/// One generation: elitism, binary tournaments, crossover, mutation.
inline Population evolve_step(const Population& current, const GeneRegistry& registry,
                              const EvolutionParams& params) {
  Population cur = current;
  if (cur.fitness.size() != cur.individuals.size()) evaluate(cur, registry, params.alpha);

  const auto ranks = pareto_ranks(cur.fitness);
  const detail::Ranking ranking{cur.fitness, ranks, cur.individuals};
  const std::size_t n = std::max(params.population_size, std::size_t{2});

  Population next;
  next.request = cur.request;
  next.habitat = cur.habitat;
  next.pool = cur.pool;
  next.generation = cur.generation + 1;
  next.rng = cur.rng;
  auto& rng = next.rng;

  next.individuals.push_back(cur.individuals[ranking.best()]);
  auto tournament = [&]() -> const GeneSet& {
    const std::size_t a = rng.below(cur.individuals.size());
    const std::size_t b = rng.below(cur.individuals.size());
    return cur.individuals[ranking.better(b, a) ? b : a];
  };
  while (next.individuals.size() < n) {
    const GeneSet& pa = tournament();
    const GeneSet& pb = tournament();
    std::pair<GeneSet, GeneSet> kids;
    if (rng.uniform() < params.p_cross) kids = crossover(pa, pb, rng, cur.habitat);
    else kids = {pa, pb};
    next.individuals.push_back(mutate(kids.first, next.pool, params.p_mut, rng));
    if (next.individuals.size() < n)
      next.individuals.push_back(mutate(kids.second, next.pool, params.p_mut, rng));
  }
  evaluate(next, registry, params.alpha);
  return next;
}

/// Drop members whose removal loses no wanted attribute, most expensive first.
inline GeneSet prune_redundant(const GeneSet& gs, const Request& r, const GeneRegistry& registry) {
  auto wanted_present = [&](const std::vector<GeneId>& members) {
    std::vector<AttributeId> out;
    for (GeneId g : members)
      for (AttributeId a : registry.at(g).provides)
        if (r.wants.count(a)) out.push_back(a);
    normalize_set(out);
    return out;
  };
  const auto target = wanted_present(gs.members);
  std::vector<GeneId> order = gs.members;
  std::sort(order.begin(), order.end(), [&](GeneId a, GeneId b) {
    const double ca = registry.at(a).cost;
    const double cb = registry.at(b).cost;
    if (ca != cb) return ca > cb;
    return a > b;
  });
  GeneSet out = gs;
  for (GeneId g : order) {
    std::vector<GeneId> trial;
    std::copy_if(out.members.begin(), out.members.end(), std::back_inserter(trial),
                 [g](GeneId m) { return m != g; });
    if (wanted_present(trial) == target) out.members = std::move(trial);
  }
  return out;
}

struct TraceRow {
  std::uint32_t generation{0};
  double best_scalar{0.0};
  double best_coverage{0.0};
  double best_cost{0.0};
};

struct EvolutionResult {
  GeneSet best;
  FitnessValue best_fitness;
  std::vector<GeneSet> front;
  std::uint32_t generations{0};  // to first reach the target, or all of them if it never was
  std::uint32_t generations_run{0};
  bool reached_target{false};
  std::vector<TraceRow> trace;
};

/// Evolve until the elite reaches the target coverage or the generation cap,
/// then for up to settle_generations more while the elite keeps improving.
/// The returned best is the elite with redundant members pruned.
inline EvolutionResult run_evolution(const Request& r, HabitatId habitat, std::vector<GeneId> pool,
                                     std::span<const ArchiveEntry> archive, const EvolutionParams& params,
                                     const GeneRegistry& registry, RngStream rng) {
  validate_request(r);
  Population pop = init_population(r, habitat, std::move(pool), archive, params.population_size,
                                   params.seed_fraction, params.max_initial_size, rng);
  evaluate(pop, registry, params.alpha);

  EvolutionResult result;
  auto record = [&]() -> std::size_t {
    const std::size_t e = elite_index(pop);
    const auto& f = pop.fitness[e];
    result.trace.push_back({pop.generation, f.scalar, f.coverage, f.total_cost});
    return e;
  };
  std::size_t elite = record();
  while (pop.fitness[elite].coverage < params.target_coverage && pop.generation < params.max_generations) {
    pop = evolve_step(pop, registry, params);
    elite = record();
  }
  result.generations = pop.generation;

  if (pop.fitness[elite].coverage >= params.target_coverage) {
    double best = pop.fitness[elite].scalar;
    std::uint32_t stalled = 0;
    while (stalled < params.settle_generations && pop.generation < params.max_generations) {
      pop = evolve_step(pop, registry, params);
      elite = record();
      if (pop.fitness[elite].scalar > best) {
        best = pop.fitness[elite].scalar;
        stalled = 0;
      } else {
        ++stalled;
      }
    }
  }
  result.generations_run = pop.generation;
  result.best = prune_redundant(pop.individuals[elite], r, registry);
  result.best_fitness = fitness(result.best, r, registry, params.alpha);
  result.reached_target = result.best_fitness.coverage >= params.target_coverage;

  std::vector<GeneSet> unique;
  for (const auto& gs : pop.individuals) {
    if (std::none_of(unique.begin(), unique.end(), [&](const GeneSet& u) { return u.members == gs.members; }))
      unique.push_back(gs);
  }
  result.front = nondominated_front(unique, r, registry);
  return result;
}

struct BruteForceResult {
  double best_scalar{0.0};
  std::vector<GeneSet> optimal;
  std::uint64_t evaluated{0};
};

inline constexpr std::size_t kBruteForcePoolLimit = 20;

/// Exhaustive search over every subset of at most `max_size` pool genes.
inline BruteForceResult brute_force_optimal(std::span<const GeneId> pool, const Request& r,
                                            std::size_t max_size, const GeneRegistry& registry,
                                            double alpha) {
  if (pool.size() > kBruteForcePoolLimit)
    throw ArgumentError("brute_force_optimal: pool of " + std::to_string(pool.size()) +
                        " genes exceeds the limit of " + std::to_string(kBruteForcePoolLimit));
  std::vector<GeneId> sorted(pool.begin(), pool.end());
  normalize_set(sorted);

  BruteForceResult out;
  bool first = true;
  const std::uint64_t limit = std::uint64_t{1} << sorted.size();
  GeneSet gs;
  for (std::uint64_t mask = 0; mask < limit; ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) > max_size) continue;
    gs.members.clear();
    for (std::size_t i = 0; i < sorted.size(); ++i)
      if (mask & (std::uint64_t{1} << i)) gs.members.push_back(sorted[i]);
    ++out.evaluated;
    const double s = fitness(gs, r, registry, alpha).scalar;
    if (first || s > out.best_scalar) {
      out.best_scalar = s;
      out.optimal.clear();
      out.optimal.push_back(gs);
      first = false;
    } else if (s == out.best_scalar) {
      out.optimal.push_back(gs);
    }
  }
  return out;
}

}  // namespace ecodec
