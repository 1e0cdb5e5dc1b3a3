#pragma once

// Hand-rolled random generators shared by the test suites.

#include <cstdint>
#include <string>
#include <vector>

#include "ecodec/ecodec.hpp"

namespace testing_support {

using namespace ecodec;

struct Gen {
  RngStream rng;

  explicit Gen(std::uint64_t seed, const char* name = "test") : rng(RngStream::from_seed(seed, name)) {}

  std::uint64_t below(std::uint64_t n) { return rng.below(n); }
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return rng.between(lo, hi); }
  double uniform() { return rng.uniform(); }
  double uniform(double lo, double hi) { return rng.uniform(lo, hi); }
  bool coin() { return rng.uniform() < 0.5; }

  std::vector<AttributeId> attributes(std::size_t n, std::uint32_t vocab) {
    std::vector<AttributeId> all(vocab);
    for (std::uint32_t a = 0; a < vocab; ++a) all[a] = a;
    for (std::size_t k = 0; k < n && k < all.size(); ++k) std::swap(all[k], all[k + rng.below(all.size() - k)]);
    all.resize(std::min<std::size_t>(n, vocab));
    normalize_set(all);
    return all;
  }

  /// Registry of genes 1..n, each providing 1..max_attrs attributes from [0, vocab).
  GeneRegistry registry(std::size_t n, std::uint32_t vocab, std::uint32_t max_attrs = 3) {
    GeneRegistry reg;
    for (std::size_t i = 1; i <= n; ++i) {
      Gene g;
      g.id = GeneId(i);
      g.provides = attributes(between(1, max_attrs), vocab);
      g.cost = uniform(0.5, 2.0);
      g.origin = HabitatId(0);
      reg.add(std::move(g));
    }
    return reg;
  }

  Request request(std::uint32_t vocab, std::size_t lo, std::size_t hi, bool jitter = false) {
    Request r;
    r.issuer = UserId(0);
    for (AttributeId a : attributes(between(lo, hi), vocab)) r.wants[a] = jitter ? uniform(0.5, 1.5) : 1.0;
    return r;
  }

  GeneSet subset(const std::vector<GeneId>& pool, double p = 0.5) {
    GeneSet s;
    for (GeneId g : pool)
      if (uniform() < p) s.members.push_back(g);
    s.provenance = {HabitatId(below(5))};
    return s;
  }

  FitnessValue fitness_value(int grid = 0) {
    // a coarse grid makes ties (and hence the equality branches) common
    FitnessValue f;
    if (grid > 0) {
      f.coverage = static_cast<double>(below(grid + 1)) / grid;
      f.total_cost = static_cast<double>(below(grid + 1));
    } else {
      f.coverage = uniform();
      f.total_cost = uniform(0.0, 10.0);
    }
    f.scalar = f.coverage;
    return f;
  }
};

inline std::vector<GeneId> ids_upto(std::size_t n) {
  std::vector<GeneId> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(GeneId(i));
  return out;
}

inline Gene make_gene(std::uint64_t id, std::vector<AttributeId> provides, double cost = 1.0,
                      std::uint64_t origin = 0) {
  return Gene{GeneId(id), std::move(provides), cost, HabitatId(origin)};
}

inline Request make_request(std::initializer_list<std::pair<const AttributeId, double>> wants,
                            std::uint64_t issuer = 0) {
  Request r;
  r.wants = wants;
  r.issuer = UserId(issuer);
  return r;
}

/// A small hand-wired world: `n` single-community users, no links, no genes.
inline Ecosystem bare_world(std::size_t n, std::uint32_t vocab = 8, std::uint64_t seed = 1) {
  ScenarioConfig s;
  s.community_count = 1;
  s.community_vocab_size = vocab;
  s.users_per_community = static_cast<std::uint32_t>(n);
  s.k_init = 0;
  s.genes_per_user = 1;
  s.request_size = {1, std::min<std::uint32_t>(3, vocab)};
  s.gene_attributes = {1, 1};
  Ecosystem e = build_ecosystem(s, seed);
  for (auto& [_, h] : e.habitats) h.pool.clear();
  e.registry = GeneRegistry{};
  e.event_log.clear();
  return e;
}

inline void link(Ecosystem& e, std::uint64_t from, std::uint64_t to, double p) {
  e.habitat(HabitatId(from)).connections[HabitatId(to)] = Connection{HabitatId(to), p};
}

}  // namespace testing_support
