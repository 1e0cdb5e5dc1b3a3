#pragma once

#include <algorithm>
#include <deque>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ecodec/habitat.hpp"
#include "ecodec/world.hpp"

namespace ecodec {

// Habitat operations that touch the wider world. Each one mutates only the
// habitat it is invoked on and returns the cross-habitat consequences as
// effects; the event loop applies them with apply_effects().

struct GeneArrival {
  HabitatId from;
  HabitatId to;
  GeneId gene;
  std::string cause;                   // copy | set_copy | escape
  std::uint32_t carried_escapes{0};    // escape only: budget left after this move
};

struct GeneSetArrival {
  HabitatId from;
  HabitatId to;
  GeneSet set;
  Request request;
};

/// Strengthen source->target if that connection exists.
struct ReverseReinforcement {
  HabitatId source;
  HabitatId target;
};

using Effect = std::variant<GeneArrival, GeneSetArrival, ReverseReinforcement>;

struct Migration {
  std::vector<MigrationAttempt> attempts;
  std::vector<Effect> effects;
};

/// Strong-edge adjacency: a-b joined when max(p(a->b), p(b->a)) >= threshold.
inline std::map<HabitatId, std::vector<HabitatId>> strong_adjacency(const Ecosystem& e, double threshold) {
  std::map<HabitatId, std::vector<HabitatId>> adj;
  for (const auto& [id, h] : e.habitats) {
    adj[id];
    for (const auto& [t, c] : h.connections) {
      if (c.probability >= threshold && e.habitats.count(t)) {
        adj[id].push_back(t);
        adj[t].push_back(id);
      }
    }
  }
  return adj;
}

inline std::set<HabitatId> cluster_of(const Ecosystem& e, HabitatId start) {
  const auto adj = strong_adjacency(e, e.scenario.habitat.cluster_edge_threshold);
  std::set<HabitatId> seen{start};
  std::deque<HabitatId> frontier{start};
  while (!frontier.empty()) {
    const HabitatId cur = frontier.front();
    frontier.pop_front();
    auto it = adj.find(cur);
    if (it == adj.end()) continue;
    for (HabitatId n : it->second)
      if (seen.insert(n).second) frontier.push_back(n);
  }
  return seen;
}

inline GeneUsageState fresh_usage_state(const Ecosystem& e, HabitatId at, GeneId g, HabitatId from) {
  GeneUsageState s;
  s.gene = g;
  s.escapes_remaining = escape_range(cluster_of(e, at).size());
  s.arrived_at = e.clock;
  s.arrived_from = from;
  return s;
}

/// Copy `g` (already in `from`'s pool) across each outgoing connection that
/// fires. The source keeps its copy.
inline Migration migrate_copy(Ecosystem& e, HabitatId from, GeneId g) {
  Habitat& h = e.habitat(from);
  Migration m;
  m.attempts = draw_migrations(h, e.habitat_rng(from));
  for (const auto& a : m.attempts) {
    e.log(EventKind::migrate_gene, from.value, a.target.value, g.value, a.delivered ? 1.0 : 0.0);
    if (a.delivered) m.effects.emplace_back(GeneArrival{from, a.target, g, "copy", 0});
  }
  return m;
}

inline Migration migrate_copy(Ecosystem& e, HabitatId from, const GeneSet& gs, const Request& r) {
  Habitat& h = e.habitat(from);
  Migration m;
  m.attempts = draw_migrations(h, e.habitat_rng(from));
  for (const auto& a : m.attempts) {
    e.log(EventKind::migrate_set, from.value, a.target.value, kNoId, a.delivered ? 1.0 : 0.0,
          std::to_string(gs.size()));
    if (a.delivered) m.effects.emplace_back(GeneSetArrival{from, a.target, gs, r});
  }
  return m;
}

/// Put a newly deployed gene into its owner's pool and start its migration.
/// Deploying a gene the habitat already holds is a logged no-op.
inline Migration deploy_gene(Ecosystem& e, HabitatId at, const Gene& g) {
  if (g.origin != at) throw ArgumentError("deploy_gene: gene " + to_string(g.id) + " does not originate here");
  Habitat& h = e.habitat(at);
  if (h.has_gene(g.id)) {
    e.log(EventKind::deploy_duplicate, at.value, kNoId, g.id.value);
    return {};
  }
  if (!e.registry.contains(g.id)) e.registry.add(g);
  h.pool.emplace(g.id, fresh_usage_state(e, at, g.id, at));
  e.log(EventKind::pool_insert, at.value, at.value, g.id.value, 0.0, "deploy");
  return migrate_copy(e, at, g.id);
}

namespace detail {

inline void insert_arrival(Ecosystem& e, Habitat& target, HabitatId from, GeneId g, const char* cause) {
  if (target.has_gene(g)) return;
  target.pool.emplace(g, fresh_usage_state(e, target.id, g, from));
  e.log(EventKind::pool_insert, target.id.value, from.value, g.value, 0.0, cause);
}

}  // namespace detail

inline void apply_effect(Ecosystem& e, const Effect& effect) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, GeneArrival>) {
          Habitat& target = e.habitat(x.to);
          if (x.cause == "escape") {
            if (target.has_gene(x.gene)) {
              e.log(EventKind::escape_absorbed, x.to.value, x.from.value, x.gene.value);
              return;
            }
            GeneUsageState s;
            s.gene = x.gene;
            s.escapes_remaining = x.carried_escapes;
            s.arrived_at = e.clock;
            s.arrived_from = x.from;
            target.pool.emplace(x.gene, s);
            e.log(EventKind::pool_insert, x.to.value, x.from.value, x.gene.value, 0.0, "escape");
          } else {
            detail::insert_arrival(e, target, x.from, x.gene, x.cause.c_str());
          }
        } else if constexpr (std::is_same_v<T, GeneSetArrival>) {
          Habitat& target = e.habitat(x.to);
          archive_insert(target, x.set, x.request, e.clock, e.scenario.habitat.archive_cap);
          for (GeneId g : x.set.members) detail::insert_arrival(e, target, x.from, g, "set_copy");
        } else {
          Habitat& source = e.habitat(x.source);
          auto it = source.connections.find(x.target);
          if (it == source.connections.end()) return;
          it->second = hebbian_reinforce(it->second, e.scenario.habitat.delta_plus);
          e.log(EventKind::connection_reinforce, x.source.value, x.target.value, kNoId, it->second.probability,
                "reverse");
        }
      },
      effect);
}

inline void apply_effects(Ecosystem& e, const std::vector<Effect>& effects) {
  for (const auto& eff : effects) apply_effect(e, eff);
}

/// Migrate an executed solution and feed success back to the habitats named in
/// its provenance: strengthen (or open) h->p, and strengthen p->h if present.
inline std::vector<Effect> execution_feedback(Ecosystem& e, HabitatId at, const GeneSet& gs, const Request& r) {
  const auto& hp = e.scenario.habitat;
  auto effects = migrate_copy(e, at, gs, r).effects;
  Habitat& h = e.habitat(at);
  for (HabitatId p : gs.provenance) {
    if (p == at || !e.habitats.count(p)) continue;
    auto it = h.connections.find(p);
    if (it == h.connections.end()) {
      h.connections.emplace(p, Connection{p, hp.p_init});
      e.log(EventKind::connection_create, at.value, p.value, kNoId, hp.p_init, "multi_hop");
    } else {
      Connection c = hebbian_reinforce(it->second, hp.delta_plus);
      c.probability = std::max(c.probability, hp.p_init);
      it->second = c;
      e.log(EventKind::connection_reinforce, at.value, p.value, kNoId, c.probability, "provenance");
    }
    effects.emplace_back(ReverseReinforcement{p, at});
  }
  return effects;
}

/// Weaken every outgoing connection of `at` whose target is not in `credited`.
inline void decay_connections(Ecosystem& e, HabitatId at, const std::set<HabitatId>& credited) {
  const auto& hp = e.scenario.habitat;
  Habitat& h = e.habitat(at);
  for (auto& [t, c] : h.connections) {
    if (credited.count(t)) continue;
    const auto d = hebbian_decay(c, hp.delta_minus, hp.prune_threshold);
    c = d.connection;
    e.log(EventKind::connection_decay, at.value, t.value, kNoId, c.probability, d.prune ? "prune_pending" : "");
  }
}

/// Remove connections that fell below the prune threshold.
inline void maintenance_pass(Ecosystem& e) {
  const double threshold = e.scenario.habitat.prune_threshold;
  for (auto& [id, h] : e.habitats) {
    for (auto it = h.connections.begin(); it != h.connections.end();) {
      if (it->second.probability < threshold) {
        e.log(EventKind::connection_prune, id.value, it->first.value, kNoId, it->second.probability);
        it = h.connections.erase(it);
      } else {
        ++it;
      }
    }
  }
}

/// Idle accounting after a request at `at`. Genes left out of `solution` age;
/// at the threshold they escape to a random connected habitat while budget
/// remains, otherwise they are deleted.
inline std::vector<Effect> usage_tick(Ecosystem& e, HabitatId at, const GeneSet& solution) {
  const auto& hp = e.scenario.habitat;
  Habitat& h = e.habitat(at);
  std::vector<Effect> effects;
  std::vector<GeneId> expiring;
  for (auto& [g, state] : h.pool) {
    if (solution.contains(g)) {
      state.unused_request_count = 0;
      continue;
    }
    if (++state.unused_request_count >= hp.unused_threshold) expiring.push_back(g);
  }
  for (GeneId g : expiring) {
    const GeneUsageState state = h.pool.at(g);
    std::vector<HabitatId> eligible;
    for (const auto& [t, c] : h.connections)
      if (c.probability > 0.0) eligible.push_back(t);
    h.pool.erase(g);
    if (state.escapes_remaining > 0 && !eligible.empty()) {
      const HabitatId dest = eligible[e.habitat_rng(at).below(eligible.size())];
      e.log(EventKind::pool_remove, at.value, dest.value, g.value, 0.0, "escape");
      effects.emplace_back(GeneArrival{at, dest, g, "escape", state.escapes_remaining - 1});
    } else {
      e.log(EventKind::pool_remove, at.value, kNoId, g.value, 0.0, "deletion");
    }
  }
  return effects;
}

}  // namespace ecodec
