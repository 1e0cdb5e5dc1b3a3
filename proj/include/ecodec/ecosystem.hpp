#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ecodec/evolution.hpp"
#include "ecodec/habitat_ops.hpp"
#include "ecodec/scenario.hpp"
#include "ecodec/world.hpp"

namespace ecodec {

enum class OutcomeStatus { executed, not_executed, no_genes };

inline const char* to_string(OutcomeStatus s) {
  switch (s) {
    case OutcomeStatus::executed: return "executed";
    case OutcomeStatus::not_executed: return "not_executed";
    case OutcomeStatus::no_genes: return "no_genes";
  }
  return "?";
}

struct RequestOutcome {
  Tick tick{0};
  Tick clock{0};  // clock value the request was handled at
  UserId user;
  HabitatId habitat;
  Request request;
  GeneSet solution;
  FitnessValue fitness;
  std::uint32_t generations{0};
  bool reached_target{false};
  OutcomeStatus status{OutcomeStatus::no_genes};

  bool failed() const { return status != OutcomeStatus::executed; }
  bool operator==(const RequestOutcome&) const = default;
};

namespace detail {

/// `count` distinct picks from `items`, in draw order.
template <typename T>
std::vector<T> sample_distinct(std::vector<T> items, std::size_t count, RngStream& rng) {
  count = std::min(count, items.size());
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t j = k + rng.below(items.size() - k);
    std::swap(items[k], items[j]);
  }
  items.resize(count);
  return items;
}

inline void add_user(Ecosystem& e, std::vector<CommunityId> communities, double rate) {
  normalize_set(communities);
  const UserId uid(e.next_user_id++);
  const HabitatId hid(uid.value);
  e.users.emplace(uid, User{uid, std::move(communities), hid, rate});
  Habitat h;
  h.id = hid;
  h.owner = uid;
  e.habitats.emplace(hid, std::move(h));
}

inline Gene random_gene(Ecosystem& e, const User& u, RngStream& rng) {
  const auto& s = e.scenario;
  const CommunityId c = u.communities[rng.below(u.communities.size())];
  const auto& vocab = e.communities.at(c).vocabulary;
  const auto n = rng.between(s.gene_attributes.min, std::min<std::uint64_t>(s.gene_attributes.max, vocab.size()));
  Gene g;
  g.id = GeneId(e.next_gene_id++);
  g.provides = sample_distinct(vocab, n, rng);
  normalize_set(g.provides);
  g.cost = rng.uniform(s.gene_cost.min, s.gene_cost.max);
  g.origin = u.habitat;
  return g;
}

}  // namespace detail

/// Deploy `g` at its origin habitat and apply the resulting migrations.
inline std::vector<MigrationAttempt> deploy(Ecosystem& e, const Gene& g) {
  auto m = deploy_gene(e, g.origin, g);
  apply_effects(e, m.effects);
  return m.attempts;
}

inline Ecosystem build_ecosystem(const ScenarioConfig& scenario, std::uint64_t seed) {
  validate_scenario(scenario);
  Ecosystem e;
  e.scenario = scenario;
  if (e.scenario.vocabulary_size == 0) e.scenario.vocabulary_size = scenario.required_vocabulary();
  e.rng = RngSource(seed);
  const auto& s = e.scenario;

  for (std::uint32_t c = 0; c < s.community_count; ++c) {
    e.communities.emplace(CommunityId(c), Community{CommunityId(c), s.community_vocabulary(c), s.request_size});
  }
  for (std::uint32_t c = 0; c < s.community_count; ++c)
    for (std::uint32_t i = 0; i < s.users_per_community; ++i) detail::add_user(e, {CommunityId(c)}, s.request_rate);

  // initial links, biased toward users sharing a community with weight b_init
  RngStream& rng = e.rng.stream("build");
  const std::size_t k = std::min<std::size_t>(s.k_init, e.habitats.size() - 1);
  for (auto& [uid, u] : e.users) {
    std::vector<HabitatId> remaining;
    for (const auto& [vid, v] : e.users) {
      if (vid != uid) remaining.push_back(v.habitat);
    }
    Habitat& h = e.habitat(u.habitat);
    for (std::size_t pick = 0; pick < k; ++pick) {
      std::vector<std::size_t> same;
      for (std::size_t i = 0; i < remaining.size(); ++i) {
        const auto& other = e.users.at(UserId(remaining[i].value)).communities;
        std::vector<CommunityId> shared;
        std::set_intersection(u.communities.begin(), u.communities.end(), other.begin(), other.end(),
                              std::back_inserter(shared));
        if (!shared.empty()) same.push_back(i);
      }
      std::size_t idx;
      if (rng.bernoulli(s.b_init) && !same.empty()) idx = same[rng.below(same.size())];
      else idx = rng.below(remaining.size());
      const HabitatId t = remaining[idx];
      remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(idx));
      h.connections.emplace(t, Connection{t, s.habitat.p_init});
      e.log(EventKind::connection_create, h.id.value, t.value, kNoId, s.habitat.p_init, "initial");
    }
  }

  for (const auto& [uid, u] : e.users) {
    for (std::uint32_t j = 0; j < s.genes_per_user; ++j) deploy(e, detail::random_gene(e, u, rng));
  }
  return e;
}

/// How a new user's habitat is wired into the network.
struct RandomAttach {
  std::uint32_t k{3};
};
struct CloneConnections {
  UserId similar_user;
};
using JoinMode = std::variant<RandomAttach, CloneConnections>;

/// Add a user and habitat. The new pool merges the pools of every habitat it
/// is initially connected to (copies with fresh usage state).
inline HabitatId join_user(Ecosystem& e, std::vector<CommunityId> communities, const JoinMode& mode) {
  if (communities.empty()) throw ArgumentError("join_user: a user needs at least one community");
  for (CommunityId c : communities)
    if (!e.communities.count(c)) throw LookupError("join_user: unknown community " + to_string(c));
  const auto& hp = e.scenario.habitat;
  std::map<HabitatId, Connection> links;
  std::string note;
  if (const auto* clone = std::get_if<CloneConnections>(&mode)) {
    const User& similar = e.user(clone->similar_user);
    links = e.habitat(similar.habitat).connections;
    links[similar.habitat] = Connection{similar.habitat, hp.p_init};
    note = "clone:" + to_string(clone->similar_user);
  } else {
    const auto& random = std::get<RandomAttach>(mode);
    std::vector<HabitatId> all;
    for (const auto& [id, _] : e.habitats) all.push_back(id);
    for (HabitatId t : detail::sample_distinct(all, random.k, e.rng.stream("join")))
      links.emplace(t, Connection{t, hp.p_init});
    note = "random:" + std::to_string(random.k);
  }

  detail::add_user(e, std::move(communities), e.scenario.request_rate);
  const HabitatId hid(e.next_user_id - 1);
  Habitat& h = e.habitat(hid);
  h.connections = std::move(links);
  e.log(EventKind::user_join, hid.value, kNoId, kNoId, 0.0, note);
  for (const auto& [t, c] : h.connections)
    e.log(EventKind::connection_create, hid.value, t.value, kNoId, c.probability, "join");
  for (const auto& [t, _] : h.connections) {
    for (const auto& [g, __] : e.habitat(t).pool) {
      if (h.has_gene(g)) continue;
      h.pool.emplace(g, fresh_usage_state(e, hid, g, t));
      e.log(EventKind::pool_insert, hid.value, t.value, g.value, 0.0, "join");
    }
  }
  return hid;
}

inline Request generate_request(Ecosystem& e, const User& u, RngStream& rng) {
  const CommunityId c = u.communities[rng.below(u.communities.size())];
  const Community& comm = e.communities.at(c);
  const auto hi = std::min<std::uint64_t>(comm.request_size.max, comm.vocabulary.size());
  const auto lo = std::min<std::uint64_t>(comm.request_size.min, hi);
  const auto n = rng.between(lo, hi);
  Request r;
  r.issuer = u.id;
  for (AttributeId a : detail::sample_distinct(comm.vocabulary, n, rng)) {
    r.wants[a] = e.scenario.weight_jitter ? rng.uniform(0.5, 1.5) : 1.0;
  }
  return r;
}

/// Serve one request at the user's habitat: evolve, register, execute (or
/// count a failure), adapt connections, age idle genes, advance the clock.
inline RequestOutcome handle_request(Ecosystem& e, const User& u, const Request& r) {
  const auto& s = e.scenario;
  const HabitatId at = u.habitat;
  RequestOutcome out;
  out.tick = e.tick;
  out.clock = e.clock;
  out.user = u.id;
  out.habitat = at;
  out.request = r;

  note_request(e.habitat(at), r, s.habitat.recent_window);
  std::vector<Effect> effects;
  try {
    Habitat& h = e.habitat(at);
    const RngStream prng = e.habitat_rng(at).derive("population/" + std::to_string(e.clock));
    auto result = run_evolution(r, at, h.pool_ids(), h.archive, s.evolution, e.registry, prng);
    out.solution = std::move(result.best);
    out.fitness = result.best_fitness;
    out.generations = result.generations;
    out.reached_target = result.reached_target;
    out.status = out.fitness.coverage >= s.habitat.exec_threshold && !out.solution.empty()
                     ? OutcomeStatus::executed
                     : OutcomeStatus::not_executed;
  } catch (const NoGenesAvailable&) {
    out.status = OutcomeStatus::no_genes;
  }

  if (!out.solution.empty()) {
    register_geneset(e.habitat(at), out.solution, r, e.clock, s.habitat.archive_cap);
    e.log(EventKind::registered, at.value, kNoId, kNoId, out.fitness.coverage, std::to_string(out.solution.size()));
  }

  std::set<HabitatId> credited;
  if (out.status == OutcomeStatus::executed) {
    effects = execution_feedback(e, at, out.solution, r);
    const Habitat& h = e.habitat(at);
    credited.insert(out.solution.provenance.begin(), out.solution.provenance.end());
    for (GeneId g : out.solution.members) {
      auto it = h.pool.find(g);
      if (it != h.pool.end()) credited.insert(it->second.arrived_from);
    }
  }
  decay_connections(e, at, credited);
  apply_effects(e, effects);
  apply_effects(e, usage_tick(e, at, out.solution));

  e.log(EventKind::request, at.value, u.id.value, kNoId, out.fitness.coverage,
        std::string(to_string(out.status)) + ":" + std::to_string(out.generations));
  ++e.clock;
  return out;
}

/// One tick: join scheduled users, then each user (ascending id) issues a
/// request with probability request_rate; finally prune weak connections.
inline std::vector<RequestOutcome> step(Ecosystem& e) {
  ++e.tick;
  e.log(EventKind::tick, kNoId);
  for (const auto& j : e.scenario.joins) {
    if (j.tick != e.tick) continue;
    if (j.strategy == JoinStrategy::clone) join_user(e, j.communities, CloneConnections{j.similar_user});
    else join_user(e, j.communities, RandomAttach{j.k});
  }
  std::vector<RequestOutcome> outcomes;
  RngStream& issue = e.rng.stream("step");
  std::vector<UserId> ids;
  for (const auto& [id, _] : e.users) ids.push_back(id);
  for (UserId id : ids) {
    const User u = e.user(id);
    if (!issue.bernoulli(u.request_rate)) continue;
    const Request r = generate_request(e, u, e.rng.stream("user/" + to_string(id)));
    outcomes.push_back(handle_request(e, u, r));
  }
  maintenance_pass(e);
  return outcomes;
}

}  // namespace ecodec
