#pragma once

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "ecodec/gene_model.hpp"
#include "ecodec/habitat.hpp"
#include "ecodec/rng.hpp"
#include "ecodec/scenario.hpp"

namespace ecodec {

struct User {
  UserId id;
  std::vector<CommunityId> communities;  // sorted, non-empty
  HabitatId habitat;
  double request_rate{0.0};

  bool operator==(const User&) const = default;
};

struct Community {
  CommunityId id;
  std::vector<AttributeId> vocabulary;
  Range<std::uint32_t> request_size;

  bool operator==(const Community&) const = default;
};

enum class EventKind {
  tick,
  pool_insert,    // note: deploy | copy | set_copy | escape | join
  pool_remove,    // note: escape | deletion
  deploy_duplicate,
  migrate_gene,   // value: 1 delivered, 0 not
  migrate_set,
  escape_absorbed,
  registered,
  connection_create,
  connection_reinforce,
  connection_decay,
  connection_prune,
  request,
  user_join,
};

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::tick: return "tick";
    case EventKind::pool_insert: return "pool_insert";
    case EventKind::pool_remove: return "pool_remove";
    case EventKind::deploy_duplicate: return "deploy_duplicate";
    case EventKind::migrate_gene: return "migrate_gene";
    case EventKind::migrate_set: return "migrate_set";
    case EventKind::escape_absorbed: return "escape_absorbed";
    case EventKind::registered: return "registered";
    case EventKind::connection_create: return "connection_create";
    case EventKind::connection_reinforce: return "connection_reinforce";
    case EventKind::connection_decay: return "connection_decay";
    case EventKind::connection_prune: return "connection_prune";
    case EventKind::request: return "request";
    case EventKind::user_join: return "user_join";
  }
  return "?";
}

inline constexpr std::uint64_t kNoId = ~std::uint64_t{0};

struct Event {
  Tick tick{0};
  Tick clock{0};
  EventKind kind{EventKind::tick};
  std::uint64_t habitat{kNoId};
  std::uint64_t other{kNoId};
  std::uint64_t gene{kNoId};
  double value{0.0};
  std::string note;

  bool operator==(const Event&) const = default;
};

/// One whitespace-separated line: tick clock kind habitat other gene value note.
/// Absent ids print as "-"; values use 17 significant digits.
inline std::string format_event(const Event& e) {
  auto id = [](std::uint64_t v) { return v == kNoId ? std::string("-") : std::to_string(v); };
  char value[40];
  std::snprintf(value, sizeof value, "%.17g", e.value);
  std::string line = std::to_string(e.tick) + ' ' + std::to_string(e.clock) + ' ' + to_string(e.kind) + ' ' +
                     id(e.habitat) + ' ' + id(e.other) + ' ' + id(e.gene) + ' ' + value;
  line += ' ';
  line += e.note.empty() ? "-" : e.note;
  return line;
}

/// The whole simulated world. Habitat ids and user ids share numbering.
struct Ecosystem {
  ScenarioConfig scenario;
  std::map<CommunityId, Community> communities;
  std::map<UserId, User> users;
  std::map<HabitatId, Habitat> habitats;
  GeneRegistry registry;
  Tick clock{0};  // requests handled so far
  Tick tick{0};   // steps taken so far
  RngSource rng;
  std::uint64_t next_gene_id{1};
  std::uint64_t next_user_id{0};
  std::vector<Event> event_log;
  bool record_events{true};

  Habitat& habitat(HabitatId id) {
    auto it = habitats.find(id);
    if (it == habitats.end()) throw LookupError("unknown habitat " + to_string(id));
    return it->second;
  }
  const Habitat& habitat(HabitatId id) const {
    auto it = habitats.find(id);
    if (it == habitats.end()) throw LookupError("unknown habitat " + to_string(id));
    return it->second;
  }
  const User& user(UserId id) const {
    auto it = users.find(id);
    if (it == users.end()) throw LookupError("unknown user " + to_string(id));
    return it->second;
  }

  RngStream& habitat_rng(HabitatId id) { return rng.stream("habitat/" + to_string(id)); }

  void log(EventKind kind, std::uint64_t habitat, std::uint64_t other = kNoId, std::uint64_t gene = kNoId,
           double value = 0.0, std::string note = {}) {
    if (!record_events) return;
    event_log.push_back({tick, clock, kind, habitat, other, gene, value, std::move(note)});
  }

  /// Compares simulation state only (the event log is excluded).
  bool same_state(const Ecosystem& o) const {
    return scenario == o.scenario && communities == o.communities && users == o.users &&
           habitats == o.habitats && registry == o.registry && clock == o.clock && tick == o.tick &&
           rng == o.rng && next_gene_id == o.next_gene_id && next_user_id == o.next_user_id;
  }
};

}  // namespace ecodec
