#pragma once

#include <string>

#include <json.hpp>

#include "ecodec/errors.hpp"
#include "ecodec/scenario.hpp"
#include "ecodec/world.hpp"

namespace ecodec {

inline constexpr const char* kSnapshotVersion = "ecodec-snapshot/1";

namespace detail {

using nlohmann::json;

template <typename Tag>
json ids_to_json(const std::vector<StrongId<Tag>>& ids) {
  json a = json::array();
  for (auto id : ids) a.push_back(id.value);
  return a;
}

template <typename Tag>
std::vector<StrongId<Tag>> ids_from_json(const json& a) {
  std::vector<StrongId<Tag>> out;
  for (const auto& v : a) out.emplace_back(v.get<std::uint64_t>());
  return out;
}

inline json request_to_json(const Request& r) {
  json wants = json::array();
  for (const auto& [a, w] : r.wants) wants.push_back({a, w});
  return {{"issuer", r.issuer.value}, {"wants", std::move(wants)}};
}

inline Request request_from_json(const json& j) {
  Request r;
  r.issuer = UserId(j.at("issuer").get<std::uint64_t>());
  for (const auto& p : j.at("wants")) r.wants[p.at(0).get<AttributeId>()] = p.at(1).get<double>();
  return r;
}

inline json geneset_to_json(const GeneSet& gs) {
  return {{"members", ids_to_json(gs.members)}, {"provenance", ids_to_json(gs.provenance)}};
}

inline GeneSet geneset_from_json(const json& j) {
  return GeneSet{ids_from_json<GeneTag>(j.at("members")), ids_from_json<HabitatTag>(j.at("provenance"))};
}

inline json habitat_to_json(const Habitat& h) {
  json conns = json::array();
  for (const auto& [t, c] : h.connections) conns.push_back({t.value, c.probability});
  json pool = json::array();
  for (const auto& [g, s] : h.pool)
    pool.push_back({{"gene", g.value},
                    {"unused", s.unused_request_count},
                    {"escapes", s.escapes_remaining},
                    {"arrived_at", s.arrived_at},
                    {"arrived_from", s.arrived_from.value}});
  json archive = json::array();
  for (const auto& e : h.archive)
    archive.push_back({{"set", geneset_to_json(e.set)},
                       {"request", request_to_json(e.request)},
                       {"registered_at", e.registered_at}});
  json recent = json::array();
  for (const auto& r : h.recent_requests) recent.push_back(request_to_json(r));
  return {{"id", h.id.value},     {"owner", h.owner.value}, {"connections", std::move(conns)},
          {"pool", std::move(pool)}, {"archive", std::move(archive)}, {"recent_requests", std::move(recent)}};
}

inline Habitat habitat_from_json(const json& j) {
  Habitat h;
  h.id = HabitatId(j.at("id").get<std::uint64_t>());
  h.owner = UserId(j.at("owner").get<std::uint64_t>());
  for (const auto& c : j.at("connections")) {
    const HabitatId t(c.at(0).get<std::uint64_t>());
    h.connections.emplace(t, Connection{t, c.at(1).get<double>()});
  }
  for (const auto& p : j.at("pool")) {
    GeneUsageState s;
    s.gene = GeneId(p.at("gene").get<std::uint64_t>());
    s.unused_request_count = p.at("unused").get<std::uint32_t>();
    s.escapes_remaining = p.at("escapes").get<std::uint32_t>();
    s.arrived_at = p.at("arrived_at").get<Tick>();
    s.arrived_from = HabitatId(p.at("arrived_from").get<std::uint64_t>());
    h.pool.emplace(s.gene, s);
  }
  for (const auto& a : j.at("archive"))
    h.archive.push_back({geneset_from_json(a.at("set")), request_from_json(a.at("request")),
                         a.at("registered_at").get<Tick>()});
  for (const auto& r : j.at("recent_requests")) h.recent_requests.push_back(request_from_json(r));
  return h;
}

}  // namespace detail

/// Full simulation state (event log excluded) as a JSON document.
inline nlohmann::json snapshot_to_json(const Ecosystem& e) {
  using nlohmann::json;
  json genes = json::array();
  for (const auto& [id, g] : e.registry.all())
    genes.push_back({{"id", id.value}, {"provides", g.provides}, {"cost", g.cost}, {"origin", g.origin.value}});
  json communities = json::array();
  for (const auto& [id, c] : e.communities)
    communities.push_back({{"id", id.value},
                           {"vocabulary", c.vocabulary},
                           {"request_size_range", {c.request_size.min, c.request_size.max}}});
  json users = json::array();
  for (const auto& [id, u] : e.users)
    users.push_back({{"id", id.value},
                     {"communities", detail::ids_to_json(u.communities)},
                     {"habitat", u.habitat.value},
                     {"request_rate", u.request_rate}});
  json habitats = json::array();
  for (const auto& [_, h] : e.habitats) habitats.push_back(detail::habitat_to_json(h));
  json streams = json::object();
  for (const auto& [name, pos] : e.rng.positions()) streams[name] = pos;
  return json{
      {"version", kSnapshotVersion},
      {"scenario", scenario_to_json(e.scenario)},
      {"tick", e.tick},
      {"clock", e.clock},
      {"next_gene_id", e.next_gene_id},
      {"next_user_id", e.next_user_id},
      {"rng", {{"seed", e.rng.seed()}, {"streams", std::move(streams)}}},
      {"registry", std::move(genes)},
      {"communities", std::move(communities)},
      {"users", std::move(users)},
      {"habitats", std::move(habitats)},
  };
}

inline std::string snapshot_save(const Ecosystem& e) { return snapshot_to_json(e).dump(1); }

/// Every gene, habitat and user reference must resolve. Throws ValidationError.
inline void check_integrity(const Ecosystem& e) {
  for (const auto& [hid, h] : e.habitats) {
    for (const auto& [g, _] : h.pool)
      if (!e.registry.contains(g))
        throw ValidationError("habitat " + to_string(hid) + ": pool references unknown gene " + to_string(g));
    for (const auto& a : h.archive)
      for (GeneId g : a.set.members)
        if (!e.registry.contains(g))
          throw ValidationError("habitat " + to_string(hid) + ": archive references unknown gene " + to_string(g));
    for (const auto& [t, c] : h.connections) {
      if (!e.habitats.count(t))
        throw ValidationError("habitat " + to_string(hid) + ": connection to unknown habitat " + to_string(t));
      if (t == hid) throw ValidationError("habitat " + to_string(hid) + ": self-connection");
      if (!(c.probability >= 0.0 && c.probability <= 1.0))
        throw ValidationError("habitat " + to_string(hid) + ": connection probability out of range");
    }
  }
  for (const auto& [uid, u] : e.users)
    if (!e.habitats.count(u.habitat))
      throw ValidationError("user " + to_string(uid) + ": missing habitat " + to_string(u.habitat));
}

/// Runtime invariant check; failures are internal errors, not bad input.
inline void verify_invariants(const Ecosystem& e) {
  try {
    check_integrity(e);
  } catch (const ValidationError& err) {
    throw InvariantViolation(err.what());
  }
  if (e.users.size() != e.habitats.size()) throw InvariantViolation("users and habitats out of one-to-one correspondence");
  for (const auto& [uid, u] : e.users)
    if (e.habitat(u.habitat).owner != uid)
      throw InvariantViolation("habitat " + to_string(u.habitat) + " not owned by user " + to_string(uid));
}

inline Ecosystem snapshot_load(const std::string& text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ValidationError(std::string("snapshot: malformed JSON: ") + err.what());
  }
  if (!j.is_object() || !j.contains("version") || j["version"] != kSnapshotVersion)
    throw ValidationError(std::string("snapshot: version mismatch (expected \"") + kSnapshotVersion + "\")");

  Ecosystem e;
  try {
    e.scenario = parse_scenario(j.at("scenario").dump());
    e.tick = j.at("tick").get<Tick>();
    e.clock = j.at("clock").get<Tick>();
    e.next_gene_id = j.at("next_gene_id").get<std::uint64_t>();
    e.next_user_id = j.at("next_user_id").get<std::uint64_t>();
    std::map<std::string, std::uint64_t> positions;
    for (const auto& [name, pos] : j.at("rng").at("streams").items()) positions[name] = pos.get<std::uint64_t>();
    e.rng = RngSource::restore(j.at("rng").at("seed").get<std::uint64_t>(), positions);
    for (const auto& g : j.at("registry")) {
      Gene gene;
      gene.id = GeneId(g.at("id").get<std::uint64_t>());
      gene.provides = g.at("provides").get<std::vector<AttributeId>>();
      gene.cost = g.at("cost").get<double>();
      gene.origin = HabitatId(g.at("origin").get<std::uint64_t>());
      e.registry.add(std::move(gene));
    }
    for (const auto& c : j.at("communities")) {
      Community comm;
      comm.id = CommunityId(c.at("id").get<std::uint64_t>());
      comm.vocabulary = c.at("vocabulary").get<std::vector<AttributeId>>();
      comm.request_size = {c.at("request_size_range").at(0).get<std::uint32_t>(),
                           c.at("request_size_range").at(1).get<std::uint32_t>()};
      e.communities.emplace(comm.id, std::move(comm));
    }
    for (const auto& u : j.at("users")) {
      User user;
      user.id = UserId(u.at("id").get<std::uint64_t>());
      user.communities = detail::ids_from_json<CommunityTag>(u.at("communities"));
      user.habitat = HabitatId(u.at("habitat").get<std::uint64_t>());
      user.request_rate = u.at("request_rate").get<double>();
      e.users.emplace(user.id, std::move(user));
    }
    for (const auto& h : j.at("habitats")) {
      Habitat hab = detail::habitat_from_json(h);
      e.habitats.emplace(hab.id, std::move(hab));
    }
  } catch (const json::exception& err) {
    throw ValidationError(std::string("snapshot: ") + err.what());
  } catch (const ArgumentError& err) {
    throw ValidationError(std::string("snapshot: ") + err.what());
  }
  check_integrity(e);
  return e;
}

}  // namespace ecodec
