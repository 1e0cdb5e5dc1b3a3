#pragma once

#include <bit>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "ecodec/evolution.hpp"
#include "ecodec/gene_model.hpp"
#include "ecodec/ids.hpp"

namespace ecodec {

struct HabitatParams {
  double delta_plus{0.1};
  double delta_minus{0.05};
  double prune_threshold{0.01};
  double p_init{0.1};
  std::uint32_t unused_threshold{5};
  double cluster_edge_threshold{0.2};
  std::size_t archive_cap{256};
  double exec_threshold{0.5};
  std::size_t recent_window{8};

  bool operator==(const HabitatParams&) const = default;
};

/// Directed migration link. Each direction of a habitat pair is a separate
/// Connection with its own probability.
struct Connection {
  HabitatId target;
  double probability{0.0};

  bool operator==(const Connection&) const = default;
};

struct GeneUsageState {
  GeneId gene;
  std::uint32_t unused_request_count{0};
  std::uint32_t escapes_remaining{0};
  Tick arrived_at{0};
  HabitatId arrived_from;  // equals the holding habitat for locally deployed genes

  bool operator==(const GeneUsageState&) const = default;
};

struct Habitat {
  HabitatId id;
  UserId owner;
  std::map<HabitatId, Connection> connections;
  std::map<GeneId, GeneUsageState> pool;
  std::vector<ArchiveEntry> archive;
  std::deque<Request> recent_requests;

  bool operator==(const Habitat&) const = default;

  std::vector<GeneId> pool_ids() const {
    std::vector<GeneId> ids;
    ids.reserve(pool.size());
    for (const auto& [g, _] : pool) ids.push_back(g);
    return ids;
  }

  bool has_gene(GeneId g) const { return pool.count(g) != 0; }

  std::optional<double> probability_to(HabitatId target) const {
    auto it = connections.find(target);
    if (it == connections.end()) return std::nullopt;
    return it->second.probability;
  }
};

inline Connection hebbian_reinforce(Connection c, double delta_plus = 0.1) {
  c.probability = std::clamp(c.probability + delta_plus * (1.0 - c.probability), 0.0, 1.0);
  return c;
}

struct DecayResult {
  Connection connection;
  bool prune{false};
};

/// Multiplicative weakening; `prune` is raised once the probability falls
/// below the threshold. Removal happens at the next maintenance pass.
inline DecayResult hebbian_decay(Connection c, double delta_minus = 0.05, double prune_threshold = 0.01) {
  c.probability = std::clamp(c.probability * (1.0 - delta_minus), 0.0, 1.0);
  return {c, c.probability < prune_threshold};
}

/// Escape migrations granted to a gene arriving in a cluster of the given size.
inline std::uint32_t escape_range(std::size_t cluster_size) {
  if (cluster_size < 1) throw ArgumentError("escape_range: cluster size must be positive");
  // ceil(log2(n + 1)) without floating point: bit width of n
  const auto bits = static_cast<std::uint32_t>(std::bit_width(cluster_size));
  return std::max<std::uint32_t>(2, bits);
}

/// Similarity of an archived request to the habitat's recent demand.
inline double recency_relevance(const Request& r, const std::deque<Request>& recent) {
  double best = 0.0;
  for (const auto& q : recent) best = std::max(best, request_similarity(r, q));
  return best;
}

/// Insert into the archive, enforcing the cap. An entry with the same members
/// is refreshed in place (provenance merged) instead of duplicated.
/// Returns false when an identical entry absorbed it.
inline bool archive_insert(Habitat& h, const GeneSet& gs, const Request& r, Tick now, std::size_t cap) {
  for (auto& e : h.archive) {
    if (e.set.members == gs.members) {
      e.set.provenance = set_union_of(e.set.provenance, gs.provenance);
      e.request = r;
      e.registered_at = now;
      return false;
    }
  }
  h.archive.push_back({gs, r, now});
  while (cap > 0 && h.archive.size() > cap) {
    std::size_t victim = 0;
    double worst = recency_relevance(h.archive[0].request, h.recent_requests);
    for (std::size_t i = 1; i < h.archive.size(); ++i) {
      const double rel = recency_relevance(h.archive[i].request, h.recent_requests);
      if (rel < worst || (rel == worst && h.archive[i].registered_at < h.archive[victim].registered_at)) {
        worst = rel;
        victim = i;
      }
    }
    h.archive.erase(h.archive.begin() + static_cast<std::ptrdiff_t>(victim));
  }
  return true;
}

/// Record a solution evolved at `h` and reset the idle counters of its genes.
inline void register_geneset(Habitat& h, const GeneSet& gs, const Request& r, Tick now, std::size_t cap) {
  if (gs.provenance.empty()) throw ArgumentError("register_geneset: gene-set without provenance");
  archive_insert(h, gs, r, now, cap);
  for (GeneId g : gs.members) {
    auto it = h.pool.find(g);
    if (it != h.pool.end()) it->second.unused_request_count = 0;
  }
}

inline void note_request(Habitat& h, const Request& r, std::size_t window) {
  h.recent_requests.push_back(r);
  while (h.recent_requests.size() > window) h.recent_requests.pop_front();
}

/// One Bernoulli draw per outgoing connection, in ascending target order.
struct MigrationAttempt {
  HabitatId target;
  bool delivered{false};

  bool operator==(const MigrationAttempt&) const = default;
};

inline std::vector<MigrationAttempt> draw_migrations(const Habitat& from, RngStream& rng) {
  std::vector<MigrationAttempt> out;
  out.reserve(from.connections.size());
  for (const auto& [target, c] : from.connections) out.push_back({target, rng.bernoulli(c.probability)});
  return out;
}

}  // namespace ecodec
