#pragma once

#include <bit>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "ecodec/ecosystem.hpp"
#include "ecodec/world.hpp"

namespace ecodec {

struct TopologyEdge {
  HabitatId source;
  HabitatId target;
  double probability{0.0};

  bool operator==(const TopologyEdge&) const = default;
};

struct TopologySnapshot {
  Tick tick{0};
  std::map<HabitatId, std::vector<CommunityId>> nodes;  // habitat -> community labels
  std::vector<TopologyEdge> edges;

  bool operator==(const TopologySnapshot&) const = default;
};

inline TopologySnapshot topology_snapshot(const Ecosystem& e) {
  TopologySnapshot s;
  s.tick = e.tick;
  for (const auto& [uid, u] : e.users) s.nodes[u.habitat] = u.communities;
  for (const auto& [id, h] : e.habitats) {
    s.nodes.try_emplace(id);
    for (const auto& [t, c] : h.connections)
      if (c.probability > 0.0) s.edges.push_back({id, t, c.probability});
  }
  return s;
}

struct Alignment {
  double intra_mean{0.0};
  double inter_mean{0.0};
  double ratio{0.0};
};

inline constexpr double kAlignmentEpsilon = 1e-9;

/// Mean link probability over ordered habitat pairs that share a community
/// versus pairs that share none. Missing links count as probability 0.
inline Alignment community_alignment(const TopologySnapshot& s,
                                     const std::map<HabitatId, std::vector<CommunityId>>& ground_truth) {
  if (s.nodes.empty()) throw ArgumentError("community_alignment: empty snapshot");
  std::map<std::pair<HabitatId, HabitatId>, double> p;
  for (const auto& e : s.edges) p[{e.source, e.target}] = e.probability;

  auto labels = [&](HabitatId h) -> const std::vector<CommunityId>& {
    static const std::vector<CommunityId> none;
    auto it = ground_truth.find(h);
    return it == ground_truth.end() ? none : it->second;
  };
  double intra_sum = 0.0, inter_sum = 0.0;
  std::size_t intra_n = 0, inter_n = 0;
  for (const auto& [a, _] : s.nodes) {
    for (const auto& [b, __] : s.nodes) {
      if (a == b) continue;
      const auto& la = labels(a);
      const auto& lb = labels(b);
      std::vector<CommunityId> shared;
      std::set_intersection(la.begin(), la.end(), lb.begin(), lb.end(), std::back_inserter(shared));
      auto it = p.find({a, b});
      const double prob = it == p.end() ? 0.0 : it->second;
      if (shared.empty()) {
        inter_sum += prob;
        ++inter_n;
      } else {
        intra_sum += prob;
        ++intra_n;
      }
    }
  }
  Alignment out;
  out.intra_mean = intra_n ? intra_sum / static_cast<double>(intra_n) : 0.0;
  out.inter_mean = inter_n ? inter_sum / static_cast<double>(inter_n) : 0.0;
  out.ratio = out.intra_mean / std::max(out.inter_mean, kAlignmentEpsilon);
  return out;
}

struct FragmentationReport {
  std::size_t components{0};
  std::vector<HabitatId> isolated;
  std::vector<std::vector<HabitatId>> component_members;
};

/// Connected components of the undirected strong-edge graph (same edge rule
/// as cluster_of).
inline FragmentationReport fragmentation_report(const TopologySnapshot& s, double cluster_edge_threshold) {
  std::map<HabitatId, std::vector<HabitatId>> adj;
  for (const auto& [id, _] : s.nodes) adj[id];
  for (const auto& e : s.edges) {
    if (e.probability < cluster_edge_threshold) continue;
    adj[e.source].push_back(e.target);
    adj[e.target].push_back(e.source);
  }
  FragmentationReport r;
  std::set<HabitatId> seen;
  for (const auto& [start, _] : adj) {
    if (seen.count(start)) continue;
    std::vector<HabitatId> comp{start};
    seen.insert(start);
    for (std::size_t i = 0; i < comp.size(); ++i)
      for (HabitatId n : adj[comp[i]])
        if (seen.insert(n).second) comp.push_back(n);
    std::sort(comp.begin(), comp.end());
    if (comp.size() == 1) r.isolated.push_back(comp.front());
    r.component_members.push_back(std::move(comp));
  }
  r.components = r.component_members.size();
  return r;
}

struct EpochStat {
  std::size_t epoch{0};
  std::optional<double> median_generations;  // over outcomes that reached the target
  std::size_t successes{0};
  std::size_t failures{0};
};

struct OutcomeRecord {
  Tick tick{0};
  bool reached_target{false};
  std::uint32_t generations{0};
};

inline std::optional<double> median(std::vector<double> v) {
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Median generations-to-target per epoch of `epoch_length` ticks, over ticks
/// 1..total_ticks. Outcomes that missed the target are counted as failures.
inline std::vector<EpochStat> acceleration_curve(const std::vector<OutcomeRecord>& outcomes, Tick total_ticks,
                                                 Tick epoch_length) {
  if (outcomes.empty() || total_ticks == 0) throw ArgumentError("acceleration_curve: empty timeline");
  if (epoch_length == 0 || total_ticks % epoch_length != 0)
    throw ArgumentError("acceleration_curve: epoch length must divide the timeline length");
  const std::size_t epochs = total_ticks / epoch_length;
  std::vector<std::vector<double>> gens(epochs);
  std::vector<EpochStat> out(epochs);
  for (std::size_t i = 0; i < epochs; ++i) out[i].epoch = i;
  for (const auto& o : outcomes) {
    if (o.tick < 1 || o.tick > total_ticks) continue;
    const std::size_t idx = (o.tick - 1) / epoch_length;
    if (o.reached_target) {
      gens[idx].push_back(o.generations);
      ++out[idx].successes;
    } else {
      ++out[idx].failures;
    }
  }
  for (std::size_t i = 0; i < epochs; ++i) out[i].median_generations = median(std::move(gens[i]));
  return out;
}

inline std::vector<OutcomeRecord> outcome_records(const std::vector<RequestOutcome>& outcomes) {
  std::vector<OutcomeRecord> out;
  out.reserve(outcomes.size());
  for (const auto& o : outcomes) out.push_back({o.tick, o.reached_target, o.generations});
  return out;
}

struct AbundanceDistribution {
  std::map<GeneId, std::size_t> copies;           // only genes held somewhere
  std::map<std::uint32_t, std::size_t> histogram;  // floor(log2(copies)) -> gene count
};

/// Descriptive only: how many habitats hold each gene.
inline AbundanceDistribution abundance_distribution(const Ecosystem& e) {
  AbundanceDistribution d;
  for (const auto& [_, h] : e.habitats)
    for (const auto& [g, __] : h.pool) ++d.copies[g];
  for (const auto& [_, n] : d.copies) ++d.histogram[static_cast<std::uint32_t>(std::bit_width(n) - 1)];
  return d;
}

struct MetricsRow {
  Tick tick{0};
  Tick clock{0};
  std::size_t requests{0};
  std::size_t executed{0};
  std::size_t reached_target{0};
  std::optional<double> median_generations;
  Alignment alignment;
  std::size_t components{0};
  std::size_t isolated{0};
  std::size_t connections{0};
  std::size_t pool_occupancy{0};
  std::size_t distinct_genes{0};
};

inline std::map<HabitatId, std::vector<CommunityId>> community_labels(const Ecosystem& e) {
  std::map<HabitatId, std::vector<CommunityId>> out;
  for (const auto& [_, u] : e.users) out[u.habitat] = u.communities;
  return out;
}

/// Metrics at the current tick over the outcomes of the interval just ended.
inline MetricsRow metrics_row(const Ecosystem& e, const std::vector<RequestOutcome>& interval) {
  MetricsRow row;
  row.tick = e.tick;
  row.clock = e.clock;
  row.requests = interval.size();
  std::vector<double> gens;
  for (const auto& o : interval) {
    if (o.status == OutcomeStatus::executed) ++row.executed;
    if (o.reached_target) {
      ++row.reached_target;
      gens.push_back(o.generations);
    }
  }
  row.median_generations = median(std::move(gens));
  const auto topo = topology_snapshot(e);
  row.alignment = community_alignment(topo, community_labels(e));
  const auto frag = fragmentation_report(topo, e.scenario.habitat.cluster_edge_threshold);
  row.components = frag.components;
  row.isolated = frag.isolated.size();
  row.connections = topo.edges.size();
  const auto ab = abundance_distribution(e);
  row.distinct_genes = ab.copies.size();
  for (const auto& [_, n] : ab.copies) row.pool_occupancy += n;
  return row;
}

}  // namespace ecodec
