#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "ecodec/errors.hpp"
#include "ecodec/ids.hpp"

namespace ecodec {

/// Atomic unit of function. Copies of a gene at different habitats share
/// the same id; genes themselves never change after deployment.
struct Gene {
  GeneId id;
  std::vector<AttributeId> provides;  // sorted, unique, non-empty
  double cost{1.0};
  HabitatId origin;

  bool operator==(const Gene&) const = default;
};

/// Candidate solution: a set of gene ids plus the habitats where the set (or
/// a subset reused in it) was evolved. Both vectors are kept sorted/unique.
struct GeneSet {
  std::vector<GeneId> members;
  std::vector<HabitatId> provenance;

  bool operator==(const GeneSet&) const = default;

  bool contains(GeneId g) const {
    return std::binary_search(members.begin(), members.end(), g);
  }
  std::size_t size() const { return members.size(); }
  bool empty() const { return members.empty(); }

  std::uint64_t id_sum() const {
    std::uint64_t s = 0;
    for (GeneId g : members) s += g.value;
    return s;
  }
};

struct Request {
  std::map<AttributeId, double> wants;
  UserId issuer;

  bool operator==(const Request&) const = default;

  double total_weight() const {
    double t = 0.0;
    for (const auto& [_, w] : wants) t += w;
    return t;
  }
};

template <typename T>
void normalize_set(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

template <typename T>
std::vector<T> set_union_of(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<T> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline GeneSet make_gene_set(std::vector<GeneId> members, std::vector<HabitatId> provenance) {
  normalize_set(members);
  normalize_set(provenance);
  return GeneSet{std::move(members), std::move(provenance)};
}

/// The global gene table (every gene ever deployed). Entries are never
/// removed so archived gene-sets always resolve.
class GeneRegistry {
 public:
  const Gene& at(GeneId id) const {
    auto it = genes_.find(id);
    if (it == genes_.end()) {
      throw LookupError("unknown gene id " + to_string(id));
    }
    return it->second;
  }

  bool contains(GeneId id) const { return genes_.count(id) != 0; }

  void add(Gene g) {
    if (g.provides.empty()) throw ArgumentError("gene " + to_string(g.id) + " provides nothing");
    if (!(g.cost > 0.0)) throw ArgumentError("gene " + to_string(g.id) + " must have positive cost");
    normalize_set(g.provides);
    genes_.insert_or_assign(g.id, std::move(g));
  }

  std::size_t size() const { return genes_.size(); }
  const std::map<GeneId, Gene>& all() const { return genes_; }

  bool operator==(const GeneRegistry&) const = default;

 private:
  std::map<GeneId, Gene> genes_;
};

/// Union of attributes provided by the members of `gs`.
inline std::vector<AttributeId> union_attributes(const GeneSet& gs, const GeneRegistry& registry) {
  std::vector<AttributeId> out;
  for (GeneId g : gs.members) {
    const auto& p = registry.at(g).provides;
    out.insert(out.end(), p.begin(), p.end());
  }
  normalize_set(out);
  return out;
}

/// Weighted Jaccard similarity of two requests' attribute weights.
inline double request_similarity(const Request& a, const Request& b) {
  double min_sum = 0.0;
  double max_sum = 0.0;
  auto ia = a.wants.begin();
  auto ib = b.wants.begin();
  while (ia != a.wants.end() || ib != b.wants.end()) {
    if (ib == b.wants.end() || (ia != a.wants.end() && ia->first < ib->first)) {
      max_sum += ia->second;
      ++ia;
    } else if (ia == a.wants.end() || ib->first < ia->first) {
      max_sum += ib->second;
      ++ib;
    } else {
      min_sum += std::min(ia->second, ib->second);
      max_sum += std::max(ia->second, ib->second);
      ++ia;
      ++ib;
    }
  }
  if (max_sum <= 0.0) return 0.0;
  return min_sum / max_sum;
}

inline std::vector<HabitatId> merge_provenance(const GeneSet& a, const GeneSet& b,
                                               HabitatId created_at) {
  auto out = set_union_of(a.provenance, b.provenance);
  auto pos = std::lower_bound(out.begin(), out.end(), created_at);
  if (pos == out.end() || *pos != created_at) out.insert(pos, created_at);
  return out;
}

/// Throws ArgumentError when a request violates its invariants.
inline void validate_request(const Request& r) {
  if (r.wants.empty()) throw ArgumentError("request wants nothing");
  for (const auto& [attr, w] : r.wants) {
    if (!(w > 0.0)) throw ArgumentError("request weight for attribute " + std::to_string(attr) + " must be positive");
  }
}

}  // namespace ecodec
