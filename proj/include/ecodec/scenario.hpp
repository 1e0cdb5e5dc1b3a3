#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ecodec/errors.hpp"
#include "ecodec/evolution.hpp"
#include "ecodec/habitat.hpp"

namespace ecodec {

inline constexpr const char* kScenarioVersion = "ecodec-scenario/1";

template <typename T>
struct Range {
  T min{};
  T max{};
  bool operator==(const Range&) const = default;
};

enum class JoinStrategy { random, clone };

/// A user joining mid-run, applied at the start of step `tick`.
struct JoinSpec {
  Tick tick{1};
  std::vector<CommunityId> communities;
  JoinStrategy strategy{JoinStrategy::random};
  std::uint32_t k{3};
  UserId similar_user;

  bool operator==(const JoinSpec&) const = default;
};

struct ScenarioConfig {
  std::uint32_t vocabulary_size{0};  // 0 means "exactly what the communities need"
  std::uint32_t community_count{2};
  std::uint32_t community_vocab_size{16};
  double overlap{0.0};
  std::uint32_t users_per_community{10};
  double request_rate{0.5};
  Range<std::uint32_t> request_size{3, 5};
  bool weight_jitter{false};
  std::uint32_t genes_per_user{8};
  Range<std::uint32_t> gene_attributes{1, 2};
  Range<double> gene_cost{0.5, 2.0};

  EvolutionParams evolution;
  HabitatParams habitat;
  std::uint32_t k_init{4};
  double b_init{0.7};
  std::uint32_t epoch_length{100};
  std::uint32_t snapshot_interval{100};

  std::vector<JoinSpec> joins;

  bool operator==(const ScenarioConfig&) const = default;

  std::uint32_t shared_vocab() const {
    return static_cast<std::uint32_t>(std::llround(overlap * community_vocab_size));
  }
  std::uint32_t required_vocabulary() const {
    return shared_vocab() + community_count * (community_vocab_size - shared_vocab());
  }
  std::uint32_t total_users() const { return community_count * users_per_community; }

  /// Attribute ids of community `c`: a shared block followed by a private one.
  std::vector<AttributeId> community_vocabulary(std::uint32_t c) const {
    const std::uint32_t shared = shared_vocab();
    const std::uint32_t own = community_vocab_size - shared;
    std::vector<AttributeId> v;
    for (std::uint32_t a = 0; a < shared; ++a) v.push_back(a);
    for (std::uint32_t a = 0; a < own; ++a) v.push_back(shared + c * own + a);
    return v;
  }
};

namespace detail {

using nlohmann::json;

class ScenarioReader {
 public:
  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ValidationError(path + ": " + what);
  }

  static void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) fail(path.empty() ? "<document>" : path, "expected an object");
    for (const auto& [k, _] : obj.items()) {
      bool known = false;
      for (const char* allowed : keys) known = known || k == allowed;
      if (!known) fail(join(path, k), "unknown key");
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  static double number(const json& obj, const std::string& path, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) fail(join(path, key), "expected a number");
    return v.get<double>();
  }

  static std::uint32_t count(const json& obj, const std::string& path, const char* key, std::uint32_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0 || v.get<std::int64_t>() > 0xFFFFFFFFLL)
      fail(join(path, key), "expected a non-negative integer");
    return v.get<std::uint32_t>();
  }

  static bool boolean(const json& obj, const std::string& path, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) fail(join(path, key), "expected a boolean");
    return v.get<bool>();
  }

  template <typename T>
  static Range<T> range(const json& obj, const std::string& path, const char* key, Range<T> fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    const auto p = join(path, key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      fail(p, "expected a [min, max] pair");
    if constexpr (std::is_integral_v<T>) {
      if (!v[0].is_number_integer() || !v[1].is_number_integer() || v[0].get<std::int64_t>() < 0 ||
          v[1].get<std::int64_t>() < 0)
        fail(p, "expected non-negative integers");
    }
    return {v[0].get<T>(), v[1].get<T>()};
  }

  static void unit_interval(double v, const std::string& path) {
    if (!(v >= 0.0 && v <= 1.0)) fail(path, "must be in [0,1] (got " + std::to_string(v) + ")");
  }

  static void positive(std::uint64_t v, const std::string& path) {
    if (v == 0) fail(path, "must be positive");
  }
};

}  // namespace detail

/// Check every field constraint; throws ValidationError naming the path.
inline void validate_scenario(const ScenarioConfig& s) {
  using R = detail::ScenarioReader;
  R::positive(s.community_count, "communities.count");
  R::positive(s.community_vocab_size, "communities.vocab_size");
  R::unit_interval(s.overlap, "communities.overlap");
  R::positive(s.users_per_community, "users_per_community");
  if (s.vocabulary_size != 0 && s.vocabulary_size < s.required_vocabulary())
    R::fail("vocabulary_size", "must be at least " + std::to_string(s.required_vocabulary()) +
                                   " to hold every community vocabulary");
  R::unit_interval(s.request_rate, "request_rate");
  if (s.request_size.min < 1 || s.request_size.min > s.request_size.max ||
      s.request_size.max > s.community_vocab_size)
    R::fail("request_size_range", "must satisfy 1 <= min <= max <= communities.vocab_size");
  R::positive(s.genes_per_user, "genes_per_user");
  if (s.gene_attributes.min < 1 || s.gene_attributes.min > s.gene_attributes.max ||
      s.gene_attributes.max > s.community_vocab_size)
    R::fail("gene_attribute_range", "must satisfy 1 <= min <= max <= communities.vocab_size");
  if (!(s.gene_cost.min > 0.0) || !(s.gene_cost.min <= s.gene_cost.max))
    R::fail("gene_cost_range", "must satisfy 0 < min <= max");

  const auto& ev = s.evolution;
  if (!(ev.alpha >= 0.0)) R::fail("params.alpha", "must be non-negative");
  if (ev.population_size < 2) R::fail("params.population_size", "must be at least 2");
  R::unit_interval(ev.p_cross, "params.p_cross");
  R::unit_interval(ev.p_mut, "params.p_mut");
  R::positive(ev.max_generations, "params.max_generations");
  R::unit_interval(ev.target_coverage, "params.target_coverage");
  R::unit_interval(ev.seed_fraction, "params.seed_fraction");
  R::positive(ev.max_initial_size, "params.max_initial_size");

  const auto& hp = s.habitat;
  R::unit_interval(hp.exec_threshold, "params.exec_threshold");
  R::unit_interval(hp.delta_plus, "params.delta_plus");
  R::unit_interval(hp.delta_minus, "params.delta_minus");
  R::unit_interval(hp.prune_threshold, "params.prune_threshold");
  R::unit_interval(hp.p_init, "params.p_init");
  R::positive(hp.unused_threshold, "params.unused_threshold");
  R::unit_interval(hp.cluster_edge_threshold, "params.cluster_edge_threshold");
  R::positive(hp.archive_cap, "params.archive_cap");
  R::positive(hp.recent_window, "params.recent_window");
  R::unit_interval(s.b_init, "params.b_init");
  R::positive(s.epoch_length, "params.epoch_length");
  R::positive(s.snapshot_interval, "params.snapshot_interval");

  std::uint64_t users = s.total_users();
  for (std::size_t i = 0; i < s.joins.size(); ++i) {
    const auto& j = s.joins[i];
    const std::string p = "joins[" + std::to_string(i) + "]";
    R::positive(j.tick, p + ".tick");
    if (j.communities.empty()) R::fail(p + ".communities", "must be non-empty");
    for (CommunityId c : j.communities)
      if (c.value >= s.community_count) R::fail(p + ".communities", "unknown community " + to_string(c));
    if (j.strategy == JoinStrategy::clone && j.similar_user.value >= users)
      R::fail(p + ".similar_user", "unknown user " + to_string(j.similar_user));
    ++users;
  }
}

/// Parse and validate a scenario document; omitted tunables take defaults.
inline ScenarioConfig parse_scenario(const std::string& text) {
  using R = detail::ScenarioReader;
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("<document>: malformed JSON: ") + e.what());
  }
  R::reject_unknown(doc, "",
                    {"version", "vocabulary_size", "communities", "users_per_community", "request_rate",
                     "request_size_range", "weight_jitter", "genes_per_user", "gene_attribute_range",
                     "gene_cost_range", "params", "joins"});
  if (!doc.contains("version") || !doc["version"].is_string())
    R::fail("version", "missing (expected \"" + std::string(kScenarioVersion) + "\")");
  if (doc["version"].get<std::string>() != kScenarioVersion)
    R::fail("version", "unsupported version \"" + doc["version"].get<std::string>() + "\"");
  if (!doc.contains("communities")) R::fail("communities", "missing");
  if (!doc.contains("users_per_community")) R::fail("users_per_community", "missing");

  ScenarioConfig s;
  s.vocabulary_size = R::count(doc, "", "vocabulary_size", 0);
  const auto& comm = doc["communities"];
  R::reject_unknown(comm, "communities", {"count", "vocab_size", "overlap"});
  s.community_count = R::count(comm, "communities", "count", s.community_count);
  s.community_vocab_size = R::count(comm, "communities", "vocab_size", s.community_vocab_size);
  s.overlap = R::number(comm, "communities", "overlap", s.overlap);
  s.users_per_community = R::count(doc, "", "users_per_community", s.users_per_community);
  s.request_rate = R::number(doc, "", "request_rate", s.request_rate);
  s.request_size = R::range(doc, "", "request_size_range", s.request_size);
  s.weight_jitter = R::boolean(doc, "", "weight_jitter", s.weight_jitter);
  s.genes_per_user = R::count(doc, "", "genes_per_user", s.genes_per_user);
  s.gene_attributes = R::range(doc, "", "gene_attribute_range", s.gene_attributes);
  s.gene_cost = R::range(doc, "", "gene_cost_range", s.gene_cost);

  if (doc.contains("params")) {
    const auto& p = doc["params"];
    const std::string path = "params";
    R::reject_unknown(p, path,
                      {"alpha", "population_size", "p_cross", "p_mut", "max_generations", "target_coverage",
                       "exec_threshold", "seed_fraction", "max_initial_size", "settle_generations", "delta_plus", "delta_minus",
                       "prune_threshold", "p_init", "unused_threshold", "cluster_edge_threshold", "k_init",
                       "b_init", "archive_cap", "recent_window", "epoch_length", "snapshot_interval"});
    auto& ev = s.evolution;
    ev.alpha = R::number(p, path, "alpha", ev.alpha);
    ev.population_size = R::count(p, path, "population_size", static_cast<std::uint32_t>(ev.population_size));
    ev.p_cross = R::number(p, path, "p_cross", ev.p_cross);
    ev.p_mut = R::number(p, path, "p_mut", ev.p_mut);
    ev.max_generations = R::count(p, path, "max_generations", ev.max_generations);
    ev.target_coverage = R::number(p, path, "target_coverage", ev.target_coverage);
    ev.seed_fraction = R::number(p, path, "seed_fraction", ev.seed_fraction);
    ev.max_initial_size = R::count(p, path, "max_initial_size", static_cast<std::uint32_t>(ev.max_initial_size));
    ev.settle_generations = R::count(p, path, "settle_generations", ev.settle_generations);
    auto& hp = s.habitat;
    hp.exec_threshold = R::number(p, path, "exec_threshold", hp.exec_threshold);
    hp.delta_plus = R::number(p, path, "delta_plus", hp.delta_plus);
    hp.delta_minus = R::number(p, path, "delta_minus", hp.delta_minus);
    hp.prune_threshold = R::number(p, path, "prune_threshold", hp.prune_threshold);
    hp.p_init = R::number(p, path, "p_init", hp.p_init);
    hp.unused_threshold = R::count(p, path, "unused_threshold", hp.unused_threshold);
    hp.cluster_edge_threshold = R::number(p, path, "cluster_edge_threshold", hp.cluster_edge_threshold);
    hp.archive_cap = R::count(p, path, "archive_cap", static_cast<std::uint32_t>(hp.archive_cap));
    hp.recent_window = R::count(p, path, "recent_window", static_cast<std::uint32_t>(hp.recent_window));
    s.k_init = R::count(p, path, "k_init", s.k_init);
    s.b_init = R::number(p, path, "b_init", s.b_init);
    s.epoch_length = R::count(p, path, "epoch_length", s.epoch_length);
    s.snapshot_interval = R::count(p, path, "snapshot_interval", s.snapshot_interval);
  }

  if (doc.contains("joins")) {
    const auto& joins = doc["joins"];
    if (!joins.is_array()) R::fail("joins", "expected an array");
    for (std::size_t i = 0; i < joins.size(); ++i) {
      const std::string path = "joins[" + std::to_string(i) + "]";
      const auto& j = joins[i];
      R::reject_unknown(j, path, {"tick", "communities", "strategy", "k", "similar_user"});
      JoinSpec js;
      js.tick = R::count(j, path, "tick", 0);
      if (!j.contains("communities") || !j["communities"].is_array())
        R::fail(path + ".communities", "expected an array of community ids");
      for (const auto& c : j["communities"]) {
        if (!c.is_number_integer() || c.get<std::int64_t>() < 0)
          R::fail(path + ".communities", "expected non-negative integers");
        js.communities.emplace_back(c.get<std::uint64_t>());
      }
      normalize_set(js.communities);
      const std::string strategy = j.value("strategy", std::string("random"));
      if (strategy == "random") js.strategy = JoinStrategy::random;
      else if (strategy == "clone") js.strategy = JoinStrategy::clone;
      else R::fail(path + ".strategy", "must be \"random\" or \"clone\"");
      js.k = R::count(j, path, "k", js.k);
      if (js.strategy == JoinStrategy::clone) {
        if (!j.contains("similar_user")) R::fail(path + ".similar_user", "required for clone strategy");
        js.similar_user = UserId(R::count(j, path, "similar_user", 0));
      }
      s.joins.push_back(std::move(js));
    }
  }

  validate_scenario(s);
  if (s.vocabulary_size == 0) s.vocabulary_size = s.required_vocabulary();
  return s;
}

inline nlohmann::json scenario_to_json(const ScenarioConfig& s) {
  using nlohmann::json;
  json p = {
      {"alpha", s.evolution.alpha},
      {"population_size", s.evolution.population_size},
      {"p_cross", s.evolution.p_cross},
      {"p_mut", s.evolution.p_mut},
      {"max_generations", s.evolution.max_generations},
      {"target_coverage", s.evolution.target_coverage},
      {"seed_fraction", s.evolution.seed_fraction},
      {"max_initial_size", s.evolution.max_initial_size},
      {"settle_generations", s.evolution.settle_generations},
      {"exec_threshold", s.habitat.exec_threshold},
      {"delta_plus", s.habitat.delta_plus},
      {"delta_minus", s.habitat.delta_minus},
      {"prune_threshold", s.habitat.prune_threshold},
      {"p_init", s.habitat.p_init},
      {"unused_threshold", s.habitat.unused_threshold},
      {"cluster_edge_threshold", s.habitat.cluster_edge_threshold},
      {"archive_cap", s.habitat.archive_cap},
      {"recent_window", s.habitat.recent_window},
      {"k_init", s.k_init},
      {"b_init", s.b_init},
      {"epoch_length", s.epoch_length},
      {"snapshot_interval", s.snapshot_interval},
  };
  json joins = json::array();
  for (const auto& j : s.joins) {
    json cs = json::array();
    for (CommunityId c : j.communities) cs.push_back(c.value);
    json o = {{"tick", j.tick},
              {"communities", cs},
              {"strategy", j.strategy == JoinStrategy::clone ? "clone" : "random"},
              {"k", j.k}};
    if (j.strategy == JoinStrategy::clone) o["similar_user"] = j.similar_user.value;
    joins.push_back(std::move(o));
  }
  return json{
      {"version", kScenarioVersion},
      {"vocabulary_size", s.vocabulary_size},
      {"communities", {{"count", s.community_count}, {"vocab_size", s.community_vocab_size}, {"overlap", s.overlap}}},
      {"users_per_community", s.users_per_community},
      {"request_rate", s.request_rate},
      {"request_size_range", {s.request_size.min, s.request_size.max}},
      {"weight_jitter", s.weight_jitter},
      {"genes_per_user", s.genes_per_user},
      {"gene_attribute_range", {s.gene_attributes.min, s.gene_attributes.max}},
      {"gene_cost_range", {s.gene_cost.min, s.gene_cost.max}},
      {"params", std::move(p)},
      {"joins", std::move(joins)},
  };
}

inline std::string serialize_scenario(const ScenarioConfig& s) { return scenario_to_json(s).dump(2); }

}  // namespace ecodec
