#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>

namespace ecodec {

/// Integer identifier tagged with the entity it names, so a habitat id cannot
/// be passed where a gene id is expected.
template <typename Tag>
struct StrongId {
  std::uint64_t value{0};

  constexpr StrongId() = default;
  constexpr explicit StrongId(std::uint64_t v) : value(v) {}

  constexpr auto operator<=>(const StrongId&) const = default;

  friend std::ostream& operator<<(std::ostream& os, StrongId id) {
    return os << id.value;
  }
};

struct GeneTag {};
struct HabitatTag {};
struct UserTag {};
struct CommunityTag {};

using GeneId = StrongId<GeneTag>;
using HabitatId = StrongId<HabitatTag>;
using UserId = StrongId<UserTag>;
using CommunityId = StrongId<CommunityTag>;

using AttributeId = std::uint32_t;
using Tick = std::uint64_t;

template <typename Tag>
std::string to_string(StrongId<Tag> id) {
  return std::to_string(id.value);
}

}  // namespace ecodec

template <typename Tag>
struct std::hash<ecodec::StrongId<Tag>> {
  std::size_t operator()(ecodec::StrongId<Tag> id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};
