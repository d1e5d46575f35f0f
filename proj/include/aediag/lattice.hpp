#pragma once

#include <bit>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "aediag/error.hpp"

namespace aediag {

/// Ordered set of participant names. The declared order is the canonical
/// order for every printed tag.
class ParticipantUniverse {
 public:
  static constexpr std::size_t kMaxParticipants = 64;

  explicit ParticipantUniverse(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw Error(ErrorCode::Universe, "participant universe is empty");
    if (names_.size() > kMaxParticipants)
      throw Error(ErrorCode::Universe, "more than 64 participants");
    std::unordered_set<std::string> seen;
    for (const auto& n : names_) {
      if (n.empty()) throw Error(ErrorCode::Universe, "empty participant name");
      if (!seen.insert(n).second) throw Error(ErrorCode::Universe, "duplicate participant '" + n + "'");
    }
  }

  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }

  /// Index of a participant, or -1.
  int index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return static_cast<int>(i);
    return -1;
  }

  std::uint64_t full_mask() const {
    return names_.size() == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << names_.size()) - 1);
  }

  bool operator==(const ParticipantUniverse& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
};

using UniversePtr = std::shared_ptr<const ParticipantUniverse>;

inline UniversePtr make_universe(std::vector<std::string> names) {
  return std::make_shared<const ParticipantUniverse>(std::move(names));
}

inline bool same_universe(const UniversePtr& a, const UniversePtr& b) {
  return a == b || (a && b && *a == *b);
}

/// A subset of a participant universe. Meet is intersection, join is union.
class Tag {
 public:
  Tag() = default;
  Tag(UniversePtr universe, std::uint64_t bits) : universe_(std::move(universe)), bits_(bits) {
    if (!universe_) throw Error(ErrorCode::Universe, "tag without universe");
    if (bits_ & ~universe_->full_mask()) throw Error(ErrorCode::Universe, "tag member outside universe");
  }

  static Tag top(const UniversePtr& u) { return Tag(u, u->full_mask()); }
  static Tag bottom(const UniversePtr& u) { return Tag(u, 0); }

  static Tag of(const UniversePtr& u, std::span<const std::string> members) {
    std::uint64_t bits = 0;
    for (const auto& m : members) {
      int i = u->index_of(m);
      if (i < 0) throw Error(ErrorCode::Universe, "'" + m + "' is not a declared participant");
      bits |= std::uint64_t{1} << i;
    }
    return Tag(u, bits);
  }
  static Tag of(const UniversePtr& u, std::initializer_list<std::string> members) {
    std::vector<std::string> v(members);
    return of(u, std::span<const std::string>(v));
  }

  const UniversePtr& universe() const { return universe_; }
  std::uint64_t bits() const { return bits_; }
  bool empty() const { return bits_ == 0; }
  bool is_top() const { return universe_ && bits_ == universe_->full_mask(); }
  std::size_t count() const { return static_cast<std::size_t>(std::popcount(bits_)); }

  bool contains(std::size_t index) const { return index < 64 && ((bits_ >> index) & 1U); }

  /// Members in universe order.
  std::vector<std::string> members() const {
    std::vector<std::string> out;
    if (!universe_) return out;
    for (std::size_t i = 0; i < universe_->size(); ++i)
      if (contains(i)) out.push_back(universe_->names()[i]);
    return out;
  }

  /// "{A,B,E}" in universe order.
  std::string str() const {
    std::string s = "{";
    bool first = true;
    for (const auto& m : members()) {
      if (!first) s += ",";
      s += m;
      first = false;
    }
    return s + "}";
  }

  bool operator==(const Tag& other) const {
    return bits_ == other.bits_ && same_universe(universe_, other.universe_);
  }

 private:
  UniversePtr universe_;
  std::uint64_t bits_ = 0;
};

namespace detail {
inline void require_same(const Tag& a, const Tag& b) {
  if (!same_universe(a.universe(), b.universe()))
    throw Error(ErrorCode::Universe, "tags drawn from different participant universes");
}
}  // namespace detail

inline Tag tag_meet(const Tag& a, const Tag& b) {
  detail::require_same(a, b);
  return Tag(a.universe(), a.bits() & b.bits());
}

inline Tag tag_join(const Tag& a, const Tag& b) {
  detail::require_same(a, b);
  return Tag(a.universe(), a.bits() | b.bits());
}

inline bool tag_leq(const Tag& a, const Tag& b) {
  detail::require_same(a, b);
  return (a.bits() & ~b.bits()) == 0;
}

/// Members of a that are not in b.
inline Tag tag_minus(const Tag& a, const Tag& b) {
  detail::require_same(a, b);
  return Tag(a.universe(), a.bits() & ~b.bits());
}

inline Tag operator&(const Tag& a, const Tag& b) { return tag_meet(a, b); }
inline Tag operator|(const Tag& a, const Tag& b) { return tag_join(a, b); }

}  // namespace aediag
