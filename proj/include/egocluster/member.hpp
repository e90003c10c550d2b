// member.hpp
//
// Member identifiers and interaction network types.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace egocluster {

// Member ids are opaque tokens. In integer mode every id must parse as a
// 64-bit integer and is stored in canonical decimal form, so "007" and "7"
// name the same member and ordering is numeric.
using MemberId = std::string;

enum class IdMode { text, integer };

std::string_view id_mode_name(IdMode mode);
std::optional<IdMode> parse_id_mode(std::string_view token);

// Canonical form of an id under a mode; throws std::invalid_argument on an
// empty token or, in integer mode, a token that does not parse as int64.
MemberId canonicalize_id(std::string_view raw, IdMode mode);

// Mode-aware ordering: numeric in integer mode, lexicographic otherwise.
bool id_less(const MemberId& a, const MemberId& b, IdMode mode);

// One interaction kind per recorded viewer->creator event.
enum class InteractionKind : std::uint8_t {
    impression = 0,
    click,
    like,
    comment,
    reshare,
    viral_action,
    unspecified, // edge lists without a kind column
};

std::string_view kind_name(InteractionKind kind);
std::optional<InteractionKind> parse_kind(std::string_view token);

// An interaction kind plus a lookback window, e.g. viral actions over the
// past 90 days. The window is counted in whole days ending at the snapshot
// origin (day offset 0 = most recent day).
struct NetworkType {
    InteractionKind kind = InteractionKind::impression;
    int window_days = 90;

    // "viral_action_90d"
    std::string slug() const;
    // "past 90 days viral actions"
    std::string display() const;

    friend bool operator==(const NetworkType&, const NetworkType&) = default;
};

// Accepts "kind:window" or "kind" (default window 90), e.g. "impression:28".
std::optional<NetworkType> parse_network_type(std::string_view token);

} // namespace egocluster
