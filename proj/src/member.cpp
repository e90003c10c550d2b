// member.cpp

#include "egocluster/member.hpp"

#include <charconv>
#include <stdexcept>

namespace egocluster {

std::string_view id_mode_name(IdMode mode) {
    return mode == IdMode::integer ? "integer" : "text";
}

std::optional<IdMode> parse_id_mode(std::string_view token) {
    if (token == "text") return IdMode::text;
    if (token == "integer") return IdMode::integer;
    return std::nullopt;
}

MemberId canonicalize_id(std::string_view raw, IdMode mode) {
    if (raw.empty()) throw std::invalid_argument("member id must be non-empty");
    if (mode == IdMode::text) return MemberId(raw);
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc{} || ptr != raw.data() + raw.size())
        throw std::invalid_argument("member id '" + std::string(raw) + "' is not a 64-bit integer");
    return std::to_string(value);
}

bool id_less(const MemberId& a, const MemberId& b, IdMode mode) {
    if (mode == IdMode::text) return a < b;
    // Canonical decimals: compare sign, then magnitude by length, then text.
    const bool neg_a = !a.empty() && a[0] == '-';
    const bool neg_b = !b.empty() && b[0] == '-';
    if (neg_a != neg_b) return neg_a;
    if (a.size() != b.size()) return neg_a ? a.size() > b.size() : a.size() < b.size();
    return neg_a ? a > b : a < b;
}

std::string_view kind_name(InteractionKind kind) {
    switch (kind) {
        case InteractionKind::impression: return "impression";
        case InteractionKind::click: return "click";
        case InteractionKind::like: return "like";
        case InteractionKind::comment: return "comment";
        case InteractionKind::reshare: return "reshare";
        case InteractionKind::viral_action: return "viral_action";
        case InteractionKind::unspecified: return "unspecified";
    }
    return "unspecified";
}

std::optional<InteractionKind> parse_kind(std::string_view token) {
    if (token == "impression") return InteractionKind::impression;
    if (token == "click") return InteractionKind::click;
    if (token == "like") return InteractionKind::like;
    if (token == "comment") return InteractionKind::comment;
    if (token == "reshare") return InteractionKind::reshare;
    if (token == "viral_action") return InteractionKind::viral_action;
    if (token == "unspecified") return InteractionKind::unspecified;
    return std::nullopt;
}

std::string NetworkType::slug() const {
    return std::string(kind_name(kind)) + "_" + std::to_string(window_days) + "d";
}

std::string NetworkType::display() const {
    std::string plural;
    switch (kind) {
        case InteractionKind::impression: plural = "impressions"; break;
        case InteractionKind::click: plural = "clicks"; break;
        case InteractionKind::like: plural = "likes"; break;
        case InteractionKind::comment: plural = "comments"; break;
        case InteractionKind::reshare: plural = "reshares"; break;
        case InteractionKind::viral_action: plural = "viral actions"; break;
        case InteractionKind::unspecified: plural = "interactions"; break;
    }
    return "past " + std::to_string(window_days) + " days " + plural;
}

std::optional<NetworkType> parse_network_type(std::string_view token) {
    NetworkType type;
    const auto colon = token.find(':');
    const std::string_view kind_tok = token.substr(0, colon);
    const auto kind = parse_kind(kind_tok);
    if (!kind) return std::nullopt;
    type.kind = *kind;
    if (colon != std::string_view::npos) {
        const std::string_view win = token.substr(colon + 1);
        int days = 0;
        const auto [ptr, ec] = std::from_chars(win.data(), win.data() + win.size(), days);
        if (ec != std::errc{} || ptr != win.data() + win.size() || days <= 0) return std::nullopt;
        type.window_days = days;
    }
    return type;
}

} // namespace egocluster
