// snapshot.hpp
//
// Immutable weighted alter->ego interaction snapshots. A snapshot holds
// exactly one aggregated edge per (alter, ego) pair, in a canonical order
// that does not depend on input row order, plus per-(kind, day) weight
// parts so the same snapshot can be re-filtered by network type.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "egocluster/member.hpp"

namespace egocluster {

// Raw builder input, one interaction record.
struct RawEdge {
    MemberId alter;
    MemberId ego;
    double weight = 0.0;
    InteractionKind kind = InteractionKind::unspecified;
    std::int32_t day = 0; // days before the snapshot origin; 0 = most recent
};

// (kind, day) slice of an aggregated edge's weight.
struct EdgePart {
    InteractionKind kind;
    std::int32_t day;
    double weight;
};

// Aggregated weight between one alter and one ego.
struct AggEdge {
    std::uint32_t alter;       // index into members()
    std::uint32_t ego;         // index into members()
    double weight;             // sum over parts
    std::uint32_t parts_begin; // [parts_begin, parts_end) into the parts pool
    std::uint32_t parts_end;
};

class NetworkSnapshot {
public:
    NetworkSnapshot() = default;

    // Canonical construction from raw records. Ids are canonicalized per
    // mode, members sorted, edges aggregated per (alter, ego). Self edges,
    // negative or non-finite weights throw; they must be screened upstream.
    static NetworkSnapshot build(std::vector<RawEdge> rows, IdMode mode, std::string label);

    // Fast path for generators that already hold a member table. `members`
    // need not be sorted; indices in `edges` refer to its positions.
    struct IndexedEdge {
        std::uint32_t alter;
        std::uint32_t ego;
        double weight;
        InteractionKind kind = InteractionKind::unspecified;
        std::int32_t day = 0;
    };
    static NetworkSnapshot build_indexed(std::vector<MemberId> members,
                                         std::vector<IndexedEdge> edges,
                                         IdMode mode, std::string label,
                                         bool with_metadata);

    const std::string& label() const { return label_; }
    IdMode id_mode() const { return mode_; }
    bool empty() const { return edges_.empty(); }

    std::size_t member_count() const { return members_.size(); }
    const MemberId& member_name(std::uint32_t idx) const { return members_[idx]; }
    std::span<const MemberId> members() const { return members_; }
    // Binary search over the canonical member order.
    std::optional<std::uint32_t> find_member(const MemberId& id) const;

    std::span<const AggEdge> edges() const { return edges_; }
    std::span<const EdgePart> parts(const AggEdge& e) const {
        return {parts_.data() + e.parts_begin, parts_.data() + e.parts_end};
    }
    bool has_metadata() const { return has_metadata_; }

    // Outgoing edges of a member acting as alter, ordered by ego index.
    std::span<const AggEdge> alter_edges(std::uint32_t member) const;
    // Indices into edges() of a member's incoming edges, ordered by alter.
    std::span<const std::uint32_t> ego_edge_ids(std::uint32_t member) const;

    // Sorted member indices appearing on the ego / alter side.
    const std::vector<std::uint32_t>& ego_members() const { return ego_members_; }
    const std::vector<std::uint32_t>& alter_members() const { return alter_members_; }

    double total_weight() const { return total_weight_; }

    // SHA-256 over a canonical serialization; equal digests mean equal
    // snapshots (label included).
    std::string digest() const;

    friend bool operator==(const NetworkSnapshot&, const NetworkSnapshot&);

private:
    void build_indexes();

    std::string label_;
    IdMode mode_ = IdMode::text;
    bool has_metadata_ = false;
    std::vector<MemberId> members_;    // canonically sorted
    std::vector<AggEdge> edges_;       // sorted by (alter, ego)
    std::vector<EdgePart> parts_;      // contiguous per edge, sorted by (kind, day)
    std::vector<std::uint32_t> alter_offsets_; // CSR over edges_ by alter
    std::vector<std::uint32_t> by_ego_;        // edge ids sorted by (ego, alter)
    std::vector<std::uint32_t> ego_offsets_;   // CSR over by_ego_ by ego
    std::vector<std::uint32_t> ego_members_;
    std::vector<std::uint32_t> alter_members_;
    double total_weight_ = 0.0;
};

// Restrict a snapshot to one interaction kind and lookback window and
// re-aggregate. A kind absent from the data yields an empty snapshot and a
// warning, not an error. Idempotent for a fixed type.
NetworkSnapshot build_network(const NetworkSnapshot& snapshot, const NetworkType& type,
                              std::vector<std::string>* warnings = nullptr);

// Keep only edges whose ego is in `ego_list`; drop members left without
// edges. Warns when fewer than `min_egos` egos remain; throws if nothing
// remains.
NetworkSnapshot restrict_egos(const NetworkSnapshot& snapshot,
                              const std::unordered_set<MemberId>& ego_list,
                              std::size_t min_egos = 100000,
                              std::vector<std::string>* warnings = nullptr);

// Canonical edge-list serialization (header + one row per part, or per
// aggregated edge when the snapshot carries no kind/day metadata).
void write_edge_list(const NetworkSnapshot& snapshot, std::ostream& out);

// Shortest round-trip decimal form of a double ("0.25", "1e-09", ...).
std::string format_double(double value);

} // namespace egocluster
