// snapshot.cpp

#include "egocluster/snapshot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "egocluster/sha256.hpp"

namespace egocluster {

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace {

void check_weight(double w) {
    if (!std::isfinite(w) || w < 0.0)
        throw std::invalid_argument("edge weight must be finite and non-negative, got " +
                                    format_double(w));
}

} // namespace

NetworkSnapshot NetworkSnapshot::build(std::vector<RawEdge> rows, IdMode mode, std::string label) {
    std::vector<MemberId> members;
    std::vector<IndexedEdge> edges;
    edges.reserve(rows.size());
    std::unordered_map<std::string, std::uint32_t> intern;
    bool metadata = false;

    auto intern_id = [&](const MemberId& raw) {
        MemberId canon = canonicalize_id(raw, mode);
        auto [it, inserted] = intern.try_emplace(std::move(canon), static_cast<std::uint32_t>(members.size()));
        if (inserted) members.push_back(it->first);
        return it->second;
    };

    for (const RawEdge& row : rows) {
        IndexedEdge e;
        e.alter = intern_id(row.alter);
        e.ego = intern_id(row.ego);
        e.weight = row.weight;
        e.kind = row.kind;
        e.day = row.day;
        if (e.kind != InteractionKind::unspecified || e.day != 0) metadata = true;
        edges.push_back(e);
    }
    return build_indexed(std::move(members), std::move(edges), mode, std::move(label), metadata);
}

NetworkSnapshot NetworkSnapshot::build_indexed(std::vector<MemberId> members,
                                               std::vector<IndexedEdge> edges,
                                               IdMode mode, std::string label,
                                               bool with_metadata) {
    const std::uint32_t n_in = static_cast<std::uint32_t>(members.size());
    for (const IndexedEdge& e : edges) {
        if (e.alter >= n_in || e.ego >= n_in)
            throw std::invalid_argument("edge references unknown member index");
        if (e.alter == e.ego)
            throw std::invalid_argument("self-interaction edge for member '" + members[e.alter] +
                                        "' must be dropped before snapshot construction");
        check_weight(e.weight);
    }

    // Keep only referenced members, in canonical id order.
    std::vector<std::uint8_t> used(n_in, 0);
    for (const IndexedEdge& e : edges) {
        used[e.alter] = 1;
        used[e.ego] = 1;
    }
    std::vector<std::uint32_t> order;
    order.reserve(n_in);
    for (std::uint32_t i = 0; i < n_in; ++i)
        if (used[i]) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return id_less(members[a], members[b], mode);
    });
    std::vector<std::uint32_t> remap(n_in, 0);
    NetworkSnapshot snap;
    snap.members_.reserve(order.size());
    for (std::uint32_t rank = 0; rank < order.size(); ++rank) {
        remap[order[rank]] = rank;
        snap.members_.push_back(std::move(members[order[rank]]));
    }
    for (std::size_t i = 1; i < snap.members_.size(); ++i)
        if (snap.members_[i - 1] == snap.members_[i])
            throw std::invalid_argument("duplicate member id '" + snap.members_[i] + "'");

    for (IndexedEdge& e : edges) {
        e.alter = remap[e.alter];
        e.ego = remap[e.ego];
    }

    // Full key including weight so equal-key groups sum in a fixed order and
    // aggregation is bit-identical under input permutation.
    std::sort(edges.begin(), edges.end(), [](const IndexedEdge& a, const IndexedEdge& b) {
        return std::tie(a.alter, a.ego, a.kind, a.day, a.weight) <
               std::tie(b.alter, b.ego, b.kind, b.day, b.weight);
    });

    snap.label_ = std::move(label);
    snap.mode_ = mode;
    snap.has_metadata_ = with_metadata;
    snap.edges_.reserve(edges.size());
    for (std::size_t i = 0; i < edges.size();) {
        const std::uint32_t alter = edges[i].alter;
        const std::uint32_t ego = edges[i].ego;
        AggEdge agg{alter, ego, 0.0, static_cast<std::uint32_t>(snap.parts_.size()),
                    static_cast<std::uint32_t>(snap.parts_.size())};
        while (i < edges.size() && edges[i].alter == alter && edges[i].ego == ego) {
            if (with_metadata) {
                if (snap.parts_.size() > agg.parts_begin &&
                    snap.parts_.back().kind == edges[i].kind &&
                    snap.parts_.back().day == edges[i].day) {
                    snap.parts_.back().weight += edges[i].weight;
                } else {
                    snap.parts_.push_back({edges[i].kind, edges[i].day, edges[i].weight});
                }
            } else {
                agg.weight += edges[i].weight;
            }
            ++i;
        }
        if (with_metadata) {
            agg.parts_end = static_cast<std::uint32_t>(snap.parts_.size());
            for (std::uint32_t p = agg.parts_begin; p < agg.parts_end; ++p)
                agg.weight += snap.parts_[p].weight;
        }
        snap.edges_.push_back(agg);
    }
    snap.build_indexes();
    return snap;
}

void NetworkSnapshot::build_indexes() {
    const std::uint32_t n = static_cast<std::uint32_t>(members_.size());
    alter_offsets_.assign(n + 1, 0);
    ego_offsets_.assign(n + 1, 0);
    for (const AggEdge& e : edges_) {
        ++alter_offsets_[e.alter + 1];
        ++ego_offsets_[e.ego + 1];
    }
    std::partial_sum(alter_offsets_.begin(), alter_offsets_.end(), alter_offsets_.begin());
    std::partial_sum(ego_offsets_.begin(), ego_offsets_.end(), ego_offsets_.begin());

    by_ego_.resize(edges_.size());
    std::vector<std::uint32_t> cursor(ego_offsets_.begin(), ego_offsets_.end() - 1);
    for (std::uint32_t i = 0; i < edges_.size(); ++i)
        by_ego_[cursor[edges_[i].ego]++] = i; // edges_ order makes this alter-sorted per ego

    ego_members_.clear();
    alter_members_.clear();
    total_weight_ = 0.0;
    for (std::uint32_t m = 0; m < n; ++m) {
        if (alter_offsets_[m + 1] > alter_offsets_[m]) alter_members_.push_back(m);
        if (ego_offsets_[m + 1] > ego_offsets_[m]) ego_members_.push_back(m);
    }
    for (const AggEdge& e : edges_) total_weight_ += e.weight;
}

std::optional<std::uint32_t> NetworkSnapshot::find_member(const MemberId& id) const {
    const auto it = std::lower_bound(members_.begin(), members_.end(), id,
                                     [&](const MemberId& a, const MemberId& b) {
                                         return id_less(a, b, mode_);
                                     });
    if (it == members_.end() || *it != id) return std::nullopt;
    return static_cast<std::uint32_t>(it - members_.begin());
}

std::span<const AggEdge> NetworkSnapshot::alter_edges(std::uint32_t member) const {
    return {edges_.data() + alter_offsets_[member], edges_.data() + alter_offsets_[member + 1]};
}

std::span<const std::uint32_t> NetworkSnapshot::ego_edge_ids(std::uint32_t member) const {
    return {by_ego_.data() + ego_offsets_[member], by_ego_.data() + ego_offsets_[member + 1]};
}

std::string NetworkSnapshot::digest() const {
    Sha256 h;
    auto put = [&h](std::string_view s) {
        const std::uint64_t len = s.size();
        h.update(&len, sizeof(len));
        h.update(s);
    };
    put(label_);
    put(id_mode_name(mode_));
    put(has_metadata_ ? "1" : "0");
    for (const MemberId& m : members_) put(m);
    for (const AggEdge& e : edges_) {
        put(std::to_string(e.alter));
        put(std::to_string(e.ego));
        put(format_double(e.weight));
        for (const EdgePart& p : parts(e)) {
            put(kind_name(p.kind));
            put(std::to_string(p.day));
            put(format_double(p.weight));
        }
    }
    return h.hex_digest();
}

bool operator==(const NetworkSnapshot& a, const NetworkSnapshot& b) {
    auto edge_eq = [](const AggEdge& x, const AggEdge& y) {
        return x.alter == y.alter && x.ego == y.ego && x.weight == y.weight &&
               (x.parts_end - x.parts_begin) == (y.parts_end - y.parts_begin);
    };
    auto part_eq = [](const EdgePart& x, const EdgePart& y) {
        return x.kind == y.kind && x.day == y.day && x.weight == y.weight;
    };
    return a.label_ == b.label_ && a.mode_ == b.mode_ && a.has_metadata_ == b.has_metadata_ &&
           a.members_ == b.members_ &&
           std::equal(a.edges_.begin(), a.edges_.end(), b.edges_.begin(), b.edges_.end(), edge_eq) &&
           std::equal(a.parts_.begin(), a.parts_.end(), b.parts_.begin(), b.parts_.end(), part_eq);
}

NetworkSnapshot build_network(const NetworkSnapshot& snapshot, const NetworkType& type,
                              std::vector<std::string>* warnings) {
    if (type.window_days <= 0) throw std::invalid_argument("window_days must be positive");
    std::vector<MemberId> members(snapshot.members().begin(), snapshot.members().end());
    std::vector<NetworkSnapshot::IndexedEdge> kept;
    for (const AggEdge& e : snapshot.edges()) {
        for (const EdgePart& p : snapshot.parts(e)) {
            if (p.kind != type.kind) continue;
            if (p.day < 0 || p.day >= type.window_days) continue;
            kept.push_back({e.alter, e.ego, p.weight, p.kind, p.day});
        }
    }
    if (kept.empty() && warnings)
        warnings->push_back("network type " + type.slug() + " matches no edges in snapshot '" +
                            snapshot.label() + "'");
    return NetworkSnapshot::build_indexed(std::move(members), std::move(kept), snapshot.id_mode(),
                                          snapshot.label(), true);
}

NetworkSnapshot restrict_egos(const NetworkSnapshot& snapshot,
                              const std::unordered_set<MemberId>& ego_list,
                              std::size_t min_egos,
                              std::vector<std::string>* warnings) {
    if (ego_list.empty()) throw std::invalid_argument("ego list must be non-empty");
    std::unordered_set<MemberId> canon;
    canon.reserve(ego_list.size());
    for (const MemberId& id : ego_list) canon.insert(canonicalize_id(id, snapshot.id_mode()));

    std::vector<std::uint8_t> keep_ego(snapshot.member_count(), 0);
    for (std::uint32_t m : snapshot.ego_members())
        if (canon.count(snapshot.member_name(m))) keep_ego[m] = 1;

    std::vector<MemberId> members(snapshot.members().begin(), snapshot.members().end());
    std::vector<NetworkSnapshot::IndexedEdge> kept;
    std::size_t ego_count = 0;
    for (std::uint32_t m = 0; m < snapshot.member_count(); ++m)
        if (keep_ego[m] && !snapshot.ego_edge_ids(m).empty()) ++ego_count;
    for (const AggEdge& e : snapshot.edges()) {
        if (!keep_ego[e.ego]) continue;
        const auto parts = snapshot.parts(e);
        if (parts.empty()) {
            kept.push_back({e.alter, e.ego, e.weight});
        } else {
            for (const EdgePart& p : parts) kept.push_back({e.alter, e.ego, p.weight, p.kind, p.day});
        }
    }
    if (kept.empty())
        throw std::runtime_error("restricting to the given ego list leaves an empty snapshot");
    if (ego_count < min_egos && warnings)
        warnings->push_back("only " + std::to_string(ego_count) + " egos after restriction; " +
                            std::to_string(min_egos) + "+ recommended for adequate samples");
    return NetworkSnapshot::build_indexed(std::move(members), std::move(kept), snapshot.id_mode(),
                                          snapshot.label(), snapshot.has_metadata());
}

void write_edge_list(const NetworkSnapshot& snapshot, std::ostream& out) {
    const bool meta = snapshot.has_metadata();
    out << (meta ? "alter_id,ego_id,weight,kind,day\n" : "alter_id,ego_id,weight\n");
    for (const AggEdge& e : snapshot.edges()) {
        const MemberId& alter = snapshot.member_name(e.alter);
        const MemberId& ego = snapshot.member_name(e.ego);
        if (!meta) {
            out << alter << ',' << ego << ',' << format_double(e.weight) << '\n';
            continue;
        }
        for (const EdgePart& p : snapshot.parts(e)) {
            out << alter << ',' << ego << ',' << format_double(p.weight) << ','
                << kind_name(p.kind) << ',' << p.day << '\n';
        }
    }
}

} // namespace egocluster
