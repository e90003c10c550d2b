// diagnostics.cpp

#include "egocluster/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace egocluster {

namespace {

// Index-aligned view of a solution over one snapshot. alter_variant holds
// the assigned variant (0/1) or -1 for members the solution never assigned
// as alters; ego_variant likewise for the ego role.
struct VariantLookup {
    std::vector<std::int8_t> alter_variant;
    std::vector<std::int8_t> ego_variant;
};

VariantLookup build_lookup(const EgoClusterSolution& solution, const NetworkSnapshot& snapshot) {
    VariantLookup lookup;
    lookup.alter_variant.assign(snapshot.member_count(), -1);
    lookup.ego_variant.assign(snapshot.member_count(), -1);
    for (const auto& [name, assignment] : solution.alter_assignments)
        if (const auto idx = snapshot.find_member(name))
            lookup.alter_variant[*idx] = static_cast<std::int8_t>(assignment.variant);
    for (const auto& [name, variant] : solution.ego_variants)
        if (const auto idx = snapshot.find_member(name))
            lookup.ego_variant[*idx] = static_cast<std::int8_t>(variant);
    return lookup;
}

std::vector<const MemberId*> sorted_egos(const EgoClusterSolution& solution) {
    std::vector<const MemberId*> egos;
    egos.reserve(solution.ego_variants.size());
    for (const auto& [name, variant] : solution.ego_variants) egos.push_back(&name);
    std::sort(egos.begin(), egos.end(), [&](const MemberId* a, const MemberId* b) {
        return id_less(*a, *b, solution.id_mode);
    });
    return egos;
}

EgoLoss ego_loss_for(const NetworkSnapshot& snapshot, const VariantLookup& lookup,
                     const MemberId& ego, std::int8_t ego_variant) {
    EgoLoss loss;
    loss.ego = ego;
    if (const auto idx = snapshot.find_member(ego)) {
        const auto edges = snapshot.edges();
        for (const std::uint32_t id : snapshot.ego_edge_ids(*idx)) {
            const AggEdge& e = edges[id];
            const std::int8_t av = lookup.alter_variant[e.alter];
            if (av < 0) continue; // unassigned member, or an ego-role member
            loss.total_weight += e.weight;
            if (av != ego_variant) loss.misaligned_weight += e.weight;
        }
    }
    loss.loss_rate = loss.total_weight > 0.0 ? loss.misaligned_weight / loss.total_weight : 0.0;
    return loss;
}

struct T0Aggregate {
    std::vector<EgoLoss> per_ego;
    double mean_rate = 0.0;
    double weighted_rate = 0.0;
    std::size_t eligible = 0;
    std::size_t zero_weight = 0;
};

T0Aggregate aggregate_t0(const EgoClusterSolution& solution, const NetworkSnapshot& snapshot) {
    T0Aggregate agg;
    const VariantLookup lookup = build_lookup(solution, snapshot);
    double rate_sum = 0.0;
    double misaligned_sum = 0.0;
    double weight_sum = 0.0;
    for (const MemberId* ego : sorted_egos(solution)) {
        const std::int8_t v = static_cast<std::int8_t>(solution.ego_variants.at(*ego));
        EgoLoss loss = ego_loss_for(snapshot, lookup, *ego, v);
        if (loss.total_weight > 0.0) {
            ++agg.eligible;
            rate_sum += loss.loss_rate;
            misaligned_sum += loss.misaligned_weight;
            weight_sum += loss.total_weight;
        } else {
            ++agg.zero_weight;
        }
        agg.per_ego.push_back(std::move(loss));
    }
    if (agg.eligible > 0) {
        agg.mean_rate = rate_sum / static_cast<double>(agg.eligible);
        agg.weighted_rate = misaligned_sum / weight_sum;
    }
    return agg;
}

struct T14Aggregate {
    std::array<double, 3> rates{0.0, 0.0, 0.0}; // scenarios 1..3
    std::size_t eligible = 0;
    std::size_t zero_weight = 0;
};

T14Aggregate aggregate_t14(const EgoClusterSolution& solution, const NetworkSnapshot& t14,
                           double ramp_fraction) {
    if (t14.empty()) throw std::runtime_error("end-of-window snapshot is empty");
    if (!(ramp_fraction > 0.0 && ramp_fraction <= 1.0))
        throw std::invalid_argument("ramp_fraction must be in (0, 1]");

    T14Aggregate agg;
    const VariantLookup lookup = build_lookup(solution, t14);
    const double r = ramp_fraction;
    std::array<double, 3> rate_sums{0.0, 0.0, 0.0};
    const auto edges = t14.edges();
    for (const MemberId* ego : sorted_egos(solution)) {
        const std::int8_t v = static_cast<std::int8_t>(solution.ego_variants.at(*ego));
        double existing_misaligned = 0.0;
        double new_weight = 0.0;
        double total = 0.0;
        if (const auto idx = t14.find_member(*ego)) {
            for (const std::uint32_t id : t14.ego_edge_ids(*idx)) {
                const AggEdge& e = edges[id];
                const std::int8_t av = lookup.alter_variant[e.alter];
                if (av >= 0) {
                    total += e.weight;
                    if (av != v) existing_misaligned += e.weight;
                } else if (lookup.ego_variant[e.alter] >= 0) {
                    continue; // ego-role members never act as alters
                } else {
                    total += e.weight;
                    new_weight += e.weight;
                }
            }
        }
        if (!(total > 0.0)) {
            ++agg.zero_weight;
            continue;
        }
        ++agg.eligible;
        const double treated = v == static_cast<std::int8_t>(Variant::treatment) ? 1.0 : 0.0;
        const std::array<double, 3> misaligned_new{
            new_weight,
            (r / 2.0) * new_weight + (1.0 - r) * new_weight * treated,
            (r / 2.0) * new_weight,
        };
        for (int s = 0; s < 3; ++s)
            rate_sums[s] += (existing_misaligned + misaligned_new[s]) / total;
    }
    if (agg.eligible == 0)
        throw std::runtime_error("no ego carries positive weight in the end-of-window snapshot");
    for (int s = 0; s < 3; ++s) agg.rates[s] = rate_sums[s] / static_cast<double>(agg.eligible);
    return agg;
}

std::string format_rate(double rate) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", rate * 100.0);
    return buf;
}

nlohmann::json diagnostics_json_object(const ClusterDiagnostics& d, bool include_per_ego) {
    nlohmann::json j;
    if (d.network_type) {
        j["network_type"] = std::string(kind_name(d.network_type->kind));
        j["window_days"] = d.network_type->window_days;
    } else {
        j["network_type"] = nullptr;
    }
    j["cluster_size"] = d.cluster_size;
    j["loss_rate_t0"] = d.loss_rate_t0;
    j["loss_rate_t0_weighted"] = d.loss_rate_t0_weighted;
    if (!d.loss_rate_t14.empty()) {
        nlohmann::json t14;
        for (const auto& [scenario, rate] : d.loss_rate_t14)
            t14["s" + std::to_string(scenario)] = rate;
        j["loss_rate_t14"] = std::move(t14);
    }
    if (d.stability_rate) j["stability_rate"] = *d.stability_rate;
    j["zero_weight_egos"] = d.zero_weight_egos;
    if (include_per_ego) {
        nlohmann::json per_ego = nlohmann::json::array();
        for (const EgoLoss& loss : d.per_ego)
            per_ego.push_back({{"ego", loss.ego},
                               {"misaligned_weight", loss.misaligned_weight},
                               {"total_weight", loss.total_weight},
                               {"loss_rate", loss.loss_rate}});
        j["per_ego"] = std::move(per_ego);
    }
    j["warnings"] = d.warnings;
    return j;
}

} // namespace

EgoLoss ego_loss_rate(const EgoClusterSolution& solution, const NetworkSnapshot& snapshot,
                      const MemberId& ego) {
    const auto it = solution.ego_variants.find(ego);
    if (it == solution.ego_variants.end())
        throw std::invalid_argument("ego '" + ego + "' is not part of the solution");
    const VariantLookup lookup = build_lookup(solution, snapshot);
    return ego_loss_for(snapshot, lookup, ego, static_cast<std::int8_t>(it->second));
}

double overall_loss_rate(const EgoClusterSolution& solution, const NetworkSnapshot& snapshot) {
    if (solution.ego_variants.empty()) throw std::invalid_argument("solution has no egos");
    const T0Aggregate agg = aggregate_t0(solution, snapshot);
    if (agg.eligible == 0)
        throw std::runtime_error("no ego carries positive weight in the snapshot");
    return agg.mean_rate;
}

double loss_rate_t14(const EgoClusterSolution& solution, const NetworkSnapshot& snapshot_t14,
                     const ScenarioConfig& config) {
    if (config.scenario < 1 || config.scenario > 3)
        throw std::invalid_argument("scenario must be 1, 2 or 3");
    const T14Aggregate agg = aggregate_t14(solution, snapshot_t14, config.ramp_fraction);
    return agg.rates[config.scenario - 1];
}

double stability_rate(const NetworkSnapshot& snapshot_t0, const NetworkSnapshot& snapshot_t14,
                      const EgoClusterSolution& solution) {
    if (snapshot_t0.empty() || snapshot_t14.empty())
        throw std::runtime_error("stability rate needs two non-empty snapshots");

    // T0 member index -> T14 member index, -1 when the member is gone.
    std::vector<std::int64_t> remap(snapshot_t0.member_count(), -1);
    for (std::uint32_t i = 0; i < snapshot_t0.member_count(); ++i)
        if (const auto idx = snapshot_t14.find_member(snapshot_t0.member_name(i)))
            remap[i] = *idx;

    const auto t0_edges = snapshot_t0.edges();
    const auto t14_edges = snapshot_t14.edges();
    std::size_t surviving = 0;
    std::size_t t0_pairs = 0;
    for (const auto& [name, variant] : solution.ego_variants) {
        const auto i0 = snapshot_t0.find_member(name);
        if (!i0) continue;
        const std::int64_t i14 = remap[*i0];
        const auto t14_ids = i14 >= 0 ? snapshot_t14.ego_edge_ids(static_cast<std::uint32_t>(i14))
                                      : std::span<const std::uint32_t>{};
        for (const std::uint32_t id : snapshot_t0.ego_edge_ids(*i0)) {
            const AggEdge& e = t0_edges[id];
            if (!(e.weight > 0.0)) continue;
            ++t0_pairs;
            const std::int64_t a14 = remap[e.alter];
            if (a14 < 0) continue;
            const auto hit = std::lower_bound(
                t14_ids.begin(), t14_ids.end(), static_cast<std::uint32_t>(a14),
                [&](std::uint32_t eid, std::uint32_t alter) { return t14_edges[eid].alter < alter; });
            if (hit != t14_ids.end() && t14_edges[*hit].alter == static_cast<std::uint32_t>(a14) &&
                t14_edges[*hit].weight > 0.0)
                ++surviving;
        }
    }
    if (t0_pairs == 0)
        throw std::runtime_error("no positive-weight T0 edges for the solution's egos");
    return static_cast<double>(surviving) / static_cast<double>(t0_pairs);
}

ClusterDiagnostics compute_diagnostics(const EgoClusterSolution& solution,
                                       const NetworkSnapshot& snapshot_t0,
                                       const NetworkSnapshot* snapshot_t14,
                                       const DiagnosticsOptions& options) {
    if (solution.ego_variants.empty()) throw std::invalid_argument("solution has no egos");

    ClusterDiagnostics d;
    d.network_type = solution.network_type;
    d.cluster_size = solution.cluster_size();

    T0Aggregate t0 = aggregate_t0(solution, snapshot_t0);
    if (t0.eligible == 0)
        throw std::runtime_error("no ego carries positive weight in the snapshot");
    d.loss_rate_t0 = t0.mean_rate;
    d.loss_rate_t0_weighted = t0.weighted_rate;
    d.zero_weight_egos = t0.zero_weight;
    if (t0.zero_weight > 0)
        d.warnings.push_back(std::to_string(t0.zero_weight) +
                             " ego(s) carry no assigned-alter weight and were "
                             "excluded from loss averages");
    if (options.include_per_ego) d.per_ego = std::move(t0.per_ego);

    if (snapshot_t14) {
        const T14Aggregate t14 = aggregate_t14(solution, *snapshot_t14, options.ramp_fraction);
        for (int s = 1; s <= 3; ++s) d.loss_rate_t14[s] = t14.rates[s - 1];
        d.stability_rate = stability_rate(snapshot_t0, *snapshot_t14, solution);
    }
    return d;
}

std::string diagnostics_to_json(const ClusterDiagnostics& diagnostics, bool include_per_ego) {
    return diagnostics_json_object(diagnostics, include_per_ego).dump(2);
}

namespace {

std::vector<std::size_t> sorted_run_order(
    std::span<const std::pair<NetworkType, ClusterDiagnostics>> runs) {
    std::vector<std::size_t> order(runs.size());
    for (std::size_t i = 0; i < runs.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const NetworkType& ta = runs[a].first;
        const NetworkType& tb = runs[b].first;
        if (ta.kind != tb.kind) return ta.kind < tb.kind;
        return ta.window_days < tb.window_days;
    });
    return order;
}

} // namespace

std::string summary_table_text(std::span<const std::pair<NetworkType, ClusterDiagnostics>> runs) {
    if (runs.empty()) throw std::invalid_argument("summary table needs at least one run");

    const std::vector<std::string> header{
        "network type",
        "cluster size",
        "loss rate at T0",
        "loss rate at T14 - scenario 1",
        "loss rate at T14 - scenario 2",
        "loss rate at T14 - scenario 3",
        "stability rate",
    };
    std::vector<std::vector<std::string>> rows;
    for (const std::size_t i : sorted_run_order(runs)) {
        const auto& [type, d] = runs[i];
        std::vector<std::string> row;
        row.push_back(type.display());
        row.push_back(std::to_string(d.cluster_size));
        row.push_back(format_rate(d.loss_rate_t0));
        for (int s = 1; s <= 3; ++s) {
            const auto it = d.loss_rate_t14.find(s);
            row.push_back(it != d.loss_rate_t14.end() ? format_rate(it->second) : "-");
        }
        row.push_back(d.stability_rate ? format_rate(*d.stability_rate) : "-");
        rows.push_back(std::move(row));
    }

    std::vector<std::size_t> widths(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        widths[c] = header[c].size();
        for (const auto& row : rows) widths[c] = std::max(widths[c], row[c].size());
    }

    std::ostringstream out;
    auto emit_row = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << "  ";
            if (c == 0)
                out << row[c] << std::string(widths[c] - row[c].size(), ' ');
            else
                out << std::string(widths[c] - row[c].size(), ' ') << row[c];
        }
        out << '\n';
    };
    emit_row(header);
    std::size_t rule = 0;
    for (const std::size_t w : widths) rule += w;
    rule += 2 * (widths.size() - 1);
    out << std::string(rule, '-') << '\n';
    for (const auto& row : rows) emit_row(row);
    return out.str();
}

std::string summary_table_json(std::span<const std::pair<NetworkType, ClusterDiagnostics>> runs) {
    if (runs.empty()) throw std::invalid_argument("summary table needs at least one run");
    nlohmann::json j = nlohmann::json::array();
    for (const std::size_t i : sorted_run_order(runs)) {
        const auto& [type, d] = runs[i];
        nlohmann::json row;
        row["network_type"] = std::string(kind_name(type.kind));
        row["window_days"] = type.window_days;
        row["cluster_size"] = d.cluster_size;
        row["loss_rate_t0"] = d.loss_rate_t0;
        nlohmann::json t14;
        for (const auto& [scenario, rate] : d.loss_rate_t14)
            t14["s" + std::to_string(scenario)] = rate;
        row["loss_rate_t14"] = std::move(t14);
        if (d.stability_rate)
            row["stability_rate"] = *d.stability_rate;
        else
            row["stability_rate"] = nullptr;
        j.push_back(std::move(row));
    }
    return j.dump(2);
}

} // namespace egocluster
