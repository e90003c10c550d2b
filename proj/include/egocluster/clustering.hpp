// clustering.hpp
//
// One-degree label propagation: egos draw a variant from a seeded per-ego
// stream, each alter joins the variant holding the majority of its edge
// weight (exact ties broken by a seeded per-alter coin) and attaches to
// the heaviest ego inside that variant. Includes the exponential-search
// reference that certifies the assignment minimizes total misaligned
// weight on small instances.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "egocluster/snapshot.hpp"

namespace egocluster {

enum class Variant : std::uint8_t { control = 0, treatment = 1 };

std::string_view variant_name(Variant v);
std::optional<Variant> parse_variant(std::string_view token);

using EgoVariantMap = std::unordered_map<MemberId, Variant>;

// Per-alter record of the weight split the assignment saw.
struct AssignmentTrace {
    MemberId alter;
    double treatment_weight = 0.0;
    double control_weight = 0.0;
    bool tie_broken = false;
    double chosen_ego_weight = 0.0;
};

struct AlterAssignment {
    Variant variant;
    MemberId attached_ego;
};

struct SolutionStats {
    std::size_t ego_count = 0;
    std::size_t assigned_alters = 0;
    std::size_t excluded_zero_weight = 0; // alters with no positive-weight edge
    std::size_t dual_role_skipped = 0;    // members kept in their ego role
    std::size_t ties_broken = 0;
};

struct EgoClusterSolution {
    std::optional<NetworkType> network_type;
    std::uint64_t seed = 0;
    double treatment_fraction = 0.5;
    IdMode id_mode = IdMode::text;
    EgoVariantMap ego_variants;
    std::unordered_map<MemberId, AlterAssignment> alter_assignments;
    SolutionStats stats;
    std::vector<AssignmentTrace> traces; // populated only when requested

    std::size_t cluster_size() const { return ego_variants.size() + alter_assignments.size(); }

    // ego -> attached alters, the exact inverse of alter_assignments.
    std::map<MemberId, std::vector<MemberId>> cluster_index() const;
};

// Independent Bernoulli(treatment_fraction) draw per ego from a stream
// keyed by (seed, ego id); identical across runs, platforms, and orderings.
EgoVariantMap assign_ego_variants(std::span<const MemberId> egos, std::uint64_t seed,
                                  double treatment_fraction = 0.5);

struct AlterDecision {
    Variant variant;
    MemberId attached_ego;
    AssignmentTrace trace;
};

// Weighted-majority variant choice plus max-weight attachment for a single
// alter. Exact weight ties between variants are broken by a uniform coin
// from (seed, alter id); attachment ties go to the smallest ego id.
// Throws if the incident edges carry no positive weight.
AlterDecision assign_alter(const MemberId& alter,
                           std::span<const std::pair<MemberId, double>> incident_edges,
                           const EgoVariantMap& ego_variants, std::uint64_t seed,
                           IdMode id_mode = IdMode::text);

struct BuildOptions {
    int threads = 1;
    bool record_traces = false;
    std::optional<NetworkType> network_type; // provenance only
    // When set, step 1 is skipped and these variants are used as-is (must
    // cover every ego in the snapshot).
    std::optional<EgoVariantMap> ego_variants;
};

// Full pipeline over a snapshot. The result is identical for any thread
// count and any alter processing order.
EgoClusterSolution build_solution(const NetworkSnapshot& snapshot, std::uint64_t seed,
                                  double treatment_fraction = 0.5,
                                  const BuildOptions& options = {});

// Sum of every assigned alter's weight toward egos of the opposite variant.
double total_misaligned_weight(const EgoClusterSolution& solution,
                               const NetworkSnapshot& snapshot);

struct BruteForceResult {
    std::unordered_map<MemberId, Variant> alter_variants;
    double min_total_loss = 0.0;
};

// Exhaustive minimum of total misaligned weight over all 2^A alter-variant
// assignments, evaluating each candidate edge by edge. Guarded to at most
// 20 alters.
BruteForceResult brute_force_min_loss(const NetworkSnapshot& snapshot,
                                      const EgoVariantMap& ego_variants);

} // namespace egocluster
