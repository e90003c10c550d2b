// diagnostics.hpp
//
// Cluster quality metrics: how much of each ego's edge weight points at
// alters that landed in the other variant (loss rate), how that degrades
// over the experiment window under three traffic scenarios, and how many
// of the original edges survive to the end of the window (stability).

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "egocluster/clustering.hpp"
#include "egocluster/snapshot.hpp"

namespace egocluster {

struct EgoLoss {
    MemberId ego;
    double misaligned_weight = 0.0;
    double total_weight = 0.0;
    double loss_rate = 0.0; // 0 when total_weight is 0 (flagged via total_weight)
};

// Traffic mix assumed for alters that joined after clustering. Scenario 1
// treats all new weight as misaligned, scenario 2 assumes the ramp
// fraction r is split evenly between arms and the remaining (1-r) of
// traffic behaves like control, scenario 3 assumes the new exposure is
// orthogonal to the experiment so only r/2 of it can misalign.
struct ScenarioConfig {
    int scenario = 1; // 1, 2 or 3
    double ramp_fraction = 0.10;
};

struct ClusterDiagnostics {
    std::optional<NetworkType> network_type;
    std::size_t cluster_size = 0;
    double loss_rate_t0 = 0.0;
    double loss_rate_t0_weighted = 0.0; // total misaligned / total weight
    std::map<int, double> loss_rate_t14; // scenario -> rate; empty without a T14 snapshot
    std::optional<double> stability_rate;
    std::vector<EgoLoss> per_ego; // sorted by ego id
    std::size_t zero_weight_egos = 0;
    std::vector<std::string> warnings;
};

// Loss rate of one ego: misaligned weight over total weight, both summed
// across the ego's edges from assigned alters. Throws if the ego is not
// part of the solution.
EgoLoss ego_loss_rate(const EgoClusterSolution& solution, const NetworkSnapshot& snapshot,
                      const MemberId& ego);

// Unweighted mean of per-ego loss rates over egos with positive weight.
// Throws when no ego carries weight.
double overall_loss_rate(const EgoClusterSolution& solution, const NetworkSnapshot& snapshot);

// Projected loss rate on the end-of-window snapshot. Edges from alters
// still assigned in the solution count as misaligned when the variants
// differ; weight from alters the solution has never seen is scored by the
// scenario. Members serving as egos in the solution never count as alters.
double loss_rate_t14(const EgoClusterSolution& solution, const NetworkSnapshot& snapshot_t14,
                     const ScenarioConfig& config);

// Fraction of T0 (alter, ego) pairs with positive weight that still carry
// positive weight at T14, over egos in the solution.
double stability_rate(const NetworkSnapshot& snapshot_t0, const NetworkSnapshot& snapshot_t14,
                      const EgoClusterSolution& solution);

struct DiagnosticsOptions {
    double ramp_fraction = 0.10;
    bool include_per_ego = false; // keep per-ego detail in the result and JSON
};

// Bundles the metrics above; pass nullptr for t14 to skip the
// end-of-window metrics.
ClusterDiagnostics compute_diagnostics(const EgoClusterSolution& solution,
                                       const NetworkSnapshot& snapshot_t0,
                                       const NetworkSnapshot* snapshot_t14,
                                       const DiagnosticsOptions& options = {});

std::string diagnostics_to_json(const ClusterDiagnostics& diagnostics, bool include_per_ego = false);

// One row per network type, sorted by interaction kind then window.
std::string summary_table_text(std::span<const std::pair<NetworkType, ClusterDiagnostics>> runs);
std::string summary_table_json(std::span<const std::pair<NetworkType, ClusterDiagnostics>> runs);

} // namespace egocluster
