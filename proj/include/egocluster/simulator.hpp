// simulator.hpp
//
// Synthetic interaction graphs with a planted creator-side effect of known
// size. Alters spread weight over a few egos with a tunable concentration
// (affinity 1 = all weight on one ego, 0 = spread evenly), ego outcomes
// respond to the treated share of their incoming weight, so clustered and
// naive viewer-randomized designs can be replayed against ground truth,
// and snapshots can be aged into end-of-window variants.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "egocluster/clustering.hpp"
#include "egocluster/snapshot.hpp"

namespace egocluster {

struct SimConfig {
    std::size_t ego_count = 1000;
    std::size_t alter_count = 10000;
    double mean_degree = 10.0;        // expected egos per alter
    double power_law_exponent = 2.5;  // degree density exponent, must be > 2
    double affinity = 0.8;            // [0, 1]
    double weight_mu = 0.0;           // log-scale location of an alter's total weight
    double weight_sigma = 1.0;        // log-scale spread
    std::uint64_t seed = 0;
};

struct EffectModel {
    enum class Response { linear, saturating };

    double base_rate = 1.0;   // ego outcome with an untreated audience
    double effect_size = 0.1; // added outcome with a fully treated audience
    Response response = Response::linear;
    double noise_sd = 0.0;
    double saturation_k = 3.0; // curvature of the saturating response
};

// f(treated_fraction): 0 at 0, 1 at 1, monotone. The saturating shape is
// (1 - exp(-k x)) / (1 - exp(-k)).
double response_value(const EffectModel& model, double treated_fraction);

// All-treated minus all-control expectation; noise is mean zero, so this
// is exactly effect_size * (f(1) - f(0)) = effect_size.
double true_ate(const EffectModel& model);

// Deterministic per seed. Egos are named e0.., alters a0..; every alter
// draws a degree from the configured power law, a home ego, and a total
// weight, then gives the home ego affinity + (1-affinity)/degree of it and
// every other chosen ego (1-affinity)/degree.
NetworkSnapshot generate_graph(const SimConfig& config);

// Variant experienced by alters nobody assigned (new joiners, excluded
// alters): the platform default bucket, or an independent coin.
enum class LeakagePolicy { control, random };

using OutcomeMap = std::unordered_map<MemberId, double>;

// One outcome per ego of the snapshot: base_rate + effect_size *
// f(treated weight fraction) + normal noise. Alter variants come from the
// map, falling back to the leakage policy.
OutcomeMap simulate_outcomes(const NetworkSnapshot& snapshot,
                             const std::unordered_map<MemberId, Variant>& alter_variants,
                             const EffectModel& model, std::uint64_t seed,
                             LeakagePolicy leakage = LeakagePolicy::control);

struct AteEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t n_treatment = 0;
    std::size_t n_control = 0;
};

// Difference of mean ego outcomes between the solution's treatment and
// control egos, with a pooled two-sample standard error.
AteEstimate estimate_ate(const OutcomeMap& outcomes, const EgoClusterSolution& solution);

enum class Design { ego_cluster, naive_viewer };
std::string_view design_name(Design design);

struct ExperimentRun {
    Design design = Design::ego_cluster;
    OutcomeMap outcomes;
    AteEstimate ate;
    double true_ate = 0.0;
};

// Replays one design on one generated graph. ego_cluster randomizes at
// the cluster level via build_solution; naive_viewer flips an independent
// coin per alter and splits egos into reporting halves at random.
ExperimentRun run_experiment(const NetworkSnapshot& snapshot, Design design,
                             const EffectModel& model, std::uint64_t seed);

struct DesignSummary {
    double mean_estimate = 0.0;
    double bias = 0.0;  // mean estimate minus true ATE
    double power = 0.0; // rejection rate at the configured alpha
};

struct ComparisonReport {
    SimConfig config;
    EffectModel model;
    double true_ate = 0.0;
    double alpha = 0.05;

    struct PerSeed {
        std::uint64_t seed = 0;
        double ego_estimate = 0.0;
        double ego_std_error = 0.0;
        double naive_estimate = 0.0;
        double naive_std_error = 0.0;
    };
    std::vector<PerSeed> per_seed;
    DesignSummary ego_cluster;
    DesignSummary naive_viewer;
    // Rejection rate under a zero planted effect; only meaningful (and only
    // set) when effect_size is 0.
    std::optional<double> null_fpr;
};

// Monte Carlo over seeds, both designs on the same graphs and noise.
// Needs at least 30 seeds for a stable summary.
ComparisonReport run_comparison(const SimConfig& config, const EffectModel& model,
                                std::span<const std::uint64_t> seeds, double alpha = 0.05);

std::string comparison_to_json(const ComparisonReport& report);

struct ChurnConfig {
    double edge_drop_prob = 0.0;   // each T0 edge vanishes independently
    double new_edge_rate = 0.0;    // expected new edges per surviving alter
    double new_alter_rate = 0.0;   // new alters per existing alter
    std::size_t new_alter_degree = 2;
};

// Ages a snapshot: drops edges, adds fresh unit-weight edges from existing
// alters and from newly joined n#-prefixed alters. Deterministic per seed;
// zero churn reproduces the input.
NetworkSnapshot evolve_network(const NetworkSnapshot& snapshot_t0, const ChurnConfig& churn,
                               std::uint64_t seed, std::string label = "T14");

} // namespace egocluster
