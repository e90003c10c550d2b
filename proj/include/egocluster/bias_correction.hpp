// bias_correction.hpp
//
// Readout correction for experiments that only reach part of the traffic.
// A reserved sample represents the clustered population and a leftover
// sample the rest; per-arm means and variances are recombined with
// population weights, then lift, significance and MDE are computed on the
// corrected values.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace egocluster {

struct PopulationSizes {
    std::size_t n_ego_cluster = 0; // members routed through the clustered design
    std::size_t n_leftover = 0;    // members outside it
    std::size_t n_reserve = 0;     // sample drawn from the clustered population
    std::size_t n_t = 0;           // per-arm analysis sample sizes
    std::size_t n_c = 0;
};

// One arm's measurements on the reserved and leftover samples. Variances
// are unit-level sample variances; division by the analysis sample size
// happens inside the lift variance.
struct ArmStats {
    double mean_reserve = 0.0;
    double mean_leftover = 0.0;
    double var_reserve = 0.0;
    double var_leftover = 0.0;
    std::size_t n_reserve = 0;
    std::size_t n_leftover = 0;
};

struct CorrectedReadout {
    double mean_t = 0.0;
    double mean_c = 0.0;
    double var_t = 0.0;
    double var_c = 0.0;
    double delta_pct = 0.0;     // (mean_t - mean_c) / mean_c
    double var_delta_pct = 0.0;
    double p_value = 1.0;
    double mde = 0.0;
    std::vector<std::string> warnings;
};

struct SignificanceConfig {
    double alpha = 0.05;
    double power = 0.8;
};

// Population-weighted mean: reserve carries n_ego_cluster / (n_ego_cluster
// + n_leftover) of the weight, leftover the rest.
double combined_mean(const ArmStats& arm, const PopulationSizes& sizes);

// Matching variance with squared weights; assumes the two samples are
// independent.
double combined_var(const ArmStats& arm, const PopulationSizes& sizes);

// Relative lift of the combined means, its delta-method variance, a
// two-sided normal p-value and the MDE at the given alpha/power.
CorrectedReadout lift_and_significance(const ArmStats& stats_t, const ArmStats& stats_c,
                                       const PopulationSizes& sizes,
                                       const SignificanceConfig& config = {});

// Minimum detectable effect for a two-sided test:
// (z_{1-alpha/2} + z_{power}) * sqrt(var_delta_pct).
double mde(double var_delta_pct, double alpha = 0.05, double power = 0.8);

// Plain per-arm sample, used for full-population and leftover-only
// readouts in the backtest.
struct SampleStats {
    double mean = 0.0;
    double var = 0.0; // unit-level sample variance
    std::size_t n = 0;
};

struct LiftResult {
    double delta_pct = 0.0;
    double var_delta_pct = 0.0;
    double p_value = 1.0;
};

// Delta-method lift of two independent samples.
LiftResult two_sample_lift(const SampleStats& treatment, const SampleStats& control);

struct TwoArmSample {
    SampleStats treatment;
    SampleStats control;
};

struct TwoArmArmStats {
    ArmStats treatment;
    ArmStats control;
};

struct BacktestReport {
    double lift_full = 0.0;      // ground truth: both populations measured
    double lift_leftover = 0.0;  // uncorrected readout from leftover traffic only
    double lift_corrected = 0.0; // recombined readout
    double mde_uncorrected = 0.0;
    double mde_corrected = 0.0;
    double mde_full = 0.0; // what a whole-traffic experiment could detect
    double p_leftover = 1.0;
    double p_corrected = 1.0;
};

// Compares the uncorrected leftover-only readout against the corrected one
// with the full-population readout as reference.
BacktestReport backtest_report(const TwoArmSample& full_population,
                               const TwoArmArmStats& reserve_leftover,
                               const PopulationSizes& sizes,
                               const SignificanceConfig& config = {});

std::string readout_to_json(const CorrectedReadout& readout, const PopulationSizes& sizes,
                            const SignificanceConfig& config = {});

// Single-row table with columns MDE, bias-corrected MDE, relative lift,
// bias-corrected lift, plus a reference line with the full-population
// lift.
std::string backtest_table_text(const BacktestReport& report);
std::string backtest_to_json(const BacktestReport& report);

} // namespace egocluster
