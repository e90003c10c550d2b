// bias_correction.cpp

#include "egocluster/bias_correction.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

#include "json.hpp"

namespace egocluster {

namespace {

const boost::math::normal_distribution<double> std_normal(0.0, 1.0);

void check_sizes(const PopulationSizes& sizes) {
    if (sizes.n_ego_cluster == 0 || sizes.n_leftover == 0 || sizes.n_reserve == 0 ||
        sizes.n_t == 0 || sizes.n_c == 0)
        throw std::invalid_argument("population sizes must all be positive");
    if (sizes.n_reserve > sizes.n_ego_cluster)
        throw std::invalid_argument("reserve cannot exceed the clustered population");
}

void check_arm(const ArmStats& arm) {
    if (!(std::isfinite(arm.mean_reserve) && std::isfinite(arm.mean_leftover)))
        throw std::invalid_argument("arm means must be finite");
    if (!(arm.var_reserve >= 0.0 && arm.var_leftover >= 0.0))
        throw std::invalid_argument("arm variances must be non-negative");
    if (arm.n_reserve == 0 || arm.n_leftover == 0)
        throw std::invalid_argument("arm sample counts must be positive");
}

void check_config(const SignificanceConfig& config) {
    if (!(config.alpha > 0.0 && config.alpha < 1.0))
        throw std::invalid_argument("alpha must be in (0, 1)");
    if (!(config.power > 0.0 && config.power < 1.0))
        throw std::invalid_argument("power must be in (0, 1)");
}

double two_sided_p(double z) {
    return 2.0 * boost::math::cdf(std_normal, -std::fabs(z));
}

// Shared core of the two readout paths: relative lift of two means with
// the delta-method variance Var_T/(M_C^2 n_T) + M_T^2 Var_C/(M_C^4 n_C).
LiftResult lift_core(double mean_t, double var_t, std::size_t n_t, double mean_c, double var_c,
                     std::size_t n_c, std::vector<std::string>* warnings) {
    if (mean_c == 0.0) throw std::domain_error("control mean is zero; relative lift is undefined");
    if (n_t == 0 || n_c == 0) throw std::invalid_argument("analysis sample sizes must be positive");

    LiftResult result;
    result.delta_pct = (mean_t - mean_c) / mean_c;
    const double mc2 = mean_c * mean_c;
    result.var_delta_pct = var_t / (mc2 * static_cast<double>(n_t)) +
                           mean_t * mean_t * var_c / (mc2 * mc2 * static_cast<double>(n_c));
    if (result.delta_pct == 0.0) {
        result.p_value = 1.0;
    } else if (result.var_delta_pct == 0.0) {
        result.p_value = 0.0;
        if (warnings)
            warnings->push_back("lift variance is zero with a non-zero lift; p-value pinned to 0");
    } else {
        result.p_value = two_sided_p(result.delta_pct / std::sqrt(result.var_delta_pct));
    }
    return result;
}

} // namespace

double combined_mean(const ArmStats& arm, const PopulationSizes& sizes) {
    check_sizes(sizes);
    check_arm(arm);
    const double total = static_cast<double>(sizes.n_ego_cluster + sizes.n_leftover);
    const double w_reserve = static_cast<double>(sizes.n_ego_cluster) / total;
    const double w_leftover = static_cast<double>(sizes.n_leftover) / total;
    return arm.mean_reserve * w_reserve + arm.mean_leftover * w_leftover;
}

double combined_var(const ArmStats& arm, const PopulationSizes& sizes) {
    check_sizes(sizes);
    check_arm(arm);
    const double total = static_cast<double>(sizes.n_ego_cluster + sizes.n_leftover);
    const double w_reserve = static_cast<double>(sizes.n_ego_cluster) / total;
    const double w_leftover = static_cast<double>(sizes.n_leftover) / total;
    return arm.var_reserve * w_reserve * w_reserve + arm.var_leftover * w_leftover * w_leftover;
}

CorrectedReadout lift_and_significance(const ArmStats& stats_t, const ArmStats& stats_c,
                                       const PopulationSizes& sizes,
                                       const SignificanceConfig& config) {
    check_config(config);
    CorrectedReadout readout;
    readout.mean_t = combined_mean(stats_t, sizes);
    readout.mean_c = combined_mean(stats_c, sizes);
    readout.var_t = combined_var(stats_t, sizes);
    readout.var_c = combined_var(stats_c, sizes);
    const LiftResult lift = lift_core(readout.mean_t, readout.var_t, sizes.n_t, readout.mean_c,
                                      readout.var_c, sizes.n_c, &readout.warnings);
    readout.delta_pct = lift.delta_pct;
    readout.var_delta_pct = lift.var_delta_pct;
    readout.p_value = lift.p_value;
    readout.mde = mde(readout.var_delta_pct, config.alpha, config.power);
    return readout;
}

double mde(double var_delta_pct, double alpha, double power) {
    if (!(var_delta_pct >= 0.0))
        throw std::invalid_argument("var_delta_pct must be non-negative");
    check_config({alpha, power});
    const double z_alpha = boost::math::quantile(std_normal, 1.0 - alpha / 2.0);
    const double z_power = boost::math::quantile(std_normal, power);
    return (z_alpha + z_power) * std::sqrt(var_delta_pct);
}

LiftResult two_sample_lift(const SampleStats& treatment, const SampleStats& control) {
    if (!(treatment.var >= 0.0 && control.var >= 0.0))
        throw std::invalid_argument("sample variances must be non-negative");
    return lift_core(treatment.mean, treatment.var, treatment.n, control.mean, control.var,
                     control.n, nullptr);
}

BacktestReport backtest_report(const TwoArmSample& full_population,
                               const TwoArmArmStats& reserve_leftover,
                               const PopulationSizes& sizes, const SignificanceConfig& config) {
    check_config(config);
    BacktestReport report;

    const LiftResult full = two_sample_lift(full_population.treatment, full_population.control);
    report.lift_full = full.delta_pct;
    report.mde_full = mde(full.var_delta_pct, config.alpha, config.power);

    // Uncorrected readout: pretend the leftover sample is the whole story.
    const SampleStats left_t{reserve_leftover.treatment.mean_leftover,
                             reserve_leftover.treatment.var_leftover,
                             reserve_leftover.treatment.n_leftover};
    const SampleStats left_c{reserve_leftover.control.mean_leftover,
                             reserve_leftover.control.var_leftover,
                             reserve_leftover.control.n_leftover};
    const LiftResult leftover = two_sample_lift(left_t, left_c);
    report.lift_leftover = leftover.delta_pct;
    report.p_leftover = leftover.p_value;
    report.mde_uncorrected = mde(leftover.var_delta_pct, config.alpha, config.power);

    const CorrectedReadout corrected =
        lift_and_significance(reserve_leftover.treatment, reserve_leftover.control, sizes, config);
    report.lift_corrected = corrected.delta_pct;
    report.p_corrected = corrected.p_value;
    report.mde_corrected = corrected.mde;
    return report;
}

std::string readout_to_json(const CorrectedReadout& readout, const PopulationSizes& sizes,
                            const SignificanceConfig& config) {
    nlohmann::json j;
    j["mean_t"] = readout.mean_t;
    j["mean_c"] = readout.mean_c;
    j["var_t"] = readout.var_t;
    j["var_c"] = readout.var_c;
    j["delta_pct"] = readout.delta_pct;
    j["var_delta_pct"] = readout.var_delta_pct;
    j["p_value"] = readout.p_value;
    j["mde"] = readout.mde;
    j["config"] = {{"alpha", config.alpha},
                   {"power", config.power},
                   {"n_ego_cluster", sizes.n_ego_cluster},
                   {"n_leftover", sizes.n_leftover},
                   {"n_reserve", sizes.n_reserve},
                   {"n_t", sizes.n_t},
                   {"n_c", sizes.n_c}};
    j["warnings"] = readout.warnings;
    return j.dump(2);
}

namespace {

std::string pct(double value) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4f%%", value * 100.0);
    return buf;
}

} // namespace

std::string backtest_table_text(const BacktestReport& report) {
    const std::vector<std::string> header{"MDE", "bias-corrected MDE", "Relative lift",
                                          "Bias-corrected lift"};
    const std::vector<std::string> row{pct(report.mde_uncorrected), pct(report.mde_corrected),
                                       pct(report.lift_leftover), pct(report.lift_corrected)};
    std::vector<std::size_t> widths(header.size());
    for (std::size_t c = 0; c < header.size(); ++c)
        widths[c] = std::max(header[c].size(), row[c].size());

    std::ostringstream out;
    auto emit = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c) out << "  ";
            out << std::string(widths[c] - cells[c].size(), ' ') << cells[c];
        }
        out << '\n';
    };
    emit(header);
    std::size_t rule = 2 * (widths.size() - 1);
    for (const std::size_t w : widths) rule += w;
    out << std::string(rule, '-') << '\n';
    emit(row);
    out << "full-population lift: " << pct(report.lift_full) << '\n';
    return out.str();
}

std::string backtest_to_json(const BacktestReport& report) {
    nlohmann::json j;
    j["lift_full"] = report.lift_full;
    j["lift_leftover"] = report.lift_leftover;
    j["lift_corrected"] = report.lift_corrected;
    j["mde_uncorrected"] = report.mde_uncorrected;
    j["mde_corrected"] = report.mde_corrected;
    j["mde_full"] = report.mde_full;
    j["p_leftover"] = report.p_leftover;
    j["p_corrected"] = report.p_corrected;
    return j.dump(2);
}

} // namespace egocluster
