// Acceptance gate for the toolkit: ten checks covering the worked
// examples, the exhaustive-minimum oracle, scenario math, determinism,
// simulator recovery, bias correction, the performance envelope and the
// delta-method p-value. Each check prints one PASS/FAIL line; the exit
// code is the number of failures.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <sys/resource.h>
#include <vector>

#include "egocluster/bias_correction.hpp"
#include "egocluster/clustering.hpp"
#include "egocluster/diagnostics.hpp"
#include "egocluster/rng.hpp"
#include "egocluster/simulator.hpp"
#include "egocluster/snapshot.hpp"
#include "egocluster/solution_io.hpp"

using namespace egocluster;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("%s  criterion %2d  %-28s  %s\n", pass ? "PASS" : "FAIL", id, name,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

template <typename Fn>
void criterion(int id, const char* name, Fn&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        report(id, name, false, std::string("exception: ") + e.what());
    }
}

double elapsed_s(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

RawEdge edge(std::string alter, std::string ego, double w) {
    return RawEdge{std::move(alter), std::move(ego), w, InteractionKind::unspecified, 0};
}

// --- 1: single-alter worked example ---------------------------------------

void check_worked_example() {
    EgoVariantMap variants{{"t1", Variant::treatment}, {"t2", Variant::treatment},
                           {"t3", Variant::treatment}, {"c1", Variant::control},
                           {"c2", Variant::control}};
    std::vector<std::pair<MemberId, double>> edges{
        {"t1", 2}, {"t2", 2}, {"t3", 2}, {"c1", 6}, {"c2", 5}};
    const AlterDecision d = assign_alter("viewer", edges, variants, 1);
    const bool pass = d.variant == Variant::control && d.attached_ego == "c1" &&
                      d.trace.treatment_weight == 6.0 && d.trace.control_weight == 11.0;
    report(1, "worked example assignment", pass,
           "variant=" + std::string(variant_name(d.variant)) + " ego=" + d.attached_ego +
               " (wT=6 wC=11)");
}

// --- 2: loss-rate worked example ------------------------------------------

void check_loss_worked_example() {
    std::vector<RawEdge> rows;
    for (int i = 1; i <= 8; ++i) rows.push_back(edge("d" + std::to_string(i), "A", 1));
    for (int i = 6; i <= 8; ++i) rows.push_back(edge("d" + std::to_string(i), "B", 2));
    const auto snap = NetworkSnapshot::build(rows, IdMode::text, "T0");
    BuildOptions opts;
    opts.ego_variants = EgoVariantMap{{"A", Variant::treatment}, {"B", Variant::control}};
    const auto sol = build_solution(snap, 1, 0.5, opts);
    const EgoLoss loss = ego_loss_rate(sol, snap, "A");
    const bool pass = loss.loss_rate == 0.375 && loss.misaligned_weight == 3.0 &&
                      loss.total_weight == 8.0;
    report(2, "loss-rate worked example", pass,
           "ego A loss rate = " + std::to_string(loss.loss_rate) + " (want 0.375 exactly)");
}

// --- 3: exhaustive-minimum oracle ------------------------------------------

NetworkSnapshot random_instance(std::mt19937_64& rng, int max_egos, int max_alters) {
    const int egos = 2 + static_cast<int>(rng() % (max_egos - 1));
    const int alters = 1 + static_cast<int>(rng() % max_alters);
    std::vector<RawEdge> rows;
    std::vector<int> targets(egos);
    std::iota(targets.begin(), targets.end(), 0);
    for (int a = 0; a < alters; ++a) {
        std::shuffle(targets.begin(), targets.end(), rng);
        const int degree = 1 + static_cast<int>(rng() % std::min(egos, 4));
        for (int d = 0; d < degree; ++d)
            rows.push_back(edge("a" + std::to_string(a), "e" + std::to_string(targets[d]),
                                static_cast<double>(1 + rng() % 9)));
    }
    return NetworkSnapshot::build(std::move(rows), IdMode::text, "T0");
}

void check_oracle() {
    const auto start = Clock::now();
    std::mt19937_64 rng(20240);
    int matched = 0;
    const int instances = 200;
    for (int i = 0; i < instances; ++i) {
        const auto snap = random_instance(rng, 6, 12);
        const auto sol = build_solution(snap, 7000 + i);
        const double algo = total_misaligned_weight(sol, snap);
        const auto brute = brute_force_min_loss(snap, sol.ego_variants);
        if (algo == brute.min_total_loss) ++matched;
    }
    const double secs = elapsed_s(start);
    const bool pass = matched == instances && secs < 60.0;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%d/%d optimal in %.2f s (limit 60 s)", matched, instances,
                  secs);
    report(3, "exhaustive-minimum oracle", pass, buf);
}

// --- 4: end-of-window scenario math ----------------------------------------

void check_scenarios() {
    const double r = 0.10;
    int bad_monotone = 0;
    int bad_formula = 0;
    int bad_identity = 0;
    double worst = 0.0;

    for (int i = 0; i < 100; ++i) {
        std::mt19937_64 rng(9000 + i);
        std::vector<RawEdge> t0_rows;
        for (int a = 0; a < 60; ++a) {
            const int degree = 1 + static_cast<int>(rng() % 3);
            for (int d = 0; d < degree; ++d)
                t0_rows.push_back(edge("v" + std::to_string(a), "g" + std::to_string(rng() % 10),
                                       static_cast<double>(1 + rng() % 9)));
        }
        const auto t0 = NetworkSnapshot::build(t0_rows, IdMode::text, "T0");
        const auto sol = build_solution(t0, 500 + i);

        // age the graph: drop a fifth, reweigh a few, add unseen alters
        std::vector<RawEdge> t14_rows;
        for (const auto& row : t0_rows) {
            if (rng() % 5 == 0) continue;
            RawEdge kept = row;
            if (rng() % 4 == 0) kept.weight = static_cast<double>(1 + rng() % 9);
            t14_rows.push_back(kept);
        }
        const int fresh = 1 + static_cast<int>(rng() % 8);
        for (int a = 0; a < fresh; ++a)
            t14_rows.push_back(edge("x" + std::to_string(a), "g" + std::to_string(rng() % 10),
                                    static_cast<double>(1 + rng() % 9)));
        const auto t14 = NetworkSnapshot::build(t14_rows, IdMode::text, "T14");

        std::array<double, 3> got{};
        for (int s = 1; s <= 3; ++s) {
            ScenarioConfig cfg;
            cfg.scenario = s;
            cfg.ramp_fraction = r;
            got[s - 1] = loss_rate_t14(sol, t14, cfg);
        }
        if (!(got[0] >= got[1] && got[1] >= got[2])) ++bad_monotone;

        // independent recomputation from the raw rows
        std::map<std::pair<MemberId, MemberId>, double> agg;
        for (const auto& row : t14_rows) agg[{row.ego, row.alter}] += row.weight;
        std::array<double, 3> sums{};
        int eligible = 0;
        for (const auto& [ego, v] : sol.ego_variants) {
            double mis = 0.0, fresh_w = 0.0, total = 0.0;
            for (auto it = agg.lower_bound({ego, MemberId()});
                 it != agg.end() && it->first.first == ego; ++it) {
                const MemberId& alter = it->first.second;
                const double w = it->second;
                if (sol.ego_variants.count(alter)) continue;
                const auto asg = sol.alter_assignments.find(alter);
                total += w;
                if (asg != sol.alter_assignments.end()) {
                    if (asg->second.variant != v) mis += w;
                } else {
                    fresh_w += w;
                }
            }
            if (!(total > 0.0)) continue;
            ++eligible;
            const double treated = v == Variant::treatment ? 1.0 : 0.0;
            sums[0] += (mis + fresh_w) / total;
            sums[1] += (mis + (r / 2.0) * fresh_w + (1.0 - r) * fresh_w * treated) / total;
            sums[2] += (mis + (r / 2.0) * fresh_w) / total;
        }
        for (int s = 0; s < 3; ++s) {
            const double want = sums[s] / static_cast<double>(eligible);
            const double diff = std::fabs(got[s] - want);
            worst = std::max(worst, diff);
            if (diff > 1e-12) ++bad_formula;
        }

        // unchanged network: every scenario collapses to the T0 rate
        const auto t14_same = NetworkSnapshot::build(t0_rows, IdMode::text, "T14");
        const double base = overall_loss_rate(sol, t0);
        for (int s = 1; s <= 3; ++s) {
            ScenarioConfig cfg;
            cfg.scenario = s;
            cfg.ramp_fraction = r;
            if (loss_rate_t14(sol, t14_same, cfg) != base) ++bad_identity;
        }
    }
    const bool pass = bad_monotone == 0 && bad_formula == 0 && bad_identity == 0;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "100 pairs: monotone fails %d, formula fails %d (worst |diff| %.2e, tol 1e-12), "
                  "identity fails %d",
                  bad_monotone, bad_formula, worst, bad_identity);
    report(4, "scenario math", pass, buf);
}

// --- 5: thread-count determinism -------------------------------------------

void check_thread_determinism() {
    SimConfig cfg;
    cfg.ego_count = 2000;
    cfg.alter_count = 13500;
    cfg.mean_degree = 8.0;
    cfg.affinity = 0.7;
    cfg.seed = 90210;
    const auto snap = generate_graph(cfg);

    std::vector<std::string> files;
    for (const int threads : {1, 4, 8}) {
        BuildOptions opts;
        opts.threads = threads;
        const auto sol = build_solution(snap, 606, 0.5, opts);
        std::ostringstream out;
        write_solution_csv(sol, out);
        files.push_back(out.str());
    }
    const bool pass =
        snap.edges().size() >= 100000 && files[0] == files[1] && files[0] == files[2];
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%zu edges, solution file %zu bytes, 1/4/8 threads %s",
                  snap.edges().size(), files[0].size(), pass ? "identical" : "DIFFER");
    report(5, "thread determinism", pass, buf);
}

// --- 6: simulator recovery --------------------------------------------------

void check_simulator_recovery() {
    // full affinity, no noise: the clustered design reads the effect exactly
    SimConfig clean;
    clean.ego_count = 300;
    clean.alter_count = 1500;
    clean.mean_degree = 5.0;
    clean.affinity = 1.0;
    clean.seed = 77;
    EffectModel model;
    model.effect_size = 0.1;
    const auto run = run_experiment(generate_graph(clean), Design::ego_cluster, model, 77);
    const double exact_err = std::fabs(run.ate.estimate - model.effect_size);

    // zero affinity: alters spread evenly, the loss rate pins near one half
    SimConfig spread;
    spread.ego_count = 600;
    spread.alter_count = 1000;
    spread.mean_degree = 150.0;
    spread.power_law_exponent = 8.0;
    spread.affinity = 0.0;
    spread.weight_sigma = 0.3;
    double loss_sum = 0.0;
    const int loss_seeds = 50;
    for (int s = 0; s < loss_seeds; ++s) {
        spread.seed = static_cast<std::uint64_t>(s);
        const auto snap = generate_graph(spread);
        loss_sum += overall_loss_rate(build_solution(snap, spread.seed), snap);
    }
    const double mean_loss = loss_sum / loss_seeds;

    // null effect: the clustered test keeps its nominal false-positive rate
    SimConfig null_cfg;
    null_cfg.ego_count = 200;
    null_cfg.alter_count = 800;
    null_cfg.mean_degree = 5.0;
    null_cfg.affinity = 0.8;
    EffectModel null_model;
    null_model.effect_size = 0.0;
    null_model.noise_sd = 0.1;
    std::vector<std::uint64_t> seeds(1000);
    std::iota(seeds.begin(), seeds.end(), 1);
    const auto null_report = run_comparison(null_cfg, null_model, seeds, 0.05);
    const double fpr = null_report.null_fpr.value_or(-1.0);

    const bool pass = exact_err <= 1e-12 && mean_loss >= 0.45 && mean_loss <= 0.55 &&
                      fpr >= 0.03 && fpr <= 0.07;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "exact recovery err %.1e (tol 1e-12); affinity-0 loss %.3f in [0.45,0.55]; "
                  "null FPR %.3f in [0.03,0.07]",
                  exact_err, mean_loss, fpr);
    report(6, "simulator recovery", pass, buf);
}

// --- 7: design comparison ---------------------------------------------------

void check_design_comparison() {
    SimConfig cfg;
    cfg.ego_count = 300;
    cfg.alter_count = 1500;
    cfg.mean_degree = 6.0;
    cfg.affinity = 0.9;
    EffectModel model;
    model.effect_size = 0.1;
    model.noise_sd = 0.05;
    std::vector<std::uint64_t> seeds(50);
    std::iota(seeds.begin(), seeds.end(), 3000);
    const auto rep = run_comparison(cfg, model, seeds, 0.05);

    double naive_sq = 0.0;
    for (const auto& row : rep.per_seed) {
        const double d = row.naive_estimate - rep.naive_viewer.mean_estimate;
        naive_sq += d * d;
    }
    const double naive_sd = std::sqrt(naive_sq / (rep.per_seed.size() - 1));
    const double naive_se = naive_sd / std::sqrt(static_cast<double>(rep.per_seed.size()));

    const bool naive_null = std::fabs(rep.naive_viewer.mean_estimate) <= 3.0 * naive_se;
    const bool ego_detects = rep.ego_cluster.mean_estimate > 0.5 * model.effect_size;
    const bool pass = naive_null && ego_detects;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "naive mean %.4f (|.| <= 3 SE = %.4f); clustered mean %.4f > 0.5*effect %.3f",
                  rep.naive_viewer.mean_estimate, 3.0 * naive_se, rep.ego_cluster.mean_estimate,
                  0.5 * model.effect_size);
    report(7, "design comparison", pass, buf);
}

// --- 8: bias correction consistency -----------------------------------------

void check_bias_correction() {
    // engaged stratum runs at twice the baseline metric and gets a 4% lift,
    // the leftover stratum a 1% lift; truth is the population lift
    const double mu_e = 2.0, mu_l = 1.0, sd = 1.0;
    const double lift_e = 0.04, lift_l = 0.01;
    const std::size_t n_ego = 100000, n_left = 100000;
    const std::size_t n_reserve = 10000, n_leftover_sample = 100000;
    const double w = static_cast<double>(n_ego) / static_cast<double>(n_ego + n_left);
    const double truth_t = w * mu_e * (1 + lift_e) + (1 - w) * mu_l * (1 + lift_l);
    const double truth_c = w * mu_e + (1 - w) * mu_l;
    const double true_lift = (truth_t - truth_c) / truth_c;

    const int replicates = 60;
    rng::SplitMix64 gen(0xb1a5c0de);
    auto sampled_mean = [&](double mu, std::size_t n) {
        return mu + sd / std::sqrt(static_cast<double>(n)) * gen.normal();
    };

    std::vector<double> corrected, leftover;
    double mde_corrected_sum = 0.0, mde_full_sum = 0.0;
    // population variance of the full mixture, for the whole-traffic readout
    auto mix_var = [&](double lift) {
        const double mt = w * mu_e * (1 + lift_e * lift) + (1 - w) * mu_l * (1 + lift_l * lift);
        return w * (sd * sd + mu_e * (1 + lift_e * lift) * mu_e * (1 + lift_e * lift)) +
               (1 - w) * (sd * sd + mu_l * (1 + lift_l * lift) * mu_l * (1 + lift_l * lift)) -
               mt * mt;
    };
    const double full_n = 100000.0;

    for (int rep = 0; rep < replicates; ++rep) {
        ArmStats t{sampled_mean(mu_e * (1 + lift_e), n_reserve),
                   sampled_mean(mu_l * (1 + lift_l), n_leftover_sample),
                   sd * sd, sd * sd, n_reserve, n_leftover_sample};
        ArmStats c{sampled_mean(mu_e, n_reserve), sampled_mean(mu_l, n_leftover_sample),
                   sd * sd, sd * sd, n_reserve, n_leftover_sample};
        PopulationSizes sizes{n_ego, n_left, n_reserve, n_reserve, n_reserve};
        const auto readout = lift_and_significance(t, c, sizes);
        corrected.push_back(readout.delta_pct);
        mde_corrected_sum += readout.mde;

        const SampleStats lt{t.mean_leftover, sd * sd, n_leftover_sample};
        const SampleStats lc{c.mean_leftover, sd * sd, n_leftover_sample};
        leftover.push_back(two_sample_lift(lt, lc).delta_pct);

        const SampleStats ft{sampled_mean(truth_t, static_cast<std::size_t>(full_n)),
                             mix_var(1.0), static_cast<std::size_t>(full_n)};
        const SampleStats fc{sampled_mean(truth_c, static_cast<std::size_t>(full_n)),
                             mix_var(0.0), static_cast<std::size_t>(full_n)};
        mde_full_sum += mde(two_sample_lift(ft, fc).var_delta_pct);
    }

    auto mean_sd = [](const std::vector<double>& xs) {
        double m = 0.0;
        for (const double x : xs) m += x;
        m /= static_cast<double>(xs.size());
        double ss = 0.0;
        for (const double x : xs) ss += (x - m) * (x - m);
        return std::pair<double, double>{m, std::sqrt(ss / (xs.size() - 1))};
    };
    const auto [mean_corr, sd_corr] = mean_sd(corrected);
    const auto [mean_left, sd_left] = mean_sd(leftover);
    const double se_corr = sd_corr / std::sqrt(static_cast<double>(replicates));
    const double se_left = sd_left / std::sqrt(static_cast<double>(replicates));

    const bool corrected_ok = std::fabs(mean_corr - true_lift) <= 3.0 * se_corr;
    const bool leftover_biased = std::fabs(mean_left - true_lift) > 3.0 * se_left;
    const bool mde_ordered =
        mde_corrected_sum / replicates > mde_full_sum / replicates;
    const bool pass = corrected_ok && leftover_biased && mde_ordered;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "truth %.4f: corrected %.4f (+-3 SE %.4f), leftover %.4f off by %.1f SE; "
                  "corrected MDE %.4f%% > full MDE %.4f%%",
                  true_lift, mean_corr, 3.0 * se_corr, mean_left,
                  std::fabs(mean_left - true_lift) / se_left,
                  100.0 * mde_corrected_sum / replicates, 100.0 * mde_full_sum / replicates);
    report(8, "bias correction consistency", pass, buf);
}

// --- 9: performance envelope ------------------------------------------------

void check_performance() {
    SimConfig cfg;
    cfg.ego_count = 100000;
    cfg.alter_count = 1000000;
    cfg.mean_degree = 10.0;
    cfg.power_law_exponent = 2.5;
    cfg.affinity = 0.8;
    cfg.seed = 4;

    const auto t_gen = Clock::now();
    const auto snap = generate_graph(cfg);
    const double gen_s = elapsed_s(t_gen);

    const auto t_cluster = Clock::now();
    BuildOptions opts;
    opts.threads = 4;
    const auto sol = build_solution(snap, 99, 0.5, opts);
    const double cluster_s = elapsed_s(t_cluster);

    struct rusage usage{};
    getrusage(RUSAGE_SELF, &usage);
    const double peak_gb = static_cast<double>(usage.ru_maxrss) / (1024.0 * 1024.0);

    const double total_s = gen_s + cluster_s;
    const bool pass = snap.edges().size() >= 9000000 && total_s < 60.0 && peak_gb < 4.0 &&
                      sol.stats.assigned_alters > 900000;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "%zu edges, %zu alters assigned: generate %.1f s + cluster %.1f s = %.1f s "
                  "(limit 60), peak rss %.2f GB (limit 4)",
                  snap.edges().size(), sol.stats.assigned_alters, gen_s, cluster_s, total_s,
                  peak_gb);
    report(9, "performance envelope", pass, buf);
}

// --- 10: delta-method p-value vs Monte Carlo --------------------------------

void check_p_value_oracle() {
    const SampleStats t{1.05, 1.0, 10000};
    const SampleStats c{1.00, 1.0, 10000};
    const auto lift = two_sample_lift(t, c);

    // under the null both arms share the control mean; sample means are
    // normal by CLT, so draw them directly and count exceedances
    const double se = 1.0 / std::sqrt(10000.0);
    const std::size_t replicates = 1000000;
    rng::SplitMix64 gen(0xdeadbeefcafe);
    std::size_t exceed = 0;
    for (std::size_t i = 0; i < replicates; ++i) {
        const double mt = 1.0 + se * gen.normal();
        const double mc = 1.0 + se * gen.normal();
        const double delta = (mt - mc) / mc;
        if (std::fabs(delta) >= std::fabs(lift.delta_pct)) ++exceed;
    }
    const double p_mc = static_cast<double>(exceed) / static_cast<double>(replicates);
    const double diff = std::fabs(lift.p_value - p_mc);
    const bool pass = diff < 0.01;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "delta-method p %.6f vs monte carlo p %.6f (1e6 replicates), |diff| %.6f < 0.01",
                  lift.p_value, p_mc, diff);
    report(10, "p-value oracle", pass, buf);
}

} // namespace

int main() {
    const auto start = Clock::now();
    criterion(1, "worked example assignment", check_worked_example);
    criterion(2, "loss-rate worked example", check_loss_worked_example);
    criterion(3, "exhaustive-minimum oracle", check_oracle);
    criterion(4, "scenario math", check_scenarios);
    criterion(5, "thread determinism", check_thread_determinism);
    criterion(6, "simulator recovery", check_simulator_recovery);
    criterion(7, "design comparison", check_design_comparison);
    criterion(8, "bias correction consistency", check_bias_correction);
    criterion(9, "performance envelope", check_performance);
    criterion(10, "p-value oracle", check_p_value_oracle);
    std::printf("%d/10 criteria passed in %.1f s\n", 10 - failures, elapsed_s(start));
    return failures;
}
