// simulator.cpp

#include "egocluster/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include <boost/math/distributions/normal.hpp>

#include "json.hpp"

#include "egocluster/rng.hpp"

namespace egocluster {

namespace {

void check_config(const SimConfig& config) {
    if (config.ego_count == 0 || config.alter_count == 0)
        throw std::invalid_argument("ego_count and alter_count must be positive");
    if (!(config.mean_degree >= 1.0))
        throw std::invalid_argument("mean_degree must be at least 1");
    if (config.mean_degree > static_cast<double>(config.ego_count))
        throw std::invalid_argument("mean_degree cannot exceed ego_count");
    if (!(config.power_law_exponent > 2.0))
        throw std::invalid_argument("power_law_exponent must exceed 2 for a finite mean degree");
    if (!(config.affinity >= 0.0 && config.affinity <= 1.0))
        throw std::invalid_argument("affinity must be in [0, 1]");
    if (!(config.weight_sigma >= 0.0))
        throw std::invalid_argument("weight_sigma must be non-negative");
}

void check_model(const EffectModel& model) {
    if (!(std::isfinite(model.base_rate) && std::isfinite(model.effect_size)))
        throw std::invalid_argument("base_rate and effect_size must be finite");
    if (!(model.noise_sd >= 0.0)) throw std::invalid_argument("noise_sd must be non-negative");
    if (model.response == EffectModel::Response::saturating && !(model.saturation_k > 0.0))
        throw std::invalid_argument("saturation_k must be positive");
}

// d distinct ego indices in [0, n); out[0] is the forced home ego.
void pick_distinct_egos(rng::SplitMix64& gen, std::uint32_t n, std::uint32_t d,
                        std::uint32_t home, std::vector<std::uint32_t>& out) {
    out.clear();
    out.push_back(home);
    if (d <= 1) return;
    if (d > n / 2) {
        // Dense request: partial Fisher-Yates over the full ego range.
        std::vector<std::uint32_t> idx(n);
        for (std::uint32_t i = 0; i < n; ++i) idx[i] = i;
        std::swap(idx[0], idx[home]);
        for (std::uint32_t k = 1; k < d; ++k) {
            const std::uint32_t j = k + static_cast<std::uint32_t>(gen.below(n - k));
            std::swap(idx[k], idx[j]);
            out.push_back(idx[k]);
        }
        return;
    }
    if (d <= 32) {
        while (out.size() < d) {
            const std::uint32_t c = static_cast<std::uint32_t>(gen.below(n));
            if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
        }
        return;
    }
    std::unordered_set<std::uint32_t> seen(out.begin(), out.end());
    while (out.size() < d) {
        const std::uint32_t c = static_cast<std::uint32_t>(gen.below(n));
        if (seen.insert(c).second) out.push_back(c);
    }
}

boost::math::normal_distribution<double> std_normal{0.0, 1.0};

// Pooled two-sample difference of means over ego-level outcomes.
AteEstimate pooled_difference(std::span<const double> treatment, std::span<const double> control) {
    if (treatment.empty() || control.empty())
        throw std::runtime_error("both arms need at least one ego to estimate the effect");
    AteEstimate est;
    est.n_treatment = treatment.size();
    est.n_control = control.size();

    auto mean_of = [](std::span<const double> xs) {
        double sum = 0.0;
        for (const double x : xs) sum += x;
        return sum / static_cast<double>(xs.size());
    };
    const double mean_t = mean_of(treatment);
    const double mean_c = mean_of(control);
    est.estimate = mean_t - mean_c;

    auto ss_of = [](std::span<const double> xs, double mean) {
        double ss = 0.0;
        for (const double x : xs) ss += (x - mean) * (x - mean);
        return ss;
    };
    const std::size_t df = treatment.size() + control.size() - 2;
    if (df == 0) {
        est.std_error = std::numeric_limits<double>::quiet_NaN();
        return est;
    }
    const double pooled =
        (ss_of(treatment, mean_t) + ss_of(control, mean_c)) / static_cast<double>(df);
    est.std_error = std::sqrt(pooled * (1.0 / static_cast<double>(treatment.size()) +
                                        1.0 / static_cast<double>(control.size())));
    return est;
}

std::vector<const MemberId*> sorted_solution_egos(const EgoClusterSolution& solution) {
    std::vector<const MemberId*> egos;
    egos.reserve(solution.ego_variants.size());
    for (const auto& [name, variant] : solution.ego_variants) egos.push_back(&name);
    std::sort(egos.begin(), egos.end(), [&](const MemberId* a, const MemberId* b) {
        return id_less(*a, *b, solution.id_mode);
    });
    return egos;
}

} // namespace

double response_value(const EffectModel& model, double treated_fraction) {
    const double x = std::clamp(treated_fraction, 0.0, 1.0);
    switch (model.response) {
        case EffectModel::Response::linear:
            return x;
        case EffectModel::Response::saturating: {
            const double k = model.saturation_k;
            return (1.0 - std::exp(-k * x)) / (1.0 - std::exp(-k));
        }
    }
    return x;
}

double true_ate(const EffectModel& model) {
    return model.effect_size * (response_value(model, 1.0) - response_value(model, 0.0));
}

NetworkSnapshot generate_graph(const SimConfig& config) {
    check_config(config);
    const std::uint32_t n_egos = static_cast<std::uint32_t>(config.ego_count);
    const std::uint32_t n_alters = static_cast<std::uint32_t>(config.alter_count);

    std::vector<MemberId> members;
    members.reserve(config.ego_count + config.alter_count);
    for (std::uint32_t j = 0; j < n_egos; ++j) members.push_back("e" + std::to_string(j));
    for (std::uint32_t i = 0; i < n_alters; ++i) members.push_back("a" + std::to_string(i));

    // pdf(x) ~ x^-p on [xmin, inf) has mean xmin * (p-1) / (p-2).
    const double p = config.power_law_exponent;
    const double xmin = config.mean_degree * (p - 2.0) / (p - 1.0);

    std::vector<NetworkSnapshot::IndexedEdge> edges;
    edges.reserve(static_cast<std::size_t>(
        static_cast<double>(config.alter_count) * config.mean_degree * 1.1));
    std::vector<std::uint32_t> targets;
    for (std::uint32_t i = 0; i < n_alters; ++i) {
        rng::SplitMix64 gen(rng::stream_key(config.seed, rng::Domain::graph_alter, i));
        const double raw_degree = gen.pareto(xmin, p - 1.0);
        const std::uint32_t degree = static_cast<std::uint32_t>(
            std::clamp<double>(std::llround(raw_degree), 1.0, static_cast<double>(n_egos)));
        const std::uint32_t home = static_cast<std::uint32_t>(gen.below(n_egos));
        pick_distinct_egos(gen, n_egos, degree, home, targets);
        const double total = gen.lognormal(config.weight_mu, config.weight_sigma);
        const double base_share = (1.0 - config.affinity) / static_cast<double>(degree);
        const std::uint32_t alter_idx = n_egos + i;
        for (std::size_t t = 0; t < targets.size(); ++t) {
            const double share = t == 0 ? config.affinity + base_share : base_share;
            if (share <= 0.0) continue;
            edges.push_back({alter_idx, targets[t], total * share, InteractionKind::unspecified, 0});
        }
    }
    return NetworkSnapshot::build_indexed(std::move(members), std::move(edges), IdMode::text, "T0",
                                          false);
}

std::string_view design_name(Design design) {
    return design == Design::ego_cluster ? "ego_cluster" : "naive_viewer";
}

OutcomeMap simulate_outcomes(const NetworkSnapshot& snapshot,
                             const std::unordered_map<MemberId, Variant>& alter_variants,
                             const EffectModel& model, std::uint64_t seed,
                             LeakagePolicy leakage) {
    check_model(model);

    // Resolve every alter-role member once.
    std::vector<std::uint8_t> treated(snapshot.member_count(), 0);
    for (const std::uint32_t alter : snapshot.alter_members()) {
        const MemberId& name = snapshot.member_name(alter);
        const auto it = alter_variants.find(name);
        if (it != alter_variants.end()) {
            treated[alter] = it->second == Variant::treatment;
        } else if (leakage == LeakagePolicy::random) {
            treated[alter] =
                rng::unit_draw(seed, rng::Domain::leakage, rng::hash_id(name)) < 0.5;
        } // control leakage: stays 0
    }

    OutcomeMap outcomes;
    outcomes.reserve(snapshot.ego_members().size());
    const auto edges = snapshot.edges();
    for (const std::uint32_t ego : snapshot.ego_members()) {
        double treated_weight = 0.0;
        double total_weight = 0.0;
        for (const std::uint32_t id : snapshot.ego_edge_ids(ego)) {
            const AggEdge& e = edges[id];
            total_weight += e.weight;
            if (treated[e.alter]) treated_weight += e.weight;
        }
        const double fraction = total_weight > 0.0 ? treated_weight / total_weight : 0.0;
        const MemberId& name = snapshot.member_name(ego);
        double outcome = model.base_rate + model.effect_size * response_value(model, fraction);
        if (model.noise_sd > 0.0) {
            rng::SplitMix64 gen(
                rng::stream_key(seed, rng::Domain::outcome_noise, rng::hash_id(name)));
            outcome += model.noise_sd * gen.normal();
        }
        outcomes.emplace(name, outcome);
    }
    return outcomes;
}

AteEstimate estimate_ate(const OutcomeMap& outcomes, const EgoClusterSolution& solution) {
    if (solution.ego_variants.empty()) throw std::invalid_argument("solution has no egos");
    std::vector<double> treatment;
    std::vector<double> control;
    for (const MemberId* ego : sorted_solution_egos(solution)) {
        const auto it = outcomes.find(*ego);
        if (it == outcomes.end())
            throw std::invalid_argument("no outcome recorded for ego '" + *ego + "'");
        (solution.ego_variants.at(*ego) == Variant::treatment ? treatment : control)
            .push_back(it->second);
    }
    return pooled_difference(treatment, control);
}

ExperimentRun run_experiment(const NetworkSnapshot& snapshot, Design design,
                             const EffectModel& model, std::uint64_t seed) {
    ExperimentRun run;
    run.design = design;
    run.true_ate = true_ate(model);

    if (design == Design::ego_cluster) {
        const EgoClusterSolution solution = build_solution(snapshot, seed);
        std::unordered_map<MemberId, Variant> variants;
        variants.reserve(solution.alter_assignments.size());
        for (const auto& [alter, assignment] : solution.alter_assignments)
            variants.emplace(alter, assignment.variant);
        run.outcomes = simulate_outcomes(snapshot, variants, model, seed);
        run.ate = estimate_ate(run.outcomes, solution);
        return run;
    }

    // Naive viewer randomization: an independent coin per alter. Egos are
    // not randomized, so the readout splits them into two arbitrary halves.
    std::unordered_map<MemberId, Variant> variants;
    variants.reserve(snapshot.alter_members().size());
    for (const std::uint32_t alter : snapshot.alter_members()) {
        const MemberId& name = snapshot.member_name(alter);
        const bool t = rng::unit_draw(seed, rng::Domain::naive_variant, rng::hash_id(name)) < 0.5;
        variants.emplace(name, t ? Variant::treatment : Variant::control);
    }
    run.outcomes = simulate_outcomes(snapshot, variants, model, seed);

    std::vector<double> treatment;
    std::vector<double> control;
    for (const std::uint32_t ego : snapshot.ego_members()) {
        const MemberId& name = snapshot.member_name(ego);
        const bool t = rng::unit_draw(seed, rng::Domain::naive_split, rng::hash_id(name)) < 0.5;
        (t ? treatment : control).push_back(run.outcomes.at(name));
    }
    run.ate = pooled_difference(treatment, control);
    return run;
}

ComparisonReport run_comparison(const SimConfig& config, const EffectModel& model,
                                std::span<const std::uint64_t> seeds, double alpha) {
    if (seeds.size() < 30)
        throw std::invalid_argument("run_comparison needs at least 30 seeds, got " +
                                    std::to_string(seeds.size()));
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0, 1)");
    check_config(config);
    check_model(model);

    ComparisonReport report;
    report.config = config;
    report.model = model;
    report.true_ate = true_ate(model);
    report.alpha = alpha;

    const double z_crit = boost::math::quantile(std_normal, 1.0 - alpha / 2.0);
    double sum_ego = 0.0;
    double sum_naive = 0.0;
    std::size_t reject_ego = 0;
    std::size_t reject_naive = 0;
    for (const std::uint64_t seed : seeds) {
        SimConfig cfg = config;
        cfg.seed = seed;
        const NetworkSnapshot graph = generate_graph(cfg);

        const ExperimentRun ego = run_experiment(graph, Design::ego_cluster, model, seed);
        const ExperimentRun naive = run_experiment(graph, Design::naive_viewer, model, seed);

        report.per_seed.push_back({seed, ego.ate.estimate, ego.ate.std_error, naive.ate.estimate,
                                   naive.ate.std_error});
        sum_ego += ego.ate.estimate;
        sum_naive += naive.ate.estimate;
        if (std::fabs(ego.ate.estimate) > z_crit * ego.ate.std_error) ++reject_ego;
        if (std::fabs(naive.ate.estimate) > z_crit * naive.ate.std_error) ++reject_naive;
    }
    const double n = static_cast<double>(seeds.size());
    report.ego_cluster.mean_estimate = sum_ego / n;
    report.ego_cluster.bias = report.ego_cluster.mean_estimate - report.true_ate;
    report.ego_cluster.power = static_cast<double>(reject_ego) / n;
    report.naive_viewer.mean_estimate = sum_naive / n;
    report.naive_viewer.bias = report.naive_viewer.mean_estimate - report.true_ate;
    report.naive_viewer.power = static_cast<double>(reject_naive) / n;
    if (model.effect_size == 0.0) report.null_fpr = report.ego_cluster.power;
    return report;
}

std::string comparison_to_json(const ComparisonReport& report) {
    nlohmann::json j;
    j["config"] = {{"ego_count", report.config.ego_count},
                   {"alter_count", report.config.alter_count},
                   {"mean_degree", report.config.mean_degree},
                   {"power_law_exponent", report.config.power_law_exponent},
                   {"affinity", report.config.affinity},
                   {"weight_mu", report.config.weight_mu},
                   {"weight_sigma", report.config.weight_sigma}};
    j["model"] = {{"base_rate", report.model.base_rate},
                  {"effect_size", report.model.effect_size},
                  {"response", report.model.response == EffectModel::Response::linear
                                   ? "linear"
                                   : "saturating"},
                  {"noise_sd", report.model.noise_sd}};
    j["true_ate"] = report.true_ate;
    j["alpha"] = report.alpha;
    nlohmann::json per_seed = nlohmann::json::array();
    for (const auto& row : report.per_seed)
        per_seed.push_back({{"seed", row.seed},
                            {"ego_cluster", {{"estimate", row.ego_estimate},
                                             {"std_error", row.ego_std_error}}},
                            {"naive_viewer", {{"estimate", row.naive_estimate},
                                              {"std_error", row.naive_std_error}}}});
    j["per_seed"] = std::move(per_seed);
    auto summary = [](const DesignSummary& s) {
        return nlohmann::json{
            {"mean_estimate", s.mean_estimate}, {"bias", s.bias}, {"power", s.power}};
    };
    j["summary"] = {{"ego_cluster", summary(report.ego_cluster)},
                    {"naive_viewer", summary(report.naive_viewer)}};
    if (report.null_fpr)
        j["summary"]["null_fpr"] = *report.null_fpr;
    else
        j["summary"]["null_fpr"] = nullptr;
    return j.dump(2);
}

namespace {

std::uint64_t edge_entity(const MemberId& alter, const MemberId& ego) {
    return rng::fmix64(rng::hash_id(alter) ^
                       (rng::hash_id(ego) * 0x9e3779b97f4a7c15ULL + 0x165667b19e3779f9ULL));
}

} // namespace

NetworkSnapshot evolve_network(const NetworkSnapshot& snapshot_t0, const ChurnConfig& churn,
                               std::uint64_t seed, std::string label) {
    if (!(churn.edge_drop_prob >= 0.0 && churn.edge_drop_prob <= 1.0))
        throw std::invalid_argument("edge_drop_prob must be in [0, 1]");
    if (!(churn.new_edge_rate >= 0.0) || !(churn.new_alter_rate >= 0.0))
        throw std::invalid_argument("churn rates must be non-negative");
    if (snapshot_t0.empty()) throw std::invalid_argument("cannot evolve an empty snapshot");

    std::vector<RawEdge> rows;
    rows.reserve(snapshot_t0.edges().size());

    // Surviving T0 edges, kept part by part so metadata round-trips.
    for (const AggEdge& e : snapshot_t0.edges()) {
        const MemberId& alter = snapshot_t0.member_name(e.alter);
        const MemberId& ego = snapshot_t0.member_name(e.ego);
        if (rng::unit_draw(seed, rng::Domain::edge_drop, edge_entity(alter, ego)) <
            churn.edge_drop_prob)
            continue;
        if (snapshot_t0.has_metadata()) {
            for (const EdgePart& part : snapshot_t0.parts(e))
                rows.push_back({alter, ego, part.weight, part.kind, part.day});
        } else {
            rows.push_back({alter, ego, e.weight, InteractionKind::unspecified, 0});
        }
    }

    const auto& egos = snapshot_t0.ego_members();
    auto add_edges_from = [&](const MemberId& alter, rng::SplitMix64& gen, std::size_t count) {
        for (std::size_t k = 0; k < count; ++k) {
            for (int attempt = 0; attempt < 16; ++attempt) {
                const MemberId& ego = snapshot_t0.member_name(egos[gen.below(egos.size())]);
                if (ego == alter) continue; // never create a self edge
                rows.push_back({alter, ego, 1.0, InteractionKind::unspecified, 0});
                break;
            }
        }
    };

    if (churn.new_edge_rate > 0.0) {
        for (const std::uint32_t alter_idx : snapshot_t0.alter_members()) {
            const MemberId& alter = snapshot_t0.member_name(alter_idx);
            rng::SplitMix64 gen(
                rng::stream_key(seed, rng::Domain::edge_new, rng::hash_id(alter)));
            const int extra = gen.poisson(churn.new_edge_rate);
            if (extra > 0) add_edges_from(alter, gen, static_cast<std::size_t>(extra));
        }
    }

    const std::size_t new_alters = static_cast<std::size_t>(std::llround(
        churn.new_alter_rate * static_cast<double>(snapshot_t0.alter_members().size())));
    if (new_alters > 0 && churn.new_alter_degree > 0) {
        // In integer mode new ids continue past the current maximum; in text
        // mode they take an n prefix.
        std::int64_t next_numeric = 0;
        if (snapshot_t0.id_mode() == IdMode::integer && snapshot_t0.member_count() > 0)
            next_numeric =
                std::stoll(snapshot_t0.member_name(
                    static_cast<std::uint32_t>(snapshot_t0.member_count() - 1))) + 1;
        for (std::size_t j = 0; j < new_alters; ++j) {
            MemberId name;
            if (snapshot_t0.id_mode() == IdMode::integer) {
                name = std::to_string(next_numeric + static_cast<std::int64_t>(j));
            } else {
                name = "n" + std::to_string(j);
                while (snapshot_t0.find_member(name)) name += "_";
            }
            rng::SplitMix64 gen(
                rng::stream_key(seed, rng::Domain::alter_new, rng::hash_id(name)));
            add_edges_from(name, gen, churn.new_alter_degree);
        }
    }

    return NetworkSnapshot::build(std::move(rows), snapshot_t0.id_mode(), std::move(label));
}

} // namespace egocluster
