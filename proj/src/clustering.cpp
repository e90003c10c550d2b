// clustering.cpp

#include "egocluster/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "egocluster/rng.hpp"

namespace egocluster {

std::string_view variant_name(Variant v) {
    return v == Variant::treatment ? "treatment" : "control";
}

std::optional<Variant> parse_variant(std::string_view token) {
    if (token == "treatment") return Variant::treatment;
    if (token == "control") return Variant::control;
    return std::nullopt;
}

namespace {

Variant draw_ego_variant(const MemberId& ego, std::uint64_t seed, double fraction) {
    const double u = rng::unit_draw(seed, rng::Domain::ego_variant, rng::hash_id(ego));
    return u < fraction ? Variant::treatment : Variant::control;
}

bool tie_coin_treatment(const MemberId& alter, std::uint64_t seed) {
    return rng::unit_draw(seed, rng::Domain::alter_tie, rng::hash_id(alter)) < 0.5;
}

void check_fraction(double fraction) {
    if (!(fraction >= 0.0 && fraction <= 1.0))
        throw std::invalid_argument("treatment_fraction must be in [0, 1]");
}

} // namespace

std::map<MemberId, std::vector<MemberId>> EgoClusterSolution::cluster_index() const {
    std::map<MemberId, std::vector<MemberId>> index;
    for (const auto& [ego, variant] : ego_variants) index[ego];
    for (const auto& [alter, assignment] : alter_assignments)
        index[assignment.attached_ego].push_back(alter);
    for (auto& [ego, alters] : index)
        std::sort(alters.begin(), alters.end(),
                  [this](const MemberId& a, const MemberId& b) { return id_less(a, b, id_mode); });
    return index;
}

EgoVariantMap assign_ego_variants(std::span<const MemberId> egos, std::uint64_t seed,
                                  double treatment_fraction) {
    if (egos.empty()) throw std::invalid_argument("ego set must be non-empty");
    check_fraction(treatment_fraction);
    EgoVariantMap variants;
    variants.reserve(egos.size());
    for (const MemberId& ego : egos)
        variants.emplace(ego, draw_ego_variant(ego, seed, treatment_fraction));
    return variants;
}

AlterDecision assign_alter(const MemberId& alter,
                           std::span<const std::pair<MemberId, double>> incident_edges,
                           const EgoVariantMap& ego_variants, std::uint64_t seed,
                           IdMode id_mode) {
    if (incident_edges.empty())
        throw std::invalid_argument("alter '" + alter + "' has no incident edges");

    double weight_t = 0.0;
    double weight_c = 0.0;
    for (const auto& [ego, weight] : incident_edges) {
        const auto it = ego_variants.find(ego);
        if (it == ego_variants.end())
            throw std::invalid_argument("ego '" + ego + "' has no variant assignment");
        (it->second == Variant::treatment ? weight_t : weight_c) += weight;
    }
    if (!(weight_t + weight_c > 0.0))
        throw std::runtime_error("alter '" + alter +
                                 "' carries no positive weight and cannot be assigned");

    AlterDecision decision;
    decision.trace = {alter, weight_t, weight_c, false, 0.0};
    if (weight_t > weight_c) {
        decision.variant = Variant::treatment;
    } else if (weight_c > weight_t) {
        decision.variant = Variant::control;
    } else {
        decision.trace.tie_broken = true;
        decision.variant = tie_coin_treatment(alter, seed) ? Variant::treatment : Variant::control;
    }

    const MemberId* best_ego = nullptr;
    double best_weight = -1.0;
    for (const auto& [ego, weight] : incident_edges) {
        if (ego_variants.at(ego) != decision.variant) continue;
        if (weight > best_weight ||
            (weight == best_weight && best_ego && id_less(ego, *best_ego, id_mode))) {
            best_weight = weight;
            best_ego = &ego;
        }
    }
    decision.attached_ego = *best_ego;
    decision.trace.chosen_ego_weight = best_weight;
    return decision;
}

namespace {

// Per-alter outcome of the parallel pass, merged sequentially afterwards.
struct AlterResult {
    enum class Kind : std::uint8_t { assigned, zero_weight, dual_role } kind;
    Variant variant = Variant::control;
    std::uint32_t attached_ego = 0;
    bool tie_broken = false;
    double weight_t = 0.0;
    double weight_c = 0.0;
    double chosen_weight = 0.0;
};

void assign_alter_range(const NetworkSnapshot& snapshot, std::span<const Variant> ego_variant_by_member,
                        std::span<const std::uint8_t> is_ego, std::uint64_t seed,
                        std::size_t begin, std::size_t end, std::vector<AlterResult>& results) {
    const auto& alters = snapshot.alter_members();
    for (std::size_t i = begin; i < end; ++i) {
        const std::uint32_t alter = alters[i];
        AlterResult& res = results[i];
        if (is_ego[alter]) {
            res.kind = AlterResult::Kind::dual_role;
            continue;
        }
        double weight_t = 0.0;
        double weight_c = 0.0;
        for (const AggEdge& e : snapshot.alter_edges(alter))
            (ego_variant_by_member[e.ego] == Variant::treatment ? weight_t : weight_c) += e.weight;
        res.weight_t = weight_t;
        res.weight_c = weight_c;
        if (!(weight_t + weight_c > 0.0)) {
            res.kind = AlterResult::Kind::zero_weight;
            continue;
        }
        res.kind = AlterResult::Kind::assigned;
        if (weight_t > weight_c) {
            res.variant = Variant::treatment;
        } else if (weight_c > weight_t) {
            res.variant = Variant::control;
        } else {
            res.tie_broken = true;
            res.variant = tie_coin_treatment(snapshot.member_name(alter), seed)
                              ? Variant::treatment
                              : Variant::control;
        }
        // Heaviest same-variant ego; edge spans are ego-sorted, so the first
        // strict maximum is also the smallest id on ties.
        double best_weight = -1.0;
        std::uint32_t best_ego = 0;
        for (const AggEdge& e : snapshot.alter_edges(alter)) {
            if (ego_variant_by_member[e.ego] != res.variant) continue;
            if (e.weight > best_weight) {
                best_weight = e.weight;
                best_ego = e.ego;
            }
        }
        res.attached_ego = best_ego;
        res.chosen_weight = best_weight;
    }
}

} // namespace

EgoClusterSolution build_solution(const NetworkSnapshot& snapshot, std::uint64_t seed,
                                  double treatment_fraction, const BuildOptions& options) {
    if (snapshot.empty()) throw std::runtime_error("cannot cluster an empty snapshot");
    if (snapshot.ego_members().empty()) throw std::runtime_error("snapshot has no egos");
    check_fraction(treatment_fraction);

    EgoClusterSolution solution;
    solution.network_type = options.network_type;
    solution.seed = seed;
    solution.treatment_fraction = treatment_fraction;
    solution.id_mode = snapshot.id_mode();

    // Step 1: ego variants, index-aligned for the scan below.
    std::vector<Variant> ego_variant_by_member(snapshot.member_count(), Variant::control);
    std::vector<std::uint8_t> is_ego(snapshot.member_count(), 0);
    solution.ego_variants.reserve(snapshot.ego_members().size());
    for (const std::uint32_t ego : snapshot.ego_members()) {
        const MemberId& name = snapshot.member_name(ego);
        Variant v;
        if (options.ego_variants) {
            const auto it = options.ego_variants->find(name);
            if (it == options.ego_variants->end())
                throw std::invalid_argument("supplied ego variants miss ego '" + name + "'");
            v = it->second;
        } else {
            v = draw_ego_variant(name, seed, treatment_fraction);
        }
        ego_variant_by_member[ego] = v;
        is_ego[ego] = 1;
        solution.ego_variants.emplace(name, v);
    }
    solution.stats.ego_count = solution.ego_variants.size();

    // Steps 2-4, chunked over alters; any schedule yields the same results.
    const auto& alters = snapshot.alter_members();
    std::vector<AlterResult> results(alters.size());
    int threads = options.threads;
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, 64);
    if (threads == 1 || alters.size() < 1024) {
        assign_alter_range(snapshot, ego_variant_by_member, is_ego, seed, 0, alters.size(), results);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (alters.size() + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const std::size_t begin = std::min(alters.size(), t * chunk);
            const std::size_t end = std::min(alters.size(), begin + chunk);
            if (begin == end) break;
            pool.emplace_back([&, begin, end] {
                assign_alter_range(snapshot, ego_variant_by_member, is_ego, seed, begin, end, results);
            });
        }
        for (std::thread& th : pool) th.join();
    }

    solution.alter_assignments.reserve(alters.size());
    for (std::size_t i = 0; i < alters.size(); ++i) {
        const AlterResult& res = results[i];
        switch (res.kind) {
            case AlterResult::Kind::dual_role:
                ++solution.stats.dual_role_skipped;
                break;
            case AlterResult::Kind::zero_weight:
                ++solution.stats.excluded_zero_weight;
                break;
            case AlterResult::Kind::assigned: {
                const MemberId& name = snapshot.member_name(alters[i]);
                solution.alter_assignments.emplace(
                    name, AlterAssignment{res.variant, snapshot.member_name(res.attached_ego)});
                ++solution.stats.assigned_alters;
                if (res.tie_broken) ++solution.stats.ties_broken;
                if (options.record_traces)
                    solution.traces.push_back({name, res.weight_t, res.weight_c, res.tie_broken,
                                               res.chosen_weight});
                break;
            }
        }
    }
    return solution;
}

double total_misaligned_weight(const EgoClusterSolution& solution, const NetworkSnapshot& snapshot) {
    // Index-aligned variant views; -1 marks members without that role.
    std::vector<std::int8_t> alter_variant(snapshot.member_count(), -1);
    std::vector<std::int8_t> ego_variant(snapshot.member_count(), -1);
    for (const auto& [name, assignment] : solution.alter_assignments)
        if (const auto idx = snapshot.find_member(name))
            alter_variant[*idx] = static_cast<std::int8_t>(assignment.variant);
    for (const auto& [name, variant] : solution.ego_variants)
        if (const auto idx = snapshot.find_member(name))
            ego_variant[*idx] = static_cast<std::int8_t>(variant);

    double loss = 0.0;
    for (const AggEdge& e : snapshot.edges()) {
        if (alter_variant[e.alter] < 0 || ego_variant[e.ego] < 0) continue;
        if (alter_variant[e.alter] != ego_variant[e.ego]) loss += e.weight;
    }
    return loss;
}

BruteForceResult brute_force_min_loss(const NetworkSnapshot& snapshot,
                                      const EgoVariantMap& ego_variants) {
    std::vector<Variant> ego_variant_by_member(snapshot.member_count(), Variant::control);
    std::vector<std::uint8_t> is_ego(snapshot.member_count(), 0);
    for (const std::uint32_t ego : snapshot.ego_members()) {
        const auto it = ego_variants.find(snapshot.member_name(ego));
        if (it == ego_variants.end())
            throw std::invalid_argument("ego '" + snapshot.member_name(ego) +
                                        "' has no variant assignment");
        ego_variant_by_member[ego] = it->second;
        is_ego[ego] = 1;
    }

    // Same assignable set as the algorithm: no dual-role members, no
    // zero-weight alters.
    std::vector<std::uint32_t> assignable;
    for (const std::uint32_t alter : snapshot.alter_members()) {
        if (is_ego[alter]) continue;
        double total = 0.0;
        for (const AggEdge& e : snapshot.alter_edges(alter)) total += e.weight;
        if (total > 0.0) assignable.push_back(alter);
    }
    if (assignable.size() > 20)
        throw std::invalid_argument("brute force enumeration is capped at 20 alters (got " +
                                    std::to_string(assignable.size()) +
                                    "); use build_solution for larger instances");

    const std::size_t count = assignable.size();
    double best_loss = std::numeric_limits<double>::infinity();
    std::uint64_t best_mask = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << count); ++mask) {
        double loss = 0.0;
        for (std::size_t i = 0; i < count && loss < best_loss; ++i) {
            const Variant v = (mask >> i) & 1 ? Variant::treatment : Variant::control;
            for (const AggEdge& e : snapshot.alter_edges(assignable[i]))
                if (ego_variant_by_member[e.ego] != v) loss += e.weight;
        }
        if (loss < best_loss) {
            best_loss = loss;
            best_mask = mask;
        }
    }

    BruteForceResult result;
    result.min_total_loss = count == 0 ? 0.0 : best_loss;
    for (std::size_t i = 0; i < count; ++i)
        result.alter_variants.emplace(snapshot.member_name(assignable[i]),
                                      (best_mask >> i) & 1 ? Variant::treatment : Variant::control);
    return result;
}

} // namespace egocluster
