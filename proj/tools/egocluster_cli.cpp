// egocluster_cli.cpp
//
// Subcommands: cluster, diagnose, correct, simulate, oracle-check.
// Exit codes: 0 success, 1 quality-gate failure, 2 usage or data error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "egocluster/bias_correction.hpp"
#include "egocluster/clustering.hpp"
#include "egocluster/diagnostics.hpp"
#include "egocluster/ingest.hpp"
#include "egocluster/manifest.hpp"
#include "egocluster/rng.hpp"
#include "egocluster/sha256.hpp"
#include "egocluster/simulator.hpp"
#include "egocluster/snapshot.hpp"
#include "egocluster/solution_io.hpp"

namespace fs = std::filesystem;
using namespace egocluster;

namespace {

void print_error(const std::string& message) {
    nlohmann::json j;
    j["error"] = message;
    std::cerr << j.dump() << '\n';
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("failed while writing '" + path.string() + "'");
}

nlohmann::json load_json_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("invalid JSON in '" + path.string() + "': " + e.what());
    }
}

// Shared ingestion flags.
struct IngestFlags {
    std::string id_mode = "text";
    std::string delimiter = "auto";
    bool no_header = false;
    std::size_t error_budget = 100;

    void attach(CLI::App* cmd) {
        cmd->add_option("--id-mode", id_mode, "member id mode: text or integer")
            ->check(CLI::IsMember({"text", "integer"}));
        cmd->add_option("--delimiter", delimiter, "edge list delimiter: auto, comma or tab")
            ->check(CLI::IsMember({"auto", "comma", "tab"}));
        cmd->add_flag("--no-header", no_header, "edge list has no header row");
        cmd->add_option("--error-budget", error_budget,
                        "malformed rows tolerated before ingestion fails");
    }

    IdMode mode() const { return *parse_id_mode(id_mode); }

    IngestOptions options(std::string label) const {
        IngestOptions opts;
        opts.id_mode = mode();
        if (delimiter == "comma")
            opts.delimiter = ',';
        else if (delimiter == "tab")
            opts.delimiter = '\t';
        opts.has_header = !no_header;
        opts.error_budget = error_budget;
        opts.label = std::move(label);
        return opts;
    }
};

std::unordered_set<MemberId> read_ego_list(const fs::path& path, IdMode mode) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open ego list '" + path.string() + "'");
    std::unordered_set<MemberId> egos;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        egos.insert(canonicalize_id(line, mode));
    }
    if (egos.empty()) throw std::runtime_error("ego list '" + path.string() + "' is empty");
    return egos;
}

NetworkType parse_type_or_throw(const std::string& token) {
    const auto type = parse_network_type(token);
    if (!type)
        throw std::runtime_error("invalid network type '" + token +
                                 "' (expected kind[:window_days], e.g. viral_action:90)");
    return *type;
}

std::string render_single_diag_text(const ClusterDiagnostics& d) {
    std::ostringstream out;
    out << "cluster size:        " << d.cluster_size << '\n';
    out << "loss rate at T0:     " << format_double(d.loss_rate_t0) << '\n';
    for (const auto& [scenario, rate] : d.loss_rate_t14)
        out << "loss rate at T14 s" << scenario << ": " << format_double(rate) << '\n';
    if (d.stability_rate)
        out << "stability rate:      " << format_double(*d.stability_rate) << '\n';
    for (const std::string& w : d.warnings) out << "warning: " << w << '\n';
    return out.str();
}

// ---------------------------------------------------------------- cluster

struct ClusterArgs {
    std::string input;
    std::string t14;
    std::string ego_list;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    double treatment_fraction = 0.5;
    std::vector<std::string> network_types;
    std::size_t min_egos = 100000;
    int threads = 1;
    double max_loss_rate = 0.4;
    double ramp_fraction = 0.10;
    std::string format = "text";
    IngestFlags ingest;
};

int run_cluster(const ClusterArgs& args) {
    std::vector<NetworkType> types;
    for (const std::string& token : args.network_types) types.push_back(parse_type_or_throw(token));

    IngestReport report;
    NetworkSnapshot base = ingest_edges(fs::path(args.input), args.ingest.options("T0"), &report);

    std::optional<NetworkSnapshot> t14_base;
    if (!args.t14.empty())
        t14_base = ingest_edges(fs::path(args.t14), args.ingest.options("T14"), nullptr);

    std::vector<std::string> warnings;
    if (!args.ego_list.empty()) {
        const auto egos = read_ego_list(args.ego_list, args.ingest.mode());
        base = restrict_egos(base, egos, args.min_egos, &warnings);
    }

    struct Run {
        std::string slug;
        std::optional<NetworkType> type;
        EgoClusterSolution solution;
        ClusterDiagnostics diagnostics;
    };
    std::vector<Run> runs;

    auto cluster_one = [&](const NetworkSnapshot& t0, const NetworkSnapshot* t14,
                           std::optional<NetworkType> type, std::string slug) {
        BuildOptions options;
        options.threads = args.threads;
        options.network_type = type;
        EgoClusterSolution solution =
            build_solution(t0, args.seed, args.treatment_fraction, options);
        DiagnosticsOptions diag_options;
        diag_options.ramp_fraction = args.ramp_fraction;
        ClusterDiagnostics diagnostics = compute_diagnostics(solution, t0, t14, diag_options);
        runs.push_back({std::move(slug), type, std::move(solution), std::move(diagnostics)});
    };

    if (types.empty()) {
        cluster_one(base, t14_base ? &*t14_base : nullptr, std::nullopt, "all");
    } else {
        for (const NetworkType& type : types) {
            const NetworkSnapshot t0_net = build_network(base, type, &warnings);
            if (t0_net.empty())
                throw std::runtime_error("network type '" + type.slug() +
                                         "' matches no edges in the input");
            std::optional<NetworkSnapshot> t14_net;
            if (t14_base) t14_net = build_network(*t14_base, type, &warnings);
            cluster_one(t0_net, t14_net && !t14_net->empty() ? &*t14_net : nullptr, type,
                        type.slug());
        }
    }

    // Everything computed; now stage outputs and commit once.
    OutputSet outputs{fs::path(args.out_dir)};
    for (const Run& run : runs)
        write_solution_csv(run.solution, outputs.stage("solution_" + run.slug + ".csv"));
    write_file(outputs.stage("ingest_report.json"), report.to_json() + "\n");

    std::string summary_text;
    std::string summary_json;
    if (!types.empty()) {
        std::vector<std::pair<NetworkType, ClusterDiagnostics>> pairs;
        for (const Run& run : runs) pairs.emplace_back(*run.type, run.diagnostics);
        summary_text = summary_table_text(pairs);
        summary_json = summary_table_json(pairs);
    } else {
        summary_text = render_single_diag_text(runs.front().diagnostics);
        summary_json = diagnostics_to_json(runs.front().diagnostics);
    }
    if (!warnings.empty()) {
        summary_text += '\n';
        for (const std::string& w : warnings) summary_text += "warning: " + w + '\n';
    }
    write_file(outputs.stage("summary.txt"), summary_text);
    write_file(outputs.stage("summary.json"), summary_json + "\n");
    for (const Run& run : runs)
        write_file(outputs.stage("diagnostics_" + run.slug + ".json"),
                   diagnostics_to_json(run.diagnostics) + "\n");

    RunManifest manifest;
    manifest.command = "cluster";
    manifest.seed = args.seed;
    manifest.created_utc = timestamp_utc();
    nlohmann::json config;
    config["input"] = args.input;
    config["t14"] = args.t14;
    config["ego_list"] = args.ego_list;
    config["seed"] = args.seed;
    config["treatment_fraction"] = args.treatment_fraction;
    config["network_types"] = args.network_types;
    config["min_egos"] = args.min_egos;
    config["max_loss_rate"] = args.max_loss_rate;
    config["ramp_fraction"] = args.ramp_fraction;
    config["id_mode"] = args.ingest.id_mode;
    manifest.config_hash = sha256_hex(config.dump());
    manifest.inputs[args.input] = sha256_file(args.input);
    if (!args.t14.empty()) manifest.inputs[args.t14] = sha256_file(args.t14);
    if (!args.ego_list.empty()) manifest.inputs[args.ego_list] = sha256_file(args.ego_list);
    manifest.outputs = outputs.digests();
    write_file(outputs.stage("manifest.json"), manifest.to_json() + "\n");
    outputs.commit();

    if (args.format == "json")
        std::cout << summary_json << '\n';
    else
        std::cout << summary_text;

    for (const Run& run : runs)
        if (run.diagnostics.loss_rate_t0 > args.max_loss_rate) {
            print_error("quality gate: loss rate at T0 for '" + run.slug + "' is " +
                        format_double(run.diagnostics.loss_rate_t0) + ", above the limit " +
                        format_double(args.max_loss_rate));
            return 1;
        }
    return 0;
}

// ---------------------------------------------------------------- diagnose

struct DiagnoseArgs {
    std::string solution;
    std::string input;
    std::string t14;
    std::string out_dir = "out";
    std::string network_type;
    double ramp_fraction = 0.10;
    bool per_ego = false;
    std::string format = "text";
    IngestFlags ingest;
};

int run_diagnose(const DiagnoseArgs& args) {
    EgoClusterSolution solution = load_solution_csv(fs::path(args.solution), args.ingest.mode());
    if (!args.network_type.empty())
        solution.network_type = parse_type_or_throw(args.network_type);

    NetworkSnapshot t0 = ingest_edges(fs::path(args.input), args.ingest.options("T0"), nullptr);
    std::optional<NetworkSnapshot> t14;
    if (!args.t14.empty())
        t14 = ingest_edges(fs::path(args.t14), args.ingest.options("T14"), nullptr);
    if (solution.network_type) {
        t0 = build_network(t0, *solution.network_type, nullptr);
        if (t14) t14 = build_network(*t14, *solution.network_type, nullptr);
    }

    DiagnosticsOptions options;
    options.ramp_fraction = args.ramp_fraction;
    options.include_per_ego = args.per_ego;
    const ClusterDiagnostics diagnostics =
        compute_diagnostics(solution, t0, t14 ? &*t14 : nullptr, options);
    const std::string diag_json = diagnostics_to_json(diagnostics, args.per_ego);

    OutputSet outputs{fs::path(args.out_dir)};
    write_file(outputs.stage("diagnostics.json"), diag_json + "\n");

    RunManifest manifest;
    manifest.command = "diagnose";
    manifest.created_utc = timestamp_utc();
    nlohmann::json config;
    config["solution"] = args.solution;
    config["input"] = args.input;
    config["t14"] = args.t14;
    config["network_type"] = args.network_type;
    config["ramp_fraction"] = args.ramp_fraction;
    config["per_ego"] = args.per_ego;
    config["id_mode"] = args.ingest.id_mode;
    manifest.config_hash = sha256_hex(config.dump());
    manifest.inputs[args.solution] = sha256_file(args.solution);
    manifest.inputs[args.input] = sha256_file(args.input);
    if (!args.t14.empty()) manifest.inputs[args.t14] = sha256_file(args.t14);
    manifest.outputs = outputs.digests();
    write_file(outputs.stage("manifest.json"), manifest.to_json() + "\n");
    outputs.commit();

    if (args.format == "json") {
        std::cout << diag_json << '\n';
    } else if (diagnostics.network_type) {
        const std::vector<std::pair<NetworkType, ClusterDiagnostics>> pairs{
            {*diagnostics.network_type, diagnostics}};
        std::cout << summary_table_text(pairs);
    } else {
        std::cout << render_single_diag_text(diagnostics);
    }
    return 0;
}

// ---------------------------------------------------------------- correct

struct CorrectArgs {
    std::string stats;
    std::string out_dir = "out";
    double alpha = 0.05;
    double power = 0.8;
    std::string format = "text";
};

ArmStats arm_from_json(const nlohmann::json& j, const std::string& arm_name) {
    auto field = [&](const char* key) {
        if (!j.contains(key))
            throw std::runtime_error("stats file: arm '" + arm_name + "' is missing field '" +
                                     key + "'");
        return j.at(key);
    };
    ArmStats arm;
    arm.mean_reserve = field("mean_reserve").get<double>();
    arm.mean_leftover = field("mean_leftover").get<double>();
    arm.var_reserve = field("var_reserve").get<double>();
    arm.var_leftover = field("var_leftover").get<double>();
    arm.n_reserve = field("n_reserve").get<std::size_t>();
    arm.n_leftover = field("n_leftover").get<std::size_t>();
    return arm;
}

SampleStats sample_from_json(const nlohmann::json& j, const std::string& name) {
    auto field = [&](const char* key) {
        if (!j.contains(key))
            throw std::runtime_error("stats file: sample '" + name + "' is missing field '" +
                                     key + "'");
        return j.at(key);
    };
    SampleStats sample;
    sample.mean = field("mean").get<double>();
    sample.var = field("var").get<double>();
    sample.n = field("n").get<std::size_t>();
    return sample;
}

int run_correct(const CorrectArgs& args) {
    const nlohmann::json stats = load_json_file(args.stats);
    auto section = [&](const char* key) {
        if (!stats.contains(key))
            throw std::runtime_error("stats file is missing section '" + std::string(key) + "'");
        return stats.at(key);
    };

    const nlohmann::json sizes_json = section("sizes");
    auto size_field = [&](const char* key) {
        if (!sizes_json.contains(key))
            throw std::runtime_error("stats file: 'sizes' is missing field '" + std::string(key) +
                                     "'");
        return sizes_json.at(key).get<std::size_t>();
    };
    PopulationSizes sizes;
    sizes.n_ego_cluster = size_field("n_ego_cluster");
    sizes.n_leftover = size_field("n_leftover");
    sizes.n_reserve = size_field("n_reserve");
    sizes.n_t = size_field("n_t");
    sizes.n_c = size_field("n_c");

    const ArmStats treatment = arm_from_json(section("treatment"), "treatment");
    const ArmStats control = arm_from_json(section("control"), "control");
    const SignificanceConfig config{args.alpha, args.power};
    const CorrectedReadout readout = lift_and_significance(treatment, control, sizes, config);
    const std::string readout_json = readout_to_json(readout, sizes, config);

    std::optional<BacktestReport> backtest;
    if (stats.contains("full_population")) {
        const nlohmann::json full = stats.at("full_population");
        TwoArmSample full_sample;
        full_sample.treatment = sample_from_json(full.at("treatment"), "full_population.treatment");
        full_sample.control = sample_from_json(full.at("control"), "full_population.control");
        backtest = backtest_report(full_sample, {treatment, control}, sizes, config);
    }

    std::ostringstream text;
    text << "delta:    " << format_double(readout.delta_pct * 100.0) << "%\n";
    text << "p-value:  " << format_double(readout.p_value) << '\n';
    text << "mde:      " << format_double(readout.mde * 100.0) << "%\n";
    for (const std::string& w : readout.warnings) text << "warning: " << w << '\n';
    if (backtest) {
        text << '\n';
        text << backtest_table_text(*backtest);
    }

    OutputSet outputs{fs::path(args.out_dir)};
    write_file(outputs.stage("readout.json"), readout_json + "\n");
    write_file(outputs.stage("readout.txt"), text.str());
    if (backtest) write_file(outputs.stage("backtest.json"), backtest_to_json(*backtest) + "\n");

    RunManifest manifest;
    manifest.command = "correct";
    manifest.created_utc = timestamp_utc();
    nlohmann::json config_json;
    config_json["stats"] = args.stats;
    config_json["alpha"] = args.alpha;
    config_json["power"] = args.power;
    manifest.config_hash = sha256_hex(config_json.dump());
    manifest.inputs[args.stats] = sha256_file(args.stats);
    manifest.outputs = outputs.digests();
    write_file(outputs.stage("manifest.json"), manifest.to_json() + "\n");
    outputs.commit();

    if (args.format == "json")
        std::cout << readout_json << '\n';
    else
        std::cout << text.str();
    return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    std::size_t runs = 50;
    double alpha = 0.05;
    bool export_graph = false;
    std::string format = "text";

    std::size_t ego_count = 1000;
    std::size_t alter_count = 10000;
    double mean_degree = 10.0;
    double power_law_exponent = 2.5;
    double affinity = 0.8;
    double weight_mu = 0.0;
    double weight_sigma = 1.0;

    double base_rate = 1.0;
    double effect_size = 0.1;
    std::string response = "linear";
    double noise_sd = 0.05;
};

int run_simulate(const SimulateArgs& args) {
    SimConfig config;
    config.ego_count = args.ego_count;
    config.alter_count = args.alter_count;
    config.mean_degree = args.mean_degree;
    config.power_law_exponent = args.power_law_exponent;
    config.affinity = args.affinity;
    config.weight_mu = args.weight_mu;
    config.weight_sigma = args.weight_sigma;
    config.seed = args.seed;

    EffectModel model;
    model.base_rate = args.base_rate;
    model.effect_size = args.effect_size;
    model.response = args.response == "saturating" ? EffectModel::Response::saturating
                                                   : EffectModel::Response::linear;
    model.noise_sd = args.noise_sd;

    std::vector<std::uint64_t> seeds(args.runs);
    for (std::size_t i = 0; i < args.runs; ++i) seeds[i] = args.seed + i;
    const ComparisonReport report = run_comparison(config, model, seeds, args.alpha);
    const std::string report_json = comparison_to_json(report);

    OutputSet outputs{fs::path(args.out_dir)};
    write_file(outputs.stage("simulation_report.json"), report_json + "\n");
    if (args.export_graph) {
        const NetworkSnapshot graph = generate_graph(config);
        std::ofstream out(outputs.stage("graph_t0.csv"), std::ios::binary);
        write_edge_list(graph, out);
    }

    RunManifest manifest;
    manifest.command = "simulate";
    manifest.seed = args.seed;
    manifest.created_utc = timestamp_utc();
    nlohmann::json config_json;
    config_json["seed"] = args.seed;
    config_json["runs"] = args.runs;
    config_json["alpha"] = args.alpha;
    config_json["ego_count"] = args.ego_count;
    config_json["alter_count"] = args.alter_count;
    config_json["mean_degree"] = args.mean_degree;
    config_json["power_law_exponent"] = args.power_law_exponent;
    config_json["affinity"] = args.affinity;
    config_json["effect_size"] = args.effect_size;
    config_json["response"] = args.response;
    config_json["noise_sd"] = args.noise_sd;
    manifest.config_hash = sha256_hex(config_json.dump());
    manifest.outputs = outputs.digests();
    write_file(outputs.stage("manifest.json"), manifest.to_json() + "\n");
    outputs.commit();

    std::ostringstream text;
    text << "true ATE:            " << format_double(report.true_ate) << '\n';
    text << "ego-cluster mean:    " << format_double(report.ego_cluster.mean_estimate)
         << " (bias " << format_double(report.ego_cluster.bias) << ", power "
         << format_double(report.ego_cluster.power) << ")\n";
    text << "naive-viewer mean:   " << format_double(report.naive_viewer.mean_estimate)
         << " (bias " << format_double(report.naive_viewer.bias) << ", power "
         << format_double(report.naive_viewer.power) << ")\n";
    if (args.format == "json")
        std::cout << report_json << '\n';
    else
        std::cout << text.str();
    return 0;
}

// ---------------------------------------------------------------- oracle-check

struct OracleArgs {
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    std::size_t instances = 200;
    std::size_t max_alters = 12;
    std::size_t max_egos = 6;
    std::string format = "text";
};

int run_oracle_check(const OracleArgs& args) {
    if (args.max_alters > 20)
        throw std::runtime_error("max-alters is capped at 20 by the brute-force guard");
    if (args.max_egos < 2 || args.instances == 0)
        throw std::runtime_error("need at least 2 egos and 1 instance");

    std::size_t passed = 0;
    std::size_t ties = 0;
    std::vector<std::size_t> failures;
    for (std::size_t i = 0; i < args.instances; ++i) {
        rng::SplitMix64 gen(rng::fmix64(args.seed ^ (0x6f7261636c65ULL + i)));
        const std::size_t n_egos = 2 + gen.below(args.max_egos - 1);
        const std::size_t n_alters = 1 + gen.below(args.max_alters);

        std::vector<RawEdge> rows;
        for (std::size_t a = 0; a < n_alters; ++a) {
            const std::size_t degree = 1 + gen.below(n_egos);
            std::vector<std::size_t> egos(n_egos);
            for (std::size_t e = 0; e < n_egos; ++e) egos[e] = e;
            for (std::size_t k = 0; k < degree; ++k) {
                const std::size_t j = k + gen.below(n_egos - k);
                std::swap(egos[k], egos[j]);
                rows.push_back({"a" + std::to_string(a), "e" + std::to_string(egos[k]),
                                static_cast<double>(1 + gen.below(9)),
                                InteractionKind::unspecified, 0});
            }
        }
        const NetworkSnapshot snapshot =
            NetworkSnapshot::build(std::move(rows), IdMode::text, "oracle");
        const EgoClusterSolution solution = build_solution(snapshot, args.seed + i);
        ties += solution.stats.ties_broken;
        const double algorithm_loss = total_misaligned_weight(solution, snapshot);
        const BruteForceResult oracle = brute_force_min_loss(snapshot, solution.ego_variants);
        if (algorithm_loss == oracle.min_total_loss)
            ++passed;
        else
            failures.push_back(i);
    }

    nlohmann::json j;
    j["instances"] = args.instances;
    j["passed"] = passed;
    j["failed_instances"] = failures;
    j["ties_broken"] = ties;
    const std::string report_json = j.dump(2);

    OutputSet outputs{fs::path(args.out_dir)};
    write_file(outputs.stage("oracle_report.json"), report_json + "\n");
    RunManifest manifest;
    manifest.command = "oracle-check";
    manifest.seed = args.seed;
    manifest.created_utc = timestamp_utc();
    nlohmann::json config_json;
    config_json["seed"] = args.seed;
    config_json["instances"] = args.instances;
    config_json["max_alters"] = args.max_alters;
    config_json["max_egos"] = args.max_egos;
    manifest.config_hash = sha256_hex(config_json.dump());
    manifest.outputs = outputs.digests();
    write_file(outputs.stage("manifest.json"), manifest.to_json() + "\n");
    outputs.commit();

    if (args.format == "json")
        std::cout << report_json << '\n';
    else
        std::cout << passed << "/" << args.instances << " instances optimal, " << ties
                  << " ties broken\n";
    return passed == args.instances ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ego-cluster network experimentation toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI config file; command-line flags win");

    ClusterArgs cluster_args;
    CLI::App* cluster = app.add_subcommand("cluster", "ingest an edge list and build solutions");
    cluster->add_option("--input", cluster_args.input, "T0 edge list")
        ->required()
        ->check(CLI::ExistingFile);
    cluster->add_option("--t14", cluster_args.t14, "end-of-window edge list")
        ->check(CLI::ExistingFile);
    cluster->add_option("--ego-list", cluster_args.ego_list, "custom ego id list")
        ->check(CLI::ExistingFile);
    cluster->add_option("--out-dir", cluster_args.out_dir, "output directory");
    cluster->add_option("--seed", cluster_args.seed, "clustering seed")->required();
    cluster->add_option("--treatment-fraction", cluster_args.treatment_fraction,
                        "probability an ego lands in treatment");
    cluster->add_option("--network-type", cluster_args.network_types,
                        "kind[:window_days]; repeat for several networks");
    cluster->add_option("--min-egos", cluster_args.min_egos,
                        "warn when the restricted ego count falls below this");
    cluster->add_option("--threads", cluster_args.threads, "worker threads for assignment");
    cluster->add_option("--max-loss-rate", cluster_args.max_loss_rate,
                        "quality gate on the T0 loss rate");
    cluster->add_option("--ramp-fraction", cluster_args.ramp_fraction,
                        "assumed ramp fraction for T14 scenarios");
    cluster->add_option("--format", cluster_args.format, "stdout format")
        ->check(CLI::IsMember({"text", "json"}));
    cluster_args.ingest.attach(cluster);

    DiagnoseArgs diagnose_args;
    CLI::App* diagnose = app.add_subcommand("diagnose", "score an existing solution");
    diagnose->add_option("--solution", diagnose_args.solution, "solution csv")
        ->required()
        ->check(CLI::ExistingFile);
    diagnose->add_option("--input", diagnose_args.input, "T0 edge list")
        ->required()
        ->check(CLI::ExistingFile);
    diagnose->add_option("--t14", diagnose_args.t14, "end-of-window edge list")
        ->check(CLI::ExistingFile);
    diagnose->add_option("--out-dir", diagnose_args.out_dir, "output directory");
    diagnose->add_option("--network-type", diagnose_args.network_type,
                         "kind[:window_days] the solution was built on");
    diagnose->add_option("--ramp-fraction", diagnose_args.ramp_fraction,
                         "assumed ramp fraction for T14 scenarios");
    diagnose->add_flag("--per-ego", diagnose_args.per_ego, "include per-ego loss detail");
    diagnose->add_option("--format", diagnose_args.format, "stdout format")
        ->check(CLI::IsMember({"text", "json"}));
    diagnose_args.ingest.attach(diagnose);

    CorrectArgs correct_args;
    CLI::App* correct = app.add_subcommand("correct", "bias-correct a leftover-traffic readout");
    correct->add_option("--stats", correct_args.stats, "per-arm stats JSON")
        ->required()
        ->check(CLI::ExistingFile);
    correct->add_option("--out-dir", correct_args.out_dir, "output directory");
    correct->add_option("--alpha", correct_args.alpha, "two-sided significance level");
    correct->add_option("--power", correct_args.power, "target power for the MDE");
    correct->add_option("--format", correct_args.format, "stdout format")
        ->check(CLI::IsMember({"text", "json"}));

    SimulateArgs simulate_args;
    CLI::App* simulate = app.add_subcommand("simulate", "replay designs on synthetic graphs");
    simulate->add_option("--out-dir", simulate_args.out_dir, "output directory");
    simulate->add_option("--seed", simulate_args.seed, "base seed")->required();
    simulate->add_option("--runs", simulate_args.runs, "Monte Carlo repetitions");
    simulate->add_option("--alpha", simulate_args.alpha, "rejection level for power");
    simulate->add_flag("--export-graph", simulate_args.export_graph,
                       "also write the first generated graph as an edge list");
    simulate->add_option("--format", simulate_args.format, "stdout format")
        ->check(CLI::IsMember({"text", "json"}));
    simulate->add_option("--ego-count", simulate_args.ego_count, "egos per graph");
    simulate->add_option("--alter-count", simulate_args.alter_count, "alters per graph");
    simulate->add_option("--mean-degree", simulate_args.mean_degree, "mean egos per alter");
    simulate->add_option("--power-law-exponent", simulate_args.power_law_exponent,
                         "degree distribution exponent");
    simulate->add_option("--affinity", simulate_args.affinity,
                         "weight concentration on the home ego, 0..1");
    simulate->add_option("--weight-mu", simulate_args.weight_mu, "log weight location");
    simulate->add_option("--weight-sigma", simulate_args.weight_sigma, "log weight spread");
    simulate->add_option("--base-rate", simulate_args.base_rate, "outcome with untreated audience");
    simulate->add_option("--effect-size", simulate_args.effect_size, "planted effect");
    simulate->add_option("--response", simulate_args.response, "effect response shape")
        ->check(CLI::IsMember({"linear", "saturating"}));
    simulate->add_option("--noise-sd", simulate_args.noise_sd, "outcome noise");

    OracleArgs oracle_args;
    CLI::App* oracle = app.add_subcommand("oracle-check",
                                          "verify the algorithm against brute-force minima");
    oracle->add_option("--out-dir", oracle_args.out_dir, "output directory");
    oracle->add_option("--seed", oracle_args.seed, "instance generator seed");
    oracle->add_option("--instances", oracle_args.instances, "random instances to run");
    oracle->add_option("--max-alters", oracle_args.max_alters, "alters per instance, at most 20");
    oracle->add_option("--max-egos", oracle_args.max_egos, "egos per instance");
    oracle->add_option("--format", oracle_args.format, "stdout format")
        ->check(CLI::IsMember({"text", "json"}));

    int code = 0;
    cluster->callback([&] { code = run_cluster(cluster_args); });
    diagnose->callback([&] { code = run_diagnose(diagnose_args); });
    correct->callback([&] { code = run_correct(correct_args); });
    simulate->callback([&] { code = run_simulate(simulate_args); });
    oracle->callback([&] { code = run_oracle_check(oracle_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int cli_code = app.exit(e);
        return cli_code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        print_error(e.what());
        return 2;
    }
    return code;
}
