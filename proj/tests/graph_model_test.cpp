#include "doctest.h"

#include <algorithm>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "egocluster/ingest.hpp"
#include "egocluster/member.hpp"
#include "egocluster/snapshot.hpp"

using namespace egocluster;

namespace {

NetworkSnapshot ingest_str(const std::string& text, IngestOptions opts = {},
                           IngestReport* report = nullptr) {
    std::istringstream in(text);
    return ingest_edges(in, opts, report);
}

RawEdge edge(std::string alter, std::string ego, double w,
             InteractionKind kind = InteractionKind::unspecified, int day = 0) {
    return RawEdge{std::move(alter), std::move(ego), w, kind, day};
}

std::map<std::pair<std::string, std::string>, double> edge_map(const NetworkSnapshot& s) {
    std::map<std::pair<std::string, std::string>, double> out;
    for (const auto& e : s.edges())
        out[{s.member_name(e.alter), s.member_name(e.ego)}] = e.weight;
    return out;
}

} // namespace

TEST_SUITE("graph_model") {

TEST_CASE("duplicate alter-ego rows aggregate into one weighted edge") {
    auto snap = NetworkSnapshot::build(
        {edge("a1", "e1", 3), edge("a1", "e1", 2), edge("a2", "e1", 4)}, IdMode::text, "T0");
    auto edges = edge_map(snap);
    REQUIRE(edges.size() == 2);
    CHECK(edges.at({"a1", "e1"}) == 5.0);
    CHECK(edges.at({"a2", "e1"}) == 4.0);
    CHECK(snap.total_weight() == 9.0);
}

TEST_CASE("aggregation is invariant under input row order") {
    std::vector<RawEdge> rows;
    std::mt19937_64 rng(7);
    for (int i = 0; i < 400; ++i) {
        rows.push_back(edge("a" + std::to_string(rng() % 30), "e" + std::to_string(rng() % 12),
                            static_cast<double>(1 + rng() % 5),
                            static_cast<InteractionKind>(rng() % 5),
                            static_cast<int>(rng() % 90)));
    }
    auto base = NetworkSnapshot::build(rows, IdMode::text, "T0");
    std::shuffle(rows.begin(), rows.end(), rng);
    auto shuffled = NetworkSnapshot::build(rows, IdMode::text, "T0");
    CHECK(base == shuffled);
    CHECK(base.digest() == shuffled.digest());
}

TEST_CASE("snapshot rejects self edges and bad weights at build time") {
    CHECK_THROWS_AS((void)NetworkSnapshot::build({edge("a1", "a1", 7)}, IdMode::text, "T0"),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)NetworkSnapshot::build({edge("a1", "e1", -1)}, IdMode::text, "T0"),
                    std::invalid_argument);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS((void)NetworkSnapshot::build({edge("a1", "e1", inf)}, IdMode::text, "T0"),
                    std::invalid_argument);
}

TEST_CASE("ingest drops self interactions and reports them") {
    IngestReport report;
    auto snap = ingest_str("alter_id,ego_id,weight\n"
                           "a1,e1,3\n"
                           "a1,a1,7\n"
                           "a2,e1,4\n",
                           {}, &report);
    CHECK(report.rows_read == 3);
    CHECK(report.rows_dropped == 1);
    CHECK(report.drop_reasons.at("self_interaction") == 1);
    auto edges = edge_map(snap);
    CHECK(edges.size() == 2);
    CHECK(snap.find_member("a1").has_value()); // a1 still present as alter
    CHECK(snap.total_weight() == 7.0);
}

TEST_CASE("a large file with a few malformed rows survives under the error budget") {
    std::ostringstream file;
    file << "alter_id,ego_id,weight\n";
    std::map<std::pair<std::string, std::string>, double> expect;
    std::size_t good = 0;
    for (int i = 0; i < 1000; ++i) {
        if (i == 100) {
            file << "a1,e1,not_a_number\n";
        } else if (i == 500) {
            file << "only_one_field\n";
        } else if (i == 900) {
            file << ",e2,5\n";
        } else {
            std::string alter = "a" + std::to_string(i % 50);
            std::string ego = "e" + std::to_string(i % 20);
            double w = static_cast<double>(i % 7 + 1);
            file << alter << ',' << ego << ',' << w << '\n';
            expect[{alter, ego}] += w;
            ++good;
        }
    }
    IngestOptions opts;
    opts.error_budget = 10;
    IngestReport report;
    auto snap = ingest_str(file.str(), opts, &report);
    CHECK(report.rows_read == 1000);
    CHECK(report.rows_dropped == 3);
    CHECK(report.drop_reasons.at("bad_weight") == 1);
    CHECK(report.drop_reasons.at("bad_column_count") == 1);
    CHECK(report.drop_reasons.at("bad_member_id") == 1);
    CHECK(report.edges_out == expect.size());
    CHECK(edge_map(snap) == expect);
    double raw_total = 0.0;
    for (const auto& [k, w] : expect) raw_total += w;
    CHECK(snap.total_weight() == doctest::Approx(raw_total).epsilon(1e-12));
    (void)good;
}

TEST_CASE("exceeding the error budget fails the whole ingest") {
    std::ostringstream file;
    file << "alter_id,ego_id,weight\n";
    for (int i = 0; i < 12; ++i) file << "a,e,oops\n";
    IngestOptions opts;
    opts.error_budget = 10;
    CHECK_THROWS_WITH_AS((void)ingest_str(file.str(), opts), doctest::Contains("error budget"),
                         std::runtime_error);
}

TEST_CASE("negative weights and empty inputs are fatal") {
    CHECK_THROWS_AS((void)ingest_str("alter_id,ego_id,weight\na1,e1,-2\n"), std::runtime_error);
    CHECK_THROWS_AS((void)ingest_str(""), std::runtime_error);
    CHECK_THROWS_AS((void)ingest_str("alter_id,ego_id,weight\n"), std::runtime_error);
}

TEST_CASE("tab delimiter and headerless layouts are autodetected or declared") {
    auto tab = ingest_str("alter_id\tego_id\tweight\na1\te1\t2.5\n");
    CHECK(edge_map(tab).at({"a1", "e1"}) == 2.5);

    IngestOptions headerless;
    headerless.has_header = false;
    auto plain = ingest_str("a1,e1,2.5\na2,e1,1\n", headerless);
    CHECK(edge_map(plain).size() == 2);
}

TEST_CASE("kind and day columns ride along and feed the type filter") {
    IngestReport report;
    auto snap = ingest_str("alter_id,ego_id,weight,kind,day\n"
                           "a1,e1,3,click,5\n"
                           "a1,e1,2,click,40\n"
                           "a2,e1,4,reshare,5\n"
                           "a9,e1,1,click,bad_day\n",
                           {}, &report);
    CHECK(report.drop_reasons.at("bad_day") == 1);
    CHECK(snap.has_metadata());

    auto clicks28 = build_network(snap, NetworkType{InteractionKind::click, 28});
    auto clicks90 = build_network(snap, NetworkType{InteractionKind::click, 90});
    CHECK(edge_map(clicks28).at({"a1", "e1"}) == 3.0);
    CHECK(edge_map(clicks90).at({"a1", "e1"}) == 5.0);
    CHECK(edge_map(clicks90).count({"a2", "e1"}) == 0);
}

TEST_CASE("a narrower window keeps a subset of edges with no larger weights") {
    std::vector<RawEdge> rows;
    std::mt19937_64 rng(11);
    for (int i = 0; i < 600; ++i) {
        rows.push_back(edge("a" + std::to_string(rng() % 40), "e" + std::to_string(rng() % 15),
                            static_cast<double>(1 + rng() % 4), InteractionKind::impression,
                            static_cast<int>(rng() % 90)));
    }
    auto snap = NetworkSnapshot::build(rows, IdMode::text, "T0");
    auto narrow = edge_map(build_network(snap, {InteractionKind::impression, 28}));
    auto wide = edge_map(build_network(snap, {InteractionKind::impression, 90}));
    REQUIRE(!narrow.empty());
    for (const auto& [key, w] : narrow) {
        REQUIRE(wide.count(key) == 1);
        CHECK(w <= wide.at(key));
    }

    // day is counted from the snapshot origin: day = window is out, day = window-1 is in
    auto boundary = NetworkSnapshot::build({edge("a1", "e1", 1, InteractionKind::click, 28),
                                            edge("a2", "e1", 1, InteractionKind::click, 27)},
                                           IdMode::text, "T0");
    auto filtered = edge_map(build_network(boundary, {InteractionKind::click, 28}));
    CHECK(filtered.count({"a1", "e1"}) == 0);
    CHECK(filtered.count({"a2", "e1"}) == 1);
}

TEST_CASE("per-window edge weights match a direct recount") {
    std::vector<RawEdge> rows;
    std::mt19937_64 rng(23);
    std::map<std::pair<std::string, std::string>, double> expect;
    for (int i = 0; i < 500; ++i) {
        std::string alter = "a" + std::to_string(rng() % 25);
        std::string ego = "e" + std::to_string(rng() % 10);
        auto kind = static_cast<InteractionKind>(rng() % 5);
        int day = static_cast<int>(rng() % 120);
        double w = static_cast<double>(1 + rng() % 6);
        rows.push_back(edge(alter, ego, w, kind, day));
        if (kind == InteractionKind::like && day < 45) expect[{alter, ego}] += w;
    }
    auto snap = NetworkSnapshot::build(rows, IdMode::text, "T0");
    auto filtered = build_network(snap, {InteractionKind::like, 45});
    CHECK(edge_map(filtered) == expect);
    CHECK(filtered.label() == snap.label());
}

TEST_CASE("filtering by a type is idempotent") {
    std::vector<RawEdge> rows;
    std::mt19937_64 rng(31);
    for (int i = 0; i < 300; ++i)
        rows.push_back(edge("a" + std::to_string(rng() % 20), "e" + std::to_string(rng() % 8),
                            1.0, static_cast<InteractionKind>(rng() % 3),
                            static_cast<int>(rng() % 60)));
    auto snap = NetworkSnapshot::build(rows, IdMode::text, "T0");
    NetworkType type{InteractionKind::comment, 30};
    auto once = build_network(snap, type);
    auto twice = build_network(once, type);
    CHECK(once == twice);
}

TEST_CASE("a kind absent from the data yields an empty network and a warning") {
    auto snap = NetworkSnapshot::build({edge("a1", "e1", 2, InteractionKind::click, 1)},
                                       IdMode::text, "T0");
    std::vector<std::string> warnings;
    auto empty = build_network(snap, {InteractionKind::viral_action, 90}, &warnings);
    CHECK(empty.empty());
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("viral_action") != std::string::npos);
}

TEST_CASE("restrict_egos keeps exactly the requested egos") {
    auto snap = NetworkSnapshot::build({edge("a1", "e1", 2), edge("a2", "e1", 3),
                                        edge("a2", "e2", 5), edge("a3", "e2", 1)},
                                       IdMode::text, "T0");
    std::vector<std::string> warnings;
    auto all = restrict_egos(snap, {"e1", "e2"}, 1, &warnings);
    CHECK(all == snap);
    CHECK(warnings.empty());

    auto only_e1 = restrict_egos(snap, {"e1"}, 1, &warnings);
    auto edges = edge_map(only_e1);
    CHECK(edges.size() == 2);
    CHECK(edges.count({"a1", "e1"}) == 1);
    CHECK(edges.count({"a2", "e1"}) == 1);
    CHECK(!only_e1.find_member("a3").has_value()); // dangling members dropped
    CHECK(!only_e1.find_member("e2").has_value());

    warnings.clear();
    auto warned = restrict_egos(snap, {"e1"}, 100, &warnings);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("1") != std::string::npos);

    CHECK_THROWS_AS((void)restrict_egos(snap, {"nobody"}, 1), std::runtime_error);
    CHECK_THROWS_AS((void)restrict_egos(snap, {}, 1), std::invalid_argument);
}

TEST_CASE("integer id mode canonicalizes and orders numerically") {
    auto snap = NetworkSnapshot::build({edge("007", "15", 1), edge("7", "15", 2),
                                        edge("102", "15", 1), edge("21", "15", 1)},
                                       IdMode::integer, "T0");
    auto edges = edge_map(snap);
    CHECK(edges.at({"7", "15"}) == 3.0); // "007" and "7" are one member
    CHECK(id_less("21", "102", IdMode::integer));
    CHECK(!id_less("102", "21", IdMode::integer));
    CHECK(id_less("102", "21", IdMode::text));
    CHECK_THROWS_AS((void)canonicalize_id("x9", IdMode::integer), std::invalid_argument);
    CHECK_THROWS_AS((void)canonicalize_id("", IdMode::text), std::invalid_argument);
    CHECK(canonicalize_id("-03", IdMode::integer) == "-3");
}

TEST_CASE("edge list serialization round-trips through ingest") {
    std::vector<RawEdge> rows;
    std::mt19937_64 rng(47);
    for (int i = 0; i < 200; ++i)
        rows.push_back(edge("a" + std::to_string(rng() % 15), "e" + std::to_string(rng() % 6),
                            0.25 * static_cast<double>(1 + rng() % 9),
                            static_cast<InteractionKind>(rng() % 4),
                            static_cast<int>(rng() % 30)));
    auto snap = NetworkSnapshot::build(rows, IdMode::text, "T0");
    std::ostringstream out;
    write_edge_list(snap, out);
    auto back = ingest_str(out.str());
    CHECK(back == snap);

    // metadata-free snapshots round-trip as plain 3-column lists
    auto bare = NetworkSnapshot::build({edge("a1", "e1", 0.5), edge("a2", "e1", 2)},
                                       IdMode::text, "T0");
    std::ostringstream out2;
    write_edge_list(bare, out2);
    CHECK(ingest_str(out2.str()) == bare);
}

TEST_CASE("network type parsing and slugs") {
    auto t = parse_network_type("viral_action:90");
    REQUIRE(t.has_value());
    CHECK(t->kind == InteractionKind::viral_action);
    CHECK(t->window_days == 90);
    CHECK(t->slug() == "viral_action_90d");

    auto dflt = parse_network_type("impression");
    REQUIRE(dflt.has_value());
    CHECK(dflt->window_days == 90);

    CHECK(!parse_network_type("sneeze:90").has_value());
    CHECK(!parse_network_type("click:0").has_value());
    CHECK(!parse_network_type("").has_value());
}

TEST_CASE("member index lookups agree with the canonical order") {
    auto snap = NetworkSnapshot::build({edge("b", "z", 1), edge("a", "z", 1), edge("c", "y", 1)},
                                       IdMode::text, "T0");
    for (std::uint32_t i = 0; i < snap.member_count(); ++i)
        CHECK(snap.find_member(snap.member_name(i)) == i);
    CHECK(!snap.find_member("nope").has_value());
    CHECK(snap.ego_members().size() == 2);
    CHECK(snap.alter_members().size() == 3);
    for (auto m : snap.alter_members()) {
        auto span = snap.alter_edges(m);
        CHECK(span.size() == 1);
        CHECK(span.front().alter == m);
    }
}

} // TEST_SUITE
