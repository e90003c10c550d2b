// ingest.cpp

#include "egocluster/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace egocluster {

namespace {

// Columns resolved to indexes; -1 = absent.
struct ColumnPlan {
    int alter = -1;
    int ego = -1;
    int weight = -1;
    int kind = -1;
    int day = -1;
    int max_needed() const { return std::max({alter, ego, weight, kind, day}); }
};

void split_line(std::string_view line, char delim, std::vector<std::string_view>& out) {
    out.clear();
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

char detect_delimiter(std::string_view line) {
    const std::size_t tabs = std::count(line.begin(), line.end(), '\t');
    const std::size_t commas = std::count(line.begin(), line.end(), ',');
    return tabs > commas ? '\t' : ',';
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    return s;
}

bool parse_double(std::string_view s, double& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_int(std::string_view s, std::int32_t& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

} // namespace

std::string IngestReport::to_json() const {
    nlohmann::json j;
    j["rows_read"] = rows_read;
    j["rows_dropped"] = rows_dropped;
    j["drop_reasons"] = drop_reasons;
    j["edges_out"] = edges_out;
    j["members_out"] = members_out;
    j["total_weight"] = total_weight;
    return j.dump(2);
}

NetworkSnapshot ingest_edges(std::istream& in, const IngestOptions& options, IngestReport* report) {
    IngestReport local;
    IngestReport& rep = report ? *report : local;
    rep = IngestReport{};

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("ingest: empty input");

    char delim = options.delimiter;
    if (delim == '\0') delim = detect_delimiter(line);

    std::vector<std::string_view> fields;
    ColumnPlan plan;
    if (options.has_header) {
        split_line(line, delim, fields);
        for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
            const std::string_view name = trim(fields[i]);
            if (name == options.col_alter) plan.alter = i;
            else if (name == options.col_ego) plan.ego = i;
            else if (name == options.col_weight) plan.weight = i;
            else if (name == options.col_kind) plan.kind = i;
            else if (name == options.col_day) plan.day = i;
        }
        if (plan.alter < 0 || plan.ego < 0 || plan.weight < 0)
            throw std::runtime_error("ingest: header is missing required columns '" +
                                     options.col_alter + "', '" + options.col_ego + "', '" +
                                     options.col_weight + "'");
    } else {
        plan.alter = options.idx_alter;
        plan.ego = options.idx_ego;
        plan.weight = options.idx_weight;
        plan.kind = options.idx_kind;
        plan.day = options.idx_day;
        if (plan.alter < 0 || plan.ego < 0 || plan.weight < 0)
            throw std::runtime_error("ingest: alter/ego/weight column indexes are required");
    }

    std::vector<MemberId> members;
    std::vector<NetworkSnapshot::IndexedEdge> edges;
    std::unordered_map<std::string, std::uint32_t> intern;
    bool metadata = plan.kind >= 0 || plan.day >= 0;
    std::size_t malformed = 0;

    auto drop = [&rep](const char* reason) {
        ++rep.rows_dropped;
        ++rep.drop_reasons[reason];
    };
    auto intern_id = [&](std::string&& canon) {
        auto [it, inserted] = intern.try_emplace(std::move(canon),
                                                 static_cast<std::uint32_t>(members.size()));
        if (inserted) members.push_back(it->first);
        return it->second;
    };

    auto consume_row = [&](std::string_view row) {
        ++rep.rows_read;
        split_line(row, delim, fields);
        if (static_cast<int>(fields.size()) <= plan.max_needed()) {
            drop("bad_column_count");
            ++malformed;
            return;
        }
        const std::string_view alter_tok = trim(fields[plan.alter]);
        const std::string_view ego_tok = trim(fields[plan.ego]);
        const std::string_view weight_tok = trim(fields[plan.weight]);

        double weight = 0.0;
        if (!parse_double(weight_tok, weight) || std::isnan(weight)) {
            drop("bad_weight");
            ++malformed;
            return;
        }
        if (weight < 0.0)
            throw std::runtime_error("ingest: negative weight '" + std::string(weight_tok) +
                                     "' at data row " + std::to_string(rep.rows_read));
        if (!std::isfinite(weight)) {
            drop("bad_weight");
            ++malformed;
            return;
        }

        NetworkSnapshot::IndexedEdge e;
        e.weight = weight;
        if (plan.kind >= 0) {
            const auto kind = parse_kind(trim(fields[plan.kind]));
            if (!kind) {
                drop("bad_kind");
                ++malformed;
                return;
            }
            e.kind = *kind;
        }
        if (plan.day >= 0) {
            if (!parse_int(trim(fields[plan.day]), e.day)) {
                drop("bad_day");
                ++malformed;
                return;
            }
        }

        MemberId alter_id, ego_id;
        try {
            alter_id = canonicalize_id(alter_tok, options.id_mode);
            ego_id = canonicalize_id(ego_tok, options.id_mode);
        } catch (const std::invalid_argument&) {
            drop("bad_member_id");
            ++malformed;
            return;
        }
        if (alter_id == ego_id) {
            drop("self_interaction");
            return;
        }
        e.alter = intern_id(std::move(alter_id));
        e.ego = intern_id(std::move(ego_id));
        edges.push_back(e);
    };

    auto check_budget = [&] {
        if (malformed > options.error_budget)
            throw std::runtime_error("ingest: " + std::to_string(malformed) +
                                     " malformed rows exceed the error budget of " +
                                     std::to_string(options.error_budget));
    };
    if (!options.has_header) {
        consume_row(trim(line));
        check_budget();
    }
    while (std::getline(in, line)) {
        const std::string_view row = trim(line);
        if (row.empty()) continue;
        consume_row(row);
        check_budget();
    }

    if (rep.rows_read == 0) throw std::runtime_error("ingest: empty input");
    if (edges.empty()) throw std::runtime_error("ingest: no usable edges after cleaning");

    NetworkSnapshot snap = NetworkSnapshot::build_indexed(std::move(members), std::move(edges),
                                                          options.id_mode, options.label, metadata);
    rep.edges_out = snap.edges().size();
    rep.members_out = snap.member_count();
    rep.total_weight = snap.total_weight();
    return snap;
}

NetworkSnapshot ingest_edges(const std::filesystem::path& path, const IngestOptions& options,
                             IngestReport* report) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("ingest: cannot open " + path.string());
    return ingest_edges(in, options, report);
}

} // namespace egocluster
