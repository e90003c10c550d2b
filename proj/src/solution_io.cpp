// solution_io.cpp

#include "egocluster/solution_io.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace egocluster {

namespace {

struct Row {
    const MemberId* member;
    bool is_ego;
    Variant variant;
    const MemberId* attached_ego; // nullptr for egos
};

[[noreturn]] void fail(std::size_t line_no, const std::string& field, const std::string& what) {
    throw std::runtime_error("solution file line " + std::to_string(line_no) + ", field '" +
                             field + "': " + what);
}

} // namespace

void write_solution_csv(const EgoClusterSolution& solution, std::ostream& out) {
    std::vector<Row> rows;
    rows.reserve(solution.ego_variants.size() + solution.alter_assignments.size());
    for (const auto& [name, variant] : solution.ego_variants)
        rows.push_back({&name, true, variant, nullptr});
    for (const auto& [name, assignment] : solution.alter_assignments)
        rows.push_back({&name, false, assignment.variant, &assignment.attached_ego});
    std::sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
        return id_less(*a.member, *b.member, solution.id_mode);
    });

    out << "member_id,role,variant,attached_ego\n";
    for (const Row& row : rows) {
        out << *row.member << ',' << (row.is_ego ? "ego" : "alter") << ','
            << variant_name(row.variant) << ',';
        if (row.attached_ego) out << *row.attached_ego;
        out << '\n';
    }
    if (!out) throw std::runtime_error("failed while writing solution file");
}

void write_solution_csv(const EgoClusterSolution& solution, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    write_solution_csv(solution, out);
}

EgoClusterSolution load_solution_csv(std::istream& in, IdMode id_mode) {
    EgoClusterSolution solution;
    solution.id_mode = id_mode;

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("solution file is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "member_id,role,variant,attached_ego")
        fail(1, "header", "expected 'member_id,role,variant,attached_ego', got '" + line + "'");

    struct PendingAlter {
        MemberId alter;
        Variant variant;
        MemberId attached_ego;
        std::size_t line_no;
    };
    std::vector<PendingAlter> alters;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::array<std::string, 4> cols;
        std::size_t col = 0;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                if (col >= cols.size()) fail(line_no, "row", "more than 4 columns");
                cols[col++] = line.substr(start, i - start);
                start = i + 1;
            }
        }
        if (col != 4) fail(line_no, "row", "expected 4 columns, got " + std::to_string(col));

        MemberId member;
        try {
            member = canonicalize_id(cols[0], id_mode);
        } catch (const std::exception& e) {
            fail(line_no, "member_id", e.what());
        }
        const auto variant = parse_variant(cols[2]);
        if (!variant) fail(line_no, "variant", "unknown value '" + cols[2] + "'");

        if (cols[1] == "ego") {
            if (!cols[3].empty()) fail(line_no, "attached_ego", "must be empty for an ego row");
            if (!solution.ego_variants.emplace(member, *variant).second)
                fail(line_no, "member_id", "duplicate ego '" + member + "'");
        } else if (cols[1] == "alter") {
            if (cols[3].empty()) fail(line_no, "attached_ego", "missing for an alter row");
            MemberId attached;
            try {
                attached = canonicalize_id(cols[3], id_mode);
            } catch (const std::exception& e) {
                fail(line_no, "attached_ego", e.what());
            }
            alters.push_back({std::move(member), *variant, std::move(attached), line_no});
        } else {
            fail(line_no, "role", "unknown value '" + cols[1] + "' (expected ego or alter)");
        }
    }

    for (PendingAlter& row : alters) {
        const auto ego_it = solution.ego_variants.find(row.attached_ego);
        if (ego_it == solution.ego_variants.end())
            fail(row.line_no, "attached_ego", "'" + row.attached_ego + "' is not an ego row");
        if (ego_it->second != row.variant)
            fail(row.line_no, "variant",
                 "alter variant does not match attached ego '" + row.attached_ego + "'");
        if (solution.ego_variants.count(row.alter))
            fail(row.line_no, "member_id", "'" + row.alter + "' already appears as an ego");
        if (!solution.alter_assignments
                 .emplace(std::move(row.alter), AlterAssignment{row.variant, std::move(row.attached_ego)})
                 .second)
            fail(row.line_no, "member_id", "duplicate alter row");
    }
    if (solution.ego_variants.empty())
        throw std::runtime_error("solution file has no ego rows");

    solution.stats.ego_count = solution.ego_variants.size();
    solution.stats.assigned_alters = solution.alter_assignments.size();
    return solution;
}

EgoClusterSolution load_solution_csv(const std::filesystem::path& path, IdMode id_mode) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open solution file '" + path.string() + "'");
    return load_solution_csv(in, id_mode);
}

} // namespace egocluster
