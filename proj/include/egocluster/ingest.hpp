// ingest.hpp
//
// Delimiter-separated edge-list ingestion with a malformed-row budget and
// a structured drop report.

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "egocluster/snapshot.hpp"

namespace egocluster {

struct IngestOptions {
    IdMode id_mode = IdMode::text;
    char delimiter = '\0'; // '\0' = autodetect between comma and tab
    bool has_header = true;
    // Header names (header mode) for the required and optional columns.
    std::string col_alter = "alter_id";
    std::string col_ego = "ego_id";
    std::string col_weight = "weight";
    std::string col_kind = "kind";
    std::string col_day = "day";
    // Zero-based column indexes (headerless mode); -1 = column absent.
    int idx_alter = 0;
    int idx_ego = 1;
    int idx_weight = 2;
    int idx_kind = -1;
    int idx_day = -1;
    // Malformed rows tolerated before the whole ingest fails.
    std::size_t error_budget = 100;
    std::string label = "T0";
};

struct IngestReport {
    std::size_t rows_read = 0;
    std::size_t rows_dropped = 0;
    std::map<std::string, std::size_t> drop_reasons;
    std::size_t edges_out = 0;
    std::size_t members_out = 0;
    double total_weight = 0.0;

    std::string to_json() const;
};

// Parses, validates, and aggregates an edge list into a snapshot.
// Malformed rows are dropped and counted until the budget is exceeded;
// a parseable negative weight or an effectively empty input is fatal.
NetworkSnapshot ingest_edges(std::istream& in, const IngestOptions& options,
                             IngestReport* report = nullptr);
NetworkSnapshot ingest_edges(const std::filesystem::path& path, const IngestOptions& options,
                             IngestReport* report = nullptr);

} // namespace egocluster
