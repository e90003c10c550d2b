// manifest.hpp
//
// Run provenance: config hash, input and output digests, seed, tool
// version, timestamps. OutputSet stages every artifact in temp files and
// renames them into place in one commit, so a failing run leaves nothing
// behind.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace egocluster {

inline constexpr std::string_view kToolName = "egocluster";
inline constexpr std::string_view kToolVersion = "1.0.0";

struct RunManifest {
    std::string command;     // subcommand that produced the outputs
    std::string config_hash; // sha256 of the resolved configuration
    std::optional<std::uint64_t> seed;
    std::string created_utc;
    std::map<std::string, std::string> inputs;  // path -> sha256
    std::map<std::string, std::string> outputs; // file name -> sha256

    std::string to_json() const;
};

// ISO-8601 UTC now; honors SOURCE_DATE_EPOCH for reproducible runs.
std::string timestamp_utc();

class OutputSet {
public:
    explicit OutputSet(std::filesystem::path dir);
    ~OutputSet(); // removes staged files that were never committed

    OutputSet(const OutputSet&) = delete;
    OutputSet& operator=(const OutputSet&) = delete;

    // Temp path to write the artifact to; the final name takes effect on
    // commit.
    std::filesystem::path stage(const std::string& name);

    // sha256 per staged file, keyed by final name.
    std::map<std::string, std::string> digests() const;

    // Renames every staged file to its final name.
    void commit();

private:
    std::filesystem::path dir_;
    std::vector<std::pair<std::string, std::filesystem::path>> staged_;
    bool committed_ = false;
};

} // namespace egocluster
