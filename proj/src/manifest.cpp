// manifest.cpp

#include "egocluster/manifest.hpp"

#include <cstdlib>
#include <ctime>
#include <stdexcept>
#include <system_error>

#include <unistd.h>

#include "json.hpp"

#include "egocluster/sha256.hpp"

namespace egocluster {

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["tool"] = std::string(kToolName);
    j["version"] = std::string(kToolVersion);
    j["command"] = command;
    j["config_hash"] = config_hash;
    if (seed)
        j["seed"] = *seed;
    else
        j["seed"] = nullptr;
    j["created_utc"] = created_utc;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    return j.dump(2);
}

std::string timestamp_utc() {
    std::time_t now;
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        now = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    } else {
        now = std::time(nullptr);
    }
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

OutputSet::OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

OutputSet::~OutputSet() {
    if (committed_) return;
    for (const auto& [name, temp] : staged_) {
        std::error_code ec;
        std::filesystem::remove(temp, ec);
    }
}

std::filesystem::path OutputSet::stage(const std::string& name) {
    if (name.empty() || name.find('/') != std::string::npos)
        throw std::invalid_argument("output name must be a bare file name");
    std::filesystem::path temp =
        dir_ / ("." + name + ".tmp." + std::to_string(static_cast<long>(::getpid())));
    staged_.emplace_back(name, temp);
    return temp;
}

std::map<std::string, std::string> OutputSet::digests() const {
    std::map<std::string, std::string> result;
    for (const auto& [name, temp] : staged_) result[name] = sha256_file(temp);
    return result;
}

void OutputSet::commit() {
    for (const auto& [name, temp] : staged_)
        std::filesystem::rename(temp, dir_ / name);
    committed_ = true;
}

} // namespace egocluster
