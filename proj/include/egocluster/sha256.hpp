// sha256.hpp

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace egocluster {

// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

// Incremental variant for streamed hashing.
class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(std::string_view data);
    void update(const void* data, std::size_t len);
    std::string hex_digest(); // finalizes; further updates are invalid

private:
    void* ctx_;
};

} // namespace egocluster
