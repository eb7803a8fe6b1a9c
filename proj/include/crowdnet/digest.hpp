#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace crowdnet
{
    /// Lower-case hex SHA-256 of `data`.
    std::string sha256_hex(std::string_view data);

    /// Lower-case hex SHA-256 of a file's bytes. Throws IoError if unreadable.
    std::string sha256_file(const std::filesystem::path &path);
}
