#pragma once

#include <filesystem>
#include <string>

namespace harnack::cli {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Writes `content` to path, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& content);

/// manifest.json in dir: every other regular file below dir (sorted relative
/// paths) with its byte size and SHA-256.
void write_manifest(const std::filesystem::path& dir);

}  // namespace harnack::cli
