#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qcor {

/// Raised when training or inference produces non-finite values.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised on malformed or inconsistent experiment configuration.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// FNV-1a 64-bit content hash. Not cryptographic; used to make output files
/// traceable to the exact configuration and checkpoints that produced them.
uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

/// Shortest decimal encoding that parses back to the identical double
/// (printed with 17 significant digits when needed).
std::string format_double(double value);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string hash_file_hex(const std::filesystem::path& path);

}  // namespace qcor
