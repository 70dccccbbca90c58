#pragma once

#include <optional>
#include <string>

namespace refbench {

std::string sha256_hex(const std::string& data);

std::string read_file(const std::string& path);  // throws IoError
std::optional<std::string> read_file_if_exists(const std::string& path);

// Writes via a temp file in the same directory plus rename, so readers
// never observe a partial file.
void atomic_write_file(const std::string& path, const std::string& content);

std::string iso_utc_now();

std::string getenv_or(const char* name, const std::string& fallback = "");

}  // namespace refbench
