#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace gtrx::fileio {

/// Whole-file read; throws IoFailure.
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it into place, so readers
/// never see a partial file. Creates parent directories. Throws IoFailure.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace gtrx::fileio
