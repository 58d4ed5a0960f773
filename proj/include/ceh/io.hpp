#pragma once

#include <filesystem>
#include <string>

namespace ceh {

/// Writes to a sibling temporary file and renames it over `path`.
/// Throws IoError.
void write_text_atomically(const std::filesystem::path& path, const std::string& text);

}  // namespace ceh
