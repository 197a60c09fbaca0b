#pragma once

#include <filesystem>
#include <istream>
#include <memory>

namespace botsift {

/// Opens a file for reading, transparently inflating gzip content (detected
/// by its magic bytes, not the file name). Throws IoError.
std::unique_ptr<std::istream> open_input(const std::filesystem::path& path);

}  // namespace botsift
