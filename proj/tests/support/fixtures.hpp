#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "botsift/log_record.hpp"
#include "botsift/time.hpp"

namespace botsift::testing {

/// Daily distinct-IP counts plotted for the eleven observation days.
inline constexpr std::array<std::uint64_t, 11> kDailyTotal = {1564, 1862, 2313, 2632, 2628, 2726,
                                                             2260, 2413, 1271, 2017, 1118};
inline constexpr std::array<std::uint64_t, 11> kDailyFavicon = {240, 245, 311, 356, 376, 327,
                                                               362, 285, 217, 287, 220};
inline constexpr std::array<std::uint64_t, 11> kDailyPost = {277, 234, 421, 355, 513, 322,
                                                            377, 344, 146, 255, 182};

/// Anonymized records whose ledger reproduces the three series, starting
/// at `first_day`. Favicon requests carry the day in parameter "v".
std::vector<LogRecord> fig2_records(Day first_day);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

/// Hex form of a 32-byte key, as the CLI takes it.
std::string key_hex(const std::array<std::uint8_t, 32>& key);

/// Source-tree directories, fixed at configure time.
std::filesystem::path fixtures_dir();
std::filesystem::path golden_dir();

/// Every dotted-quad and colon-hex address literal in `text`.
std::vector<std::string> address_literals(const std::string& text);

}  // namespace botsift::testing
