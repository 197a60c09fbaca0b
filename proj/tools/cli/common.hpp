#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "botsift/detection.hpp"
#include "botsift/evaluation.hpp"
#include "botsift/favicon.hpp"
#include "botsift/ip_anon.hpp"
#include "botsift/time.hpp"

namespace botsift::cli {

inline constexpr const char* kKeyEnvironment = "BOTSIFT_ANON_KEY";

struct DetectionOptions {
  std::string mode = "full";
  std::string reference_date;
  int deprecation_window_days = 730;
  int os_support_window_days = 1461;
  std::string bot_list;
  std::string bot_list_format = "robots-json";
  std::string release_db;
  std::vector<std::string> bot_patterns;
};

void add_detection_options(CLI::App& app, DetectionOptions& opts);

/// `data_last_day` is used when no reference date was given; the derivation
/// is reported on `log`.
DetectionConfig build_detection_config(const DetectionOptions& opts, std::optional<Day> data_last_day,
                                       std::ostream& log);

struct FaviconOptions {
  std::string favicon_path = "/favicon.ico";
  std::string rotation_parameter;
  std::string marker_path;
  std::string marker_method = "POST";
  std::vector<int> marker_statuses = {200};
};

void add_favicon_options(CLI::App& app, FaviconOptions& opts);
FaviconConfig build_favicon_config(const FaviconOptions& opts);

/// Key from `key_file` when given, else from the environment.
AnonKey load_key(const std::string& key_file);

/// Creates parent directories. Throws IoError.
std::unique_ptr<std::ofstream> open_output(const std::filesystem::path& path);
/// Flushes and checks the stream. Throws IoError.
void close_output(std::ofstream& out, const std::filesystem::path& path);

/// Splits [0, n) into contiguous slices and runs fn(begin, end, worker) on
/// up to `threads` threads. Results that are written by index are
/// independent of the thread count.
template <typename Fn>
void parallel_slices(std::size_t n, unsigned threads, Fn&& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
  if (workers <= 1) {
    fn(std::size_t{0}, n, std::size_t{0});
    return;
  }
  std::vector<std::jthread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t step = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(n, w * step);
    const std::size_t end = std::min(n, begin + step);
    pool.emplace_back([&, begin, end, w] {
      try {
        fn(begin, end, w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Last UTC day seen in a normalized CSV, scanning it once.
std::optional<Day> last_day_in(const std::filesystem::path& normalized_csv);

/// Classifies every key of `counts`; the result is in key order.
std::vector<Verdict> classify_all(const UaCounts& counts, const DetectionConfig& config, unsigned threads);

/// Unique UAs and requests per reason, then the bot total.
void print_reason_summary(std::span<const Verdict> verdicts, const UaCounts& counts, std::ostream& out);

}  // namespace botsift::cli
