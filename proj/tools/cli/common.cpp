#include "common.hpp"

#include <cstdlib>
#include <iomanip>

#include "botsift/error.hpp"
#include "botsift/io.hpp"
#include "botsift/log_ingest.hpp"
#include "botsift/refdata.hpp"

namespace botsift::cli {

void add_detection_options(CLI::App& app, DetectionOptions& opts) {
  app.add_option("--mode", opts.mode, "strict (base cascade) or full (adds the UA-reduction rule)")
      ->check(CLI::IsMember({"strict", "full"}))
      ->capture_default_str();
  app.add_option("--reference-date", opts.reference_date,
                 "YYYY-MM-DD; defaults to the last day present in the input");
  app.add_option("--deprecation-window", opts.deprecation_window_days, "days")->capture_default_str();
  app.add_option("--os-support-window", opts.os_support_window_days, "days")->capture_default_str();
  app.add_option("--bot-list", opts.bot_list, "replace the bundled bot-name list");
  app.add_option("--bot-list-format", opts.bot_list_format)
      ->check(CLI::IsMember({"robots-json", "plain-names"}))
      ->capture_default_str();
  app.add_option("--release-db", opts.release_db, "replace the bundled release-date table")
      ;
  app.add_option("--bot-pattern", opts.bot_patterns, "bot regex (repeatable); replaces the default pattern");
}

namespace {

BotListFormat bot_list_format(const std::string& name) {
  return name == "plain-names" ? BotListFormat::plain_names : BotListFormat::robots_json;
}

}  // namespace

DetectionConfig build_detection_config(const DetectionOptions& opts, std::optional<Day> data_last_day,
                                       std::ostream& log) {
  const auto mode = parse_detection_mode(opts.mode);
  if (!mode) throw ConfigError("unknown detection mode '" + opts.mode + "'");

  Day reference;
  if (!opts.reference_date.empty()) {
    const auto parsed = parse_date(opts.reference_date);
    if (!parsed) throw ConfigError("reference date must be YYYY-MM-DD");
    reference = *parsed;
  } else if (data_last_day) {
    reference = *data_last_day;
    log << "reference date " << format_date(reference) << " (last day in the input)\n";
  } else {
    throw ConfigError("no reference date given and the input has no records");
  }

  DetectionConfig config = DetectionConfig::defaults(reference, *mode);
  config.deprecation_window = std::chrono::days(opts.deprecation_window_days);
  config.os_support_window = std::chrono::days(opts.os_support_window_days);
  if (!opts.bot_list.empty()) {
    auto in = open_input(opts.bot_list);
    config.bot_list = load_bot_list(*in, bot_list_format(opts.bot_list_format));
  }
  if (!opts.release_db.empty()) {
    auto in = open_input(opts.release_db);
    config.release_db = load_release_db(*in);
  }
  if (!opts.bot_patterns.empty()) config.regex_set = BotRegexSet(opts.bot_patterns);
  config.validate();
  return config;
}

void add_favicon_options(CLI::App& app, FaviconOptions& opts) {
  app.add_option("--favicon-path", opts.favicon_path, "path prefix of the favicon")->capture_default_str();
  app.add_option("--rotation-param", opts.rotation_parameter,
                 "query parameter carrying the daily rotation date");
  app.add_option("--marker-path", opts.marker_path, "path prefix of the authenticated marker endpoint");
  app.add_option("--marker-method", opts.marker_method)->capture_default_str();
  app.add_option("--marker-status", opts.marker_statuses, "success status (repeatable)")->capture_default_str();
}

FaviconConfig build_favicon_config(const FaviconOptions& opts) {
  FaviconConfig config;
  if (opts.favicon_path.empty()) throw ConfigError("favicon path must not be empty");
  config.favicon.path_prefix = opts.favicon_path;
  if (!opts.rotation_parameter.empty()) config.favicon.rotation_parameter = opts.rotation_parameter;
  if (!opts.marker_path.empty()) {
    MarkerEndpoint marker;
    marker.path_prefix = opts.marker_path;
    marker.method = opts.marker_method;
    marker.success_statuses = std::set<int>(opts.marker_statuses.begin(), opts.marker_statuses.end());
    if (marker.success_statuses.empty()) throw ConfigError("marker endpoint needs at least one success status");
    config.marker = std::move(marker);
  }
  return config;
}

AnonKey load_key(const std::string& key_file) {
  if (!key_file.empty()) return AnonKey::from_file(key_file);
  const char* hex = std::getenv(kKeyEnvironment);
  if (hex == nullptr || *hex == '\0') {
    throw ConfigError(std::string("no anonymization key: pass --key-file or set ") + kKeyEnvironment);
  }
  return AnonKey::from_hex(hex);
}

std::unique_ptr<std::ofstream> open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory for " + path.string());
  auto out = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
  if (!*out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void close_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to " + path.string() + " failed");
  out.close();
}

std::optional<Day> last_day_in(const std::filesystem::path& normalized_csv) {
  auto in = open_input(normalized_csv);
  NormalizedReader reader(*in);
  std::optional<Instant> last;
  while (auto record = reader.next()) {
    if (!last || record->timestamp > *last) last = record->timestamp;
  }
  if (!last) return std::nullopt;
  return utc_day(*last);
}

std::vector<Verdict> classify_all(const UaCounts& counts, const DetectionConfig& config, unsigned threads) {
  std::vector<const std::string*> keys;
  keys.reserve(counts.size());
  for (const auto& [ua, n] : counts) keys.push_back(&ua);
  std::vector<Verdict> verdicts(keys.size());
  parallel_slices(keys.size(), threads, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) verdicts[i] = classify(*keys[i], config);
  });
  return verdicts;
}

void print_reason_summary(std::span<const Verdict> verdicts, const UaCounts& counts, std::ostream& out) {
  auto requests_of = [&](const Verdict& v) -> std::uint64_t {
    const auto it = counts.find(v.ua);
    return it == counts.end() ? 0 : it->second;
  };
  std::uint64_t total_requests = 0;
  for (const auto& [ua, n] : counts) total_requests += n;

  out << "reason                  unique_uas    requests\n";
  auto line = [&](std::string_view name, std::uint64_t uas, std::uint64_t requests) {
    std::string label(name);
    label.resize(std::max<std::size_t>(label.size(), 22), ' ');
    out << label << ' ' << std::setw(11) << uas << ' ' << std::setw(11) << requests << '\n';
  };
  for (Reason r : kAllReasons) {
    std::uint64_t uas = 0;
    std::uint64_t requests = 0;
    for (const auto& v : verdicts) {
      if (!v.reasons.contains(r)) continue;
      ++uas;
      requests += requests_of(v);
    }
    line(to_string(r), uas, requests);
  }
  std::uint64_t bot_uas = 0;
  std::uint64_t bot_requests = 0;
  for (const auto& v : verdicts) {
    if (!v.is_bot) continue;
    ++bot_uas;
    bot_requests += requests_of(v);
  }
  line("any", bot_uas, bot_requests);
  line("total", verdicts.size(), total_requests);
}

}  // namespace botsift::cli
