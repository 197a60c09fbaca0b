#include <iomanip>
#include <sstream>
#include <map>

#include "botsift/csv.hpp"
#include "botsift/error.hpp"
#include "botsift/io.hpp"
#include "botsift/log_ingest.hpp"
#include "commands.hpp"

namespace botsift::cli {

namespace {

class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {}

  template <typename Fn>
  void write(const std::string& name, Fn&& fill) {
    const auto path = dir_ / name;
    auto sink = open_output(path);
    fill(*sink);
    close_output(*sink, path);
    written_.push_back(name);
  }

  const std::vector<std::string>& written() const noexcept { return written_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> written_;
};

void write_table1_csv(std::span<const TopUaRow> rows, std::ostream& out) {
  out << "rank,browser,os,user_agent,requests,percent\n";
  std::size_t rank = 0;
  for (const auto& row : rows) {
    const std::string rank_cell = row.is_other ? "" : std::to_string(++rank);
    csv::write_row(out, {rank_cell, row.browser, row.os, row.user_agent, std::to_string(row.requests),
                         format_percent(row.percent, 2)});
  }
}

void write_table1_text(std::span<const TopUaRow> rows, std::ostream& out) {
  std::size_t browser_w = 7;
  std::size_t os_w = 2;
  for (const auto& row : rows) {
    browser_w = std::max(browser_w, row.browser.size());
    os_w = std::max(os_w, row.os.size());
  }
  out << std::left << std::setw(static_cast<int>(browser_w)) << "Browser" << "  "
      << std::setw(static_cast<int>(os_w)) << "OS" << "  " << std::right << std::setw(10) << "Requests"
      << std::setw(8) << "%" << "  User agent\n";
  for (const auto& row : rows) {
    out << std::left << std::setw(static_cast<int>(browser_w)) << row.browser << "  "
        << std::setw(static_cast<int>(os_w)) << row.os << "  " << std::right << std::setw(10) << row.requests
        << std::setw(8) << format_percent(row.percent, 2) << "  " << (row.is_other ? "---" : row.user_agent)
        << '\n';
  }
}

void write_histogram_csv(const UaCounts& counts, HistogramFamily family, std::ostream& out) {
  std::map<int, std::pair<std::uint64_t, std::uint64_t>> merged;
  for (const auto& [version, n] : version_histogram(counts, family, Weighting::unique_uas)) {
    merged[version].first = n;
  }
  for (const auto& [version, n] : version_histogram(counts, family, Weighting::requests)) {
    merged[version].second = n;
  }
  out << "version,unique_uas,requests\n";
  for (const auto& [version, pair] : merged) out << version << ',' << pair.first << ',' << pair.second << '\n';
}

void write_set_sizes(const OverlapTable& unweighted, const OverlapTable& weighted, std::ostream& out) {
  out << "source,unique_uas,requests\n";
  for (std::size_t i = 0; i < unweighted.sources.size(); ++i) {
    csv::write_row(out, {unweighted.sources[i], std::to_string(unweighted.set_sizes[i]),
                         std::to_string(weighted.set_sizes[i])});
  }
}

std::string fixed(double value) {
  std::ostringstream s;
  s << std::setprecision(6) << std::fixed << value;
  return s.str();
}

}  // namespace

void add_report(CLI::App& app, ReportOptions& opts) {
  app.add_option("--input", opts.input, "normalized CSV")->required();
  app.add_option("--output-dir", opts.output_dir)->required();
  app.add_option("--labels", opts.labels, "labelled CSV; adds confusion.csv and table2.txt")
      ;
  app.add_option("--policy", opts.policies, "combination policy for the labelled evaluation (repeatable)")
      ->check(CLI::IsMember({"ua-only", "ua-or-no-favicon", "ua-unless-favicon"}));
  app.add_option("--top", opts.top, "rows in the top user-agent table")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--threads", opts.threads)->check(CLI::PositiveNumber)->capture_default_str();
  add_detection_options(app, opts.detection);
  add_favicon_options(app, opts.favicon);
}

int run_report(const ReportOptions& opts, std::ostream& out, std::ostream& err) {
  const FaviconConfig favicon_config = build_favicon_config(opts.favicon);
  FaviconLedger ledger(favicon_config);
  UaCounts counts;
  std::optional<Instant> last;
  {
    auto in = open_input(opts.input);
    NormalizedReader reader(*in);
    while (auto record = reader.next()) {
      if (!last || record->timestamp > *last) last = record->timestamp;
      ledger.ingest(*record);
      auto it = counts.find(record->user_agent);
      if (it == counts.end()) it = counts.emplace(std::move(record->user_agent), 0).first;
      ++it->second;
    }
  }
  if (counts.empty()) throw DegenerateInput("the input holds no records");
  const auto config = build_detection_config(opts.detection, utc_day(*last), err);
  const std::vector<Verdict> verdicts = classify_all(counts, config, std::max(1U, opts.threads));

  OutputDir dir(opts.output_dir);
  const auto top = top_user_agents(counts, opts.top);
  dir.write("table1.csv", [&](std::ostream& s) { write_table1_csv(top, s); });
  dir.write("table1.txt", [&](std::ostream& s) { write_table1_text(top, s); });
  dir.write("verdicts.csv", [&](std::ostream& s) { write_verdicts(verdicts, s); });
  dir.write("fig2_daily.csv", [&](std::ostream& s) { write_daily_series_csv(ledger, s); });

  if (favicon_config.marker) {
    std::vector<double> favicon;
    std::vector<double> marker;
    for (const auto& [day, n] : daily_series(ledger, SeriesSelector::favicon_ips)) {
      favicon.push_back(static_cast<double>(n));
    }
    for (const auto& [day, n] : daily_series(ledger, SeriesSelector::marker_post_ips)) {
      marker.push_back(static_cast<double>(n));
    }
    try {
      const StatResult stats = compare_series(favicon, marker);
      dir.write("fig2_stats.csv", [&](std::ostream& s) {
        s << "t,df,t_p_value,cohens_d,pearson_r,pearson_p_value\n"
          << fixed(stats.t_test.t) << ',' << stats.t_test.degrees_of_freedom << ','
          << fixed(stats.t_test.p_value) << ',' << fixed(stats.t_test.cohens_d) << ','
          << fixed(stats.pearson.r) << ',' << fixed(stats.pearson.p_value) << '\n';
      });
    } catch (const DegenerateInput& e) {
      err << "fig2 statistics skipped: " << e.what() << '\n';
    }
  }

  dir.write("fig3_android.csv", [&](std::ostream& s) { write_histogram_csv(counts, HistogramFamily::android, s); });
  dir.write("fig4_chrome.csv",
            [&](std::ostream& s) { write_histogram_csv(counts, HistogramFamily::chrome_merged, s); });
  dir.write("fig4_firefox.csv", [&](std::ostream& s) { write_histogram_csv(counts, HistogramFamily::firefox, s); });

  const auto sources = reason_sources(verdicts);
  const OverlapTable unweighted = reason_overlap(sources);
  const OverlapTable weighted = reason_overlap(sources, &counts);
  dir.write("upset_unweighted.csv", [&](std::ostream& s) { write_overlap_csv(unweighted, s); });
  dir.write("upset_weighted.csv", [&](std::ostream& s) { write_overlap_csv(weighted, s); });
  dir.write("upset_set_sizes.csv", [&](std::ostream& s) { write_set_sizes(unweighted, weighted, s); });

  if (!opts.labels.empty()) {
    auto in = open_input(opts.labels);
    const auto labelled = read_labelled(*in);
    std::unordered_map<std::string, Verdict> by_ua;
    for (const auto& v : verdicts) by_ua.emplace(v.ua, v);
    // Labelled UAs outside the analysed input still need a verdict.
    for (const auto& req : labelled) {
      if (!by_ua.contains(req.record.user_agent)) {
        by_ua.emplace(req.record.user_agent, classify(req.record.user_agent, config));
      }
    }
    const auto policies = opts.policies.empty() ? std::vector<std::string>{"ua-only"} : opts.policies;
    const auto rows = evaluate_policies(labelled, by_ua, favicon_config, policies);
    dir.write("confusion.csv", [&](std::ostream& s) { write_confusion_csv(rows, s); });
    dir.write("table2.txt", [&](std::ostream& s) { write_confusion_table(rows, s); });
  }

  print_reason_summary(verdicts, counts, out);
  for (const auto& name : dir.written()) out << "wrote " << name << '\n';
  return kOk;
}

}  // namespace botsift::cli
