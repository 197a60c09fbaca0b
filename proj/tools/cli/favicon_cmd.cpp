#include "botsift/io.hpp"
#include "botsift/log_ingest.hpp"
#include "commands.hpp"

namespace botsift::cli {

void add_favicon(CLI::App& app, FaviconCommandOptions& opts) {
  app.add_option("--input", opts.input, "normalized CSV")->required();
  app.add_option("--ledger", opts.ledger, "per (day, IP) ledger CSV to write");
  app.add_option("--series", opts.series, "daily distinct-IP series CSV to write");
  add_favicon_options(app, opts.favicon);
}

int run_favicon(const FaviconCommandOptions& opts, std::ostream& out, std::ostream&) {
  FaviconLedger ledger(build_favicon_config(opts.favicon));
  {
    auto in = open_input(opts.input);
    NormalizedReader reader(*in);
    while (auto record = reader.next()) ledger.ingest(*record);
  }
  if (!opts.ledger.empty()) {
    auto sink = open_output(opts.ledger);
    write_ledger_csv(ledger, *sink);
    close_output(*sink, opts.ledger);
  }
  if (!opts.series.empty()) {
    auto sink = open_output(opts.series);
    write_daily_series_csv(ledger, *sink);
    close_output(*sink, opts.series);
  }

  std::uint64_t favicon = 0;
  std::uint64_t marker = 0;
  for (const auto& [key, entry] : ledger.entries()) {
    favicon += entry.favicon_seen ? 1 : 0;
    marker += entry.post_to_marker ? 1 : 0;
  }
  out << "ip-days " << ledger.entries().size() << ", with favicon " << favicon << ", with marker "
      << marker << ", stale favicon requests " << ledger.stale_favicon_requests() << '\n';
  return kOk;
}

}  // namespace botsift::cli
