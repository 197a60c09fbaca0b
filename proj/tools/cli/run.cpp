#include <algorithm>

#include "botsift/error.hpp"
#include "cli.hpp"
#include "commands.hpp"

namespace botsift::cli {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"botsift: bot detection for web server access logs"};
  app.name(args.empty() ? "botsift" : args.front());
  app.require_subcommand(1);

  IngestOptions ingest;
  ClassifyOptions classify;
  FaviconCommandOptions favicon;
  EvaluateOptions evaluate;
  ReportOptions report;
  auto* ingest_cmd = app.add_subcommand("ingest", "parse access logs into anonymized normalized CSV");
  auto* classify_cmd = app.add_subcommand("classify", "flag user agents");
  auto* favicon_cmd = app.add_subcommand("favicon", "build the per-day favicon ledger");
  auto* evaluate_cmd = app.add_subcommand("evaluate", "confusion matrices against labelled traffic");
  auto* report_cmd = app.add_subcommand("report", "tables and figure data for a normalized log");
  add_ingest(*ingest_cmd, ingest);
  add_classify(*classify_cmd, classify);
  add_favicon(*favicon_cmd, favicon);
  add_evaluate(*evaluate_cmd, evaluate);
  add_report(*report_cmd, report);

  try {
    std::vector<std::string> reversed(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(reversed.begin(), reversed.end());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*ingest_cmd) return run_ingest(ingest, out, err);
    if (*classify_cmd) return run_classify(classify, out, err);
    if (*favicon_cmd) return run_favicon(favicon, out, err);
    if (*evaluate_cmd) return run_evaluate(evaluate, out, err);
    if (*report_cmd) return run_report(report, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const MissingVerdict& e) {
    err << "error: " << e.what() << '\n';
    const std::size_t shown = std::min<std::size_t>(e.keys().size(), 10);
    for (std::size_t i = 0; i < shown; ++i) err << "  missing: " << e.keys()[i] << '\n';
    return kDataIntegrity;
  } catch (const FormatError& e) {
    err << "error: " << e.what();
    if (e.entry_index()) err << " (entry " << *e.entry_index() << ')';
    err << '\n';
    return kDataIntegrity;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << " (family " << e.family() << ")\n";
    return kDataIntegrity;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDataIntegrity;
  }
  return kUsage;
}

}  // namespace botsift::cli
