#include "botsift/error.hpp"
#include "botsift/io.hpp"
#include "botsift/log_ingest.hpp"
#include "commands.hpp"

namespace botsift::cli {

void add_classify(CLI::App& app, ClassifyOptions& opts) {
  app.add_option("--input", opts.input, "normalized CSV")->required();
  app.add_option("--output", opts.output, "verdict CSV to write")->required();
  app.add_option("--threads", opts.threads)->check(CLI::PositiveNumber)->capture_default_str();
  add_detection_options(app, opts.detection);
}

int run_classify(const ClassifyOptions& opts, std::ostream& out, std::ostream& err) {
  UaCounts counts;
  std::optional<Instant> last;
  {
    auto in = open_input(opts.input);
    NormalizedReader reader(*in);
    while (auto record = reader.next()) {
      if (!last || record->timestamp > *last) last = record->timestamp;
      auto it = counts.find(record->user_agent);
      if (it == counts.end()) it = counts.emplace(std::move(record->user_agent), 0).first;
      ++it->second;
    }
  }
  const std::optional<Day> last_day = last ? std::optional<Day>(utc_day(*last)) : std::nullopt;
  const DetectionConfig config = build_detection_config(opts.detection, last_day, err);

  const std::vector<Verdict> verdicts = classify_all(counts, config, std::max(1U, opts.threads));
  auto sink = open_output(opts.output);
  write_verdicts(verdicts, *sink);
  close_output(*sink, opts.output);

  print_reason_summary(verdicts, counts, out);
  return kOk;
}

}  // namespace botsift::cli
