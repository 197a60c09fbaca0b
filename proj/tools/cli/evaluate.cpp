#include <iomanip>
#include <sstream>

#include "botsift/csv.hpp"
#include "botsift/error.hpp"
#include "botsift/io.hpp"
#include "botsift/refdata.hpp"
#include "commands.hpp"

namespace botsift::cli {

namespace {

std::pair<std::string, std::string> split_named(const std::string& text, std::string_view flag) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
    throw ConfigError(std::string(flag) + " expects NAME=PATH, got '" + text + "'");
  }
  return {text.substr(0, eq), text.substr(eq + 1)};
}

std::string percent_cell(std::optional<double> p) { return p ? format_percent(*p) : std::string(); }

std::vector<LabelledRequest> load_labels(const std::string& path) {
  auto in = open_input(path);
  return read_labelled(*in);
}

}  // namespace

std::vector<MethodResult> evaluate_policies(std::span<const LabelledRequest> labelled,
                                            const std::unordered_map<std::string, Verdict>& verdicts,
                                            const FaviconConfig& favicon, const std::vector<std::string>& policies) {
  std::optional<FaviconLedger> ledger;
  std::vector<MethodResult> rows;
  for (const auto& name : policies) {
    const auto policy = parse_combination_policy(name);
    if (!policy) throw ConfigError("unknown combination policy '" + name + "'");
    if (*policy != CombinationPolicy::ua_only && !ledger) {
      ledger.emplace(favicon);
      for (const auto& req : labelled) ledger->ingest(req.record);
    }
    rows.push_back({"botsift/" + name, confusion(verdicts, labelled, ledger ? &*ledger : nullptr, *policy)});
  }
  return rows;
}

void write_confusion_csv(std::span<const MethodResult> rows, std::ostream& out) {
  out << "method,tp,fn,fp,tn,tp_pct,fn_pct,fp_pct,tn_pct\n";
  for (const auto& row : rows) {
    const auto& m = row.matrix;
    csv::write_row(out, {row.method, std::to_string(m.tp), std::to_string(m.fn), std::to_string(m.fp),
                         std::to_string(m.tn), percent_cell(m.tp_percent()), percent_cell(m.fn_percent()),
                         percent_cell(m.fp_percent()), percent_cell(m.tn_percent())});
  }
}

void write_confusion_table(std::span<const MethodResult> rows, std::ostream& out) {
  std::size_t width = 6;
  for (const auto& row : rows) width = std::max(width, row.method.size());
  auto cell = [](std::optional<double> p) {
    const std::string text = p ? format_percent(*p) + "%" : "n/a";
    std::ostringstream s;
    s << std::setw(8) << text;
    return s.str();
  };
  out << std::left << std::setw(static_cast<int>(width)) << "method" << std::right << "        TP        FN"
      << "        FP        TN\n";
  for (const auto& row : rows) {
    const auto& m = row.matrix;
    out << std::left << std::setw(static_cast<int>(width)) << row.method << std::right << "  "
        << cell(m.tp_percent()) << "  " << cell(m.fn_percent()) << "  " << cell(m.fp_percent()) << "  "
        << cell(m.tn_percent()) << '\n';
  }
}

void add_evaluate(CLI::App& app, EvaluateOptions& opts) {
  app.add_option("--labels", opts.labels, "labelled CSV (normalized columns plus truth,source)")
      ->required()
      ;
  app.add_option("--verdicts", opts.verdicts, "verdict CSV; otherwise the labelled UAs are classified here")
      ;
  app.add_option("--policy", opts.policies, "ua-only, ua-or-no-favicon, ua-unless-favicon (repeatable)")
      ->check(CLI::IsMember({"ua-only", "ua-or-no-favicon", "ua-unless-favicon"}));
  app.add_option("--external-ua", opts.external_ua, "NAME=PATH of UA-keyed verdicts (repeatable)");
  app.add_option("--external-ip", opts.external_ip, "NAME=PATH of verdicts keyed by anonymized IP (repeatable)");
  app.add_option("--bot-names-list", opts.bot_names_lists,
                 "NAME=PATH of a bot-name list; a UA matching any name is a bot (repeatable)");
  app.add_option("--output-dir", opts.output_dir, "where confusion.csv and table2.txt go");
  add_detection_options(app, opts.detection);
  add_favicon_options(app, opts.favicon);
}

int run_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err) {
  const std::vector<LabelledRequest> labelled = load_labels(opts.labels);

  std::unordered_map<std::string, Verdict> verdicts;
  if (!opts.verdicts.empty()) {
    auto in = open_input(opts.verdicts);
    for (auto& v : read_verdicts(*in)) {
      std::string key = v.ua;
      verdicts.emplace(std::move(key), std::move(v));
    }
  } else {
    UaCounts counts;
    std::optional<Instant> last;
    for (const auto& req : labelled) {
      ++counts[req.record.user_agent];
      if (!last || req.record.timestamp > *last) last = req.record.timestamp;
    }
    const auto config =
        build_detection_config(opts.detection, last ? std::optional<Day>(utc_day(*last)) : std::nullopt, err);
    for (auto& v : classify_all(counts, config, 1)) {
      std::string key = v.ua;
      verdicts.emplace(std::move(key), std::move(v));
    }
  }

  const std::vector<std::string> policies = opts.policies.empty() ? std::vector<std::string>{"ua-only"}
                                                                   : opts.policies;
  std::vector<MethodResult> rows =
      evaluate_policies(labelled, verdicts, build_favicon_config(opts.favicon), policies);

  for (const auto& spec : opts.external_ua) {
    const auto [name, path] = split_named(spec, "--external-ua");
    auto in = open_input(path);
    rows.push_back({name, confusion(ExternalVerdicts{VerdictKey::user_agent, import_external_verdicts(*in)},
                                    labelled)});
  }
  for (const auto& spec : opts.external_ip) {
    const auto [name, path] = split_named(spec, "--external-ip");
    auto in = open_input(path);
    rows.push_back({name, confusion(ExternalVerdicts{VerdictKey::ip, import_external_verdicts(*in)}, labelled)});
  }
  for (const auto& spec : opts.bot_names_lists) {
    const auto [name, path] = split_named(spec, "--bot-names-list");
    auto in = open_input(path);
    const bool json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
    const BotList list = load_bot_list(*in, json ? BotListFormat::robots_json : BotListFormat::plain_names);
    rows.push_back({name, confusion(
                              labelled,
                              [&](const LabelledRequest& req) -> std::optional<bool> {
                                return list.match(req.record.user_agent) != nullptr;
                              },
                              [](const LabelledRequest& req) { return req.record.user_agent; })});
  }

  if (!opts.output_dir.empty()) {
    const std::filesystem::path dir(opts.output_dir);
    auto csv_out = open_output(dir / "confusion.csv");
    write_confusion_csv(rows, *csv_out);
    close_output(*csv_out, dir / "confusion.csv");
    auto text_out = open_output(dir / "table2.txt");
    write_confusion_table(rows, *text_out);
    close_output(*text_out, dir / "table2.txt");
  }
  write_confusion_table(rows, out);
  return kOk;
}

}  // namespace botsift::cli
