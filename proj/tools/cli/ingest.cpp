#include <map>
#include <variant>

#include <nlohmann/json.hpp>

#include "botsift/error.hpp"
#include "botsift/io.hpp"
#include "botsift/log_ingest.hpp"
#include "botsift/refdata.hpp"
#include "commands.hpp"

namespace botsift::cli {

namespace {

constexpr std::size_t kChunkLines = 1 << 16;
constexpr std::size_t kMaxErrorSamples = 10;

struct InputSpec {
  LogFormat format;
  std::string path;
};

InputSpec parse_input_spec(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("--input expects FORMAT:PATH, got '" + text + "'");
  const auto format = parse_log_format(text.substr(0, colon));
  if (!format) throw ConfigError("unknown log format '" + text.substr(0, colon) + "'");
  return {*format, text.substr(colon + 1)};
}

struct ErrorSample {
  std::string input;
  std::uint64_t line = 0;
  ParseError::Kind kind{};
  std::string detail;
};

struct Tally {
  std::uint64_t lines = 0;
  std::uint64_t records = 0;
  std::map<std::string, std::uint64_t> errors_by_kind;
  std::vector<ErrorSample> samples;
};

struct Slot {
  std::optional<LogRecord> record;
  std::optional<ParseError> error;
  bool known_bot = false;
};

}  // namespace

void add_ingest(CLI::App& app, IngestOptions& opts) {
  app.add_option("--input", opts.inputs,
                 "FORMAT:PATH (repeatable); formats: caddy-json, apache-combined, nginx-combined, haproxy-http")
      ->required();
  app.add_option("--output", opts.output, "normalized CSV to write")->required();
  app.add_option("--key-file", opts.key_file, std::string("anonymization key; otherwise ") + kKeyEnvironment);
  app.add_option("--threads", opts.threads)->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--haproxy-ua-slot", opts.haproxy_ua_slot, "captured request header slot holding User-Agent")
      ->capture_default_str();
  app.add_option("--haproxy-referer-slot", opts.haproxy_referer_slot, "slot holding Referer (-1: none)")
      ->capture_default_str();
  app.add_option("--haproxy-utc-offset", opts.haproxy_utc_offset, "offset of HAProxy's local accept dates")
      ->capture_default_str();
  app.add_option("--known-bot-ips", opts.known_bot_ips, "CIDR list checked against raw client addresses")
      ;
  app.add_option("--ip-verdicts", opts.ip_verdicts, "key,is_bot CSV keyed by anonymized IP");
  app.add_option("--summary", opts.summary, "JSON summary of line counts and parse errors");
}

int run_ingest(const IngestOptions& opts, std::ostream& out, std::ostream& err) {
  std::vector<InputSpec> inputs;
  for (const auto& text : opts.inputs) inputs.push_back(parse_input_spec(text));

  HaproxyCaptureLayout haproxy;
  haproxy.user_agent_slot = opts.haproxy_ua_slot;
  if (opts.haproxy_referer_slot >= 0) haproxy.referer_slot = static_cast<std::size_t>(opts.haproxy_referer_slot);
  const auto offset = parse_utc_offset(opts.haproxy_utc_offset);
  if (!offset) throw ConfigError("--haproxy-utc-offset must look like +0200");
  haproxy.utc_offset = *offset;

  if (!opts.ip_verdicts.empty() && opts.known_bot_ips.empty()) {
    throw ConfigError("--ip-verdicts needs --known-bot-ips");
  }
  KnownBotIPs known;
  if (!opts.known_bot_ips.empty()) {
    auto in = open_input(opts.known_bot_ips);
    known = load_known_bot_ips(*in);
  }

  const CryptoPan pan(load_key(opts.key_file));
  const unsigned threads = std::max(1U, opts.threads);
  std::vector<MemoizingAnonymizer> anonymizers(threads, MemoizingAnonymizer(pan));

  auto sink = open_output(opts.output);
  NormalizedWriter writer(*sink);

  Tally tally;
  std::map<std::string, bool> ip_verdicts;

  for (const auto& input : inputs) {
    const LineParser parser(input.format, haproxy);
    auto source = open_input(input.path);

    std::vector<std::string> texts;
    std::vector<std::uint64_t> numbers;
    std::vector<Slot> slots;

    auto flush = [&] {
      slots.assign(texts.size(), Slot{});
      parallel_slices(texts.size(), threads, [&](std::size_t begin, std::size_t end, std::size_t worker) {
        for (std::size_t i = begin; i < end; ++i) {
          ParseResult result = parser.parse({input.format, numbers[i], texts[i]});
          if (auto* e = std::get_if<ParseError>(&result)) {
            slots[i].error = std::move(*e);
            continue;
          }
          auto& record = std::get<LogRecord>(result);
          if (!known.empty()) slots[i].known_bot = is_known_bot_ip(record, known);
          slots[i].record = anonymize_record(std::move(record), anonymizers[worker]);
        }
      });
      for (auto& slot : slots) {
        if (slot.record) {
          writer.write(*slot.record);
          ++tally.records;
          if (!known.empty()) {
            bool& flag = ip_verdicts[slot.record->client_ip.to_string()];
            flag = flag || slot.known_bot;
          }
        } else {
          ++tally.errors_by_kind[std::string(to_string(slot.error->kind))];
          if (tally.samples.size() < kMaxErrorSamples) {
            tally.samples.push_back({input.path, slot.error->line_number, slot.error->kind, slot.error->detail});
          }
        }
      }
      texts.clear();
      numbers.clear();
    };

    for_each_line(*source, [&](std::uint64_t line_number, std::string_view text) {
      ++tally.lines;
      texts.emplace_back(text);
      numbers.push_back(line_number);
      if (texts.size() == kChunkLines) flush();
    });
    flush();
  }
  close_output(*sink, opts.output);

  if (!opts.ip_verdicts.empty()) {
    auto verdict_out = open_output(opts.ip_verdicts);
    *verdict_out << "key,is_bot\n";
    for (const auto& [ip, bot] : ip_verdicts) *verdict_out << ip << ',' << (bot ? "true" : "false") << '\n';
    close_output(*verdict_out, opts.ip_verdicts);
  }

  std::uint64_t error_total = 0;
  for (const auto& [kind, n] : tally.errors_by_kind) error_total += n;

  if (!opts.summary.empty()) {
    nlohmann::ordered_json summary;
    summary["lines"] = tally.lines;
    summary["records"] = tally.records;
    summary["errors"] = error_total;
    summary["errors_by_kind"] = nlohmann::ordered_json::object();
    for (const auto& [kind, n] : tally.errors_by_kind) summary["errors_by_kind"][kind] = n;
    summary["error_samples"] = nlohmann::ordered_json::array();
    for (const auto& s : tally.samples) {
      summary["error_samples"].push_back(
          {{"input", s.input}, {"line", s.line}, {"kind", to_string(s.kind)}, {"detail", s.detail}});
    }
    auto summary_out = open_output(opts.summary);
    *summary_out << summary.dump(2) << '\n';
    close_output(*summary_out, opts.summary);
  }

  out << "lines " << tally.lines << ", records " << tally.records << ", errors " << error_total << '\n';
  for (const auto& [kind, n] : tally.errors_by_kind) out << "  " << kind << ' ' << n << '\n';
  for (const auto& s : tally.samples) {
    err << s.input << ':' << s.line << ": " << to_string(s.kind) << ": " << s.detail << '\n';
  }
  return kOk;
}

}  // namespace botsift::cli
