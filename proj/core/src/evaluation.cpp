#include "botsift/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "botsift/csv.hpp"
#include "botsift/error.hpp"
#include "botsift/log_ingest.hpp"
#include "botsift/ua_model.hpp"

namespace botsift {

// ------------------------------------------------------------ confusion

std::string_view to_string(Truth t) noexcept { return t == Truth::bot ? "bot" : "human"; }

std::optional<Truth> parse_truth(std::string_view text) noexcept {
  if (text == "bot") return Truth::bot;
  if (text == "human") return Truth::human;
  return std::nullopt;
}

void write_labelled(std::span<const LabelledRequest> requests, std::ostream& out) {
  out << kLabelledHeader << '\n';
  for (const auto& r : requests) {
    write_normalized_fields(out, r.record);
    out << ',' << to_string(r.truth) << ',';
    csv::write_field(out, r.source);
    out << '\n';
  }
}

std::vector<LabelledRequest> read_labelled(std::istream& in) {
  csv::Reader reader(in);
  const auto header = reader.next();
  std::string joined;
  if (header) {
    for (std::size_t i = 0; i < header->size(); ++i) {
      if (i) joined += ',';
      joined += (*header)[i].value;
    }
  }
  if (joined != kLabelledHeader) {
    throw SchemaMismatch("unexpected label header \"" + joined + "\"; expected " + std::string(kLabelledHeader));
  }
  std::vector<LabelledRequest> out;
  while (auto row = reader.next()) {
    const std::size_t index = out.size() + 1;
    if (row->size() != 10) throw FormatError("label row " + std::to_string(index) + ": expected 10 fields", index);
    LabelledRequest req;
    const auto truth = parse_truth((*row)[8].value);
    if (!truth) throw FormatError("label row " + std::to_string(index) + ": truth must be bot or human", index);
    req.truth = *truth;
    req.source = (*row)[9].value;
    req.record = normalized_record_from_fields(std::span<csv::Field>(row->data(), 8), index);
    out.push_back(std::move(req));
  }
  return out;
}

namespace {

std::optional<double> share(std::uint64_t part, std::uint64_t whole) {
  if (whole == 0) return std::nullopt;
  return 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

}  // namespace

std::optional<double> ConfusionMatrix::tp_percent() const { return share(tp, tp + fn); }
std::optional<double> ConfusionMatrix::fn_percent() const { return share(fn, tp + fn); }
std::optional<double> ConfusionMatrix::fp_percent() const { return share(fp, fp + tn); }
std::optional<double> ConfusionMatrix::tn_percent() const { return share(tn, fp + tn); }

std::string_view to_string(CombinationPolicy p) noexcept {
  switch (p) {
    case CombinationPolicy::ua_only: return "ua-only";
    case CombinationPolicy::ua_or_no_favicon: return "ua-or-no-favicon";
    case CombinationPolicy::ua_unless_favicon: return "ua-unless-favicon";
  }
  return "ua-only";
}

std::optional<CombinationPolicy> parse_combination_policy(std::string_view name) noexcept {
  for (auto p : {CombinationPolicy::ua_only, CombinationPolicy::ua_or_no_favicon,
                 CombinationPolicy::ua_unless_favicon}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

ConfusionMatrix confusion(std::span<const LabelledRequest> labelled,
                          const std::function<std::optional<bool>(const LabelledRequest&)>& predict,
                          const std::function<std::string(const LabelledRequest&)>& describe) {
  ConfusionMatrix m;
  std::set<std::string> missing;
  for (const auto& req : labelled) {
    const auto flagged = predict(req);
    if (!flagged) {
      missing.insert(describe(req));
      continue;
    }
    if (req.truth == Truth::bot) {
      ++(*flagged ? m.tp : m.fn);
    } else {
      ++(*flagged ? m.fp : m.tn);
    }
  }
  if (!missing.empty()) throw MissingVerdict(std::vector<std::string>(missing.begin(), missing.end()));
  return m;
}

ConfusionMatrix confusion(const std::unordered_map<std::string, Verdict>& verdicts,
                          std::span<const LabelledRequest> labelled, const FaviconLedger* ledger,
                          CombinationPolicy policy) {
  if (policy != CombinationPolicy::ua_only && ledger == nullptr) {
    throw PreconditionViolation("favicon combination needs a ledger");
  }
  return confusion(
      labelled,
      [&](const LabelledRequest& req) -> std::optional<bool> {
        const auto it = verdicts.find(req.record.user_agent);
        if (it == verdicts.end()) return std::nullopt;
        const bool ua_bot = it->second.is_bot;
        if (policy == CombinationPolicy::ua_only) return ua_bot;
        const bool favicon =
            likely_non_bot(*ledger, req.record.client_ip, utc_day(req.record.timestamp)) ==
            FaviconClass::likely_non_bot;
        if (policy == CombinationPolicy::ua_or_no_favicon) return ua_bot || !favicon;
        return ua_bot && !favicon;
      },
      [](const LabelledRequest& req) { return req.record.user_agent; });
}

ConfusionMatrix confusion(const ExternalVerdicts& external, std::span<const LabelledRequest> labelled) {
  const auto key_of = [&](const LabelledRequest& req) {
    return external.key == VerdictKey::ip ? req.record.client_ip.to_string() : req.record.user_agent;
  };
  return confusion(
      labelled,
      [&](const LabelledRequest& req) -> std::optional<bool> {
        const auto it = external.verdicts.find(key_of(req));
        if (it == external.verdicts.end()) return std::nullopt;
        return it->second;
      },
      key_of);
}

std::unordered_map<std::string, bool> import_external_verdicts(std::istream& source) {
  csv::Reader reader(source);
  const auto header = reader.next();
  if (!header) throw FormatError("verdict file is empty");
  const auto names = csv::names(*header);
  std::optional<std::size_t> key_col;
  std::optional<std::size_t> flag_col;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == "key" || (names[i] == "user_agent" && !key_col)) key_col = i;
    if (names[i] == "is_bot") flag_col = i;
  }
  if (!key_col || !flag_col) throw FormatError("verdict file needs key and is_bot columns");

  std::unordered_map<std::string, bool> out;
  std::size_t index = 0;
  while (auto row = reader.next()) {
    if (row->size() != names.size()) {
      throw FormatError("verdict row " + std::to_string(index) + " has the wrong number of fields", index);
    }
    const std::string& flag = (*row)[*flag_col].value;
    bool value = false;
    if (flag == "true" || flag == "1") {
      value = true;
    } else if (flag != "false" && flag != "0") {
      throw FormatError("verdict row " + std::to_string(index) + ": is_bot must be true/false/1/0", index);
    }
    auto [it, inserted] = out.emplace((*row)[*key_col].value, value);
    if (!inserted && it->second != value) {
      throw FormatError("conflicting verdicts for key '" + it->first + "'", index);
    }
    ++index;
  }
  return out;
}

std::string format_percent(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  // The epsilon keeps values such as 2.25 from rounding down through
  // binary representation error.
  const double rounded = std::floor(value * scale + 0.5 + 1e-9) / scale;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, rounded);
  return buf;
}

// ------------------------------------------------------------- UA tables

UaCounts count_user_agents(std::span<const LogRecord> records) {
  UaCounts counts;
  for (const auto& r : records) {
    auto it = counts.find(r.user_agent);
    if (it == counts.end()) {
      counts.emplace(r.user_agent, 1);
    } else {
      ++it->second;
    }
  }
  return counts;
}

std::vector<TopUaRow> top_user_agents(const UaCounts& counts, std::size_t n) {
  if (n == 0) throw PreconditionViolation("top-N table needs n >= 1");
  std::vector<std::pair<std::string_view, std::uint64_t>> sorted;
  std::uint64_t total = 0;
  for (const auto& [ua, c] : counts) {
    sorted.emplace_back(ua, c);
    total += c;
  }
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<TopUaRow> rows;
  if (total == 0) return rows;
  const auto pct = [&](std::uint64_t c) { return 100.0 * static_cast<double>(c) / static_cast<double>(total); };
  std::uint64_t rest = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i >= n) {
      rest += sorted[i].second;
      continue;
    }
    const ParsedUserAgent parsed = parse_user_agent(sorted[i].first);
    rows.push_back({browser_label(parsed), os_label(parsed), std::string(sorted[i].first), sorted[i].second,
                    pct(sorted[i].second), false});
  }
  if (sorted.size() > n) rows.push_back({"Other", "---", "", rest, pct(rest), true});
  return rows;
}

std::vector<TopUaRow> top_user_agents(std::span<const LogRecord> records, std::size_t n) {
  return top_user_agents(count_user_agents(records), n);
}

namespace {

std::optional<int> histogram_version(const ParsedUserAgent& p, HistogramFamily family) {
  const auto browser_is = [&](std::initializer_list<BrowserFamily> fams) {
    return p.browser_family && std::find(fams.begin(), fams.end(), *p.browser_family) != fams.end();
  };
  switch (family) {
    case HistogramFamily::chrome_merged:
      return browser_is({BrowserFamily::chrome, BrowserFamily::chrome_mobile}) ? p.browser_major : std::nullopt;
    case HistogramFamily::chrome: return browser_is({BrowserFamily::chrome}) ? p.browser_major : std::nullopt;
    case HistogramFamily::chrome_mobile:
      return browser_is({BrowserFamily::chrome_mobile}) ? p.browser_major : std::nullopt;
    case HistogramFamily::firefox: return browser_is({BrowserFamily::firefox}) ? p.browser_major : std::nullopt;
    case HistogramFamily::safari: return browser_is({BrowserFamily::safari}) ? p.browser_major : std::nullopt;
    case HistogramFamily::edge: return browser_is({BrowserFamily::edge}) ? p.browser_major : std::nullopt;
    case HistogramFamily::msie: return browser_is({BrowserFamily::msie}) ? p.browser_major : std::nullopt;
    case HistogramFamily::android: return extract_android_version(p);
    case HistogramFamily::ios:
      if (p.os_family == OsFamily::ios && p.os_version) return leading_integer(*p.os_version);
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

std::vector<std::pair<int, std::uint64_t>> version_histogram(const UaCounts& counts, HistogramFamily family,
                                                             Weighting weighting) {
  std::map<int, std::uint64_t> bins;
  for (const auto& [ua, c] : counts) {
    const auto v = histogram_version(parse_user_agent(ua), family);
    if (!v) continue;
    bins[*v] += weighting == Weighting::requests ? c : 1;
  }
  return {bins.begin(), bins.end()};
}

std::vector<std::pair<int, std::uint64_t>> version_histogram(std::span<const LogRecord> records,
                                                             HistogramFamily family, Weighting weighting) {
  return version_histogram(count_user_agents(records), family, weighting);
}

// -------------------------------------------------------------- overlap

OverlapTable reason_overlap(const std::vector<MembershipSource>& sources, const UaCounts* weights) {
  OverlapTable table;
  std::set<std::string> seen_names;
  for (const auto& [name, members] : sources) {
    if (!seen_names.insert(name).second) throw PreconditionViolation("duplicate overlap source '" + name + "'");
    table.sources.push_back(name);
  }
  const auto weight_of = [&](const std::string& ua) -> std::uint64_t {
    if (weights == nullptr) return 1;
    const auto it = weights->find(ua);
    return it == weights->end() ? 0 : it->second;
  };

  std::set<std::string_view> universe;
  for (const auto& [name, members] : sources) {
    std::uint64_t size = 0;
    for (const auto& ua : members) {
      universe.insert(ua);
      size += weight_of(ua);
    }
    table.set_sizes.push_back(size);
  }

  std::map<std::vector<bool>, std::uint64_t> combos;
  for (std::string_view ua : universe) {
    std::vector<bool> membership;
    membership.reserve(sources.size());
    for (const auto& [name, members] : sources) membership.push_back(members.contains(std::string(ua)));
    combos[membership] += weight_of(std::string(ua));
  }
  for (auto& [membership, count] : combos) table.rows.push_back({membership, count});
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const OverlapRow& a, const OverlapRow& b) { return a.count > b.count; });
  return table;
}

std::vector<MembershipSource> reason_sources(std::span<const Verdict> verdicts) {
  std::vector<MembershipSource> out;
  for (Reason r : kAllReasons) out.emplace_back(std::string(to_string(r)), std::set<std::string>{});
  for (const auto& v : verdicts) {
    for (std::size_t i = 0; i < kAllReasons.size(); ++i) {
      if (v.reasons.contains(kAllReasons[i])) out[i].second.insert(v.ua);
    }
  }
  return out;
}

void write_overlap_csv(const OverlapTable& table, std::ostream& out) {
  for (const auto& name : table.sources) {
    csv::write_field(out, name);
    out << ',';
  }
  out << "count\n";
  for (const auto& row : table.rows) {
    for (bool member : row.membership) out << (member ? '1' : '0') << ',';
    out << row.count << '\n';
  }
}

}  // namespace botsift
