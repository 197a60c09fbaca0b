#include "botsift/refdata.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "botsift/csv.hpp"
#include "botsift/error.hpp"
#include "bundled_data.hpp"

namespace botsift {

namespace {

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

// ---------------------------------------------------------------- bot list

BotList::BotList(std::vector<BotListEntry> entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].match_token.empty()) throw FormatError("empty bot match token", i);
  }
  std::sort(entries.begin(), entries.end(), [](const BotListEntry& a, const BotListEntry& b) {
    const std::string la = to_lower(a.match_token);
    const std::string lb = to_lower(b.match_token);
    return std::tie(la, a.match_token, a.bot_name) < std::tie(lb, b.match_token, b.bot_name);
  });
  for (auto& e : entries) {
    std::string lowered = to_lower(e.match_token);
    if (!lowered_.empty() && lowered_.back() == lowered) continue;
    lowered_.push_back(std::move(lowered));
    entries_.push_back(std::move(e));
  }
}

const BotListEntry* BotList::match(std::string_view ua) const {
  if (entries_.empty() || ua.empty()) return nullptr;
  const std::string hay = to_lower(ua);
  const BotListEntry* best = nullptr;
  std::size_t best_len = 0;
  // entries_ is sorted by lowered token, so the first hit of a given length
  // is already the lexicographically smallest.
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const std::string& token = lowered_[i];
    if (token.size() <= best_len) continue;
    if (hay.find(token) != std::string::npos) {
      best = &entries_[i];
      best_len = token.size();
    }
  }
  return best;
}

namespace {

BotList parse_robots_json(std::string_view text) {
  const auto doc = nlohmann::ordered_json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw FormatError("robots.json is not valid JSON");
  if (!doc.is_object()) throw FormatError("robots.json must be an object of bot names");
  std::vector<BotListEntry> entries;
  std::size_t index = 0;
  for (const auto& [name, meta] : doc.items()) {
    if (trim(name).empty()) throw FormatError("empty bot name in robots.json", index);
    if (!meta.is_object() && !meta.is_null()) {
      throw FormatError("metadata for " + name + " must be an object", index);
    }
    BotListEntry e{std::string(trim(name)), std::string(trim(name)), std::nullopt};
    if (meta.is_object()) {
      if (auto it = meta.find("operator"); it != meta.end() && it->is_string()) {
        e.operator_name = it->get<std::string>();
      }
    }
    entries.push_back(std::move(e));
    ++index;
  }
  return BotList(std::move(entries));
}

BotList parse_plain_names(std::istream& in) {
  std::vector<BotListEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    entries.push_back({std::string(view), std::string(view), std::nullopt});
  }
  return BotList(std::move(entries));
}

}  // namespace

BotList load_bot_list(std::istream& source, BotListFormat format) {
  if (format == BotListFormat::plain_names) return parse_plain_names(source);
  std::ostringstream buffer;
  buffer << source.rdbuf();
  return parse_robots_json(buffer.str());
}

const BotList& bundled_bot_list() {
  static const BotList list = parse_robots_json(detail::bundled_robots_json());
  return list;
}

// --------------------------------------------------------------- bot regex

BotRegexSet::BotRegexSet() : BotRegexSet(std::vector<std::string>{"bot|crawler|spider|crawling"}) {}

BotRegexSet::BotRegexSet(std::vector<std::string> patterns) : patterns_(std::move(patterns)) {
  compiled_.reserve(patterns_.size());
  for (const auto& p : patterns_) {
    try {
      compiled_.emplace_back(p, std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
    } catch (const std::regex_error& e) {
      throw ConfigError("invalid bot pattern '" + p + "': " + e.what());
    }
  }
}

bool BotRegexSet::matches(std::string_view ua) const {
  for (const auto& re : compiled_) {
    if (std::regex_search(ua.begin(), ua.end(), re)) return true;
  }
  return false;
}

// ---------------------------------------------------------- release dates

std::string_view to_string(ReleaseKind k) noexcept {
  switch (k) {
    case ReleaseKind::browser: return "browser";
    case ReleaseKind::os: return "os";
    case ReleaseKind::reduction: return "reduction";
  }
  return "browser";
}

std::optional<std::vector<int>> version_components(std::string_view version) {
  if (version.substr(0, 3) == "NT ") version.remove_prefix(3);
  if (version.empty()) return std::nullopt;
  std::vector<int> out;
  std::size_t i = 0;
  for (;;) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(version.data() + i, version.data() + version.size(), value);
    if (ec != std::errc{} || value < 0) return std::nullopt;
    out.push_back(value);
    i = static_cast<std::size_t>(ptr - version.data());
    if (i == version.size()) return out;
    if (version[i] != '.' && version[i] != '_') return std::nullopt;
    ++i;
  }
}

namespace {

// Missing trailing components count as zero: "10" == "10.0".
int compare_versions(const std::vector<int>& a, const std::vector<int>& b) {
  const std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const int x = i < a.size() ? a[i] : 0;
    const int y = i < b.size() ? b[i] : 0;
    if (x != y) return x < y ? -1 : 1;
  }
  return 0;
}

struct SortKey {
  ReleaseKind kind;
  std::string_view family;
  std::vector<int> version;
};

bool key_less(const SortKey& a, const SortKey& b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  if (a.family != b.family) return a.family < b.family;
  return compare_versions(a.version, b.version) < 0;
}

SortKey key_of(const ReleaseEntry& e) { return {e.kind, e.family, *version_components(e.version)}; }

}  // namespace

ReleaseDatabase::ReleaseDatabase(std::vector<ReleaseEntry> entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].family.empty()) throw FormatError("release row without family", i);
    if (!version_components(entries[i].version)) {
      throw FormatError("unusable version '" + entries[i].version + "' for " + entries[i].family, i);
    }
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const ReleaseEntry& a, const ReleaseEntry& b) { return key_less(key_of(a), key_of(b)); });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    const ReleaseEntry& prev = entries[i - 1];
    const ReleaseEntry& cur = entries[i];
    if (prev.kind != cur.kind || prev.family != cur.family) continue;
    if (compare_versions(*version_components(prev.version), *version_components(cur.version)) == 0) {
      throw FormatError("duplicate release row " + cur.family + " " + cur.version, i);
    }
    if (cur.kind != ReleaseKind::reduction && cur.release_date <= prev.release_date) {
      throw ValidationError(cur.family + " " + cur.version + " is not released after " + prev.version, cur.family);
    }
  }
  entries_ = std::move(entries);
}

const ReleaseEntry* ReleaseDatabase::browser(std::string_view family, int major) const {
  for (const auto& e : entries_) {
    if (e.kind == ReleaseKind::browser && e.family == family &&
        compare_versions(*version_components(e.version), {major}) == 0) {
      return &e;
    }
  }
  return nullptr;
}

std::optional<Day> ReleaseDatabase::browser_superseded(std::string_view family, int major) const {
  const ReleaseEntry* self = nullptr;
  for (const auto& e : entries_) {
    if (e.kind != ReleaseKind::browser || e.family != family) continue;
    const int cmp = compare_versions(*version_components(e.version), {major});
    if (cmp == 0) self = &e;
    if (cmp > 0) {
      if (self == nullptr) return std::nullopt;  // major never recorded
      return e.release_date;
    }
  }
  if (self != nullptr) return self->eol_date;
  return std::nullopt;
}

const ReleaseEntry* ReleaseDatabase::os(std::string_view family, std::string_view version) const {
  const auto wanted = version_components(version);
  if (!wanted) return nullptr;
  const ReleaseEntry* best = nullptr;
  for (const auto& e : entries_) {
    if (e.kind != ReleaseKind::os || e.family != family) continue;
    if (compare_versions(*version_components(e.version), *wanted) <= 0) best = &e;
  }
  return best;
}

std::optional<Day> ReleaseDatabase::os_end_of_support(std::string_view family, std::string_view version,
                                                      std::chrono::days support_window) const {
  const ReleaseEntry* entry = os(family, version);
  if (entry == nullptr) return std::nullopt;
  if (entry->eol_date) return entry->eol_date;
  const bool latest = std::none_of(entries_.begin(), entries_.end(), [&](const ReleaseEntry& e) {
    return e.kind == ReleaseKind::os && e.family == family && e.release_date > entry->release_date;
  });
  if (latest) return std::nullopt;
  return entry->release_date + support_window;
}

std::optional<int> ReleaseDatabase::reduction_major(std::string_view family) const {
  for (const auto& e : entries_) {
    if (e.kind == ReleaseKind::reduction && e.family == family) return (*version_components(e.version)).front();
  }
  return std::nullopt;
}

ReleaseDatabase load_release_db(std::istream& source) {
  csv::Reader reader(source);
  const auto header = reader.next();
  const std::vector<std::string> expected = {"kind", "family", "version", "release_date", "eol_date"};
  if (!header || csv::names(*header) != expected) {
    throw SchemaMismatch("release table header must be kind,family,version,release_date,eol_date");
  }
  std::vector<ReleaseEntry> entries;
  while (auto row = reader.next()) {
    const std::size_t index = entries.size();
    if (row->size() == 1 && (*row)[0].value.empty()) continue;
    if (row->size() != 5) throw FormatError("release row needs 5 fields", index);
    ReleaseEntry e;
    const std::string& kind = (*row)[0].value;
    if (kind == "browser") {
      e.kind = ReleaseKind::browser;
    } else if (kind == "os") {
      e.kind = ReleaseKind::os;
    } else if (kind == "reduction") {
      e.kind = ReleaseKind::reduction;
    } else {
      throw FormatError("unknown release kind '" + kind + "'", index);
    }
    e.family = (*row)[1].value;
    e.version = (*row)[2].value;
    const auto release = parse_date((*row)[3].value);
    if (!release) throw FormatError("bad release_date '" + (*row)[3].value + "'", index);
    e.release_date = *release;
    if (!(*row)[4].value.empty()) {
      const auto eol = parse_date((*row)[4].value);
      if (!eol) throw FormatError("bad eol_date '" + (*row)[4].value + "'", index);
      e.eol_date = *eol;
    }
    entries.push_back(std::move(e));
  }
  return ReleaseDatabase(std::move(entries));
}

const ReleaseDatabase& bundled_release_db() {
  static const ReleaseDatabase db = [] {
    std::istringstream in{std::string(detail::bundled_release_csv())};
    return load_release_db(in);
  }();
  return db;
}

// ---------------------------------------------------------- frozen tokens

FrozenPlatformTokens::FrozenPlatformTokens()
    : tokens_{"Android 10; K", "Macintosh; Intel Mac OS X 10_15_7", "Windows NT 10.0; Win64; x64",
              "X11; CrOS x86_64 14541.0.0", "X11; Linux x86_64"} {}

bool FrozenPlatformTokens::contains(std::string_view platform_token) const {
  if (tokens_.contains(std::string(platform_token))) return true;
  constexpr std::string_view kLinuxPrefix = "Linux; ";
  if (platform_token.substr(0, kLinuxPrefix.size()) == kLinuxPrefix) {
    return tokens_.contains(std::string(platform_token.substr(kLinuxPrefix.size())));
  }
  return false;
}

// --------------------------------------------------------- known-bot IPs

namespace {

IpAddress with_host_bits(const IpAddress& ip, int prefix, bool ones) {
  auto bytes = ip.bytes();
  for (int i = prefix; i < ip.bit_width(); ++i) {
    const auto byte = static_cast<std::size_t>(i >> 3);
    const auto mask = static_cast<std::uint8_t>(0x80U >> (i & 7));
    if (ones) {
      bytes[byte] |= mask;
    } else {
      bytes[byte] = static_cast<std::uint8_t>(bytes[byte] & ~mask);
    }
  }
  if (ip.is_v4()) {
    return IpAddress::v4((std::uint32_t{bytes[0]} << 24) | (std::uint32_t{bytes[1]} << 16) |
                         (std::uint32_t{bytes[2]} << 8) | std::uint32_t{bytes[3]});
  }
  return IpAddress::v6(bytes);
}

// Successor of `ip` within its family, or nullopt at the top of the range.
std::optional<IpAddress> next_address(const IpAddress& ip) {
  auto bytes = ip.bytes();
  const int last = ip.is_v4() ? 3 : 15;
  for (int i = last; i >= 0; --i) {
    auto& b = bytes[static_cast<std::size_t>(i)];
    if (b != 0xFF) {
      ++b;
      if (ip.is_v4()) {
        return IpAddress::v4((std::uint32_t{bytes[0]} << 24) | (std::uint32_t{bytes[1]} << 16) |
                             (std::uint32_t{bytes[2]} << 8) | std::uint32_t{bytes[3]});
      }
      return IpAddress::v6(bytes);
    }
    b = 0;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Cidr> Cidr::parse(std::string_view text) {
  text = trim(text);
  const auto slash = text.find('/');
  const auto address = IpAddress::parse(text.substr(0, slash));
  if (!address) return std::nullopt;
  int prefix = address->bit_width();
  if (slash != std::string_view::npos) {
    const std::string_view digits = text.substr(slash + 1);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), prefix);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) return std::nullopt;
    if (prefix < 0 || prefix > address->bit_width()) return std::nullopt;
  }
  return Cidr{with_host_bits(*address, prefix, false), prefix};
}

bool Cidr::contains(const IpAddress& ip) const noexcept {
  if (ip.family() != network.family()) return false;
  return common_prefix_length(ip, network) >= prefix_length;
}

KnownBotIPs::KnownBotIPs(const std::vector<Cidr>& blocks) {
  std::vector<Interval> raw;
  raw.reserve(blocks.size());
  for (const auto& b : blocks) raw.push_back({b.network, with_host_bits(b.network, b.prefix_length, true)});
  std::sort(raw.begin(), raw.end(), [](const Interval& a, const Interval& b) { return a.first < b.first; });
  for (const auto& iv : raw) {
    if (!intervals_.empty() && intervals_.back().first.family() == iv.first.family()) {
      Interval& back = intervals_.back();
      const auto after = next_address(back.last);
      if (!after || iv.first <= *after) {
        if (back.last < iv.last) back.last = iv.last;
        continue;
      }
    }
    intervals_.push_back(iv);
  }
}

bool KnownBotIPs::contains(const IpAddress& raw_ip) const {
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), raw_ip,
                             [](const IpAddress& ip, const Interval& iv) { return ip < iv.first; });
  if (it == intervals_.begin()) return false;
  --it;
  return it->first.family() == raw_ip.family() && raw_ip <= it->last;
}

KnownBotIPs load_known_bot_ips(std::istream& source) {
  std::vector<Cidr> blocks;
  std::string line;
  std::size_t index = 0;
  while (std::getline(source, line)) {
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    auto cidr = Cidr::parse(view);
    if (!cidr) throw FormatError("invalid CIDR block '" + std::string(view) + "'", index);
    blocks.push_back(*cidr);
    ++index;
  }
  return KnownBotIPs(blocks);
}

bool is_known_bot_ip(const IpAddress& raw_ip, const KnownBotIPs& db) { return db.contains(raw_ip); }

bool is_known_bot_ip(const LogRecord& record, const KnownBotIPs& db) {
  if (record.provenance != Provenance::raw) {
    throw PreconditionViolation("known-bot IP lookup needs the raw address, record is anonymized");
  }
  return db.contains(record.client_ip);
}

}  // namespace botsift
