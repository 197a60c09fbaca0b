#include "botsift/log_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

#include <nlohmann/json.hpp>

#include "botsift/csv.hpp"
#include "botsift/error.hpp"

namespace botsift {

namespace {

using json = nlohmann::json;

ParseError malformed(const RawLine& raw, std::string detail) {
  return ParseError{ParseError::Kind::malformed_line, raw.line_number, std::move(detail)};
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

constexpr char kHexDigits[] = "0123456789ABCDEF";

void append_hex(std::string& out, char prefix_a, char prefix_b, unsigned char c) {
  out.push_back(prefix_a);
  if (prefix_b) out.push_back(prefix_b);
  out.push_back(kHexDigits[c >> 4]);
  out.push_back(kHexDigits[c & 0xF]);
}

bool iequals_prefix(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    const char a = static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
    if (a != prefix[i]) return false;
  }
  return true;
}

std::optional<int> parse_status(std::string_view s) {
  if (s.size() != 3) return std::nullopt;
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v < 100 || v > 599) return std::nullopt;
  return v;
}

std::string dash_to_empty(std::string s) {
  if (s == "-") s.clear();
  return s;
}

// Splits an HTTP request target into path and query. Origin-form, "*" and
// absolute-form targets are understood; anything else is not a target.
bool split_target(std::string_view target, LogRecord& rec) {
  if (target == "*") {
    rec.path = "*";
    rec.query.clear();
    return true;
  }
  std::string_view rest;
  if (!target.empty() && target.front() == '/') {
    rest = target;
  } else if (iequals_prefix(target, "http://") || iequals_prefix(target, "https://")) {
    const std::size_t authority = target.find("://") + 3;
    const std::size_t end = target.find_first_of("/?#", authority);
    if (end == std::string_view::npos) {
      rest = "/";
    } else if (target[end] == '/') {
      rest = target.substr(end);
    } else {
      // "http://host?x" has an empty path.
      rec.path = "/";
      rec.query = target[end] == '?' ? std::string(target.substr(end + 1)) : std::string();
      return true;
    }
  } else {
    return false;
  }
  const std::size_t q = rest.find('?');
  rec.path = percent_decode(rest.substr(0, q));
  rec.query = q == std::string_view::npos ? std::string() : std::string(rest.substr(q + 1));
  return true;
}

// Malformed request lines are kept as signal: method "-", path = raw line.
void apply_request_line(std::string_view line, LogRecord& rec) {
  const std::size_t s1 = line.find(' ');
  const std::size_t s2 = s1 == std::string_view::npos ? s1 : line.find(' ', s1 + 1);
  const bool three_tokens = s2 != std::string_view::npos && s1 > 0 && s2 > s1 + 1 &&
                            s2 + 1 < line.size() && line.find(' ', s2 + 1) == std::string_view::npos;
  if (three_tokens) {
    const std::string_view method = line.substr(0, s1);
    const std::string_view target = line.substr(s1 + 1, s2 - s1 - 1);
    if (method != "-" && split_target(target, rec)) {
      rec.method = std::string(method);
      return;
    }
  }
  rec.method = "-";
  rec.path = std::string(line);
  rec.query.clear();
}

std::string request_line_for(const LogRecord& rec) {
  if (rec.method == "-") return rec.path;
  std::string line = rec.method;
  line += ' ';
  line += percent_encode_path(rec.path);
  if (!rec.query.empty()) {
    line += '?';
    line += rec.query;
  }
  line += " HTTP/1.1";
  return line;
}

// ---------------------------------------------------------------------------
// Combined Log Format (Apache httpd, NGINX)

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  bool done() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  std::size_t pos() const { return pos_; }
  std::string_view rest() const { return s_.substr(pos_); }

  bool consume(char c) {
    if (done() || s_[pos_] != c) return false;
    ++pos_;
    return true;
  }

  std::optional<std::string_view> token() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ' ') ++pos_;
    if (pos_ == start) return std::nullopt;
    return s_.substr(start, pos_ - start);
  }

  std::optional<std::string_view> until(char c) {
    const std::size_t end = s_.find(c, pos_);
    if (end == std::string_view::npos) return std::nullopt;
    auto out = s_.substr(pos_, end - pos_);
    pos_ = end + 1;
    return out;
  }

  void skip_spaces() {
    while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
  }

  // Backslash-escaped quoted string as written by httpd and NGINX.
  std::optional<std::string> quoted() {
    if (!consume('"')) return std::nullopt;
    std::string out;
    while (pos_ < s_.size()) {
      const char c = s_[pos_++];
      if (c == '"') return out;
      if (c != '\\' || pos_ >= s_.size()) {
        out.push_back(c);
        continue;
      }
      const char e = s_[pos_++];
      switch (e) {
        case '"':
        case '\\':
          out.push_back(e);
          break;
        case 'n': out.push_back('\n'); break;
        case 'r': out.push_back('\r'); break;
        case 't': out.push_back('\t'); break;
        case 'v': out.push_back('\v'); break;
        case 'f': out.push_back('\f'); break;
        case 'b': out.push_back('\b'); break;
        case 'x': {
          const int hi = pos_ + 1 < s_.size() ? hex_value(s_[pos_]) : -1;
          const int lo = hi >= 0 ? hex_value(s_[pos_ + 1]) : -1;
          if (lo >= 0) {
            out.push_back(static_cast<char>(hi * 16 + lo));
            pos_ += 2;
          } else {
            out += "\\x";
          }
          break;
        }
        default:
          out.push_back('\\');
          out.push_back(e);
      }
    }
    return std::nullopt;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string clf_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (c == '"' || c == '\\') {
      out.push_back('\\');
      out.push_back(ch);
    } else if (c < 0x20 || c >= 0x7f) {
      append_hex(out, '\\', 'x', c);
    } else {
      out.push_back(ch);
    }
  }
  return out;
}

ParseResult parse_combined(const RawLine& raw) {
  Cursor cur(raw.text);
  LogRecord rec;

  const auto host = cur.token();
  if (!host) return malformed(raw, "missing client address");
  auto ip = IpAddress::parse(*host);
  if (!ip) return malformed(raw, "client address is not an IP");
  rec.client_ip = *ip;

  if (!cur.consume(' ') || !cur.token() || !cur.consume(' ') || !cur.token() || !cur.consume(' ')) {
    return malformed(raw, "missing ident/user fields");
  }
  if (!cur.consume('[')) return malformed(raw, "missing timestamp");
  const auto when = cur.until(']');
  if (!when) return malformed(raw, "unterminated timestamp");
  auto ts = parse_clf_time(*when);
  if (!ts) return malformed(raw, "bad timestamp");
  rec.timestamp = *ts;

  if (!cur.consume(' ')) return malformed(raw, "missing request line");
  auto request = cur.quoted();
  if (!request) return malformed(raw, "bad request line quoting");
  apply_request_line(*request, rec);

  if (!cur.consume(' ')) return malformed(raw, "missing status");
  const auto status_tok = cur.token();
  auto status = status_tok ? parse_status(*status_tok) : std::nullopt;
  if (!status) return malformed(raw, "bad status");
  rec.status = *status;

  if (!cur.consume(' ')) return malformed(raw, "missing body size");
  const auto bytes = cur.token();
  if (!bytes || (*bytes != "-" && !std::all_of(bytes->begin(), bytes->end(), [](char c) {
                   return c >= '0' && c <= '9';
                 }))) {
    return malformed(raw, "bad body size");
  }

  if (!cur.consume(' ')) return malformed(raw, "missing referer");
  auto referer = cur.quoted();
  if (!referer) return malformed(raw, "bad referer quoting");
  if (*referer != "-") rec.referer = std::move(*referer);

  if (!cur.consume(' ')) return malformed(raw, "missing user-agent");
  auto ua = cur.quoted();
  if (!ua) return malformed(raw, "bad user-agent quoting");
  rec.user_agent = dash_to_empty(std::move(*ua));

  // Custom formats often append fields after the user-agent; they are ignored.
  if (!cur.done() && cur.peek() != ' ') return malformed(raw, "garbage after user-agent");
  return rec;
}

std::string format_combined(const LogRecord& rec) {
  std::string line = rec.client_ip.to_string();
  line += " - - [";
  line += format_clf_time(rec.timestamp);
  line += "] \"";
  line += clf_escape(request_line_for(rec));
  line += "\" ";
  line += std::to_string(rec.status);
  line += " - \"";
  line += rec.referer ? clf_escape(*rec.referer) : std::string("-");
  line += "\" \"";
  line += rec.user_agent.empty() ? std::string("-") : clf_escape(rec.user_agent);
  line += '"';
  return line;
}

// ---------------------------------------------------------------------------
// Caddy structured (JSON) access log

const json* find_header(const json& headers, std::string_view name) {
  if (!headers.is_object()) return nullptr;
  for (auto it = headers.begin(); it != headers.end(); ++it) {
    const std::string& key = it.key();
    if (key.size() == name.size() &&
        std::equal(key.begin(), key.end(), name.begin(), [](char a, char b) {
          return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
        })) {
      return &it.value();
    }
  }
  return nullptr;
}

std::optional<std::string> first_header_value(const json& headers, std::string_view name) {
  const json* values = find_header(headers, name);
  if (values == nullptr) return std::nullopt;
  if (values->is_string()) return values->get<std::string>();
  if (values->is_array() && !values->empty() && (*values)[0].is_string()) {
    return (*values)[0].get<std::string>();
  }
  return std::nullopt;
}

std::optional<IpAddress> parse_remote_addr(std::string_view addr) {
  if (auto ip = IpAddress::parse(addr)) return ip;
  if (!addr.empty() && addr.front() == '[') {
    const std::size_t close = addr.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    return IpAddress::parse(addr.substr(1, close - 1));
  }
  const std::size_t colon = addr.rfind(':');
  if (colon == std::string_view::npos) return std::nullopt;
  return IpAddress::parse(addr.substr(0, colon));
}

ParseResult parse_caddy(const RawLine& raw) {
  json doc = json::parse(raw.text.begin(), raw.text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return malformed(raw, "not a JSON object");

  LogRecord rec;
  const auto ts = doc.find("ts");
  if (ts == doc.end()) return malformed(raw, "missing ts");
  if (ts->is_number()) {
    const double secs = ts->get<double>();
    if (!std::isfinite(secs) || secs < -1e11 || secs > 1e11) return malformed(raw, "ts out of range");
    rec.timestamp = Instant{std::chrono::seconds{static_cast<std::int64_t>(std::floor(secs))}};
  } else if (ts->is_string()) {
    auto parsed = parse_iso8601(ts->get<std::string>());
    if (!parsed) return malformed(raw, "bad ts");
    rec.timestamp = *parsed;
  } else {
    return malformed(raw, "bad ts");
  }

  const auto req = doc.find("request");
  if (req == doc.end() || !req->is_object()) return malformed(raw, "missing request object");

  std::optional<IpAddress> ip;
  if (auto it = req->find("remote_ip"); it != req->end() && it->is_string()) {
    ip = IpAddress::parse(it->get<std::string>());
  }
  if (!ip) {
    if (auto it = req->find("remote_addr"); it != req->end() && it->is_string()) {
      ip = parse_remote_addr(it->get<std::string>());
    }
  }
  if (!ip) return malformed(raw, "missing remote address");
  rec.client_ip = *ip;

  const auto method = req->find("method");
  const auto uri = req->find("uri");
  if (method == req->end() || !method->is_string() || uri == req->end() || !uri->is_string()) {
    return malformed(raw, "missing method or uri");
  }
  rec.method = method->get<std::string>();
  if (rec.method.empty() || rec.method == "-" || rec.method.find(' ') != std::string::npos) {
    return malformed(raw, "bad method");
  }
  if (!split_target(uri->get<std::string>(), rec)) return malformed(raw, "bad uri");

  const auto status = doc.find("status");
  if (status == doc.end() || !status->is_number_integer()) return malformed(raw, "missing status");
  const auto code = status->get<std::int64_t>();
  if (code < 100 || code > 599) return malformed(raw, "status out of range");
  rec.status = static_cast<int>(code);

  if (auto headers = req->find("headers"); headers != req->end()) {
    if (auto ua = first_header_value(*headers, "User-Agent")) rec.user_agent = dash_to_empty(*ua);
    if (auto ref = first_header_value(*headers, "Referer"); ref && *ref != "-") rec.referer = *ref;
  }
  return rec;
}

std::string format_caddy(const LogRecord& rec) {
  json headers = json::object();
  if (!rec.user_agent.empty()) headers["User-Agent"] = json::array({rec.user_agent});
  if (rec.referer) headers["Referer"] = json::array({*rec.referer});

  std::string uri = percent_encode_path(rec.path);
  if (!rec.query.empty()) uri += "?" + rec.query;

  json doc = {
      {"level", "info"},
      {"ts", rec.timestamp.time_since_epoch().count()},
      {"logger", "http.log.access"},
      {"msg", "handled request"},
      {"request",
       {{"remote_ip", rec.client_ip.to_string()},
        {"remote_port", "0"},
        {"proto", "HTTP/1.1"},
        {"method", rec.method},
        {"host", "localhost"},
        {"uri", uri},
        {"headers", headers}}},
      {"status", rec.status},
  };
  return doc.dump(-1, ' ', false, json::error_handler_t::replace);
}

// ---------------------------------------------------------------------------
// HAProxy "option httplog"

std::string haproxy_decode(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '#' && i + 2 < s.size()) {
      const int hi = hex_value(s[i + 1]);
      const int lo = hex_value(s[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out.push_back(static_cast<char>(hi * 16 + lo));
        i += 2;
        continue;
      }
    }
    out.push_back(s[i]);
  }
  return out;
}

std::string haproxy_encode(std::string_view s, bool capture) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    const bool special = c == '"' || c == '#' || (capture && (c == '{' || c == '|' || c == '}'));
    if (special || c < 0x20 || c >= 0x7f) {
      append_hex(out, '#', 0, c);
    } else {
      out.push_back(ch);
    }
  }
  return out;
}

std::vector<std::string_view> split_bar(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t bar = s.find('|', start);
    out.push_back(s.substr(start, bar == std::string_view::npos ? bar : bar - start));
    if (bar == std::string_view::npos) return out;
    start = bar + 1;
  }
}

bool looks_like_accept_date(std::string_view s, std::size_t bracket) {
  return bracket + 4 < s.size() && std::isdigit(static_cast<unsigned char>(s[bracket + 1])) &&
         std::isdigit(static_cast<unsigned char>(s[bracket + 2])) && s[bracket + 3] == '/';
}

ParseResult parse_haproxy(const RawLine& raw, const HaproxyCaptureLayout& layout) {
  const std::string_view text = raw.text;

  // Skip any syslog prefix by anchoring on "<client>:<port> [dd/Mon/...".
  std::size_t bracket = text.find(" [");
  while (bracket != std::string_view::npos && !looks_like_accept_date(text, bracket + 1)) {
    bracket = text.find(" [", bracket + 1);
  }
  if (bracket == std::string_view::npos) return malformed(raw, "missing accept date");
  if (bracket == 0) return malformed(raw, "missing client address");
  const std::size_t client_start = text.rfind(' ', bracket - 1);
  const std::string_view client =
      text.substr(client_start == std::string_view::npos ? 0 : client_start + 1,
                  bracket - (client_start == std::string_view::npos ? 0 : client_start + 1));
  const std::size_t colon = client.rfind(':');
  if (colon == std::string_view::npos) return malformed(raw, "client has no port");
  auto ip = IpAddress::parse(client.substr(0, colon));
  if (!ip) return malformed(raw, "client address is not an IP");

  LogRecord rec;
  rec.client_ip = *ip;

  Cursor cur(text.substr(bracket + 2));
  const auto when = cur.until(']');
  if (!when) return malformed(raw, "unterminated accept date");
  auto ts = parse_clf_time(*when, layout.utc_offset);
  if (!ts) return malformed(raw, "bad accept date");
  rec.timestamp = *ts;

  // frontend backend/server timers status bytes req_cookie res_cookie
  // termination_state conn_counts queues
  std::string_view fields[10];
  for (auto& f : fields) {
    if (!cur.consume(' ')) return malformed(raw, "truncated httplog fields");
    auto tok = cur.token();
    if (!tok) return malformed(raw, "truncated httplog fields");
    f = *tok;
  }
  auto status = parse_status(fields[3]);
  if (!status) return malformed(raw, "bad status");
  rec.status = *status;

  std::optional<std::string_view> request_captures;
  cur.skip_spaces();
  if (!cur.done() && cur.peek() == '{') {
    cur.consume('{');
    request_captures = cur.until('}');
    if (!request_captures) return malformed(raw, "unterminated header capture");
    cur.skip_spaces();
    if (!cur.done() && cur.peek() == '{') {
      cur.consume('{');
      if (!cur.until('}')) return malformed(raw, "unterminated header capture");
      cur.skip_spaces();
    }
  }

  if (!cur.consume('"')) return malformed(raw, "missing request line");
  std::string_view request = cur.rest();
  // The closing quote may be missing when HAProxy truncated the line.
  if (!request.empty() && request.back() == '"') request.remove_suffix(1);
  if (request.find('"') != std::string_view::npos) return malformed(raw, "stray quote in request");
  apply_request_line(haproxy_decode(request), rec);

  const std::size_t ua_slot = *layout.user_agent_slot;
  if (!request_captures) {
    return ParseError{ParseError::Kind::missing_ua_capture, raw.line_number, "no request header capture block"};
  }
  const auto slots = split_bar(*request_captures);
  if (ua_slot >= slots.size()) {
    return ParseError{ParseError::Kind::missing_ua_capture, raw.line_number,
                      "capture block has no slot " + std::to_string(ua_slot)};
  }
  rec.user_agent = dash_to_empty(haproxy_decode(slots[ua_slot]));
  if (layout.referer_slot && *layout.referer_slot < slots.size()) {
    std::string ref = haproxy_decode(slots[*layout.referer_slot]);
    if (!ref.empty() && ref != "-") rec.referer = std::move(ref);
  }
  return rec;
}

std::string format_haproxy(const LogRecord& rec, const HaproxyCaptureLayout& layout) {
  const std::size_t ua_slot = layout.user_agent_slot.value_or(0);
  std::size_t nslots = ua_slot + 1;
  if (layout.referer_slot) nslots = std::max(nslots, *layout.referer_slot + 1);
  std::vector<std::string> slots(nslots);
  slots[ua_slot] = haproxy_encode(rec.user_agent, true);
  if (layout.referer_slot && rec.referer) slots[*layout.referer_slot] = haproxy_encode(*rec.referer, true);

  const Instant local = rec.timestamp + layout.utc_offset;
  std::string when = format_clf_time(local);
  when.resize(when.size() - 6);  // drop " +0000"
  when += ".000";

  std::string line = rec.client_ip.to_string();
  line += ":40000 [";
  line += when;
  line += "] fe be/srv 0/0/0/0/0 ";
  line += std::to_string(rec.status);
  line += " 0 - - ---- 1/1/1/1/0 0/0 {";
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (i) line += '|';
    line += slots[i];
  }
  line += "} \"";
  line += haproxy_encode(request_line_for(rec), false);
  line += '"';
  return line;
}

}  // namespace

std::string_view to_string(LogFormat f) noexcept {
  switch (f) {
    case LogFormat::caddy_json: return "caddy-json";
    case LogFormat::apache_combined: return "apache-combined";
    case LogFormat::nginx_combined: return "nginx-combined";
    case LogFormat::haproxy_http: return "haproxy-http";
  }
  return "unknown";
}

std::optional<LogFormat> parse_log_format(std::string_view name) noexcept {
  for (auto f : {LogFormat::caddy_json, LogFormat::apache_combined, LogFormat::nginx_combined,
                 LogFormat::haproxy_http}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

std::string_view to_string(ParseError::Kind k) noexcept {
  switch (k) {
    case ParseError::Kind::malformed_line: return "malformed-line";
    case ParseError::Kind::missing_ua_capture: return "missing-ua-capture";
    case ParseError::Kind::schema_mismatch: return "schema-mismatch";
  }
  return "unknown";
}

LineParser::LineParser(LogFormat format, HaproxyCaptureLayout haproxy)
    : format_(format), haproxy_(haproxy) {
  if (format_ == LogFormat::haproxy_http && !haproxy_.user_agent_slot) {
    throw ConfigError("haproxy-http input needs the captured-header slot holding User-Agent");
  }
}

ParseResult LineParser::parse(const RawLine& raw) const {
  if (raw.text.empty()) return malformed(raw, "empty line");
  switch (format_) {
    case LogFormat::apache_combined:
    case LogFormat::nginx_combined:
      return parse_combined(raw);
    case LogFormat::caddy_json:
      return parse_caddy(raw);
    case LogFormat::haproxy_http:
      return parse_haproxy(raw, haproxy_);
  }
  return malformed(raw, "unsupported format");
}

ParseResult parse_line(const RawLine& raw) {
  static const HaproxyCaptureLayout kDefaultLayout{0, std::nullopt, {}};
  if (raw.format == LogFormat::haproxy_http) return LineParser(raw.format, kDefaultLayout).parse(raw);
  return LineParser(raw.format).parse(raw);
}

std::string format_line(const LogRecord& record, LogFormat format, const HaproxyCaptureLayout& haproxy) {
  switch (format) {
    case LogFormat::apache_combined:
    case LogFormat::nginx_combined:
      return format_combined(record);
    case LogFormat::caddy_json:
      return format_caddy(record);
    case LogFormat::haproxy_http:
      return format_haproxy(record, haproxy);
  }
  return {};
}

std::string percent_decode(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      const int hi = hex_value(s[i + 1]);
      const int lo = hex_value(s[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out.push_back(static_cast<char>(hi * 16 + lo));
        i += 2;
        continue;
      }
    }
    out.push_back(s[i]);
  }
  return out;
}

std::string percent_encode_path(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (c <= 0x20 || c >= 0x7f || c == '%' || c == '?' || c == '#' || c == '"' || c == '\\') {
      append_hex(out, '%', 0, c);
    } else {
      out.push_back(ch);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Normalized CSV

NormalizedWriter::NormalizedWriter(std::ostream& out) : out_(out) { out_ << kNormalizedHeader << '\n'; }

void write_normalized_fields(std::ostream& out, const LogRecord& r) {
  if (r.provenance != Provenance::anonymized) {
    throw PreconditionViolation("refusing to write a record with an un-anonymized client address");
  }
  out << format_iso8601(r.timestamp) << ',' << r.client_ip.to_string() << ',';
  csv::write_field(out, r.method);
  out << ',';
  csv::write_field(out, r.path);
  out << ',';
  csv::write_field(out, r.query);
  out << ',' << r.status << ',';
  csv::write_field(out, r.user_agent);
  out << ',';
  if (r.referer) csv::write_field(out, *r.referer, r.referer->empty());
}

void NormalizedWriter::write(const LogRecord& r) {
  write_normalized_fields(out_, r);
  out_ << '\n';
  ++rows_;
}

NormalizedReader::NormalizedReader(std::istream& in) : reader_(in) {
  auto header = reader_.next();
  if (!header) throw SchemaMismatch("normalized CSV is empty; expected header " + std::string(kNormalizedHeader));
  std::string joined;
  for (std::size_t i = 0; i < header->size(); ++i) {
    if (i) joined += ',';
    joined += (*header)[i].value;
  }
  if (joined != kNormalizedHeader) {
    throw SchemaMismatch("unexpected header \"" + joined + "\"; expected " + std::string(kNormalizedHeader));
  }
}

LogRecord normalized_record_from_fields(std::span<csv::Field> f, std::size_t row_index) {
  const auto fail = [&](const std::string& why) {
    return FormatError("normalized row " + std::to_string(row_index) + ": " + why, row_index);
  };
  if (f.size() != 8) throw fail("expected 8 fields, got " + std::to_string(f.size()));

  LogRecord rec;
  rec.provenance = Provenance::anonymized;
  auto ts = parse_iso8601(f[0].value);
  if (!ts) throw fail("bad timestamp");
  rec.timestamp = *ts;
  auto ip = IpAddress::parse(f[1].value);
  if (!ip) throw fail("bad ip");
  rec.client_ip = *ip;
  rec.method = std::move(f[2].value);
  rec.path = std::move(f[3].value);
  rec.query = std::move(f[4].value);
  auto status = parse_status(f[5].value);
  if (!status) throw fail("bad status");
  rec.status = *status;
  rec.user_agent = std::move(f[6].value);
  if (f[7].quoted || !f[7].value.empty()) rec.referer = std::move(f[7].value);
  return rec;
}

std::optional<LogRecord> NormalizedReader::next() {
  auto row = reader_.next();
  if (!row) return std::nullopt;
  ++row_index_;
  return normalized_record_from_fields(*row, row_index_);
}

std::size_t write_normalized(std::span<const LogRecord> records, std::ostream& sink) {
  for (const auto& r : records) {
    if (r.provenance != Provenance::anonymized) {
      throw PreconditionViolation("refusing to write a record with an un-anonymized client address");
    }
  }
  NormalizedWriter writer(sink);
  for (const auto& r : records) writer.write(r);
  return writer.rows();
}

std::vector<LogRecord> read_normalized(std::istream& source) {
  NormalizedReader reader(source);
  std::vector<LogRecord> out;
  while (auto rec = reader.next()) out.push_back(std::move(*rec));
  return out;
}

void for_each_line(std::istream& in,
                   const std::function<void(std::uint64_t, std::string_view)>& on_line) {
  std::string line;
  std::uint64_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    on_line(n, line);
  }
}

}  // namespace botsift
