#include "botsift/ua_model.hpp"

#include <array>
#include <cctype>
#include <vector>

namespace botsift {

namespace {

struct Product {
  std::string_view name;
  std::string_view version;  // empty when the token has no '/'
};

struct Tokens {
  std::vector<Product> products;
  std::vector<std::string_view> comments;
};

bool is_space(char c) { return c == ' ' || c == '\t'; }

// Splits a UA into product tokens and top-level parenthesized comments.
// Unbalanced comments run to the end of the string and are dropped.
Tokens tokenize(std::string_view ua) {
  Tokens t;
  std::size_t i = 0;
  while (i < ua.size()) {
    if (is_space(ua[i])) {
      ++i;
      continue;
    }
    if (ua[i] == '(') {
      int depth = 1;
      std::size_t j = i + 1;
      while (j < ua.size() && depth > 0) {
        if (ua[j] == '(') ++depth;
        if (ua[j] == ')') --depth;
        ++j;
      }
      if (depth == 0) t.comments.push_back(ua.substr(i + 1, j - i - 2));
      i = j;
      continue;
    }
    std::size_t j = i;
    while (j < ua.size() && !is_space(ua[j]) && ua[j] != '(') ++j;
    const std::string_view tok = ua.substr(i, j - i);
    const std::size_t slash = tok.find('/');
    if (slash == std::string_view::npos) {
      t.products.push_back({tok, {}});
    } else {
      t.products.push_back({tok.substr(0, slash), tok.substr(slash + 1)});
    }
    i = j;
  }
  return t;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_pieces(std::string_view comment) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t semi = comment.find(';', start);
    out.push_back(trim(comment.substr(start, semi == std::string_view::npos ? semi : semi - start)));
    if (semi == std::string_view::npos) return out;
    start = semi + 1;
  }
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// "8.0" / "4.4.2" / "10_15_7": digits separated by '.' or '_'.
std::string_view version_prefix(std::string_view s) {
  std::size_t n = 0;
  while (n < s.size() && (is_digit(s[n]) || ((s[n] == '.' || s[n] == '_') && n > 0))) ++n;
  while (n > 0 && (s[n - 1] == '.' || s[n - 1] == '_')) --n;
  return s.substr(0, n);
}

const Product* find_product(const Tokens& t, std::string_view name) {
  for (const auto& p : t.products) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

void set_browser(ParsedUserAgent& out, BrowserFamily family, std::string_view name, std::string_view version) {
  out.browser_family = family;
  out.browser_name = std::string(name);
  if (!version.empty()) {
    out.browser_full_version = std::string(version);
    out.browser_major = leading_integer(version);
  }
}

bool detect_msie(const Tokens& t, ParsedUserAgent& out) {
  for (auto comment : t.comments) {
    bool trident = false;
    std::string_view rv;
    for (auto piece : split_pieces(comment)) {
      if (piece.size() > 5 && piece.substr(0, 5) == "MSIE ") {
        set_browser(out, BrowserFamily::msie, "MSIE", trim(piece.substr(5)));
        return true;
      }
      if (piece.substr(0, 8) == "Trident/") trident = true;
      if (piece.substr(0, 3) == "rv:") rv = piece.substr(3);
    }
    if (trident && !rv.empty()) {
      set_browser(out, BrowserFamily::msie, "MSIE", rv);
      return true;
    }
  }
  return false;
}

bool looks_like_os_piece(std::string_view piece) {
  constexpr std::array<std::string_view, 9> kOsWords = {"Windows", "Linux",  "Android", "Macintosh", "Mac OS",
                                                        "X11",     "iPhone", "iPad",    "CrOS"};
  for (auto w : kOsWords) {
    if (piece.find(w) != std::string_view::npos) return true;
  }
  return false;
}

// "(compatible; Googlebot/2.1; +http://...)" style self-identification.
bool detect_compatible(const Tokens& t, ParsedUserAgent& out) {
  for (auto comment : t.comments) {
    const auto pieces = split_pieces(comment);
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
      if (pieces[i] != "compatible") continue;
      const std::string_view next = pieces[i + 1];
      if (next.empty() || next.front() == '+' || looks_like_os_piece(next)) continue;
      const std::size_t slash = next.find('/');
      if (slash == std::string_view::npos) {
        set_browser(out, BrowserFamily::other, next, {});
      } else {
        set_browser(out, BrowserFamily::other, next.substr(0, slash), next.substr(slash + 1));
      }
      return true;
    }
  }
  return false;
}

bool detect_products(const Tokens& t, ParsedUserAgent& out) {
  for (std::string_view edge : {"Edg", "EdgA", "EdgiOS", "Edge"}) {
    if (const auto* p = find_product(t, edge)) {
      set_browser(out, BrowserFamily::edge, "Edge", p->version);
      return true;
    }
  }
  if (const auto* p = find_product(t, "OPR")) {
    set_browser(out, BrowserFamily::opera, "Opera", p->version);
    return true;
  }
  if (!t.products.empty() && t.products.front().name == "Opera") {
    const auto* v = find_product(t, "Version");
    set_browser(out, BrowserFamily::opera, "Opera", v ? v->version : t.products.front().version);
    return true;
  }
  // Chromium derivatives whose own version is what they claim.
  for (std::string_view name : {"SamsungBrowser", "YaBrowser", "UCBrowser", "HeadlessChrome"}) {
    if (const auto* p = find_product(t, name)) {
      set_browser(out, BrowserFamily::other, p->name, p->version);
      return true;
    }
  }
  for (std::string_view name : {"Firefox", "FxiOS"}) {
    if (const auto* p = find_product(t, name)) {
      set_browser(out, BrowserFamily::firefox, "Firefox", p->version);
      return true;
    }
  }
  if (const auto* p = find_product(t, "CriOS")) {
    set_browser(out, BrowserFamily::chrome_mobile, "Chrome-Mobile", p->version);
    return true;
  }
  if (const auto* p = find_product(t, "Chrome")) {
    const bool mobile = find_product(t, "Mobile") != nullptr;
    set_browser(out, mobile ? BrowserFamily::chrome_mobile : BrowserFamily::chrome,
                mobile ? "Chrome-Mobile" : "Chrome", p->version);
    return true;
  }
  if (find_product(t, "Safari") != nullptr) {
    const auto* v = find_product(t, "Version");
    set_browser(out, BrowserFamily::safari, "Safari", v ? v->version : std::string_view{});
    return true;
  }
  return false;
}

void detect_browser(const Tokens& t, ParsedUserAgent& out) {
  if (detect_msie(t, out) || detect_compatible(t, out) || detect_products(t, out)) return;
  if (!t.products.empty() && t.products.front().name != "Mozilla" && !t.products.front().name.empty()) {
    set_browser(out, BrowserFamily::other, t.products.front().name, t.products.front().version);
  }
}

std::string_view after(std::string_view s, std::string_view marker) {
  const std::size_t at = s.find(marker);
  if (at == std::string_view::npos) return {};
  return s.substr(at + marker.size());
}

void set_os(ParsedUserAgent& out, OsFamily family, std::string_view name, std::string_view version) {
  out.os_family = family;
  out.os_name = std::string(name);
  if (!version.empty()) out.os_version = std::string(version);
}

void detect_os(const Tokens& t, ParsedUserAgent& out) {
  for (auto comment : t.comments) {
    if (comment.find("Windows Phone") != std::string_view::npos) {
      set_os(out, OsFamily::other, "Windows Phone", version_prefix(trim(after(comment, "Windows Phone"))));
      return;
    }
    if (comment.find("Windows NT ") != std::string_view::npos) {
      const auto v = version_prefix(after(comment, "Windows NT "));
      set_os(out, OsFamily::windows, "Windows", {});
      if (!v.empty()) out.os_version = "NT " + std::string(v);
      return;
    }
    struct Legacy {
      std::string_view marker;
      std::string_view version;
    };
    constexpr std::array<Legacy, 6> kLegacy = {{{"Windows 98", "98"},
                                                {"Win98", "98"},
                                                {"Windows 95", "95"},
                                                {"Win95", "95"},
                                                {"Windows ME", "ME"},
                                                {"Windows XP", "NT 5.1"}}};
    for (const auto& l : kLegacy) {
      if (comment.find(l.marker) != std::string_view::npos) {
        set_os(out, OsFamily::windows, "Windows", l.version);
        return;
      }
    }
  }
  for (auto comment : t.comments) {
    if (comment.find("Android") != std::string_view::npos) {
      set_os(out, OsFamily::android, "Android", version_prefix(trim(after(comment, "Android"))));
      return;
    }
  }
  for (auto comment : t.comments) {
    if (comment.find("CrOS ") != std::string_view::npos) {
      // "X11; CrOS x86_64 14541.0.0": the last field is the platform version.
      std::string_view rest = trim(after(comment, "CrOS "));
      const std::size_t semi = rest.find(';');
      rest = rest.substr(0, semi);
      const std::size_t sp = rest.rfind(' ');
      set_os(out, OsFamily::chromeos, "ChromeOS",
             sp == std::string_view::npos ? std::string_view{} : version_prefix(rest.substr(sp + 1)));
      return;
    }
  }
  for (auto comment : t.comments) {
    for (std::string_view marker : {"iPhone OS ", "CPU OS "}) {
      if (comment.find(marker) != std::string_view::npos) {
        set_os(out, OsFamily::ios, "iOS", version_prefix(after(comment, marker)));
        return;
      }
    }
    if (comment.find("iPhone") != std::string_view::npos || comment.find("iPad") != std::string_view::npos) {
      set_os(out, OsFamily::ios, "iOS", {});
      return;
    }
  }
  for (auto comment : t.comments) {
    if (comment.find("Mac OS X") != std::string_view::npos) {
      set_os(out, OsFamily::macos, "macOS", version_prefix(trim(after(comment, "Mac OS X"))));
      return;
    }
    if (comment.find("Macintosh") != std::string_view::npos) {
      set_os(out, OsFamily::macos, "macOS", {});
      return;
    }
  }
  for (auto comment : t.comments) {
    if (comment.find("Linux") != std::string_view::npos || comment.find("X11") != std::string_view::npos) {
      set_os(out, OsFamily::gnu_linux, "Linux", {});
      return;
    }
  }
}

void detect_engine(const Tokens& t, ParsedUserAgent& out) {
  for (const auto& p : t.products) {
    if (p.name == "AppleWebKit" || p.name == "Gecko" || p.name == "Presto" || p.name == "Goanna") {
      std::string token(p.name);
      if (!p.version.empty()) token += "/" + std::string(p.version);
      out.engine_token = std::move(token);
      return;
    }
  }
  for (auto comment : t.comments) {
    for (auto piece : split_pieces(comment)) {
      if (piece.substr(0, 8) == "Trident/") {
        out.engine_token = std::string(piece);
        return;
      }
    }
  }
}

}  // namespace

std::string_view to_string(BrowserFamily f) noexcept {
  switch (f) {
    case BrowserFamily::chrome: return "Chrome";
    case BrowserFamily::chrome_mobile: return "Chrome-Mobile";
    case BrowserFamily::firefox: return "Firefox";
    case BrowserFamily::safari: return "Safari";
    case BrowserFamily::edge: return "Edge";
    case BrowserFamily::opera: return "Opera";
    case BrowserFamily::msie: return "MSIE";
    case BrowserFamily::other: return "Other";
  }
  return "Other";
}

std::string_view to_string(OsFamily f) noexcept {
  switch (f) {
    case OsFamily::windows: return "Windows";
    case OsFamily::macos: return "macOS";
    case OsFamily::android: return "Android";
    case OsFamily::ios: return "iOS";
    case OsFamily::gnu_linux: return "Linux";
    case OsFamily::chromeos: return "ChromeOS";
    case OsFamily::other: return "Other";
  }
  return "Other";
}

std::optional<int> leading_integer(std::string_view version) {
  std::size_t i = 0;
  while (i < version.size() && !is_digit(version[i]) && i < 3) ++i;  // "NT 6.1"
  if (i > 0 && version.substr(0, 3) != "NT ") return std::nullopt;
  if (i >= version.size() || !is_digit(version[i])) return std::nullopt;
  long long v = 0;
  for (; i < version.size() && is_digit(version[i]); ++i) {
    v = v * 10 + (version[i] - '0');
    if (v > 1'000'000'000) return std::nullopt;
  }
  return static_cast<int>(v);
}

ParsedUserAgent parse_user_agent(std::string_view ua) {
  ParsedUserAgent out;
  out.raw = std::string(ua);
  out.has_mozilla5_prefix = ua.substr(0, 11) == "Mozilla/5.0";

  const Tokens tokens = tokenize(ua);
  if (!tokens.comments.empty()) out.platform_token = std::string(tokens.comments.front());
  detect_browser(tokens, out);
  detect_os(tokens, out);
  detect_engine(tokens, out);
  return out;
}

std::optional<int> extract_android_version(const ParsedUserAgent& ua) {
  if (ua.os_family != OsFamily::android || !ua.os_version) return std::nullopt;
  return leading_integer(*ua.os_version);
}

std::optional<std::string> windows_marketing_name(std::string_view nt_version) {
  struct Entry {
    std::string_view nt;
    std::string_view name;
  };
  constexpr std::array<Entry, 9> kNames = {{{"NT 4.0", "NT 4.0"},
                                            {"NT 5.0", "2000"},
                                            {"NT 5.1", "XP"},
                                            {"NT 5.2", "XP"},
                                            {"NT 6.0", "Vista"},
                                            {"NT 6.1", "7"},
                                            {"NT 6.2", "8"},
                                            {"NT 6.3", "8.1"},
                                            {"NT 10.0", "10"}}};
  for (const auto& e : kNames) {
    if (e.nt == nt_version) return std::string(e.name);
  }
  return std::nullopt;
}

std::string browser_label(const ParsedUserAgent& ua) {
  if (ua.raw.empty()) return "(empty)";
  if (!ua.browser_family) return "Unknown";
  std::string name;
  bool major_only = true;
  switch (*ua.browser_family) {
    case BrowserFamily::chrome: name = "Google Chrome"; break;
    case BrowserFamily::chrome_mobile: name = "Chrome Mobile"; break;
    case BrowserFamily::firefox: name = "Firefox"; break;
    case BrowserFamily::safari: name = "Safari"; break;
    case BrowserFamily::edge: name = "Microsoft Edge"; break;
    case BrowserFamily::opera: name = "Opera"; break;
    case BrowserFamily::msie:
      name = "Internet Explorer";
      major_only = false;
      break;
    case BrowserFamily::other:
      name = ua.browser_name.value_or("Other");
      major_only = false;
      break;
  }
  if (major_only && ua.browser_major) return name + " " + std::to_string(*ua.browser_major);
  if (!major_only && ua.browser_full_version) return name + " " + *ua.browser_full_version;
  return name;
}

std::string os_label(const ParsedUserAgent& ua) {
  if (!ua.os_family) return "---";
  switch (*ua.os_family) {
    case OsFamily::windows: {
      if (ua.os_version) {
        if (auto name = windows_marketing_name(*ua.os_version)) return "Windows " + *name;
        return "Windows " + *ua.os_version;
      }
      return "Windows";
    }
    case OsFamily::macos: return "macOS";
    case OsFamily::android: return "Android";
    case OsFamily::ios: return "iOS";
    case OsFamily::gnu_linux: return "Linux";
    case OsFamily::chromeos: return "Chrome OS";
    case OsFamily::other: return ua.os_name.value_or("Other");
  }
  return "---";
}

}  // namespace botsift
