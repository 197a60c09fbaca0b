#include "fixtures.hpp"

#include <fstream>
#include <random>
#include <regex>
#include <sstream>
#include <stdexcept>

namespace botsift::testing {

std::vector<LogRecord> fig2_records(Day first_day) {
  std::vector<LogRecord> out;
  for (std::size_t d = 0; d < kDailyTotal.size(); ++d) {
    const Day day = first_day + std::chrono::days{static_cast<int>(d)};
    const Instant noon = Instant{day} + std::chrono::hours{12};
    const std::uint64_t total = kDailyTotal[d];
    for (std::uint64_t i = 0; i < total; ++i) {
      // Distinct per day; the same index on another day is another client.
      const auto ip = IpAddress::v4(static_cast<std::uint32_t>((20U << 24) + d * 65536 + i));
      LogRecord r;
      r.timestamp = noon + std::chrono::seconds{i % 3600};
      r.client_ip = ip;
      r.provenance = Provenance::anonymized;
      r.method = "GET";
      r.path = "/";
      r.status = 200;
      r.user_agent = "Mozilla/5.0 (Windows NT 10.0; Win64; x64) AppleWebKit/537.36 (KHTML, like Gecko) "
                     "Chrome/141.0.0.0 Safari/537.36";
      out.push_back(r);
      if (i < kDailyFavicon[d]) {
        LogRecord f = r;
        f.path = "/favicon.ico";
        f.query = "v=" + format_date(day);
        out.push_back(f);
      }
      // Marker posts come from the other end of the day's clients.
      if (i >= total - kDailyPost[d]) {
        LogRecord p = r;
        p.method = "POST";
        p.path = "/course/view.php";
        out.push_back(p);
      }
    }
  }
  return out;
}

TempDir::TempDir() {
  std::random_device rd;
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto candidate = std::filesystem::temp_directory_path() / ("botsift-test-" + std::to_string(rd()));
    if (std::filesystem::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("cannot create a temporary directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string key_hex(const std::array<std::uint8_t, 32>& key) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (auto b : key) {
    out += kDigits[b >> 4];
    out += kDigits[b & 15];
  }
  return out;
}

std::filesystem::path fixtures_dir() { return BOTSIFT_TEST_FIXTURES; }
std::filesystem::path golden_dir() { return BOTSIFT_TEST_GOLDEN; }

std::vector<std::string> address_literals(const std::string& text) {
  static const std::regex v4(R"((?:^|[^0-9.])((?:[0-9]{1,3}\.){3}[0-9]{1,3})(?![0-9.]))");
  static const std::regex v6(R"(([0-9A-Fa-f]{0,4}(?::[0-9A-Fa-f]{0,4}){2,7}))");
  std::vector<std::string> out;
  for (std::sregex_iterator it(text.begin(), text.end(), v4), end; it != end; ++it) out.push_back((*it)[1]);
  for (std::sregex_iterator it(text.begin(), text.end(), v6), end; it != end; ++it) {
    const std::string m = (*it)[1];
    if (m.find("::") != std::string::npos || std::count(m.begin(), m.end(), ':') >= 7) out.push_back(m);
  }
  return out;
}

}  // namespace botsift::testing
