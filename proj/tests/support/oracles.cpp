#include "oracles.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <regex>
#include <stdexcept>
#include <string>

namespace botsift::testing {

std::array<std::uint8_t, 32> reference_key() {
  return {21,  34,  23,  141, 51,  164, 207, 128, 19,  10,  91,  22, 73, 144, 125, 16,
          216, 152, 143, 131, 121, 121, 101, 39,  98,  87,  76,  45, 42, 132, 34,  2};
}

CryptoPanOracle::CryptoPanOracle(const std::array<std::uint8_t, 32>& key) {
  std::copy_n(key.begin(), 16, key_.begin());
  std::array<std::uint8_t, 16> seed{};
  std::copy_n(key.begin() + 16, 16, seed.begin());
  pad_ = encrypt(seed);
}

std::array<std::uint8_t, 16> CryptoPanOracle::encrypt(const std::array<std::uint8_t, 16>& block) const {
  EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
  if (ctx == nullptr) throw std::runtime_error("EVP_CIPHER_CTX_new");
  std::array<std::uint8_t, 32> out{};
  int len = 0;
  const bool ok = EVP_EncryptInit_ex(ctx, EVP_aes_128_ecb(), nullptr, key_.data(), nullptr) == 1 &&
                  EVP_CIPHER_CTX_set_padding(ctx, 0) == 1 &&
                  EVP_EncryptUpdate(ctx, out.data(), &len, block.data(), 16) == 1 && len == 16;
  EVP_CIPHER_CTX_free(ctx);
  if (!ok) throw std::runtime_error("AES encryption failed");
  std::array<std::uint8_t, 16> result{};
  std::copy_n(out.begin(), 16, result.begin());
  return result;
}

namespace {

bool get_bit(const std::array<std::uint8_t, 16>& bytes, int i) { return (bytes[i / 8] >> (7 - i % 8)) & 1; }

void set_bit(std::array<std::uint8_t, 16>& bytes, int i, bool v) {
  const auto mask = static_cast<std::uint8_t>(1U << (7 - i % 8));
  if (v) {
    bytes[i / 8] |= mask;
  } else {
    bytes[i / 8] &= static_cast<std::uint8_t>(~mask);
  }
}

}  // namespace

std::uint32_t CryptoPanOracle::anonymize_v4(std::uint32_t address) const {
  std::array<std::uint8_t, 16> in{};
  for (int i = 0; i < 4; ++i) in[i] = static_cast<std::uint8_t>(address >> (24 - 8 * i));
  std::uint32_t flips = 0;
  for (int pos = 0; pos < 32; ++pos) {
    std::array<std::uint8_t, 16> block = pad_;
    for (int i = 0; i < pos; ++i) set_bit(block, i, get_bit(in, i));
    const auto out = encrypt(block);
    flips |= static_cast<std::uint32_t>(out[0] >> 7) << (31 - pos);
  }
  return address ^ flips;
}

std::array<std::uint8_t, 16> CryptoPanOracle::anonymize_v6(const std::array<std::uint8_t, 16>& address) const {
  std::array<std::uint8_t, 16> result = address;
  for (int pos = 0; pos < 128; ++pos) {
    std::array<std::uint8_t, 16> block = pad_;
    for (int i = 0; i < pos; ++i) set_bit(block, i, get_bit(address, i));
    const auto out = encrypt(block);
    set_bit(result, pos, get_bit(address, pos) != static_cast<bool>(out[0] >> 7));
  }
  return result;
}

namespace {

long double t_density(long double x, long double df) {
  const long double log_norm =
      std::lgamma((df + 1) / 2) - std::lgamma(df / 2) - 0.5L * std::log(df * 3.14159265358979323846264338327950288L);
  return std::exp(log_norm - (df + 1) / 2 * std::log1p(x * x / df));
}

long double simpson(long double a, long double b, long double fa,
                    long double fm, long double fb) {
  return (b - a) / 6 * (fa + 4 * fm + fb);
}

long double adaptive(const std::function<long double(long double)>& f, long double a, long double b,
                     long double fa, long double fm, long double fb, long double whole, long double tol,
                     int depth) {
  const long double m = (a + b) / 2;
  const long double lm = (a + m) / 2;
  const long double rm = (m + b) / 2;
  const long double flm = f(lm);
  const long double frm = f(rm);
  const long double left = simpson(a, m, fa, flm, fm);
  const long double right = simpson(m, b, fm, frm, fb);
  const long double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15 * tol) return left + right + delta / 15;
  return adaptive(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

long double integrate(const std::function<long double(long double)>& f, long double a, long double b) {
  // Fixed panels first so narrow features are not skipped.
  constexpr int kPanels = 64;
  long double total = 0;
  for (int i = 0; i < kPanels; ++i) {
    const long double lo = a + (b - a) * i / kPanels;
    const long double hi = a + (b - a) * (i + 1) / kPanels;
    const long double flo = f(lo);
    const long double fmid = f((lo + hi) / 2);
    const long double fhi = f(hi);
    total += adaptive(f, lo, hi, flo, fmid, fhi, simpson(lo, hi, flo, fmid, fhi), 1e-16L, 40);
  }
  return total;
}

}  // namespace

long double t_two_sided_p_oracle(long double t, long double df) {
  const long double at = std::fabs(t);
  if (at == 0) return 1;
  // Tail P(T > |t|) with x = |t| / u, u in (0, 1].
  const auto tail = [&](long double u) -> long double {
    if (u <= 0) return 0;
    return t_density(at / u, df) * at / (u * u);
  };
  return std::min<long double>(1, 2 * integrate(tail, 0, 1));
}

TTestOracle paired_t_oracle(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  long double mean = 0;
  for (std::size_t i = 0; i < n; ++i) mean += static_cast<long double>(a[i]) - b[i];
  mean /= n;
  long double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long double dev = (static_cast<long double>(a[i]) - b[i]) - mean;
    ss += dev * dev;
  }
  const long double sd = std::sqrt(ss / (n - 1));
  TTestOracle r;
  r.df = static_cast<long double>(n - 1);
  r.t = mean / (sd / std::sqrt(static_cast<long double>(n)));
  r.p = t_two_sided_p_oracle(r.t, r.df);
  r.d = mean / sd;
  return r;
}

PearsonOracle pearson_oracle(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  long double ma = 0;
  long double mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  long double sab = 0;
  long double saa = 0;
  long double sbb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  PearsonOracle r;
  r.r = sab / std::sqrt(saa * sbb);
  const long double df = static_cast<long double>(n - 2);
  r.p = std::fabs(r.r) >= 1 ? 0 : t_two_sided_p_oracle(r.r * std::sqrt(df / (1 - r.r * r.r)), df);
  return r;
}

namespace {

bool is_bot_by_regex_oracle(std::string_view ua) {
  static const std::regex pattern("bot|crawler|spider|crawling", std::regex::icase | std::regex::ECMAScript);
  return std::regex_search(ua.begin(), ua.end(), pattern);
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_bot_by_list_oracle(std::string_view ua, const BotList& list) {
  const std::string haystack = lower(ua);
  for (const auto& entry : list.entries()) {
    if (haystack.find(lower(entry.match_token)) != std::string::npos) return true;
  }
  return false;
}

// "Mozilla/5.0" as a whole token: "Mozilla/5.01" names another version.
bool starts_with_mozilla5(std::string_view ua) {
  constexpr std::string_view prefix = "Mozilla/5.0";
  if (!ua.starts_with(prefix)) return false;
  return ua.size() == prefix.size() || !std::isalnum(static_cast<unsigned char>(ua[prefix.size()]));
}

}  // namespace

bool cascade_oracle(std::string_view ua, const DetectionConfig& config) {
  if (is_bot_by_regex_oracle(ua) || is_bot_by_list_oracle(ua, config.bot_list)) return true;
  if (!starts_with_mozilla5(ua)) return true;
  if (!has_deprecated_version(parse_user_agent(ua), config).empty()) return true;
  return false;
}

}  // namespace botsift::testing
