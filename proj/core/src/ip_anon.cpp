#include "botsift/ip_anon.hpp"

// The low-level AES API is deprecated in OpenSSL 3 but it is the only one
// whose key schedule is a plain value that can be shared across threads.
#define OPENSSL_SUPPRESS_DEPRECATED
#include <openssl/aes.h>

#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "botsift/error.hpp"

namespace botsift {

namespace {

using Block = std::array<std::uint8_t, 16>;

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::optional<std::array<std::uint8_t, 32>> decode_hex(std::string_view hex) {
  if (hex.size() != 64) return std::nullopt;
  std::array<std::uint8_t, 32> out{};
  for (std::size_t i = 0; i < 32; ++i) {
    const int hi = hex_nibble(hex[2 * i]);
    const int lo = hex_nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return out;
}

}  // namespace

AnonKey AnonKey::from_hex(std::string_view hex) {
  auto bytes = decode_hex(hex);
  if (!bytes) throw ConfigError("anonymization key must be exactly 64 hex digits");
  return AnonKey(*bytes);
}

AnonKey AnonKey::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read key file " + path.string());
  const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (content.size() == 32) {
    std::array<std::uint8_t, 32> bytes{};
    std::memcpy(bytes.data(), content.data(), 32);
    return AnonKey(bytes);
  }
  std::string_view text = content;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (auto bytes = decode_hex(text)) return AnonKey(*bytes);
  throw ConfigError("key file " + path.string() + " must hold 32 raw bytes or 64 hex digits (got " +
                    std::to_string(content.size()) + " bytes)");
}

struct CryptoPan::State {
  AES_KEY key;
  Block pad;

  Block encrypt(const Block& in) const {
    Block out;
    AES_encrypt(in.data(), out.data(), &key);
    return out;
  }

  // Bits [0, width) of `address` (MSB first) are anonymized. For bit i the
  // PRF input keeps the first i original bits and takes the rest from the
  // pad; the output's top bit flips address bit i.
  Block anonymize_bits(const Block& address, int width) const {
    Block result = address;
    Block input = pad;
    for (int i = 0; i < width; ++i) {
      const Block out = encrypt(input);
      const auto byte = static_cast<std::size_t>(i >> 3);
      const auto mask = static_cast<std::uint8_t>(0x80U >> (i & 7));
      if (out[0] & 0x80U) result[byte] ^= mask;
      input[byte] = static_cast<std::uint8_t>((input[byte] & ~mask) | (address[byte] & mask));
    }
    return result;
  }
};

CryptoPan::CryptoPan(const AnonKey& key) {
  auto state = std::make_shared<State>();
  if (AES_set_encrypt_key(key.cipher_key().data(), 128, &state->key) != 0) {
    throw ConfigError("AES key schedule failed");
  }
  Block seed;
  std::memcpy(seed.data(), key.pad_seed().data(), 16);
  state->pad = state->encrypt(seed);
  state_ = std::move(state);
}

std::uint32_t CryptoPan::anonymize_v4(std::uint32_t address) const {
  Block in{};
  in[0] = static_cast<std::uint8_t>(address >> 24);
  in[1] = static_cast<std::uint8_t>(address >> 16);
  in[2] = static_cast<std::uint8_t>(address >> 8);
  in[3] = static_cast<std::uint8_t>(address);
  const Block out = state_->anonymize_bits(in, 32);
  return (std::uint32_t{out[0]} << 24) | (std::uint32_t{out[1]} << 16) | (std::uint32_t{out[2]} << 8) |
         std::uint32_t{out[3]};
}

std::array<std::uint8_t, 16> CryptoPan::anonymize_v6(const std::array<std::uint8_t, 16>& address) const {
  return state_->anonymize_bits(address, 128);
}

IpAddress CryptoPan::anonymize(const IpAddress& address) const {
  if (address.is_v4()) return IpAddress::v4(anonymize_v4(address.to_v4()));
  return IpAddress::v6(anonymize_v6(address.bytes()));
}

IpAddress MemoizingAnonymizer::anonymize(const IpAddress& address) {
  auto [it, inserted] = memo_.try_emplace(address);
  if (inserted) it->second = pan_.anonymize(address);
  return it->second;
}

namespace {

void require_raw(const LogRecord& record) {
  if (record.provenance != Provenance::raw) {
    throw PreconditionViolation("record is already anonymized");
  }
}

}  // namespace

LogRecord anonymize_record(LogRecord record, const CryptoPan& pan) {
  require_raw(record);
  record.client_ip = pan.anonymize(record.client_ip);
  record.provenance = Provenance::anonymized;
  return record;
}

LogRecord anonymize_record(LogRecord record, MemoizingAnonymizer& anonymizer) {
  require_raw(record);
  record.client_ip = anonymizer.anonymize(record.client_ip);
  record.provenance = Provenance::anonymized;
  return record;
}

}  // namespace botsift
