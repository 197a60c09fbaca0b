#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>

#include "botsift/ip_address.hpp"
#include "botsift/log_record.hpp"

namespace botsift {

/// Crypto-PAn key: a 16-byte AES-128 key followed by a 16-byte pad seed.
/// The 32-byte concatenation is the serialized form.
class AnonKey {
 public:
  AnonKey() = default;
  explicit AnonKey(const std::array<std::uint8_t, 32>& bytes) : bytes_(bytes) {}

  /// Exactly 64 hex digits. Throws ConfigError otherwise.
  static AnonKey from_hex(std::string_view hex);
  /// Exactly 32 raw bytes, or 64 hex digits (surrounding whitespace
  /// allowed). Throws ConfigError for any other content, IoError if the
  /// file cannot be read.
  static AnonKey from_file(const std::filesystem::path& path);

  std::span<const std::uint8_t, 16> cipher_key() const noexcept {
    return std::span<const std::uint8_t, 16>(bytes_.data(), 16);
  }
  std::span<const std::uint8_t, 16> pad_seed() const noexcept {
    return std::span<const std::uint8_t, 16>(bytes_.data() + 16, 16);
  }
  const std::array<std::uint8_t, 32>& bytes() const noexcept { return bytes_; }

 private:
  std::array<std::uint8_t, 32> bytes_{};
};

/// Prefix-preserving anonymization (Crypto-PAn, AES-128 as the
/// pseudorandom function). IPv6 runs the same bit loop over 128 positions.
///
/// Immutable after construction; copies share the expanded key and may be
/// used from any number of threads.
class CryptoPan {
 public:
  explicit CryptoPan(const AnonKey& key);

  std::uint32_t anonymize_v4(std::uint32_t address) const;
  std::array<std::uint8_t, 16> anonymize_v6(const std::array<std::uint8_t, 16>& address) const;
  IpAddress anonymize(const IpAddress& address) const;

 private:
  struct State;
  std::shared_ptr<const State> state_;
};

/// CryptoPan plus an address -> result memo. Not synchronized; keep one per
/// thread. Results are identical to the uncached anonymizer.
class MemoizingAnonymizer {
 public:
  explicit MemoizingAnonymizer(CryptoPan pan) : pan_(std::move(pan)) {}

  IpAddress anonymize(const IpAddress& address);
  std::size_t cache_size() const noexcept { return memo_.size(); }

 private:
  CryptoPan pan_;
  std::unordered_map<IpAddress, IpAddress> memo_;
};

/// Replaces the client address and marks the record anonymized. Throws
/// PreconditionViolation when the record is already anonymized.
LogRecord anonymize_record(LogRecord record, const CryptoPan& pan);
LogRecord anonymize_record(LogRecord record, MemoizingAnonymizer& anonymizer);

}  // namespace botsift
