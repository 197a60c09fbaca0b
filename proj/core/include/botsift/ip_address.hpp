#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace botsift {

/// An IPv4 or IPv6 address. Bytes are stored in network order; IPv4 uses
/// the first four bytes and leaves the rest zero.
class IpAddress {
 public:
  enum class Family : std::uint8_t { v4, v6 };

  IpAddress() = default;

  static IpAddress v4(std::uint32_t host_order);
  static IpAddress v6(const std::array<std::uint8_t, 16>& bytes);

  /// Accepts dotted quads and RFC 4291 text (including "::ffff:a.b.c.d").
  static std::optional<IpAddress> parse(std::string_view text);

  Family family() const noexcept { return family_; }
  bool is_v4() const noexcept { return family_ == Family::v4; }
  int bit_width() const noexcept { return is_v4() ? 32 : 128; }

  /// Host-order value of an IPv4 address. Undefined for v6.
  std::uint32_t to_v4() const noexcept;
  const std::array<std::uint8_t, 16>& bytes() const noexcept { return bytes_; }

  /// Bit `i` counted from the most significant bit (0 <= i < bit_width()).
  bool bit(int i) const noexcept {
    return (bytes_[static_cast<std::size_t>(i >> 3)] >> (7 - (i & 7))) & 1U;
  }

  std::string to_string() const;

  friend auto operator<=>(const IpAddress&, const IpAddress&) = default;
  friend bool operator==(const IpAddress&, const IpAddress&) = default;

 private:
  Family family_ = Family::v4;
  std::array<std::uint8_t, 16> bytes_{};
};

/// Length of the longest common bit prefix. Addresses of different
/// families share no prefix.
int common_prefix_length(const IpAddress& a, const IpAddress& b) noexcept;

}  // namespace botsift

template <>
struct std::hash<botsift::IpAddress> {
  std::size_t operator()(const botsift::IpAddress& ip) const noexcept {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;
    for (int i = 0; i < 8; ++i) {
      hi = (hi << 8) | ip.bytes()[static_cast<std::size_t>(i)];
      lo = (lo << 8) | ip.bytes()[static_cast<std::size_t>(i + 8)];
    }
    std::uint64_t h = hi * 0x9E3779B97F4A7C15ULL ^ (lo + 0x632BE59BD9B4E019ULL + (hi << 6) + (hi >> 2));
    return static_cast<std::size_t>(h ^ static_cast<std::uint64_t>(ip.family()));
  }
};
