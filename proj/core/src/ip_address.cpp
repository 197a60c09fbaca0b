#include "botsift/ip_address.hpp"

#include <arpa/inet.h>

#include <bit>
#include <cstring>

namespace botsift {

IpAddress IpAddress::v4(std::uint32_t host_order) {
  IpAddress ip;
  ip.family_ = Family::v4;
  ip.bytes_[0] = static_cast<std::uint8_t>(host_order >> 24);
  ip.bytes_[1] = static_cast<std::uint8_t>(host_order >> 16);
  ip.bytes_[2] = static_cast<std::uint8_t>(host_order >> 8);
  ip.bytes_[3] = static_cast<std::uint8_t>(host_order);
  return ip;
}

IpAddress IpAddress::v6(const std::array<std::uint8_t, 16>& bytes) {
  IpAddress ip;
  ip.family_ = Family::v6;
  ip.bytes_ = bytes;
  return ip;
}

std::optional<IpAddress> IpAddress::parse(std::string_view text) {
  // inet_pton needs a terminated buffer; longest textual v6 form is 45 chars.
  if (text.empty() || text.size() > 45) return std::nullopt;
  char buf[46];
  std::memcpy(buf, text.data(), text.size());
  buf[text.size()] = '\0';

  if (text.find(':') == std::string_view::npos) {
    in_addr a{};
    if (inet_pton(AF_INET, buf, &a) != 1) return std::nullopt;
    return v4(ntohl(a.s_addr));
  }
  in6_addr a6{};
  if (inet_pton(AF_INET6, buf, &a6) != 1) return std::nullopt;
  std::array<std::uint8_t, 16> bytes{};
  std::memcpy(bytes.data(), &a6, 16);
  return v6(bytes);
}

std::uint32_t IpAddress::to_v4() const noexcept {
  return (std::uint32_t{bytes_[0]} << 24) | (std::uint32_t{bytes_[1]} << 16) |
         (std::uint32_t{bytes_[2]} << 8) | std::uint32_t{bytes_[3]};
}

std::string IpAddress::to_string() const {
  char buf[INET6_ADDRSTRLEN];
  if (is_v4()) {
    in_addr a{};
    a.s_addr = htonl(to_v4());
    inet_ntop(AF_INET, &a, buf, sizeof buf);
  } else {
    in6_addr a6{};
    std::memcpy(&a6, bytes_.data(), 16);
    inet_ntop(AF_INET6, &a6, buf, sizeof buf);
  }
  return buf;
}

int common_prefix_length(const IpAddress& a, const IpAddress& b) noexcept {
  if (a.family() != b.family()) return 0;
  const int width_bytes = a.bit_width() / 8;
  int n = 0;
  for (int i = 0; i < width_bytes; ++i) {
    const auto x = static_cast<std::uint8_t>(a.bytes()[static_cast<std::size_t>(i)] ^
                                             b.bytes()[static_cast<std::size_t>(i)]);
    if (x == 0) {
      n += 8;
      continue;
    }
    return n + std::countl_zero(x);
  }
  return n;
}

}  // namespace botsift
