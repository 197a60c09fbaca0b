#pragma once

#include <optional>
#include <string>

#include "botsift/ip_address.hpp"
#include "botsift/time.hpp"

namespace botsift {

/// Whether `LogRecord::client_ip` still holds the address seen on the wire.
enum class Provenance : std::uint8_t { raw, anonymized };

/// One normalized HTTP request.
struct LogRecord {
  Instant timestamp{};
  IpAddress client_ip;
  Provenance provenance = Provenance::raw;
  std::string method;
  /// Percent-decoded path, "*", or (for malformed request lines with
  /// method "-") the raw request line.
  std::string path;
  std::string query;
  int status = 0;
  /// Empty when the header was absent or logged as "-".
  std::string user_agent;
  std::optional<std::string> referer;

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

}  // namespace botsift
