#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace botsift {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's contract (e.g. anonymizing twice,
/// writing un-anonymized records, known-bot lookup on anonymized IPs).
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration detected before any data is processed.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed external input (lists, verdict files). Carries the index of the
/// offending entry when one can be named.
class FormatError : public Error {
 public:
  FormatError(std::string what, std::optional<std::size_t> entry_index = std::nullopt)
      : Error(std::move(what)), entry_index_(entry_index) {}

  std::optional<std::size_t> entry_index() const noexcept { return entry_index_; }

 private:
  std::optional<std::size_t> entry_index_;
};

/// Reference data that parses but breaks an invariant (non-monotone release
/// dates). Names the offending family.
class ValidationError : public Error {
 public:
  ValidationError(std::string what, std::string family)
      : Error(std::move(what)), family_(std::move(family)) {}

  const std::string& family() const noexcept { return family_; }

 private:
  std::string family_;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A CSV header did not match the expected schema.
class SchemaMismatch : public Error {
 public:
  using Error::Error;
};

/// Statistical input with no defined answer (zero variance, too few points).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// Labelled requests whose key has no verdict in the source being evaluated.
class MissingVerdict : public Error {
 public:
  explicit MissingVerdict(std::vector<std::string> keys);

  const std::vector<std::string>& keys() const noexcept { return keys_; }

 private:
  std::vector<std::string> keys_;
};

}  // namespace botsift
