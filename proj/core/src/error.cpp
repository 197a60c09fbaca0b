#include "botsift/error.hpp"

namespace botsift {

namespace {

std::string describe_missing(const std::vector<std::string>& keys) {
  std::string msg = "no verdict for " + std::to_string(keys.size()) + " key(s)";
  const std::size_t shown = keys.size() < 5 ? keys.size() : 5;
  for (std::size_t i = 0; i < shown; ++i) {
    msg += i == 0 ? ": \"" : ", \"";
    msg += keys[i];
    msg += '"';
  }
  if (shown < keys.size()) msg += ", ...";
  return msg;
}

}  // namespace

MissingVerdict::MissingVerdict(std::vector<std::string> keys)
    : Error(describe_missing(keys)), keys_(std::move(keys)) {}

}  // namespace botsift
