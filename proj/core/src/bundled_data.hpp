#pragma once

#include <string_view>

namespace botsift::detail {

std::string_view bundled_release_csv() noexcept;
std::string_view bundled_robots_json() noexcept;

}  // namespace botsift::detail
