#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "botsift/log_ingest.hpp"

namespace {

const std::vector<std::string>& apache_lines() {
  static const std::vector<std::string> lines = [] {
    std::vector<std::string> out;
    for (int i = 0; i < 1024; ++i) {
      out.push_back("203.0.113." + std::to_string(i % 250) + " - - [10/Oct/2025:13:" + std::to_string(10 + i % 50) +
                    ":36 +0200] \"GET /course/view.php?id=" + std::to_string(i) +
                    " HTTP/1.1\" 200 2326 \"https://example.org/\" \"Mozilla/5.0 (Windows NT 10.0; Win64; x64) "
                    "AppleWebKit/537.36 (KHTML, like Gecko) Chrome/141.0.0.0 Safari/537.36\"");
    }
    return out;
  }();
  return lines;
}

void BM_ParseApache(benchmark::State& state) {
  const botsift::LineParser parser(botsift::LogFormat::apache_combined);
  const auto& lines = apache_lines();
  std::size_t i = 0;
  for (auto _ : state) {
    auto result = parser.parse({botsift::LogFormat::apache_combined, i + 1, lines[i % lines.size()]});
    benchmark::DoNotOptimize(result);
    ++i;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_ParseApache);

void BM_ParseCaddy(benchmark::State& state) {
  const botsift::LineParser parser(botsift::LogFormat::caddy_json);
  botsift::LineParser apache(botsift::LogFormat::apache_combined);
  std::vector<std::string> lines;
  for (const auto& l : apache_lines()) {
    const auto parsed = apache.parse({botsift::LogFormat::apache_combined, 1, l});
    lines.push_back(botsift::format_line(std::get<botsift::LogRecord>(parsed), botsift::LogFormat::caddy_json));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    auto result = parser.parse({botsift::LogFormat::caddy_json, i + 1, lines[i % lines.size()]});
    benchmark::DoNotOptimize(result);
    ++i;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_ParseCaddy);

}  // namespace
