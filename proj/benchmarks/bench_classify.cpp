#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "botsift/detection.hpp"

namespace {

const std::vector<std::string> kUserAgents = {
    "Mozilla/5.0 (Windows NT 10.0; Win64; x64) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/141.0.0.0 "
    "Safari/537.36",
    "Mozilla/5.0 (Macintosh; Intel Mac OS X 10_15_7) AppleWebKit/605.1.15 (KHTML, like Gecko) Version/26.3.1 "
    "Safari/605.1.15",
    "Mozilla/5.0 (Windows NT 6.1; Win64; x64; rv:47.0) Gecko/20100101 Firefox/47.0",
    "Mozilla/4.0 (compatible; MSIE 8.0; Windows NT 5.1; Trident/4.0)",
    "Mozilla/5.0 (compatible; Googlebot/2.1; +http://www.google.com/bot.html)",
    "curl/8.5.0",
    "Mozilla/5.0 (Linux; Android 13; SM-S911B) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/141.0.0.0 Mobile "
    "Safari/537.36",
};

botsift::DetectionConfig config() {
  return botsift::DetectionConfig::defaults(botsift::Day{std::chrono::year{2025} / 10 / 11},
                                            botsift::DetectionMode::full);
}

void BM_Classify(benchmark::State& state) {
  const auto c = config();
  std::size_t i = 0;
  for (auto _ : state) {
    auto v = botsift::classify(kUserAgents[i++ % kUserAgents.size()], c);
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_Classify);

void BM_ParseUserAgent(benchmark::State& state) {
  std::size_t i = 0;
  for (auto _ : state) {
    auto p = botsift::parse_user_agent(kUserAgents[i++ % kUserAgents.size()]);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_ParseUserAgent);

void BM_CachedClassify(benchmark::State& state) {
  botsift::CachedClassifier classifier(config());
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& v = classifier.classify(kUserAgents[i++ % kUserAgents.size()]);
    benchmark::DoNotOptimize(&v);
  }
}
BENCHMARK(BM_CachedClassify);

}  // namespace
