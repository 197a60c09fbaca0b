#include <benchmark/benchmark.h>

#include <vector>

#include "botsift/favicon.hpp"

namespace {

std::vector<botsift::LogRecord> records(std::size_t n) {
  std::vector<botsift::LogRecord> out;
  const auto start = botsift::Instant{std::chrono::seconds{1'760'000'000}};
  for (std::size_t i = 0; i < n; ++i) {
    botsift::LogRecord r;
    r.timestamp = start + std::chrono::seconds{static_cast<long long>(i * 7)};
    r.client_ip = botsift::IpAddress::v4(0x14000000U + static_cast<std::uint32_t>(i % 5000));
    r.provenance = botsift::Provenance::anonymized;
    r.method = i % 11 == 0 ? "POST" : "GET";
    r.path = i % 5 == 0 ? "/favicon.ico" : "/course/view.php";
    r.query = "v=" + botsift::format_date(botsift::utc_day(r.timestamp));
    r.status = 200;
    out.push_back(std::move(r));
  }
  return out;
}

void BM_LedgerIngest(benchmark::State& state) {
  const auto recs = records(static_cast<std::size_t>(state.range(0)));
  botsift::FaviconConfig config;
  config.favicon.rotation_parameter = "v";
  config.marker = botsift::MarkerEndpoint{"/course/", "POST", {200}};
  for (auto _ : state) {
    botsift::FaviconLedger ledger(config);
    for (const auto& r : recs) ledger.ingest(r);
    benchmark::DoNotOptimize(ledger.entries().size());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_LedgerIngest)->Arg(10000)->Arg(100000);

}  // namespace
