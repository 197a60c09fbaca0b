#include <benchmark/benchmark.h>

#include <array>
#include <cstdint>

#include "botsift/ip_anon.hpp"

namespace {

botsift::CryptoPan pan() {
  std::array<std::uint8_t, 32> key{};
  for (std::size_t i = 0; i < key.size(); ++i) key[i] = static_cast<std::uint8_t>(i * 37 + 11);
  return botsift::CryptoPan(botsift::AnonKey(key));
}

void BM_AnonymizeV4(benchmark::State& state) {
  const auto p = pan();
  std::uint32_t a = 0x0A000001;
  for (auto _ : state) {
    benchmark::DoNotOptimize(p.anonymize_v4(a));
    a = a * 1664525U + 1013904223U;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_AnonymizeV4);

void BM_AnonymizeV6(benchmark::State& state) {
  const auto p = pan();
  std::array<std::uint8_t, 16> a{0x20, 0x01, 0x0d, 0xb8};
  for (auto _ : state) {
    benchmark::DoNotOptimize(p.anonymize_v6(a));
    ++a[15];
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_AnonymizeV6);

// Typical logs repeat a small set of clients.
void BM_MemoizedV4(benchmark::State& state) {
  botsift::MemoizingAnonymizer m(pan());
  std::uint32_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.anonymize(botsift::IpAddress::v4(0xC0000200U | (i++ & 0xFF))));
  }
}
BENCHMARK(BM_MemoizedV4);

}  // namespace
