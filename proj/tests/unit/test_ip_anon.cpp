#include <gtest/gtest.h>

#include <unordered_set>

#include "botsift/error.hpp"
#include "botsift/ip_anon.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "rng.hpp"

namespace botsift {
namespace {

IpAddress ip(const char* text) { return *IpAddress::parse(text); }

const CryptoPan& reference_pan() {
  static const CryptoPan pan{AnonKey(testing::reference_key())};
  return pan;
}

struct Vector {
  const char* in;
  const char* out;
};

// Published sample trace for the reference key.
constexpr Vector kReferenceVectors[] = {
    {"128.11.68.132", "135.242.180.132"}, {"129.118.74.4", "134.136.186.123"},
    {"130.132.252.244", "133.68.164.234"}, {"141.223.7.43", "141.167.8.160"},
    {"141.233.145.108", "141.129.237.235"}, {"152.163.171.160", "151.140.56.189"},
    {"156.29.3.236", "147.225.12.42"},     {"165.247.96.84", "162.9.99.234"},
    {"166.107.77.190", "160.132.178.185"}, {"192.102.249.13", "252.138.62.131"},
    {"192.215.32.125", "252.43.47.189"},   {"193.131.98.3", "253.179.99.140"},
    {"202.172.16.232", "245.24.16.236"},   {"208.0.0.0", "227.48.0.113"},
};

TEST(CryptoPan, ReferenceVectors) {
  for (const auto& v : kReferenceVectors) {
    EXPECT_EQ(reference_pan().anonymize(ip(v.in)).to_string(), v.out) << v.in;
  }
}

TEST(CryptoPan, FrozenV4AndV6Values) {
  EXPECT_EQ(reference_pan().anonymize(ip("8.0.0.0")).to_string(), "119.0.15.141");
  EXPECT_EQ(reference_pan().anonymize(ip("10.0.0.5")).to_string(), "117.15.0.4");
  EXPECT_EQ(reference_pan().anonymize(ip("::1")).to_string(), "78ff:f001:9fc0:20df:8380:b1f1:704:ed");
  EXPECT_EQ(reference_pan().anonymize(ip("2001:db8::1")).to_string(), "4401:2bc:603f:d91d:27f:ff8e:e6f1:dc1e");
}

TEST(CryptoPan, AllZeroKey) {
  const CryptoPan pan{AnonKey{}};
  EXPECT_EQ(pan.anonymize(ip("0.0.0.0")).to_string(), "255.159.6.112");
  EXPECT_EQ(pan.anonymize(ip("::")).to_string(), "ff9f:670:2078:1fff:0:2600:c603:f904");
}

TEST(CryptoPan, AgreesWithStraightLineOracle) {
  testing::Rng rng(31337);
  for (int k = 0; k < 4; ++k) {
    std::array<std::uint8_t, 32> key{};
    for (auto& b : key) b = static_cast<std::uint8_t>(rng.below(256));
    const CryptoPan pan{AnonKey(key)};
    const testing::CryptoPanOracle oracle(key);
    for (int i = 0; i < 200; ++i) {
      const auto a = static_cast<std::uint32_t>(rng.next());
      EXPECT_EQ(pan.anonymize_v4(a), oracle.anonymize_v4(a));
      std::array<std::uint8_t, 16> b{};
      for (auto& x : b) x = static_cast<std::uint8_t>(rng.below(256));
      EXPECT_EQ(pan.anonymize_v6(b), oracle.anonymize_v6(b));
    }
  }
}

TEST(CryptoPan, PreservesPrefixesExactly) {
  testing::Rng rng(5);
  for (int i = 0; i < 3000; ++i) {
    const auto a = IpAddress::v4(static_cast<std::uint32_t>(rng.next()));
    auto bits = static_cast<std::uint32_t>(rng.next());
    const int keep = static_cast<int>(rng.below(33));
    const std::uint32_t mask = keep == 0 ? 0 : ~0U << (32 - keep);
    const auto b = IpAddress::v4((a.to_v4() & mask) | (bits & ~mask));
    EXPECT_EQ(common_prefix_length(reference_pan().anonymize(a), reference_pan().anonymize(b)),
              common_prefix_length(a, b));
  }
}

TEST(CryptoPan, FamiliesStaySeparate) {
  EXPECT_TRUE(reference_pan().anonymize(ip("1.2.3.4")).is_v4());
  EXPECT_FALSE(reference_pan().anonymize(ip("::ffff:1.2.3.4")).is_v4());
}

TEST(CryptoPan, MemoMatchesUncached) {
  MemoizingAnonymizer memo(reference_pan());
  testing::Rng rng(8);
  std::vector<IpAddress> seen;
  for (int i = 0; i < 300; ++i) {
    const auto a = IpAddress::v4(static_cast<std::uint32_t>(rng.below(64)));
    EXPECT_EQ(memo.anonymize(a), reference_pan().anonymize(a));
  }
  EXPECT_LE(memo.cache_size(), 64U);
}

TEST(AnonKey, HexParsing) {
  const auto key = AnonKey::from_hex(testing::key_hex(testing::reference_key()));
  EXPECT_EQ(key.bytes(), testing::reference_key());
  EXPECT_THROW(AnonKey::from_hex("abc"), ConfigError);
  EXPECT_THROW(AnonKey::from_hex(std::string(64, 'g')), ConfigError);
}

TEST(AnonKey, FileForms) {
  testing::TempDir dir;
  const auto key = testing::reference_key();
  testing::write_file(dir / "raw.key", std::string(key.begin(), key.end()));
  testing::write_file(dir / "hex.key", "  " + testing::key_hex(key) + "\n");
  testing::write_file(dir / "bad.key", "short");
  EXPECT_EQ(AnonKey::from_file(dir / "raw.key").bytes(), key);
  EXPECT_EQ(AnonKey::from_file(dir / "hex.key").bytes(), key);
  EXPECT_THROW(AnonKey::from_file(dir / "bad.key"), ConfigError);
  EXPECT_THROW(AnonKey::from_file(dir / "missing.key"), IoError);
}

TEST(AnonymizeRecord, MarksProvenanceAndRefusesTwice) {
  LogRecord r;
  r.client_ip = ip("128.11.68.132");
  const LogRecord once = anonymize_record(r, reference_pan());
  EXPECT_EQ(once.provenance, Provenance::anonymized);
  EXPECT_EQ(once.client_ip.to_string(), "135.242.180.132");
  EXPECT_THROW(anonymize_record(once, reference_pan()), PreconditionViolation);
}

TEST(CryptoPan, DifferentKeysDisagree) {
  auto other_key = testing::reference_key();
  other_key[0] ^= 1;
  const CryptoPan other{AnonKey(other_key)};
  int same = 0;
  testing::Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto a = IpAddress::v4(static_cast<std::uint32_t>(rng.next()));
    same += other.anonymize(a) == reference_pan().anonymize(a);
  }
  EXPECT_LT(same, 3);
}

}  // namespace
}  // namespace botsift
