#include <gtest/gtest.h>

#include <sstream>

#include "botsift/detection.hpp"
#include "botsift/error.hpp"
#include "corpus.hpp"
#include "fuzz.hpp"
#include "oracles.hpp"
#include "rng.hpp"

namespace botsift {
namespace {

Day date(const char* text) { return *parse_date(text); }

const DetectionConfig& full() {
  static const DetectionConfig c = DetectionConfig::defaults(date("2025-10-11"), DetectionMode::full);
  return c;
}

const DetectionConfig& strict() {
  static const DetectionConfig c = DetectionConfig::defaults(date("2025-10-11"), DetectionMode::strict);
  return c;
}

ReasonSet reasons(std::string_view ua, const DetectionConfig& c = full()) { return classify(ua, c).reasons; }

using R = Reason;

TEST(Reasons, NamesRoundTripInOrder) {
  ReasonSet all;
  for (Reason r : kAllReasons) {
    EXPECT_EQ(parse_reason(to_string(r)), r);
    all.insert(r);
  }
  EXPECT_EQ(all.to_string(),
            "regex-bot|list-bot|non-mozilla-prefix|deprecated-browser|deprecated-os|ua-reduction-violation");
  EXPECT_EQ(ReasonSet::parse(all.to_string()), all);
  EXPECT_EQ(ReasonSet::parse(""), ReasonSet{});
  EXPECT_THROW(ReasonSet::parse("regex-bot|bogus"), FormatError);
  EXPECT_EQ(all.size(), 6U);
}

TEST(Config, NeedsReferenceDateAndPositiveWindows) {
  DetectionConfig c;
  EXPECT_THROW(c.validate(), ConfigError);
  c.reference_date = date("2025-01-01");
  c.validate();
  c.deprecation_window = std::chrono::days{0};
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(CachedClassifier{c}, ConfigError);
}

TEST(MozillaToken, BoundaryAfterTheVersion) {
  EXPECT_TRUE(has_mozilla5_token("Mozilla/5.0"));
  EXPECT_TRUE(has_mozilla5_token("Mozilla/5.0 (X11)"));
  EXPECT_TRUE(has_mozilla5_token("Mozilla/5.0(X11)"));
  EXPECT_FALSE(has_mozilla5_token("Mozilla/5.01 (X11)"));
  EXPECT_FALSE(has_mozilla5_token("Mozilla/5.0a"));
  EXPECT_FALSE(has_mozilla5_token("mozilla/5.0"));
  EXPECT_FALSE(has_mozilla5_token(" Mozilla/5.0"));
  EXPECT_FALSE(has_mozilla5_token(""));
}

TEST(Classify, QuotedAgents) {
  EXPECT_EQ(reasons("curl/8.5.0"), ReasonSet{R::non_mozilla_prefix});
  EXPECT_EQ(reasons(""), ReasonSet{R::non_mozilla_prefix});
  EXPECT_EQ(reasons("Mozilla/5.0 (compatible; Googlebot/2.1; +http://www.google.com/bot.html)"),
            ReasonSet{R::regex_bot});
  const Verdict chatgpt = classify(
      "Mozilla/5.0 AppleWebKit/537.36 (KHTML, like Gecko); compatible; ChatGPT-User/1.0; +https://openai.com/bot",
      full());
  EXPECT_TRUE(chatgpt.reasons.contains(R::list_bot));
  EXPECT_EQ(chatgpt.matched_bot_name, "ChatGPT-User");
  EXPECT_EQ(reasons("Mozilla/4.0 (compatible; MSIE 8.0; Windows NT 5.1; Trident/4.0)"),
            (ReasonSet{R::non_mozilla_prefix, R::deprecated_browser, R::deprecated_os}));
  EXPECT_EQ(reasons("Mozilla/5.0 (Windows NT 6.1; WOW64; rv:47.0) Gecko/20100101 Firefox/47.0"),
            (ReasonSet{R::deprecated_browser, R::deprecated_os}));
  EXPECT_EQ(reasons("Mozilla/5.0 (Macintosh; Intel Mac OS X 10_15_7) AppleWebKit/605.1.15 (KHTML, like Gecko) "
                    "Version/26.3.1 Safari/605.1.15"),
            ReasonSet{});
}

TEST(Classify, ChromeVersionSpikes) {
  EXPECT_EQ(reasons("Mozilla/5.0 (Windows NT 10.0; Win64; x64) AppleWebKit/537.36 (KHTML, like Gecko) "
                    "Chrome/39.0.2171.95 Safari/537.36"),
            ReasonSet{R::deprecated_browser});
  EXPECT_EQ(reasons("Mozilla/5.0 (Linux; Android 7.0; SM-G930V) AppleWebKit/537.36 (KHTML, like Gecko) "
                    "Chrome/60.0.3112.107 Mobile Safari/537.36"),
            (ReasonSet{R::deprecated_browser, R::deprecated_os}));
}

TEST(Classify, FreshBrowsersOnFrozenTokensPass) {
  for (const auto& pool : testing::human_fresh_uas()) {
    EXPECT_EQ(reasons(pool.ua), ReasonSet{}) << pool.note;
  }
}

TEST(Classify, ReductionRule) {
  const std::string detailed =
      "Mozilla/5.0 (Linux; Android 13; SM-S911B) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/141.0.0.0 Mobile "
      "Safari/537.36";
  EXPECT_EQ(reasons(detailed), ReasonSet{R::ua_reduction_violation});
  EXPECT_EQ(reasons(detailed, strict()), ReasonSet{});
  // Before the first reduced release the full platform is expected.
  EXPECT_FALSE(reasons("Mozilla/5.0 (Linux; Android 13; SM-S911B) AppleWebKit/537.36 (KHTML, like Gecko) "
                       "Chrome/109.0.0.0 Mobile Safari/537.36")
                   .contains(R::ua_reduction_violation));
  // Chromium shells on iOS keep the real platform.
  EXPECT_EQ(reasons("Mozilla/5.0 (iPhone; CPU iPhone OS 18_6 like Mac OS X) AppleWebKit/605.1.15 (KHTML, like "
                    "Gecko) CriOS/141.0.7390.41 Mobile/15E148 Safari/604.1"),
            ReasonSet{});
  // Firefox does not take part.
  EXPECT_EQ(reasons("Mozilla/5.0 (Windows NT 10.0; rv:144.0) Gecko/20100101 Firefox/144.0"), ReasonSet{});
}

TEST(Classify, OsRules) {
  EXPECT_TRUE(reasons("Mozilla/5.0 (Windows NT 6.1; Win64; x64; rv:144.0) Gecko/20100101 Firefox/144.0")
                  .contains(R::deprecated_os));
  EXPECT_TRUE(reasons("Mozilla/4.0 (compatible; MSIE 5.5; Windows 98)").contains(R::deprecated_os));
  // Firefox writes its own frozen macOS version.
  EXPECT_EQ(reasons("Mozilla/5.0 (Macintosh; Intel Mac OS X 10.15; rv:144.0) Gecko/20100101 Firefox/144.0"),
            ReasonSet{});
  EXPECT_TRUE(reasons("Mozilla/5.0 (Macintosh; Intel Mac OS X 10_9_5) AppleWebKit/600.1.17 (KHTML, like Gecko) "
                      "Version/7.1 Safari/537.85.10")
                  .contains(R::deprecated_os));
}

TEST(Classify, WindowMovesTheCutoff) {
  const std::string ua = "Mozilla/5.0 (Windows NT 10.0; Win64; x64; rv:128.0) Gecko/20100101 Firefox/128.0";
  EXPECT_EQ(reasons(ua), ReasonSet{});
  DetectionConfig shorter = full();
  shorter.deprecation_window = std::chrono::days{30};
  EXPECT_EQ(classify(ua, shorter).reasons, ReasonSet{R::deprecated_browser});
}

TEST(Classify, StrictAndFullDifferOnlyByReduction) {
  testing::Rng rng(9);
  for (int i = 0; i < 5000; ++i) {
    const std::string ua = testing::fuzz_user_agent(rng);
    ReasonSet a = classify(ua, full()).reasons;
    a.erase(R::ua_reduction_violation);
    EXPECT_EQ(a, classify(ua, strict()).reasons) << ua;
  }
}

TEST(Classify, StrictModeMatchesThePublishedProcedure) {
  testing::Rng rng(10);
  for (int i = 0; i < 5000; ++i) {
    const std::string ua = testing::fuzz_user_agent(rng);
    EXPECT_EQ(classify(ua, strict()).is_bot, testing::cascade_oracle(ua, strict())) << ua;
  }
}

TEST(Classify, CachedEqualsDirect) {
  CachedClassifier cached(full());
  testing::Rng rng(12);
  for (int i = 0; i < 2000; ++i) {
    const std::string ua = testing::fuzz_user_agent(rng);
    EXPECT_EQ(cached.classify(ua), classify(ua, full()));
    EXPECT_EQ(cached.classify(ua), classify(ua, full()));
  }
}

TEST(Classify, IsBotIffSomeReason) {
  testing::Rng rng(13);
  for (int i = 0; i < 2000; ++i) {
    const Verdict v = classify(testing::fuzz_user_agent(rng), full());
    EXPECT_EQ(v.is_bot, !v.reasons.empty());
    EXPECT_EQ(v.matched_bot_name.has_value(), v.reasons.contains(R::list_bot));
  }
}

TEST(Verdicts, CsvRoundTrip) {
  std::vector<Verdict> verdicts;
  for (const char* ua : {"curl/8", "", "a,\"b\"", "Mozilla/5.0 (compatible; GPTBot/1.0)"}) {
    verdicts.push_back(classify(ua, full()));
  }
  std::stringstream s;
  write_verdicts(verdicts, s);
  EXPECT_EQ(read_verdicts(s), verdicts);
}

TEST(Verdicts, BadInput) {
  std::istringstream header("ua,bot\n");
  EXPECT_THROW(read_verdicts(header), SchemaMismatch);
  std::istringstream flag(std::string(kVerdictHeader) + "\nx,yes,,\n");
  EXPECT_THROW(read_verdicts(flag), FormatError);
}

}  // namespace
}  // namespace botsift
