#include <gtest/gtest.h>

#include <filesystem>
#include <set>
#include <sstream>

#include "cli/cli.hpp"
#include "fixtures.hpp"
#include "json.hpp"
#include "oracles.hpp"

namespace botsift {
namespace {

namespace fs = std::filesystem;
using testing::read_file;
using testing::TempDir;
using testing::write_file;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  args.insert(args.begin(), "botsift");
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const char* name) { return (testing::fixtures_dir() / name).string(); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override { write_file(dir / "key.hex", testing::key_hex(testing::reference_key())); }

  std::string path(const std::string& name) const { return (dir / name).string(); }

  Outcome ingest(const std::string& input, const std::string& output, unsigned threads = 1) {
    return cli({"ingest", "--input", input, "--output", output, "--key-file", path("key.hex"), "--threads",
                std::to_string(threads)});
  }

  TempDir dir;
};

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(cli({}).code, cli::kUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(cli({"ingest", "--output", path("n.csv")}).code, cli::kUsage);
  EXPECT_EQ(cli({"--help"}).code, cli::kOk);
  EXPECT_EQ(ingest("bogus-format:" + fixture("three_lines.log"), path("n.csv")).code, cli::kUsage);
  EXPECT_EQ(cli({"ingest", "--input", "apache-combined:" + fixture("three_lines.log"), "--output", path("n.csv"),
                 "--key-file", fixture("three_lines.log")})
                .code,
            cli::kUsage);
}

TEST_F(CliTest, MissingFilesAreIoErrors) {
  EXPECT_EQ(ingest("apache-combined:" + path("absent.log"), path("n.csv")).code, cli::kIo);
  EXPECT_EQ(cli({"classify", "--input", path("absent.csv"), "--output", path("v.csv"), "--reference-date",
                 "2025-10-11"})
                .code,
            cli::kIo);
}

TEST_F(CliTest, IngestThreeLines) {
  const auto r = ingest("apache-combined:" + fixture("three_lines.log"), path("n.csv"));
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const std::string csv = read_file(path("n.csv"));
  std::istringstream lines(csv);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) ++count;
  EXPECT_EQ(count, 4);
  EXPECT_EQ(csv.find("203.0.113.5"), std::string::npos);
  EXPECT_EQ(csv.find("198.51.100.7"), std::string::npos);
  EXPECT_EQ(csv.find("2001:db8::7"), std::string::npos);
  EXPECT_NE(csv.find("ClaudeBot"), std::string::npos);
  EXPECT_NE(csv.find("/favicon.ico"), std::string::npos);

  const auto v = cli({"classify", "--input", path("n.csv"), "--output", path("v.csv")});
  ASSERT_EQ(v.code, cli::kOk) << v.err;
  const std::string verdicts = read_file(path("v.csv"));
  EXPECT_NE(verdicts.find("Mozilla/5.0 (compatible; ClaudeBot/1.0; +claudebot@anthropic.com),true,"
                          "regex-bot|list-bot,ClaudeBot"),
            std::string::npos)
      << verdicts;
  EXPECT_NE(verdicts.find("curl/8.5.0,true,non-mozilla-prefix"), std::string::npos) << verdicts;
  EXPECT_NE(verdicts.find("Chrome/141.0.0.0 Safari/537.36\",false,"), std::string::npos) << verdicts;
  EXPECT_NE(v.err.find("2025-10-11"), std::string::npos);
}

TEST_F(CliTest, MalformedLinesAreCountedNotFatal) {
  const auto r = cli({"ingest", "--input", "apache-combined:" + fixture("malformed.log"), "--output", path("n.csv"),
                      "--key-file", path("key.hex"), "--summary", path("s.json")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto summary = nlohmann::json::parse(read_file(path("s.json")));
  EXPECT_EQ(summary["lines"], 6);
  EXPECT_EQ(summary["records"], 2);
  EXPECT_EQ(summary["errors"], 4);
  EXPECT_EQ(summary["error_samples"].size(), 4U);
  EXPECT_EQ(summary["error_samples"][0]["line"], 2);
  for (const auto& literal : testing::address_literals(read_file(path("s.json")) + r.err)) {
    EXPECT_TRUE(literal.rfind("203.0.113.", 0) != 0 && literal != "999.1.2.3") << literal;
  }
}

TEST_F(CliTest, DeterministicAcrossRunsAndThreads) {
  std::string log;
  const std::string base = read_file(fixture("three_lines.log")) + read_file(fixture("malformed.log"));
  for (int i = 0; i < 400; ++i) log += base;
  write_file(dir / "big.log", log);
  ASSERT_EQ(ingest("apache-combined:" + path("big.log"), path("a.csv"), 1).code, cli::kOk);
  ASSERT_EQ(ingest("apache-combined:" + path("big.log"), path("b.csv"), 1).code, cli::kOk);
  ASSERT_EQ(ingest("apache-combined:" + path("big.log"), path("c.csv"), 8).code, cli::kOk);
  const std::string a = read_file(path("a.csv"));
  EXPECT_EQ(a, read_file(path("b.csv")));
  EXPECT_EQ(a, read_file(path("c.csv")));

  for (unsigned t : {1U, 8U}) {
    const auto r = cli({"report", "--input", path("a.csv"), "--output-dir", path("r" + std::to_string(t)),
                        "--threads", std::to_string(t), "--rotation-param", "v"});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
  }
  for (const auto& entry : fs::directory_iterator(dir / "r1")) {
    EXPECT_EQ(read_file(entry.path()), read_file(dir / "r8" / entry.path().filename())) << entry.path();
  }
}

TEST_F(CliTest, StrictModeSkipsReductionRule) {
  const std::string ua =
      "Mozilla/5.0 (Windows NT 6.1; Win64; x64) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/141.0.0.0 "
      "Safari/537.36";
  write_file(dir / "one.log",
             "203.0.113.5 - - [10/Oct/2025:13:55:36 +0000] \"GET / HTTP/1.1\" 200 1 \"-\" \"" + ua + "\"\n");
  ASSERT_EQ(ingest("apache-combined:" + path("one.log"), path("n.csv")).code, cli::kOk);
  ASSERT_EQ(cli({"classify", "--input", path("n.csv"), "--output", path("full.csv"), "--reference-date",
                 "2015-06-01"})
                .code,
            cli::kOk);
  ASSERT_EQ(cli({"classify", "--input", path("n.csv"), "--output", path("strict.csv"), "--mode", "strict",
                 "--reference-date", "2015-06-01"})
                .code,
            cli::kOk);
  EXPECT_NE(read_file(path("full.csv")).find(",true,ua-reduction-violation,"), std::string::npos);
  EXPECT_NE(read_file(path("strict.csv")).find(",false,,"), std::string::npos);
  EXPECT_EQ(cli({"classify", "--input", path("n.csv"), "--output", path("x.csv"), "--mode", "loose"}).code,
            cli::kUsage);
}

TEST_F(CliTest, EvaluateAllTrueExternal) {
  write_file(dir / "labels.csv",
             "timestamp,ip,method,path,query,status,user_agent,referer,truth,source\n"
             "2025-10-10T00:00:00Z,10.0.0.1,GET,/,,200,a,,bot,t\n"
             "2025-10-10T00:00:00Z,10.0.0.2,GET,/,,200,b,,human,t\n");
  write_file(dir / "ext.csv", "key,is_bot\na,true\nb,true\n");
  const auto r = cli({"evaluate", "--labels", path("labels.csv"), "--external-ua", "all=" + path("ext.csv"),
                      "--reference-date", "2025-10-11", "--output-dir", path("eval")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const std::string table = read_file(dir / "eval" / "confusion.csv");
  EXPECT_NE(table.find("all,1,0,1,0,100.0,0.0,100.0,0.0"), std::string::npos) << table;

  write_file(dir / "partial.csv", "key,is_bot\na,true\n");
  const auto missing = cli({"evaluate", "--labels", path("labels.csv"), "--external-ua",
                            "partial=" + path("partial.csv"), "--reference-date", "2025-10-11"});
  EXPECT_EQ(missing.code, cli::kDataIntegrity);
  EXPECT_NE(missing.err.find('b'), std::string::npos);
}

TEST_F(CliTest, EmptyFaviconInput) {
  write_file(dir / "empty.csv", "timestamp,ip,method,path,query,status,user_agent,referer\n");
  const auto r = cli({"favicon", "--input", path("empty.csv"), "--ledger", path("l.csv"), "--series",
                      path("s.csv")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(read_file(path("l.csv")), "day,ip,requests,favicon_seen,marker_post\n");
  EXPECT_EQ(read_file(path("s.csv")), "day,total_ips,favicon_ips,marker_post_ips\n");
  EXPECT_EQ(cli({"report", "--input", path("empty.csv"), "--output-dir", path("r")}).code, cli::kDataIntegrity);
}

TEST_F(CliTest, NoRawAddressInAnyArtifact) {
  write_file(dir / "known.txt", "198.51.100.0/24\n");
  const auto r = cli({"ingest", "--input", "apache-combined:" + fixture("three_lines.log"), "--input",
                      "apache-combined:" + fixture("malformed.log"), "--output", path("n.csv"), "--key-file",
                      path("key.hex"), "--known-bot-ips", path("known.txt"), "--ip-verdicts", path("ipv.csv"),
                      "--summary", path("s.json")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  ASSERT_EQ(cli({"report", "--input", path("n.csv"), "--output-dir", path("rep"), "--marker-path", "/"}).code,
            cli::kOk);
  ASSERT_EQ(cli({"favicon", "--input", path("n.csv"), "--ledger", path("l.csv"), "--series", path("ser.csv")})
                .code,
            cli::kOk);

  std::set<std::string> raw;
  for (const char* name : {"three_lines.log", "malformed.log"}) {
    std::istringstream lines(read_file(fixture(name)));
    std::string first;
    std::string rest;
    while (lines >> first && std::getline(lines, rest)) {
      if (first.find_first_of(".:") != std::string::npos) raw.insert(first);
    }
  }
  ASSERT_GE(raw.size(), 5U);
  std::size_t scanned = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir.path())) {
    if (!entry.is_regular_file() || entry.path().extension() == ".log" || entry.path().filename() == "known.txt") {
      continue;
    }
    ++scanned;
    for (const auto& a : testing::address_literals(read_file(entry.path()))) {
      EXPECT_FALSE(raw.contains(a)) << a << " in " << entry.path();
    }
  }
  EXPECT_GE(scanned, 10U);
  for (const auto& a : testing::address_literals(r.out + r.err)) EXPECT_FALSE(raw.contains(a)) << a;
  EXPECT_NE(read_file(path("ipv.csv")).find(",true"), std::string::npos);
}

}  // namespace
}  // namespace botsift
