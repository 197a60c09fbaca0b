#include "corpus.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "botsift/ip_anon.hpp"
#include "rng.hpp"

namespace botsift::testing {

using namespace std::chrono;

Day corpus_reference_date() { return Day{year{2025} / October / 11}; }

const std::vector<PoolUa>& human_fresh_uas() {
  static const std::vector<PoolUa> pool = {
      {"Mozilla/5.0 (Windows NT 10.0; Win64; x64) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/141.0.0.0 "
       "Safari/537.36",
       false, "chrome 141 windows"},
      {"Mozilla/5.0 (Windows NT 10.0; Win64; x64) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/140.0.0.0 "
       "Safari/537.36",
       false, "chrome 140 windows"},
      {"Mozilla/5.0 (Windows NT 10.0; Win64; x64) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/139.0.0.0 "
       "Safari/537.36",
       false, "chrome 139 windows"},
      {"Mozilla/5.0 (Macintosh; Intel Mac OS X 10_15_7) AppleWebKit/537.36 (KHTML, like Gecko) "
       "Chrome/141.0.0.0 Safari/537.36",
       false, "chrome 141 mac"},
      {"Mozilla/5.0 (X11; Linux x86_64) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/140.0.0.0 Safari/537.36",
       false, "chrome 140 linux"},
      {"Mozilla/5.0 (Linux; Android 10; K) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/141.0.0.0 Mobile "
       "Safari/537.36",
       false, "chrome mobile 141"},
      {"Mozilla/5.0 (X11; CrOS x86_64 14541.0.0) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/141.0.0.0 "
       "Safari/537.36",
       false, "chrome 141 chromeos"},
      {"Mozilla/5.0 (Windows NT 10.0; Win64; x64; rv:144.0) Gecko/20100101 Firefox/144.0", false,
       "firefox 144 windows"},
      {"Mozilla/5.0 (Macintosh; Intel Mac OS X 10.15; rv:143.0) Gecko/20100101 Firefox/143.0", false,
       "firefox 143 mac"},
      {"Mozilla/5.0 (X11; Linux x86_64; rv:144.0) Gecko/20100101 Firefox/144.0", false, "firefox 144 linux"},
      {"Mozilla/5.0 (Macintosh; Intel Mac OS X 10_15_7) AppleWebKit/605.1.15 (KHTML, like Gecko) "
       "Version/26.0 Safari/605.1.15",
       false, "safari 26 mac"},
      {"Mozilla/5.0 (iPhone; CPU iPhone OS 18_6 like Mac OS X) AppleWebKit/605.1.15 (KHTML, like Gecko) "
       "Version/26.0 Mobile/15E148 Safari/604.1",
       false, "safari 26 iphone"},
      {"Mozilla/5.0 (Windows NT 10.0; Win64; x64) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/141.0.0.0 "
       "Safari/537.36 Edg/141.0.0.0",
       false, "edge 141"},
  };
  return pool;
}

const std::vector<PoolUa>& human_off_reduction_uas() {
  static const std::vector<PoolUa> pool = {
      {"Mozilla/5.0 (Linux; Android 13; SM-S911B) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/141.0.0.0 "
       "Mobile Safari/537.36",
       true, "chrome mobile with a device model"},
      {"Mozilla/5.0 (Windows NT 6.1; Win64; x64) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/109.0.0.0 "
       "Safari/537.36",
       true, "chrome 109 on windows 7"},
  };
  return pool;
}

const std::vector<PoolUa>& bot_flagged_uas() {
  static const std::vector<PoolUa> pool = {
      {"Apache-CXF/3.5.8", true, "table row"},
      {"facebookexternalhit/1.1 (+http://www.facebook.com/externalhit_uatext.php)", true, "table row"},
      {"Mozilla/5.0 AppleWebKit/537.36 (KHTML, like Gecko; compatible; Amazonbot/0.1; "
       "+https://developer.amazon.com/support/amazonbot) Chrome/119.0.6045.214 Safari/537.36",
       true, "table row"},
      {"Mozilla/5.0 (compatible; bingbot/2.0; +http://www.bing.com/bingbot.htm)", true, "table row"},
      {"Mozilla/5.0 AppleWebKit/537.36 (KHTML, like Gecko; compatible; ClaudeBot/1.0; +claudebot@anthropic.com)",
       true, "table row"},
      {"Mozilla/4.0 (compatible; MSIE 8.0; Windows NT 5.1; Trident/4.0)", true, "table row"},
      {"", true, "table row"},
      {"Mozilla/5.0 (compatible; Googlebot/2.1; +http://www.google.com/bot.html)", true, "good bot"},
      {"Mozilla/5.0 AppleWebKit/537.36 (KHTML, like Gecko); compatible; ChatGPT-User/1.0; "
       "+https://openai.com/bot",
       true, "good bot"},
      {"curl/8.5.0", true, "tool"},
      {"python-requests/2.31.0", true, "tool"},
      {"Mozilla/5.0 (Windows NT 6.1; WOW64; rv:47.0) Gecko/20100101 Firefox/47.0", true, "version spike"},
      {"Mozilla/5.0 (Windows NT 6.1; WOW64) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/39.0.2171.95 "
       "Safari/537.36",
       true, "version spike"},
      {"Mozilla/5.0 (Linux; Android 7.0; SM-G930V) AppleWebKit/537.36 (KHTML, like Gecko) "
       "Chrome/60.0.3112.107 Mobile Safari/537.36",
       true, "version spike"},
      {"Mozilla/5.0 (Linux; U; Android 4.4.2; en-us; GT-I9505) AppleWebKit/534.30 (KHTML, like Gecko) "
       "Version/4.0 Mobile Safari/534.30",
       true, "old android"},
  };
  return pool;
}

const std::vector<PoolUa>& bot_stealthy_uas() {
  static const std::vector<PoolUa> pool = {
      human_fresh_uas()[0],
      human_fresh_uas()[3],
      human_fresh_uas()[7],
      human_fresh_uas()[10],
  };
  return pool;
}

namespace {

struct Client {
  IpAddress ip;
  const PoolUa* ua = nullptr;
  Truth truth = Truth::human;
  bool favicon = false;
};

constexpr std::string_view kPaths[] = {"/", "/course/view.php", "/login/index.php", "/theme/styles.css",
                                       "/lib/javascript.php", "/pluginfile.php/42/intro.png", "/robots.txt",
                                       "/my/"};

IpAddress human_ip(std::size_t i) {
  // A campus /16 plus a v6 block.
  if (i % 10 == 9) {
    std::array<std::uint8_t, 16> b{0x20, 0x01, 0x06, 0x20, 0x00, 0x08};
    b[14] = static_cast<std::uint8_t>(i >> 8);
    b[15] = static_cast<std::uint8_t>(i);
    return IpAddress::v6(b);
  }
  return IpAddress::v4((130U << 24) | (223U << 16) | static_cast<std::uint32_t>(i + 256));
}

IpAddress bot_ip(std::size_t i, Rng& rng) {
  for (;;) {
    const auto x = static_cast<std::uint32_t>(rng.next());
    const std::uint32_t first = x >> 24;
    if (first == 0 || first == 10 || first == 127 || first >= 224 || first == 130) continue;
    (void)i;
    return IpAddress::v4(x);
  }
}

}  // namespace

SyntheticCorpus make_corpus(const CorpusOptions& options) {
  Rng rng(options.seed);
  const Day last = corpus_reference_date();
  const Day first = last - days{10};

  std::vector<Client> humans(options.human_clients);
  for (std::size_t i = 0; i < humans.size(); ++i) {
    humans[i].ip = human_ip(i);
    humans[i].truth = Truth::human;
    humans[i].favicon = true;
    if (rng.chance(options.human_off_reduction)) {
      humans[i].ua = &rng.pick(std::span<const PoolUa>(human_off_reduction_uas()));
    } else {
      humans[i].ua = &rng.pick(std::span<const PoolUa>(human_fresh_uas()));
    }
  }
  std::vector<Client> bots(options.bot_clients);
  std::set<IpAddress> used;
  for (std::size_t i = 0; i < bots.size(); ++i) {
    IpAddress ip;
    do {
      ip = bot_ip(i, rng);
    } while (!used.insert(ip).second);
    bots[i].ip = ip;
    bots[i].truth = Truth::bot;
    bots[i].favicon = rng.chance(options.bot_favicon);
    if (rng.chance(options.bot_stealthy)) {
      bots[i].ua = &rng.pick(std::span<const PoolUa>(bot_stealthy_uas()));
    } else {
      bots[i].ua = &rng.pick(std::span<const PoolUa>(bot_flagged_uas()));
    }
  }

  SyntheticCorpus corpus;
  corpus.first_day = first;
  corpus.last_day = last;
  corpus.requests.reserve(options.requests);
  std::set<std::pair<std::size_t, Day>> favicon_done;

  for (std::size_t n = 0; n < options.requests; ++n) {
    const bool human = rng.chance(options.human_share);
    auto& group = human ? humans : bots;
    const std::size_t index = rng.below(group.size());
    const Client& client = group[index];
    const Day day = first + days{static_cast<int>(rng.below(11))};
    const Instant at = Instant{day} + seconds{static_cast<long long>(rng.below(86400))};

    LogRecord r;
    r.timestamp = at;
    r.client_ip = client.ip;
    r.provenance = Provenance::raw;
    r.method = "GET";
    r.status = 200;
    r.user_agent = client.ua->ua;
    const std::size_t key = (human ? 0 : 1'000'000) + index;
    if (client.favicon && favicon_done.insert({key, day}).second) {
      r.path = "/favicon.ico";
      r.query = std::string(kRotationParameter) + "=" + format_date(day);
    } else if (human && rng.chance(options.human_marker_post)) {
      r.method = "POST";
      r.path = kMarkerPath;
      r.status = rng.chance(0.9) ? 200 : 303;
    } else {
      r.path = std::string(kPaths[rng.below(std::size(kPaths))]);
      if (!human && rng.chance(0.2)) r.status = 404;
    }
    if (rng.chance(0.3)) r.referer = "https://lms.example.org/my/";
    corpus.requests.push_back({std::move(r), client.truth, client.ua->expect_flag});
  }
  std::stable_sort(corpus.requests.begin(), corpus.requests.end(),
                   [](const auto& a, const auto& b) { return a.record.timestamp < b.record.timestamp; });
  return corpus;
}

std::string to_apache_log(const SyntheticCorpus& corpus) {
  std::string out;
  for (const auto& req : corpus.requests) {
    out += format_line(req.record, LogFormat::apache_combined);
    out += '\n';
  }
  return out;
}

std::vector<LabelledRequest> labelled(const SyntheticCorpus& corpus, const std::array<std::uint8_t, 32>& key) {
  MemoizingAnonymizer anonymizer{CryptoPan(AnonKey(key))};
  std::vector<LabelledRequest> out;
  out.reserve(corpus.requests.size());
  for (const auto& req : corpus.requests) {
    out.push_back({anonymize_record(req.record, anonymizer), req.truth,
                   req.truth == Truth::bot ? "honeypot" : "lms-authenticated"});
  }
  return out;
}

ConfusionMatrix expected_confusion(const SyntheticCorpus& corpus) {
  ConfusionMatrix m;
  for (const auto& req : corpus.requests) {
    if (req.truth == Truth::bot) {
      (req.expect_flag ? m.tp : m.fn) += 1;
    } else {
      (req.expect_flag ? m.fp : m.tn) += 1;
    }
  }
  return m;
}

}  // namespace botsift::testing
