#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "botsift/detection.hpp"
#include "botsift/favicon.hpp"
#include "botsift/log_record.hpp"

namespace botsift {

// ------------------------------------------------------------ statistics

struct TTestResult {
  double t = 0;
  int degrees_of_freedom = 0;
  double p_value = 1;
  /// Paired convention: mean(diff) / sd(diff).
  double cohens_d = 0;
};

struct PearsonResult {
  double r = 0;
  double p_value = 1;
};

struct StatResult {
  TTestResult t_test;
  PearsonResult pearson;
};

/// Two-sided paired t-test on a - b. Throws PreconditionViolation for
/// different lengths and DegenerateInput for n < 2 or constant differences.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);
/// Sample correlation with a two-sided p-value from the t transform. Throws
/// PreconditionViolation for different lengths and DegenerateInput for
/// n < 3 or a constant series.
PearsonResult pearson(std::span<const double> a, std::span<const double> b);
StatResult compare_series(std::span<const double> a, std::span<const double> b);

/// I_x(a, b) by continued fraction.
double regularized_incomplete_beta(double a, double b, double x);
/// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

// ------------------------------------------------------------ confusion

enum class Truth : std::uint8_t { bot, human };

std::string_view to_string(Truth t) noexcept;
std::optional<Truth> parse_truth(std::string_view text) noexcept;

struct LabelledRequest {
  LogRecord record;
  Truth truth = Truth::human;
  std::string source;

  friend bool operator==(const LabelledRequest&, const LabelledRequest&) = default;
};

/// Normalized columns followed by `truth,source`.
inline constexpr std::string_view kLabelledHeader =
    "timestamp,ip,method,path,query,status,user_agent,referer,truth,source";

void write_labelled(std::span<const LabelledRequest> requests, std::ostream& out);
/// Throws SchemaMismatch / FormatError.
std::vector<LabelledRequest> read_labelled(std::istream& in);

struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fn = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;

  /// Row-normalized percentages: TP/FN over the bot class, FP/TN over the
  /// human class. nullopt when the class is empty.
  std::optional<double> tp_percent() const;
  std::optional<double> fn_percent() const;
  std::optional<double> fp_percent() const;
  std::optional<double> tn_percent() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// How the UA verdict and the favicon ledger combine into one decision.
enum class CombinationPolicy : std::uint8_t {
  ua_only,            // bot iff the UA verdict says so
  ua_or_no_favicon,   // bot iff UA flagged or no favicon that day
  ua_unless_favicon,  // bot iff UA flagged and no favicon that day
};

std::string_view to_string(CombinationPolicy p) noexcept;
std::optional<CombinationPolicy> parse_combination_policy(std::string_view name) noexcept;

/// Generic form: `predict` returns nullopt when it has no verdict for a
/// request; all such requests are reported together through MissingVerdict
/// using `describe` for the key.
ConfusionMatrix confusion(std::span<const LabelledRequest> labelled,
                          const std::function<std::optional<bool>(const LabelledRequest&)>& predict,
                          const std::function<std::string(const LabelledRequest&)>& describe);

/// UA verdicts, optionally combined with the favicon ledger (required for
/// policies other than ua_only).
ConfusionMatrix confusion(const std::unordered_map<std::string, Verdict>& verdicts,
                          std::span<const LabelledRequest> labelled, const FaviconLedger* ledger = nullptr,
                          CombinationPolicy policy = CombinationPolicy::ua_only);

enum class VerdictKey : std::uint8_t { user_agent, ip };

/// Verdicts produced by another tool, keyed by UA string or anonymized IP.
struct ExternalVerdicts {
  VerdictKey key = VerdictKey::user_agent;
  std::unordered_map<std::string, bool> verdicts;
};

ConfusionMatrix confusion(const ExternalVerdicts& external, std::span<const LabelledRequest> labelled);

/// CSV with `key,is_bot` (or a verdict CSV, whose user_agent column is the
/// key). is_bot accepts true/false/1/0. Conflicting duplicates throw
/// FormatError.
std::unordered_map<std::string, bool> import_external_verdicts(std::istream& source);

/// Half-up rounding to `decimals` places, rendered with that many digits.
std::string format_percent(double value, int decimals = 1);

// ------------------------------------------------------------- UA tables

/// Requests per raw UA string.
using UaCounts = std::map<std::string, std::uint64_t, std::less<>>;

UaCounts count_user_agents(std::span<const LogRecord> records);

struct TopUaRow {
  std::string browser;
  std::string os;
  /// Raw UA; empty for the "Other" row.
  std::string user_agent;
  std::uint64_t requests = 0;
  double percent = 0;
  bool is_other = false;
};

/// The n most requested UAs (ties by UA string) plus an "Other" row for the
/// rest when anything remains. Throws PreconditionViolation for n == 0.
std::vector<TopUaRow> top_user_agents(const UaCounts& counts, std::size_t n);
std::vector<TopUaRow> top_user_agents(std::span<const LogRecord> records, std::size_t n);

enum class HistogramFamily : std::uint8_t {
  chrome_merged,
  chrome,
  chrome_mobile,
  firefox,
  safari,
  edge,
  msie,
  android,
  ios,
};

enum class Weighting : std::uint8_t { unique_uas, requests };

/// Claimed major version -> count, ascending by version.
std::vector<std::pair<int, std::uint64_t>> version_histogram(const UaCounts& counts, HistogramFamily family,
                                                             Weighting weighting);
std::vector<std::pair<int, std::uint64_t>> version_histogram(std::span<const LogRecord> records,
                                                             HistogramFamily family, Weighting weighting);

// -------------------------------------------------------------- overlap

struct OverlapRow {
  /// One flag per source, in source order.
  std::vector<bool> membership;
  std::uint64_t count = 0;
};

struct OverlapTable {
  std::vector<std::string> sources;
  /// Non-empty combinations only, by descending count then membership.
  std::vector<OverlapRow> rows;
  std::vector<std::uint64_t> set_sizes;
};

using MembershipSource = std::pair<std::string, std::set<std::string>>;

/// UpSet-style intersection counts over UA strings. With `weights`, every UA
/// counts its request total instead of 1 (UAs missing from `weights` count
/// 0). Throws PreconditionViolation for duplicate source names.
OverlapTable reason_overlap(const std::vector<MembershipSource>& sources, const UaCounts* weights = nullptr);

/// One source per reason, named after it, holding the flagged UAs.
std::vector<MembershipSource> reason_sources(std::span<const Verdict> verdicts);

/// Columns: one 0/1 column per source, then count.
void write_overlap_csv(const OverlapTable& table, std::ostream& out);

}  // namespace botsift
