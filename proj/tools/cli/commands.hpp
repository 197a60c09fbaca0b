#pragma once

#include <ostream>
#include <span>
#include <unordered_map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli.hpp"
#include "common.hpp"

namespace botsift::cli {

struct IngestOptions {
  std::vector<std::string> inputs;  // FORMAT:PATH
  std::string output;
  std::string key_file;
  unsigned threads = 1;
  std::size_t haproxy_ua_slot = 0;
  int haproxy_referer_slot = -1;
  std::string haproxy_utc_offset = "+0000";
  std::string known_bot_ips;
  std::string ip_verdicts;
  std::string summary;
};

struct ClassifyOptions {
  std::string input;
  std::string output;
  unsigned threads = 1;
  DetectionOptions detection;
};

struct FaviconCommandOptions {
  std::string input;
  std::string ledger;
  std::string series;
  FaviconOptions favicon;
};

struct EvaluateOptions {
  std::string labels;
  std::string verdicts;
  std::vector<std::string> policies;
  std::vector<std::string> external_ua;
  std::vector<std::string> external_ip;
  std::vector<std::string> bot_names_lists;
  std::string output_dir;
  DetectionOptions detection;
  FaviconOptions favicon;
};

struct ReportOptions {
  std::string input;
  std::string output_dir;
  std::string labels;
  std::vector<std::string> policies;
  std::size_t top = 10;
  unsigned threads = 1;
  DetectionOptions detection;
  FaviconOptions favicon;
};

struct MethodResult {
  std::string method;
  ConfusionMatrix matrix;
};

/// One row per combination policy, named "botsift/<policy>".
std::vector<MethodResult> evaluate_policies(std::span<const LabelledRequest> labelled,
                                            const std::unordered_map<std::string, Verdict>& verdicts,
                                            const FaviconConfig& favicon, const std::vector<std::string>& policies);

/// `method,tp,fn,fp,tn,tp_pct,fn_pct,fp_pct,tn_pct`; percentages are left
/// empty for an empty class.
void write_confusion_csv(std::span<const MethodResult> rows, std::ostream& out);
/// Fixed-width text rendering with row-normalized percentages.
void write_confusion_table(std::span<const MethodResult> rows, std::ostream& out);

void add_ingest(CLI::App& app, IngestOptions& opts);
void add_classify(CLI::App& app, ClassifyOptions& opts);
void add_favicon(CLI::App& app, FaviconCommandOptions& opts);
void add_evaluate(CLI::App& app, EvaluateOptions& opts);
void add_report(CLI::App& app, ReportOptions& opts);

int run_ingest(const IngestOptions& opts, std::ostream& out, std::ostream& err);
int run_classify(const ClassifyOptions& opts, std::ostream& out, std::ostream& err);
int run_favicon(const FaviconCommandOptions& opts, std::ostream& out, std::ostream& err);
int run_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err);
int run_report(const ReportOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace botsift::cli
