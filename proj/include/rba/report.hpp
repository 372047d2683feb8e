#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rba/metrics.hpp"

namespace rba {

enum class BiasMetric { rab = 0, arab = 1 };
std::string_view to_string(BiasMetric metric);

struct ReportRow {
  std::string model_tag;
  Measure measure = Measure::tf;
  TfMode tf_mode = TfMode::smoothed;  // serialized as "-" for boolean rows
  BiasMetric metric = BiasMetric::rab;
  std::size_t cutoff = 0;
  double value = 0.0;  // positive = more male-leaning
  std::optional<double> delta_vs_reference;  // value - reference value
  std::size_t n_queries = 0;
  std::size_t n_excluded = 0;

  bool operator==(const ReportRow&) const = default;
};

struct BiasReport {
  std::vector<ReportRow> rows;  // sorted by (model, measure, metric, cutoff)

  bool operator==(const BiasReport&) const = default;
};

// One row per (model, measure, metric, cutoff). All runs must cover the
// same query set; a mismatch is an error listing the symmetric difference.
// reference_map assigns each model an optional reference whose values are
// subtracted to produce the delta column.
BiasReport build_report(const std::vector<Run>& runs,
                        const std::vector<MagnitudeTable>& tables,
                        const std::vector<std::size_t>& cutoffs,
                        const std::map<std::string, std::string>& reference_map,
                        MissingPolicy policy = MissingPolicy::strict);

enum class ReportFormat { csv, json, plotdata };
std::optional<ReportFormat> parse_report_format(std::string_view s);

// csv: 3-decimal values (Table-style precision); json: full precision;
// plotdata: one columnar block per (measure, metric, cutoff) panel.
void emit(const BiasReport& report, ReportFormat format, std::ostream& out);
BiasReport parse_report_csv(std::istream& in);
BiasReport parse_report_json(std::istream& in);

// qid 0 docid relevance; relevance > 0 marks the document relevant. A qid
// seen only with non-positive relevance keeps an empty entry.
using Qrels = std::map<std::string, std::set<std::string>>;
Qrels parse_qrels(std::istream& in);

struct EvalResult {
  double mrr = 0.0;
  double recall = 0.0;
  std::size_t n_queries = 0;    // evaluated
  std::size_t n_uncovered = 0;  // run queries without relevant documents in qrels
};

// MRR: mean reciprocal rank of the first relevant document within the top
// `cutoff` (0 when none). Recall: mean fraction of the relevant documents
// found in the top `cutoff`. Uncovered queries are excluded and counted.
EvalResult mrr_recall(const Run& run, const Qrels& qrels, std::size_t cutoff = 10);

}  // namespace rba
