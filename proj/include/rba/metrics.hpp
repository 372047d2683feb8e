#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rba/run.hpp"

namespace rba {

// Mean magnitude over the top min(t, n) ranks. The list must be non-empty.
double qrab(std::span<const double> magnitudes, std::size_t t);

// Mean of qrab over every cutoff 1..min(t, n), the rank-discounted variant.
double qarab(std::span<const double> magnitudes, std::size_t t);

// Signed per-query bias at one cutoff; positive values lean male.
struct QueryBias {
  std::string query_id;
  std::size_t cutoff = 0;
  double qrab_female = 0.0;
  double qrab_male = 0.0;
  double qarab_female = 0.0;
  double qarab_male = 0.0;
  double rab = 0.0;   // qrab_male - qrab_female
  double arab = 0.0;  // qarab_male - qarab_female
  std::size_t effective_depth = 0;  // min(cutoff, list length), >= 1
};

// DataError on an empty list; exclusion of empty lists is the caller's job.
QueryBias query_bias(const JoinedQuery& query, std::size_t cutoff);

// Unweighted means of the per-query values.
struct ModelBias {
  std::string model_tag;
  Measure measure = Measure::tf;
  TfMode tf_mode = TfMode::smoothed;
  std::size_t cutoff = 0;
  double rab = 0.0;
  double arab = 0.0;
  std::size_t n_queries = 0;
};

ModelBias model_bias(std::span<const QueryBias> biases, const std::string& model_tag,
                     Measure measure, TfMode tf_mode, std::size_t cutoff);

struct RunBiases {
  std::vector<QueryBias> per_query;  // query_id order; empty lists excluded
  std::size_t n_excluded = 0;        // queries with empty ranking lists
};

RunBiases per_query_biases(const JoinedRun& run, std::size_t cutoff);

// Per-query TSV: qid, cutoff, measure, rab, arab, effective_depth; one row
// per (cutoff, query), model and tf_mode recorded in the header comment.
void write_per_query_tsv(std::ostream& out, const JoinedRun& run,
                         const std::vector<std::size_t>& cutoffs);

}  // namespace rba
