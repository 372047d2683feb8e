#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rba/metrics.hpp"

namespace rba {

struct PoolSpec {
  std::size_t depth = 500;       // entries taken from each direction's list
  std::size_t bias_cutoff = 10;  // RaB cutoff used to rank queries
};

struct ModelQueryBias {
  std::string model_tag;
  std::vector<QueryBias> biases;  // query_id order
  std::size_t n_excluded = 0;
};

// Query-level RaB at the pooling cutoff for every (model, query) pair,
// computed over TF magnitudes. Models in tag order.
std::vector<ModelQueryBias> per_query_bias_for_pooling(
    const std::vector<Run>& runs, const MagnitudeTable& table,
    const PoolSpec& spec, MissingPolicy policy = MissingPolicy::strict);

// Per model, sorts queries once ascending by RaB (most female-leaning
// first) and once descending (most male-leaning first), takes the top
// `depth` of each list, and returns the deduplicated union ordered by
// query_id. Ties in either sort break by ascending query_id.
std::vector<std::string> pool_queries(const std::vector<ModelQueryBias>& biases,
                                      const PoolSpec& spec);

enum class QueryCategory : int {
  non_gendered = 0,
  female = 1,
  male = 2,
  other_or_multiple = 3,
};

std::string_view to_string(QueryCategory category);
std::optional<QueryCategory> parse_category(std::string_view s);

struct QueryLabel {
  std::string query_id;
  QueryCategory category = QueryCategory::non_gendered;  // the strict majority
  std::array<std::uint32_t, 4> votes{};                  // indexed by QueryCategory
};

struct LabelAggregation {
  std::vector<QueryLabel> labeled;   // strict majority reached; query_id order
  std::vector<std::string> dropped;  // no strict majority; query_id order
};

// CSV with header query_id,annotator_id,category. Every query must carry
// exactly `annotators_per_query` annotations; a strict majority (more than
// half the votes) labels the query, anything else drops it.
LabelAggregation aggregate_labels(std::istream& annotations,
                                  std::uint32_t annotators_per_query = 3);

// Labeled queries as TSV rows with their vote counts; reloadable.
void write_labels_tsv(std::ostream& out, const std::vector<QueryLabel>& labels);
std::vector<QueryLabel> load_labels_tsv(std::istream& in);

// Restriction of `queries` to the ones labeled non_gendered, preserving the
// original text and order. A label whose query_id is absent from `queries`
// is an error.
std::vector<Document> filter_non_gendered(const std::vector<QueryLabel>& labels,
                                          const std::vector<Document>& queries);

}  // namespace rba
