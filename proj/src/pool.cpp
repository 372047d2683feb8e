#include "rba/pool.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "rba/error.hpp"

namespace rba {

std::vector<ModelQueryBias> per_query_bias_for_pooling(
    const std::vector<Run>& runs, const MagnitudeTable& table,
    const PoolSpec& spec, MissingPolicy policy) {
  if (runs.empty()) throw DataError("pooling requires at least one run");
  if (table.measure() != Measure::tf)
    throw DataError("pooling requires a TF magnitude table, got measure=" +
                    std::string(to_string(table.measure())));
  std::vector<ModelQueryBias> out;
  out.reserve(runs.size());
  for (const Run& run : runs) {
    JoinedRun joined = join_magnitudes(run, table, policy);
    RunBiases biases = per_query_biases(joined, spec.bias_cutoff);
    out.push_back(ModelQueryBias{run.model_tag, std::move(biases.per_query),
                                 biases.n_excluded});
  }
  std::sort(out.begin(), out.end(), [](const ModelQueryBias& a, const ModelQueryBias& b) {
    return a.model_tag < b.model_tag;
  });
  return out;
}

std::vector<std::string> pool_queries(const std::vector<ModelQueryBias>& biases,
                                      const PoolSpec& spec) {
  std::set<std::string> pooled;
  std::vector<const QueryBias*> order;
  for (const ModelQueryBias& model : biases) {
    order.clear();
    order.reserve(model.biases.size());
    for (const QueryBias& bias : model.biases) order.push_back(&bias);

    // Female-leaning list: ascending RaB, most negative first.
    std::sort(order.begin(), order.end(), [](const QueryBias* a, const QueryBias* b) {
      if (a->rab != b->rab) return a->rab < b->rab;
      return a->query_id < b->query_id;
    });
    for (std::size_t i = 0; i < std::min(spec.depth, order.size()); ++i)
      pooled.insert(order[i]->query_id);

    // Male-leaning list: descending RaB.
    std::sort(order.begin(), order.end(), [](const QueryBias* a, const QueryBias* b) {
      if (a->rab != b->rab) return a->rab > b->rab;
      return a->query_id < b->query_id;
    });
    for (std::size_t i = 0; i < std::min(spec.depth, order.size()); ++i)
      pooled.insert(order[i]->query_id);
  }
  return {pooled.begin(), pooled.end()};
}

std::string_view to_string(QueryCategory category) {
  switch (category) {
    case QueryCategory::non_gendered: return "non_gendered";
    case QueryCategory::female: return "female";
    case QueryCategory::male: return "male";
    case QueryCategory::other_or_multiple: return "other_or_multiple";
  }
  return "non_gendered";
}

std::optional<QueryCategory> parse_category(std::string_view s) {
  if (s == "non_gendered") return QueryCategory::non_gendered;
  if (s == "female") return QueryCategory::female;
  if (s == "male") return QueryCategory::male;
  if (s == "other_or_multiple") return QueryCategory::other_or_multiple;
  return std::nullopt;
}

namespace {

std::vector<std::string_view> split_char(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t begin = 0;
  while (true) {
    std::size_t end = line.find(sep, begin);
    if (end == std::string_view::npos) {
      fields.push_back(line.substr(begin));
      return fields;
    }
    fields.push_back(line.substr(begin, end - begin));
    begin = end + 1;
  }
}

}  // namespace

LabelAggregation aggregate_labels(std::istream& annotations,
                                  std::uint32_t annotators_per_query) {
  if (annotators_per_query == 0)
    throw DataError("annotator count must be positive");

  std::string line;
  if (!std::getline(annotations, line))
    throw DataError("annotations: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "query_id,annotator_id,category")
    throw DataError("annotations: expected header query_id,annotator_id,category");

  std::map<std::string, std::array<std::uint32_t, 4>> votes;
  std::size_t line_no = 1;
  while (std::getline(annotations, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_char(line, ',');
    if (fields.size() != 3)
      throw DataError("annotations line " + std::to_string(line_no) +
                      ": expected 3 comma-separated fields");
    if (fields[0].empty())
      throw DataError("annotations line " + std::to_string(line_no) + ": empty query_id");
    auto category = parse_category(fields[2]);
    if (!category)
      throw DataError("annotations line " + std::to_string(line_no) +
                      ": unknown category \"" + std::string(fields[2]) + "\"");
    ++votes[std::string(fields[0])][static_cast<int>(*category)];
  }

  LabelAggregation out;
  const std::uint32_t majority = annotators_per_query / 2 + 1;
  for (const auto& [query_id, counts] : votes) {
    std::uint32_t total = 0;
    for (std::uint32_t c : counts) total += c;
    if (total != annotators_per_query)
      throw DataError("query " + query_id + ": expected " +
                      std::to_string(annotators_per_query) + " annotations, got " +
                      std::to_string(total));
    int winner = -1;
    for (int c = 0; c < 4; ++c)
      if (counts[c] >= majority) winner = c;
    if (winner < 0) {
      out.dropped.push_back(query_id);
    } else {
      out.labeled.push_back(
          QueryLabel{query_id, static_cast<QueryCategory>(winner), counts});
    }
  }
  return out;
}

void write_labels_tsv(std::ostream& out, const std::vector<QueryLabel>& labels) {
  out << "# rba-labels\n";
  out << "query_id\tcategory\tvotes_non_gendered\tvotes_female\tvotes_male\tvotes_other_or_multiple\n";
  for (const QueryLabel& label : labels) {
    out << label.query_id << '\t' << to_string(label.category);
    for (std::uint32_t v : label.votes) out << '\t' << v;
    out << '\n';
  }
}

std::vector<QueryLabel> load_labels_tsv(std::istream& in) {
  std::vector<QueryLabel> labels;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen && line.rfind("query_id\t", 0) == 0) {
      header_seen = true;
      continue;
    }
    auto fields = split_char(line, '\t');
    if (fields.size() != 6)
      throw DataError("labels line " + std::to_string(line_no) +
                      ": expected 6 tab-separated fields");
    QueryLabel label;
    label.query_id = std::string(fields[0]);
    auto category = parse_category(fields[1]);
    if (!category)
      throw DataError("labels line " + std::to_string(line_no) +
                      ": unknown category \"" + std::string(fields[1]) + "\"");
    label.category = *category;
    for (int c = 0; c < 4; ++c) {
      try {
        label.votes[c] = static_cast<std::uint32_t>(std::stoul(std::string(fields[2 + c])));
      } catch (const std::exception&) {
        throw DataError("labels line " + std::to_string(line_no) + ": bad vote count");
      }
    }
    labels.push_back(std::move(label));
  }
  return labels;
}

std::vector<Document> filter_non_gendered(const std::vector<QueryLabel>& labels,
                                          const std::vector<Document>& queries) {
  std::unordered_set<std::string> known;
  for (const Document& query : queries) known.insert(query.doc_id);
  std::unordered_set<std::string> keep;
  for (const QueryLabel& label : labels) {
    if (!known.count(label.query_id))
      throw DataError("label references unknown query_id: " + label.query_id);
    if (label.category == QueryCategory::non_gendered) keep.insert(label.query_id);
  }
  std::vector<Document> out;
  for (const Document& query : queries)
    if (keep.count(query.doc_id)) out.push_back(query);
  return out;
}

}  // namespace rba
