#include "rba/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "rba/error.hpp"

namespace rba {

std::string_view to_string(BiasMetric metric) {
  return metric == BiasMetric::rab ? "RaB" : "ARaB";
}

namespace {

std::optional<BiasMetric> parse_metric(std::string_view s) {
  if (s == "RaB") return BiasMetric::rab;
  if (s == "ARaB") return BiasMetric::arab;
  return std::nullopt;
}

std::vector<std::string> query_ids(const Run& run) {
  std::vector<std::string> ids;
  ids.reserve(run.lists.size());
  for (const auto& list : run.lists) ids.push_back(list.query_id);
  return ids;
}

void check_same_query_sets(const std::vector<Run>& runs) {
  const std::vector<std::string> base = query_ids(runs.front());
  for (std::size_t r = 1; r < runs.size(); ++r) {
    std::vector<std::string> other = query_ids(runs[r]);
    if (other == base) continue;
    std::vector<std::string> diff;
    std::set_symmetric_difference(base.begin(), base.end(), other.begin(),
                                  other.end(), std::back_inserter(diff));
    std::string joined;
    for (std::size_t i = 0; i < diff.size() && i < 20; ++i) {
      if (!joined.empty()) joined += ", ";
      joined += diff[i];
    }
    if (diff.size() > 20)
      joined += ", ... (" + std::to_string(diff.size() - 20) + " more)";
    throw DataError("runs \"" + runs.front().model_tag + "\" and \"" +
                    runs[r].model_tag +
                    "\" cover different query sets; symmetric difference: " + joined);
  }
}

std::string format_3f(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3f", value);
  return buf;
}

std::string format_g9(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

std::string_view tf_mode_field(const ReportRow& row) {
  return row.measure == Measure::boolean ? std::string_view("-")
                                         : to_string(row.tf_mode);
}

constexpr std::string_view kCsvHeader =
    "model,measure,tf_mode,metric,cutoff,value,delta_vs_reference,n_queries,n_excluded";

}  // namespace

BiasReport build_report(const std::vector<Run>& runs,
                        const std::vector<MagnitudeTable>& tables,
                        const std::vector<std::size_t>& cutoffs,
                        const std::map<std::string, std::string>& reference_map,
                        MissingPolicy policy) {
  if (runs.empty()) throw DataError("report requires at least one run");
  if (tables.empty()) throw DataError("report requires at least one magnitude table");

  std::unordered_set<std::string> tags;
  for (const Run& run : runs) {
    if (run.model_tag.empty()) throw DataError("run has an empty model tag");
    if (run.model_tag.find(',') != std::string::npos)
      throw DataError("model tag contains a comma: " + run.model_tag);
    if (!tags.insert(run.model_tag).second)
      throw DataError("duplicate model tag across runs: " + run.model_tag);
  }
  for (const auto& [model, reference] : reference_map) {
    if (!tags.count(model))
      throw DataError("reference mapping names unknown model: " + model);
    if (!tags.count(reference))
      throw DataError("reference model not among runs: " + reference);
  }

  std::set<Measure> measures;
  for (const MagnitudeTable& table : tables)
    if (!measures.insert(table.measure()).second)
      throw DataError("two magnitude tables share measure " +
                      std::string(to_string(table.measure())));

  std::vector<std::size_t> sorted_cutoffs = cutoffs;
  std::sort(sorted_cutoffs.begin(), sorted_cutoffs.end());
  sorted_cutoffs.erase(std::unique(sorted_cutoffs.begin(), sorted_cutoffs.end()),
                       sorted_cutoffs.end());
  if (sorted_cutoffs.empty() || sorted_cutoffs.front() == 0)
    throw DataError("cutoffs must be positive");

  check_same_query_sets(runs);

  std::vector<const MagnitudeTable*> ordered_tables;
  for (const MagnitudeTable& table : tables) ordered_tables.push_back(&table);
  std::sort(ordered_tables.begin(), ordered_tables.end(),
            [](const MagnitudeTable* a, const MagnitudeTable* b) {
              return static_cast<int>(a->measure()) < static_cast<int>(b->measure());
            });

  BiasReport report;
  for (const Run& run : runs) {
    for (const MagnitudeTable* table : ordered_tables) {
      JoinedRun joined = join_magnitudes(run, *table, policy);
      for (std::size_t cutoff : sorted_cutoffs) {
        RunBiases biases = per_query_biases(joined, cutoff);
        ModelBias model = model_bias(biases.per_query, run.model_tag,
                                     table->measure(), table->tf_mode(), cutoff);
        ReportRow row;
        row.model_tag = run.model_tag;
        row.measure = table->measure();
        // Boolean rows carry no meaningful tf_mode; keep it canonical.
        row.tf_mode = table->measure() == Measure::boolean ? TfMode::smoothed
                                                           : table->tf_mode();
        row.cutoff = cutoff;
        row.n_queries = model.n_queries;
        row.n_excluded = biases.n_excluded;
        row.metric = BiasMetric::rab;
        row.value = model.rab;
        report.rows.push_back(row);
        row.metric = BiasMetric::arab;
        row.value = model.arab;
        report.rows.push_back(row);
      }
    }
  }

  std::sort(report.rows.begin(), report.rows.end(),
            [](const ReportRow& a, const ReportRow& b) {
              if (a.model_tag != b.model_tag) return a.model_tag < b.model_tag;
              if (a.measure != b.measure)
                return static_cast<int>(a.measure) < static_cast<int>(b.measure);
              if (a.metric != b.metric)
                return static_cast<int>(a.metric) < static_cast<int>(b.metric);
              return a.cutoff < b.cutoff;
            });

  if (!reference_map.empty()) {
    std::map<std::string, double> values;
    for (const ReportRow& row : report.rows) {
      std::string key = row.model_tag + '\t' + std::string(to_string(row.measure)) +
                        '\t' + std::string(to_string(row.metric)) + '\t' +
                        std::to_string(row.cutoff);
      values[key] = row.value;
    }
    for (ReportRow& row : report.rows) {
      auto it = reference_map.find(row.model_tag);
      if (it == reference_map.end()) continue;
      std::string key = it->second + '\t' + std::string(to_string(row.measure)) +
                        '\t' + std::string(to_string(row.metric)) + '\t' +
                        std::to_string(row.cutoff);
      row.delta_vs_reference = row.value - values.at(key);
    }
  }
  return report;
}

std::optional<ReportFormat> parse_report_format(std::string_view s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  if (s == "plotdata") return ReportFormat::plotdata;
  return std::nullopt;
}

namespace {

void emit_csv(const BiasReport& report, std::ostream& out) {
  out << "# retrieval gender bias report; positive value = male-leaning; "
         "delta_vs_reference = value(model) - value(reference)\n";
  out << kCsvHeader << '\n';
  for (const ReportRow& row : report.rows) {
    out << row.model_tag << ',' << to_string(row.measure) << ','
        << tf_mode_field(row) << ',' << to_string(row.metric) << ',' << row.cutoff
        << ',' << format_3f(row.value) << ',';
    if (row.delta_vs_reference) out << format_3f(*row.delta_vs_reference);
    out << ',' << row.n_queries << ',' << row.n_excluded << '\n';
  }
}

void emit_json(const BiasReport& report, std::ostream& out) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ReportRow& row : report.rows) {
    nlohmann::json item;
    item["model"] = row.model_tag;
    item["measure"] = to_string(row.measure);
    item["tf_mode"] = tf_mode_field(row);
    item["metric"] = to_string(row.metric);
    item["cutoff"] = row.cutoff;
    item["value"] = row.value;
    if (row.delta_vs_reference)
      item["delta_vs_reference"] = *row.delta_vs_reference;
    else
      item["delta_vs_reference"] = nullptr;
    item["n_queries"] = row.n_queries;
    item["n_excluded"] = row.n_excluded;
    rows.push_back(std::move(item));
  }
  out << rows.dump(2) << '\n';
}

void emit_plotdata(const BiasReport& report, std::ostream& out) {
  out << "# rba plotdata; positive value = male-leaning\n";
  // One panel per (measure, metric, cutoff), models as rows.
  std::vector<std::tuple<Measure, BiasMetric, std::size_t>> panels;
  for (const ReportRow& row : report.rows)
    panels.emplace_back(row.measure, row.metric, row.cutoff);
  std::sort(panels.begin(), panels.end());
  panels.erase(std::unique(panels.begin(), panels.end()), panels.end());

  bool first = true;
  for (const auto& [measure, metric, cutoff] : panels) {
    if (!first) out << '\n';
    first = false;
    out << "# panel measure=" << to_string(measure) << " metric=" << to_string(metric)
        << " cutoff=" << cutoff << '\n';
    out << "# model value delta_vs_reference\n";
    for (const ReportRow& row : report.rows) {
      if (row.measure != measure || row.metric != metric || row.cutoff != cutoff)
        continue;
      out << row.model_tag << ' ' << format_g9(row.value) << ' ';
      if (row.delta_vs_reference)
        out << format_g9(*row.delta_vs_reference);
      else
        out << '-';
      out << '\n';
    }
  }
}

double parse_double_or_throw(std::string_view field, const std::string& context) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw DataError(context + ": bad number \"" + std::string(field) + "\"");
  return value;
}

std::size_t parse_size_or_throw(std::string_view field, const std::string& context) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw DataError(context + ": bad integer \"" + std::string(field) + "\"");
  return value;
}

}  // namespace

void emit(const BiasReport& report, ReportFormat format, std::ostream& out) {
  switch (format) {
    case ReportFormat::csv: emit_csv(report, out); return;
    case ReportFormat::json: emit_json(report, out); return;
    case ReportFormat::plotdata: emit_plotdata(report, out); return;
  }
  throw DataError("unknown report format");
}

BiasReport parse_report_csv(std::istream& in) {
  BiasReport report;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kCsvHeader)
        throw DataError("report csv line " + std::to_string(line_no) +
                        ": unexpected header");
      header_seen = true;
      continue;
    }
    const std::string context = "report csv line " + std::to_string(line_no);
    std::vector<std::string_view> fields;
    {
      std::string_view view = line;
      std::size_t begin = 0;
      while (true) {
        std::size_t end = view.find(',', begin);
        if (end == std::string_view::npos) {
          fields.push_back(view.substr(begin));
          break;
        }
        fields.push_back(view.substr(begin, end - begin));
        begin = end + 1;
      }
    }
    if (fields.size() != 9)
      throw DataError(context + ": expected 9 fields, got " +
                      std::to_string(fields.size()));
    ReportRow row;
    row.model_tag = std::string(fields[0]);
    auto measure = parse_measure(fields[1]);
    if (!measure) throw DataError(context + ": unknown measure");
    row.measure = *measure;
    if (fields[2] != "-") {
      auto mode = parse_tf_mode(fields[2]);
      if (!mode) throw DataError(context + ": unknown tf_mode");
      row.tf_mode = *mode;
    }
    auto metric = parse_metric(fields[3]);
    if (!metric) throw DataError(context + ": unknown metric");
    row.metric = *metric;
    row.cutoff = parse_size_or_throw(fields[4], context);
    row.value = parse_double_or_throw(fields[5], context);
    if (!fields[6].empty())
      row.delta_vs_reference = parse_double_or_throw(fields[6], context);
    row.n_queries = parse_size_or_throw(fields[7], context);
    row.n_excluded = parse_size_or_throw(fields[8], context);
    report.rows.push_back(std::move(row));
  }
  if (!header_seen) throw DataError("report csv: missing header row");
  return report;
}

BiasReport parse_report_json(std::istream& in) {
  nlohmann::json rows;
  try {
    in >> rows;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("report json: ") + e.what());
  }
  if (!rows.is_array()) throw DataError("report json: expected an array");
  BiasReport report;
  for (const auto& item : rows) {
    try {
      ReportRow row;
      row.model_tag = item.at("model").get<std::string>();
      auto measure = parse_measure(item.at("measure").get<std::string>());
      if (!measure) throw DataError("report json: unknown measure");
      row.measure = *measure;
      std::string mode = item.at("tf_mode").get<std::string>();
      if (mode != "-") {
        auto tf_mode = parse_tf_mode(mode);
        if (!tf_mode) throw DataError("report json: unknown tf_mode");
        row.tf_mode = *tf_mode;
      }
      auto metric = parse_metric(item.at("metric").get<std::string>());
      if (!metric) throw DataError("report json: unknown metric");
      row.metric = *metric;
      row.cutoff = item.at("cutoff").get<std::size_t>();
      row.value = item.at("value").get<double>();
      if (!item.at("delta_vs_reference").is_null())
        row.delta_vs_reference = item.at("delta_vs_reference").get<double>();
      row.n_queries = item.at("n_queries").get<std::size_t>();
      row.n_excluded = item.at("n_excluded").get<std::size_t>();
      report.rows.push_back(std::move(row));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("report json: ") + e.what());
    }
  }
  return report;
}

Qrels parse_qrels(std::istream& in) {
  Qrels qrels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string_view> fields;
    {
      std::string_view view = line;
      std::size_t i = 0;
      while (i < view.size()) {
        while (i < view.size() && (view[i] == ' ' || view[i] == '\t')) ++i;
        std::size_t begin = i;
        while (i < view.size() && view[i] != ' ' && view[i] != '\t') ++i;
        if (i > begin) fields.push_back(view.substr(begin, i - begin));
      }
    }
    if (fields.empty()) continue;
    if (fields.size() != 4)
      throw DataError("qrels line " + std::to_string(line_no) +
                      ": expected 4 fields (qid 0 docid relevance)");
    double relevance = parse_double_or_throw(
        fields[3], "qrels line " + std::to_string(line_no));
    auto& relevant = qrels[std::string(fields[0])];
    if (relevance > 0) relevant.insert(std::string(fields[2]));
  }
  return qrels;
}

EvalResult mrr_recall(const Run& run, const Qrels& qrels, std::size_t cutoff) {
  EvalResult result;
  double mrr_sum = 0.0;
  double recall_sum = 0.0;
  for (const RankedList& list : run.lists) {
    auto it = qrels.find(list.query_id);
    if (it == qrels.end() || it->second.empty()) {
      ++result.n_uncovered;
      continue;
    }
    const std::set<std::string>& relevant = it->second;
    const std::size_t depth = std::min(cutoff, list.entries.size());
    double reciprocal = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < depth; ++i) {
      if (relevant.count(list.entries[i].doc_id)) {
        if (reciprocal == 0.0) reciprocal = 1.0 / static_cast<double>(i + 1);
        ++hits;
      }
    }
    mrr_sum += reciprocal;
    recall_sum += static_cast<double>(hits) / static_cast<double>(relevant.size());
    ++result.n_queries;
  }
  if (result.n_queries > 0) {
    result.mrr = mrr_sum / static_cast<double>(result.n_queries);
    result.recall = recall_sum / static_cast<double>(result.n_queries);
  }
  return result;
}

}  // namespace rba
