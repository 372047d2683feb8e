// rba: retrieval gender bias audit toolkit.
//
// Subcommands: index, search, magnitude, bias, pool, aggregate,
// filter-queries, eval. Diagnostics go to stderr; data goes to the --out
// target (a path, or "-" for stdout). Exit codes: 0 success, 1 usage error,
// 2 data validation error.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rba/bm25.hpp"
#include "rba/corpus.hpp"
#include "rba/error.hpp"
#include "rba/index.hpp"
#include "rba/lexicon.hpp"
#include "rba/metrics.hpp"
#include "rba/pool.hpp"
#include "rba/report.hpp"
#include "rba/run.hpp"

namespace {

constexpr const char* kVersion = "rba 1.0.0";

void require_input(const std::string& path, const std::string& what) {
  std::ifstream probe(path);
  if (!probe) throw rba::DataError(what + " not found or unreadable: " + path);
}

// "-" selects stdout; anything else opens a file for writing.
class Output {
 public:
  explicit Output(const std::string& path) : path_(path) {
    if (path == "-") {
      stream_ = &std::cout;
    } else {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw rba::DataError("cannot write output file: " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& stream() { return *stream_; }
  void finish() {
    stream_->flush();
    if (!*stream_) throw rba::DataError("write failed: " + path_);
  }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> items;
  std::size_t begin = 0;
  while (begin <= s.size()) {
    std::size_t end = s.find(',', begin);
    if (end == std::string_view::npos) end = s.size();
    if (end > begin) items.push_back(s.substr(begin, end - begin));
    begin = end + 1;
  }
  return items;
}

std::vector<std::size_t> parse_cutoff_list(const std::string& s) {
  std::vector<std::size_t> cutoffs;
  for (std::string_view item : split_list(s)) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc() || ptr != item.data() + item.size() || value == 0)
      throw rba::DataError("bad cutoff \"" + std::string(item) +
                           "\": cutoffs must be positive integers");
    cutoffs.push_back(value);
  }
  std::sort(cutoffs.begin(), cutoffs.end());
  cutoffs.erase(std::unique(cutoffs.begin(), cutoffs.end()), cutoffs.end());
  if (cutoffs.empty()) throw rba::DataError("empty cutoff list");
  return cutoffs;
}

rba::MagnitudeTable load_magnitude_file(const std::string& path) {
  require_input(path, "magnitude table");
  std::ifstream in(path);
  return rba::MagnitudeTable::load_tsv(in);
}

struct IndexArgs {
  std::string collection;
  std::string out;
  unsigned threads = 0;
};

void run_index(const IndexArgs& args) {
  require_input(args.collection, "collection");
  rba::Index index = rba::Index::build(args.collection, args.threads);
  index.save(args.out);
  std::cerr << "indexed " << index.doc_count() << " documents, "
            << index.term_count() << " terms, avgdl "
            << index.avg_doc_length() << "\n";
}

struct SearchArgs {
  std::string index_path;
  std::string queries;
  std::string out = "-";
  std::string tag = "bm25";
  std::size_t k = 1000;
  double k1 = 0.6;
  double b = 0.8;
  unsigned threads = 0;
};

void run_search(const SearchArgs& args) {
  if (args.k == 0) throw rba::DataError("--k must be at least 1");
  if (args.k1 < 0) throw rba::DataError("--k1 must be non-negative");
  if (args.b < 0 || args.b > 1) throw rba::DataError("--b must lie in [0, 1]");
  require_input(args.index_path, "index");
  require_input(args.queries, "queries file");

  rba::Index index = rba::Index::load(args.index_path);
  std::vector<rba::Document> queries = rba::read_id_text_tsv(args.queries);
  rba::Bm25Params params{args.k1, args.b};

  std::vector<rba::RankedList> lists(queries.size());
  unsigned n_threads = args.threads != 0 ? args.threads
                                         : std::thread::hardware_concurrency();
  if (n_threads == 0) n_threads = 1;
  n_threads = std::min<std::size_t>(n_threads, std::max<std::size_t>(queries.size(), 1));
  if (n_threads <= 1) {
    rba::Bm25Scorer scorer(index, params);
    for (std::size_t i = 0; i < queries.size(); ++i)
      lists[i] = scorer.search(queries[i].doc_id, queries[i].text, args.k);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned w = 0; w < n_threads; ++w) {
      std::size_t begin = queries.size() * w / n_threads;
      std::size_t end = queries.size() * (w + 1) / n_threads;
      pool.emplace_back([&, begin, end] {
        rba::Bm25Scorer scorer(index, params);
        for (std::size_t i = begin; i < end; ++i)
          lists[i] = scorer.search(queries[i].doc_id, queries[i].text, args.k);
      });
    }
    for (auto& t : pool) t.join();
  }

  rba::Run run;
  run.model_tag = args.tag;
  run.lists = std::move(lists);
  std::sort(run.lists.begin(), run.lists.end(),
            [](const rba::RankedList& a, const rba::RankedList& b) {
              return a.query_id < b.query_id;
            });
  std::size_t empty = 0;
  for (const auto& list : run.lists)
    if (list.entries.empty()) ++empty;
  if (empty > 0)
    std::cerr << "note: " << empty << " quer" << (empty == 1 ? "y" : "ies")
              << " matched no indexed term\n";

  Output out(args.out);
  rba::write_trec_run(out.stream(), run);
  out.finish();
}

struct MagnitudeArgs {
  std::string collection;
  std::string lexicon_female;
  std::string lexicon_male;
  std::string measure = "tf";
  std::string tf_mode = "smoothed";
  std::string out = "-";
  unsigned threads = 0;
};

void run_magnitude(const MagnitudeArgs& args) {
  auto measure = rba::parse_measure(args.measure);
  if (!measure) throw rba::DataError("unknown measure: " + args.measure);
  auto tf_mode = rba::parse_tf_mode(args.tf_mode);
  if (!tf_mode) throw rba::DataError("unknown tf_mode: " + args.tf_mode);
  require_input(args.collection, "collection");
  require_input(args.lexicon_female, "female lexicon");
  require_input(args.lexicon_male, "male lexicon");

  rba::GenderLexicon lexicon =
      rba::load_lexicon_files(args.lexicon_female, args.lexicon_male);
  rba::MagnitudeTable table = rba::compute_magnitude_table(
      args.collection, lexicon, *measure, *tf_mode, args.threads);

  Output out(args.out);
  table.save_tsv(out.stream());
  out.finish();
  std::cerr << "computed " << to_string(*measure) << " magnitudes for "
            << table.size() << " documents\n";
}

struct BiasArgs {
  std::vector<std::string> mags;
  std::vector<std::string> runs;
  std::string cutoffs = "5,10,20,30";
  std::string measures;  // empty = every measure a table was provided for
  std::string tf_mode = "smoothed";
  std::vector<std::string> references;
  std::string format = "csv";
  std::string out = "-";
  std::string per_query;
  bool lenient = false;
  std::string missing = "strict";
};

rba::MissingPolicy parse_missing(const std::string& s) {
  if (s == "strict") return rba::MissingPolicy::strict;
  if (s == "skip") return rba::MissingPolicy::skip;
  throw rba::DataError("unknown --missing policy: " + s);
}

void run_bias(const BiasArgs& args) {
  auto format = rba::parse_report_format(args.format);
  if (!format) throw rba::DataError("unknown report format: " + args.format);
  auto tf_mode = rba::parse_tf_mode(args.tf_mode);
  if (!tf_mode) throw rba::DataError("unknown tf_mode: " + args.tf_mode);
  rba::MissingPolicy missing = parse_missing(args.missing);
  std::vector<std::size_t> cutoffs = parse_cutoff_list(args.cutoffs);
  if (args.mags.empty()) throw rba::DataError("at least one --collection-mags table is required");
  if (args.runs.empty()) throw rba::DataError("at least one --run file is required");

  std::vector<rba::MagnitudeTable> tables;
  for (const std::string& path : args.mags) tables.push_back(load_magnitude_file(path));

  if (!args.measures.empty()) {
    std::vector<rba::Measure> wanted;
    for (std::string_view item : split_list(args.measures)) {
      auto measure = rba::parse_measure(item);
      if (!measure) throw rba::DataError("unknown measure: " + std::string(item));
      wanted.push_back(*measure);
    }
    std::vector<rba::MagnitudeTable> selected;
    for (rba::Measure measure : wanted) {
      auto it = std::find_if(tables.begin(), tables.end(), [&](const rba::MagnitudeTable& t) {
        return t.measure() == measure;
      });
      if (it == tables.end())
        throw rba::DataError("no magnitude table provided for measure " +
                             std::string(to_string(measure)));
      selected.push_back(std::move(*it));
      tables.erase(it);
    }
    tables = std::move(selected);
  }
  for (const rba::MagnitudeTable& table : tables)
    if (table.measure() == rba::Measure::tf && table.tf_mode() != *tf_mode)
      throw rba::DataError(
          "TF magnitude table was built with tf_mode=" +
          std::string(to_string(table.tf_mode())) + " but --tf-mode " +
          args.tf_mode + " was requested");

  std::vector<rba::Run> runs;
  for (const std::string& path : args.runs) {
    require_input(path, "run file");
    runs.push_back(rba::parse_trec_run_file(
        path, args.lenient ? rba::RankPolicy::lenient : rba::RankPolicy::strict));
  }

  std::map<std::string, std::string> reference_map;
  for (const std::string& mapping : args.references) {
    std::size_t eq = mapping.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == mapping.size())
      throw rba::DataError("bad --reference mapping \"" + mapping +
                           "\", expected model=reference");
    reference_map[mapping.substr(0, eq)] = mapping.substr(eq + 1);
  }

  rba::BiasReport report =
      rba::build_report(runs, tables, cutoffs, reference_map, missing);

  if (!args.per_query.empty()) {
    Output per_query(args.per_query);
    for (const rba::Run& run : runs)
      for (const rba::MagnitudeTable& table : tables)
        rba::write_per_query_tsv(per_query.stream(),
                                 rba::join_magnitudes(run, table, missing), cutoffs);
    per_query.finish();
  }

  Output out(args.out);
  rba::emit(report, *format, out.stream());
  out.finish();
}

struct PoolArgs {
  std::string mags;
  std::vector<std::string> runs;
  std::string queries;
  std::size_t depth = 500;
  std::size_t bias_cutoff = 10;
  std::string out = "-";
  bool lenient = false;
  std::string missing = "strict";
};

void run_pool(const PoolArgs& args) {
  if (args.depth == 0) throw rba::DataError("--depth must be at least 1");
  if (args.bias_cutoff == 0) throw rba::DataError("--bias-cutoff must be at least 1");
  rba::MissingPolicy missing = parse_missing(args.missing);
  if (args.runs.empty()) throw rba::DataError("at least one --run file is required");
  require_input(args.queries, "queries file");

  rba::MagnitudeTable table = load_magnitude_file(args.mags);
  std::vector<rba::Run> runs;
  for (const std::string& path : args.runs) {
    require_input(path, "run file");
    runs.push_back(rba::parse_trec_run_file(
        path, args.lenient ? rba::RankPolicy::lenient : rba::RankPolicy::strict));
  }
  std::vector<rba::Document> queries = rba::read_id_text_tsv(args.queries);
  std::map<std::string, const std::string*> text_by_qid;
  for (const rba::Document& query : queries) text_by_qid[query.doc_id] = &query.text;

  rba::PoolSpec spec{args.depth, args.bias_cutoff};
  std::vector<rba::ModelQueryBias> biases =
      rba::per_query_bias_for_pooling(runs, table, spec, missing);
  std::vector<std::string> pooled = rba::pool_queries(biases, spec);

  for (const std::string& qid : pooled)
    if (!text_by_qid.count(qid))
      throw rba::DataError("pooled query " + qid + " not in queries file");

  Output out(args.out);
  for (const std::string& qid : pooled)
    out.stream() << qid << '\t' << *text_by_qid.at(qid) << '\n';
  out.finish();
  std::cerr << "pooled " << pooled.size() << " unique queries from "
            << runs.size() << " run(s)\n";
}

struct AggregateArgs {
  std::string annotations;
  std::uint32_t annotators = 3;
  std::string out_labels = "-";
  std::string out_dropped;
};

void run_aggregate(const AggregateArgs& args) {
  require_input(args.annotations, "annotations file");
  std::ifstream in(args.annotations);
  rba::LabelAggregation agg = rba::aggregate_labels(in, args.annotators);

  Output labels(args.out_labels);
  rba::write_labels_tsv(labels.stream(), agg.labeled);
  labels.finish();
  if (!args.out_dropped.empty()) {
    Output dropped(args.out_dropped);
    for (const std::string& qid : agg.dropped) dropped.stream() << qid << '\n';
    dropped.finish();
  }

  std::array<std::size_t, 4> per_category{};
  for (const rba::QueryLabel& label : agg.labeled)
    ++per_category[static_cast<int>(label.category)];
  std::cerr << "labeled " << agg.labeled.size() << " queries (non_gendered "
            << per_category[0] << ", female " << per_category[1] << ", male "
            << per_category[2] << ", other_or_multiple " << per_category[3]
            << "), dropped " << agg.dropped.size() << "\n";
}

struct FilterArgs {
  std::string labels;
  std::string queries;
  std::string out = "-";
};

void run_filter(const FilterArgs& args) {
  require_input(args.labels, "labels file");
  require_input(args.queries, "queries file");
  std::ifstream in(args.labels);
  std::vector<rba::QueryLabel> labels = rba::load_labels_tsv(in);
  std::vector<rba::Document> queries = rba::read_id_text_tsv(args.queries);
  std::vector<rba::Document> kept = rba::filter_non_gendered(labels, queries);

  Output out(args.out);
  for (const rba::Document& query : kept)
    out.stream() << query.doc_id << '\t' << query.text << '\n';
  out.finish();
  if (kept.empty())
    std::cerr << "note: no queries labeled non_gendered; output is empty\n";
  else
    std::cerr << "kept " << kept.size() << " of " << queries.size()
              << " queries\n";
}

struct EvalArgs {
  std::string run;
  std::string qrels;
  std::size_t cutoff = 10;
  std::string out = "-";
  bool lenient = false;
};

void run_eval(const EvalArgs& args) {
  if (args.cutoff == 0) throw rba::DataError("--cutoff must be at least 1");
  require_input(args.run, "run file");
  require_input(args.qrels, "qrels file");
  rba::Run run = rba::parse_trec_run_file(
      args.run, args.lenient ? rba::RankPolicy::lenient : rba::RankPolicy::strict);
  std::ifstream qrels_in(args.qrels);
  rba::Qrels qrels = rba::parse_qrels(qrels_in);
  rba::EvalResult result = rba::mrr_recall(run, qrels, args.cutoff);

  char buf[40];
  Output out(args.out);
  std::snprintf(buf, sizeof(buf), "%.6f", result.mrr);
  out.stream() << "mrr@" << args.cutoff << '\t' << buf << '\n';
  std::snprintf(buf, sizeof(buf), "%.6f", result.recall);
  out.stream() << "recall@" << args.cutoff << '\t' << buf << '\n';
  out.stream() << "queries\t" << result.n_queries << '\n';
  out.stream() << "uncovered\t" << result.n_uncovered << '\n';
  out.finish();
}

void add_config_option(CLI::App* sub) {
  sub->set_config("--config", "",
                  "flat key=value configuration file; explicit flags take precedence");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"retrieval gender bias audit toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  IndexArgs index_args;
  CLI::App* index_cmd = app.add_subcommand("index", "build a BM25 inverted index from a collection TSV");
  index_cmd->add_option("--collection", index_args.collection, "collection TSV (doc_id<TAB>text)")->required();
  index_cmd->add_option("--out", index_args.out, "index output path")->required();
  index_cmd->add_option("--threads", index_args.threads, "worker threads (0 = all cores)");
  add_config_option(index_cmd);
  index_cmd->callback([&] { run_index(index_args); });

  SearchArgs search_args;
  CLI::App* search_cmd = app.add_subcommand("search", "run BM25 queries against an index, emit a TREC run");
  search_cmd->add_option("--index", search_args.index_path, "index file from `rba index`")->required();
  search_cmd->add_option("--queries", search_args.queries, "queries TSV (qid<TAB>text)")->required();
  search_cmd->add_option("--k", search_args.k, "results per query");
  search_cmd->add_option("--k1", search_args.k1, "BM25 k1");
  search_cmd->add_option("--b", search_args.b, "BM25 b");
  search_cmd->add_option("--tag", search_args.tag, "run tag");
  search_cmd->add_option("--out", search_args.out, "TREC run output ('-' = stdout)");
  search_cmd->add_option("--threads", search_args.threads, "worker threads (0 = all cores)");
  add_config_option(search_cmd);
  search_cmd->callback([&] { run_search(search_args); });

  MagnitudeArgs magnitude_args;
  CLI::App* magnitude_cmd = app.add_subcommand("magnitude", "compute per-document gender magnitudes");
  magnitude_cmd->add_option("--collection", magnitude_args.collection, "collection TSV")->required();
  magnitude_cmd->add_option("--lexicon-female", magnitude_args.lexicon_female, "female word list")->required();
  magnitude_cmd->add_option("--lexicon-male", magnitude_args.lexicon_male, "male word list")->required();
  magnitude_cmd->add_option("--measure", magnitude_args.measure, "tf | boolean");
  magnitude_cmd->add_option("--tf-mode", magnitude_args.tf_mode, "smoothed | paper_literal");
  magnitude_cmd->add_option("--out", magnitude_args.out, "magnitude TSV output ('-' = stdout)");
  magnitude_cmd->add_option("--threads", magnitude_args.threads, "worker threads (0 = all cores)");
  add_config_option(magnitude_cmd);
  magnitude_cmd->callback([&] { run_magnitude(magnitude_args); });

  BiasArgs bias_args;
  CLI::App* bias_cmd = app.add_subcommand("bias", "compute RaB/ARaB bias report over run files");
  bias_cmd->add_option("--collection-mags", bias_args.mags, "magnitude TSV (repeat for several measures)")->required();
  bias_cmd->add_option("--run", bias_args.runs, "TREC run file (repeatable)")->required();
  bias_cmd->add_option("--cutoffs", bias_args.cutoffs, "comma-separated ranking cutoffs");
  bias_cmd->add_option("--measure", bias_args.measures, "comma-separated measures to audit (default: all provided)");
  bias_cmd->add_option("--tf-mode", bias_args.tf_mode, "tf_mode the TF table must carry");
  bias_cmd->add_option("--reference", bias_args.references, "model=reference delta mapping (repeatable)");
  bias_cmd->add_option("--format", bias_args.format, "csv | json | plotdata");
  bias_cmd->add_option("--out", bias_args.out, "report output ('-' = stdout)");
  bias_cmd->add_option("--per-query", bias_args.per_query, "also write per-query bias TSV to this path");
  bias_cmd->add_flag("--lenient", bias_args.lenient, "renumber non-contiguous ranks instead of failing");
  bias_cmd->add_option("--missing", bias_args.missing, "strict | skip: ranked docs absent from the magnitude table");
  add_config_option(bias_cmd);
  bias_cmd->callback([&] { run_bias(bias_args); });

  PoolArgs pool_args;
  CLI::App* pool_cmd = app.add_subcommand("pool", "select annotation candidates by per-query bias pooling");
  pool_cmd->add_option("--collection-mags", pool_args.mags, "TF magnitude TSV")->required();
  pool_cmd->add_option("--run", pool_args.runs, "TREC run file (repeatable)")->required();
  pool_cmd->add_option("--queries", pool_args.queries, "queries TSV (qid<TAB>text)")->required();
  pool_cmd->add_option("--depth", pool_args.depth, "entries taken from each direction's list");
  pool_cmd->add_option("--bias-cutoff", pool_args.bias_cutoff, "RaB cutoff used for ranking queries");
  pool_cmd->add_option("--out", pool_args.out, "pooled queries TSV ('-' = stdout)");
  pool_cmd->add_flag("--lenient", pool_args.lenient, "renumber non-contiguous ranks instead of failing");
  pool_cmd->add_option("--missing", pool_args.missing, "strict | skip");
  add_config_option(pool_cmd);
  pool_cmd->callback([&] { run_pool(pool_args); });

  AggregateArgs aggregate_args;
  CLI::App* aggregate_cmd = app.add_subcommand("aggregate", "majority-vote aggregation of annotation CSVs");
  aggregate_cmd->add_option("--annotations", aggregate_args.annotations, "CSV: query_id,annotator_id,category")->required();
  aggregate_cmd->add_option("--annotators", aggregate_args.annotators, "annotations required per query");
  aggregate_cmd->add_option("--out-labels", aggregate_args.out_labels, "labels TSV output ('-' = stdout)");
  aggregate_cmd->add_option("--out-dropped", aggregate_args.out_dropped, "dropped query ids, one per line");
  add_config_option(aggregate_cmd);
  aggregate_cmd->callback([&] { run_aggregate(aggregate_args); });

  FilterArgs filter_args;
  CLI::App* filter_cmd = app.add_subcommand("filter-queries", "restrict a query file to non-gendered queries");
  filter_cmd->add_option("--labels", filter_args.labels, "labels TSV from `rba aggregate`")->required();
  filter_cmd->add_option("--queries", filter_args.queries, "queries TSV (qid<TAB>text)")->required();
  filter_cmd->add_option("--out", filter_args.out, "filtered queries TSV ('-' = stdout)");
  add_config_option(filter_cmd);
  filter_cmd->callback([&] { run_filter(filter_args); });

  EvalArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand("eval", "MRR and Recall at a cutoff against qrels");
  eval_cmd->add_option("--run", eval_args.run, "TREC run file")->required();
  eval_cmd->add_option("--qrels", eval_args.qrels, "qrels file (qid 0 docid relevance)")->required();
  eval_cmd->add_option("--cutoff", eval_args.cutoff, "evaluation cutoff");
  eval_cmd->add_option("--out", eval_args.out, "output ('-' = stdout)");
  eval_cmd->add_flag("--lenient", eval_args.lenient, "renumber non-contiguous ranks instead of failing");
  add_config_option(eval_cmd);
  eval_cmd->callback([&] { run_eval(eval_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const rba::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
