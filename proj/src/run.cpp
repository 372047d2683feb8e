#include "rba/run.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "rba/error.hpp"

namespace rba {

const RankedList* Run::find(const std::string& query_id) const {
  auto it = std::lower_bound(
      lists.begin(), lists.end(), query_id,
      [](const RankedList& list, const std::string& qid) { return list.query_id < qid; });
  return it != lists.end() && it->query_id == query_id ? &*it : nullptr;
}

namespace {

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t begin = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > begin) fields.push_back(line.substr(begin, i - begin));
  }
  return fields;
}

}  // namespace

Run parse_trec_run(std::istream& in, RankPolicy policy) {
  std::map<std::string, std::vector<RunEntry>> by_query;
  std::unordered_set<std::string> seen_pairs;
  std::string tag;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = split_whitespace(line);
    if (fields.empty()) continue;
    const std::string context = "run line " + std::to_string(line_no);
    if (fields.size() != 6)
      throw DataError(context + ": expected 6 fields (qid Q0 docid rank score tag), got " +
                      std::to_string(fields.size()));

    RunEntry entry;
    entry.doc_id = std::string(fields[2]);
    std::uint32_t rank = 0;
    {
      auto [ptr, ec] = std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), rank);
      if (ec != std::errc() || ptr != fields[3].data() + fields[3].size() || rank == 0)
        throw DataError(context + ": bad rank \"" + std::string(fields[3]) + "\"");
    }
    entry.rank = rank;
    {
      auto [ptr, ec] = std::from_chars(fields[4].data(), fields[4].data() + fields[4].size(), entry.score);
      if (ec != std::errc() || ptr != fields[4].data() + fields[4].size())
        throw DataError(context + ": bad score \"" + std::string(fields[4]) + "\"");
    }

    std::string qid(fields[0]);
    if (!seen_pairs.insert(qid + '\t' + entry.doc_id).second)
      throw DataError(context + ": duplicate (qid, docid) pair " + qid + "/" + entry.doc_id);

    if (tag.empty())
      tag = std::string(fields[5]);
    else if (tag != fields[5])
      throw DataError(context + ": run tag \"" + std::string(fields[5]) +
                      "\" differs from \"" + tag + "\"");

    by_query[qid].push_back(std::move(entry));
  }

  Run run;
  run.model_tag = tag;
  std::size_t score_inversions = 0;
  for (auto& [qid, entries] : by_query) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const RunEntry& a, const RunEntry& b) { return a.rank < b.rank; });
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].rank != i + 1) {
        if (policy == RankPolicy::strict)
          throw DataError("query " + qid + ": ranks are not contiguous from 1 (found rank " +
                          std::to_string(entries[i].rank) + " at position " +
                          std::to_string(i + 1) + ")");
        entries[i].rank = static_cast<std::uint32_t>(i + 1);
      }
      if (i > 0 && entries[i].score > entries[i - 1].score) ++score_inversions;
    }
    run.lists.push_back(RankedList{qid, std::move(entries)});
  }
  if (score_inversions > 0)
    std::cerr << "warning: " << score_inversions
              << " score inversion(s) against rank order in run \"" << tag << "\"\n";
  return run;
}

Run parse_trec_run_file(const std::string& path, RankPolicy policy) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open run file: " + path);
  return parse_trec_run(in, policy);
}

namespace {

std::string format_shortest(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace

void write_trec_run(std::ostream& out, const Run& run) {
  for (const auto& list : run.lists)
    for (const auto& entry : list.entries)
      out << list.query_id << " Q0 " << entry.doc_id << ' ' << entry.rank << ' '
          << format_shortest(entry.score) << ' ' << run.model_tag << '\n';
}

RankedList truncate(const RankedList& list, std::size_t t) {
  RankedList out;
  out.query_id = list.query_id;
  std::size_t n = std::min(t, list.entries.size());
  out.entries.assign(list.entries.begin(), list.entries.begin() + n);
  return out;
}

JoinedRun join_magnitudes(const Run& run, const MagnitudeTable& table,
                          MissingPolicy policy) {
  JoinedRun joined;
  joined.model_tag = run.model_tag;
  joined.measure = table.measure();
  joined.tf_mode = table.tf_mode();
  for (const auto& list : run.lists) {
    JoinedQuery query;
    query.query_id = list.query_id;
    query.magnitudes.reserve(list.entries.size());
    for (const auto& entry : list.entries) {
      const GenderMagnitude* mag = table.find(entry.doc_id);
      if (mag == nullptr) {
        if (policy == MissingPolicy::strict)
          throw DataError(list.query_id + "/" + entry.doc_id + " not in collection");
        ++joined.dropped_docs;
        continue;
      }
      query.magnitudes.push_back(*mag);
    }
    joined.queries.push_back(std::move(query));
  }
  if (joined.dropped_docs > 0)
    std::cerr << "note: dropped " << joined.dropped_docs
              << " ranked document(s) missing from the magnitude table (run \""
              << run.model_tag << "\")\n";
  return joined;
}

}  // namespace rba
