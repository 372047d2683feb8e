#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rba/corpus.hpp"

namespace rba {

struct RunEntry {
  std::string doc_id;
  std::uint32_t rank = 0;
  double score = 0.0;
};

struct RankedList {
  std::string query_id;
  std::vector<RunEntry> entries;  // ranks 1..n, contiguous and increasing
};

struct Run {
  std::string model_tag;
  std::vector<RankedList> lists;  // sorted by query_id
  const RankedList* find(const std::string& query_id) const;
};

enum class RankPolicy { strict, lenient };

// Six whitespace-separated fields per line: qid Q0 docid rank score tag.
// The tag must be uniform across the file. Non-contiguous ranks are an
// error in strict mode and renumbered in rank order in lenient mode.
// Score inversions against rank order produce a warning on stderr only.
Run parse_trec_run(std::istream& in, RankPolicy policy = RankPolicy::strict);
Run parse_trec_run_file(const std::string& path, RankPolicy policy = RankPolicy::strict);

// Lists in query_id order, entries in rank order; scores are written with
// shortest round-trip formatting so parse -> write is a fixed point.
void write_trec_run(std::ostream& out, const Run& run);

// First min(t, n) entries, order preserved.
RankedList truncate(const RankedList& list, std::size_t t);

enum class MissingPolicy { strict, skip };

struct JoinedQuery {
  std::string query_id;
  std::vector<GenderMagnitude> magnitudes;  // rank order
};

struct JoinedRun {
  std::string model_tag;
  Measure measure = Measure::tf;
  TfMode tf_mode = TfMode::smoothed;
  std::vector<JoinedQuery> queries;  // sorted by query_id
  std::size_t dropped_docs = 0;      // documents removed under MissingPolicy::skip
};

// Maps every ranked document to its magnitudes. strict: a document missing
// from the table is an error naming qid/docid; skip: missing documents are
// dropped, remaining entries keep their order, and the drop count is logged.
JoinedRun join_magnitudes(const Run& run, const MagnitudeTable& table,
                          MissingPolicy policy = MissingPolicy::strict);

}  // namespace rba
