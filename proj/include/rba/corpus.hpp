#pragma once

#include <cstdint>
#include <fstream>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rba/lexicon.hpp"

namespace rba {

struct Document {
  std::string doc_id;  // non-empty, no whitespace, unique within a corpus
  std::string text;
};

enum class Measure { tf = 0, boolean = 1 };
enum class TfMode { smoothed = 0, paper_literal = 1 };

std::string_view to_string(Measure measure);
std::string_view to_string(TfMode mode);
std::optional<Measure> parse_measure(std::string_view s);  // "tf" | "bool" | "boolean"
std::optional<TfMode> parse_tf_mode(std::string_view s);

struct GenderMagnitude {
  double female = 0.0;
  double male = 0.0;
};

// Occurrence counts of lexicon words in the document; words that do not
// occur are omitted. Exact token matches only.
std::map<std::string, std::uint64_t> count_lexicon_terms(const Document& doc,
                                                         const WordSet& words);

// Per-gender presence of lexicon words in one document.
//   boolean        1 if any word of that gender occurs, else 0
//   tf smoothed    sum of ln(1 + count) over the gender's words
//   tf paper_literal  sum of ln(count) over words with count > 0
GenderMagnitude magnitude(const Document& doc, const GenderLexicon& lexicon,
                          Measure measure, TfMode tf_mode = TfMode::smoothed);

// Streaming reader for doc_id<TAB>text collections (MS MARCO passage format).
class CollectionReader {
 public:
  explicit CollectionReader(const std::string& path);
  bool next(Document& doc);  // false at end of file; DataError on a malformed line
  std::size_t line_number() const { return line_; }

 private:
  std::ifstream in_;
  std::string path_;
  std::size_t line_ = 0;
};

// Female/male magnitudes for every document of a collection, one measure.
class MagnitudeTable {
 public:
  MagnitudeTable(Measure measure, TfMode tf_mode)
      : measure_(measure), tf_mode_(tf_mode) {}

  Measure measure() const { return measure_; }
  TfMode tf_mode() const { return tf_mode_; }
  std::size_t size() const { return by_doc_.size(); }
  bool empty() const { return by_doc_.empty(); }

  void insert(std::string doc_id, GenderMagnitude mag);  // DataError on duplicate id
  const GenderMagnitude* find(const std::string& doc_id) const;
  std::vector<std::string> sorted_doc_ids() const;

  // TSV doc_id<TAB>female<TAB>male; measure and tf_mode recorded in a header
  // comment line; values with 9 significant digits.
  void save_tsv(std::ostream& out) const;
  static MagnitudeTable load_tsv(std::istream& in);

 private:
  Measure measure_;
  TfMode tf_mode_;
  std::unordered_map<std::string, GenderMagnitude> by_doc_;
};

// Streams the collection with bounded memory; documents are processed on
// `threads` workers (0 = hardware concurrency). The result is identical for
// any thread count.
MagnitudeTable compute_magnitude_table(const std::string& collection_path,
                                       const GenderLexicon& lexicon,
                                       Measure measure, TfMode tf_mode,
                                       unsigned threads = 0);

// Whole-file load of small id<TAB>text files (query sets, fixtures).
std::vector<Document> read_id_text_tsv(const std::string& path);

}  // namespace rba
