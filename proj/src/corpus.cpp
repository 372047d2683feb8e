#include "rba/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "parallel_scan.hpp"
#include "rba/error.hpp"
#include "rba/tokenizer.hpp"

namespace rba {

std::string_view to_string(Measure measure) {
  return measure == Measure::tf ? "tf" : "boolean";
}

std::string_view to_string(TfMode mode) {
  return mode == TfMode::smoothed ? "smoothed" : "paper_literal";
}

std::optional<Measure> parse_measure(std::string_view s) {
  if (s == "tf") return Measure::tf;
  if (s == "bool" || s == "boolean") return Measure::boolean;
  return std::nullopt;
}

std::optional<TfMode> parse_tf_mode(std::string_view s) {
  if (s == "smoothed") return TfMode::smoothed;
  if (s == "paper_literal") return TfMode::paper_literal;
  return std::nullopt;
}

std::map<std::string, std::uint64_t> count_lexicon_terms(const Document& doc,
                                                         const WordSet& words) {
  std::map<std::string, std::uint64_t> counts;
  for_each_token(doc.text, [&](const std::string& token) {
    if (words.count(token)) ++counts[token];
  });
  return counts;
}

namespace {

double reduce_counts(const std::map<std::string, std::uint64_t>& counts,
                     Measure measure, TfMode tf_mode) {
  if (measure == Measure::boolean) return counts.empty() ? 0.0 : 1.0;
  double sum = 0.0;
  for (const auto& [word, count] : counts) {
    sum += tf_mode == TfMode::smoothed
               ? std::log1p(static_cast<double>(count))
               : std::log(static_cast<double>(count));
  }
  return sum;
}

}  // namespace

GenderMagnitude magnitude(const Document& doc, const GenderLexicon& lexicon,
                          Measure measure, TfMode tf_mode) {
  // Ordered maps keep the summation order canonical.
  std::map<std::string, std::uint64_t> female, male;
  for_each_token(doc.text, [&](const std::string& token) {
    if (lexicon.female_words.count(token))
      ++female[token];
    else if (lexicon.male_words.count(token))
      ++male[token];
  });
  return {reduce_counts(female, measure, tf_mode),
          reduce_counts(male, measure, tf_mode)};
}

namespace {

// Splits an id<TAB>text line; the id must be non-empty and whitespace-free.
Document parse_id_text_line(const std::string& line, const std::string& path,
                            std::size_t line_no) {
  std::size_t tab = line.find('\t');
  if (tab == std::string::npos)
    throw DataError(path + ":" + std::to_string(line_no) +
                    ": expected id<TAB>text");
  Document doc;
  doc.doc_id = line.substr(0, tab);
  doc.text = line.substr(tab + 1);
  if (doc.doc_id.empty())
    throw DataError(path + ":" + std::to_string(line_no) + ": empty id");
  if (doc.doc_id.find_first_of(" \t\r\n\v\f") != std::string::npos)
    throw DataError(path + ":" + std::to_string(line_no) +
                    ": id contains whitespace: \"" + doc.doc_id + "\"");
  return doc;
}

}  // namespace

CollectionReader::CollectionReader(const std::string& path)
    : in_(path), path_(path) {
  if (!in_) throw DataError("cannot open collection file: " + path);
}

bool CollectionReader::next(Document& doc) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    doc = parse_id_text_line(line, path_, line_);
    return true;
  }
  return false;
}

void MagnitudeTable::insert(std::string doc_id, GenderMagnitude mag) {
  auto [it, inserted] = by_doc_.emplace(std::move(doc_id), mag);
  if (!inserted) throw DataError("duplicate doc_id: " + it->first);
}

const GenderMagnitude* MagnitudeTable::find(const std::string& doc_id) const {
  auto it = by_doc_.find(doc_id);
  return it == by_doc_.end() ? nullptr : &it->second;
}

std::vector<std::string> MagnitudeTable::sorted_doc_ids() const {
  std::vector<std::string> ids;
  ids.reserve(by_doc_.size());
  for (const auto& [id, mag] : by_doc_) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

namespace {

std::string format_g9(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

double parse_double_field(std::string_view field, const std::string& context) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw DataError(context + ": bad number \"" + std::string(field) + "\"");
  return value;
}

}  // namespace

void MagnitudeTable::save_tsv(std::ostream& out) const {
  out << "# rba-magnitudes measure=" << to_string(measure_) << " tf_mode="
      << (measure_ == Measure::boolean ? std::string_view("-") : to_string(tf_mode_))
      << '\n';
  for (const auto& id : sorted_doc_ids()) {
    const GenderMagnitude& mag = by_doc_.at(id);
    out << id << '\t' << format_g9(mag.female) << '\t' << format_g9(mag.male)
        << '\n';
  }
}

MagnitudeTable MagnitudeTable::load_tsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw DataError("magnitude table: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  Measure measure;
  TfMode tf_mode = TfMode::smoothed;
  {
    std::size_t mpos = line.find("measure=");
    std::size_t tpos = line.find("tf_mode=");
    if (line.rfind("# rba-magnitudes", 0) != 0 || mpos == std::string::npos ||
        tpos == std::string::npos)
      throw DataError("magnitude table: missing '# rba-magnitudes' header");
    std::string mstr = line.substr(mpos + 8, line.find(' ', mpos) - mpos - 8);
    std::string tstr = line.substr(tpos + 8);
    auto m = parse_measure(mstr);
    if (!m) throw DataError("magnitude table: unknown measure \"" + mstr + "\"");
    measure = *m;
    if (tstr != "-") {
      auto t = parse_tf_mode(tstr);
      if (!t) throw DataError("magnitude table: unknown tf_mode \"" + tstr + "\"");
      tf_mode = *t;
    }
  }

  MagnitudeTable table(measure, tf_mode);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::string context = "magnitude table line " + std::to_string(line_no);
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw DataError(context + ": expected doc_id<TAB>female<TAB>male");
    std::string doc_id = line.substr(0, t1);
    GenderMagnitude mag;
    mag.female = parse_double_field(
        std::string_view(line).substr(t1 + 1, t2 - t1 - 1), context);
    mag.male = parse_double_field(std::string_view(line).substr(t2 + 1), context);
    table.insert(std::move(doc_id), mag);
  }
  return table;
}

MagnitudeTable compute_magnitude_table(const std::string& collection_path,
                                       const GenderLexicon& lexicon,
                                       Measure measure, TfMode tf_mode,
                                       unsigned threads) {
  MagnitudeTable table(measure, tf_mode);
  detail::scan_collection<GenderMagnitude>(
      collection_path, threads,
      [&](const Document& doc) { return magnitude(doc, lexicon, measure, tf_mode); },
      [&](Document&& doc, GenderMagnitude&& mag) {
        table.insert(std::move(doc.doc_id), mag);
      });
  return table;
}

std::vector<Document> read_id_text_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Document doc = parse_id_text_line(line, path, line_no);
    if (!seen.insert(doc.doc_id).second)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": duplicate id: " + doc.doc_id);
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace rba
