#include "rba/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "rba/error.hpp"
#include "rba/tokenizer.hpp"

namespace rba {

namespace {

WordSet read_word_set(std::istream& in, const std::string& which) {
  WordSet words;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t begin = line.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;
    if (line[begin] == '#') continue;
    std::vector<std::string> tokens = tokenize(line);
    if (tokens.size() != 1) {
      throw DataError(which + " lexicon, line " + std::to_string(line_no) +
                      ": entry \"" + line + "\" tokenizes into " +
                      std::to_string(tokens.size()) + " tokens, expected 1");
    }
    words.insert(tokens.front());
  }
  if (words.empty()) throw DataError(which + " lexicon is empty");
  return words;
}

}  // namespace

GenderLexicon load_lexicon(std::istream& female_source, std::istream& male_source) {
  GenderLexicon lexicon;
  lexicon.female_words = read_word_set(female_source, "female");
  lexicon.male_words = read_word_set(male_source, "male");

  std::vector<std::string> overlap;
  for (const auto& word : lexicon.female_words)
    if (lexicon.male_words.count(word)) overlap.push_back(word);
  if (!overlap.empty()) {
    std::sort(overlap.begin(), overlap.end());
    std::string joined;
    for (const auto& word : overlap) {
      if (!joined.empty()) joined += ", ";
      joined += word;
    }
    throw DataError("word in both lexicons: " + joined);
  }
  return lexicon;
}

GenderLexicon load_lexicon_files(const std::string& female_path, const std::string& male_path) {
  std::ifstream female(female_path);
  if (!female) throw DataError("cannot open lexicon file: " + female_path);
  std::ifstream male(male_path);
  if (!male) throw DataError("cannot open lexicon file: " + male_path);
  return load_lexicon(female, male);
}

void write_word_list(std::ostream& out, const WordSet& words) {
  std::vector<std::string> sorted(words.begin(), words.end());
  std::sort(sorted.begin(), sorted.end());
  for (const auto& word : sorted) out << word << '\n';
}

}  // namespace rba
