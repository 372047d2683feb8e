#pragma once

#include <iosfwd>
#include <string>
#include <unordered_set>

namespace rba {

using WordSet = std::unordered_set<std::string>;

// Gender-definitional word sets. Non-empty and disjoint; every entry is
// lowercase and a single token under tokenize(). Immutable after load and
// safe to share across threads.
struct GenderLexicon {
  WordSet female_words;
  WordSet male_words;
};

// One word per line; blank lines and lines starting with '#' are ignored.
// Entries are lowercased before storage; duplicates within one source
// collapse silently. A word present in both sources, a word that does not
// tokenize to exactly one token, or an empty resulting set is an error.
GenderLexicon load_lexicon(std::istream& female_source, std::istream& male_source);
GenderLexicon load_lexicon_files(const std::string& female_path, const std::string& male_path);

// One word per line in lexicographic order; reloadable by load_lexicon.
void write_word_list(std::ostream& out, const WordSet& words);

}  // namespace rba
