#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace rba {

struct Posting {
  std::uint32_t doc = 0;  // dense id in collection order
  std::uint32_t tf = 0;   // >= 1
};

// In-memory inverted index over a doc_id<TAB>text collection, tokenized the
// same way as the magnitude scan. Immutable once built; concurrent searches
// are safe.
class Index {
 public:
  // Streams the collection; per-document tokenization runs on `threads`
  // workers (0 = hardware concurrency) with results merged in file order,
  // so the index is identical for any thread count. Errors on duplicate
  // doc_ids and on an empty collection (average length undefined).
  static Index build(const std::string& collection_path, unsigned threads = 0);

  std::size_t doc_count() const { return doc_ids_.size(); }
  double avg_doc_length() const { return avgdl_; }
  const std::string& doc_id(std::uint32_t doc) const { return doc_ids_[doc]; }
  std::uint32_t doc_length(std::uint32_t doc) const { return doc_lengths_[doc]; }
  std::size_t term_count() const { return term_ids_.size(); }

  // nullptr when the term is not indexed.
  const std::vector<Posting>* postings(const std::string& term) const;

  // Binary cache: magic "RBA1", version byte stream with little-endian
  // integers. Rebuilding from a large collection is far slower than loading.
  void save(const std::string& path) const;
  static Index load(const std::string& path);

 private:
  std::vector<std::string> doc_ids_;
  std::vector<std::uint32_t> doc_lengths_;
  std::unordered_map<std::string, std::uint32_t> term_ids_;
  std::vector<std::vector<Posting>> postings_;
  double avgdl_ = 0.0;

  void add_document(std::string doc_id, std::uint32_t length,
                    const std::vector<std::pair<std::string, std::uint32_t>>& counts);
  void finalize();
};

}  // namespace rba
