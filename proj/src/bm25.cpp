#include "rba/bm25.hpp"

#include <algorithm>
#include <cmath>

#include "rba/tokenizer.hpp"

namespace rba {

double bm25_idf(std::size_t doc_count, std::size_t df) {
  const double n = static_cast<double>(doc_count);
  const double d = static_cast<double>(df);
  return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

Bm25Scorer::Bm25Scorer(const Index& index, Bm25Params params)
    : index_(index), params_(params), scores_(index.doc_count(), 0.0) {}

RankedList Bm25Scorer::search(const std::string& query_id,
                              const std::string& query_text, std::size_t k) {
  const double k1 = params_.k1;
  const double b = params_.b;
  const double avgdl = index_.avg_doc_length();

  for_each_token(query_text, [&](const std::string& term) {
    const std::vector<Posting>* plist = index_.postings(term);
    if (plist == nullptr) return;
    const double idf = bm25_idf(index_.doc_count(), plist->size());
    for (const Posting& p : *plist) {
      const double tf = static_cast<double>(p.tf);
      const double norm = 1.0 - b + b * index_.doc_length(p.doc) / avgdl;
      const double contribution = idf * tf * (k1 + 1.0) / (tf + k1 * norm);
      if (scores_[p.doc] == 0.0) touched_.push_back(p.doc);
      scores_[p.doc] += contribution;
    }
  });

  std::sort(touched_.begin(), touched_.end(), [&](std::uint32_t a, std::uint32_t b2) {
    if (scores_[a] != scores_[b2]) return scores_[a] > scores_[b2];
    return index_.doc_id(a) < index_.doc_id(b2);
  });

  RankedList list;
  list.query_id = query_id;
  const std::size_t n = std::min(k, touched_.size());
  list.entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t doc = touched_[i];
    list.entries.push_back(RunEntry{index_.doc_id(doc),
                                    static_cast<std::uint32_t>(i + 1), scores_[doc]});
  }

  // Reset only the docs this query touched; cheaper than clearing all scores.
  for (std::uint32_t doc : touched_) scores_[doc] = 0.0;
  touched_.clear();
  return list;
}

RankedList bm25_search(const Index& index, const std::string& query_id,
                       const std::string& query_text, Bm25Params params,
                       std::size_t k) {
  Bm25Scorer scorer(index, params);
  return scorer.search(query_id, query_text, k);
}

}  // namespace rba
