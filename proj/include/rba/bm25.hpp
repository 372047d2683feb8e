#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rba/index.hpp"
#include "rba/run.hpp"

namespace rba {

struct Bm25Params {
  double k1 = 0.6;
  double b = 0.8;
};

// ln(1 + (N - df + 0.5) / (df + 0.5)); non-negative for every df <= N.
double bm25_idf(std::size_t doc_count, std::size_t df);

// Okapi scorer with reusable per-query scratch; one instance per thread.
class Bm25Scorer {
 public:
  explicit Bm25Scorer(const Index& index, Bm25Params params = {});

  // Top-k by score descending, ties broken by ascending doc_id. The query
  // is tokenized like documents; repeated query terms score once per
  // occurrence. Documents scoring zero are never returned, so the list may
  // be shorter than k.
  RankedList search(const std::string& query_id, const std::string& query_text,
                    std::size_t k);

 private:
  const Index& index_;
  Bm25Params params_;
  std::vector<double> scores_;
  std::vector<std::uint32_t> touched_;
};

// Convenience wrapper around a one-shot Bm25Scorer.
RankedList bm25_search(const Index& index, const std::string& query_id,
                       const std::string& query_text, Bm25Params params,
                       std::size_t k);

}  // namespace rba
