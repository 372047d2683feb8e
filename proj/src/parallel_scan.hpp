#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rba/corpus.hpp"

namespace rba::detail {

inline unsigned effective_threads(unsigned requested) {
  if (requested != 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Streams the collection in batches with bounded memory. per_doc maps a
// Document to R on worker threads; consume runs on the calling thread and
// receives every (document, result) pair in file order, so the outcome is
// identical for any thread count.
template <typename R, typename PerDoc, typename Consume>
void scan_collection(const std::string& path, unsigned threads, PerDoc per_doc,
                     Consume consume) {
  const unsigned n_threads = effective_threads(threads);
  constexpr std::size_t kBatch = 4096;

  CollectionReader reader(path);
  std::vector<Document> docs;
  docs.reserve(kBatch);
  std::vector<R> results;
  Document doc;
  bool more = true;
  while (more) {
    docs.clear();
    while (docs.size() < kBatch && (more = reader.next(doc)))
      docs.push_back(std::move(doc));
    if (docs.empty()) break;

    results.resize(docs.size());
    const std::size_t n = docs.size();
    const std::size_t workers = std::min<std::size_t>(n_threads, n);
    if (workers <= 1) {
      for (std::size_t i = 0; i < n; ++i) results[i] = per_doc(docs[i]);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (std::size_t w = 0; w < workers; ++w) {
        std::size_t begin = n * w / workers;
        std::size_t end = n * (w + 1) / workers;
        pool.emplace_back([&, begin, end] {
          for (std::size_t i = begin; i < end; ++i) results[i] = per_doc(docs[i]);
        });
      }
      for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < n; ++i)
      consume(std::move(docs[i]), std::move(results[i]));
  }
}

}  // namespace rba::detail
