#include "rba/index.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <numeric>

#include "parallel_scan.hpp"
#include "rba/error.hpp"
#include "rba/tokenizer.hpp"

namespace rba {

namespace {

struct DocTerms {
  std::uint32_t length = 0;
  std::vector<std::pair<std::string, std::uint32_t>> counts;
};

DocTerms count_terms(const Document& doc) {
  DocTerms out;
  std::unordered_map<std::string, std::uint32_t> counts;
  for_each_token(doc.text, [&](const std::string& token) {
    ++counts[token];
    ++out.length;
  });
  out.counts.assign(counts.begin(), counts.end());
  return out;
}

}  // namespace

void Index::add_document(std::string doc_id, std::uint32_t length,
                         const std::vector<std::pair<std::string, std::uint32_t>>& counts) {
  const auto doc = static_cast<std::uint32_t>(doc_ids_.size());
  doc_ids_.push_back(std::move(doc_id));
  doc_lengths_.push_back(length);
  for (const auto& [term, tf] : counts) {
    auto [it, inserted] = term_ids_.emplace(term, static_cast<std::uint32_t>(postings_.size()));
    if (inserted) postings_.emplace_back();
    postings_[it->second].push_back(Posting{doc, tf});
  }
}

void Index::finalize() {
  if (doc_ids_.empty())
    throw DataError("empty collection: average document length undefined");

  // Postings were appended in collection order; only duplicates remain to check.
  std::vector<std::uint32_t> order(doc_ids_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return doc_ids_[a] < doc_ids_[b];
  });
  for (std::size_t i = 1; i < order.size(); ++i)
    if (doc_ids_[order[i - 1]] == doc_ids_[order[i]])
      throw DataError("duplicate doc_id: " + doc_ids_[order[i]]);

  std::uint64_t total = 0;
  for (std::uint32_t length : doc_lengths_) total += length;
  avgdl_ = static_cast<double>(total) / static_cast<double>(doc_ids_.size());
}

Index Index::build(const std::string& collection_path, unsigned threads) {
  Index index;
  detail::scan_collection<DocTerms>(
      collection_path, threads,
      [](const Document& doc) { return count_terms(doc); },
      [&](Document&& doc, DocTerms&& terms) {
        index.add_document(std::move(doc.doc_id), terms.length, terms.counts);
      });
  index.finalize();
  return index;
}

const std::vector<Posting>* Index::postings(const std::string& term) const {
  auto it = term_ids_.find(term);
  return it == term_ids_.end() ? nullptr : &postings_[it->second];
}

namespace {

constexpr char kMagic[4] = {'R', 'B', 'A', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(buf, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(buf, 8);
}

void put_string(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  if (!in) throw DataError("index file truncated");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (!in) throw DataError("index file truncated");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

std::string get_string(std::istream& in) {
  std::uint32_t len = get_u32(in);
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) throw DataError("index file truncated");
  return s;
}

}  // namespace

void Index::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write index file: " + path);
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u64(out, doc_ids_.size());
  for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
    put_string(out, doc_ids_[i]);
    put_u32(out, doc_lengths_[i]);
  }

  std::vector<const std::string*> terms;
  terms.reserve(term_ids_.size());
  for (const auto& [term, tid] : term_ids_) terms.push_back(&term);
  std::sort(terms.begin(), terms.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });

  put_u64(out, terms.size());
  for (const std::string* term : terms) {
    put_string(out, *term);
    const auto& plist = postings_[term_ids_.at(*term)];
    put_u64(out, plist.size());
    for (const Posting& p : plist) {
      put_u32(out, p.doc);
      put_u32(out, p.tf);
    }
  }
  if (!out) throw DataError("write failed: " + path);
}

Index Index::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open index file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("not an index file (bad magic): " + path);
  std::uint32_t version = get_u32(in);
  if (version != kVersion)
    throw DataError("unsupported index version " + std::to_string(version) + ": " + path);

  Index index;
  std::uint64_t n_docs = get_u64(in);
  index.doc_ids_.reserve(n_docs);
  index.doc_lengths_.reserve(n_docs);
  for (std::uint64_t i = 0; i < n_docs; ++i) {
    index.doc_ids_.push_back(get_string(in));
    index.doc_lengths_.push_back(get_u32(in));
  }

  std::uint64_t n_terms = get_u64(in);
  index.postings_.reserve(n_terms);
  for (std::uint64_t t = 0; t < n_terms; ++t) {
    std::string term = get_string(in);
    std::uint64_t n_postings = get_u64(in);
    std::vector<Posting> plist;
    plist.reserve(n_postings);
    for (std::uint64_t p = 0; p < n_postings; ++p) {
      Posting posting;
      posting.doc = get_u32(in);
      posting.tf = get_u32(in);
      if (posting.doc >= n_docs)
        throw DataError("index file corrupt: posting references unknown document");
      plist.push_back(posting);
    }
    index.term_ids_.emplace(std::move(term), static_cast<std::uint32_t>(index.postings_.size()));
    index.postings_.push_back(std::move(plist));
  }
  index.finalize();
  return index;
}

}  // namespace rba
