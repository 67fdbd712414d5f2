#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "vl/document.hpp"
#include "vl/error.hpp"

namespace vl {

class Embedder;

/// Conjunction of metadata equality tests; empty matches everything.
using MetadataFilter = std::vector<std::pair<std::string, std::string>>;
using IdSet = std::unordered_set<std::string>;

bool matches(const MetadataFilter& filter, const Document& doc);

struct SearchHit {
  std::string id;
  double score;      // cosine similarity
  std::size_t rank;  // 1-based

  friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

struct IngestError {
  std::size_t line;  // 1-based
  ErrorCode code;
  std::string message;
};

struct IngestReport {
  std::size_t ingested = 0;
  std::size_t skipped = 0;
  std::vector<IngestError> errors;
};

inline constexpr std::size_t kIngestBatch = 100;

/// In-memory document store with exact (brute-force) cosine k-NN.
///
/// Many concurrent readers or one writer. Readers that need several
/// operations against one consistent state take a ReadView.
class DocumentIndex {
 public:
  class ReadView {
   public:
    /// Top-k documents by cosine that pass `filter` and are not in `exclude`,
    /// sorted by descending score then ascending id.
    std::vector<SearchHit> nn_search(const UnitVector& q, std::size_t k,
                                     const MetadataFilter& filter = {},
                                     const IdSet& exclude = {}) const;
    const Document& get(const std::string& id) const;  // NotFound
    const Document* find(const std::string& id) const;
    std::size_t count() const { return index_->docs_.size(); }
    std::size_t dimension() const { return index_->dimension_; }

    template <typename Fn>
    void for_each(Fn&& fn) const {
      for (const auto& [id, doc] : index_->docs_) fn(doc);
    }

   private:
    friend class DocumentIndex;
    explicit ReadView(const DocumentIndex& index) : index_(&index), lock_(index.mutex_) {}
    const DocumentIndex* index_;
    std::shared_lock<std::shared_mutex> lock_;
  };

  explicit DocumentIndex(std::size_t dimension);

  std::size_t dimension() const noexcept { return dimension_; }

  ReadView read() const { return ReadView(*this); }

  /// Inserts or atomically replaces the document with the same id.
  void upsert(Document doc);
  void upsert_batch(std::vector<Document> docs);
  Document get(const std::string& id) const;
  /// Returns whether a document was removed; deleting a missing id is not an error.
  bool erase(const std::string& id);
  std::size_t count() const;

  std::vector<SearchHit> nn_search(const UnitVector& q, std::size_t k,
                                   const MetadataFilter& filter = {},
                                   const IdSet& exclude = {}) const;

  /// One JSON document per line. Lines lacking a vector are embedded from
  /// text_for_embedding (or media_ref as an image) when `embedder` is given.
  IngestReport ingest_jsonl(const std::string& path, const Embedder* embedder);
  IngestReport ingest_lines(std::istream& in, const Embedder* embedder);
  /// Same per-item rules for already-parsed JSON documents (array bodies).
  IngestReport ingest_documents(std::span<const std::string> json_documents, const Embedder* embedder);

  /// Writes all documents as JSONL sorted by id.
  void snapshot(std::ostream& out) const;
  std::string snapshot_string() const;
  void save_snapshot(const std::string& path) const;
  /// Replaces the whole index with the snapshot contents; throws
  /// MalformedDocument (with line number) and leaves the index untouched on
  /// any bad line.
  void restore(std::istream& in);
  void load_snapshot(const std::string& path);

 private:
  void validate(const Document& doc) const;
  IngestReport ingest_parsed(std::vector<std::pair<std::size_t, std::string>> lines,
                             const Embedder* embedder);

  std::size_t dimension_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, Document> docs_;
};

}  // namespace vl
