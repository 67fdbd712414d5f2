#include "vl/index.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

#include "vl/embedder.hpp"
#include "vl/json_codec.hpp"

namespace vl {

bool matches(const MetadataFilter& filter, const Document& doc) {
  for (const auto& [key, value] : filter) {
    const auto it = doc.metadata.find(key);
    if (it == doc.metadata.end() || it->second != value) return false;
  }
  return true;
}

std::vector<SearchHit> DocumentIndex::ReadView::nn_search(const UnitVector& q, std::size_t k,
                                                          const MetadataFilter& filter,
                                                          const IdSet& exclude) const {
  if (k == 0) fail(ErrorCode::kInvalidArgument, "k must be at least 1");
  if (q.dimension() != index_->dimension_) {
    fail(ErrorCode::kDimensionMismatch, "query has dimension " + std::to_string(q.dimension()) +
                                            ", index has " + std::to_string(index_->dimension_));
  }

  struct Candidate {
    const std::string* id;
    double score;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(index_->docs_.size());
  for (const auto& [id, doc] : index_->docs_) {
    if (exclude.contains(id) || !matches(filter, doc)) continue;
    candidates.push_back({&id, cosine(q, doc.vector)});
  }

  const auto better = [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return *a.id < *b.id;
  };
  const std::size_t n = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(n),
                    candidates.end(), better);

  std::vector<SearchHit> hits;
  hits.reserve(n);
  for (std::size_t i = 0; i < n; ++i) hits.push_back({*candidates[i].id, candidates[i].score, i + 1});
  return hits;
}

const Document* DocumentIndex::ReadView::find(const std::string& id) const {
  const auto it = index_->docs_.find(id);
  return it == index_->docs_.end() ? nullptr : &it->second;
}

const Document& DocumentIndex::ReadView::get(const std::string& id) const {
  if (const auto* doc = find(id)) return *doc;
  fail(ErrorCode::kNotFound, "document '" + id + "' not found");
}

DocumentIndex::DocumentIndex(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) fail(ErrorCode::kInvalidArgument, "index dimension must be positive");
}

void DocumentIndex::validate(const Document& doc) const {
  if (doc.id.empty()) fail(ErrorCode::kMalformedDocument, "document id must be nonempty");
  if (doc.vector.dimension() != dimension_) {
    fail(ErrorCode::kDimensionMismatch, "document '" + doc.id + "' has dimension " +
                                            std::to_string(doc.vector.dimension()) + ", index has " +
                                            std::to_string(dimension_));
  }
}

void DocumentIndex::upsert(Document doc) {
  validate(doc);
  std::unique_lock lock(mutex_);
  docs_.insert_or_assign(doc.id, std::move(doc));
}

void DocumentIndex::upsert_batch(std::vector<Document> docs) {
  for (const auto& doc : docs) validate(doc);
  std::unique_lock lock(mutex_);
  for (auto& doc : docs) docs_.insert_or_assign(doc.id, std::move(doc));
}

Document DocumentIndex::get(const std::string& id) const { return read().get(id); }

bool DocumentIndex::erase(const std::string& id) {
  std::unique_lock lock(mutex_);
  return docs_.erase(id) > 0;
}

std::size_t DocumentIndex::count() const { return read().count(); }

std::vector<SearchHit> DocumentIndex::nn_search(const UnitVector& q, std::size_t k,
                                                const MetadataFilter& filter,
                                                const IdSet& exclude) const {
  return read().nn_search(q, k, filter, exclude);
}

IngestReport DocumentIndex::ingest_jsonl(const std::string& path, const Embedder* embedder) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kFileUnreadable, "cannot read " + path);
  return ingest_lines(in, embedder);
}

IngestReport DocumentIndex::ingest_lines(std::istream& in, const Embedder* embedder) {
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    lines.emplace_back(number, std::move(line));
  }
  return ingest_parsed(std::move(lines), embedder);
}

IngestReport DocumentIndex::ingest_documents(std::span<const std::string> json_documents,
                                             const Embedder* embedder) {
  std::vector<std::pair<std::size_t, std::string>> lines;
  for (std::size_t i = 0; i < json_documents.size(); ++i) lines.emplace_back(i + 1, json_documents[i]);
  return ingest_parsed(std::move(lines), embedder);
}

IngestReport DocumentIndex::ingest_parsed(std::vector<std::pair<std::size_t, std::string>> lines,
                                          const Embedder* embedder) {
  IngestReport report;
  std::vector<Document> batch;
  const auto flush = [&] {
    if (batch.empty()) return;
    report.ingested += batch.size();
    upsert_batch(std::move(batch));
    batch.clear();
  };

  for (auto& [number, text] : lines) {
    try {
      Json j;
      try {
        j = Json::parse(text);
      } catch (const Json::exception& e) {
        fail(ErrorCode::kMalformedDocument, std::string("invalid JSON: ") + e.what());
      }
      Document doc = document_from_json(j, dimension_, embedder);
      validate(doc);
      batch.push_back(std::move(doc));
      if (batch.size() == kIngestBatch) flush();
    } catch (const Error& e) {
      ++report.skipped;
      report.errors.push_back({number, e.code(), e.what()});
    }
  }
  flush();
  return report;
}

void DocumentIndex::snapshot(std::ostream& out) const {
  const auto view = read();
  view.for_each([&](const Document& doc) { out << dump(to_json(doc)) << '\n'; });
}

std::string DocumentIndex::snapshot_string() const {
  std::ostringstream out;
  snapshot(out);
  return out.str();
}

void DocumentIndex::save_snapshot(const std::string& path) const {
  const std::string body = snapshot_string();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kFileUnreadable, "cannot write " + path);
  out << body;
  if (!out) fail(ErrorCode::kFileUnreadable, "failed writing " + path);
}

void DocumentIndex::restore(std::istream& in) {
  std::map<std::string, Document> fresh;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      Document doc = document_from_json(Json::parse(line), dimension_, nullptr);
      validate(doc);
      fresh.insert_or_assign(doc.id, std::move(doc));
    } catch (const Json::exception& e) {
      fail(ErrorCode::kMalformedDocument, "snapshot line " + std::to_string(number) + ": " + e.what());
    } catch (const Error& e) {
      fail(e.code(), "snapshot line " + std::to_string(number) + ": " + e.what());
    }
  }
  std::unique_lock lock(mutex_);
  docs_ = std::move(fresh);
}

void DocumentIndex::load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kFileUnreadable, "cannot read " + path);
  restore(in);
}

}  // namespace vl
