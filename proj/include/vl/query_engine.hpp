#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vl/index.hpp"
#include "vl/vecmath.hpp"

namespace vl {

class Embedder;
class ExpansionProvider;
class TemplateRegistry;

enum class Polarity { kMore, kLess };

struct QueryTerm {
  std::string text;
  double weight = 1.0;
  Polarity polarity = Polarity::kMore;

  /// +|weight| for "more of this", -|weight| for "less of this".
  double signed_weight() const;

  friend bool operator==(const QueryTerm&, const QueryTerm&) = default;
};

/// A document already in the index, or an external image, blended into the
/// query as relevance feedback. Exactly one of the two sources is set.
struct ContextItem {
  std::optional<std::string> doc_id;
  std::optional<std::string> image_ref;
  double weight = 1.0;

  friend bool operator==(const ContextItem&, const ContextItem&) = default;
};

inline constexpr std::size_t kDefaultK = 20;
inline constexpr std::size_t kMaxK = 200;
inline constexpr double kMaxTermWeight = 10.0;
inline constexpr std::string_view kQualityDemotionText = "low quality, low res, burry, jpeg artefacts";

struct QuerySpec {
  std::vector<QueryTerm> terms;
  std::optional<std::string> template_id;
  std::vector<ContextItem> context_items;
  bool demote_quality = false;
  /// Overrides EngineConfig::demote_weight for this request.
  std::optional<double> demote_weight;
  std::size_t k = kDefaultK;
  MetadataFilter filter;

  friend bool operator==(const QuerySpec&, const QuerySpec&) = default;
};

struct EngineConfig {
  double context_alpha = 0.7;
  double demote_weight = -1.1;
  double expansion_weight = 0.4;
};

/// One weighted component of a compiled query, as shown in debug traces.
struct TraceEntry {
  enum class Source { kTerm, kDemotion, kContext };
  Source source;
  std::string text;  // rendered term text, document id or image reference
  double weight;     // signed weight in the final combination
};

struct CompiledQuery {
  UnitVector vector;
  std::vector<TraceEntry> trace;
};

/// Turns declarative query specs into one query vector and runs the search.
///
/// Pipeline: template rendering on positive terms, optional quality demotion
/// term, embedding, lerp of the signed term vectors, then (with context
/// items) a second lerp that gives the term query context_alpha of the mass
/// and splits the rest across context items in proportion to their weights.
class QueryEngine {
 public:
  QueryEngine(const DocumentIndex& index, const Embedder& embedder,
              const TemplateRegistry& templates, const ExpansionProvider& expansion,
              EngineConfig config = {});

  const EngineConfig& config() const noexcept { return config_; }

  /// Throws InvalidArgument / UnknownTemplate for specs the engine rejects.
  void validate(const QuerySpec& spec) const;

  CompiledQuery compile(const QuerySpec& spec) const;
  UnitVector compile_query(const QuerySpec& spec) const { return compile(spec).vector; }

  struct TracedSearch {
    CompiledQuery compiled;
    std::vector<SearchHit> hits;
  };

  std::vector<SearchHit> search(const QuerySpec& spec) const;
  TracedSearch search_traced(const QuerySpec& spec) const;

  /// Returns a copy of `spec` with expansion terms (weight
  /// config().expansion_weight, polarity more) appended.
  QuerySpec expand_with_feedback(const QuerySpec& spec, std::span<const std::string> liked_ids) const;

 private:
  const DocumentIndex& index_;
  const Embedder& embedder_;
  const TemplateRegistry& templates_;
  const ExpansionProvider& expansion_;
  EngineConfig config_;
};

}  // namespace vl
