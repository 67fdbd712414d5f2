#include "vl/query_engine.hpp"

#include <algorithm>
#include <cmath>

#include "vl/embedder.hpp"
#include "vl/error.hpp"
#include "vl/expansion.hpp"
#include "vl/templates.hpp"

namespace vl {
namespace {

void require(bool ok, const std::string& message) {
  if (!ok) fail(ErrorCode::kInvalidArgument, message);
}

}  // namespace

double QueryTerm::signed_weight() const {
  return polarity == Polarity::kMore ? std::abs(weight) : -std::abs(weight);
}

QueryEngine::QueryEngine(const DocumentIndex& index, const Embedder& embedder,
                         const TemplateRegistry& templates, const ExpansionProvider& expansion,
                         EngineConfig config)
    : index_(index), embedder_(embedder), templates_(templates), expansion_(expansion), config_(config) {
  require(config_.context_alpha > 0.0 && config_.context_alpha <= 1.0,
          "context alpha must lie in (0, 1]");
  require(std::isfinite(config_.demote_weight), "demotion weight must be finite");
  require(std::isfinite(config_.expansion_weight), "expansion weight must be finite");
}

void QueryEngine::validate(const QuerySpec& spec) const {
  require(!spec.terms.empty(), "query needs at least one term");
  bool has_positive = false;
  for (const auto& term : spec.terms) {
    require(std::isfinite(term.weight) && std::abs(term.weight) <= kMaxTermWeight,
            "term weights must be finite with magnitude at most 10");
    has_positive |= term.polarity == Polarity::kMore;
  }
  require(has_positive, "query needs at least one 'more' term");
  if (spec.template_id && !templates_.contains(*spec.template_id)) {
    fail(ErrorCode::kUnknownTemplate, "unknown template '" + *spec.template_id + "'");
  }
  for (const auto& item : spec.context_items) {
    require(item.doc_id.has_value() != item.image_ref.has_value(),
            "context item needs exactly one of doc_id or image");
    require(std::isfinite(item.weight) && item.weight > 0.0, "context weights must be positive");
  }
  if (spec.demote_weight) require(std::isfinite(*spec.demote_weight), "demotion weight must be finite");
  require(spec.k >= 1 && spec.k <= kMaxK, "k must lie in [1, 200]");
}

CompiledQuery QueryEngine::compile(const QuerySpec& spec) const {
  validate(spec);

  std::optional<PromptTemplate> tpl;
  if (spec.template_id) tpl = templates_.get(*spec.template_id);

  std::vector<TraceEntry> trace;
  std::vector<EmbedRequest> requests;
  for (const auto& term : spec.terms) {
    const double w = term.signed_weight();
    std::string text = (tpl && w > 0.0) ? render_template(*tpl, term.text) : term.text;
    trace.push_back({TraceEntry::Source::kTerm, text, w});
    requests.push_back({EmbedKind::kText, std::move(text)});
  }
  if (spec.demote_quality) {
    const double w = spec.demote_weight.value_or(config_.demote_weight);
    trace.push_back({TraceEntry::Source::kDemotion, std::string(kQualityDemotionText), w});
    requests.push_back({EmbedKind::kText, std::string(kQualityDemotionText)});
  }

  auto vectors = embedder_.embed_batch(requests);
  std::vector<WeightedVector> weighted;
  weighted.reserve(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    weighted.push_back({std::move(vectors[i]), trace[i].weight});
  }
  UnitVector query = lerp_combine(weighted);

  if (spec.context_items.empty()) return {std::move(query), std::move(trace)};

  double context_total = 0.0;
  for (const auto& item : spec.context_items) context_total += item.weight;
  const double alpha = config_.context_alpha;

  std::vector<WeightedVector> blend;
  blend.push_back({std::move(query), alpha});
  for (const auto& item : spec.context_items) {
    const double w = (1.0 - alpha) * item.weight / context_total;
    if (item.doc_id) {
      blend.push_back({index_.get(*item.doc_id).vector, w});
      trace.push_back({TraceEntry::Source::kContext, *item.doc_id, w});
    } else {
      blend.push_back({embedder_.embed({EmbedKind::kImage, *item.image_ref}), w});
      trace.push_back({TraceEntry::Source::kContext, *item.image_ref, w});
    }
  }
  return {lerp_combine(blend), std::move(trace)};
}

std::vector<SearchHit> QueryEngine::search(const QuerySpec& spec) const {
  CompiledQuery compiled = compile(spec);
  return index_.nn_search(compiled.vector, spec.k, spec.filter);
}

QueryEngine::TracedSearch QueryEngine::search_traced(const QuerySpec& spec) const {
  CompiledQuery compiled = compile(spec);
  auto hits = index_.nn_search(compiled.vector, spec.k, spec.filter);
  return {std::move(compiled), std::move(hits)};
}

QuerySpec QueryEngine::expand_with_feedback(const QuerySpec& spec,
                                            std::span<const std::string> liked_ids) const {
  validate(spec);
  if (liked_ids.empty()) return spec;

  std::vector<Document> liked;
  {
    const auto view = index_.read();
    for (const auto& id : liked_ids) liked.push_back(view.get(id));
  }

  const auto primary = std::find_if(spec.terms.begin(), spec.terms.end(),
                                    [](const QueryTerm& t) { return t.polarity == Polarity::kMore; });
  QuerySpec expanded = spec;
  for (auto& term : expansion_.expansion_terms(primary->text, liked)) {
    expanded.terms.push_back({std::move(term), config_.expansion_weight, Polarity::kMore});
  }
  return expanded;
}

}  // namespace vl
