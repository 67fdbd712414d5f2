#include "vl/json_codec.hpp"

#include <cmath>
#include <set>

#include "vl/embedder.hpp"
#include "vl/error.hpp"

namespace vl {
namespace {

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view what,
                ErrorCode code = ErrorCode::kInvalidArgument) {
  if (!j.is_object()) fail(code, std::string(what) + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (auto a : allowed) known |= key == a;
    if (!known) fail(code, std::string(what) + " has unknown field '" + key + "'");
  }
}

template <typename T>
T field(const Json& j, const char* key, std::string_view what, ErrorCode code = ErrorCode::kInvalidArgument) {
  const auto it = j.find(key);
  if (it == j.end()) fail(code, std::string(what) + " is missing '" + key + "'");
  try {
    return it->template get<T>();
  } catch (const Json::exception&) {
    fail(code, std::string(what) + " field '" + key + "' has the wrong type");
  }
}

template <typename T>
std::optional<T> optional_field(const Json& j, const char* key, std::string_view what,
                                ErrorCode code = ErrorCode::kInvalidArgument) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return field<T>(j, key, what, code);
}

double number_field(const Json& j, const char* key, std::string_view what, double fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) fail(ErrorCode::kInvalidArgument, std::string(what) + " field '" + key + "' must be a number");
  return it->get<double>();
}

std::size_t count_field(const Json& j, const char* key, std::string_view what, std::size_t fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_unsigned()) {
    fail(ErrorCode::kInvalidArgument, std::string(what) + " field '" + key + "' must be a non-negative integer");
  }
  return it->get<std::size_t>();
}

std::vector<double> numbers(const Json& j, ErrorCode code, std::string_view what) {
  if (!j.is_array()) fail(code, std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) fail(code, std::string(what) + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

UnitVector adopt_or_normalize(std::vector<double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) fail(ErrorCode::kMalformedDocument, "vector has non-finite component");
  }
  const double n = norm(v);
  if (std::abs(n - 1.0) <= kUnitTolerance) return UnitVector::from_unit(std::move(v));
  return normalize(v);
}

}  // namespace

Json to_json(const UnitVector& v) {
  return Json(std::vector<double>(v.components().begin(), v.components().end()));
}

UnitVector unit_vector_from_json(const Json& j, std::size_t dimension) {
  auto v = numbers(j, ErrorCode::kInvalidArgument, "vector");
  if (v.size() != dimension) {
    fail(ErrorCode::kDimensionMismatch,
         "vector has dimension " + std::to_string(v.size()) + ", expected " + std::to_string(dimension));
  }
  return adopt_or_normalize(std::move(v));
}

Json to_json(const Document& doc) {
  Json j{{"id", doc.id}, {"title", doc.title}, {"metadata", doc.metadata}, {"vector", to_json(doc.vector)}};
  if (doc.media_ref) j["media_ref"] = *doc.media_ref;
  return j;
}

Document document_from_json(const Json& j, std::size_t dimension, const Embedder* embedder) {
  constexpr auto kBad = ErrorCode::kMalformedDocument;
  check_keys(j, {"id", "title", "media_ref", "metadata", "vector", "text_for_embedding"}, "document", kBad);

  auto id = field<std::string>(j, "id", "document", kBad);
  if (id.empty()) fail(kBad, "document id must be nonempty");
  auto title = field<std::string>(j, "title", "document", kBad);
  auto media_ref = optional_field<std::string>(j, "media_ref", "document", kBad);
  auto metadata = optional_field<std::map<std::string, std::string>>(j, "metadata", "document", kBad)
                      .value_or(std::map<std::string, std::string>{});
  auto text = optional_field<std::string>(j, "text_for_embedding", "document", kBad);

  std::optional<UnitVector> vector;
  if (const auto it = j.find("vector"); it != j.end() && !it->is_null()) {
    auto raw = numbers(*it, kBad, "document vector");
    if (raw.size() != dimension) {
      fail(ErrorCode::kDimensionMismatch, "document '" + id + "' vector has dimension " +
                                              std::to_string(raw.size()) + ", expected " +
                                              std::to_string(dimension));
    }
    vector = adopt_or_normalize(std::move(raw));
  } else if (embedder == nullptr) {
    fail(kBad, "document '" + id + "' has no vector and embedding is disabled");
  } else if (text) {
    vector = embedder->embed({EmbedKind::kText, *text});
  } else if (media_ref) {
    vector = embedder->embed({EmbedKind::kImage, *media_ref});
  } else {
    fail(kBad, "document '" + id + "' has neither vector, text_for_embedding nor media_ref");
  }
  return {std::move(id), std::move(title), std::move(media_ref), std::move(metadata), std::move(*vector)};
}

Json to_json(const SearchHit& hit) {
  return {{"id", hit.id}, {"score", hit.score}, {"rank", hit.rank}};
}

Json to_json(const std::vector<SearchHit>& hits) {
  Json out = Json::array();
  for (const auto& hit : hits) out.push_back(to_json(hit));
  return out;
}

std::vector<SearchHit> hits_from_json(const Json& j) {
  if (!j.is_array()) fail(ErrorCode::kInvalidArgument, "hits must be an array");
  std::vector<SearchHit> out;
  for (const auto& h : j) {
    check_keys(h, {"id", "score", "rank"}, "hit");
    out.push_back({field<std::string>(h, "id", "hit"), field<double>(h, "score", "hit"),
                   field<std::size_t>(h, "rank", "hit")});
  }
  return out;
}

Json to_json(const QuerySpec& spec) {
  Json terms = Json::array();
  for (const auto& t : spec.terms) {
    terms.push_back({{"text", t.text},
                     {"weight", t.weight},
                     {"polarity", t.polarity == Polarity::kMore ? "more" : "less"}});
  }
  Json context = Json::array();
  for (const auto& c : spec.context_items) {
    Json item{{"weight", c.weight}};
    if (c.doc_id) item["doc_id"] = *c.doc_id;
    if (c.image_ref) item["image"] = *c.image_ref;
    context.push_back(std::move(item));
  }
  Json filter = Json::object();
  for (const auto& [key, value] : spec.filter) filter[key] = value;

  Json j{{"terms", std::move(terms)},
         {"context_items", std::move(context)},
         {"demote_quality", spec.demote_quality},
         {"k", spec.k},
         {"filter", std::move(filter)}};
  if (spec.template_id) j["template"] = *spec.template_id;
  if (spec.demote_weight) j["demote_weight"] = *spec.demote_weight;
  return j;
}

QuerySpec query_spec_from_json(const Json& j) {
  constexpr std::string_view kWhat = "query spec";
  check_keys(j, {"terms", "template", "context_items", "demote_quality", "demote_weight", "k", "filter"}, kWhat);

  QuerySpec spec;
  const auto terms = j.find("terms");
  if (terms == j.end() || !terms->is_array()) fail(ErrorCode::kInvalidArgument, "query spec needs a 'terms' array");
  for (const auto& t : *terms) {
    check_keys(t, {"text", "weight", "polarity"}, "term");
    QueryTerm term;
    term.text = field<std::string>(t, "text", "term");
    term.weight = number_field(t, "weight", "term", 1.0);
    const auto polarity = optional_field<std::string>(t, "polarity", "term").value_or("more");
    if (polarity == "more") {
      term.polarity = Polarity::kMore;
    } else if (polarity == "less") {
      term.polarity = Polarity::kLess;
    } else {
      fail(ErrorCode::kInvalidArgument, "term polarity must be 'more' or 'less'");
    }
    spec.terms.push_back(std::move(term));
  }

  spec.template_id = optional_field<std::string>(j, "template", kWhat);
  if (const auto it = j.find("context_items"); it != j.end()) {
    if (!it->is_array()) fail(ErrorCode::kInvalidArgument, "context_items must be an array");
    for (const auto& c : *it) {
      check_keys(c, {"doc_id", "image", "weight"}, "context item");
      spec.context_items.push_back({optional_field<std::string>(c, "doc_id", "context item"),
                                    optional_field<std::string>(c, "image", "context item"),
                                    number_field(c, "weight", "context item", 1.0)});
    }
  }
  spec.demote_quality = optional_field<bool>(j, "demote_quality", kWhat).value_or(false);
  if (j.contains("demote_weight") && !j["demote_weight"].is_null()) {
    spec.demote_weight = number_field(j, "demote_weight", kWhat, 0.0);
  }
  spec.k = count_field(j, "k", kWhat, kDefaultK);
  if (const auto it = j.find("filter"); it != j.end() && !it->is_null()) {
    for (const auto& [key, value] : field<std::map<std::string, std::string>>(j, "filter", kWhat)) {
      spec.filter.emplace_back(key, value);
    }
  }
  return spec;
}

Json to_json(const PromptTemplate& tpl) {
  return {{"id", tpl.id}, {"pattern", tpl.pattern}, {"description", tpl.description}};
}

PromptTemplate template_from_json(const Json& j) {
  check_keys(j, {"id", "pattern", "description"}, "template");
  PromptTemplate tpl{field<std::string>(j, "id", "template"), field<std::string>(j, "pattern", "template"),
                     optional_field<std::string>(j, "description", "template").value_or("")};
  validate_template(tpl);
  return tpl;
}

Json to_json(const WalkParams& params) {
  return {{"layers", params.layers},
          {"children", params.children},
          {"neighbours", params.neighbours},
          {"seed", params.seed},
          {"literal_filtering", params.literal_filtering}};
}

WalkParams walk_params_from_json(const Json& j, WalkParams defaults) {
  if (j.is_null()) return defaults;
  constexpr std::string_view kWhat = "walk params";
  check_keys(j, {"layers", "children", "neighbours", "seed", "literal_filtering"}, kWhat);
  WalkParams p = defaults;
  p.layers = count_field(j, "layers", kWhat, p.layers);
  p.children = count_field(j, "children", kWhat, p.children);
  p.neighbours = count_field(j, "neighbours", kWhat, p.neighbours);
  if (const auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned()) fail(ErrorCode::kInvalidArgument, "walk seed must be a non-negative integer");
    p.seed = it->get<std::uint64_t>();
  }
  p.literal_filtering = optional_field<bool>(j, "literal_filtering", kWhat).value_or(p.literal_filtering);
  return p;
}

Json to_json(const RecTree& tree, bool emit_root_vector) {
  Json children = Json::array();
  for (const auto& child : tree.children) children.push_back(to_json(child, false));
  Json j{{"children", std::move(children)}};
  if (tree.doc_id) j["doc_id"] = *tree.doc_id;
  if (emit_root_vector) j["vector"] = to_json(tree.vector);
  return j;
}

Json to_json(const IngestReport& report) {
  Json errors = Json::array();
  for (const auto& e : report.errors) {
    errors.push_back({{"line", e.line}, {"code", to_string(e.code)}, {"message", e.message}});
  }
  return {{"ingested", report.ingested}, {"skipped", report.skipped}, {"errors", std::move(errors)}};
}

Json to_json(const TraceEntry& entry) {
  const char* source = entry.source == TraceEntry::Source::kTerm       ? "term"
                       : entry.source == TraceEntry::Source::kDemotion ? "demotion"
                                                                       : "context";
  return {{"source", source}, {"text", entry.text}, {"weight", entry.weight}};
}

std::string dump(const Json& j) { return j.dump(-1, ' ', false, Json::error_handler_t::replace); }

}  // namespace vl
