#include "vl/service.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vl/json_codec.hpp"

namespace vl {
namespace {

constexpr std::string_view kDocumentsPrefix = "/v1/documents/";

std::vector<PromptTemplate> initial_templates(const ServiceConfig& cfg) {
  if (cfg.templates_path.empty()) return TemplateRegistry::default_templates();
  return TemplateRegistry::from_file(cfg.templates_path).list();
}

std::unique_ptr<ExpansionProvider> make_expansion(const ServiceConfig& cfg) {
  if (cfg.expansion_endpoint.empty()) return std::make_unique<StubExpansionProvider>();
  return std::make_unique<RemoteExpansionProvider>(cfg.expansion_endpoint, cfg.embedder.timeout);
}

Json parse_body(const ApiRequest& request) {
  if (request.body.empty()) fail(ErrorCode::kInvalidArgument, "request body is empty");
  try {
    return Json::parse(request.body);
  } catch (const Json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("request body is not valid JSON: ") + e.what());
  }
}

ApiResponse ok(const Json& body) { return {200, dump(body) + "\n", "application/json"}; }

std::vector<std::string> id_list(const Json& body, const char* key) {
  const auto it = body.find(key);
  if (it == body.end() || !it->is_array()) {
    fail(ErrorCode::kInvalidArgument, std::string("'") + key + "' must be an array of document ids");
  }
  std::vector<std::string> ids;
  for (const auto& id : *it) {
    if (!id.is_string()) fail(ErrorCode::kInvalidArgument, std::string("'") + key + "' must hold strings");
    ids.push_back(id.get<std::string>());
  }
  return ids;
}

std::size_t k_field(const Json& body) {
  const auto it = body.find("k");
  if (it == body.end()) return kDefaultK;
  if (!it->is_number_unsigned() || it->get<std::size_t>() < 1 || it->get<std::size_t>() > kMaxK) {
    fail(ErrorCode::kInvalidArgument, "k must be an integer in [1, 200]");
  }
  return it->get<std::size_t>();
}

void reject_unknown(const Json& body, std::initializer_list<std::string_view> allowed) {
  if (!body.is_object()) fail(ErrorCode::kInvalidArgument, "request body must be a JSON object");
  for (const auto& [key, _] : body.items()) {
    bool known = false;
    for (auto a : allowed) known |= key == a;
    if (!known) fail(ErrorCode::kInvalidArgument, "unknown request field '" + key + "'");
  }
}

}  // namespace

std::string_view to_string(ApiErrorCode code) {
  switch (code) {
    case ApiErrorCode::kBadRequest: return "bad_request";
    case ApiErrorCode::kNotFound: return "not_found";
    case ApiErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ApiErrorCode::kDegenerateQuery: return "degenerate_query";
    case ApiErrorCode::kProviderUnavailable: return "provider_unavailable";
    case ApiErrorCode::kInternal: return "internal";
  }
  return "internal";
}

int http_status(ApiErrorCode code) {
  switch (code) {
    case ApiErrorCode::kBadRequest: return 400;
    case ApiErrorCode::kNotFound: return 404;
    case ApiErrorCode::kDimensionMismatch: return 400;
    case ApiErrorCode::kDegenerateQuery: return 422;
    case ApiErrorCode::kProviderUnavailable: return 503;
    case ApiErrorCode::kInternal: return 500;
  }
  return 500;
}

ApiErrorCode api_error_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return ApiErrorCode::kNotFound;
    case ErrorCode::kDimensionMismatch: return ApiErrorCode::kDimensionMismatch;
    case ErrorCode::kDegenerateVector:
    case ErrorCode::kAntipodalVectors: return ApiErrorCode::kDegenerateQuery;
    case ErrorCode::kProviderUnavailable: return ApiErrorCode::kProviderUnavailable;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kNonPositiveWeight:
    case ErrorCode::kBadPayload:
    case ErrorCode::kMalformedDocument:
    case ErrorCode::kFileUnreadable:
    case ErrorCode::kUnknownTemplate:
    case ErrorCode::kEmptyIndex: return ApiErrorCode::kBadRequest;
    case ErrorCode::kInternal: return ApiErrorCode::kInternal;
  }
  return ApiErrorCode::kInternal;
}

ApiResponse error_response(ApiErrorCode code, const std::string& message) {
  Json body{{"error", {{"code", to_string(code)}, {"message", message}}}};
  return {http_status(code), dump(body) + "\n", "application/json"};
}

Service::Service(ServiceConfig config)
    : Service(config, make_embedder(config.embedder), make_expansion(config)) {}

Service::Service(ServiceConfig config, std::unique_ptr<Embedder> embedder,
                 std::unique_ptr<ExpansionProvider> expansion)
    : config_(std::move(config)),
      embedder_(std::move(embedder)),
      expansion_(std::move(expansion)),
      templates_(initial_templates(config_)),
      index_(config_.embedder.dimension),
      engine_(index_, *embedder_, templates_, *expansion_, config_.engine),
      recommender_(index_) {
  if (embedder_->dimension() != index_.dimension()) {
    fail(ErrorCode::kDimensionMismatch, "embedder and index dimensions differ");
  }
  std::error_code ec;
  if (!config_.snapshot_path.empty() && std::filesystem::exists(config_.snapshot_path, ec)) {
    index_.load_snapshot(config_.snapshot_path);
  }
}

ApiResponse Service::handle(const ApiRequest& request) {
  try {
    return route(request);
  } catch (const Error& e) {
    ApiResponse res = error_response(api_error_code(e.code()), e.what());
    Json body = Json::parse(res.body);
    body["error"]["detail"] = {{"kind", to_string(e.code())}};
    res.body = dump(body) + "\n";
    return res;
  } catch (const std::exception& e) {
    return error_response(ApiErrorCode::kInternal, e.what());
  }
}

ApiResponse Service::route(const ApiRequest& request) {
  const auto& method = request.method;
  const auto& path = request.path;

  if (path == "/v1/healthz" && method == "GET") {
    return ok({{"status", "ok"}, {"dimension", index_.dimension()}, {"doc_count", index_.count()}});
  }
  if (path == "/v1/search" && method == "POST") return search(request);
  if (path == "/v1/recommend" && method == "POST") return recommend(request);
  if (path == "/v1/walk" && method == "POST") return walk(request);
  if (path == "/v1/expand" && method == "POST") return expand(request);
  if (path == "/v1/documents" && method == "POST") return ingest(request);
  if (path == "/v1/templates" && method == "GET") {
    Json list = Json::array();
    for (const auto& tpl : templates_.list()) list.push_back(to_json(tpl));
    return ok(list);
  }
  if (path == "/v1/admin/templates/reload" && method == "POST") return reload_templates();
  if (path == "/v1/admin/snapshot" && method == "GET") {
    return {200, index_.snapshot_string(), "application/x-ndjson"};
  }
  if (path == "/v1/admin/restore" && method == "POST") return restore(request);

  if (path.starts_with(kDocumentsPrefix) && path.size() > kDocumentsPrefix.size()) {
    const std::string id = path.substr(kDocumentsPrefix.size());
    if (method == "GET") return ok(to_json(index_.get(id)));
    if (method == "DELETE") {
      const bool deleted = index_.erase(id);
      if (deleted) persist();
      return ok({{"id", id}, {"deleted", deleted}});
    }
  }
  return error_response(ApiErrorCode::kNotFound, "no route for " + method + " " + path);
}

ApiResponse Service::search(const ApiRequest& request) {
  const QuerySpec spec = query_spec_from_json(parse_body(request));
  auto [compiled, hits] = engine_.search_traced(spec);

  Json body{{"hits", to_json(hits)}, {"compiled_query_norm", norm(compiled.vector.components())}};
  if (const auto it = request.query.find("debug"); it != request.query.end() && it->second == "1") {
    Json terms = Json::array();
    for (const auto& entry : compiled.trace) terms.push_back(to_json(entry));
    body["trace"] = {{"terms", std::move(terms)}};
    if (spec.template_id) body["trace"]["template"] = *spec.template_id;
  }
  return ok(body);
}

ApiResponse Service::recommend(const ApiRequest& request) {
  const Json body = parse_body(request);
  reject_unknown(body, {"seed_ids", "k"});
  const auto seeds = id_list(body, "seed_ids");
  return ok({{"hits", to_json(recommender_.recommend(seeds, k_field(body)))}});
}

ApiResponse Service::walk(const ApiRequest& request) {
  const Json body = parse_body(request);
  reject_unknown(body, {"start", "params", "emit_root_vector"});
  const auto start_it = body.find("start");
  if (start_it == body.end() || !start_it->is_object() || start_it->size() != 1) {
    fail(ErrorCode::kInvalidArgument, "walk 'start' must hold exactly one of doc_id, vector, query_spec");
  }
  const Json& start_json = *start_it;

  std::optional<WalkStart> start;
  if (start_json.contains("doc_id") && start_json["doc_id"].is_string()) {
    start = start_json["doc_id"].get<std::string>();
  } else if (start_json.contains("vector")) {
    start = unit_vector_from_json(start_json["vector"], index_.dimension());
  } else if (start_json.contains("query_spec")) {
    start = engine_.compile_query(query_spec_from_json(start_json["query_spec"]));
  } else {
    fail(ErrorCode::kInvalidArgument, "walk 'start' must hold exactly one of doc_id, vector, query_spec");
  }

  const WalkParams params =
      walk_params_from_json(body.value("params", Json()), config_.walk_defaults);
  bool emit_root_vector = true;
  if (const auto it = body.find("emit_root_vector"); it != body.end()) {
    if (!it->is_boolean()) fail(ErrorCode::kInvalidArgument, "emit_root_vector must be a boolean");
    emit_root_vector = it->get<bool>();
  }

  const RecTree tree = recommender_.walk(*start, params);
  std::vector<std::string> flat = flatten(tree);
  if (tree.doc_id && !flat.empty()) flat.erase(flat.begin());
  return ok({{"tree", to_json(tree, emit_root_vector)}, {"flat", flat}});
}

ApiResponse Service::ingest(const ApiRequest& request) {
  const Embedder* embedder = embedder_.get();
  if (const auto it = request.query.find("embed_missing"); it != request.query.end()) {
    if (it->second == "0" || it->second == "false") embedder = nullptr;
  }
  IngestReport report;
  if (request.content_type.starts_with("application/x-ndjson")) {
    std::istringstream in(request.body);
    report = index_.ingest_lines(in, embedder);
  } else {
    const Json body = parse_body(request);
    std::vector<std::string> items;
    if (body.is_array()) {
      for (const auto& item : body) items.push_back(dump(item));
    } else {
      items.push_back(dump(body));
    }
    report = index_.ingest_documents(items, embedder);
  }
  if (report.ingested > 0) persist();
  return ok(to_json(report));
}

ApiResponse Service::expand(const ApiRequest& request) {
  const Json body = parse_body(request);
  reject_unknown(body, {"query_spec", "liked_ids"});
  if (!body.contains("query_spec")) fail(ErrorCode::kInvalidArgument, "expand needs 'query_spec'");
  const QuerySpec spec = query_spec_from_json(body["query_spec"]);
  const auto liked = body.contains("liked_ids") ? id_list(body, "liked_ids") : std::vector<std::string>{};
  return ok({{"query_spec", to_json(engine_.expand_with_feedback(spec, liked))}});
}

ApiResponse Service::reload_templates() {
  if (config_.templates_path.empty()) {
    fail(ErrorCode::kInvalidArgument, "no template registry file configured");
  }
  templates_.reload(config_.templates_path);
  return ok({{"templates", templates_.list().size()}});
}

ApiResponse Service::restore(const ApiRequest& request) {
  std::istringstream in(request.body);
  index_.restore(in);
  persist();
  return ok({{"restored", index_.count()}});
}

void Service::persist() {
  if (config_.snapshot_path.empty()) return;
  std::lock_guard lock(persist_mutex_);
  const std::string tmp = config_.snapshot_path + ".tmp";
  index_.save_snapshot(tmp);
  std::filesystem::rename(tmp, config_.snapshot_path);
}

}  // namespace vl
