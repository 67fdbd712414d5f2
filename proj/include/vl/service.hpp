#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "vl/config.hpp"
#include "vl/embedder.hpp"
#include "vl/error.hpp"
#include "vl/expansion.hpp"
#include "vl/index.hpp"
#include "vl/query_engine.hpp"
#include "vl/recommender.hpp"
#include "vl/templates.hpp"

namespace vl {

enum class ApiErrorCode {
  kBadRequest,
  kNotFound,
  kDimensionMismatch,
  kDegenerateQuery,
  kProviderUnavailable,
  kInternal,
};

std::string_view to_string(ApiErrorCode code);
int http_status(ApiErrorCode code);
ApiErrorCode api_error_code(ErrorCode code);

struct ApiRequest {
  std::string method;  // GET, POST, DELETE
  std::string path;    // e.g. /v1/documents/doc42
  std::map<std::string, std::string> query;
  std::string body;
  std::string content_type = "application/json";
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// The JSON API, independent of any transport. HttpServer exposes it over
/// HTTP; the CLI calls it in-process with --local. Thread-safe.
class Service {
 public:
  explicit Service(ServiceConfig config);
  Service(ServiceConfig config, std::unique_ptr<Embedder> embedder,
          std::unique_ptr<ExpansionProvider> expansion);

  ApiResponse handle(const ApiRequest& request);

  const ServiceConfig& config() const noexcept { return config_; }
  DocumentIndex& index() noexcept { return index_; }
  const Embedder& embedder() const noexcept { return *embedder_; }
  const TemplateRegistry& templates() const noexcept { return templates_; }
  const QueryEngine& engine() const noexcept { return engine_; }

 private:
  ApiResponse route(const ApiRequest& request);
  ApiResponse search(const ApiRequest& request);
  ApiResponse recommend(const ApiRequest& request);
  ApiResponse walk(const ApiRequest& request);
  ApiResponse ingest(const ApiRequest& request);
  ApiResponse expand(const ApiRequest& request);
  ApiResponse reload_templates();
  ApiResponse restore(const ApiRequest& request);
  void persist();

  ServiceConfig config_;
  std::unique_ptr<Embedder> embedder_;
  std::unique_ptr<ExpansionProvider> expansion_;
  TemplateRegistry templates_;
  DocumentIndex index_;
  QueryEngine engine_;
  Recommender recommender_;
  std::mutex persist_mutex_;
};

ApiResponse error_response(ApiErrorCode code, const std::string& message);

}  // namespace vl
