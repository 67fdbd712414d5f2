#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "vl/service.hpp"

namespace vltest {

/// Thin request builder over an in-process Service.
struct ServiceClient {
  vl::Service& service;

  vl::ApiResponse call(const std::string& method, const std::string& path, const std::string& body = "",
                       std::map<std::string, std::string> query = {},
                       const std::string& content_type = "application/json") const {
    return service.handle({method, path, std::move(query), body, content_type});
  }
  vl::ApiResponse get(const std::string& path) const { return call("GET", path); }
  vl::ApiResponse post(const std::string& path, const nlohmann::json& body,
                       std::map<std::string, std::string> query = {}) const {
    return call("POST", path, body.dump(), std::move(query));
  }
};

/// Schema pointer for the body of a response to (method, path, status).
inline std::string response_schema(const std::string& method, const std::string& path, int status) {
  if (status != 200) return "#/responses/error";
  if (path == "/v1/healthz") return "#/responses/healthz";
  if (path == "/v1/search") return "#/responses/search";
  if (path == "/v1/recommend") return "#/responses/recommend";
  if (path == "/v1/walk") return "#/responses/walk";
  if (path == "/v1/expand") return "#/responses/expand";
  if (path == "/v1/documents") return "#/responses/ingest";
  if (path == "/v1/templates") return "#/responses/templates";
  if (path == "/v1/admin/templates/reload") return "#/responses/reload";
  if (path == "/v1/admin/snapshot") return "#/responses/snapshot_line";
  if (path == "/v1/admin/restore") return "#/responses/restore";
  if (path.starts_with("/v1/documents/")) return method == "DELETE" ? "#/responses/delete" : "#/responses/document";
  return "";
}

}  // namespace vltest
