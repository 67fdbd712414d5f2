#include "vl/http_server.hpp"

#include <httplib.h>

namespace vl {

HttpServer::HttpServer(Service& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  const std::string cors = service_.config().cors_origin;

  const auto forward = [this, cors](const httplib::Request& req, httplib::Response& res) {
    ApiRequest request{req.method, req.path, {}, req.body, req.get_header_value("Content-Type")};
    if (request.content_type.empty()) request.content_type = "application/json";
    for (const auto& [key, value] : req.params) request.query.emplace(key, value);
    const ApiResponse response = service_.handle(request);
    res.status = response.status;
    res.set_content(response.body, response.content_type);
    if (!cors.empty()) res.set_header("Access-Control-Allow-Origin", cors);
  };

  server_->Get(R"(/v1/.*)", forward);
  server_->Post(R"(/v1/.*)", forward);
  server_->Delete(R"(/v1/.*)", forward);
  server_->Options(R"(/v1/.*)", [cors](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    if (!cors.empty()) {
      res.set_header("Access-Control-Allow-Origin", cors);
      res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    }
  });

  if (!service_.config().console_dir.empty()) {
    server_->set_mount_point("/console", service_.config().console_dir);
  }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

void HttpServer::serve() { server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_->is_running()) server_->stop();
}

}  // namespace vl
