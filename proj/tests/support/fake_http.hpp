#pragma once

#include <httplib.h>

#include <functional>
#include <string>
#include <thread>

namespace vltest {

/// An httplib server on an ephemeral localhost port, running on a background
/// thread for the lifetime of the object.
class FakeHttpService {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  FakeHttpService(const std::string& path, Handler handler) {
    server_.Post(path, std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~FakeHttpService() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

/// A localhost URL on which nothing listens.
inline std::string unreachable_url() {
  httplib::Server probe;
  const int port = probe.bind_to_any_port("127.0.0.1");
  return "http://127.0.0.1:" + std::to_string(port);
}

}  // namespace vltest
