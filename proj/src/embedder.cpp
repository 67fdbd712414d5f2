#include "vl/embedder.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <regex>

#include <httplib.h>
#include <json.hpp>

#include "http_util.hpp"
#include "vl/error.hpp"
#include "vl/random.hpp"

namespace vl {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool looks_like_url(const std::string& s) {
  static const std::regex kUrl(R"(^[A-Za-z][A-Za-z0-9+.\-]*://\S+$)");
  return std::regex_match(s, kUrl);
}

void check_width(std::size_t got, std::size_t want) {
  if (got != want) {
    fail(ErrorCode::kDimensionMismatch,
         "embedding has dimension " + std::to_string(got) + ", expected " + std::to_string(want));
  }
}

}  // namespace

std::string_view to_string(EmbedKind kind) {
  return kind == EmbedKind::kText ? "text" : "image";
}

std::optional<EmbedKind> parse_embed_kind(std::string_view s) {
  if (s == "text") return EmbedKind::kText;
  if (s == "image") return EmbedKind::kImage;
  return std::nullopt;
}

void validate_request(const EmbedRequest& req) {
  if (req.payload.starts_with(kFixtureSigil)) return;
  if (req.kind == EmbedKind::kText) {
    if (trim(req.payload).empty()) fail(ErrorCode::kBadPayload, "text payload is empty");
    if (req.payload.size() > kMaxTextBytes) {
      fail(ErrorCode::kBadPayload, "text payload exceeds " + std::to_string(kMaxTextBytes) + " bytes");
    }
    return;
  }
  if (looks_like_url(req.payload)) return;
  std::error_code ec;
  if (!req.payload.empty() && std::filesystem::exists(req.payload, ec)) return;
  fail(ErrorCode::kBadPayload, "image reference is neither a URL nor an existing path: " + req.payload);
}

std::optional<UnitVector> parse_fixture(std::string_view payload, std::size_t dimension) {
  if (!payload.starts_with(kFixtureSigil)) return std::nullopt;
  std::string_view rest = payload.substr(kFixtureSigil.size());
  std::vector<double> values;
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view token = trim(rest.substr(0, comma));
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
      fail(ErrorCode::kBadPayload, "malformed fixture component '" + std::string(token) + "'");
    }
    values.push_back(value);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  check_width(values.size(), dimension);
  return normalize(values);
}

UnitVector Embedder::embed(const EmbedRequest& req) const {
  return embed_batch(std::span(&req, 1)).front();
}

std::vector<UnitVector> Embedder::embed_batch(std::span<const EmbedRequest> reqs) const {
  if (reqs.empty()) fail(ErrorCode::kBadPayload, "embedding batch is empty");
  if (reqs.size() > kMaxBatch) {
    fail(ErrorCode::kBadPayload, "embedding batch exceeds " + std::to_string(kMaxBatch) + " items");
  }

  std::vector<std::optional<UnitVector>> slots(reqs.size());
  std::vector<EmbedRequest> pending;
  std::vector<std::size_t> pending_index;
  for (std::size_t i = 0; i < reqs.size(); ++i) {
    try {
      validate_request(reqs[i]);
      if (auto fixture = parse_fixture(reqs[i].payload, dimension_)) {
        slots[i] = std::move(*fixture);
      } else {
        pending.push_back(reqs[i]);
        pending_index.push_back(i);
      }
    } catch (const Error& e) {
      if (reqs.size() == 1) throw;
      fail(e.code(), "batch item " + std::to_string(i) + ": " + e.what());
    }
  }

  if (!pending.empty()) {
    auto vectors = embed_validated(pending);
    for (std::size_t j = 0; j < vectors.size(); ++j) {
      check_width(vectors[j].dimension(), dimension_);
      slots[pending_index[j]] = std::move(vectors[j]);
    }
  }

  std::vector<UnitVector> out;
  out.reserve(slots.size());
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

UnitVector MockEmbedder::embed_payload(std::string_view payload) const {
  CounterStream stream(mix_keys(fnv1a64(payload), seed_));
  std::vector<double> draws(dimension());
  for (double& x : draws) x = stream.next_normal();
  return normalize(draws);
}

std::vector<UnitVector> MockEmbedder::embed_validated(std::span<const EmbedRequest> reqs) const {
  std::vector<UnitVector> out;
  out.reserve(reqs.size());
  for (const auto& req : reqs) out.push_back(embed_payload(req.payload));
  return out;
}

RemoteEmbedder::RemoteEmbedder(const EmbedderConfig& cfg)
    : Embedder(cfg.dimension),
      endpoint_(cfg.endpoint),
      timeout_(cfg.timeout),
      in_flight_(static_cast<std::ptrdiff_t>(std::max<std::size_t>(cfg.pool_size, 1))) {
  if (endpoint_.empty()) fail(ErrorCode::kInvalidArgument, "remote embedder requires an endpoint");
  if (timeout_.count() <= 0) fail(ErrorCode::kInvalidArgument, "embedder timeout must be positive");
}

std::vector<UnitVector> RemoteEmbedder::embed_validated(std::span<const EmbedRequest> reqs) const {
  using nlohmann::json;
  json body;
  body["inputs"] = json::array();
  for (const auto& req : reqs) {
    body["inputs"].push_back({{"kind", to_string(req.kind)}, {"payload", req.payload}});
  }

  const auto url = detail::split_url(endpoint_);
  httplib::Result res;
  {
    in_flight_.acquire();
    struct Release {
      std::counting_semaphore<>& s;
      ~Release() { s.release(); }
    } release{in_flight_};

    httplib::Client client(url.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    res = client.Post(url.path_prefix + "/embed", body.dump(), "application/json");
  }

  if (!res) {
    fail(ErrorCode::kProviderUnavailable,
         "embedding service " + endpoint_ + " unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    fail(res->status >= 500 ? ErrorCode::kProviderUnavailable : ErrorCode::kBadPayload,
         "embedding service returned HTTP " + std::to_string(res->status));
  }

  json reply;
  try {
    reply = json::parse(res->body);
  } catch (const json::exception& e) {
    fail(ErrorCode::kProviderUnavailable, std::string("embedding service sent invalid JSON: ") + e.what());
  }
  if (!reply.contains("vectors") || !reply["vectors"].is_array() ||
      reply["vectors"].size() != reqs.size()) {
    fail(ErrorCode::kProviderUnavailable, "embedding service response lacks one vector per input");
  }
  if (reply.contains("dimension") && reply["dimension"].is_number_unsigned()) {
    check_width(reply["dimension"].get<std::size_t>(), dimension());
  }

  std::vector<UnitVector> out;
  out.reserve(reqs.size());
  for (const auto& row : reply["vectors"]) {
    std::vector<double> v;
    try {
      v = row.get<std::vector<double>>();
    } catch (const json::exception&) {
      fail(ErrorCode::kProviderUnavailable, "embedding service returned a non-numeric vector");
    }
    check_width(v.size(), dimension());
    const double n = norm(v);
    out.push_back(std::abs(n - 1.0) > kUnitTolerance ? normalize(v) : UnitVector::from_unit(std::move(v)));
  }
  return out;
}

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& cfg) {
  if (cfg.dimension == 0) fail(ErrorCode::kInvalidArgument, "dimension must be positive");
  if (cfg.provider == ProviderKind::kRemote) return std::make_unique<RemoteEmbedder>(cfg);
  return std::make_unique<MockEmbedder>(cfg.dimension, cfg.mock_seed);
}

}  // namespace vl
