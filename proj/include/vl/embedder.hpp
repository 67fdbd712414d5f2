#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vl/vecmath.hpp"

namespace vl {

enum class EmbedKind { kText, kImage };

struct EmbedRequest {
  EmbedKind kind = EmbedKind::kText;
  /// UTF-8 text, or an image reference (URL or local path). Payloads starting
  /// with kFixtureSigil are parsed as a literal comma-separated vector.
  std::string payload;
};

inline constexpr std::string_view kFixtureSigil = "fixture:";
inline constexpr std::size_t kMaxTextBytes = 8192;
inline constexpr std::size_t kMaxBatch = 256;

enum class ProviderKind { kMock, kRemote };

struct EmbedderConfig {
  ProviderKind provider = ProviderKind::kMock;
  std::string endpoint;  // remote only, e.g. http://127.0.0.1:9000
  std::chrono::milliseconds timeout{10'000};
  std::size_t dimension = kDefaultDimension;
  std::uint64_t mock_seed = 0;
  std::size_t pool_size = 16;
};

std::string_view to_string(EmbedKind kind);
std::optional<EmbedKind> parse_embed_kind(std::string_view s);

/// Throws BadPayload when the request violates the payload rules.
void validate_request(const EmbedRequest& req);

/// Parses a "fixture:x,y,z" payload into a normalized vector, or returns
/// nullopt when the payload does not carry the sigil.
std::optional<UnitVector> parse_fixture(std::string_view payload, std::size_t dimension);

class Embedder {
 public:
  explicit Embedder(std::size_t dimension) : dimension_(dimension) {}
  virtual ~Embedder() = default;

  std::size_t dimension() const noexcept { return dimension_; }

  UnitVector embed(const EmbedRequest& req) const;

  /// Element-wise embed(), order-preserving. Accepts 1..kMaxBatch requests; a
  /// failing item fails the whole batch and its index is named in the error.
  std::vector<UnitVector> embed_batch(std::span<const EmbedRequest> reqs) const;

 protected:
  /// Called with validated, non-fixture requests only.
  virtual std::vector<UnitVector> embed_validated(std::span<const EmbedRequest> reqs) const = 0;

 private:
  std::size_t dimension_;
};

/// Hash-seeded Gaussian draws projected to the sphere. Deterministic in
/// (payload, seed); carries no semantic similarity between related strings.
class MockEmbedder final : public Embedder {
 public:
  MockEmbedder(std::size_t dimension, std::uint64_t seed) : Embedder(dimension), seed_(seed) {}

  UnitVector embed_payload(std::string_view payload) const;

 protected:
  std::vector<UnitVector> embed_validated(std::span<const EmbedRequest> reqs) const override;

 private:
  std::uint64_t seed_;
};

/// JSON-over-HTTP client: POST {endpoint}/embed.
class RemoteEmbedder final : public Embedder {
 public:
  explicit RemoteEmbedder(const EmbedderConfig& cfg);

 protected:
  std::vector<UnitVector> embed_validated(std::span<const EmbedRequest> reqs) const override;

 private:
  std::string endpoint_;
  std::chrono::milliseconds timeout_;
  mutable std::counting_semaphore<> in_flight_;
};

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& cfg);

}  // namespace vl
