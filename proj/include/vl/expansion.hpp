#pragma once

#include <chrono>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vl/document.hpp"

namespace vl {

inline constexpr std::size_t kMaxExpansionTerms = 8;

/// Source of query-expansion terms derived from documents the user liked.
class ExpansionProvider {
 public:
  virtual ~ExpansionProvider() = default;

  /// Returns at most kMaxExpansionTerms short terms. Empty feedback yields an
  /// empty list without consulting the backend.
  virtual std::vector<std::string> expansion_terms(std::string_view query,
                                                   std::span<const Document> feedback) const = 0;
};

/// Deterministic stand-in for a vision LLM: the three most frequent values of
/// the "tags" metadata field (comma-separated) across the feedback documents,
/// ties broken lexicographically.
class StubExpansionProvider final : public ExpansionProvider {
 public:
  static constexpr std::string_view kTagKey = "tags";
  static constexpr std::size_t kTopTerms = 3;

  std::vector<std::string> expansion_terms(std::string_view query,
                                           std::span<const Document> feedback) const override;
};

/// POST {endpoint}/expand with {"query", "feedback":[{id,title,media_ref,metadata}]}
/// and expects {"terms":[string,...]}.
class RemoteExpansionProvider final : public ExpansionProvider {
 public:
  RemoteExpansionProvider(std::string endpoint, std::chrono::milliseconds timeout);

  std::vector<std::string> expansion_terms(std::string_view query,
                                           std::span<const Document> feedback) const override;

 private:
  std::string endpoint_;
  std::chrono::milliseconds timeout_;
};

}  // namespace vl
