#include "vl/expansion.hpp"

#include <algorithm>
#include <map>

#include <httplib.h>
#include <json.hpp>

#include "http_util.hpp"
#include "vl/error.hpp"

namespace vl {
namespace {

std::string trimmed(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

std::vector<std::string> StubExpansionProvider::expansion_terms(
    std::string_view /*query*/, std::span<const Document> feedback) const {
  std::map<std::string, std::size_t> counts;
  for (const auto& doc : feedback) {
    const auto it = doc.metadata.find(std::string(kTagKey));
    if (it == doc.metadata.end()) continue;
    std::string_view rest = it->second;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      if (auto tag = trimmed(rest.substr(0, comma)); !tag.empty()) ++counts[tag];
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }

  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < kTopTerms; ++i) out.push_back(ranked[i].first);
  return out;
}

RemoteExpansionProvider::RemoteExpansionProvider(std::string endpoint,
                                                 std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {}

std::vector<std::string> RemoteExpansionProvider::expansion_terms(
    std::string_view query, std::span<const Document> feedback) const {
  using nlohmann::json;
  if (feedback.empty()) return {};

  json body{{"query", query}, {"feedback", json::array()}};
  for (const auto& doc : feedback) {
    json item{{"id", doc.id}, {"title", doc.title}, {"metadata", doc.metadata}};
    if (doc.media_ref) item["media_ref"] = *doc.media_ref;
    body["feedback"].push_back(std::move(item));
  }

  const auto url = detail::split_url(endpoint_);
  httplib::Client client(url.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  auto res = client.Post(url.path_prefix + "/expand", body.dump(), "application/json");
  if (!res || res->status != 200) {
    fail(ErrorCode::kProviderUnavailable, "expansion provider " + endpoint_ + " unavailable");
  }

  std::vector<std::string> terms;
  try {
    const json reply = json::parse(res->body);
    for (const auto& t : reply.at("terms")) {
      if (auto term = trimmed(t.get<std::string>()); !term.empty()) terms.push_back(std::move(term));
      if (terms.size() == kMaxExpansionTerms) break;
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kProviderUnavailable, std::string("expansion provider sent malformed reply: ") + e.what());
  }
  return terms;
}

}  // namespace vl
