#pragma once

// JSON wire formats shared by the index files, the HTTP API and the CLI.
// Parsing failures throw vl::Error (InvalidArgument for request bodies,
// MalformedDocument for documents).

#include <optional>
#include <string>

#include <json.hpp>

#include "vl/document.hpp"
#include "vl/index.hpp"
#include "vl/query_engine.hpp"
#include "vl/recommender.hpp"
#include "vl/templates.hpp"

namespace vl {

class Embedder;

using Json = nlohmann::json;

Json to_json(const UnitVector& v);
UnitVector unit_vector_from_json(const Json& j, std::size_t dimension);

/// {"id","title","media_ref"?,"metadata"?,"vector"}
Json to_json(const Document& doc);
/// Accepts the ingestion shape: "vector" may be replaced by
/// "text_for_embedding" (or a bare media_ref) when `embedder` is non-null.
Document document_from_json(const Json& j, std::size_t dimension, const Embedder* embedder);

Json to_json(const SearchHit& hit);
Json to_json(const std::vector<SearchHit>& hits);
std::vector<SearchHit> hits_from_json(const Json& j);

Json to_json(const QuerySpec& spec);
QuerySpec query_spec_from_json(const Json& j);

Json to_json(const PromptTemplate& tpl);
PromptTemplate template_from_json(const Json& j);

Json to_json(const WalkParams& params);
WalkParams walk_params_from_json(const Json& j, WalkParams defaults);

/// Root carries "vector" when `emit_root_vector`; other nodes carry doc_id
/// and children only.
Json to_json(const RecTree& tree, bool emit_root_vector = true);

Json to_json(const IngestReport& report);
Json to_json(const TraceEntry& entry);

/// Serialization used for every response body and file line: compact, keys
/// sorted, shortest round-trip formatting for doubles.
std::string dump(const Json& j);

}  // namespace vl
