#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "vl/embedder.hpp"
#include "vl/query_engine.hpp"
#include "vl/recommender.hpp"

namespace vl {

struct ServiceConfig {
  EmbedderConfig embedder;
  /// Empty selects the deterministic stub expansion provider.
  std::string expansion_endpoint;
  /// Empty selects the built-in template set.
  std::string templates_path;
  WalkParams walk_defaults = parse_walk_params("L=3,C=3,k=20");
  EngineConfig engine;
  std::string bind_host = "127.0.0.1";
  int port = 8080;
  std::string cors_origin;
  /// Loaded at startup when the file exists.
  std::string snapshot_path;
  /// Static console bundle served under /console when set.
  std::string console_dir;
};

using EnvLookup = std::function<std::optional<std::string>(std::string_view)>;

std::optional<std::string> process_env(std::string_view name);

/// Reads a flat JSON object of settings, then applies VL_* environment
/// overrides. Either source may be absent.
ServiceConfig load_config(const std::optional<std::string>& path, const EnvLookup& env = process_env);
ServiceConfig parse_config(std::string_view json_text, const EnvLookup& env = process_env);

}  // namespace vl
