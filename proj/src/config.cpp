#include "vl/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "vl/error.hpp"
#include "vl/json_codec.hpp"

namespace vl {
namespace {

template <typename T>
T parse_number(std::string_view name, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    fail(ErrorCode::kInvalidArgument, "setting " + std::string(name) + " has invalid value '" + text + "'");
  }
  return value;
}

ProviderKind parse_provider(const std::string& text) {
  if (text == "mock") return ProviderKind::kMock;
  if (text == "remote") return ProviderKind::kRemote;
  fail(ErrorCode::kInvalidArgument, "embedder provider must be 'mock' or 'remote', got '" + text + "'");
}

std::string as_text(const Json& value) {
  return value.is_string() ? value.get<std::string>() : value.dump();
}

void apply(ServiceConfig& cfg, std::string_view key, const std::string& value) {
  if (key == "dimension") {
    cfg.embedder.dimension = parse_number<std::size_t>(key, value);
  } else if (key == "embedder_provider") {
    cfg.embedder.provider = parse_provider(value);
  } else if (key == "embed_endpoint") {
    cfg.embedder.endpoint = value;
  } else if (key == "embed_timeout_ms") {
    cfg.embedder.timeout = std::chrono::milliseconds(parse_number<long>(key, value));
  } else if (key == "mock_seed") {
    cfg.embedder.mock_seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "embed_pool_size") {
    cfg.embedder.pool_size = parse_number<std::size_t>(key, value);
  } else if (key == "expansion_endpoint") {
    cfg.expansion_endpoint = value;
  } else if (key == "templates_path") {
    cfg.templates_path = value;
  } else if (key == "walk_defaults") {
    cfg.walk_defaults = parse_walk_params(value, cfg.walk_defaults);
  } else if (key == "context_alpha") {
    cfg.engine.context_alpha = parse_number<double>(key, value);
  } else if (key == "demote_weight") {
    cfg.engine.demote_weight = parse_number<double>(key, value);
  } else if (key == "expansion_weight") {
    cfg.engine.expansion_weight = parse_number<double>(key, value);
  } else if (key == "bind") {
    cfg.bind_host = value;
  } else if (key == "port") {
    cfg.port = parse_number<int>(key, value);
  } else if (key == "cors_origin") {
    cfg.cors_origin = value;
  } else if (key == "snapshot_path") {
    cfg.snapshot_path = value;
  } else if (key == "console_dir") {
    cfg.console_dir = value;
  } else {
    fail(ErrorCode::kInvalidArgument, "unknown setting '" + std::string(key) + "'");
  }
}

struct EnvBinding {
  std::string_view env;
  std::string_view key;
};

constexpr EnvBinding kEnvBindings[] = {
    {"VL_EMBED_PROVIDER", "embedder_provider"},   {"VL_EMBED_ENDPOINT", "embed_endpoint"},
    {"VL_EMBED_TIMEOUT_MS", "embed_timeout_ms"},  {"VL_EMBED_DIM", "dimension"},
    {"VL_MOCK_SEED", "mock_seed"},                {"VL_EMBED_POOL", "embed_pool_size"},
    {"VL_EXPANSION_ENDPOINT", "expansion_endpoint"}, {"VL_TEMPLATES", "templates_path"},
    {"VL_WALK_DEFAULTS", "walk_defaults"},        {"VL_CONTEXT_ALPHA", "context_alpha"},
    {"VL_DEMOTE_WEIGHT", "demote_weight"},        {"VL_EXPANSION_WEIGHT", "expansion_weight"},
    {"VL_BIND", "bind"},                          {"VL_PORT", "port"},
    {"VL_CORS_ORIGIN", "cors_origin"},            {"VL_SNAPSHOT", "snapshot_path"},
    {"VL_CONSOLE_DIR", "console_dir"},
};

}  // namespace

std::optional<std::string> process_env(std::string_view name) {
  if (const char* v = std::getenv(std::string(name).c_str())) return std::string(v);
  return std::nullopt;
}

ServiceConfig parse_config(std::string_view json_text, const EnvLookup& env) {
  ServiceConfig cfg;
  if (!json_text.empty()) {
    Json j;
    try {
      j = Json::parse(json_text);
    } catch (const Json::exception& e) {
      fail(ErrorCode::kInvalidArgument, std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) fail(ErrorCode::kInvalidArgument, "config must be a JSON object");
    for (const auto& [key, value] : j.items()) apply(cfg, key, as_text(value));
  }

  bool provider_from_env = false;
  for (const auto& [name, key] : kEnvBindings) {
    if (auto value = env(name)) {
      apply(cfg, key, *value);
      provider_from_env |= key == "embedder_provider";
    }
  }
  // An endpoint given through the environment alone implies the remote provider.
  if (!provider_from_env && env("VL_EMBED_ENDPOINT")) cfg.embedder.provider = ProviderKind::kRemote;

  if (cfg.embedder.dimension == 0) fail(ErrorCode::kInvalidArgument, "dimension must be positive");
  if (cfg.embedder.timeout.count() <= 0) fail(ErrorCode::kInvalidArgument, "embed timeout must be positive");
  validate(cfg.walk_defaults);
  return cfg;
}

ServiceConfig load_config(const std::optional<std::string>& path, const EnvLookup& env) {
  if (!path) return parse_config("", env);
  std::ifstream in(*path);
  if (!in) fail(ErrorCode::kFileUnreadable, "cannot read config " + *path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), env);
}

}  // namespace vl
