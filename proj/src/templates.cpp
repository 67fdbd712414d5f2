#include "vl/templates.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>

#include "vl/error.hpp"
#include "vl/json_codec.hpp"

namespace vl {
namespace {

std::size_t count_placeholders(std::string_view pattern) {
  std::size_t n = 0;
  for (auto pos = pattern.find(kQueryPlaceholder); pos != std::string_view::npos;
       pos = pattern.find(kQueryPlaceholder, pos + kQueryPlaceholder.size())) {
    ++n;
  }
  return n;
}

std::vector<PromptTemplate> checked(std::vector<PromptTemplate> templates) {
  std::vector<std::string> ids;
  for (const auto& tpl : templates) {
    validate_template(tpl);
    ids.push_back(tpl.id);
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    fail(ErrorCode::kInvalidArgument, "duplicate template id in registry");
  }
  std::sort(templates.begin(), templates.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  return templates;
}

}  // namespace

void validate_template(const PromptTemplate& tpl) {
  if (tpl.id.empty()) fail(ErrorCode::kInvalidArgument, "template id must be nonempty");
  if (count_placeholders(tpl.pattern) != 1) {
    fail(ErrorCode::kInvalidArgument,
         "template '" + tpl.id + "' must contain " + std::string(kQueryPlaceholder) + " exactly once");
  }
}

std::string render_template(const PromptTemplate& tpl, std::string_view query_text) {
  std::string out = tpl.pattern;
  const auto pos = out.find(kQueryPlaceholder);
  if (pos == std::string::npos) {
    fail(ErrorCode::kInvalidArgument, "template '" + tpl.id + "' has no placeholder");
  }
  out.replace(pos, kQueryPlaceholder.size(), query_text);
  return out;
}

TemplateRegistry::TemplateRegistry() : TemplateRegistry(default_templates()) {}

TemplateRegistry::TemplateRegistry(std::vector<PromptTemplate> templates)
    : templates_(checked(std::move(templates))) {}

std::vector<PromptTemplate> TemplateRegistry::default_templates() {
  return {
      {"monochrome", "A black and white, monochromatic image of a <QUERY>",
       "Black and white photography"},
      {"boho", "A bohemian (boho) style image of a <QUERY>, rich in patterns, colors, and textures",
       "Bohemian style"},
      {"photo", "A photo of a <QUERY>", "Plain caption prefix"},
  };
}

std::vector<PromptTemplate> TemplateRegistry::parse(std::string_view json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("template registry is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) fail(ErrorCode::kInvalidArgument, "template registry must be a JSON array");
  std::vector<PromptTemplate> out;
  for (const auto& item : j) out.push_back(template_from_json(item));
  return checked(std::move(out));
}

TemplateRegistry TemplateRegistry::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kFileUnreadable, "cannot read template registry " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return TemplateRegistry(parse(buffer.str()));
}

PromptTemplate TemplateRegistry::get(const std::string& id) const {
  std::shared_lock lock(mutex_);
  for (const auto& tpl : templates_) {
    if (tpl.id == id) return tpl;
  }
  fail(ErrorCode::kUnknownTemplate, "unknown template '" + id + "'");
}

bool TemplateRegistry::contains(const std::string& id) const {
  std::shared_lock lock(mutex_);
  return std::any_of(templates_.begin(), templates_.end(),
                     [&](const auto& tpl) { return tpl.id == id; });
}

std::vector<PromptTemplate> TemplateRegistry::list() const {
  std::shared_lock lock(mutex_);
  return templates_;
}

void TemplateRegistry::reload(const std::string& path) {
  replace(from_file(path).list());
}

void TemplateRegistry::replace(std::vector<PromptTemplate> templates) {
  auto fresh = checked(std::move(templates));
  std::unique_lock lock(mutex_);
  templates_ = std::move(fresh);
}

}  // namespace vl
