#pragma once

#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace vl {

inline constexpr std::string_view kQueryPlaceholder = "<QUERY>";

/// A caption-style prompt with exactly one <QUERY> placeholder.
struct PromptTemplate {
  std::string id;
  std::string pattern;
  std::string description;

  friend bool operator==(const PromptTemplate&, const PromptTemplate&) = default;
};

/// Throws InvalidArgument unless the id is nonempty and the pattern holds the
/// placeholder exactly once.
void validate_template(const PromptTemplate& tpl);

/// Replaces the placeholder with `query_text`; nothing else is touched.
std::string render_template(const PromptTemplate& tpl, std::string_view query_text);

/// Thread-safe set of templates keyed by id, loadable from a JSON array of
/// {id, pattern, description}.
class TemplateRegistry {
 public:
  TemplateRegistry();  // seeded with default_templates()
  explicit TemplateRegistry(std::vector<PromptTemplate> templates);

  static std::vector<PromptTemplate> default_templates();
  static std::vector<PromptTemplate> parse(std::string_view json_text);
  static TemplateRegistry from_file(const std::string& path);

  PromptTemplate get(const std::string& id) const;  // UnknownTemplate
  bool contains(const std::string& id) const;
  std::vector<PromptTemplate> list() const;  // sorted by id

  /// Atomically swaps in the templates from `path`; on error the registry is
  /// left unchanged.
  void reload(const std::string& path);
  void replace(std::vector<PromptTemplate> templates);

 private:
  mutable std::shared_mutex mutex_;
  std::vector<PromptTemplate> templates_;
};

}  // namespace vl
