#pragma once

#include <map>
#include <optional>
#include <string>

#include "vl/vecmath.hpp"

namespace vl {

struct Document {
  std::string id;
  std::string title;
  std::optional<std::string> media_ref;
  std::map<std::string, std::string> metadata;
  UnitVector vector;

  friend bool operator==(const Document&, const Document&) = default;
};

}  // namespace vl
