#pragma once

#include <string>
#include <string_view>

namespace vl::detail {

/// Splits "http://host:port/prefix" into the httplib scheme-host-port part
/// and a path prefix without trailing slash.
struct SplitUrl {
  std::string origin;
  std::string path_prefix;
};

inline SplitUrl split_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  const auto host_start = scheme_end == std::string_view::npos ? 0 : scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  SplitUrl out;
  if (path_start == std::string_view::npos) {
    out.origin = std::string(url);
  } else {
    out.origin = std::string(url.substr(0, path_start));
    out.path_prefix = std::string(url.substr(path_start));
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
  }
  return out;
}

}  // namespace vl::detail
