#include "vl/templates.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "vl/error.hpp"

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
  const auto path = (std::filesystem::temp_directory_path() / ("vl_templates_" + name)).string();
  std::ofstream(path) << body;
  return path;
}

}  // namespace

TEST(RenderTemplate, Monochrome) {
  const vl::PromptTemplate tpl{"mono", "A black and white, monochromatic image of a <QUERY>", ""};
  EXPECT_EQ(vl::render_template(tpl, "chair"), "A black and white, monochromatic image of a chair");
}

TEST(RenderTemplate, IdentityTemplate) {
  EXPECT_EQ(vl::render_template({"id", "<QUERY>", ""}, "sofa"), "sofa");
}

TEST(RenderTemplate, Boho) {
  const vl::PromptTemplate tpl{
      "boho", "A bohemian (boho) style image of a <QUERY>, rich in patterns, colors, and textures", ""};
  EXPECT_EQ(vl::render_template(tpl, "rug"),
            "A bohemian (boho) style image of a rug, rich in patterns, colors, and textures");
}

TEST(RenderTemplate, SubstitutesOnceAndKeepsQueryVerbatim) {
  std::mt19937 rng(17);
  const std::string alphabet = "abcXYZ <>{}QUERY:,.-";
  for (int trial = 0; trial < 500; ++trial) {
    std::string prefix, suffix, query;
    for (int i = 0; i < static_cast<int>(rng() % 12); ++i) prefix += alphabet[rng() % alphabet.size()];
    for (int i = 0; i < static_cast<int>(rng() % 12); ++i) suffix += alphabet[rng() % alphabet.size()];
    for (int i = 0; i < 1 + static_cast<int>(rng() % 12); ++i) query += alphabet[rng() % alphabet.size()];
    const vl::PromptTemplate tpl{"t", prefix + "<QUERY>" + suffix, ""};
    if (prefix.find("<QUERY>") != std::string::npos || suffix.find("<QUERY>") != std::string::npos ||
        (prefix + "<QUERY>" + suffix).find("<QUERY>", prefix.size() + 1) != std::string::npos ||
        query.find("<QUERY>") != std::string::npos) {
      continue;
    }
    const auto out = vl::render_template(tpl, query);
    EXPECT_EQ(out, prefix + query + suffix);
    EXPECT_NE(out.find(query), std::string::npos);
  }
}

TEST(PromptTemplate, PlaceholderMustAppearExactlyOnce) {
  EXPECT_THROW(vl::validate_template({"none", "a photo", ""}), vl::Error);
  EXPECT_THROW(vl::validate_template({"two", "<QUERY> and <QUERY>", ""}), vl::Error);
  EXPECT_THROW(vl::validate_template({"", "<QUERY>", ""}), vl::Error);
  EXPECT_NO_THROW(vl::validate_template({"ok", "<QUERY>", ""}));
}

TEST(TemplateRegistry, DefaultsIncludeMonochrome) {
  vl::TemplateRegistry registry;
  EXPECT_EQ(registry.get("monochrome").pattern, "A black and white, monochromatic image of a <QUERY>");
  EXPECT_TRUE(registry.contains("boho"));
  try {
    registry.get("nope");
    FAIL();
  } catch (const vl::Error& e) {
    EXPECT_EQ(e.code(), vl::ErrorCode::kUnknownTemplate);
  }
}

TEST(TemplateRegistry, LoadsAndReloadsFromFile) {
  const auto path = write_temp("a.json", R"([{"id":"x","pattern":"An x of <QUERY>","description":"x"}])");
  auto registry = vl::TemplateRegistry::from_file(path);
  EXPECT_EQ(registry.list().size(), 1u);

  std::ofstream(path) << R"([{"id":"y","pattern":"<QUERY> y"},{"id":"z","pattern":"z <QUERY>"}])";
  registry.reload(path);
  EXPECT_FALSE(registry.contains("x"));
  EXPECT_EQ(registry.list().size(), 2u);

  std::ofstream(path) << R"([{"id":"broken","pattern":"no placeholder"}])";
  EXPECT_THROW(registry.reload(path), vl::Error);
  EXPECT_EQ(registry.list().size(), 2u);
  std::filesystem::remove(path);
}

TEST(TemplateRegistry, RejectsDuplicateIdsAndNonArrays) {
  EXPECT_THROW(vl::TemplateRegistry::parse(R"([{"id":"a","pattern":"<QUERY>"},{"id":"a","pattern":"<QUERY>!"}])"),
               vl::Error);
  EXPECT_THROW(vl::TemplateRegistry::parse(R"({"id":"a"})"), vl::Error);
}
