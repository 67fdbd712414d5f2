#include "vl/recommender.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "support/oracles.hpp"
#include "support/test_helpers.hpp"
#include "support/walk_checks.hpp"
#include "vl/error.hpp"
#include "vl/json_codec.hpp"
#include "vl/random.hpp"

using vl::ErrorCode;
using vl::WalkParams;
using vltest::doc;
using vltest::max_abs_diff;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const vl::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected vl::Error";
  return ErrorCode::kInternal;
}

WalkParams params(std::size_t layers, std::size_t children, std::size_t k, std::uint64_t seed = 1) {
  WalkParams p;
  p.layers = layers;
  p.children = children;
  p.neighbours = k;
  p.seed = seed;
  return p;
}

void fill_random(vl::DocumentIndex& index, std::mt19937_64& rng, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    index.upsert({"d" + std::to_string(i), "", std::nullopt, {}, vl::normalize(oracle::random_unit(rng, index.dimension()))});
  }
}

}  // namespace

TEST(Ensemble, SingletonReturnsItsVector) {
  vl::DocumentIndex index(3);
  index.upsert(doc("x", {1, 2, 3}));
  vl::Recommender rec(index);
  const std::vector<std::string> ids{"x"};
  EXPECT_EQ(rec.ensemble(ids), index.get("x").vector);
}

TEST(Ensemble, OrthogonalPairMidpoint) {
  vl::DocumentIndex index(2);
  index.upsert(doc("x", {1, 0}));
  index.upsert(doc("y", {0, 1}));
  vl::Recommender rec(index);
  const std::vector<std::string> ids{"x", "y"};
  const auto v = rec.ensemble(ids);
  EXPECT_NEAR(v[0], 0.70711, 1e-5);
  EXPECT_NEAR(v[1], 0.70711, 1e-5);
}

TEST(Ensemble, ThreeItemsMatchSecondTranscription) {
  vl::DocumentIndex index(3);
  index.upsert(doc("x", {1, 0, 0}));
  index.upsert(doc("y", {0, 1, 0}));
  index.upsert(doc("z", {0, 0, 1}));
  vl::Recommender rec(index);
  const std::vector<std::string> ids{"x", "y", "z"};
  const auto expected = oracle::hierarchical_slerp({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {1, 1, 1});
  EXPECT_LT(max_abs_diff(rec.ensemble(ids), expected), 1e-9);
}

TEST(Ensemble, UnknownIdAndEmptyList) {
  vl::DocumentIndex index(2);
  index.upsert(doc("x", {1, 0}));
  vl::Recommender rec(index);
  const std::vector<std::string> ghost{"x", "ghost"};
  EXPECT_EQ(code_of([&] { rec.ensemble(ghost); }), ErrorCode::kNotFound);
  EXPECT_EQ(code_of([&] { rec.ensemble({}); }), ErrorCode::kInvalidArgument);
}

TEST(Recommend, SingleSeedMatchesOracle) {
  std::mt19937_64 rng(4);
  vl::DocumentIndex index(6);
  fill_random(index, rng, 40);
  vl::Recommender rec(index);
  const std::vector<std::string> seeds{"d7"};
  const auto hits = rec.recommend(seeds, 3);
  const auto expected = oracle::linear_scan(vltest::oracle_docs(index), vltest::raw(index.get("d7").vector), 3, {}, {"d7"});
  ASSERT_EQ(hits.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(hits[i].id, expected[i].first);
}

TEST(Recommend, AllSeedsExcluded) {
  vl::DocumentIndex index(2);
  index.upsert(doc("x", {1, 0}));
  index.upsert(doc("y", {0.9, 0.1}));
  vl::Recommender rec(index);
  const std::vector<std::string> seeds{"x", "y"};
  EXPECT_TRUE(rec.recommend(seeds, 5).empty());
}

TEST(Recommend, PlantedMidpointRanksFirst) {
  vl::DocumentIndex index(3);
  index.upsert(doc("x", {1, 0, 0}));
  index.upsert(doc("y", {0, 1, 0}));
  index.upsert(doc("mid", {0.70711, 0.70711, 0}));
  index.upsert(doc("near_x", {0.95, 0.05, 0.3}));
  index.upsert(doc("other", {0, 0, 1}));
  vl::Recommender rec(index);
  const std::vector<std::string> seeds{"x", "y"};
  const auto hits = rec.recommend(seeds, 3);
  ASSERT_FALSE(hits.empty());
  EXPECT_EQ(hits[0].id, "mid");
}

TEST(Walk, SingleLayerHasNoChildren) {
  vl::DocumentIndex index(2);
  index.upsert(doc("x", {1, 0}));
  index.upsert(doc("y", {0, 1}));
  vl::Recommender rec(index);
  const auto tree = rec.walk(std::string("x"), params(1, 3, 5));
  EXPECT_EQ(tree.doc_id, "x");
  EXPECT_TRUE(tree.children.empty());
  EXPECT_TRUE(rec.walk_flat(std::string("x"), params(1, 3, 5)).empty());
}

TEST(Walk, TwoLayersReplaysSeededSampling) {
  vl::DocumentIndex index(2);
  index.upsert(doc("a", {1, 0}));
  index.upsert(doc("b", {0.8, 0.6}));
  index.upsert(doc("c", {0, 1}));
  vl::Recommender rec(index);
  const auto start = vltest::uv({1, 0.2});
  const WalkParams p = params(2, 2, 3, 12345);
  const auto tree = rec.walk(start, p);
  ASSERT_EQ(tree.children.size(), 2u);
  EXPECT_FALSE(tree.doc_id.has_value());

  // Replay: linear-scan neighbours, then a partial Fisher-Yates driven by the
  // root's stream.
  const auto neighbours = oracle::linear_scan(vltest::oracle_docs(index), vltest::raw(start), 3);
  std::vector<std::size_t> order(neighbours.size());
  std::iota(order.begin(), order.end(), 0);
  vl::CounterStream stream(vl::mix_keys(p.seed, 0));
  for (std::size_t i = 0; i < 2; ++i) std::swap(order[i], order[i + stream.next_below(order.size() - i)]);
  const std::vector<std::string> expected{neighbours[order[0]].first, neighbours[order[1]].first};

  EXPECT_EQ(tree.children[0].doc_id, expected[0]);
  EXPECT_EQ(tree.children[1].doc_id, expected[1]);
  EXPECT_EQ(rec.walk_flat(start, p), expected);
}

TEST(Walk, SmallCorpusExhaustsWithoutRepeats) {
  vl::DocumentIndex index(3);
  index.upsert(doc("a", {1, 0, 0}));
  index.upsert(doc("b", {0, 1, 0}));
  index.upsert(doc("c", {0, 0, 1}));
  index.upsert(doc("d", {1, 1, 1}));
  vl::Recommender rec(index);
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    const WalkParams p = params(3, 2, 2, seed);
    const auto tree = rec.walk(vltest::uv({1, 0.5, 0.25}), p);
    const auto flat = vl::flatten(tree);
    EXPECT_LE(flat.size(), 4u);
    EXPECT_EQ(std::set<std::string>(flat.begin(), flat.end()).size(), flat.size());
    EXPECT_EQ(vltest::check_walk(tree, vltest::oracle_docs(index), p), "");
  }
}

TEST(Walk, StartDocumentIsVisited) {
  std::mt19937_64 rng(6);
  vl::DocumentIndex index(4);
  fill_random(index, rng, 12);
  vl::Recommender rec(index);
  const auto flat = rec.walk_flat(std::string("d3"), params(4, 3, 5, 9));
  EXPECT_EQ(std::count(flat.begin(), flat.end(), "d3"), 0);
  EXPECT_EQ(vl::flatten(rec.walk(std::string("d3"), params(4, 3, 5, 9))).front(), "d3");
}

TEST(Walk, LiteralFilteringCanStarve) {
  vl::DocumentIndex index(2);
  index.upsert(doc("a", {1, 0}));
  index.upsert(doc("b", {0.9, 0.1}));
  vl::Recommender rec(index);
  WalkParams p = params(2, 1, 1);
  EXPECT_EQ(rec.walk(std::string("a"), p).children.size(), 1u);
  p.literal_filtering = true;
  EXPECT_TRUE(rec.walk(std::string("a"), p).children.empty());
}

TEST(Walk, Errors) {
  vl::DocumentIndex empty(2);
  vl::Recommender none(empty);
  EXPECT_EQ(code_of([&] { none.walk(vltest::uv({1, 0}), params(2, 1, 1)); }), ErrorCode::kEmptyIndex);

  vl::DocumentIndex index(2);
  index.upsert(doc("a", {1, 0}));
  vl::Recommender rec(index);
  EXPECT_EQ(code_of([&] { rec.walk(std::string("ghost"), params(2, 1, 1)); }), ErrorCode::kNotFound);
  EXPECT_EQ(code_of([&] { rec.walk(vltest::uv({1, 0}), params(2, 3, 2)); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { rec.walk(vltest::uv({1, 0}), params(0, 1, 1)); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { rec.walk(vltest::uv({1, 0, 0}), params(2, 1, 1)); }), ErrorCode::kDimensionMismatch);
}

TEST(Walk, RandomizedInvariantsAndDeterminism) {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t d = 2 + rng() % 10;
    vl::DocumentIndex index(d);
    fill_random(index, rng, 1 + rng() % 80);
    vl::Recommender rec(index);
    WalkParams p = params(1 + rng() % 4, 1 + rng() % 4, 0, rng());
    p.neighbours = p.children + rng() % 6;
    const vl::WalkStart start = (trial % 2 == 0) ? vl::WalkStart(vl::normalize(oracle::random_unit(rng, d)))
                                                 : vl::WalkStart(std::string("d0"));
    const auto tree = rec.walk(start, p);
    EXPECT_EQ(vltest::check_walk(tree, vltest::oracle_docs(index), p), "") << "trial " << trial;
    EXPECT_EQ(vl::dump(vl::to_json(tree)), vl::dump(vl::to_json(rec.walk(start, p))));
  }
}

TEST(WalkParams, ParsesDefaultsString) {
  const auto p = vl::parse_walk_params("L=3,C=3,k=20");
  EXPECT_EQ(p.layers, 3u);
  EXPECT_EQ(p.children, 3u);
  EXPECT_EQ(p.neighbours, 20u);
  EXPECT_EQ(vl::parse_walk_params("k=7,seed=5", p).neighbours, 7u);
  EXPECT_THROW(vl::parse_walk_params("L=x"), vl::Error);
  EXPECT_THROW(vl::parse_walk_params("Q=1"), vl::Error);
}
