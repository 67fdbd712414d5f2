#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vl/index.hpp"
#include "vl/vecmath.hpp"

namespace vl {

struct RecTree {
  UnitVector vector;
  std::optional<std::string> doc_id;  // absent for a synthetic root
  std::vector<RecTree> children;      // in sampling order

  friend bool operator==(const RecTree&, const RecTree&) = default;
};

struct WalkParams {
  std::size_t layers = 3;      // root is layer 1
  std::size_t children = 3;    // max children per node
  std::size_t neighbours = 20; // k for each neighbour search; must be >= children
  std::uint64_t seed = 0;
  /// Retrieve k neighbours first and drop visited ones afterwards, instead of
  /// excluding visited documents inside the search.
  bool literal_filtering = false;

  friend bool operator==(const WalkParams&, const WalkParams&) = default;
};

/// Parses "L=3,C=3,k=20" style overrides on top of `base`.
WalkParams parse_walk_params(std::string_view text, WalkParams base = {});
void validate(const WalkParams& params);

/// A raw vector (synthetic root) or a document id.
using WalkStart = std::variant<UnitVector, std::string>;

/// Breadth-first list of document ids in the tree, synthetic root excluded.
std::vector<std::string> flatten(const RecTree& tree);
std::size_t node_count(const RecTree& tree);
std::size_t depth(const RecTree& tree);

class Recommender {
 public:
  explicit Recommender(const DocumentIndex& index) : index_(index) {}

  /// Equal-weight hierarchical slerp of the documents' vectors, in order.
  UnitVector ensemble(std::span<const std::string> ids) const;

  /// Nearest neighbours of the ensemble, seeds excluded.
  std::vector<SearchHit> recommend(std::span<const std::string> seed_ids, std::size_t k) const;

  /// Random recommendation walk. Each expanded node draws from its own
  /// pseudorandom stream keyed by (seed, breadth-first node number), so the
  /// tree is a pure function of the corpus snapshot and the parameters.
  RecTree walk(const WalkStart& start, const WalkParams& params) const;
  std::vector<std::string> walk_flat(const WalkStart& start, const WalkParams& params) const;

 private:
  const DocumentIndex& index_;
};

}  // namespace vl
