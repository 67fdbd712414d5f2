#include "vl/recommender.hpp"

#include <charconv>
#include <deque>
#include <numeric>

#include "vl/error.hpp"
#include "vl/random.hpp"

namespace vl {
namespace {

std::size_t parse_count(std::string_view key, std::string_view value) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    fail(ErrorCode::kInvalidArgument,
         "walk parameter " + std::string(key) + " has invalid value '" + std::string(value) + "'");
  }
  return out;
}

}  // namespace

WalkParams parse_walk_params(std::string_view text, WalkParams base) {
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::kInvalidArgument, "walk parameter '" + std::string(item) + "' lacks '='");
    }
    const auto key = item.substr(0, eq);
    const auto value = item.substr(eq + 1);
    if (key == "L") {
      base.layers = parse_count(key, value);
    } else if (key == "C") {
      base.children = parse_count(key, value);
    } else if (key == "k") {
      base.neighbours = parse_count(key, value);
    } else if (key == "seed") {
      base.seed = parse_count(key, value);
    } else {
      fail(ErrorCode::kInvalidArgument, "unknown walk parameter '" + std::string(key) + "'");
    }
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return base;
}

void validate(const WalkParams& params) {
  if (params.layers < 1) fail(ErrorCode::kInvalidArgument, "walk needs at least one layer");
  if (params.children < 1) fail(ErrorCode::kInvalidArgument, "walk needs at least one child per node");
  if (params.neighbours < params.children) {
    fail(ErrorCode::kInvalidArgument, "walk neighbours k must be at least the child count C");
  }
}

std::vector<std::string> flatten(const RecTree& tree) {
  std::vector<std::string> out;
  std::deque<const RecTree*> queue{&tree};
  while (!queue.empty()) {
    const RecTree* node = queue.front();
    queue.pop_front();
    if (node->doc_id) out.push_back(*node->doc_id);
    for (const auto& child : node->children) queue.push_back(&child);
  }
  return out;
}

std::size_t node_count(const RecTree& tree) {
  std::size_t n = 1;
  for (const auto& child : tree.children) n += node_count(child);
  return n;
}

std::size_t depth(const RecTree& tree) {
  std::size_t deepest = 0;
  for (const auto& child : tree.children) deepest = std::max(deepest, depth(child));
  return deepest + 1;
}

UnitVector Recommender::ensemble(std::span<const std::string> ids) const {
  if (ids.empty()) fail(ErrorCode::kInvalidArgument, "ensemble needs at least one document");
  std::vector<WeightedVector> items;
  {
    const auto view = index_.read();
    for (const auto& id : ids) items.push_back({view.get(id).vector, 1.0});
  }
  return hierarchical_slerp(items);
}

std::vector<SearchHit> Recommender::recommend(std::span<const std::string> seed_ids,
                                              std::size_t k) const {
  const UnitVector query = ensemble(seed_ids);
  const IdSet exclude(seed_ids.begin(), seed_ids.end());
  return index_.nn_search(query, k, {}, exclude);
}

RecTree Recommender::walk(const WalkStart& start, const WalkParams& params) const {
  validate(params);
  const auto view = index_.read();
  if (view.count() == 0) fail(ErrorCode::kEmptyIndex, "cannot walk an empty index");

  IdSet visited;
  RecTree root = std::visit(
      [&](const auto& s) -> RecTree {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, std::string>) {
          const Document& doc = view.get(s);
          visited.insert(doc.id);
          return {doc.vector, doc.id, {}};
        } else {
          if (s.dimension() != view.dimension()) {
            fail(ErrorCode::kDimensionMismatch, "walk start vector has the wrong dimension");
          }
          return {s, std::nullopt, {}};
        }
      },
      start);

  std::uint64_t node_number = 0;
  std::vector<RecTree*> front{&root};
  for (std::size_t layer = 1; layer < params.layers; ++layer) {
    std::vector<RecTree*> next_front;
    for (RecTree* node : front) {
      CounterStream stream(mix_keys(params.seed, node_number++));

      std::vector<SearchHit> fresh;
      if (params.literal_filtering) {
        for (auto& hit : view.nn_search(node->vector, params.neighbours)) {
          if (!visited.contains(hit.id)) fresh.push_back(std::move(hit));
        }
      } else {
        fresh = view.nn_search(node->vector, params.neighbours, {}, visited);
      }
      if (fresh.empty()) continue;

      // Partial Fisher-Yates: the first `take` slots become a uniform sample
      // without replacement, in draw order.
      std::vector<std::size_t> order(fresh.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      const std::size_t take = std::min(params.children, fresh.size());
      for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + stream.next_below(order.size() - i);
        std::swap(order[i], order[j]);
      }

      node->children.reserve(take);
      for (std::size_t i = 0; i < take; ++i) {
        const Document& doc = view.get(fresh[order[i]].id);
        visited.insert(doc.id);
        node->children.push_back({doc.vector, doc.id, {}});
      }
      for (auto& child : node->children) next_front.push_back(&child);
    }
    front = std::move(next_front);
  }
  return root;
}

std::vector<std::string> Recommender::walk_flat(const WalkStart& start,
                                                const WalkParams& params) const {
  auto ids = flatten(walk(start, params));
  if (std::holds_alternative<std::string>(start) && !ids.empty()) ids.erase(ids.begin());
  return ids;
}

}  // namespace vl
