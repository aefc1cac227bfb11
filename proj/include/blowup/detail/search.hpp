#pragma once

// Individualization-refinement machinery shared by every isomorphism,
// canonical-form and orbit computation.
//
// A structure S exposes
//   std::size_t size() const;
//   Signature initial_signature(Index v) const;
//   Signature neighborhood(Index v, const Coloring& colors) const;
//   std::string serialize(const std::vector<Index>& position) const;
// where neighborhood() must be invariant under relabeling (it may only look
// at colors and structure values) and serialize() writes the structure with
// vertex v renamed to position[v].

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blowup/error.hpp"
#include "blowup/model.hpp"

namespace blowup::detail {

using Signature = std::vector<std::int64_t>;
using Coloring = std::vector<std::int64_t>;

template <class S>
concept ColoredStructure = requires(const S& s, Index v, const Coloring& c,
                                    const std::vector<Index>& pos) {
  { s.size() } -> std::convertible_to<std::size_t>;
  { s.initial_signature(v) } -> std::same_as<Signature>;
  { s.neighborhood(v, c) } -> std::same_as<Signature>;
  { s.serialize(pos) } -> std::same_as<std::string>;
};

// Shared node budget for one top-level search.
class Budget {
 public:
  explicit Budget(std::size_t limit = 2'000'000) : left_(limit) {}
  void spend() {
    if (left_ == 0)
      throw error(errc::limit_exceeded, "search node guard exceeded");
    --left_;
  }

 private:
  std::size_t left_;
};

inline std::size_t count_colors(const Coloring& c) {
  Coloring sorted = c;
  std::sort(sorted.begin(), sorted.end());
  return static_cast<std::size_t>(
      std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

// Replaces each signature by its rank among all signatures of all listed
// colorings, so equal signatures across structures share a color.
inline void rank_jointly(std::vector<std::vector<Signature>>& sigs,
                         std::vector<Coloring*> out) {
  std::map<Signature, std::int64_t> ranks;
  for (const auto& per : sigs)
    for (const auto& s : per) ranks.emplace(s, 0);
  std::int64_t r = 0;
  for (auto& [sig, rank] : ranks) rank = r++;
  for (std::size_t k = 0; k < sigs.size(); ++k)
    for (std::size_t v = 0; v < sigs[k].size(); ++v)
      (*out[k])[v] = ranks.at(sigs[k][v]);
}

// Equitable refinement of one or two colorings simultaneously.
template <ColoredStructure S>
void refine(const std::vector<const S*>& structs, std::vector<Coloring*> colors) {
  std::size_t before = 0;
  for (auto* c : colors) before += count_colors(*c);
  for (;;) {
    std::vector<std::vector<Signature>> sigs(structs.size());
    for (std::size_t k = 0; k < structs.size(); ++k) {
      const Coloring& c = *colors[k];
      sigs[k].reserve(c.size());
      for (Index v = 0; v < c.size(); ++v) {
        Signature sig{c[v]};
        auto nb = structs[k]->neighborhood(v, c);
        sig.insert(sig.end(), nb.begin(), nb.end());
        sigs[k].push_back(std::move(sig));
      }
    }
    rank_jointly(sigs, colors);
    std::size_t after = 0;
    for (auto* c : colors) after += count_colors(*c);
    if (after == before) return;
    before = after;
  }
}

template <ColoredStructure S>
std::vector<Coloring> initial_colorings(const std::vector<const S*>& structs) {
  std::vector<std::vector<Signature>> sigs(structs.size());
  std::vector<Coloring> colors(structs.size());
  std::vector<Coloring*> out;
  for (std::size_t k = 0; k < structs.size(); ++k) {
    for (Index v = 0; v < structs[k]->size(); ++v)
      sigs[k].push_back(structs[k]->initial_signature(v));
    colors[k].resize(structs[k]->size());
  }
  for (auto& c : colors) out.push_back(&c);
  rank_jointly(sigs, out);
  return colors;
}

// v gets its own color, placed first within its old cell.
inline Coloring individualize(const Coloring& c, Index v) {
  Coloring out(c.size());
  for (Index x = 0; x < c.size(); ++x) out[x] = 2 * c[x] + (x == v ? 0 : 1);
  return out;
}

inline bool discrete(const Coloring& c) { return count_colors(c) == c.size(); }

// Position of each vertex in a discrete coloring.
inline std::vector<Index> positions(const Coloring& c) {
  std::vector<Index> order(c.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return c[a] < c[b]; });
  std::vector<Index> pos(c.size());
  for (Index p = 0; p < order.size(); ++p) pos[order[p]] = p;
  return pos;
}

// Smallest nonsingleton cell (ties by color value); label invariant.
inline std::int64_t target_cell(const Coloring& c) {
  std::map<std::int64_t, std::size_t> sizes;
  for (auto x : c) ++sizes[x];
  std::int64_t best = -1;
  std::size_t best_size = 0;
  for (auto [color, n] : sizes)
    if (n > 1 && (best < 0 || n < best_size)) best = color, best_size = n;
  return best;
}

inline bool same_cell_sizes(const Coloring& a, const Coloring& b) {
  std::map<std::int64_t, std::int64_t> diff;
  for (auto x : a) ++diff[x];
  for (auto x : b) --diff[x];
  return std::all_of(diff.begin(), diff.end(),
                     [](const auto& kv) { return kv.second == 0; });
}

// Searches for a bijection f: A -> B carrying structure and colors of A onto
// those of B. Colorings must come from a joint ranking.
template <ColoredStructure S>
std::optional<std::vector<Index>> find_isomorphism(const S& a, const S& b,
                                                   Coloring ca, Coloring cb,
                                                   Budget& budget) {
  if (a.size() != b.size()) return std::nullopt;
  budget.spend();
  refine<S>({&a, &b}, {&ca, &cb});
  if (!same_cell_sizes(ca, cb)) return std::nullopt;

  if (discrete(ca)) {
    const auto pa = positions(ca), pb = positions(cb);
    if (a.serialize(pa) != b.serialize(pb)) return std::nullopt;
    std::vector<Index> vertex_at(pb.size());
    for (Index v = 0; v < pb.size(); ++v) vertex_at[pb[v]] = v;
    std::vector<Index> f(pa.size());
    for (Index v = 0; v < pa.size(); ++v) f[v] = vertex_at[pa[v]];
    return f;
  }

  const auto cell = target_cell(ca);
  Index pivot = 0;
  while (ca[pivot] != cell) ++pivot;
  const Coloring ia = individualize(ca, pivot);
  for (Index w = 0; w < cb.size(); ++w) {
    if (cb[w] != cell) continue;
    if (auto f = find_isomorphism(a, b, ia, individualize(cb, w), budget))
      return f;
  }
  return std::nullopt;
}

template <ColoredStructure S>
std::optional<std::vector<Index>> find_isomorphism(const S& a, const S& b,
                                                   Budget& budget) {
  auto colors = initial_colorings<S>({&a, &b});
  return find_isomorphism(a, b, std::move(colors[0]), std::move(colors[1]),
                          budget);
}

// Orbits of the automorphism group. Each union is witnessed by an explicit
// automorphism found by the matcher.
template <ColoredStructure S>
std::vector<std::vector<Index>> orbits(const S& s, Budget& budget) {
  const std::size_t n = s.size();
  auto start = initial_colorings<S>({&s})[0];
  refine<S>({&s}, {&start});

  std::vector<Index> parent(n);
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](Index x, Index y) {
    x = find(x), y = find(y);
    if (x != y) parent[std::max(x, y)] = std::min(x, y);
  };

  for (Index u = 0; u < n; ++u) {
    if (find(u) != u) continue;
    for (Index rep = 0; rep < u; ++rep) {
      if (find(rep) != rep || start[rep] != start[u] || find(u) == rep) continue;
      if (auto g = find_isomorphism(s, s, individualize(start, rep),
                                    individualize(start, u), budget)) {
        for (Index x = 0; x < n; ++x) unite(x, (*g)[x]);
        break;
      }
    }
  }

  std::map<Index, std::vector<Index>> grouped;
  for (Index x = 0; x < n; ++x) grouped[find(x)].push_back(x);
  std::vector<std::vector<Index>> result;
  for (auto& [root, members] : grouped) result.push_back(std::move(members));
  return result;
}

struct CanonicalLabeling {
  std::vector<Index> position;  // vertex -> canonical position
  std::string serialization;
};

// Minimum serialization over the individualization-refinement tree. Children
// of a node that are related by an automorphism fixing the node's
// individualized vertices span identical serialization sets, so only one per
// orbit is explored.
template <ColoredStructure S>
CanonicalLabeling canonical_labeling(const S& s, Budget& budget) {
  std::optional<CanonicalLabeling> best;
  auto rec = [&](auto&& self, Coloring c) -> void {
    budget.spend();
    refine<S>({&s}, {&c});
    if (discrete(c)) {
      auto pos = positions(c);
      auto ser = s.serialize(pos);
      if (!best || ser < best->serialization)
        best = CanonicalLabeling{std::move(pos), std::move(ser)};
      return;
    }
    const auto cell = target_cell(c);
    std::vector<Index> explored;
    for (Index w = 0; w < c.size(); ++w) {
      if (c[w] != cell) continue;
      const Coloring cw = individualize(c, w);
      bool redundant = false;
      for (Index v : explored) {
        if (find_isomorphism(s, s, individualize(c, v), cw, budget)) {
          redundant = true;
          break;
        }
      }
      if (redundant) continue;
      explored.push_back(w);
      self(self, cw);
    }
  };
  rec(rec, initial_colorings<S>({&s})[0]);
  return std::move(*best);
}

}  // namespace blowup::detail
