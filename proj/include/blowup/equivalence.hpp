#pragma once

// Combinatorial equivalence of intersection tensors, proximity forests and
// their marked (block-level) versions, plus canonical forms, automorphism
// orbits and partition compatibility.
//
// Tensor equivalence first recovers both blow-up sequences and decides
// isomorphism on the (much smaller) degree-labeled proximity DAGs; the
// induced index map is then checked against every tensor entry. The direct
// tensor matcher, tensor_equivalent_search(), is kept as an independent
// route and as the fallback for tensors that do not come from a forest.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "blowup/contraction.hpp"
#include "blowup/detail/search.hpp"
#include "blowup/detail/sha256.hpp"
#include "blowup/error.hpp"
#include "blowup/model.hpp"
#include "blowup/tensor.hpp"

namespace blowup {

// A bijection of {0..n-1}; image(i) is where i is sent.
class IndexPermutation {
 public:
  IndexPermutation() = default;
  explicit IndexPermutation(std::vector<Index> images) : images_(std::move(images)) {
    std::vector<char> hit(images_.size(), 0);
    for (Index x : images_) {
      if (x >= images_.size() || hit[x])
        throw error(errc::invalid_input, "index map is not a bijection");
      hit[x] = 1;
    }
  }

  static IndexPermutation identity(std::size_t n) {
    std::vector<Index> v(n);
    std::iota(v.begin(), v.end(), Index{0});
    return IndexPermutation(std::move(v));
  }

  std::size_t size() const noexcept { return images_.size(); }
  Index image(Index i) const { return images_.at(i); }
  Index operator()(Index i) const { return images_.at(i); }
  const std::vector<Index>& images() const noexcept { return images_; }

  IndexPermutation inverse() const {
    std::vector<Index> inv(images_.size());
    for (Index i = 0; i < images_.size(); ++i) inv[images_[i]] = i;
    return IndexPermutation(std::move(inv));
  }

  friend bool operator==(const IndexPermutation&, const IndexPermutation&) = default;

 private:
  std::vector<Index> images_;
};

namespace detail {

inline void append_int(std::string& out, std::int64_t v) {
  out += std::to_string(v);
}

// Vertex-labeled digraph (self loops allowed). Serves both forests and the
// block-level quotient of a marked forest.
class ColoredDigraph {
 public:
  ColoredDigraph(std::vector<std::int64_t> labels,
                 std::set<std::pair<Index, Index>> edges)
      : labels_(std::move(labels)), edges_(std::move(edges)),
        out_(labels_.size()), in_(labels_.size()) {
    for (auto [a, b] : edges_) {
      out_[a].push_back(b);
      in_[b].push_back(a);
    }
  }

  std::size_t size() const { return labels_.size(); }

  Signature initial_signature(Index v) const {
    const bool loop = edges_.contains({v, v});
    return {labels_[v], loop ? 1 : 0};
  }

  Signature neighborhood(Index v, const Coloring& c) const {
    Signature sig;
    auto add = [&](const std::vector<Index>& nbrs) {
      Signature part;
      for (Index x : nbrs) part.push_back(c[x]);
      std::sort(part.begin(), part.end());
      sig.push_back(static_cast<std::int64_t>(part.size()));
      sig.insert(sig.end(), part.begin(), part.end());
    };
    add(out_[v]);
    add(in_[v]);
    return sig;
  }

  std::string serialize(const std::vector<Index>& pos) const {
    std::vector<std::int64_t> by_pos(labels_.size());
    for (Index v = 0; v < labels_.size(); ++v) by_pos[pos[v]] = labels_[v];
    std::vector<std::pair<Index, Index>> e;
    for (auto [a, b] : edges_) e.emplace_back(pos[a], pos[b]);
    std::sort(e.begin(), e.end());
    std::string out = "n" + std::to_string(labels_.size()) + ";l";
    for (auto x : by_pos) {
      append_int(out, x);
      out += ',';
    }
    out += ";e";
    for (auto [a, b] : e) {
      append_int(out, static_cast<std::int64_t>(a));
      out += '>';
      append_int(out, static_cast<std::int64_t>(b));
      out += ',';
    }
    return out;
  }

 private:
  std::vector<std::int64_t> labels_;
  std::set<std::pair<Index, Index>> edges_;
  std::vector<std::vector<Index>> out_, in_;
};

inline ColoredDigraph forest_digraph(const ProximityForest& f) {
  std::vector<std::int64_t> labels;
  std::set<std::pair<Index, Index>> edges;
  for (Index i = 0; i < f.size(); ++i) {
    labels.push_back(f.degree(i));
    for (Index j : f.point(i).proximate_to) edges.emplace(i, j);
  }
  return {std::move(labels), std::move(edges)};
}

inline ColoredDigraph block_digraph(const ProximityForest& f,
                                    const MarkedPartition& p) {
  std::vector<std::int64_t> labels;
  for (std::size_t b = 0; b < p.size(); ++b) labels.push_back(block_degree(f, p, b));
  return {std::move(labels), block_proximity(f, p)};
}

// Symmetric tensor viewed as a weighted hypergraph on its indices.
class TensorStructure {
 public:
  explicit TensorStructure(const IntersectionTensor& t)
      : t_(&t), incident_(t.size()), diag_(diagonal(t)) {
    for (const auto& entry : t.entries()) {
      const auto& idx = entry.first.indices();
      for (std::size_t s = 0; s < idx.size(); ++s)
        if (s == 0 || idx[s] != idx[s - 1]) incident_[idx[s]].push_back(&entry);
    }
  }

  std::size_t size() const { return t_->size(); }

  Signature initial_signature(Index v) const {
    return {diag_[v], static_cast<std::int64_t>(incident_[v].size())};
  }

  Signature neighborhood(Index v, const Coloring& c) const {
    std::vector<Signature> parts;
    parts.reserve(incident_[v].size());
    for (const auto* entry : incident_[v]) {
      Signature part{entry->second,
                     static_cast<std::int64_t>(entry->first.count(v))};
      Signature others;
      for (Index x : entry->first.indices())
        if (x != v) others.push_back(c[x]);
      std::sort(others.begin(), others.end());
      part.insert(part.end(), others.begin(), others.end());
      parts.push_back(std::move(part));
    }
    std::sort(parts.begin(), parts.end());
    Signature sig;
    for (const auto& p : parts) {
      sig.push_back(static_cast<std::int64_t>(p.size()));
      sig.insert(sig.end(), p.begin(), p.end());
    }
    return sig;
  }

  std::string serialize(const std::vector<Index>& pos) const {
    std::vector<std::pair<std::vector<Index>, std::int64_t>> mapped;
    mapped.reserve(t_->entries().size());
    for (const auto& [idx, value] : t_->entries()) {
      std::vector<Index> m;
      for (Index x : idx.indices()) m.push_back(pos[x]);
      std::sort(m.begin(), m.end());
      mapped.emplace_back(std::move(m), value);
    }
    std::sort(mapped.begin(), mapped.end());
    std::string out = "n" + std::to_string(t_->size()) + ";";
    for (const auto& [m, value] : mapped) {
      for (Index x : m) {
        append_int(out, static_cast<std::int64_t>(x));
        out += '.';
      }
      out += '=';
      append_int(out, value);
      out += ',';
    }
    return out;
  }

 private:
  const IntersectionTensor* t_;
  std::vector<std::vector<const IntersectionTensor::Entries::value_type*>> incident_;
  std::vector<std::int64_t> diag_;
};

inline void require_same_dimension(int a, int b) {
  if (a != b)
    throw error(errc::precondition, "dimension mismatch: " + std::to_string(a) +
                                        " vs " + std::to_string(b));
}

}  // namespace detail

// True iff perm carries every entry of a onto an equal entry of b and the
// supports have equal size.
inline bool maps_tensor(const IntersectionTensor& a, const IntersectionTensor& b,
                        const IndexPermutation& perm) {
  if (a.dimension() != b.dimension() || a.size() != b.size() ||
      perm.size() != a.size() || a.entries().size() != b.entries().size())
    return false;
  for (const auto& [idx, value] : a.entries()) {
    std::vector<Index> m;
    for (Index x : idx.indices()) m.push_back(perm(x));
    if (b.at(MultiIndex(std::move(m))) != value) return false;
  }
  return true;
}

// True iff perm preserves degrees and proximity in both directions.
inline bool maps_forest(const ProximityForest& a, const ProximityForest& b,
                        const IndexPermutation& perm) {
  if (a.dimension() != b.dimension() || a.size() != b.size() ||
      perm.size() != a.size())
    return false;
  std::size_t edges_a = 0, edges_b = 0;
  for (Index i = 0; i < a.size(); ++i) {
    if (a.degree(i) != b.degree(perm(i))) return false;
    for (Index j : a.point(i).proximate_to)
      if (!b.proximate(perm(i), perm(j))) return false;
    edges_a += a.point(i).proximate_to.size();
    edges_b += b.point(i).proximate_to.size();
  }
  return edges_a == edges_b;
}

// Direct backtracking matcher on tensors, pruned by diagonal values and
// entry fingerprints through equitable refinement.
inline std::optional<IndexPermutation> tensor_equivalent_search(
    const IntersectionTensor& a, const IntersectionTensor& b) {
  detail::require_same_dimension(a.dimension(), b.dimension());
  if (a.size() != b.size() || a.entries().size() != b.entries().size())
    return std::nullopt;
  detail::Budget budget;
  detail::TensorStructure sa(a), sb(b);
  auto f = detail::find_isomorphism(sa, sb, budget);
  if (!f) return std::nullopt;
  IndexPermutation perm(std::move(*f));
  if (!maps_tensor(a, b, perm))
    throw error(errc::invalid_input, "tensor matcher produced a non-witness");
  return perm;
}

inline std::optional<IndexPermutation> forest_isomorphic(
    const ProximityForest& a, const ProximityForest& b) {
  detail::require_same_dimension(a.dimension(), b.dimension());
  if (a.size() != b.size()) return std::nullopt;
  detail::Budget budget;
  auto ga = detail::forest_digraph(a), gb = detail::forest_digraph(b);
  auto f = detail::find_isomorphism(ga, gb, budget);
  if (!f) return std::nullopt;
  IndexPermutation perm(std::move(*f));
  if (!maps_forest(a, b, perm))
    throw error(errc::invalid_input, "forest matcher produced a non-witness");
  return perm;
}

namespace detail {

// Recovery whose forest reproduces the tensor exactly, or nothing.
inline std::optional<Recovery> faithful_recovery(const IntersectionTensor& t) {
  try {
    Recovery r = recover_sequence(t);
    if (!validate_forest(r.forest, false).ok()) return std::nullopt;
    if (permute(tensor_from_forest(r.forest), r.origin) != t) return std::nullopt;
    return r;
  } catch (const error& e) {
    if (e.code() == errc::not_contractible) return std::nullopt;
    throw;
  }
}

}  // namespace detail

// Returns tau with b(tau(i_1), ..., tau(i_d)) = a(i_1, ..., i_d), verified on
// every entry, or nothing.
inline std::optional<IndexPermutation> tensor_equivalent(
    const IntersectionTensor& a, const IntersectionTensor& b) {
  detail::require_same_dimension(a.dimension(), b.dimension());
  if (a.size() != b.size() || a.entries().size() != b.entries().size())
    return std::nullopt;
  auto ra = detail::faithful_recovery(a);
  auto rb = detail::faithful_recovery(b);
  if (!ra || !rb) return tensor_equivalent_search(a, b);

  auto sigma = forest_isomorphic(ra->forest, rb->forest);
  if (!sigma) return std::nullopt;
  std::vector<Index> creation_of(a.size());
  for (Index c = 0; c < a.size(); ++c) creation_of[ra->origin[c]] = c;
  std::vector<Index> tau(a.size());
  for (Index i = 0; i < a.size(); ++i) tau[i] = rb->origin[(*sigma)(creation_of[i])];
  IndexPermutation perm(std::move(tau));
  if (maps_tensor(a, b, perm)) return perm;
  return tensor_equivalent_search(a, b);
}

// Orbits of the automorphism group of the tensor, as a partition sorted by
// smallest member.
inline MarkedPartition automorphism_orbits(const IntersectionTensor& t) {
  detail::Budget budget;
  detail::TensorStructure s(t);
  return MarkedPartition(detail::orbits(s, budget));
}

// Orbits of the automorphism group of the degree-labeled proximity DAG.
inline MarkedPartition forest_orbits(const ProximityForest& f) {
  detail::Budget budget;
  auto g = detail::forest_digraph(f);
  return MarkedPartition(detail::orbits(g, budget));
}

namespace detail {

inline bool blocks_within(const MarkedPartition& p, const MarkedPartition& orbits,
                          std::size_t m) {
  const auto orbit_of = orbits.block_of(m);
  return std::all_of(p.blocks().begin(), p.blocks().end(), [&](const auto& b) {
    return std::all_of(b.begin(), b.end(),
                       [&](Index i) { return orbit_of[i] == orbit_of[b.front()]; });
  });
}

}  // namespace detail

// Every block lies inside one orbit of the tensor's automorphism group.
inline bool partition_compatible_morphism(const IntersectionTensor& t,
                                          const MarkedPartition& p) {
  p.check(t.size());
  return detail::blocks_within(p, automorphism_orbits(t), t.size());
}

// Every block lies inside one orbit of the forest's automorphism group.
inline bool partition_compatible_sequence(const ProximityForest& f,
                                          const MarkedPartition& p) {
  require_valid(f);
  p.check(f.size());
  return detail::blocks_within(p, forest_orbits(f), f.size());
}

// Block permutation preserving block degrees and block proximity.
inline std::optional<IndexPermutation> marked_forest_equivalent(
    const ProximityForest& fa, const MarkedPartition& pa,
    const ProximityForest& fb, const MarkedPartition& pb) {
  detail::require_same_dimension(fa.dimension(), fb.dimension());
  if (pa.size() != pb.size())
    throw error(errc::precondition, "marked forests have different block counts");
  if (!partition_compatible_sequence(fa, pa) || !partition_compatible_sequence(fb, pb))
    throw error(errc::precondition, "partition is not compatible with the forest");
  detail::Budget budget;
  auto ga = detail::block_digraph(fa, pa), gb = detail::block_digraph(fb, pb);
  auto f = detail::find_isomorphism(ga, gb, budget);
  if (!f) return std::nullopt;
  return IndexPermutation(std::move(*f));
}

// Equivalence of the block-level quotient forms.
inline std::optional<IndexPermutation> marked_tensor_equivalent(
    const IntersectionTensor& ta, const MarkedPartition& pa,
    const IntersectionTensor& tb, const MarkedPartition& pb) {
  detail::require_same_dimension(ta.dimension(), tb.dimension());
  if (pa.size() != pb.size())
    throw error(errc::precondition, "marked tensors have different block counts");
  if (!partition_compatible_morphism(ta, pa) || !partition_compatible_morphism(tb, pb))
    throw error(errc::precondition, "partition is not compatible with the tensor");
  return tensor_equivalent(quotient_tensor(ta, pa), quotient_tensor(tb, pb));
}

template <class Object>
struct CanonicalForm {
  IndexPermutation relabeling;  // original index -> canonical index
  Object object;                // the relabeled object
  std::string serialization;    // canonical bytes (layout in docs/)
  std::string hash;             // lowercase hex SHA-256 of serialization
};

// Canonical byte layout of a forest, points in creation order.
inline std::string serialize_forest(const ProximityForest& f) {
  std::string out = "blowup-forest\nd " + std::to_string(f.dimension()) +
                    "\nm " + std::to_string(f.size()) + "\n";
  for (Index i = 0; i < f.size(); ++i) {
    out += "p " + std::to_string(i + 1) + " " + std::to_string(f.degree(i));
    auto targets = f.point(i).proximate_to;
    std::sort(targets.begin(), targets.end());
    for (Index j : targets) out += " " + std::to_string(j + 1);
    out += "\n";
  }
  return out;
}

// Canonical byte layout of a tensor, entries in lexicographic index order.
inline std::string serialize_tensor(const IntersectionTensor& t) {
  std::string out = "blowup-tensor\nd " + std::to_string(t.dimension()) +
                    "\nm " + std::to_string(t.size()) + "\n";
  for (const auto& [idx, value] : t.entries()) {
    out += "e";
    for (Index x : idx.indices()) out += " " + std::to_string(x + 1);
    out += " " + std::to_string(value) + "\n";
  }
  return out;
}

inline ProximityForest relabel_forest(const ProximityForest& f,
                                      const IndexPermutation& perm) {
  std::vector<Point> points(f.size());
  for (Index i = 0; i < f.size(); ++i) {
    Point p = f.point(i);
    for (Index& j : p.proximate_to) j = perm(j);
    std::sort(p.proximate_to.begin(), p.proximate_to.end());
    points[perm(i)] = std::move(p);
  }
  return ProximityForest(f.dimension(), std::move(points));
}

// The canonical labeling is turned into a creation order by taking, at each
// step, the unplaced point of smallest canonical position whose targets are
// all placed.
inline CanonicalForm<ProximityForest> canonical_form(const ProximityForest& f) {
  require_valid(f);
  detail::Budget budget;
  auto g = detail::forest_digraph(f);
  const auto labeling = detail::canonical_labeling(g, budget);

  const std::size_t m = f.size();
  std::vector<Index> vertex_at(m);
  for (Index v = 0; v < m; ++v) vertex_at[labeling.position[v]] = v;
  std::vector<std::size_t> pending(m);
  std::vector<std::vector<Index>> dependents(m);
  for (Index i = 0; i < m; ++i) {
    pending[i] = f.point(i).proximate_to.size();
    for (Index j : f.point(i).proximate_to) dependents[j].push_back(i);
  }
  std::priority_queue<Index, std::vector<Index>, std::greater<>> ready;
  for (Index i = 0; i < m; ++i)
    if (pending[i] == 0) ready.push(labeling.position[i]);
  std::vector<Index> creation(m);
  for (Index next = 0; next < m; ++next) {
    const Index v = vertex_at[ready.top()];
    ready.pop();
    creation[v] = next;
    for (Index w : dependents[v])
      if (--pending[w] == 0) ready.push(labeling.position[w]);
  }

  IndexPermutation perm(std::move(creation));
  ProximityForest relabeled = relabel_forest(f, perm);
  std::string bytes = serialize_forest(relabeled);
  std::string hash = detail::sha256_hex(bytes);
  return {std::move(perm), std::move(relabeled), std::move(bytes), std::move(hash)};
}

inline CanonicalForm<IntersectionTensor> canonical_form(const IntersectionTensor& t) {
  detail::Budget budget;
  detail::TensorStructure s(t);
  const auto labeling = detail::canonical_labeling(s, budget);
  IndexPermutation perm(labeling.position);
  IntersectionTensor relabeled = permute(t, perm.images());
  std::string bytes = serialize_tensor(relabeled);
  std::string hash = detail::sha256_hex(bytes);
  return {std::move(perm), std::move(relabeled), std::move(bytes), std::move(hash)};
}

}  // namespace blowup
