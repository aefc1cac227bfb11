#pragma once

// Test-only reference computations. Nothing here calls into the code paths
// it is used to check: tensors are expanded densely from the definitions,
// equivalence is decided over all permutations, and surface intersection
// numbers are read directly off the forest.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "blowup/model.hpp"
#include "blowup/tensor.hpp"

namespace oracle {

using blowup::Index;
using blowup::ProximityForest;
using blowup::IntersectionTensor;

// All nondecreasing d-tuples over {0..m-1}.
inline std::vector<std::vector<Index>> all_multi_indices(std::size_t m, int d) {
  std::vector<std::vector<Index>> out;
  std::vector<Index> cur;
  std::function<void(Index)> rec = [&](Index from) {
    if (cur.size() == static_cast<std::size_t>(d)) {
      out.push_back(cur);
      return;
    }
    for (Index i = from; i < m; ++i) {
      cur.push_back(i);
      rec(i);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

// Each H_i expanded into total transforms, all d-fold products of expansion
// terms enumerated, only products of one repeated total transform kept.
inline std::map<std::vector<Index>, std::int64_t> brute_force_tensor(
    const ProximityForest& f) {
  const int d = f.dimension();
  const std::size_t m = f.size();
  std::vector<std::vector<std::pair<Index, std::int64_t>>> expansion(m);
  for (Index i = 0; i < m; ++i) {
    expansion[i].push_back({i, 1});
    for (Index b = 0; b < m; ++b)
      if (f.proximate(b, i)) expansion[i].push_back({b, -1});
  }
  const std::int64_t sign = (d % 2 == 1) ? 1 : -1;  // (-1)^(d-1)
  std::map<std::vector<Index>, std::int64_t> dense;
  for (const auto& mi : all_multi_indices(m, d)) {
    std::int64_t total = 0;
    std::vector<std::size_t> choice(d, 0);
    for (;;) {
      bool equal = true;
      std::int64_t coeff = 1;
      for (int t = 0; t < d; ++t) {
        const auto& term = expansion[mi[t]][choice[t]];
        coeff *= term.second;
        if (term.first != expansion[mi[0]][choice[0]].first) equal = false;
      }
      if (equal) total += sign * coeff * f.degree(expansion[mi[0]][choice[0]].first);
      int t = 0;
      while (t < d && ++choice[t] == expansion[mi[t]].size()) choice[t++] = 0;
      if (t == d) break;
    }
    dense[mi] = total;
  }
  return dense;
}

inline std::map<std::vector<Index>, std::int64_t> dense(const IntersectionTensor& t) {
  std::map<std::vector<Index>, std::int64_t> out;
  for (const auto& mi : all_multi_indices(t.size(), t.dimension()))
    out[mi] = t.at(blowup::MultiIndex(mi));
  return out;
}

// Plain multilinear sum over all ordered index tuples.
inline std::int64_t evaluate_dense(const IntersectionTensor& t,
                                   const std::vector<std::vector<std::int64_t>>& v) {
  const int d = t.dimension();
  const std::size_t m = t.size();
  if (m == 0) return 0;
  std::vector<Index> tuple(d, 0);
  std::int64_t total = 0;
  for (;;) {
    std::int64_t term = t.at(blowup::MultiIndex(tuple));
    for (int s = 0; s < d; ++s) term *= v[s][tuple[s]];
    total += term;
    int s = 0;
    while (s < d && ++tuple[s] == m) tuple[s++] = 0;
    if (s == d) break;
  }
  return total;
}

// Every permutation tried; true iff some tau carries a onto b.
inline bool brute_force_equivalent(const IntersectionTensor& a,
                                   const IntersectionTensor& b) {
  if (a.size() != b.size() || a.dimension() != b.dimension()) return false;
  const auto da = dense(a), db = dense(b);
  std::vector<Index> tau(a.size());
  std::iota(tau.begin(), tau.end(), Index{0});
  do {
    bool ok = true;
    for (const auto& [mi, value] : da) {
      std::vector<Index> img;
      for (Index x : mi) img.push_back(tau[x]);
      std::sort(img.begin(), img.end());
      if (db.at(img) != value) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  } while (std::next_permutation(tau.begin(), tau.end()));
  return false;
}

inline bool brute_force_forest_isomorphic(const ProximityForest& a,
                                          const ProximityForest& b) {
  if (a.size() != b.size()) return false;
  std::vector<Index> s(a.size());
  std::iota(s.begin(), s.end(), Index{0});
  do {
    bool ok = true;
    for (Index i = 0; i < a.size() && ok; ++i) {
      ok = a.degree(i) == b.degree(s[i]);
      for (Index j = 0; j < a.size() && ok; ++j)
        ok = a.proximate(i, j) == b.proximate(s[i], s[j]);
    }
    if (ok) return true;
  } while (std::next_permutation(s.begin(), s.end()));
  return false;
}

// d = 2 intersection number of components i != j read off the forest:
// deg(j) - sum_{k -> i, k -> j} deg(k) when j -> i (symmetrically when
// i -> j), 0 when neither is proximate to the other.
inline std::int64_t surface_intersection(const ProximityForest& f, Index i, Index j) {
  if (f.proximate(i, j)) std::swap(i, j);
  if (!f.proximate(j, i)) return 0;
  std::int64_t n = f.degree(j);
  for (Index k = 0; k < f.size(); ++k)
    if (f.proximate(k, i) && f.proximate(k, j)) n -= f.degree(k);
  return n;
}

// Relabels f along a uniformly drawn creation-order-preserving permutation.
// Returns the relabeled forest and perm with perm[old] = new.
inline std::pair<ProximityForest, std::vector<Index>> random_relabel(
    const ProximityForest& f, std::mt19937_64& rng) {
  const std::size_t m = f.size();
  std::vector<Index> perm(m), pending(m);
  std::vector<char> placed(m, 0);
  for (Index i = 0; i < m; ++i) pending[i] = f.point(i).proximate_to.size();
  for (Index next = 0; next < m; ++next) {
    std::vector<Index> ready;
    for (Index i = 0; i < m; ++i)
      if (!placed[i] && pending[i] == 0) ready.push_back(i);
    const Index v = ready[rng() % ready.size()];
    placed[v] = 1;
    perm[v] = next;
    for (Index w = 0; w < m; ++w)
      if (f.proximate(w, v)) --pending[w];
  }
  std::vector<blowup::Point> points(m);
  for (Index i = 0; i < m; ++i) {
    auto p = f.point(i);
    for (auto& j : p.proximate_to) j = perm[j];
    std::sort(p.proximate_to.begin(), p.proximate_to.end());
    points[perm[i]] = p;
  }
  return {ProximityForest(f.dimension(), std::move(points)), perm};
}

// Every forest with m points, target sets of size <= d, degrees in
// 1..max_degree, in a fixed order.
inline void for_each_forest(int d, std::size_t m, std::int64_t max_degree,
                            const std::function<void(const ProximityForest&)>& fn) {
  std::vector<blowup::Point> points;
  std::function<void()> rec = [&]() {
    const std::size_t k = points.size();
    if (k == m) {
      fn(ProximityForest(d, points));
      return;
    }
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
      if (std::popcount(mask) > d) continue;
      std::vector<Index> targets;
      for (Index j = 0; j < k; ++j)
        if (mask >> j & 1) targets.push_back(j);
      for (std::int64_t deg = 1; deg <= max_degree; ++deg) {
        points.push_back({deg, targets});
        rec();
        points.pop_back();
      }
    }
  };
  rec();
}

// Forests where a point on two components only occurs when one of them is
// proximate to the other.
inline bool nested_targets(const ProximityForest& f) {
  for (Index k = 0; k < f.size(); ++k)
    for (Index i : f.point(k).proximate_to)
      for (Index j : f.point(k).proximate_to)
        if (i < j && !f.proximate(j, i)) return false;
  return true;
}

}  // namespace oracle
