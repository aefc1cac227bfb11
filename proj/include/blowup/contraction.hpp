#pragma once

// Numerical detection of final components and blow-down at the tensor level.
//
// A component i meets j (i != j) iff some mixed number T(i^s j^r), r, s >= 1,
// is nonzero. Component i is final iff for every j it meets
//   T(i^d) = (-1)^r T(i^s j^r)  for all r + s = d, r, s >= 1,
//   T(i j^(d-1)) > 0.
// Contracting a final i replaces every neighbor j by H_j + H_i and drops i;
// the contracted point has degree (-1)^(d-1) T(i^d) and was proximate to
// exactly the neighbors of i.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blowup/checked.hpp"
#include "blowup/error.hpp"
#include "blowup/model.hpp"
#include "blowup/tensor.hpp"

namespace blowup {

struct ContractionStep {
  Index contracted = 0;              // index in the tensor before this step
  std::int64_t degree = 0;           // recovered residue degree
  std::vector<Index> proximate_to;   // pre-step indices met by the contracted one
  std::vector<Index> kept;           // kept[n] = pre-step index of new index n

  friend bool operator==(const ContractionStep&, const ContractionStep&) = default;
};

struct ContractionTrace {
  std::vector<ContractionStep> steps;

  // original_index()[t] = index in the input tensor of the component
  // contracted at step t.
  std::vector<Index> original_indices() const {
    std::vector<Index> result;
    result.reserve(steps.size());
    for (std::size_t t = 0; t < steps.size(); ++t) {
      Index i = steps[t].contracted;
      for (std::size_t u = t; u-- > 0;) i = steps[u].kept.at(i);
      result.push_back(i);
    }
    return result;
  }

  friend bool operator==(const ContractionTrace&, const ContractionTrace&) = default;
};

struct Recovery {
  ProximityForest forest;
  ContractionTrace trace;
  // origin[c] = input-tensor index of the component with creation index c.
  std::vector<Index> origin;
};

namespace detail {

inline void check_index(const IntersectionTensor& t, Index i) {
  if (i >= t.size())
    throw error(errc::precondition,
                "component index " + std::to_string(i + 1) + " out of range");
}

inline std::size_t dim(const IntersectionTensor& t) {
  return static_cast<std::size_t>(t.dimension());
}

}  // namespace detail

inline bool empty_intersection(const IntersectionTensor& t, Index i, Index j) {
  detail::check_index(t, i);
  detail::check_index(t, j);
  if (i == j)
    throw error(errc::precondition, "empty_intersection needs distinct indices");
  const std::size_t d = detail::dim(t);
  for (std::size_t r = 1; r < d; ++r)
    if (t.at(power_index(i, d - r, j, r)) != 0) return false;
  return true;
}

// Components meeting i.
inline std::vector<Index> neighbors(const IntersectionTensor& t, Index i) {
  detail::check_index(t, i);
  std::vector<Index> out;
  for (Index j = 0; j < t.size(); ++j)
    if (j != i && !empty_intersection(t, i, j)) out.push_back(j);
  return out;
}

inline bool is_final(const IntersectionTensor& t, Index i) {
  detail::check_index(t, i);
  const std::size_t d = detail::dim(t);
  const std::int64_t pure = t.at(power_index(i, d, i, 0));
  const auto nbrs = neighbors(t, i);
  if (nbrs.empty())
    return checked::mul(checked::sign_power(static_cast<long>(d) - 1), pure) > 0;
  for (Index j : nbrs) {
    for (std::size_t r = 1; r < d; ++r) {
      const std::int64_t mixed = t.at(power_index(i, d - r, j, r));
      if (pure != checked::mul(checked::sign_power(static_cast<long>(r)), mixed))
        return false;
    }
    if (t.at(power_index(i, 1, j, d - 1)) <= 0) return false;
  }
  return true;
}

inline std::vector<Index> final_set(const IntersectionTensor& t) {
  std::vector<Index> out;
  for (Index i = 0; i < t.size(); ++i)
    if (is_final(t, i)) out.push_back(i);
  return out;
}

// Blows down the final component i.
inline std::pair<IntersectionTensor, ContractionStep> contract(
    const IntersectionTensor& t, Index i) {
  detail::check_index(t, i);
  if (!is_final(t, i))
    throw error(errc::precondition,
                "component " + std::to_string(i + 1) + " is not final");
  const std::size_t d = detail::dim(t);

  ContractionStep step;
  step.contracted = i;
  step.degree = checked::mul(checked::sign_power(static_cast<long>(d) - 1),
                             t.at(power_index(i, d, i, 0)));
  step.proximate_to = neighbors(t, i);

  std::vector<Index> renumber(t.size(), 0);
  for (Index j = 0; j < t.size(); ++j) {
    if (j == i) continue;
    renumber[j] = step.kept.size();
    step.kept.push_back(j);
  }

  // T'(J) = sum over slot subsets S of positions holding a neighbor of
  // T(J with S replaced by i). Grouped by entry M = R + i^c, the entry feeds
  // every J = R + X with X a c-multiset of neighbors, weighted by
  // prod_x binom(mult_J(x), mult_X(x)).
  IntersectionTensor out(t.dimension(), t.size() - 1);
  for (const auto& [idx, value] : t.entries()) {
    const std::size_t c = idx.count(i);
    std::vector<Index> rest;
    for (Index x : idx.indices())
      if (x != i) rest.push_back(x);
    if (c > 0 && step.proximate_to.empty()) continue;
    detail::for_each_multiset(
        step.proximate_to, c, [&](const std::vector<Index>& extra) {
          std::vector<Index> full = rest;
          full.insert(full.end(), extra.begin(), extra.end());
          std::int64_t weight = value;
          for (std::size_t p = 0; p < extra.size();) {
            const Index x = extra[p];
            std::size_t q = p;
            while (q < extra.size() && extra[q] == x) ++q;
            const auto in_full =
                static_cast<std::int64_t>(std::count(full.begin(), full.end(), x));
            const auto in_extra = static_cast<std::int64_t>(q - p);
            std::int64_t binom = 1;
            for (std::int64_t b = 0; b < in_extra; ++b)
              binom = binom * (in_full - b) / (b + 1);
            weight = checked::mul(weight, binom);
            p = q;
          }
          std::vector<Index> mapped;
          mapped.reserve(full.size());
          for (Index x : full) mapped.push_back(renumber[x]);
          out.accumulate(MultiIndex(std::move(mapped)), weight);
        });
  }
  return {std::move(out), std::move(step)};
}

namespace detail {

// Rebuilds the forest from a complete trace: the point contracted at step t
// gets creation index m-1-t.
inline Recovery assemble(int dimension, ContractionTrace trace) {
  const std::size_t m = trace.steps.size();
  const auto originals = trace.original_indices();
  std::vector<Index> creation_of(m);
  for (std::size_t t = 0; t < m; ++t) creation_of[originals[t]] = m - 1 - t;

  std::vector<Point> points(m);
  std::vector<Index> origin(m);
  for (std::size_t t = 0; t < m; ++t) {
    const auto& step = trace.steps[t];
    const Index created = m - 1 - t;
    origin[created] = originals[t];
    Point& p = points[created];
    p.degree = step.degree;
    for (Index nb : step.proximate_to) {
      Index orig = nb;
      for (std::size_t u = t; u-- > 0;) orig = trace.steps[u].kept.at(orig);
      p.proximate_to.push_back(creation_of[orig]);
    }
    std::sort(p.proximate_to.begin(), p.proximate_to.end());
  }
  return {ProximityForest(dimension, std::move(points)), std::move(trace),
          std::move(origin)};
}

inline error not_contractible(std::size_t stage, std::size_t remaining) {
  return error(errc::not_contractible,
               "no final component at stage " + std::to_string(stage + 1) +
                   " with " + std::to_string(remaining) +
                   " components left; not a blow-up tensor");
}

}  // namespace detail

// Contracts the smallest-index final component until nothing is left.
inline Recovery recover_sequence(const IntersectionTensor& t) {
  ContractionTrace trace;
  IntersectionTensor current = t;
  while (current.size() > 0) {
    std::optional<Index> pick;
    for (Index i = 0; i < current.size() && !pick; ++i)
      if (is_final(current, i)) pick = i;
    if (!pick) throw detail::not_contractible(trace.steps.size(), current.size());
    auto [next, step] = contract(current, *pick);
    trace.steps.push_back(std::move(step));
    current = std::move(next);
  }
  return detail::assemble(t.dimension(), std::move(trace));
}

// Every admissible contraction order, depth first with finals in increasing
// index order. Throws limit_exceeded once more than `limit` orders exist.
inline std::vector<Recovery> recover_all_orders(const IntersectionTensor& t,
                                                std::size_t limit) {
  std::vector<Recovery> results;
  std::vector<ContractionStep> path;
  auto rec = [&](auto&& self, const IntersectionTensor& current) -> void {
    if (current.size() == 0) {
      if (results.size() >= limit)
        throw error(errc::limit_exceeded,
                    "more than " + std::to_string(limit) + " contraction orders");
      results.push_back(
          detail::assemble(t.dimension(), ContractionTrace{path}));
      return;
    }
    const auto finals = final_set(current);
    if (finals.empty()) throw detail::not_contractible(path.size(), current.size());
    for (Index i : finals) {
      auto [next, step] = contract(current, i);
      path.push_back(std::move(step));
      self(self, next);
      path.pop_back();
    }
  };
  rec(rec, t);
  return results;
}

}  // namespace blowup
