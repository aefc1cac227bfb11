#pragma once

// Combinatorial model of a sequence of point blow-ups.
//
// A sequence of m point blow-ups over a perfect field K is reduced to its
// proximity forest: one entry per exceptional component (irreducible over
// K), in creation order, carrying the residue degree [K(P_i):K] and the set
// of earlier components the blown-up point lies on. Indices are 0-based in
// the C++ API and 1-based in every file format.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "blowup/checked.hpp"
#include "blowup/error.hpp"

namespace blowup {

using Index = std::size_t;

struct Point {
  std::int64_t degree = 1;
  std::vector<Index> proximate_to;

  friend bool operator==(const Point&, const Point&) = default;
};

class ProximityForest {
 public:
  ProximityForest() = default;
  ProximityForest(int dimension, std::vector<Point> points)
      : dimension_(dimension), points_(std::move(points)) {}

  int dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }

  const std::vector<Point>& points() const noexcept { return points_; }
  const Point& point(Index i) const { return points_.at(i); }
  std::int64_t degree(Index i) const { return points_.at(i).degree; }

  // i -> j
  bool proximate(Index i, Index j) const {
    const auto& targets = points_.at(i).proximate_to;
    return std::find(targets.begin(), targets.end(), j) != targets.end();
  }

  std::int64_t total_degree() const {
    std::int64_t sum = 0;
    for (const auto& p : points_) sum = checked::add(sum, p.degree);
    return sum;
  }

  friend bool operator==(const ProximityForest&,
                         const ProximityForest&) = default;

 private:
  int dimension_ = 2;
  std::vector<Point> points_;
};

// A partition of the components into l blocks. Members of each block are
// kept sorted; block order is significant (it is what a block permutation
// acts on).
class MarkedPartition {
 public:
  MarkedPartition() = default;
  explicit MarkedPartition(std::vector<std::vector<Index>> blocks)
      : blocks_(std::move(blocks)) {
    for (auto& b : blocks_) std::sort(b.begin(), b.end());
  }

  static MarkedPartition singletons(std::size_t m) {
    std::vector<std::vector<Index>> blocks(m);
    for (Index i = 0; i < m; ++i) blocks[i] = {i};
    return MarkedPartition(std::move(blocks));
  }

  std::size_t size() const noexcept { return blocks_.size(); }
  const std::vector<std::vector<Index>>& blocks() const noexcept {
    return blocks_;
  }
  const std::vector<Index>& block(std::size_t b) const { return blocks_.at(b); }

  // Throws invalid_input unless the blocks partition {0..m-1}.
  void check(std::size_t m) const {
    std::vector<char> seen(m, 0);
    std::size_t covered = 0;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      if (blocks_[b].empty())
        throw error(errc::invalid_input,
                    "partition block " + std::to_string(b + 1) + " is empty");
      for (Index i : blocks_[b]) {
        if (i >= m)
          throw error(errc::invalid_input,
                      "partition index " + std::to_string(i + 1) +
                          " exceeds size " + std::to_string(m));
        if (seen[i])
          throw error(errc::invalid_input,
                      "partition index " + std::to_string(i + 1) +
                          " appears twice");
        seen[i] = 1;
        ++covered;
      }
    }
    if (covered != m)
      throw error(errc::invalid_input,
                  "partition does not cover all " + std::to_string(m) +
                      " components");
  }

  // block_of()[i] is the block containing component i. Requires check(m).
  std::vector<std::size_t> block_of(std::size_t m) const {
    std::vector<std::size_t> owner(m);
    for (std::size_t b = 0; b < blocks_.size(); ++b)
      for (Index i : blocks_[b]) owner[i] = b;
    return owner;
  }

  friend bool operator==(const MarkedPartition&,
                         const MarkedPartition&) = default;

 private:
  std::vector<std::vector<Index>> blocks_;
};

struct Violation {
  std::string rule;
  std::vector<Index> indices;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
};

namespace rule {
inline constexpr const char* dimension = "dimension";
inline constexpr const char* degree = "degree";
inline constexpr const char* target_order = "target-order";
inline constexpr const char* target_duplicate = "target-duplicate";
inline constexpr const char* target_count = "target-count";
inline constexpr const char* divisibility = "divisibility";
inline constexpr const char* surface_common_target = "surface-common-target";
inline constexpr const char* surface_separated = "surface-separated";
}  // namespace rule

namespace detail {

inline std::string one_based(Index i) { return std::to_string(i + 1); }

// d = 2: degree of the intersection of the strict transforms of components
// i < j (j -> i) just before point k is blown up.
inline std::int64_t surface_remaining_degree(const ProximityForest& f, Index i,
                                             Index j, Index k) {
  std::int64_t remaining = f.degree(j);
  for (Index q = j + 1; q < k; ++q)
    if (f.proximate(q, i) && f.proximate(q, j))
      remaining = checked::add(remaining, -f.degree(q));
  return remaining;
}

}  // namespace detail

// Reports every violated rule. Never throws on bad data; violations are data.
inline ValidationReport validate_forest(const ProximityForest& forest,
                                        bool strict) {
  using detail::one_based;
  ValidationReport report;
  auto add = [&](const char* r, std::vector<Index> idx, std::string msg) {
    report.violations.push_back({r, std::move(idx), std::move(msg)});
  };

  const int d = forest.dimension();
  if (d < 2) add(rule::dimension, {}, "dimension must be at least 2");

  bool structural_ok = true;
  for (Index i = 0; i < forest.size(); ++i) {
    const Point& p = forest.point(i);
    if (p.degree < 1)
      add(rule::degree, {i}, "point " + one_based(i) + " has degree < 1");
    std::set<Index> distinct;
    for (Index j : p.proximate_to) {
      if (j >= i) {
        structural_ok = false;
        add(rule::target_order, {i, j},
            "point " + one_based(i) + " is proximate to " + one_based(j) +
                ", which is not an earlier point");
      }
      if (!distinct.insert(j).second) {
        structural_ok = false;
        add(rule::target_duplicate, {i, j},
            "point " + one_based(i) + " lists target " + one_based(j) +
                " twice");
      }
    }
    if (d >= 2 && p.proximate_to.size() > static_cast<std::size_t>(d))
      add(rule::target_count, {i},
          "point " + one_based(i) + " is proximate to " +
              std::to_string(p.proximate_to.size()) +
              " components; at most d targets allowed");
  }

  if (!strict || !structural_ok) return report;

  for (Index i = 0; i < forest.size(); ++i) {
    for (Index j : forest.point(i).proximate_to) {
      const auto di = forest.degree(i), dj = forest.degree(j);
      if (di >= 1 && dj >= 1 && di % dj != 0)
        add(rule::divisibility, {i, j},
            "degree of point " + one_based(j) + " does not divide degree of " +
                one_based(i));
    }
  }

  if (d == 2) {
    for (Index k = 0; k < forest.size(); ++k) {
      const auto& targets = forest.point(k).proximate_to;
      for (std::size_t a = 0; a < targets.size(); ++a) {
        for (std::size_t b = 0; b < targets.size(); ++b) {
          const Index i = targets[a], j = targets[b];
          if (i >= j) continue;
          if (!forest.proximate(j, i)) {
            add(rule::surface_common_target, {k, i, j},
                "point " + one_based(k) + " lies on components " +
                    one_based(i) + " and " + one_based(j) +
                    ", which do not meet");
            continue;
          }
          if (detail::surface_remaining_degree(forest, i, j, k) <= 0)
            add(rule::surface_separated, {k, i, j},
                "point " + one_based(k) + "'s targets " + one_based(i) +
                    " and " + one_based(j) +
                    " are already separated by earlier points");
        }
      }
    }
  }
  return report;
}

inline void require_valid(const ProximityForest& forest) {
  auto report = validate_forest(forest, false);
  if (!report.ok())
    throw error(errc::invalid_input,
                "invalid forest: " + report.violations.front().message);
}

// Ordered block pairs (A, B) such that some member of A is proximate to some
// member of B.
inline std::set<std::pair<std::size_t, std::size_t>> block_proximity(
    const ProximityForest& forest, const MarkedPartition& partition) {
  partition.check(forest.size());
  const auto owner = partition.block_of(forest.size());
  std::set<std::pair<std::size_t, std::size_t>> result;
  for (Index i = 0; i < forest.size(); ++i)
    for (Index j : forest.point(i).proximate_to)
      result.emplace(owner[i], owner.at(j));
  return result;
}

inline std::int64_t block_degree(const ProximityForest& forest,
                                 const MarkedPartition& partition,
                                 std::size_t block) {
  partition.check(forest.size());
  if (block >= partition.size())
    throw error(errc::precondition,
                "block index " + std::to_string(block + 1) + " out of range");
  std::int64_t sum = 0;
  for (Index i : partition.block(block))
    sum = checked::add(sum, forest.degree(i));
  return sum;
}

namespace detail {

// Uniform draw from [0, n) by rejection; mt19937_64 output is fully specified
// by the standard, so the result is platform independent.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace detail

// Deterministic test-instance generator. For d = 2 target sets follow the
// surface rules (a point on two components requires one to be proximate to
// the other, and their intersection not yet exhausted), so the output passes
// the strict separation checks; for d >= 3 target sets are arbitrary subsets
// of earlier points of size at most d.
inline ProximityForest random_forest(std::uint64_t seed, int dimension,
                                     std::size_t m, std::int64_t max_degree) {
  if (dimension < 2)
    throw error(errc::precondition, "dimension must be at least 2");
  if (max_degree < 1)
    throw error(errc::precondition, "max-degree must be at least 1");

  std::mt19937_64 rng(seed);
  std::vector<Point> points;
  points.reserve(m);
  for (Index k = 0; k < m; ++k) {
    Point p;
    p.degree = 1 + static_cast<std::int64_t>(
                       detail::uniform_below(rng, static_cast<std::uint64_t>(max_degree)));
    if (k > 0) {
      if (dimension == 2) {
        const auto shape = detail::uniform_below(rng, 3);
        if (shape >= 1) {
          const Index j = detail::uniform_below(rng, k);
          p.proximate_to.push_back(j);
          if (shape == 2) {
            std::vector<Index> partners;
            ProximityForest partial(dimension, points);
            for (Index i : points[j].proximate_to)
              if (detail::surface_remaining_degree(partial, i, j, k) > 0)
                partners.push_back(i);
            if (!partners.empty())
              p.proximate_to.push_back(
                  partners[detail::uniform_below(rng, partners.size())]);
          }
        }
      } else {
        const std::size_t cap =
            std::min<std::size_t>(static_cast<std::size_t>(dimension), k);
        const std::size_t count = detail::uniform_below(rng, cap + 1);
        std::vector<Index> pool(k);
        std::iota(pool.begin(), pool.end(), Index{0});
        for (std::size_t t = 0; t < count; ++t) {
          const auto pick = t + detail::uniform_below(rng, pool.size() - t);
          std::swap(pool[t], pool[pick]);
          p.proximate_to.push_back(pool[t]);
        }
      }
      std::sort(p.proximate_to.begin(), p.proximate_to.end());
    }
    points.push_back(std::move(p));
  }
  return ProximityForest(dimension, std::move(points));
}

}  // namespace blowup
