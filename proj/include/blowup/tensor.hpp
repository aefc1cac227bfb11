#pragma once

// Symmetric d-linear integer intersection form on the free group generated
// by the exceptional components, and its computation from a proximity forest.
//
// Writing each strict transform through total transforms,
//   H_i = H_i^* - sum_{k -> i} H_k^*,
// and using that distinct total transforms are orthogonal with
//   (H_k^*)^d = (-1)^(d-1) deg(P_k),
// gives the closed form
//   T(i_1..i_d) = (-1)^(d-1) sum_k deg(k) C[i_1][k] ... C[i_d][k].

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "blowup/checked.hpp"
#include "blowup/error.hpp"
#include "blowup/model.hpp"

namespace blowup {

// Sorted multiset of d component indices.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<Index> indices) : idx_(std::move(indices)) {
    std::sort(idx_.begin(), idx_.end());
  }
  MultiIndex(std::initializer_list<Index> indices)
      : MultiIndex(std::vector<Index>(indices)) {}

  std::size_t size() const noexcept { return idx_.size(); }
  Index operator[](std::size_t t) const { return idx_[t]; }
  const std::vector<Index>& indices() const noexcept { return idx_; }

  std::size_t count(Index i) const {
    return static_cast<std::size_t>(std::count(idx_.begin(), idx_.end(), i));
  }

  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<Index> idx_;
};

// i^s j^r as a multi-index.
inline MultiIndex power_index(Index i, std::size_t s, Index j, std::size_t r) {
  std::vector<Index> v(s, i);
  v.insert(v.end(), r, j);
  return MultiIndex(std::move(v));
}

class IntersectionTensor {
 public:
  using Entries = std::map<MultiIndex, std::int64_t>;

  IntersectionTensor() = default;
  IntersectionTensor(int dimension, std::size_t size)
      : dimension_(dimension), size_(size) {
    if (dimension < 1)
      throw error(errc::invalid_input, "tensor dimension must be positive");
  }

  // Rejects malformed indices and duplicate keys; zero values are dropped.
  static IntersectionTensor from_entries(
      int dimension, std::size_t size,
      const std::vector<std::pair<std::vector<Index>, std::int64_t>>& entries) {
    IntersectionTensor t(dimension, size);
    for (const auto& [idx, value] : entries) {
      if (idx.size() != static_cast<std::size_t>(dimension))
        throw error(errc::invalid_input, "entry index has wrong length");
      if (!std::is_sorted(idx.begin(), idx.end()))
        throw error(errc::invalid_input, "entry index is not nondecreasing");
      for (Index i : idx)
        if (i >= size) throw error(errc::invalid_input, "entry index out of range");
      MultiIndex key(idx);
      if (t.entries_.contains(key))
        throw error(errc::invalid_input, "duplicate entry index");
      if (value != 0) t.entries_.emplace(std::move(key), value);
    }
    return t;
  }

  int dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return size_; }
  const Entries& entries() const noexcept { return entries_; }

  std::int64_t at(const MultiIndex& idx) const {
    auto it = entries_.find(idx);
    return it == entries_.end() ? 0 : it->second;
  }
  std::int64_t at(std::initializer_list<Index> idx) const {
    return at(MultiIndex(idx));
  }

  // Adds value at idx, erasing the entry if it becomes zero.
  void accumulate(const MultiIndex& idx, std::int64_t value) {
    if (value == 0) return;
    auto [it, inserted] = entries_.try_emplace(idx, 0);
    it->second = checked::add(it->second, value);
    if (it->second == 0) entries_.erase(it);
  }

  friend bool operator==(const IntersectionTensor&,
                         const IntersectionTensor&) = default;

 private:
  int dimension_ = 2;
  std::size_t size_ = 0;
  Entries entries_;
};

namespace detail {

// Calls fn(multiset) for every nondecreasing sequence of length k over pool
// (pool sorted, distinct).
template <class Fn>
void for_each_multiset(std::span<const Index> pool, std::size_t k, Fn&& fn) {
  std::vector<Index> current;
  current.reserve(k);
  auto rec = [&](auto&& self, std::size_t from) -> void {
    if (current.size() == k) {
      fn(std::as_const(current));
      return;
    }
    for (std::size_t p = from; p < pool.size(); ++p) {
      current.push_back(pool[p]);
      self(self, p);
      current.pop_back();
    }
  };
  rec(rec, 0);
}

// Calls fn(ordering) for each distinct ordering of a sorted multiset.
template <class Fn>
void for_each_ordering(std::vector<Index> sorted, Fn&& fn) {
  do {
    fn(std::as_const(sorted));
  } while (std::next_permutation(sorted.begin(), sorted.end()));
}

}  // namespace detail

// Row i lists the coefficients of H_i in the total-transform basis:
// C[i][i] = 1, C[i][k] = -1 when k -> i, 0 otherwise.
class TotalTransformMatrix {
 public:
  explicit TotalTransformMatrix(std::size_t m)
      : m_(m), data_(m * m, 0) {}

  std::size_t size() const noexcept { return m_; }
  std::int64_t operator()(Index row, Index col) const {
    return data_[row * m_ + col];
  }
  std::int64_t& operator()(Index row, Index col) { return data_[row * m_ + col]; }

  std::vector<std::int64_t> row(Index i) const {
    return {data_.begin() + static_cast<std::ptrdiff_t>(i * m_),
            data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * m_)};
  }

  friend bool operator==(const TotalTransformMatrix&,
                         const TotalTransformMatrix&) = default;

 private:
  std::size_t m_;
  std::vector<std::int64_t> data_;
};

inline TotalTransformMatrix total_transform_matrix(
    const ProximityForest& forest) {
  require_valid(forest);
  TotalTransformMatrix c(forest.size());
  for (Index k = 0; k < forest.size(); ++k) {
    c(k, k) = 1;
    for (Index i : forest.point(k).proximate_to) c(i, k) = -1;
  }
  return c;
}

// Inverse of C. Row i lists H_i^* in the strict-transform basis, built from
// H_i^* = H_i + sum_{b -> i} H_b^* over decreasing i. These are the vectors
// on which the form's pure powers give (-1)^(d-1) deg and mixed powers vanish.
inline TotalTransformMatrix total_transform_coordinates(
    const ProximityForest& forest) {
  require_valid(forest);
  const std::size_t m = forest.size();
  TotalTransformMatrix h(m);
  for (Index i = m; i-- > 0;) {
    h(i, i) = 1;
    for (Index b = i + 1; b < m; ++b) {
      if (!forest.proximate(b, i)) continue;
      for (Index k = 0; k < m; ++k) h(i, k) = checked::add(h(i, k), h(b, k));
    }
  }
  return h;
}

inline IntersectionTensor tensor_from_forest(const ProximityForest& forest) {
  require_valid(forest);
  const int d = forest.dimension();
  const std::int64_t sign = checked::sign_power(d - 1);
  IntersectionTensor t(d, forest.size());

  // Column k of C is supported on {k} and the targets of k.
  for (Index k = 0; k < forest.size(); ++k) {
    std::vector<Index> support = forest.point(k).proximate_to;
    support.push_back(k);
    std::sort(support.begin(), support.end());
    const std::int64_t weight = checked::mul(sign, forest.degree(k));
    detail::for_each_multiset(
        support, static_cast<std::size_t>(d), [&](const std::vector<Index>& mi) {
          std::int64_t v = weight;
          for (Index i : mi)
            if (i != k) v = -v;
          t.accumulate(MultiIndex(mi), v);
        });
  }
  return t;
}

// Multilinear extension of the tensor to Z^m.
inline std::int64_t evaluate(
    const IntersectionTensor& t,
    std::span<const std::vector<std::int64_t>> vectors) {
  if (vectors.size() != static_cast<std::size_t>(t.dimension()))
    throw error(errc::precondition, "evaluate needs exactly d vectors");
  for (const auto& v : vectors)
    if (v.size() != t.size())
      throw error(errc::precondition, "vector length does not match tensor size");

  std::int64_t total = 0;
  for (const auto& [idx, value] : t.entries()) {
    detail::for_each_ordering(idx.indices(), [&](const std::vector<Index>& ord) {
      std::int64_t term = value;
      for (std::size_t slot = 0; slot < ord.size() && term != 0; ++slot)
        term = checked::mul(term, vectors[slot][ord[slot]]);
      total = checked::add(total, term);
    });
  }
  return total;
}

inline std::int64_t evaluate(const IntersectionTensor& t,
                             std::initializer_list<std::vector<std::int64_t>> vectors) {
  return evaluate(t, std::span<const std::vector<std::int64_t>>(
                         vectors.begin(), vectors.size()));
}

// Block-level form: T_q(B_1..B_d) = T(1_{B_1}, ..., 1_{B_d}).
inline IntersectionTensor quotient_tensor(const IntersectionTensor& t,
                                          const MarkedPartition& partition) {
  partition.check(t.size());
  const auto owner = partition.block_of(t.size());
  IntersectionTensor q(t.dimension(), partition.size());
  // Each ordered index tuple contributes to the block multiset exactly once:
  // through the ordering whose block sequence is nondecreasing.
  for (const auto& [idx, value] : t.entries()) {
    detail::for_each_ordering(idx.indices(), [&](const std::vector<Index>& ord) {
      std::vector<Index> blocks(ord.size());
      for (std::size_t s = 0; s < ord.size(); ++s) blocks[s] = owner[ord[s]];
      if (std::is_sorted(blocks.begin(), blocks.end()))
        q.accumulate(MultiIndex(std::move(blocks)), value);
    });
  }
  return q;
}

inline std::vector<std::int64_t> diagonal(const IntersectionTensor& t) {
  std::vector<std::int64_t> diag(t.size());
  for (Index i = 0; i < t.size(); ++i)
    diag[i] = t.at(MultiIndex(std::vector<Index>(
        static_cast<std::size_t>(t.dimension()), i)));
  return diag;
}

// Relabels indices: result(perm[i_1], ..., perm[i_d]) = t(i_1, ..., i_d).
inline IntersectionTensor permute(const IntersectionTensor& t,
                                  std::span<const Index> perm) {
  if (perm.size() != t.size())
    throw error(errc::precondition, "permutation size does not match tensor");
  IntersectionTensor out(t.dimension(), t.size());
  for (const auto& [idx, value] : t.entries()) {
    std::vector<Index> mapped;
    mapped.reserve(idx.size());
    for (Index i : idx.indices()) mapped.push_back(perm[i]);
    out.accumulate(MultiIndex(std::move(mapped)), value);
  }
  return out;
}

}  // namespace blowup
