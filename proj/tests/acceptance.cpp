// Acceptance suite: one PASS/FAIL line per criterion, with timing.
// Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "blowup/blowup.hpp"
#include "oracles.hpp"

using namespace blowup;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::int64_t sign(long n) { return n % 2 == 0 ? 1 : -1; }

// Corpus shared by criteria 3, 6, 7 and 8.
struct Sample {
  ProximityForest forest;
  IntersectionTensor tensor;
};

std::vector<Sample> build_corpus(std::size_t per_cell) {
  std::vector<Sample> corpus;
  for (int d = 2; d <= 4; ++d)
    for (std::size_t m = 1; m <= 8; ++m)
      for (std::size_t n = 0; n < per_cell; ++n) {
        const std::uint64_t seed = (static_cast<std::uint64_t>(d) << 40) ^ (m << 20) ^ n;
        auto f = random_forest(seed, d, m, 3);
        auto t = tensor_from_forest(f);
        corpus.push_back({std::move(f), std::move(t)});
      }
  return corpus;
}

Outcome three_point_entries() {
  Outcome out;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok && out.pass) out = {false, what};
  };
  for (int d : {4, 2}) {
    const ProximityForest pi(d, {{1, {}}, {1, {0}}, {3, {1}}});
    const ProximityForest pi_prime(d, {{1, {}}, {2, {0}}, {2, {1}}});
    const auto t = tensor_from_forest(pi), u = tensor_from_forest(pi_prime);
    expect(diagonal(t) == std::vector<std::int64_t>{-2, -4, -3}, "pi diagonal");
    expect(diagonal(u) == std::vector<std::int64_t>{-3, -4, -2}, "pi' diagonal");
    for (std::size_t r = 1; r < static_cast<std::size_t>(d); ++r) {
      const std::size_t s = d - r;
      expect(t.at(power_index(0, r, 1, s)) == sign(r + 1), "pi T(1^r 2^s)");
      expect(t.at(power_index(1, r, 2, s)) == sign(r) * -3, "pi T(2^r 3^s)");
      expect(u.at(power_index(0, r, 1, s)) == sign(r + 1) * 2, "pi' T(1^r 2^s)");
      expect(u.at(power_index(1, r, 2, s)) == sign(r) * -2, "pi' T(2^r 3^s)");
    }
  }
  if (out.pass) out.detail = "d=4 and d=2 entries exact";
  return out;
}

Outcome diagonal_insufficient() {
  const ProximityForest pi(4, {{1, {}}, {1, {0}}, {3, {1}}});
  const ProximityForest pi_prime(4, {{1, {}}, {2, {0}}, {2, {1}}});
  const auto t = tensor_from_forest(pi), u = tensor_from_forest(pi_prime);
  auto a = diagonal(t), b = diagonal(u);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const bool same = a == b && a == std::vector<std::int64_t>{-4, -3, -2};
  const bool none = !tensor_equivalent(t, u).has_value();
  return {same && none, same ? (none ? "diagonals {-4,-3,-2} agree, no equivalence"
                                     : "unexpected equivalence")
                             : "diagonal multisets differ"};
}

Outcome round_trip(const std::vector<Sample>& corpus) {
  for (const auto& s : corpus) {
    const auto r = recover_sequence(s.tensor);
    const auto w = forest_isomorphic(r.forest, s.forest);
    if (!w || !maps_forest(r.forest, s.forest, *w))
      return {false, "round trip lost isomorphism at d=" + std::to_string(s.forest.dimension()) +
                         " m=" + std::to_string(s.forest.size())};
  }
  return {true, std::to_string(corpus.size()) + " forests, 200 per (d, m)"};
}

Outcome confluence() {
  std::size_t forests = 0, orders = 0;
  Outcome out;
  for (int d : {2, 3}) {
    for (std::size_t m = 1; m <= 5 && out.pass; ++m) {
      oracle::for_each_forest(d, m, 2, [&](const ProximityForest& f) {
        if (!out.pass || !validate_forest(f, false).ok()) return;
        ++forests;
        const auto all = recover_all_orders(tensor_from_forest(f), 1000);
        orders += all.size();
        for (const auto& r : all)
          if (!forest_isomorphic(r.forest, all.front().forest) ||
              !forest_isomorphic(r.forest, f))
            out = {false, "non-isomorphic orders at d=" + std::to_string(d)};
      });
    }
  }
  if (out.pass)
    out.detail = std::to_string(forests) + " forests, " + std::to_string(orders) + " orders";
  return out;
}

Outcome equivalence_oracle() {
  std::mt19937_64 rng(20261017);
  std::size_t pairs = 0, positives = 0;
  for (std::uint64_t n = 0; n < 300; ++n) {
    const int d = 2 + static_cast<int>(n % 3);
    const std::size_t m = 1 + (n / 3) % 6;
    const auto a = random_forest(n, d, m, 2);
    // Alternate relabeled copies and independent draws.
    const auto b = n % 2 == 0 ? oracle::random_relabel(a, rng).first
                              : random_forest(n + 100000, d, m, 2);
    const bool fast = forest_isomorphic(a, b).has_value();
    const bool brute =
        oracle::brute_force_equivalent(tensor_from_forest(a), tensor_from_forest(b));
    if (fast != brute)
      return {false, "decision mismatch at pair " + std::to_string(n)};
    ++pairs;
    positives += brute;
  }
  return {true, std::to_string(pairs) + " pairs, " + std::to_string(positives) + " equivalent"};
}

Outcome finals_disjoint(const std::vector<Sample>& corpus) {
  std::size_t checked = 0;
  for (const auto& s : corpus) {
    const auto finals = final_set(s.tensor);
    for (Index a : finals)
      for (Index b : finals)
        if (a < b) {
          ++checked;
          if (!empty_intersection(s.tensor, a, b)) return {false, "final pair meets"};
        }
  }
  return {true, std::to_string(checked) + " final pairs"};
}

Outcome surface_adjacency(const std::vector<Sample>& corpus) {
  std::size_t checked = 0;
  for (const auto& s : corpus) {
    if (s.forest.dimension() != 2) continue;
    for (Index i = 0; i < s.forest.size(); ++i)
      for (Index j = 0; j < s.forest.size(); ++j) {
        if (i == j) continue;
        ++checked;
        const bool expected = oracle::surface_intersection(s.forest, i, j) == 0;
        if (empty_intersection(s.tensor, i, j) != expected)
          return {false, "adjacency mismatch"};
      }
  }
  return {true, std::to_string(checked) + " ordered pairs"};
}

Outcome normalization(const std::vector<Sample>& corpus) {
  std::size_t checked = 0;
  for (const auto& s : corpus) {
    const int d = s.forest.dimension();
    const auto h = total_transform_coordinates(s.forest);
    for (Index i = 0; i < s.forest.size(); ++i) {
      std::vector<std::vector<std::int64_t>> pure(d, h.row(i));
      ++checked;
      if (evaluate(s.tensor, pure) != sign(d - 1) * s.forest.degree(i))
        return {false, "pure power mismatch"};
      for (Index j = 0; j < s.forest.size(); ++j) {
        if (j == i) continue;
        for (int r = 1; r < d; ++r) {
          auto mixed = pure;
          for (int k = r; k < d; ++k) mixed[k] = h.row(j);
          ++checked;
          if (evaluate(s.tensor, mixed) != 0) return {false, "mixed power nonzero"};
        }
      }
    }
  }
  return {true, std::to_string(checked) + " evaluations"};
}

bool report(int id, const char* name, double limit_seconds, const std::function<Outcome()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = fn();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = limit_seconds <= 0 || seconds < limit_seconds;
  const bool pass = out.pass && in_time;
  std::printf("criterion %d %-30s %s  %.3fs", id, name, pass ? "PASS" : "FAIL", seconds);
  if (limit_seconds > 0) std::printf(" (limit %.0fs)", limit_seconds);
  std::printf("  %s%s\n", out.detail.c_str(), in_time ? "" : " [over time limit]");
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main() {
  bool ok = true;
  ok &= report(1, "three-point-entries", 1, three_point_entries);
  ok &= report(2, "diagonal-insufficiency", 1, diagonal_insufficient);

  std::vector<Sample> corpus;
  ok &= report(3, "round-trip", 120, [&] {
    corpus = build_corpus(200);
    return round_trip(corpus);
  });
  ok &= report(4, "contraction-confluence", 300, confluence);
  ok &= report(5, "equivalence-oracle", 120, equivalence_oracle);
  ok &= report(6, "final-pairs-disjoint", 0, [&] { return finals_disjoint(corpus); });
  ok &= report(7, "surface-adjacency", 0, [&] { return surface_adjacency(corpus); });
  ok &= report(8, "total-transform-normalization", 0, [&] { return normalization(corpus); });
  std::printf("%s\n", ok ? "all criteria passed" : "some criteria FAILED");
  return ok ? 0 : 1;
}
