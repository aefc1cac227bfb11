#pragma once

#include "blowup/model.hpp"

namespace fixtures {

using blowup::ProximityForest;

// Degrees (1, 1, 3), edges 2 -> 1, 3 -> 2.
inline ProximityForest example_pi(int d) {
  return ProximityForest(d, {{1, {}}, {1, {0}}, {3, {1}}});
}

// Degrees (1, 2, 2), same edges.
inline ProximityForest example_pi_prime(int d) {
  return ProximityForest(d, {{1, {}}, {2, {0}}, {2, {1}}});
}

// Degrees (1, 1), edge 2 -> 1.
inline ProximityForest chain(int d) {
  return ProximityForest(d, {{1, {}}, {1, {0}}});
}

inline ProximityForest two_points(int d) {
  return ProximityForest(d, {{1, {}}, {1, {}}});
}

}  // namespace fixtures
