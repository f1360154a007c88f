#pragma once

#include <span>
#include <vector>

#include "kioskbot/features.hpp"

namespace kioskbot {

struct MatchPair {
  int query_idx = 0;
  int train_idx = 0;
  int distance = 0;

  friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

inline constexpr double kDefaultRatio = 0.75;

/// Nearest-neighbour Hamming matching with the ratio test: a query is kept
/// only when its best distance is strictly below `ratio` times the second
/// best. Queries with fewer than two train candidates are dropped. Output is
/// ordered by query index. Throws DegenerateConfiguration unless 0 < ratio < 1.
std::vector<MatchPair> match_descriptors(std::span<const Descriptor> query,
                                         std::span<const Descriptor> train,
                                         double ratio = kDefaultRatio);

}  // namespace kioskbot
