#include "kioskbot/matching.hpp"

#include <limits>

#include "kioskbot/error.hpp"

namespace kioskbot {

std::vector<MatchPair> match_descriptors(std::span<const Descriptor> query,
                                         std::span<const Descriptor> train, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw Error(ErrorKind::DegenerateConfiguration, "ratio must lie in (0, 1)");
  }
  std::vector<MatchPair> out;
  if (train.size() < 2) return out;
  for (std::size_t q = 0; q < query.size(); ++q) {
    const Descriptor& d = query[q];
    int best = std::numeric_limits<int>::max();
    int second = std::numeric_limits<int>::max();
    int best_idx = -1;
    for (std::size_t t = 0; t < train.size(); ++t) {
      const int dist = hamming_distance(d, train[t]);
      if (dist < second) {
        if (dist < best) {
          second = best;
          best = dist;
          best_idx = static_cast<int>(t);
        } else {
          second = dist;
        }
      }
    }
    if (static_cast<double>(best) < ratio * static_cast<double>(second)) {
      out.push_back({static_cast<int>(q), best_idx, best});
    }
  }
  return out;
}

}  // namespace kioskbot
