#pragma once

#include <vector>

#include "sbandit/core.hpp"
#include "sbandit/policies.hpp"

namespace sbandit::testutil {

// scripted RandomSource: returns queued choose() values, then falls back to 0
class StubSource : public RandomSource {
 public:
  explicit StubSource(std::vector<std::size_t> picks = {}) : picks_(std::move(picks)) {}

  double u01() override {
    ++u01_calls;
    return 0.0;
  }

  std::size_t choose(std::size_t m) override {
    ++choose_calls;
    last_m = m;
    std::size_t v = next_ < picks_.size() ? picks_[next_++] : 0;
    return v % (m == 0 ? 1 : m);
  }

  long choose_calls = 0;
  long u01_calls = 0;
  std::size_t last_m = 0;

 private:
  std::vector<std::size_t> picks_;
  std::size_t next_ = 0;
};

inline std::vector<AgentProfile> random_profiles(Rng& rng, int max_agents = 4,
                                                 int max_originals = 3, long max_copies = 5) {
  int n = 1 + static_cast<int>(rng.choose(static_cast<std::size_t>(max_agents)));
  std::vector<AgentProfile> profiles;
  for (int i = 1; i <= n; ++i) {
    int k = 1 + static_cast<int>(rng.choose(static_cast<std::size_t>(max_originals)));
    std::vector<double> means;
    std::vector<long> copies;
    for (int j = 0; j < k; ++j) {
      means.push_back(rng.u01());
      copies.push_back(1 + static_cast<long>(rng.choose(static_cast<std::size_t>(max_copies))));
    }
    profiles.push_back(make_profile(i, means, copies));
  }
  return profiles;
}

}  // namespace sbandit::testutil
