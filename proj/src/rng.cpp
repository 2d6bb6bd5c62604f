#include "sbandit/rng.hpp"

#include <algorithm>
#include <numeric>

namespace sbandit {

std::vector<std::int32_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                     RandomSource& rng) {
  if (k > n) k = n;
  std::vector<std::int32_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + rng.choose(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace sbandit
