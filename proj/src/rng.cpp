#include "rova/rng.hpp"

#include <numeric>
#include <utility>

namespace rova {

std::uint64_t derive_key(std::uint64_t parent,
                         std::initializer_list<std::uint64_t> tags) noexcept {
  std::uint64_t k = mix64(parent);
  for (std::uint64_t t : tags) k = mix64(k ^ mix64(t + 0x632BE59BD9B4E019ull));
  return k;
}

std::vector<int> random_permutation(int n, CounterRng& rng) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  return perm;
}

}  // namespace rova
