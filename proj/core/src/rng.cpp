#include "seqdec/rng.hpp"

#include <cmath>
#include <numbers>

#include "seqdec/errors.hpp"

namespace seqdec {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_stream(std::uint64_t master_seed, std::uint64_t replication,
                            std::string_view purpose) {
  std::uint64_t x = splitmix64(master_seed ^ (replication * 0x9e3779b97f4a7c15ULL + 1));
  return splitmix64(x ^ fnv1a64(purpose));
}

double RandomStream::normal() {
  double u1 = uniform01();
  double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t RandomStream::uniform_int(std::uint64_t n) {
  if (n == 0) throw Error("uniform_int: n must be positive");
  // Rejection below the largest multiple of n keeps the draw exactly uniform.
  std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

} // namespace seqdec
