#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dseq/error.hpp"
#include "dseq/modular.hpp"

namespace dseq {

using Prime = std::uint64_t;

// Largest value a sieve-backed operation accepts.
inline constexpr std::uint64_t kSieveLimit = std::numeric_limits<std::uint32_t>::max();

// Inclusive range of candidate values [lo, hi].
struct PrimeRange {
  std::uint64_t lo = 7;
  std::uint64_t hi = 999983;

  bool contains(std::uint64_t v) const noexcept { return lo <= v && v <= hi; }
  friend bool operator==(const PrimeRange&, const PrimeRange&) = default;
};

inline void validate(const PrimeRange& range) {
  if (range.lo < 2) throw InvalidArgument("range lower bound must be >= 2, got " + std::to_string(range.lo));
  if (range.lo > range.hi)
    throw InvalidArgument("empty range " + std::to_string(range.lo) + ".." + std::to_string(range.hi));
  if (range.hi > kSieveLimit)
    throw CapacityError("range upper bound " + std::to_string(range.hi) + " exceeds sieve limit " +
                        std::to_string(kSieveLimit));
}

// Deterministic Miller-Rabin. The first twelve prime bases are a complete
// witness set for every n < 3.3e24, so for 64-bit input the answer is exact.
constexpr bool is_prime(std::uint64_t n) noexcept {
  constexpr std::array<std::uint64_t, 12> kWitnesses{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  if (n < 2) return false;
  for (const std::uint64_t w : kWitnesses) {
    if (n % w == 0) return n == w;
  }
  std::uint64_t d = n - 1;
  unsigned s = 0;
  while ((d & 1u) == 0) {
    d >>= 1;
    ++s;
  }
  for (const std::uint64_t a : kWitnesses) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

namespace detail {

// Plain sieve of Eratosthenes over [0, n], odd numbers only.
inline std::vector<Prime> small_sieve(std::uint64_t n) {
  std::vector<Prime> primes;
  if (n < 2) return primes;
  primes.push_back(2);
  const std::uint64_t half = (n - 1) / 2;  // index k <-> 2k+1, k in [1, half]
  std::vector<bool> composite(half + 1, false);
  for (std::uint64_t k = 1; k <= half; ++k) {
    if (composite[k]) continue;
    const std::uint64_t p = 2 * k + 1;
    primes.push_back(p);
    for (std::uint64_t m = p * p; m <= n; m += 2 * p) composite[m / 2] = true;
  }
  return primes;
}

}  // namespace detail

// Primes p with lo <= p <= hi, increasing. Only [lo, hi] is materialized,
// plus the base primes up to sqrt(hi).
inline std::vector<Prime> primes_in(const PrimeRange& range) {
  validate(range);
  const std::uint64_t lo = range.lo;
  const std::uint64_t hi = range.hi;
  auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(hi)));
  while (root * root > hi) --root;
  while ((root + 1) * (root + 1) <= hi) ++root;
  const std::vector<Prime> base = detail::small_sieve(root);

  std::vector<bool> composite(hi - lo + 1, false);
  for (const Prime p : base) {
    std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
    for (std::uint64_t m = start; m <= hi; m += p) composite[m - lo] = true;
  }
  std::vector<Prime> primes;
  for (std::uint64_t v = lo; v <= hi; ++v) {
    if (!composite[v - lo]) primes.push_back(v);
  }
  return primes;
}

inline std::vector<Prime> sieve_upto(std::uint64_t n) {
  if (n < 2) throw InvalidArgument("sieve bound must be >= 2, got " + std::to_string(n));
  return primes_in(PrimeRange{2, n});
}

}  // namespace dseq
