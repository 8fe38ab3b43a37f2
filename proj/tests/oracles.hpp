#pragma once

// Test-only reference implementations. Each takes the slowest obvious
// route and shares no code with the library path it checks.

#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "dseq/crypto_events.hpp"

namespace oracle {

inline bool trial_division_is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

// Smallest k >= 1 with b^k = 1 (mod p), by direct iteration.
inline std::uint64_t iterated_order(unsigned b, std::uint64_t p) {
  std::uint64_t x = b % p;
  std::uint64_t k = 1;
  while (x != 1) {
    x = x * b % p;
    ++k;
  }
  return k;
}

// Digits i = 1..n of 1/p in radix b straight from the definition:
// d_i = floor(b^i / p) mod b, in exact big-integer arithmetic.
inline std::vector<unsigned> bigint_digits(unsigned b, std::uint64_t p, std::uint64_t n) {
  using boost::multiprecision::cpp_int;
  std::vector<unsigned> out;
  cpp_int power = 1;
  for (std::uint64_t i = 1; i <= n; ++i) {
    power *= b;
    out.push_back(static_cast<unsigned>(static_cast<cpp_int>((power / p) % b)));
  }
  return out;
}

// (b^i mod p) mod b with b^i formed exactly.
inline std::vector<unsigned> bigint_kak_digits(unsigned b, std::uint64_t p, std::uint64_t n) {
  using boost::multiprecision::cpp_int;
  std::vector<unsigned> out;
  cpp_int power = 1;
  for (std::uint64_t i = 1; i <= n; ++i) {
    power *= b;
    out.push_back(static_cast<unsigned>(static_cast<cpp_int>((power % p) % b)));
  }
  return out;
}

// Probability of the plan tree by enumerating all 2^n leaf assignments.
inline dseq::Rational enumerate_probability(const dseq::PlanNode& tree, const dseq::Rational& q) {
  const std::size_t n = dseq::leaf_count(tree);
  dseq::Rational total = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<bool> leaves(n);
    dseq::Rational weight = 1;
    for (std::size_t k = 0; k < n; ++k) {
      leaves[k] = (mask >> k) & 1u;
      weight *= leaves[k] ? q : 1 - q;
    }
    if (dseq::evaluate(tree, leaves)) total += weight;
  }
  return total;
}

}  // namespace oracle
