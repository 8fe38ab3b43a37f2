#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dseq/error.hpp"
#include "dseq/modular.hpp"
#include "dseq/prime_engine.hpp"

namespace dseq {

// Radix of a d-sequence. The algorithms below work for any b >= 2; the
// public surface admits binary and ternary only.
class Base {
 public:
  constexpr Base() = default;
  constexpr explicit Base(unsigned b) : value_(b) {
    if (b != 2 && b != 3) throw Unsupported("unsupported base " + std::to_string(b) + " (expected 2 or 3)");
  }

  static constexpr Base binary() { return Base(2); }
  static constexpr Base ternary() { return Base(3); }

  constexpr unsigned value() const noexcept { return value_; }
  constexpr operator unsigned() const noexcept { return value_; }
  friend constexpr bool operator==(Base, Base) = default;

 private:
  unsigned value_ = 2;
};

// Division: true radix digits of 1/p, d_i = floor(b * r_{i-1} / p), r_0 = 1.
// KakFormula: d_i = (b^i mod p) mod b.
enum class DigitRule { Division, KakFormula };

inline std::string_view to_string(DigitRule rule) noexcept {
  return rule == DigitRule::Division ? "division" : "kak";
}

inline DigitRule parse_digit_rule(std::string_view s) {
  if (s == "division") return DigitRule::Division;
  if (s == "kak") return DigitRule::KakFormula;
  throw InvalidArgument("unknown digit rule '" + std::string(s) + "'");
}

// Per-digit tallies over exactly one period.
struct DigitCounts {
  Base base;
  std::vector<std::uint64_t> counts;  // counts[d] = occurrences of digit d
  std::uint64_t period = 0;

  std::uint64_t operator[](unsigned d) const { return counts.at(d); }
  friend bool operator==(const DigitCounts&, const DigitCounts&) = default;
};

enum class Classification { ZerosExceed, OnesExceed, Equal };

inline std::string_view to_string(Classification c) noexcept {
  switch (c) {
    case Classification::ZerosExceed: return "zeros_exceed";
    case Classification::OnesExceed: return "ones_exceed";
    case Classification::Equal: return "equal";
  }
  return "?";
}

inline Classification parse_classification(std::string_view s) {
  if (s == "zeros_exceed") return Classification::ZerosExceed;
  if (s == "ones_exceed") return Classification::OnesExceed;
  if (s == "equal") return Classification::Equal;
  throw InvalidArgument("unknown classification '" + std::string(s) + "'");
}

// One prime's full analysis. `cls` and `pct_diff` are binary-only.
struct DSeqRecord {
  Prime p = 0;
  Base base;
  DigitRule rule = DigitRule::Division;
  std::uint64_t period = 0;
  DigitCounts counts;
  std::optional<Classification> cls;
  bool max_length = false;
  std::optional<double> pct_diff;

  friend bool operator==(const DSeqRecord&, const DSeqRecord&) = default;
};

namespace detail {

inline void require_coprime(unsigned b, Prime p) {
  if (p < 2) throw InvalidArgument("modulus must be prime, got " + std::to_string(p));
  if (b % p == 0) throw BaseDividesPrime(b, p);
}

// Residue walk r <- b*r mod p for i = 1..period, tallying each digit.
// The compile-time base turns the division into comparisons.
template <unsigned B>
std::array<std::uint64_t, B> walk(Prime p, std::uint64_t period, DigitRule rule) {
  std::array<std::uint64_t, B> tally{};
  std::uint64_t r = 1;
  if (rule == DigitRule::Division) {
    for (std::uint64_t i = 0; i < period; ++i) {
      std::uint64_t x = B * r;
      unsigned d = 0;
      for (unsigned k = 1; k < B; ++k) d += x >= k * p;
      r = x - d * p;
      ++tally[d];
    }
  } else {
    for (std::uint64_t i = 0; i < period; ++i) {
      std::uint64_t x = B * r;
      unsigned q = 0;
      for (unsigned k = 1; k < B; ++k) q += x >= k * p;
      r = x - q * p;
      ++tally[r % B];
    }
  }
  return tally;
}

// Specialized binary walk: only the ones are counted.
template <>
inline std::array<std::uint64_t, 2> walk<2>(Prime p, std::uint64_t period, DigitRule) {
  // Both rules agree in binary: r_i = 2 r_{i-1} - d_i p, and p is odd.
  std::uint64_t r = 1;
  std::uint64_t ones = 0;
  for (std::uint64_t i = 0; i < period; ++i) {
    const std::uint64_t x = r << 1;
    const std::uint64_t d = x >= p;
    ones += d;
    r = x - (d ? p : 0);
  }
  return {period - ones, ones};
}

inline std::vector<std::uint64_t> walk_generic(unsigned b, Prime p, std::uint64_t period, DigitRule rule) {
  std::vector<std::uint64_t> tally(b, 0);
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < period; ++i) {
    const std::uint64_t x = r * b;
    const std::uint64_t d = x / p;
    r = x - d * p;
    ++tally[rule == DigitRule::Division ? d : r % b];
  }
  return tally;
}

}  // namespace detail

// Smallest T >= 1 with b^T = 1 (mod p). Strips prime factors of p-1.
inline std::uint64_t multiplicative_order(unsigned b, Prime p) {
  detail::require_coprime(b, p);
  std::uint64_t order = p - 1;
  for (const std::uint64_t l : distinct_prime_factors(p - 1)) {
    while (order % l == 0 && pow_mod(b, order / l, p) == 1) order /= l;
  }
  return order;
}

// i-th digit (i >= 1) of the d-sequence of 1/p.
inline unsigned digit(std::uint64_t i, unsigned b, Prime p, DigitRule rule) {
  detail::require_coprime(b, p);
  if (i == 0) throw InvalidArgument("digit index starts at 1");
  if (rule == DigitRule::KakFormula) return static_cast<unsigned>(pow_mod(b, i, p) % b);
  const std::uint64_t prev = pow_mod(b, i - 1, p);
  return static_cast<unsigned>(static_cast<unsigned __int128>(prev) * b / p);
}

inline std::vector<unsigned> digits(std::uint64_t count, unsigned b, Prime p, DigitRule rule) {
  detail::require_coprime(b, p);
  std::vector<unsigned> out;
  out.reserve(count);
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t x = r * b;
    const std::uint64_t d = x / p;
    r = x - d * p;
    out.push_back(static_cast<unsigned>(rule == DigitRule::Division ? d : r % b));
  }
  return out;
}

inline DigitCounts digit_counts(Base base, Prime p, DigitRule rule, std::uint64_t period) {
  DigitCounts out{base, {}, period};
  switch (base.value()) {
    case 2: {
      const auto t = detail::walk<2>(p, period, rule);
      out.counts.assign(t.begin(), t.end());
      break;
    }
    case 3: {
      const auto t = detail::walk<3>(p, period, rule);
      out.counts.assign(t.begin(), t.end());
      break;
    }
    default:
      out.counts = detail::walk_generic(base, p, period, rule);
  }
  return out;
}

inline DigitCounts digit_counts(Base base, Prime p, DigitRule rule) {
  return digit_counts(base, p, rule, multiplicative_order(base, p));
}

inline Classification classify(const DigitCounts& c) {
  if (c.base != Base::binary()) throw Unsupported("classification is defined for binary counts only");
  if (c[0] > c[1]) return Classification::ZerosExceed;
  if (c[1] > c[0]) return Classification::OnesExceed;
  return Classification::Equal;
}

inline bool is_max_length(unsigned b, Prime p) { return multiplicative_order(b, p) == p - 1; }

// 100 * (n0 - n1) / T.
inline double pct_difference(const DigitCounts& c) {
  if (c.base != Base::binary()) throw Unsupported("percentage difference is defined for binary counts only");
  const double diff = static_cast<double>(c[0]) - static_cast<double>(c[1]);
  return 100.0 * diff / static_cast<double>(c.period);
}

struct TernaryRatios {
  std::optional<double> zeros_over_ones;  // empty when n1 = 0
  std::optional<double> zeros_over_twos;  // empty when n2 = 0

  friend bool operator==(const TernaryRatios&, const TernaryRatios&) = default;
};

inline TernaryRatios ternary_ratios(const DigitCounts& c) {
  if (c.base != Base::ternary()) throw Unsupported("digit ratios are defined for ternary counts only");
  auto ratio = [](std::uint64_t num, std::uint64_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  return {ratio(c[0], c[1]), ratio(c[0], c[2])};
}

inline DSeqRecord analyze(Prime p, Base base, DigitRule rule) {
  DSeqRecord rec;
  rec.p = p;
  rec.base = base;
  rec.rule = rule;
  rec.period = multiplicative_order(base, p);
  rec.counts = digit_counts(base, p, rule, rec.period);
  rec.max_length = rec.period == p - 1;
  if (base == Base::binary()) {
    rec.cls = classify(rec.counts);
    rec.pct_diff = pct_difference(rec.counts);
  }
  return rec;
}

}  // namespace dseq
