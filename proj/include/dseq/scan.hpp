#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "dseq/dseq_core.hpp"
#include "dseq/error.hpp"
#include "dseq/prime_engine.hpp"

namespace dseq {

struct ScanOptions {
  PrimeRange range{7, 999983};
  Base base = Base::binary();
  DigitRule rule = DigitRule::Division;
  bool keep_records = false;
  unsigned workers = 0;  // 0 = one per hardware thread

  friend bool operator==(const ScanOptions&, const ScanOptions&) = default;
};

struct ClassTotals {
  std::uint64_t zeros_exceed = 0;
  std::uint64_t ones_exceed = 0;
  std::uint64_t equal = 0;
  // Records whose zero count is strictly larger than every other digit's
  // count. Equals zeros_exceed in binary; the ternary headline figure.
  std::uint64_t zeros_dominant = 0;

  friend bool operator==(const ClassTotals&, const ClassTotals&) = default;
};

struct DerivedPercentages {
  double pct_ones_exceed = 0.0;
  double pct_zeros_exceed = 0.0;
  double pct_unequal_all = 0.0;
  double pct_unequal_nonmax = 0.0;

  friend bool operator==(const DerivedPercentages&, const DerivedPercentages&) = default;
};

struct ScanReport {
  ScanOptions options;
  ClassTotals totals;
  std::uint64_t population = 0;
  std::uint64_t skipped = 0;
  std::uint64_t max_length_count = 0;
  std::uint64_t unequal_nonmax_count = 0;
  DerivedPercentages derived;
  std::optional<std::vector<DSeqRecord>> records;  // sorted by p

  // The worker count is an execution detail, not part of a report's identity.
  friend bool operator==(const ScanReport& a, const ScanReport& b) {
    ScanOptions ao = a.options, bo = b.options;
    ao.workers = bo.workers = 0;
    return ao == bo && a.totals == b.totals && a.population == b.population && a.skipped == b.skipped &&
           a.max_length_count == b.max_length_count && a.unequal_nonmax_count == b.unequal_nonmax_count &&
           a.derived == b.derived && a.records == b.records;
  }
};

// Recomputes `derived` from the integer tallies.
inline DerivedPercentages derive_percentages(const ScanReport& r) {
  DerivedPercentages d;
  auto pct = [](std::uint64_t num, std::uint64_t den) {
    return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
  };
  d.pct_ones_exceed = pct(r.totals.ones_exceed, r.population);
  d.pct_zeros_exceed = pct(r.totals.zeros_exceed, r.population);
  d.pct_unequal_all = pct(r.totals.zeros_exceed + r.totals.ones_exceed, r.population);
  d.pct_unequal_nonmax = pct(r.unequal_nonmax_count, r.population - r.max_length_count);
  return d;
}

namespace detail {

struct PartialScan {
  ClassTotals totals;
  std::uint64_t population = 0;
  std::uint64_t skipped = 0;
  std::uint64_t max_length = 0;
  std::uint64_t unequal_nonmax = 0;
  std::vector<DSeqRecord> records;

  void add(const DSeqRecord& rec, bool keep) {
    ++population;
    if (rec.max_length) ++max_length;
    const auto& c = rec.counts.counts;
    if (std::all_of(c.begin() + 1, c.end(), [&](std::uint64_t n) { return c[0] > n; })) ++totals.zeros_dominant;
    if (rec.cls) {
      switch (*rec.cls) {
        case Classification::ZerosExceed: ++totals.zeros_exceed; break;
        case Classification::OnesExceed: ++totals.ones_exceed; break;
        case Classification::Equal: ++totals.equal; break;
      }
      if (*rec.cls != Classification::Equal && !rec.max_length) ++unequal_nonmax;
    }
    if (keep) records.push_back(rec);
  }

  // Commutative on the tallies; records are concatenated and sorted later.
  void merge(PartialScan&& other) {
    totals.zeros_exceed += other.totals.zeros_exceed;
    totals.ones_exceed += other.totals.ones_exceed;
    totals.equal += other.totals.equal;
    totals.zeros_dominant += other.totals.zeros_dominant;
    population += other.population;
    skipped += other.skipped;
    max_length += other.max_length;
    unequal_nonmax += other.unequal_nonmax;
    records.insert(records.end(), std::make_move_iterator(other.records.begin()),
                   std::make_move_iterator(other.records.end()));
  }
};

inline unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace detail

// Analyzes every prime in options.range. Primes dividing the base are
// counted in `skipped`. Output does not depend on the worker count.
inline ScanReport scan(const ScanOptions& options) {
  const std::vector<Prime> primes = primes_in(options.range);
  constexpr std::size_t kChunk = 512;
  const std::size_t chunk_count = (primes.size() + kChunk - 1) / kChunk;
  std::vector<detail::PartialScan> partials(chunk_count);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t c = next.fetch_add(1); c < chunk_count; c = next.fetch_add(1)) {
      auto& part = partials[c];
      const std::size_t end = std::min(primes.size(), (c + 1) * kChunk);
      for (std::size_t i = c * kChunk; i < end; ++i) {
        const Prime p = primes[i];
        if (options.base.value() % p == 0) {
          ++part.skipped;
          continue;
        }
        part.add(analyze(p, options.base, options.rule), options.keep_records);
      }
    }
  };

  const unsigned workers = std::min<std::size_t>(detail::resolve_workers(options.workers),
                                                 std::max<std::size_t>(chunk_count, 1));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  detail::PartialScan total;
  for (auto& part : partials) total.merge(std::move(part));

  ScanReport report;
  report.options = options;
  report.totals = total.totals;
  report.population = total.population;
  report.skipped = total.skipped;
  report.max_length_count = total.max_length;
  report.unequal_nonmax_count = total.unequal_nonmax;
  report.derived = derive_percentages(report);
  if (options.keep_records) {
    std::sort(total.records.begin(), total.records.end(),
              [](const DSeqRecord& a, const DSeqRecord& b) { return a.p < b.p; });
    report.records = std::move(total.records);
  }
  return report;
}

struct BucketRow {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  std::uint64_t zeros_greater = 0;
  std::uint64_t ones_greater = 0;

  friend bool operator==(const BucketRow&, const BucketRow&) = default;
};

using BucketBounds = std::vector<std::pair<std::uint64_t, std::uint64_t>>;

inline const BucketBounds& default_bucket_bounds() {
  static const BucketBounds bounds{{1, 10000},     {10001, 20000}, {20001, 30000}, {30001, 40000},
                                   {40001, 50000}, {50001, 60000}, {60001, 65535}};
  return bounds;
}

inline const std::vector<DSeqRecord>& require_records(const ScanReport& report) {
  if (!report.records) throw MissingRecords();
  return *report.records;
}

// Tallies ZerosExceed / OnesExceed records per prime-value bucket. Equal
// records are not counted.
inline std::vector<BucketRow> bucketize(const ScanReport& report, const BucketBounds& bounds) {
  const auto& records = require_records(report);
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (bounds[i].first > bounds[i].second) throw InvalidArgument("bucket with lo > hi");
    if (i > 0 && bounds[i].first <= bounds[i - 1].second)
      throw InvalidArgument("bucket bounds must be ascending and non-overlapping");
  }
  std::vector<BucketRow> rows;
  rows.reserve(bounds.size());
  for (const auto& [lo, hi] : bounds) {
    BucketRow row{lo, hi, 0, 0};
    auto first = std::lower_bound(records.begin(), records.end(), lo,
                                  [](const DSeqRecord& r, std::uint64_t v) { return r.p < v; });
    for (auto it = first; it != records.end() && it->p <= hi; ++it) {
      if (!it->cls) continue;
      if (*it->cls == Classification::ZerosExceed) ++row.zeros_greater;
      if (*it->cls == Classification::OnesExceed) ++row.ones_greater;
    }
    rows.push_back(row);
  }
  return rows;
}

struct SeriesPoint {
  Prime p = 0;
  double value = 0.0;

  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

inline void require_base(const ScanReport& report, Base base) {
  if (report.options.base != base)
    throw Unsupported("series needs a base-" + std::to_string(base.value()) + " report");
}

// (p, pct_diff) for every record with unequal counts. Positive: zeros exceed.
inline std::vector<SeriesPoint> figure1_series(const ScanReport& report) {
  require_base(report, Base::binary());
  std::vector<SeriesPoint> out;
  for (const auto& r : require_records(report)) {
    if (r.pct_diff && *r.pct_diff != 0.0) out.push_back({r.p, *r.pct_diff});
  }
  return out;
}

// (p, |pct_diff|) for OnesExceed records only.
inline std::vector<SeriesPoint> figure2_series(const ScanReport& report) {
  require_base(report, Base::binary());
  std::vector<SeriesPoint> out;
  for (const auto& r : require_records(report)) {
    if (r.cls == Classification::OnesExceed) out.push_back({r.p, -*r.pct_diff});
  }
  return out;
}

struct RatioPoint {
  Prime p = 0;
  TernaryRatios ratios;

  friend bool operator==(const RatioPoint&, const RatioPoint&) = default;
};

inline std::vector<RatioPoint> figure34_series(const ScanReport& report) {
  require_base(report, Base::ternary());
  std::vector<RatioPoint> out;
  for (const auto& r : require_records(report)) out.push_back({r.p, ternary_ratios(r.counts)});
  return out;
}

}  // namespace dseq
