#pragma once

// Command-line front end. Kept in a header so the test suite can drive it
// in-process with string streams.

#include <array>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dseq/dseq.hpp"

namespace dseq::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDomain = 2, kIo = 3 };

inline constexpr std::array<std::pair<std::uint64_t, std::uint64_t>, 7> kReferenceTable2{{
    {320, 30}, {256, 40}, {265, 24}, {251, 27}, {240, 31}, {245, 35}, {131, 19}}};

namespace detail {

// Runs `emit` against `out`, or against the file at `path` when given.
inline void with_output(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& emit) {
  if (path.empty()) {
    emit(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError(path, "cannot open for writing");
  emit(file);
  file.flush();
  if (!file) throw IoError(path, "write failed");
}

inline Prime require_prime(std::uint64_t p) {
  if (!is_prime(p)) throw InvalidArgument(std::to_string(p) + " is not prime");
  return p;
}

inline void print_table2_rows(std::ostream& out, const std::vector<BucketRow>& rows,
                              const std::vector<std::uint64_t>& equal) {
  out << "# range zeros_greater ones_greater equal(extension)\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << rows[i].lo << '-' << rows[i].hi << ' ' << rows[i].zeros_greater << ' ' << rows[i].ones_greater << ' '
        << equal[i] << '\n';
  }
}

inline std::vector<std::uint64_t> equal_per_bucket(const ScanReport& report, const BucketBounds& bounds) {
  std::vector<std::uint64_t> equal(bounds.size(), 0);
  for (const auto& r : require_records(report)) {
    if (r.cls != Classification::Equal) continue;
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      if (bounds[i].first <= r.p && r.p <= bounds[i].second) ++equal[i];
    }
  }
  return equal;
}

inline void print_summary(std::ostream& out, const ScanReport& r, const char* prefix) {
  const auto& d = r.derived;
  out << prefix << "zeros_exceed " << r.totals.zeros_exceed << " (" << fixed(d.pct_zeros_exceed) << "%)\n";
  out << prefix << "ones_exceed " << r.totals.ones_exceed << " (" << fixed(d.pct_ones_exceed) << "%)\n";
  out << prefix << "equal " << r.totals.equal << '\n';
  out << prefix << "population " << r.population << '\n';
  out << prefix << "skipped " << r.skipped << '\n';
  out << prefix << "max_length " << r.max_length_count << '\n';
  out << prefix << "pct_unequal_all " << fixed(d.pct_unequal_all) << '\n';
  out << prefix << "pct_unequal_nonmax " << fixed(d.pct_unequal_nonmax) << '\n';
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Binary and ternary d-sequence statistics for prime reciprocals", "dseq"};
  app.require_subcommand(1);

  unsigned base = 2;
  std::uint64_t prime = 0;
  std::string rule_name = "division";
  unsigned workers = 0;
  std::string out_path;

  auto add_base = [&](CLI::App* sub) {
    sub->add_option("--base", base, "Radix (2 or 3)")->check(CLI::IsMember({2u, 3u}))->capture_default_str();
  };
  auto add_rule = [&](CLI::App* sub) {
    sub->add_option("--rule", rule_name, "Digit rule")
        ->check(CLI::IsMember({"division", "kak"}))
        ->capture_default_str();
  };
  auto add_workers = [&](CLI::App* sub) {
    sub->add_option("--workers", workers, "Worker threads (0 = one per hardware thread)")->capture_default_str();
  };

  auto* order = app.add_subcommand("order", "Period of 1/p, the multiplicative order of the base mod p");
  add_base(order);
  order->add_option("--prime", prime, "Prime p")->required();

  std::uint64_t count = 0;
  auto* digits_cmd = app.add_subcommand("digits", "Leading digits of the d-sequence of 1/p");
  add_base(digits_cmd);
  add_rule(digits_cmd);
  digits_cmd->add_option("--prime", prime, "Prime p")->required();
  digits_cmd->add_option("--count", count, "Number of digits (default: one period)");

  auto* analyze_cmd = app.add_subcommand("analyze", "Full analysis of one prime as a CSV record");
  add_base(analyze_cmd);
  add_rule(analyze_cmd);
  analyze_cmd->add_option("--prime", prime, "Prime p")->required();

  std::uint64_t from = 7;
  std::uint64_t to = 999983;
  bool records = false;
  std::string format_name = "json";
  auto* scan_cmd = app.add_subcommand("scan", "Scan a prime range and report digit-balance totals");
  add_base(scan_cmd);
  add_rule(scan_cmd);
  add_workers(scan_cmd);
  scan_cmd->add_option("--from", from, "Lowest value scanned")->capture_default_str();
  scan_cmd->add_option("--to", to, "Highest value scanned")->capture_default_str();
  scan_cmd->add_flag("--records", records, "Keep one record per prime");
  scan_cmd->add_option("--format", format_name, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  scan_cmd->add_option("--out", out_path, "Output file (default: stdout)");

  auto* table1 = app.add_subcommand("table1", "Binary totals for primes 7..999983");
  add_rule(table1);
  add_workers(table1);

  auto* table2 = app.add_subcommand("table2", "Binary totals per prime-value bucket up to 65535");
  add_rule(table2);
  add_workers(table2);

  unsigned figure = 1;
  std::uint64_t plot_to = 65535;
  auto* plot = app.add_subcommand("plot-data", "Per-prime series for plotting");
  plot->add_option("--figure", figure, "1: pct difference, 2: ones-exceed magnitude, 3: n0/n1, 4: n0/n2")
      ->required()
      ->check(CLI::IsMember({1u, 2u, 3u, 4u}));
  plot->add_option("--from", from, "Lowest value scanned")->capture_default_str();
  plot->add_option("--to", plot_to, "Highest value scanned")->capture_default_str();
  add_rule(plot);
  add_workers(plot);
  plot->add_option("--out", out_path, "Output file (default: stdout)");

  double target = 0.0;
  double epsilon = 0.01;
  std::uint64_t range_from = 7;
  std::uint64_t range_to = 65535;
  std::uint64_t seed = 0;
  unsigned trials = 1;
  unsigned max_ops = kDefaultMaxOps;
  auto* event = app.add_subcommand("event", "Compose anomaly trials into an event of a target probability");
  event->add_option("--target", target, "Target probability in (0, 1)")->required();
  event->add_option("--epsilon", epsilon, "Allowed |predicted - target|")->capture_default_str();
  event->add_option("--range-from", range_from, "Lowest value of the agreed prime range")->capture_default_str();
  event->add_option("--range-to", range_to, "Highest value of the agreed prime range")->capture_default_str();
  event->add_option("--seed", seed, "Seed of run 0; run i uses seed + i")->required();
  event->add_option("--trials", trials, "Number of event runs")->capture_default_str()->check(CLI::PositiveNumber);
  event->add_option("--max-ops", max_ops, "Maximum AND/OR connectives")->capture_default_str();
  add_workers(event);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    const DigitRule rule = parse_digit_rule(rule_name);

    if (*order) {
      out << multiplicative_order(base, detail::require_prime(prime)) << '\n';
    } else if (*digits_cmd) {
      detail::require_prime(prime);
      const std::uint64_t n = count != 0 ? count : multiplicative_order(base, prime);
      for (const unsigned d : digits(n, base, prime, rule)) out << d;
      out << '\n';
    } else if (*analyze_cmd) {
      const auto rec = analyze(detail::require_prime(prime), Base(base), rule);
      out << kRecordCsvHeader << '\n';
      write_record_csv(out, rec);
    } else if (*scan_cmd) {
      const auto format = parse_report_format(format_name);
      const auto report = scan({{from, to}, Base(base), rule, records, workers});
      if (format == ReportFormat::Csv && !records) err << "note: csv output lists records; pass --records\n";
      detail::with_output(out_path, out, [&](std::ostream& o) { write_report(o, report, format); });
    } else if (*table1) {
      const auto report = scan({{7, 999983}, Base::binary(), rule, false, workers});
      out << "# primes 7..999983, base 2, rule " << to_string(rule) << '\n';
      detail::print_summary(out, report, "");
    } else if (*table2) {
      const auto& bounds = default_bucket_bounds();
      const auto report = scan({{7, 65535}, Base::binary(), rule, true, workers});
      const auto rows = bucketize(report, bounds);
      out << "# primes 7..65535, base 2, rule " << to_string(rule) << '\n';
      detail::print_table2_rows(out, rows, detail::equal_per_bucket(report, bounds));
      detail::print_summary(out, report, "# ");
      bool matches = true;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        matches = matches && rows[i].zeros_greater == kReferenceTable2[i].first &&
                  rows[i].ones_greater == kReferenceTable2[i].second;
      }
      if (!matches) {
        err << "warning: bucket counts deviate from the reference rows\n";
        if (rule == DigitRule::Division) {
          const auto kak = scan({{7, 65535}, Base::binary(), DigitRule::KakFormula, true, workers});
          out << "# rule kak\n";
          detail::print_table2_rows(out, bucketize(kak, bounds), detail::equal_per_bucket(kak, bounds));
        }
      }
    } else if (*plot) {
      const Base plot_base = figure <= 2 ? Base::binary() : Base::ternary();
      const auto report = scan({{from, plot_to}, plot_base, rule, true, workers});
      detail::with_output(out_path, out, [&](std::ostream& o) {
        switch (figure) {
          case 1: write_series_csv(o, figure1_series(report)); break;
          case 2: write_series_csv(o, figure2_series(report)); break;
          case 3: write_ratio_series_csv(o, figure34_series(report), RatioKind::ZerosOverOnes); break;
          default: write_ratio_series_csv(o, figure34_series(report), RatioKind::ZerosOverTwos); break;
        }
      });
    } else if (*event) {
      const PrimeRange range{range_from, range_to};
      const auto report = scan({range, Base::binary(), DigitRule::Division, true, workers});
      // The agreed q is the scanned fraction rounded to six places, so the
      // plan's q has an exact decimal form.
      const Rational q = parse_decimal(to_decimal(q_from_report(report), 6));
      const EventPlan plan = build_plan(target, q, epsilon, range, max_ops);
      const TrialSource source(range, report);

      nlohmann::json doc;
      doc["plan"] = to_json(plan);
      doc["leaves"] = plan.leaves();
      doc["predicted"] = to_decimal(plan.predicted, 6);
      doc["runs"] = nlohmann::json::array();
      std::uint64_t hits = 0;
      for (unsigned i = 0; i < trials; ++i) {
        const Transcript t = run_event(plan, source, seed + i);
        nlohmann::json run = to_json(t);
        run["seed"] = seed + i;
        doc["runs"].push_back(std::move(run));
        hits += t.outcome;
      }
      doc["frequency"] = std::to_string(hits) + "/" + std::to_string(trials);
      out << doc.dump(2) << '\n';
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == Error::Kind::Io ? kIo : kDomain;
  }
  return kOk;
}

}  // namespace dseq::cli
