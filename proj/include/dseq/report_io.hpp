#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"

#include "dseq/error.hpp"
#include "dseq/scan.hpp"

namespace dseq {

enum class ReportFormat { Csv, Json };

inline ReportFormat parse_report_format(std::string_view s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  throw InvalidArgument("unknown report format '" + std::string(s) + "'");
}

// Fixed-point text with `digits` fraction digits.
inline std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline constexpr std::string_view kRecordCsvHeader = "p,base,rule,period,n0,n1,n2,class,max_length,pct_diff";

inline void write_record_csv(std::ostream& out, const DSeqRecord& r) {
  const auto& c = r.counts.counts;
  out << r.p << ',' << r.base.value() << ',' << to_string(r.rule) << ',' << r.period << ',' << c[0] << ',' << c[1]
      << ',';
  if (c.size() > 2) out << c[2];
  out << ',';
  if (r.cls) out << to_string(*r.cls);
  out << ',' << (r.max_length ? "true" : "false") << ',';
  if (r.pct_diff) out << fixed(*r.pct_diff);
  out << '\n';
}

inline void write_report_csv(std::ostream& out, const ScanReport& report) {
  out << kRecordCsvHeader << '\n';
  if (!report.records) return;
  for (const auto& r : *report.records) write_record_csv(out, r);
}

namespace detail {

inline void write_record_json(std::ostream& out, const DSeqRecord& r) {
  out << "{\"p\":" << r.p << ",\"base\":" << r.base.value() << ",\"rule\":\"" << to_string(r.rule)
      << "\",\"period\":" << r.period << ",\"counts\":[";
  for (std::size_t d = 0; d < r.counts.counts.size(); ++d) out << (d ? "," : "") << r.counts.counts[d];
  out << "],\"class\":";
  if (r.cls) {
    out << '"' << to_string(*r.cls) << '"';
  } else {
    out << "null";
  }
  out << ",\"max_length\":" << (r.max_length ? "true" : "false") << ",\"pct_diff\":";
  out << (r.pct_diff ? fixed(*r.pct_diff) : std::string("null")) << '}';
}

}  // namespace detail

// Field order and number formatting are fixed so that equal reports always
// serialize to identical bytes.
inline void write_report_json(std::ostream& out, const ScanReport& report) {
  const auto& o = report.options;
  const auto& t = report.totals;
  const auto& d = report.derived;
  out << "{\n";
  out << "  \"options\": {\"from\": " << o.range.lo << ", \"to\": " << o.range.hi << ", \"base\": " << o.base.value()
      << ", \"rule\": \"" << to_string(o.rule) << "\", \"keep_records\": " << (o.keep_records ? "true" : "false")
      << "},\n";
  out << "  \"totals\": {\"zeros_exceed\": " << t.zeros_exceed << ", \"ones_exceed\": " << t.ones_exceed
      << ", \"equal\": " << t.equal << ", \"zeros_dominant\": " << t.zeros_dominant << "},\n";
  out << "  \"population\": " << report.population << ",\n";
  out << "  \"skipped\": " << report.skipped << ",\n";
  out << "  \"max_length_count\": " << report.max_length_count << ",\n";
  out << "  \"unequal_nonmax_count\": " << report.unequal_nonmax_count << ",\n";
  out << "  \"derived\": {\"pct_ones_exceed\": " << fixed(d.pct_ones_exceed)
      << ", \"pct_zeros_exceed\": " << fixed(d.pct_zeros_exceed) << ", \"pct_unequal_all\": "
      << fixed(d.pct_unequal_all) << ", \"pct_unequal_nonmax\": " << fixed(d.pct_unequal_nonmax) << "}";
  if (report.records) {
    out << ",\n  \"records\": [";
    bool first = true;
    for (const auto& r : *report.records) {
      out << (first ? "\n    " : ",\n    ");
      detail::write_record_json(out, r);
      first = false;
    }
    out << (first ? "]" : "\n  ]");
  }
  out << "\n}\n";
}

inline void write_report(std::ostream& out, const ScanReport& report, ReportFormat format) {
  if (format == ReportFormat::Csv) {
    write_report_csv(out, report);
  } else {
    write_report_json(out, report);
  }
}

inline void write_report(const ScanReport& report, ReportFormat format, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError(path, "cannot open for writing");
  write_report(file, report, format);
  file.flush();
  if (!file) throw IoError(path, "write failed");
}

// Parses a JSON report. Printed percentages are rounded, so every derived
// value is recomputed from the integer data it came from.
inline ScanReport read_report_json(std::string_view text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("malformed report JSON: ") + e.what());
  }
  try {
    ScanReport r;
    const auto& o = j.at("options");
    r.options.range = {o.at("from").get<std::uint64_t>(), o.at("to").get<std::uint64_t>()};
    r.options.base = Base(o.at("base").get<unsigned>());
    r.options.rule = parse_digit_rule(o.at("rule").get<std::string>());
    r.options.keep_records = o.at("keep_records").get<bool>();
    const auto& t = j.at("totals");
    r.totals.zeros_exceed = t.at("zeros_exceed").get<std::uint64_t>();
    r.totals.ones_exceed = t.at("ones_exceed").get<std::uint64_t>();
    r.totals.equal = t.at("equal").get<std::uint64_t>();
    r.totals.zeros_dominant = t.at("zeros_dominant").get<std::uint64_t>();
    r.population = j.at("population").get<std::uint64_t>();
    r.skipped = j.at("skipped").get<std::uint64_t>();
    r.max_length_count = j.at("max_length_count").get<std::uint64_t>();
    r.unequal_nonmax_count = j.at("unequal_nonmax_count").get<std::uint64_t>();
    r.derived = derive_percentages(r);
    if (j.contains("records")) {
      std::vector<DSeqRecord> records;
      for (const auto& jr : j.at("records")) {
        DSeqRecord rec;
        rec.p = jr.at("p").get<Prime>();
        rec.base = Base(jr.at("base").get<unsigned>());
        rec.rule = parse_digit_rule(jr.at("rule").get<std::string>());
        rec.period = jr.at("period").get<std::uint64_t>();
        rec.counts = {rec.base, jr.at("counts").get<std::vector<std::uint64_t>>(), rec.period};
        if (!jr.at("class").is_null()) rec.cls = parse_classification(jr.at("class").get<std::string>());
        rec.max_length = jr.at("max_length").get<bool>();
        if (!jr.at("pct_diff").is_null()) rec.pct_diff = pct_difference(rec.counts);
        records.push_back(std::move(rec));
      }
      r.records = std::move(records);
    }
    return r;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed report JSON: ") + e.what());
  }
}

// Plot series as `p,value` rows.
inline void write_series_csv(std::ostream& out, const std::vector<SeriesPoint>& series, int digits = 2) {
  out << "p,value\n";
  for (const auto& pt : series) out << pt.p << ',' << fixed(pt.value, digits) << '\n';
}

enum class RatioKind { ZerosOverOnes, ZerosOverTwos };

// Ratio series: undefined entries are omitted and counted in a trailing
// comment line.
inline void write_ratio_series_csv(std::ostream& out, const std::vector<RatioPoint>& series, RatioKind kind,
                                   int digits = 4) {
  out << "p,value\n";
  std::uint64_t undefined = 0;
  for (const auto& pt : series) {
    const auto& v = kind == RatioKind::ZerosOverOnes ? pt.ratios.zeros_over_ones : pt.ratios.zeros_over_twos;
    if (!v) {
      ++undefined;
      continue;
    }
    out << pt.p << ',' << fixed(*v, digits) << '\n';
  }
  out << "# undefined: " << undefined << '\n';
}

}  // namespace dseq
