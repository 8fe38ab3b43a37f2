#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"

#include "dseq/dseq_core.hpp"
#include "dseq/error.hpp"
#include "dseq/prime_engine.hpp"
#include "dseq/scan.hpp"

namespace dseq {

using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend, boost::multiprecision::et_off>;

// Exact value of a plain decimal literal such as "0.0315". Signs and
// exponents are rejected.
inline Rational parse_decimal(std::string_view s) {
  if (s.empty()) throw InvalidArgument("empty decimal");
  boost::multiprecision::cpp_int num = 0;
  boost::multiprecision::cpp_int den = 1;
  bool seen_point = false;
  bool seen_digit = false;
  for (const char ch : s) {
    if (ch == '.' && !seen_point) {
      seen_point = true;
    } else if (ch >= '0' && ch <= '9') {
      num = num * 10 + (ch - '0');
      if (seen_point) den *= 10;
      seen_digit = true;
    } else {
      throw InvalidArgument("not a decimal: '" + std::string(s) + "'");
    }
  }
  if (!seen_digit) throw InvalidArgument("not a decimal: '" + std::string(s) + "'");
  return Rational(num, den);
}

// Decimal text of `v` rounded half-up to `places` fraction digits.
inline std::string to_decimal(const Rational& v, unsigned places) {
  using boost::multiprecision::cpp_int;
  if (v < 0) return "-" + to_decimal(-v, places);
  cpp_int scale = 1;
  for (unsigned i = 0; i < places; ++i) scale *= 10;
  const cpp_int scaled = (numerator(v) * scale * 2 + denominator(v)) / (denominator(v) * 2);
  std::string digits = scaled.str();
  if (places == 0) return digits;
  if (digits.size() <= places) digits.insert(0, places + 1 - digits.size(), '0');
  digits.insert(digits.size() - places, ".");
  return digits;
}

inline double to_double(const Rational& v) { return v.convert_to<double>(); }

// ---------------------------------------------------------------------------
// Trials

// One draw: a prime from the agreed range and whether its binary
// d-sequence (Division rule) has more ones than zeros. Anyone can
// recompute `outcome` from p alone.
struct AnomalyTrial {
  Prime p = 0;
  bool outcome = false;
  PrimeRange range;

  friend bool operator==(const AnomalyTrial&, const AnomalyTrial&) = default;
};

inline bool anomaly_outcome(Prime p) {
  return analyze(p, Base::binary(), DigitRule::Division).cls == Classification::OnesExceed;
}

// ones_exceed / population of a base-2 Division-rule scan.
inline Rational q_from_report(const ScanReport& report) {
  if (report.options.base != Base::binary() || report.options.rule != DigitRule::Division)
    throw InvalidArgument("q is defined by a base-2 division-rule scan");
  if (report.population == 0)
    throw NoPrimes("no odd primes in " + std::to_string(report.options.range.lo) + ".." +
                   std::to_string(report.options.range.hi));
  return Rational(report.totals.ones_exceed, report.population);
}

// Exact fraction of OnesExceed primes in the range.
inline Rational estimate_q(const PrimeRange& range, unsigned workers = 0) {
  return q_from_report(scan({range, Base::binary(), DigitRule::Division, false, workers}));
}

// Odd primes of a range, sieved once, with optionally precomputed outcomes.
// Precomputation only saves time; outcomes are identical either way.
class TrialSource {
 public:
  explicit TrialSource(const PrimeRange& range) : range_(range), primes_(primes_in(range)) {
    std::erase(primes_, Prime{2});
    if (primes_.empty())
      throw NoPrimes("no odd primes in " + std::to_string(range.lo) + ".." + std::to_string(range.hi));
  }

  // Fills the outcome table from a base-2 Division scan with records.
  TrialSource(const PrimeRange& range, const ScanReport& report) : TrialSource(range) {
    if (report.options.base != Base::binary() || report.options.rule != DigitRule::Division)
      throw InvalidArgument("outcome table needs a base-2 division-rule scan");
    for (const auto& r : require_records(report)) {
      if (range.contains(r.p)) table_.emplace(r.p, r.cls == Classification::OnesExceed);
    }
  }

  const PrimeRange& range() const noexcept { return range_; }
  const std::vector<Prime>& primes() const noexcept { return primes_; }

  bool outcome(Prime p) const {
    if (auto it = table_.find(p); it != table_.end()) return it->second;
    return anomaly_outcome(p);
  }

 private:
  PrimeRange range_;
  std::vector<Prime> primes_;
  std::unordered_map<Prime, bool> table_;
};

namespace detail {

// Unbiased draw in [0, n) by rejection; unlike std::uniform_int_distribution
// the mapping from engine output is fixed, so transcripts are portable.
template <class Engine>
std::uint64_t uniform_index(Engine& rng, std::uint64_t n) {
  static_assert(Engine::min() == 0 && Engine::max() == ~std::uint64_t{0}, "needs a full 64-bit engine");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  for (;;) {
    const std::uint64_t x = rng();
    if (x < limit) return x % n;
  }
}

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// Independent stream for `index` derived from `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return detail::splitmix64(detail::splitmix64(seed) ^ detail::splitmix64(~index));
}

template <class Engine>
AnomalyTrial sample_trial(const TrialSource& source, Engine& rng) {
  const Prime p = source.primes()[detail::uniform_index(rng, source.primes().size())];
  return {p, source.outcome(p), source.range()};
}

inline AnomalyTrial sample_trial(const PrimeRange& range, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_trial(TrialSource(range), rng);
}

// ---------------------------------------------------------------------------
// Plans

struct PlanNode {
  enum class Kind { Trial, And, Or };

  Kind kind = Kind::Trial;
  std::vector<PlanNode> children;

  static PlanNode trial() { return {}; }
  static PlanNode join(Kind kind, PlanNode lhs, PlanNode rhs) {
    PlanNode n{kind, {}};
    n.children.push_back(std::move(lhs));
    n.children.push_back(std::move(rhs));
    return n;
  }

  friend bool operator==(const PlanNode&, const PlanNode&) = default;
};

inline std::size_t leaf_count(const PlanNode& n) {
  if (n.kind == PlanNode::Kind::Trial) return 1;
  std::size_t total = 0;
  for (const auto& c : n.children) total += leaf_count(c);
  return total;
}

inline std::size_t depth(const PlanNode& n) {
  std::size_t d = 0;
  for (const auto& c : n.children) d = std::max(d, depth(c));
  return d + 1;
}

// Probability that the tree is true when every leaf is an independent
// Bernoulli(q).
inline Rational tree_probability(const PlanNode& n, const Rational& q) {
  switch (n.kind) {
    case PlanNode::Kind::Trial: return q;
    case PlanNode::Kind::And: {
      Rational p = 1;
      for (const auto& c : n.children) p *= tree_probability(c, q);
      return p;
    }
    case PlanNode::Kind::Or: {
      Rational miss = 1;
      for (const auto& c : n.children) miss *= 1 - tree_probability(c, q);
      return 1 - miss;
    }
  }
  return 0;
}

namespace detail {

// Evaluates the tree over leaf outcomes consumed left to right.
template <class LeafFn>
bool evaluate(const PlanNode& n, std::size_t& next_leaf, LeafFn&& leaf) {
  switch (n.kind) {
    case PlanNode::Kind::Trial: return leaf(next_leaf++);
    case PlanNode::Kind::And: {
      bool v = true;
      for (const auto& c : n.children) v = evaluate(c, next_leaf, leaf) && v;
      return v;
    }
    case PlanNode::Kind::Or: {
      bool v = false;
      for (const auto& c : n.children) v = evaluate(c, next_leaf, leaf) || v;
      return v;
    }
  }
  return false;
}

}  // namespace detail

inline bool evaluate(const PlanNode& tree, const std::vector<bool>& leaves) {
  if (leaves.size() != leaf_count(tree)) throw InvalidArgument("leaf outcome count does not match plan");
  std::size_t next = 0;
  return detail::evaluate(tree, next, [&](std::size_t i) { return leaves[i]; });
}

struct EventPlan {
  PlanNode tree;
  Rational q;
  Rational predicted;
  PrimeRange range;

  std::size_t leaves() const { return leaf_count(tree); }
  friend bool operator==(const EventPlan&, const EventPlan&) = default;
};

inline constexpr unsigned kDefaultMaxOps = 64;

class TargetUnreachable : public Error {
 public:
  TargetUnreachable(EventPlan best, double target)
      : Error(Kind::TargetUnreachable, "target " + fixed_text(target) + " unreachable; best plan predicts " +
                                           to_decimal(best.predicted, 6)),
        best_(std::make_shared<EventPlan>(std::move(best))) {}

  const EventPlan& best() const noexcept { return *best_; }

 private:
  static std::string fixed_text(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
  }
  std::shared_ptr<const EventPlan> best_;
};

// Greedy composition from P = q: AND a fresh trial while P is above the
// target, OR one while it is at or below, until |P - target| <= epsilon or
// max_ops connectives have been added.
inline EventPlan build_plan(double target, const Rational& q, double epsilon, const PrimeRange& range,
                            unsigned max_ops = kDefaultMaxOps) {
  if (!(target > 0.0 && target < 1.0)) throw InvalidArgument("target must lie in (0, 1)");
  if (!(q > 0 && q < 1)) throw InvalidArgument("per-trial probability q must lie in (0, 1), got " + to_decimal(q, 6));
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");

  const Rational goal(target);
  const Rational tolerance(epsilon);
  auto distance = [&](const Rational& p) { return p > goal ? p - goal : goal - p; };

  EventPlan plan{PlanNode::trial(), q, q, range};
  EventPlan best = plan;
  for (unsigned ops = 0; distance(plan.predicted) > tolerance && ops < max_ops; ++ops) {
    if (plan.predicted > goal) {
      plan.tree = PlanNode::join(PlanNode::Kind::And, std::move(plan.tree), PlanNode::trial());
      plan.predicted *= q;
    } else {
      plan.tree = PlanNode::join(PlanNode::Kind::Or, std::move(plan.tree), PlanNode::trial());
      plan.predicted = 1 - (1 - plan.predicted) * (1 - q);
    }
    if (distance(plan.predicted) < distance(best.predicted)) best = plan;
  }
  if (distance(plan.predicted) > tolerance) throw TargetUnreachable(std::move(best), target);
  return plan;
}

// ---------------------------------------------------------------------------
// Running and verifying

struct Transcript {
  std::vector<AnomalyTrial> trials;  // leaf order
  bool outcome = false;

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

// Leaf k draws from its own stream derive_seed(seed, k).
inline Transcript run_event(const EventPlan& plan, const TrialSource& source, std::uint64_t seed) {
  if (source.range() != plan.range) throw InvalidArgument("trial source range differs from the plan range");
  Transcript t;
  const std::size_t n = plan.leaves();
  t.trials.reserve(n);
  std::vector<bool> leaves(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::mt19937_64 rng(derive_seed(seed, k));
    t.trials.push_back(sample_trial(source, rng));
    leaves[k] = t.trials.back().outcome;
  }
  t.outcome = evaluate(plan.tree, leaves);
  return t;
}

inline Transcript run_event(const EventPlan& plan, std::uint64_t seed) {
  return run_event(plan, TrialSource(plan.range), seed);
}

enum class VerifyReason {
  Ok,
  LeafCountMismatch,
  RangeMismatch,
  OutOfRange,
  NotPrime,
  TrialOutcomeMismatch,
  EventOutcomeMismatch,
};

inline std::string_view to_string(VerifyReason r) noexcept {
  switch (r) {
    case VerifyReason::Ok: return "ok";
    case VerifyReason::LeafCountMismatch: return "leaf_count_mismatch";
    case VerifyReason::RangeMismatch: return "range_mismatch";
    case VerifyReason::OutOfRange: return "out_of_range";
    case VerifyReason::NotPrime: return "not_prime";
    case VerifyReason::TrialOutcomeMismatch: return "trial_outcome_mismatch";
    case VerifyReason::EventOutcomeMismatch: return "event_outcome_mismatch";
  }
  return "?";
}

struct Verification {
  VerifyReason reason = VerifyReason::Ok;
  std::size_t trial = 0;  // offending trial index, when applicable

  explicit operator bool() const noexcept { return reason == VerifyReason::Ok; }
};

// Recomputes everything from scratch; shares no state with run_event.
inline Verification verify_transcript(const Transcript& t, const EventPlan& plan) {
  if (t.trials.size() != plan.leaves()) return {VerifyReason::LeafCountMismatch, 0};
  std::vector<bool> leaves(t.trials.size());
  for (std::size_t k = 0; k < t.trials.size(); ++k) {
    const auto& trial = t.trials[k];
    if (trial.range != plan.range) return {VerifyReason::RangeMismatch, k};
    if (!plan.range.contains(trial.p)) return {VerifyReason::OutOfRange, k};
    if (!is_prime(trial.p) || trial.p == 2) return {VerifyReason::NotPrime, k};
    if (anomaly_outcome(trial.p) != trial.outcome) return {VerifyReason::TrialOutcomeMismatch, k};
    leaves[k] = trial.outcome;
  }
  if (evaluate(plan.tree, leaves) != t.outcome) return {VerifyReason::EventOutcomeMismatch, 0};
  return {};
}

// ---------------------------------------------------------------------------
// JSON
//
// tree: "TRIAL" | ["AND", tree, tree, ...] | ["OR", tree, tree, ...]
// plan: {"tree": tree, "q": "<decimal>", "range": [lo, hi]}

inline nlohmann::json to_json(const PlanNode& n) {
  if (n.kind == PlanNode::Kind::Trial) return "TRIAL";
  nlohmann::json arr = nlohmann::json::array({n.kind == PlanNode::Kind::And ? "AND" : "OR"});
  for (const auto& c : n.children) arr.push_back(to_json(c));
  return arr;
}

inline PlanNode plan_node_from_json(const nlohmann::json& j) {
  if (j.is_string() && j.get<std::string>() == "TRIAL") return PlanNode::trial();
  if (!j.is_array() || j.size() < 3 || !j[0].is_string()) throw InvalidArgument("malformed plan tree");
  const auto tag = j[0].get<std::string>();
  PlanNode n;
  if (tag == "AND") {
    n.kind = PlanNode::Kind::And;
  } else if (tag == "OR") {
    n.kind = PlanNode::Kind::Or;
  } else {
    throw InvalidArgument("unknown plan connective '" + tag + "'");
  }
  for (std::size_t i = 1; i < j.size(); ++i) n.children.push_back(plan_node_from_json(j[i]));
  return n;
}

// q must be a terminating decimal to round-trip through its string form.
inline nlohmann::json to_json(const EventPlan& plan, unsigned q_places = 6) {
  nlohmann::json j;
  j["tree"] = to_json(plan.tree);
  j["q"] = to_decimal(plan.q, q_places);
  j["range"] = {plan.range.lo, plan.range.hi};
  return j;
}

inline EventPlan plan_from_json(const nlohmann::json& j) {
  try {
    EventPlan plan;
    plan.tree = plan_node_from_json(j.at("tree"));
    plan.q = parse_decimal(j.at("q").get<std::string>());
    plan.range = {j.at("range").at(0).get<std::uint64_t>(), j.at("range").at(1).get<std::uint64_t>()};
    plan.predicted = tree_probability(plan.tree, plan.q);
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed plan JSON: ") + e.what());
  }
}

inline nlohmann::json to_json(const Transcript& t) {
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& trial : t.trials) trials.push_back({{"p", trial.p}, {"outcome", trial.outcome}});
  return {{"trials", std::move(trials)}, {"outcome", t.outcome}};
}

// Trials inherit the plan's range; the wire format does not repeat it.
inline Transcript transcript_from_json(const nlohmann::json& j, const PrimeRange& range) {
  try {
    Transcript t;
    for (const auto& jt : j.at("trials"))
      t.trials.push_back({jt.at("p").get<Prime>(), jt.at("outcome").get<bool>(), range});
    t.outcome = j.at("outcome").get<bool>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed transcript JSON: ") + e.what());
  }
}

}  // namespace dseq
