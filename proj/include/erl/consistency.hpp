#pragma once

// Conflict detection, the logical-inconsistency (LI) ratio, retrieval of the
// violated constraint sentences, and post-processing repair.

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "erl/catalog.hpp"
#include "erl/relation.hpp"

namespace erl {

// Exact fraction; comparisons are by value (1/6 == 2/12).
struct Ratio {
  std::size_t num = 0;
  std::size_t den = 1;

  double value() const noexcept { return den == 0 ? 0.0 : static_cast<double>(num) / den; }
  friend bool operator==(const Ratio& a, const Ratio& b) noexcept { return a.num * b.den == b.num * a.den; }
};

struct Conflict {
  Axis first;   // lower axis of the pair
  Axis second;
  std::vector<std::string> violated_constraint_ids;  // catalog order
  Label witness_first;
  Label witness_second;
};

struct ConsistencyReport {
  RelationTuple tuple;
  AxisSet evaluated_axes;
  std::vector<Conflict> conflicts;
  std::size_t denominator = 0;

  Ratio li() const noexcept { return {conflicts.size(), denominator}; }
  bool consistent() const noexcept { return conflicts.empty(); }
};

struct ReverseViolation {
  std::string constraint_id;
  Axis axis;
  Label found;
  std::vector<Label> allowed;
};

struct RepairResult {
  std::vector<RelationTuple> candidates;
  RelationTuple chosen;
  std::uint64_t seed = 0;
};

namespace detail {

// True when the constraint triggered by `trigger` forbids `other` on the same pair.
inline bool forbids(Label trigger, Label other) {
  const auto* c = Catalog::instance().constraint_for(trigger);
  if (c == nullptr) return false;
  const auto* r = c->restriction_on(axis_of(other));
  return r != nullptr && !r->admits(other);
}

// Uniform index in [0, n) from a seeded mt19937_64, by rejection so the
// result does not depend on the standard library's distribution code.
inline std::size_t seeded_index(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 gen(seed);
  const std::uint64_t range = n;
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % range);
  std::uint64_t x = gen();
  while (x >= limit) x = gen();
  return static_cast<std::size_t>(x % range);
}

}  // namespace detail

inline ConsistencyReport check_pair(const RelationTuple& tuple, AxisSet evaluated_axes) {
  const std::size_t k = evaluated_axes.size();
  if (k < 2) throw TooFewAxes(k);

  ConsistencyReport report;
  report.tuple = tuple;
  report.evaluated_axes = evaluated_axes;
  report.denominator = k * (k - 1) / 2;

  const auto& catalog = Catalog::instance();
  const auto axes = evaluated_axes.members();
  for (std::size_t i = 0; i < axes.size(); ++i) {
    for (std::size_t j = i + 1; j < axes.size(); ++j) {
      const Label x = tuple.at(axes[i]);
      const Label y = tuple.at(axes[j]);
      std::vector<std::string> ids;
      if (detail::forbids(x, y)) ids.push_back(catalog.constraint_for(x)->id);
      if (detail::forbids(y, x)) ids.push_back(catalog.constraint_for(y)->id);
      if (ids.empty()) continue;
      std::sort(ids.begin(), ids.end(), [&](const std::string& a, const std::string& b) {
        return catalog.position_of(a) < catalog.position_of(b);
      });
      report.conflicts.push_back(Conflict{axes[i], axes[j], std::move(ids), x, y});
    }
  }
  return report;
}

inline std::vector<ReverseViolation> check_reverse(const RelationTuple& forward,
                                                   const RelationTuple& backward) {
  if (forward.head != backward.tail || forward.tail != backward.head)
    throw PairMismatch("reverse tuple (" + backward.head + ", " + backward.tail +
                       ") does not mirror (" + forward.head + ", " + forward.tail + ")");
  std::vector<ReverseViolation> out;
  for (Axis a : kAllAxes) {
    const auto* c = Catalog::instance().constraint_for(forward.at(a));
    if (c == nullptr) continue;
    for (const auto& r : c->reverse_pair) {
      const Label found = backward.at(r.axis);
      if (!r.admits(found)) out.push_back({c->id, r.axis, found, r.allowed});
    }
  }
  return out;
}

// Sentences of every violated constraint, deduplicated, in catalog order.
// Event names default to the tuple's head and tail.
inline std::vector<ConstraintText> retrieve_constraint_texts(
    const ConsistencyReport& report, std::span<const std::string> event_names = {}) {
  const auto& catalog = Catalog::instance();
  std::vector<std::string> ids;
  for (const auto& c : report.conflicts)
    for (const auto& id : c.violated_constraint_ids)
      if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
  std::sort(ids.begin(), ids.end(), [&](const std::string& a, const std::string& b) {
    return catalog.position_of(a) < catalog.position_of(b);
  });

  const std::vector<std::string> defaults{report.tuple.head, report.tuple.tail};
  const auto names = event_names.empty() ? std::span<const std::string>(defaults) : event_names;
  std::vector<ConstraintText> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(catalog.describe(id, names));
  return out;
}

inline RepairResult repair(const RelationTuple& tuple, AxisSet evaluated_axes, std::uint64_t seed) {
  const auto report = check_pair(tuple, evaluated_axes);

  std::vector<RelationTuple> pool;
  if (report.consistent()) pool.push_back(tuple);

  // Fix one side of each conflicting pair and let the other side range over
  // every label the fixed side does not forbid.
  auto vary = [&](Axis fixed_axis, Axis free_axis) {
    const Label fixed = tuple.at(fixed_axis);
    for (Label candidate : vocabulary(free_axis)) {
      if (detail::forbids(fixed, candidate)) continue;
      RelationTuple t = tuple;
      t.set(candidate);
      pool.push_back(std::move(t));
    }
  };
  for (const auto& c : report.conflicts) {
    vary(c.first, c.second);
    vary(c.second, c.first);
  }
  pool.push_back(RelationTuple::all_negative(tuple.head, tuple.tail));

  std::vector<RelationTuple> candidates;
  for (auto& t : pool) {
    if (!check_pair(t, evaluated_axes).consistent()) continue;
    const bool seen = std::any_of(candidates.begin(), candidates.end(),
                                  [&](const RelationTuple& c) { return c.same_labels(t); });
    if (!seen) candidates.push_back(std::move(t));
  }
  std::sort(candidates.begin(), candidates.end(), lexicographic_less);

  RepairResult result;
  result.seed = seed;
  result.chosen = candidates[detail::seeded_index(seed, candidates.size())];
  result.candidates = std::move(candidates);
  return result;
}

// Every label combination over `evaluated_axes` (other axes held negative)
// with no conflicts, in product order.
inline std::vector<RelationTuple> enumerate_consistent_tuples(AxisSet evaluated_axes) {
  if (evaluated_axes.size() < 2) throw TooFewAxes(evaluated_axes.size());
  std::vector<std::vector<Label>> choices;
  for (Axis a : kAllAxes)
    choices.push_back(evaluated_axes.contains(a) ? vocabulary(a)
                                                 : std::vector<Label>{negative_label(a)});

  std::vector<RelationTuple> out;
  for (Label c : choices[0])
    for (Label t : choices[1])
      for (Label u : choices[2])
        for (Label s : choices[3]) {
          RelationTuple tuple(c, t, u, s);
          if (check_pair(tuple, evaluated_axes).consistent()) out.push_back(std::move(tuple));
        }
  return out;
}

}  // namespace erl
