#pragma once

// The fixed constraint catalog: 11 binary constraints between two events and
// 39 transitivity rules among three events, with their prompt sentences.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "erl/errors.hpp"
#include "erl/relation.hpp"
#include "json.hpp"

namespace erl {

// An allowed-label set on one axis. "NOT X" is encoded as {NO_X}.
struct AxisRestriction {
  Axis axis;
  std::vector<Label> allowed;

  bool admits(Label label) const {
    return std::find(allowed.begin(), allowed.end(), label) != allowed.end();
  }
  friend bool operator==(const AxisRestriction&, const AxisRestriction&) = default;
};

struct BinaryConstraint {
  std::string id;
  Label antecedent;
  std::vector<AxisRestriction> same_pair;     // on (A, B)
  std::vector<AxisRestriction> reverse_pair;  // on (B, A); empty when the table has "/"
  std::string description;                    // placeholders {A} {B}

  const AxisRestriction* restriction_on(Axis axis) const {
    for (const auto& r : same_pair)
      if (r.axis == axis) return &r;
    return nullptr;
  }
};

struct TransitivityRule {
  std::string id;
  Label first;       // on (A, B)
  Label second;      // on (B, C)
  Label conclusion;  // on (A, C)
  std::vector<AxisRestriction> aux;
  std::string description;  // placeholders {A} {B} {C}
};

struct ConstraintText {
  std::string id;
  std::string text;
  friend bool operator==(const ConstraintText&, const ConstraintText&) = default;
};

namespace detail {

inline AxisRestriction no(Axis axis) { return {axis, {negative_label(axis)}}; }
inline AxisRestriction only(std::initializer_list<Label> labels) {
  return {axis_of(*labels.begin()), std::vector<Label>(labels)};
}

inline const AxisRestriction kNoCoref = no(Axis::Coreference);
inline const AxisRestriction kNoTemporal = no(Axis::Temporal);
inline const AxisRestriction kNoCausal = no(Axis::Causal);
inline const AxisRestriction kNoSubevent = no(Axis::Subevent);

inline std::string binary_id(Label antecedent) { return "B2:" + std::string(to_string(antecedent)); }
inline std::string rule_id(Label first, Label second) {
  return "T3:" + std::string(to_string(first)) + "^" + std::string(to_string(second));
}

inline std::vector<BinaryConstraint> build_binary_constraints() {
  using L = Label;
  auto make = [](L ante, std::vector<AxisRestriction> same, std::vector<AxisRestriction> rev,
                 std::string text) {
    return BinaryConstraint{binary_id(ante), ante, std::move(same), std::move(rev),
                            std::move(text)};
  };
  const auto before_or_overlap = only({L::Before, L::Overlap});
  return {
      make(L::Coreference, {kNoTemporal, kNoCausal, kNoSubevent}, {only({L::Coreference})},
           "If event {A} and event {B} are COREFERENCE, then they won't have temporal, causal, "
           "and subevent relations, and COREFERENCE relation is bidirectional."),
      make(L::NoTemporal, {kNoCausal, kNoSubevent}, {},
           "If event {A} and event {B} do not have a temporal relation, then they won't have "
           "causal and subevent relations."),
      make(L::Before, {kNoCoref, kNoSubevent}, {kNoTemporal},
           "If event {A} happens BEFORE event {B}, then they won't have coreference and subevent "
           "relations, and event {B} has NO_TEMPORAL relation with event {A}."),
      make(L::Overlap, {kNoCoref, kNoSubevent}, {kNoTemporal},
           "If event {A} happens OVERLAP with event {B}, then they won't have coreference and "
           "subevent relations, and event {B} has NO_TEMPORAL relation with event {A}."),
      make(L::Contains, {kNoCoref, kNoCausal}, {kNoTemporal},
           "If event {A}'s time CONTAINS event {B}'s time, then they won't have coreference and "
           "causal relations, and event {B} has NO_TEMPORAL relation with event {A}."),
      make(L::Simultaneous, {kNoCoref, kNoCausal, kNoSubevent}, {only({L::Simultaneous})},
           "If event {A} and event {B} happen SIMULTANEOUSly, then they won't have coreference, "
           "causal, and subevent relations, and SIMULTANEOUS relation is bidirectional."),
      make(L::EndsOn, {kNoCoref, kNoCausal, kNoSubevent}, {kNoTemporal},
           "If event {A} ENDS-ON event {B}, then they won't have coreference, causal and subevent "
           "relations, and event {B} has NO_TEMPORAL relation with event {A}."),
      make(L::BeginsOn, {kNoCoref, kNoCausal, kNoSubevent}, {only({L::BeginsOn})},
           "If event {A} BEGINS-ON event {B}, then they won't have coreference, causal and "
           "subevent relations and BEGINS-ON relation is bidirectional."),
      make(L::Cause, {kNoCoref, before_or_overlap, kNoSubevent}, {kNoTemporal},
           "If event {A} CAUSEs event {B}, then event {A} happens BEFORE or OVERLAP event {B}, "
           "and they won't have coreference and subevent relations, and event {B} has "
           "NO_TEMPORAL relation with event {A}."),
      make(L::Precondition, {kNoCoref, before_or_overlap, kNoSubevent}, {kNoTemporal},
           "If event {A} is event {B}'s PRECONDITION, then event {A} happens BEFORE or OVERLAP "
           "event {B}, and they won't have coreference and subevent relations, and event {B} "
           "has NO_TEMPORAL relation with event {A}."),
      make(L::Subevent, {kNoCoref, only({L::Contains}), kNoCausal}, {kNoTemporal},
           "If event {B} is a SUBEVENT of event {A}, then they won't have coreference and causal "
           "relations, and event {A}'s time should CONTAINS event {B}'s time, and event {B} has "
           "NO_TEMPORAL relation with event {A}."),
  };
}

inline std::vector<TransitivityRule> build_transitivity_rules() {
  using L = Label;
  const auto before_or_overlap = only({L::Before, L::Overlap});
  const auto contains = only({L::Contains});

  const std::string coref_text =
      "If event {A} and event {B} are COREFERENCE, then the relations between event {B} and "
      "event {C} should be the same as that between event {A} and event {C}.";
  const std::string before_text =
      "If event {A} happens BEFORE event {B}, and Relation({B}, {C}), then event {A} happens "
      "BEFORE event {C}.";
  const std::string simultaneous_text =
      "If events {A} and {B} happen SIMULTANEOUSly, and Relation({B}, {C}), then event {A}'s "
      "time CONTAINS event {C}'s time.";
  const std::string ends_on_text =
      "If event {A} ENDS-ON event {B}, and Relation({B}, {C}), then event {A} ENDS-ON event {C}.";
  const std::string begins_on_text =
      "If event {A} BEGINS-ON event {B}, and Relation({B}, {C}), then event {A} BEGINS-ON event "
      "{C}.";

  std::vector<TransitivityRule> rules;
  auto add = [&](L first, L second, L conclusion, std::vector<AxisRestriction> aux,
                 std::string text) {
    rules.push_back(TransitivityRule{rule_id(first, second), first, second, conclusion,
                                     std::move(aux), std::move(text)});
  };

  add(L::Coreference, L::Coreference, L::Coreference, {kNoTemporal, kNoCausal, kNoSubevent},
      coref_text);
  add(L::Coreference, L::Before, L::Before, {kNoCoref, kNoSubevent}, coref_text);
  add(L::Coreference, L::Overlap, L::Overlap, {kNoCoref, kNoSubevent}, coref_text);
  add(L::Coreference, L::Contains, L::Contains, {kNoCoref, kNoCausal}, coref_text);
  add(L::Coreference, L::Simultaneous, L::Simultaneous, {kNoCoref, kNoCausal, kNoSubevent},
      coref_text);
  add(L::Coreference, L::EndsOn, L::EndsOn, {kNoCoref, kNoCausal, kNoSubevent}, coref_text);
  add(L::Coreference, L::BeginsOn, L::BeginsOn, {kNoCoref, kNoCausal, kNoSubevent}, coref_text);
  add(L::Coreference, L::Cause, L::Cause, {kNoCoref, before_or_overlap, kNoSubevent}, coref_text);
  add(L::Coreference, L::Precondition, L::Precondition, {kNoCoref, before_or_overlap, kNoSubevent},
      coref_text);
  add(L::Coreference, L::Subevent, L::Subevent, {kNoCoref, contains, kNoCausal}, coref_text);

  for (L second : {L::Before, L::Overlap, L::Contains, L::Simultaneous, L::EndsOn, L::BeginsOn})
    add(L::Before, second, L::Before, {kNoCoref, kNoSubevent}, before_text);

  add(L::Overlap, L::Before, L::Before, {kNoCoref, kNoSubevent},
      "If event {A} happens OVERLAP with event {B}, and event {B} happens BEFORE event {C}, then "
      "event {A} happens BEFORE event {C}.");
  // The prompt sentence says BEFORE here although the rule concludes OVERLAP.
  add(L::Overlap, L::Simultaneous, L::Overlap, {kNoCoref, kNoSubevent},
      "If event {A} happens OVERLAP with event {B}, and event {B} and event {C} happen "
      "SIMULTANEOUSly, then event {A} happens BEFORE event {C}.");
  add(L::Contains, L::Contains, L::Contains, {kNoCoref, kNoCausal},
      "If event {A}'s time CONTAINS event {B}'s time, and event {B}'s time CONTAINS event {C}'s "
      "time, then event {A}'s time CONTAINS event {C}'s time.");
  add(L::Contains, L::Simultaneous, L::Contains, {kNoCoref, kNoCausal},
      "If event {A}'s time CONTAINS event {B}'s time, and event {B} and event {C} happen "
      "SIMULTANEOUSly, then event {A}'s time CONTAINS event {C}'s time.");

  add(L::Simultaneous, L::Before, L::Before, {kNoCoref, kNoSubevent}, simultaneous_text);
  add(L::Simultaneous, L::Overlap, L::Overlap, {kNoCoref, kNoSubevent}, simultaneous_text);
  add(L::Simultaneous, L::Contains, L::Contains, {kNoCoref, kNoCausal}, simultaneous_text);
  add(L::Simultaneous, L::Simultaneous, L::Simultaneous, {kNoCoref, kNoCausal, kNoSubevent},
      simultaneous_text);
  add(L::Simultaneous, L::EndsOn, L::EndsOn, {kNoCoref, kNoSubevent}, simultaneous_text);
  add(L::Simultaneous, L::BeginsOn, L::BeginsOn, {kNoCoref, kNoSubevent}, simultaneous_text);
  add(L::Simultaneous, L::Coreference, L::Simultaneous, {kNoCoref, kNoCausal, kNoSubevent},
      "If events {A} and {B} happen SIMULTANEOUSly, and event {B} and event {C} are "
      "COREFERENCE, then events {A} and {C} happen SIMULTANEOUSly.");

  add(L::EndsOn, L::Contains, L::Before, {kNoCoref, kNoSubevent},
      "If event {A} ENDS-ON event {B}, and event {B}'s time CONTAINS event {C}'s time, then "
      "event {A} happens BEFORE event {C}.");
  add(L::EndsOn, L::BeginsOn, L::EndsOn, {kNoCoref, kNoCausal, kNoSubevent}, ends_on_text);
  add(L::EndsOn, L::Simultaneous, L::EndsOn, {kNoCoref, kNoCausal, kNoSubevent}, ends_on_text);

  add(L::BeginsOn, L::Simultaneous, L::BeginsOn, {kNoCoref, kNoCausal, kNoSubevent},
      begins_on_text);
  add(L::BeginsOn, L::BeginsOn, L::BeginsOn, {kNoCoref, kNoCausal, kNoSubevent}, begins_on_text);
  add(L::BeginsOn, L::Coreference, L::BeginsOn, {kNoCoref, kNoCausal, kNoSubevent},
      "If event {A} BEGINS-ON event {B}, and event {B} and event {C} are COREFERENCE, then event "
      "{A} BEGINS-ON event {C}.");

  add(L::Cause, L::Cause, L::Cause, {kNoCoref, before_or_overlap, kNoSubevent},
      "If event {A} CAUSEs event {B}, and event {B} CAUSEs event {C}, then event {A} CAUSEs "
      "event {C}.");
  add(L::Cause, L::Subevent, L::Cause, {kNoCoref, before_or_overlap, kNoSubevent},
      "If event {A} CAUSEs event {B}, and event {C} is a SUBEVENT of event {B}, then event {A} "
      "CAUSEs event {C}.");
  add(L::Precondition, L::Cause, L::Cause, {kNoCoref, before_or_overlap, kNoSubevent},
      "If event {A} is event {B}'s PRECONDITION, and event {B} CAUSEs event {C}, then event {A} "
      "CAUSEs event {C}.");
  add(L::Precondition, L::Precondition, L::Precondition, {kNoCoref, before_or_overlap, kNoSubevent},
      "If event {A} is event {B}'s PRECONDITION, and event {B} is event {C}'s PRECONDITION, then "
      "event {A} is event {C}'s PRECONDITION.");
  add(L::Precondition, L::Subevent, L::Precondition, {kNoCoref, before_or_overlap, kNoSubevent},
      "If event {A} is event {B}'s PRECONDITION, and event {C} is a SUBEVENT of event {B}, then "
      "event {A} is event {C}'s PRECONDITION.");

  add(L::Subevent, L::Subevent, L::Subevent, {kNoCoref, contains, kNoCausal},
      "If event {B} is a SUBEVENT of event {A}, and event {C} is a SUBEVENT of event {B}, then "
      "event {C} is a SUBEVENT of event {A}.");
  return rules;
}

// Replaces {A}, {B}, {C} with the given names, in that order.
inline std::string substitute_events(std::string_view tmpl, std::span<const std::string> names) {
  std::string out;
  out.reserve(tmpl.size() + 16);
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] == '{' && i + 2 < tmpl.size() && tmpl[i + 2] == '}') {
      const auto slot = static_cast<std::size_t>(tmpl[i + 1] - 'A');
      if (slot < names.size()) {
        out += names[slot];
        i += 2;
        continue;
      }
    }
    out.push_back(tmpl[i]);
  }
  return out;
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

class Catalog {
 public:
  static const Catalog& instance() {
    static const Catalog catalog;
    return catalog;
  }

  const std::vector<BinaryConstraint>& binary_constraints() const noexcept { return binary_; }
  const std::vector<TransitivityRule>& transitivity_rules() const noexcept { return rules_; }

  // Constraint triggered by `antecedent`, or nullptr for labels without one.
  const BinaryConstraint* constraint_for(Label antecedent) const noexcept {
    const int idx = by_antecedent_[static_cast<std::size_t>(antecedent)];
    return idx < 0 ? nullptr : &binary_[static_cast<std::size_t>(idx)];
  }

  const TransitivityRule* rule_for(Label first, Label second) const noexcept {
    const int idx = by_pair_[static_cast<std::size_t>(first)][static_cast<std::size_t>(second)];
    return idx < 0 ? nullptr : &rules_[static_cast<std::size_t>(idx)];
  }

  std::optional<Label> compose(Label first, Label second) const noexcept {
    if (const auto* r = rule_for(first, second)) return r->conclusion;
    return std::nullopt;
  }

  // Position in catalog order: binary constraints first, then rules.
  std::optional<std::size_t> position_of(std::string_view id) const noexcept {
    for (std::size_t i = 0; i < binary_.size(); ++i)
      if (binary_[i].id == id) return i;
    for (std::size_t i = 0; i < rules_.size(); ++i)
      if (rules_[i].id == id) return binary_.size() + i;
    return std::nullopt;
  }

  ConstraintText describe(std::string_view id, std::span<const std::string> event_names) const {
    for (const auto& c : binary_) {
      if (c.id != id) continue;
      if (event_names.size() != 2) throw ArityMismatch(2, event_names.size());
      return {c.id, detail::substitute_events(c.description, event_names)};
    }
    for (const auto& r : rules_) {
      if (r.id != id) continue;
      if (event_names.size() != 3) throw ArityMismatch(3, event_names.size());
      return {r.id, detail::substitute_events(r.description, event_names)};
    }
    throw UnknownConstraintId(std::string(id));
  }

  nlohmann::json to_json() const {
    auto restrictions = [](const std::vector<AxisRestriction>& rs) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& r : rs) {
        nlohmann::json allowed = nlohmann::json::array();
        for (Label l : r.allowed) allowed.push_back(std::string(to_string(l)));
        arr.push_back({{"axis", std::string(to_string(r.axis))}, {"allowed", allowed}});
      }
      return arr;
    };
    nlohmann::json doc;
    doc["binary_constraints"] = nlohmann::json::array();
    for (const auto& c : binary_) {
      doc["binary_constraints"].push_back({{"id", c.id},
                                           {"antecedent", std::string(to_string(c.antecedent))},
                                           {"same_pair", restrictions(c.same_pair)},
                                           {"reverse_pair", restrictions(c.reverse_pair)},
                                           {"description", c.description}});
    }
    doc["transitivity_rules"] = nlohmann::json::array();
    for (const auto& r : rules_) {
      doc["transitivity_rules"].push_back({{"id", r.id},
                                           {"first", std::string(to_string(r.first))},
                                           {"second", std::string(to_string(r.second))},
                                           {"conclusion", std::string(to_string(r.conclusion))},
                                           {"aux", restrictions(r.aux)},
                                           {"description", r.description}});
    }
    return doc;
  }

  // FNV-1a over the serialized catalog, as 16 hex digits.
  std::string checksum() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(detail::fnv1a64(to_json().dump())));
    return buf;
  }

 private:
  Catalog() : binary_(detail::build_binary_constraints()), rules_(detail::build_transitivity_rules()) {
    by_antecedent_.fill(-1);
    for (auto& row : by_pair_) row.fill(-1);
    for (std::size_t i = 0; i < binary_.size(); ++i)
      by_antecedent_[static_cast<std::size_t>(binary_[i].antecedent)] = static_cast<int>(i);
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      const auto f = static_cast<std::size_t>(rules_[i].first);
      const auto s = static_cast<std::size_t>(rules_[i].second);
      by_pair_[f][s] = static_cast<int>(i);
    }
  }

  std::vector<BinaryConstraint> binary_;
  std::vector<TransitivityRule> rules_;
  std::array<int, kLabelCount> by_antecedent_{};
  std::array<std::array<int, kLabelCount>, kLabelCount> by_pair_{};
};

inline const std::vector<BinaryConstraint>& binary_constraints() {
  return Catalog::instance().binary_constraints();
}

inline const std::vector<TransitivityRule>& transitivity_rules() {
  return Catalog::instance().transitivity_rules();
}

inline std::optional<Label> compose(Label first, Label second) {
  return Catalog::instance().compose(first, second);
}

inline ConstraintText describe(std::string_view id, std::span<const std::string> event_names) {
  return Catalog::instance().describe(id, event_names);
}

inline ConstraintText describe(std::string_view id, std::initializer_list<std::string> names) {
  const std::vector<std::string> v(names);
  return describe(id, std::span<const std::string>(v));
}

}  // namespace erl
