#pragma once

// Forward-chaining saturation over relation facts with the transitivity rules.

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "erl/catalog.hpp"
#include "erl/relation.hpp"

namespace erl {

struct Fact {
  Label label;
  EventId head;
  EventId tail;

  std::string to_string() const {
    return std::string(erl::to_string(label)) + "(" + head + ", " + tail + ")";
  }
  friend auto operator<=>(const Fact&, const Fact&) = default;
};

inline constexpr const char* kGivenFact = "given";

struct Derivation {
  Fact fact;
  std::string rule_id = kGivenFact;
  std::vector<Fact> premises;  // (first, second) of the rule; empty for given facts

  bool given() const noexcept { return premises.empty(); }
};

class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  KnowledgeBase(std::initializer_list<Fact> facts) {
    for (const auto& f : facts) add(f);
  }

  // Returns false when the fact was already present.
  bool add(Fact fact) {
    if (is_negative(fact.label))
      throw ValidationError("facts must carry a positive label, got " + fact.to_string());
    if (fact.head == fact.tail) throw ValidationError("fact relates an event to itself: " + fact.to_string());
    if (seen_.contains(fact)) return false;
    seen_.insert(fact);
    facts_.push_back(std::move(fact));
    return true;
  }

  const std::vector<Fact>& facts() const noexcept { return facts_; }
  std::size_t size() const noexcept { return facts_.size(); }

 private:
  std::vector<Fact> facts_;  // insertion order drives derivation order
  std::set<Fact> seen_;
};

class Closure {
 public:
  bool contains(const Fact& f) const { return derivations_.contains(f); }
  std::size_t size() const noexcept { return derivations_.size(); }

  const Derivation* derivation(const Fact& f) const {
    auto it = derivations_.find(f);
    return it == derivations_.end() ? nullptr : &it->second;
  }

  std::set<Fact> facts() const {
    std::set<Fact> out;
    for (const auto& [f, d] : derivations_) out.insert(f);
    return out;
  }

  std::vector<Label> labels_on(const EventId& head, const EventId& tail) const {
    std::vector<Label> out;
    for (Label l : kPositiveLabels)
      if (contains(Fact{l, head, tail})) out.push_back(l);
    return out;
  }

  const std::map<Fact, Derivation>& derivations() const noexcept { return derivations_; }

 private:
  friend Closure saturate(const KnowledgeBase& kb);
  std::map<Fact, Derivation> derivations_;
};

// Least fixpoint under R1(a,b) & R2(b,c) -> compose(R1,R2)(a,c), computed
// semi-naively: each round joins only the previous round's new facts.
inline Closure saturate(const KnowledgeBase& kb) {
  const auto& catalog = Catalog::instance();
  Closure closure;
  std::map<EventId, std::vector<Fact>> by_head;
  std::map<EventId, std::vector<Fact>> by_tail;

  std::vector<Fact> frontier;
  auto admit = [&](Derivation d) {
    const Fact f = d.fact;
    if (!closure.derivations_.emplace(f, std::move(d)).second) return;
    by_head[f.head].push_back(f);
    by_tail[f.tail].push_back(f);
    frontier.push_back(f);
  };

  for (const auto& f : kb.facts()) admit(Derivation{f, kGivenFact, {}});

  auto try_join = [&](const Fact& first, const Fact& second, std::vector<Derivation>& out) {
    if (first.head == second.tail) return;
    const auto* rule = catalog.rule_for(first.label, second.label);
    if (rule == nullptr) return;
    Fact derived{rule->conclusion, first.head, second.tail};
    if (closure.contains(derived)) return;
    out.push_back(Derivation{std::move(derived), rule->id, {first, second}});
  };

  while (!frontier.empty()) {
    const std::vector<Fact> current = std::move(frontier);
    frontier.clear();
    std::vector<Derivation> found;
    for (const auto& f : current) {
      if (auto it = by_head.find(f.tail); it != by_head.end()) {
        const auto partners = it->second;
        for (const auto& g : partners) try_join(f, g, found);
      }
      if (auto it = by_tail.find(f.head); it != by_tail.end()) {
        const auto partners = it->second;
        for (const auto& g : partners) try_join(g, f, found);
      }
    }
    for (auto& d : found) admit(std::move(d));
  }
  return closure;
}

struct Proof {
  bool entailed = false;
  std::vector<Fact> given;         // leaves, left to right
  std::vector<Derivation> steps;   // rule applications, premises before conclusions

  std::vector<std::string> lines() const {
    std::vector<std::string> out;
    for (const auto& d : steps) {
      out.push_back(d.fact.to_string() + " :- " + d.premises[0].to_string() + ", " +
                    d.premises[1].to_string() + "  [" + d.rule_id + "]");
    }
    return out;
  }
};

namespace detail {

inline void flatten_proof(const Closure& closure, const Fact& fact, Proof& proof,
                          std::set<Fact>& visited) {
  const Derivation* d = closure.derivation(fact);
  if (d == nullptr) return;
  if (d->given()) {
    proof.given.push_back(fact);
    return;
  }
  for (const auto& p : d->premises) flatten_proof(closure, p, proof, visited);
  if (visited.insert(fact).second) proof.steps.push_back(*d);
}

}  // namespace detail

inline Proof entails(const Closure& closure, const Fact& candidate) {
  Proof proof;
  if (!closure.contains(candidate)) return proof;
  proof.entailed = true;
  std::set<Fact> visited;
  detail::flatten_proof(closure, candidate, proof, visited);
  return proof;
}

inline Proof entails(const KnowledgeBase& kb, const Fact& candidate) {
  if (is_negative(candidate.label))
    throw ValidationError("queries must use a positive label, got " + candidate.to_string());
  return entails(saturate(kb), candidate);
}

inline std::vector<Label> query_pair(const KnowledgeBase& kb, const EventId& head,
                                     const EventId& tail) {
  return saturate(kb).labels_on(head, tail);
}

}  // namespace erl
