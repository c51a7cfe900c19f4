#pragma once

// Relation taxonomy: four axes, fourteen labels, and the per-pair answer tuple.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "erl/errors.hpp"

namespace erl {

enum class Axis : std::uint8_t { Coreference = 0, Temporal = 1, Causal = 2, Subevent = 3 };

inline constexpr std::array<Axis, 4> kAllAxes = {Axis::Coreference, Axis::Temporal, Axis::Causal,
                                                 Axis::Subevent};

// Declaration order is the vocabulary order of each axis.
enum class Label : std::uint8_t {
  NoCoreference,
  Coreference,
  NoTemporal,
  Before,
  Overlap,
  Contains,
  Simultaneous,
  EndsOn,
  BeginsOn,
  NoCausal,
  Precondition,
  Cause,
  NoSubevent,
  Subevent,
};

inline constexpr std::size_t kLabelCount = 14;

inline constexpr std::array<Label, kLabelCount> kAllLabels = {
    Label::NoCoreference, Label::Coreference,  Label::NoTemporal, Label::Before,
    Label::Overlap,       Label::Contains,     Label::Simultaneous, Label::EndsOn,
    Label::BeginsOn,      Label::NoCausal,     Label::Precondition, Label::Cause,
    Label::NoSubevent,    Label::Subevent,
};

// The ten labels that can appear as facts or rule operands.
inline constexpr std::array<Label, 10> kPositiveLabels = {
    Label::Coreference, Label::Before,   Label::Overlap, Label::Contains,     Label::Simultaneous,
    Label::EndsOn,      Label::BeginsOn, Label::Cause,   Label::Precondition, Label::Subevent,
};

constexpr Axis axis_of(Label label) noexcept {
  switch (label) {
    case Label::NoCoreference:
    case Label::Coreference:
      return Axis::Coreference;
    case Label::NoCausal:
    case Label::Precondition:
    case Label::Cause:
      return Axis::Causal;
    case Label::NoSubevent:
    case Label::Subevent:
      return Axis::Subevent;
    default:
      return Axis::Temporal;
  }
}

constexpr Label negative_label(Axis axis) noexcept {
  switch (axis) {
    case Axis::Coreference:
      return Label::NoCoreference;
    case Axis::Temporal:
      return Label::NoTemporal;
    case Axis::Causal:
      return Label::NoCausal;
    case Axis::Subevent:
      return Label::NoSubevent;
  }
  return Label::NoTemporal;
}

constexpr bool is_negative(Label label) noexcept { return negative_label(axis_of(label)) == label; }

constexpr std::string_view to_string(Label label) noexcept {
  constexpr std::array<std::string_view, kLabelCount> names = {
      "NO_COREFERENCE", "COREFERENCE", "NO_TEMPORAL", "BEFORE",       "OVERLAP",
      "CONTAINS",       "SIMULTANEOUS", "ENDS-ON",    "BEGINS-ON",    "NO_CAUSAL",
      "PRECONDITION",   "CAUSE",        "NO_SUBEVENT", "SUBEVENT",
  };
  return names[static_cast<std::size_t>(label)];
}

constexpr std::string_view to_string(Axis axis) noexcept {
  constexpr std::array<std::string_view, 4> names = {"coreference", "temporal", "causal",
                                                     "subevent"};
  return names[static_cast<std::size_t>(axis)];
}

inline std::vector<Label> vocabulary(Axis axis) {
  std::vector<Label> out;
  for (Label l : kAllLabels)
    if (axis_of(l) == axis) out.push_back(l);
  return out;
}

namespace detail {

// Uppercase, with runs of '_', '-' and whitespace folded to a single '_'.
inline std::string normalize_label_text(std::string_view text) {
  std::string out;
  bool pending_sep = false;
  for (char c : text) {
    const auto uc = static_cast<unsigned char>(c);
    if (c == '_' || c == '-' || std::isspace(uc)) {
      pending_sep = !out.empty();
      continue;
    }
    if (pending_sep) out.push_back('_');
    pending_sep = false;
    out.push_back(static_cast<char>(std::toupper(uc)));
  }
  return out;
}

}  // namespace detail

inline Label parse_label(std::string_view text, Axis axis) {
  const std::string wanted = detail::normalize_label_text(text);
  for (Label l : kAllLabels) {
    if (axis_of(l) == axis && detail::normalize_label_text(to_string(l)) == wanted) return l;
  }
  throw UnknownLabel(std::string(to_string(axis)), std::string(text));
}

// Label from any axis; label names are unique across axes.
inline Label parse_label_any(std::string_view text) {
  const std::string wanted = detail::normalize_label_text(text);
  for (Label l : kAllLabels)
    if (detail::normalize_label_text(to_string(l)) == wanted) return l;
  throw UnknownLabel("relation", std::string(text));
}

inline Axis parse_axis(std::string_view text) {
  const std::string wanted = detail::normalize_label_text(text);
  for (Axis a : kAllAxes) {
    if (detail::normalize_label_text(to_string(a)) == wanted) return a;
  }
  if (wanted == "COREF") return Axis::Coreference;
  throw ValidationError("unknown relation axis '" + std::string(text) + "'");
}

// A small ordered set of axes; iteration follows the Axis declaration order.
class AxisSet {
 public:
  constexpr AxisSet() = default;
  constexpr AxisSet(std::initializer_list<Axis> axes) {
    for (Axis a : axes) insert(a);
  }

  static constexpr AxisSet all() {
    return AxisSet{Axis::Coreference, Axis::Temporal, Axis::Causal, Axis::Subevent};
  }

  constexpr void insert(Axis a) noexcept { bits_ |= bit(a); }
  constexpr bool contains(Axis a) const noexcept { return (bits_ & bit(a)) != 0; }
  constexpr std::size_t size() const noexcept {
    std::size_t n = 0;
    for (Axis a : kAllAxes) n += contains(a) ? 1 : 0;
    return n;
  }
  constexpr bool empty() const noexcept { return bits_ == 0; }

  std::vector<Axis> members() const {
    std::vector<Axis> out;
    for (Axis a : kAllAxes)
      if (contains(a)) out.push_back(a);
    return out;
  }

  friend constexpr bool operator==(AxisSet, AxisSet) = default;

 private:
  static constexpr std::uint8_t bit(Axis a) noexcept {
    return static_cast<std::uint8_t>(1U << static_cast<unsigned>(a));
  }
  std::uint8_t bits_ = 0;
};

using EventId = std::string;

// Optional surface information for an event mention.
struct EventMention {
  EventId id;
  std::string trigger;
  std::string document;
  int begin = -1;
  int end = -1;
};

// One label per axis for a directed event pair (head starts no later than tail).
struct RelationTuple {
  EventId head = "A";
  EventId tail = "B";
  std::array<Label, 4> labels = {Label::NoCoreference, Label::NoTemporal, Label::NoCausal,
                                 Label::NoSubevent};

  RelationTuple() = default;
  RelationTuple(Label coref, Label temporal, Label causal, Label subevent)
      : labels{coref, temporal, causal, subevent} {
    validate();
  }
  RelationTuple(EventId h, EventId t, Label coref, Label temporal, Label causal, Label subevent)
      : head(std::move(h)), tail(std::move(t)), labels{coref, temporal, causal, subevent} {
    validate();
  }

  static RelationTuple all_negative(EventId h = "A", EventId t = "B") {
    RelationTuple r;
    r.head = std::move(h);
    r.tail = std::move(t);
    return r;
  }

  Label at(Axis axis) const noexcept { return labels[static_cast<std::size_t>(axis)]; }
  void set(Label label) noexcept { labels[static_cast<std::size_t>(axis_of(label))] = label; }

  Label coref() const noexcept { return at(Axis::Coreference); }
  Label temporal() const noexcept { return at(Axis::Temporal); }
  Label causal() const noexcept { return at(Axis::Causal); }
  Label subevent() const noexcept { return at(Axis::Subevent); }

  void validate() const {
    for (Axis a : kAllAxes) {
      if (axis_of(at(a)) != a)
        throw InvalidTuple(std::string(to_string(at(a))) + " is not a " +
                           std::string(to_string(a)) + " label");
    }
    if (head == tail) throw InvalidTuple("head and tail must differ (both '" + head + "')");
  }

  // Comma-separated labels in axis order, the format used in model answers.
  std::string label_string() const {
    std::string out;
    for (Axis a : kAllAxes) {
      if (!out.empty()) out += ", ";
      out += to_string(at(a));
    }
    return out;
  }

  // Label equality only; event ids are ignored.
  bool same_labels(const RelationTuple& other) const noexcept { return labels == other.labels; }

  friend bool operator==(const RelationTuple&, const RelationTuple&) = default;
};

// Orders tuples by their canonical label names, axis by axis.
inline bool lexicographic_less(const RelationTuple& a, const RelationTuple& b) {
  for (Axis axis : kAllAxes) {
    const auto x = to_string(a.at(axis));
    const auto y = to_string(b.at(axis));
    if (x != y) return x < y;
  }
  return false;
}

}  // namespace erl
