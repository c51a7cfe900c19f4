#pragma once

#include <string>
#include <vector>

#include "erl/erl.hpp"
#include "paper_tables.hpp"

namespace support {

inline std::string upper_axis(erl::Axis a) {
  std::string s(erl::to_string(a));
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

inline oracle::Restrictions to_oracle(const std::vector<erl::AxisRestriction>& rs) {
  oracle::Restrictions out;
  for (const auto& r : rs)
    for (erl::Label l : r.allowed) out[upper_axis(r.axis)].insert(std::string(erl::to_string(l)));
  return out;
}

inline oracle::Labeling to_labeling(const erl::RelationTuple& t) {
  oracle::Labeling out;
  for (erl::Axis a : erl::kAllAxes) out[upper_axis(a)] = std::string(erl::to_string(t.at(a)));
  return out;
}

inline erl::RelationTuple from_labeling(const oracle::Labeling& l) {
  return erl::RelationTuple(erl::parse_label(l.at("COREFERENCE"), erl::Axis::Coreference),
                            erl::parse_label(l.at("TEMPORAL"), erl::Axis::Temporal),
                            erl::parse_label(l.at("CAUSAL"), erl::Axis::Causal),
                            erl::parse_label(l.at("SUBEVENT"), erl::Axis::Subevent));
}

inline std::vector<std::string> oracle_axes(erl::AxisSet axes) {
  std::vector<std::string> out;
  for (erl::Axis a : axes.members()) out.push_back(upper_axis(a));
  return out;
}

inline erl::GoldSample fig1_sample() {
  erl::GoldSample s;
  s.id = "fig1";
  s.context =
      "FIFA bans Russia from the 2022 World Cup after the invasion; the ban follows the "
      "suspension of Russian clubs.";
  s.head = {"e1", "bans", "", -1, -1};
  s.tail = {"e2", "suspension", "", -1, -1};
  s.gold = erl::RelationTuple("e1", "e2", erl::Label::NoCoreference, erl::Label::Before,
                              erl::Label::Cause, erl::Label::NoSubevent);
  return s;
}

}  // namespace support

namespace support {

struct F1Fixture {
  std::vector<erl::GoldSample> golds;
  std::vector<erl::Prediction> preds;
  // Counted by hand, slot by slot; see the per-sample notes in make_f1_fixture.
  static constexpr std::size_t kTp = 6;
  static constexpr std::size_t kFp = 5;
  static constexpr std::size_t kFn = 5;
};

inline F1Fixture make_f1_fixture() {
  using L = erl::Label;
  using erl::Axis;
  F1Fixture f;
  auto add = [&](const std::string& id, erl::AxisSet axes, std::array<L, 4> gold, std::array<L, 4> pred) {
    erl::GoldSample g;
    g.id = id;
    g.head = {id + "h", id + "h", "", -1, -1};
    g.tail = {id + "t", id + "t", "", -1, -1};
    g.axes = axes;
    g.gold = erl::RelationTuple(g.head.id, g.tail.id, gold[0], gold[1], gold[2], gold[3]);
    f.golds.push_back(g);
    f.preds.push_back({id, erl::RelationTuple(g.head.id, g.tail.id, pred[0], pred[1], pred[2], pred[3]), {}});
  };
  const auto four = erl::AxisSet::all();
  const erl::AxisSet two{Axis::Temporal, Axis::Causal};
  // tp 2
  add("s1", four, {L::NoCoreference, L::Before, L::Cause, L::NoSubevent},
      {L::NoCoreference, L::Before, L::Cause, L::NoSubevent});
  // fp 1, fn 1
  add("s2", four, {L::NoCoreference, L::Overlap, L::NoCausal, L::NoSubevent},
      {L::NoCoreference, L::Before, L::NoCausal, L::NoSubevent});
  // fn 1
  add("s3", four, {L::Coreference, L::NoTemporal, L::NoCausal, L::NoSubevent},
      {L::NoCoreference, L::NoTemporal, L::NoCausal, L::NoSubevent});
  // tp 1, fn 1
  add("s4", four, {L::NoCoreference, L::Contains, L::NoCausal, L::Subevent},
      {L::NoCoreference, L::Contains, L::NoCausal, L::NoSubevent});
  // fp 1
  add("s5", four, {L::NoCoreference, L::NoTemporal, L::NoCausal, L::NoSubevent},
      {L::NoCoreference, L::Simultaneous, L::NoCausal, L::NoSubevent});
  // tp 1, fp 1, fn 1
  add("s6", four, {L::NoCoreference, L::Before, L::Precondition, L::NoSubevent},
      {L::NoCoreference, L::Before, L::Cause, L::NoSubevent});
  // nothing
  add("s7", four, {L::NoCoreference, L::NoTemporal, L::NoCausal, L::NoSubevent},
      {L::NoCoreference, L::NoTemporal, L::NoCausal, L::NoSubevent});
  // tp 1, fn 1
  add("s8", two, {L::NoCoreference, L::Before, L::Cause, L::NoSubevent},
      {L::NoCoreference, L::Before, L::NoCausal, L::NoSubevent});
  // fp 2
  add("s9", two, {L::NoCoreference, L::NoTemporal, L::NoCausal, L::NoSubevent},
      {L::NoCoreference, L::Overlap, L::Precondition, L::NoSubevent});
  // tp 1
  add("s10", four, {L::Coreference, L::NoTemporal, L::NoCausal, L::NoSubevent},
      {L::Coreference, L::NoTemporal, L::NoCausal, L::NoSubevent});
  return f;
}

}  // namespace support
