#pragma once

// Answer parsing, micro-F1 and LI scoring, and the JSONL sample loaders.

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "erl/consistency.hpp"
#include "erl/relation.hpp"
#include "json.hpp"

namespace erl {

struct GoldSample {
  std::string id;
  std::string context;
  EventMention head;
  EventMention tail;
  RelationTuple gold;
  AxisSet axes = AxisSet::all();
};

enum class AxisParse { Found, Defaulted, Ambiguous, Skipped };

inline std::string_view to_string(AxisParse p) noexcept {
  switch (p) {
    case AxisParse::Found: return "found";
    case AxisParse::Defaulted: return "defaulted";
    case AxisParse::Ambiguous: return "ambiguous";
    case AxisParse::Skipped: return "skipped";
  }
  return "skipped";
}

struct ParsedAnswer {
  RelationTuple tuple;
  std::array<AxisParse, 4> diagnostics{AxisParse::Skipped, AxisParse::Skipped, AxisParse::Skipped,
                                       AxisParse::Skipped};

  AxisParse diagnostic(Axis a) const noexcept { return diagnostics[static_cast<std::size_t>(a)]; }
  bool any(AxisParse p) const noexcept {
    return std::find(diagnostics.begin(), diagnostics.end(), p) != diagnostics.end();
  }
};

struct Prediction {
  std::string id;
  RelationTuple tuple;
  std::optional<ParsedAnswer> parsed;  // set when produced from raw model text
};

struct F1Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  double f1() const noexcept {
    const std::size_t denom = 2 * tp + fp + fn;
    return denom == 0 ? 0.0 : static_cast<double>(2 * tp) / static_cast<double>(denom);
  }
  F1Counts& operator+=(const F1Counts& o) noexcept {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
};

struct LiAggregate {
  double mean = 0.0;
  Ratio pooled{0, 0};
  std::size_t tuples = 0;
};

struct EvalReport {
  double micro_f1 = 0.0;
  double mean_li = 0.0;
  double pooled_li = 0.0;
  std::map<Axis, double> per_axis_f1;
  F1Counts counts;
  std::size_t samples = 0;
  std::size_t parse_failures = 0;
  std::size_t ambiguous = 0;
};

namespace detail {

// Uppercase; '_', '-' and whitespace runs become one space.
inline std::string normalize_answer_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    const auto uc = static_cast<unsigned char>(c);
    if (c == '_' || c == '-' || std::isspace(uc)) {
      if (out.empty() || out.back() != ' ') out.push_back(' ');
    } else {
      out.push_back(static_cast<char>(std::toupper(uc)));
    }
  }
  return out;
}

}  // namespace detail

// Scans for label mentions (longest match at word starts, case- and
// separator-insensitive). The last mention per axis wins; axes never
// mentioned default to their negative label.
inline ParsedAnswer parse_llm_answer(std::string_view text, AxisSet evaluated_axes = AxisSet::all()) {
  struct Pattern {
    std::string norm;
    Label label;
  };
  static const std::vector<Pattern> patterns = [] {
    std::vector<Pattern> ps;
    for (Label l : kAllLabels) ps.push_back({detail::normalize_answer_text(to_string(l)), l});
    std::stable_sort(ps.begin(), ps.end(),
                     [](const Pattern& a, const Pattern& b) { return a.norm.size() > b.norm.size(); });
    return ps;
  }();

  const std::string norm = detail::normalize_answer_text(text);
  std::array<std::vector<Label>, 4> mentions;
  std::size_t i = 0;
  while (i < norm.size()) {
    const bool word_start = i == 0 || !std::isalnum(static_cast<unsigned char>(norm[i - 1]));
    const Pattern* hit = nullptr;
    if (word_start) {
      for (const auto& p : patterns) {
        if (norm.compare(i, p.norm.size(), p.norm) == 0) {
          hit = &p;
          break;
        }
      }
    }
    if (hit == nullptr) {
      ++i;
      continue;
    }
    mentions[static_cast<std::size_t>(axis_of(hit->label))].push_back(hit->label);
    i += hit->norm.size();
  }

  ParsedAnswer out;
  for (Axis a : kAllAxes) {
    auto& diag = out.diagnostics[static_cast<std::size_t>(a)];
    if (!evaluated_axes.contains(a)) {
      diag = AxisParse::Skipped;
      continue;
    }
    const auto& seen = mentions[static_cast<std::size_t>(a)];
    if (seen.empty()) {
      diag = AxisParse::Defaulted;
      continue;
    }
    out.tuple.set(seen.back());
    const bool distinct = std::any_of(seen.begin(), seen.end(), [&](Label l) { return l != seen.back(); });
    diag = distinct ? AxisParse::Ambiguous : AxisParse::Found;
  }
  return out;
}

namespace detail {

inline F1Counts count_slot(Label predicted, Label gold) {
  F1Counts c;
  if (!is_negative(predicted)) {
    if (predicted == gold) ++c.tp;
    else ++c.fp;
  }
  if (!is_negative(gold) && predicted != gold) ++c.fn;
  return c;
}

// Pairs each gold sample with the prediction carrying the same id.
inline std::vector<const Prediction*> align(std::span<const Prediction> predictions,
                                            std::span<const GoldSample> golds) {
  if (predictions.size() != golds.size()) throw LengthMismatch(predictions.size(), golds.size());
  std::map<std::string, const Prediction*> by_id;
  for (const auto& p : predictions) {
    if (!by_id.emplace(p.id, &p).second) throw IdMismatch("duplicate prediction id '" + p.id + "'");
  }
  std::vector<const Prediction*> out;
  out.reserve(golds.size());
  for (const auto& g : golds) {
    auto it = by_id.find(g.id);
    if (it == by_id.end()) throw IdMismatch("no prediction for sample '" + g.id + "'");
    out.push_back(it->second);
  }
  return out;
}

}  // namespace detail

// Counts over every (sample, evaluated axis) slot. NO_* labels never score
// as true positives.
inline F1Counts f1_counts(std::span<const Prediction> predictions, std::span<const GoldSample> golds,
                          std::optional<Axis> only_axis = std::nullopt) {
  const auto aligned = detail::align(predictions, golds);
  F1Counts total;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    for (Axis a : golds[i].axes.members()) {
      if (only_axis && *only_axis != a) continue;
      total += detail::count_slot(aligned[i]->tuple.at(a), golds[i].gold.at(a));
    }
  }
  return total;
}

inline double micro_f1(std::span<const Prediction> predictions, std::span<const GoldSample> golds) {
  return f1_counts(predictions, golds).f1();
}

inline LiAggregate aggregate_li(std::span<const RelationTuple> tuples, std::span<const AxisSet> axes) {
  if (tuples.size() != axes.size()) throw LengthMismatch(tuples.size(), axes.size());
  LiAggregate agg;
  agg.tuples = tuples.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    const auto report = check_pair(tuples[i], axes[i]);
    sum += report.li().value();
    agg.pooled.num += report.conflicts.size();
    agg.pooled.den += report.denominator;
  }
  agg.mean = tuples.empty() ? 0.0 : sum / static_cast<double>(tuples.size());
  return agg;
}

inline LiAggregate aggregate_li(std::span<const RelationTuple> tuples, AxisSet axes) {
  const std::vector<AxisSet> all(tuples.size(), axes);
  return aggregate_li(tuples, std::span<const AxisSet>(all));
}

inline EvalReport evaluate(std::span<const Prediction> predictions, std::span<const GoldSample> golds) {
  EvalReport report;
  report.samples = golds.size();
  report.counts = f1_counts(predictions, golds);
  report.micro_f1 = report.counts.f1();
  for (Axis a : kAllAxes) {
    const bool used = std::any_of(golds.begin(), golds.end(),
                                  [&](const GoldSample& g) { return g.axes.contains(a); });
    if (used) report.per_axis_f1[a] = f1_counts(predictions, golds, a).f1();
  }

  const auto aligned = detail::align(predictions, golds);
  std::vector<RelationTuple> tuples;
  std::vector<AxisSet> axes;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    tuples.push_back(aligned[i]->tuple);
    axes.push_back(golds[i].axes);
    if (const auto& p = aligned[i]->parsed) {
      if (p->any(AxisParse::Defaulted)) ++report.parse_failures;
      if (p->any(AxisParse::Ambiguous)) ++report.ambiguous;
    }
  }
  const auto li = aggregate_li(tuples, axes);
  report.mean_li = li.mean;
  report.pooled_li = li.pooled.value();
  return report;
}

inline nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json per_axis = nlohmann::ordered_json::object();
  for (const auto& [axis, f1] : r.per_axis_f1) per_axis[std::string(to_string(axis))] = f1;
  return {
      {"definitions",
       {{"micro_f1",
         "2TP/(2TP+FP+FN) over every (sample, evaluated axis) slot; TP = predicted label is "
         "positive and equals gold; FP = predicted positive label differs from gold; FN = gold is "
         "positive and prediction differs; NO_* labels never count as TP; 0 when no positives"},
        {"mean_li", "average over samples of conflicting axis pairs / C(k,2) for k evaluated axes"},
        {"pooled_li", "total conflicting axis pairs / total axis pairs over all samples"},
        {"parse_failures", "raw-text predictions with at least one evaluated axis defaulted to NO_*"}}},
      {"samples", r.samples},
      {"micro_f1", r.micro_f1},
      {"mean_li", r.mean_li},
      {"pooled_li", r.pooled_li},
      {"per_axis_f1", per_axis},
      {"counts", {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"fn", r.counts.fn}}},
      {"parse_failures", r.parse_failures},
      {"ambiguous", r.ambiguous},
  };
}

namespace detail {

inline EventMention mention_from_json(const nlohmann::json& j) {
  EventMention m;
  if (j.is_string()) {
    m.id = j.get<std::string>();
    m.trigger = m.id;
    return m;
  }
  m.trigger = j.value("trigger", std::string());
  m.id = j.value("id", m.trigger);
  m.document = j.value("document", std::string());
  if (j.contains("span") && j["span"].is_array() && j["span"].size() == 2) {
    m.begin = j["span"][0].get<int>();
    m.end = j["span"][1].get<int>();
  }
  if (m.id.empty()) throw ValidationError("event mention needs an id or trigger");
  return m;
}

inline const char* axis_field(Axis a) {
  switch (a) {
    case Axis::Coreference: return "coref";
    case Axis::Temporal: return "temporal";
    case Axis::Causal: return "causal";
    case Axis::Subevent: return "subevent";
  }
  return "";
}

// Reads the four label fields; absent fields on unevaluated axes default to NO_*.
inline RelationTuple labels_from_json(const nlohmann::json& j, AxisSet axes, EventId head, EventId tail) {
  RelationTuple t = RelationTuple::all_negative(std::move(head), std::move(tail));
  for (Axis a : kAllAxes) {
    const char* field = axis_field(a);
    if (!j.contains(field) || j[field].is_null()) {
      if (axes.contains(a)) throw ValidationError(std::string("missing field '") + field + "'");
      continue;
    }
    t.set(parse_label(j[field].get<std::string>(), a));
  }
  t.validate();
  return t;
}

inline AxisSet axes_from_json(const nlohmann::json& j) {
  if (!j.contains("axes") || j["axes"].is_null()) return AxisSet::all();
  AxisSet axes;
  for (const auto& a : j["axes"]) axes.insert(parse_axis(a.get<std::string>()));
  if (axes.size() < 2) throw TooFewAxes(axes.size());
  return axes;
}

template <typename Fn>
void for_each_jsonl(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(nlohmann::json::parse(line), line_no);
    } catch (const MalformedRecord&) {
      throw;
    } catch (const std::exception& e) {
      throw MalformedRecord(line_no, e.what());
    }
  }
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return in;
}

}  // namespace detail

inline std::vector<GoldSample> load_samples(std::istream& in) {
  std::vector<GoldSample> out;
  detail::for_each_jsonl(in, [&](const nlohmann::json& j, std::size_t) {
    GoldSample s;
    s.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
    s.context = j.value("context", std::string());
    s.head = detail::mention_from_json(j.at("head"));
    s.tail = detail::mention_from_json(j.at("tail"));
    if (s.head.id == s.tail.id) s.tail.id += "#2";
    s.axes = detail::axes_from_json(j);
    s.gold = detail::labels_from_json(j, s.axes, s.head.id, s.tail.id);
    for (Axis a : kAllAxes) {
      if (!s.axes.contains(a) && !is_negative(s.gold.at(a)))
        throw ValidationError("positive " + std::string(to_string(a)) + " label on an unevaluated axis");
    }
    out.push_back(std::move(s));
  });
  return out;
}

inline std::vector<GoldSample> load_samples(const std::string& path) {
  auto in = detail::open_input(path);
  return load_samples(in);
}

// Prediction records carry either raw model text ({id, raw_text}) or labels
// ({id, coref, temporal, causal, subevent}). Axes come from the gold sample.
inline std::vector<Prediction> load_predictions(std::istream& in, std::span<const GoldSample> golds) {
  std::map<std::string, const GoldSample*> by_id;
  for (const auto& g : golds) by_id[g.id] = &g;
  std::vector<Prediction> out;
  detail::for_each_jsonl(in, [&](const nlohmann::json& j, std::size_t line_no) {
    Prediction p;
    p.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
    auto it = by_id.find(p.id);
    if (it == by_id.end()) throw MalformedRecord(line_no, "no gold sample with id '" + p.id + "'");
    const GoldSample& g = *it->second;
    if (j.contains("raw_text")) {
      auto parsed = parse_llm_answer(j["raw_text"].get<std::string>(), g.axes);
      parsed.tuple.head = g.gold.head;
      parsed.tuple.tail = g.gold.tail;
      p.tuple = parsed.tuple;
      p.parsed = std::move(parsed);
    } else {
      p.tuple = detail::labels_from_json(j, g.axes, g.gold.head, g.gold.tail);
    }
    out.push_back(std::move(p));
  });
  return out;
}

inline std::vector<Prediction> load_predictions(const std::string& path, std::span<const GoldSample> golds) {
  auto in = detail::open_input(path);
  return load_predictions(in, golds);
}

}  // namespace erl
