#pragma once

// k-hop relation chains, their entailed endpoint answers, and the JSONL
// dataset rendered in fine-tuning or deductive (facts/rules/query) form.

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "erl/catalog.hpp"
#include "erl/inference.hpp"
#include "erl/relation.hpp"
#include "json.hpp"

namespace erl {

inline constexpr int kMinHops = 2;
inline constexpr int kMaxHops = 8;

enum class DatasetFormat { Finetune, Deductive };

inline std::string_view to_string(DatasetFormat f) noexcept {
  return f == DatasetFormat::Finetune ? "finetune" : "deductive";
}

inline DatasetFormat parse_format(std::string_view text) {
  if (text == "finetune") return DatasetFormat::Finetune;
  if (text == "deductive") return DatasetFormat::Deductive;
  throw ValidationError("unknown dataset format '" + std::string(text) + "'");
}

struct ChainSpec {
  std::vector<Label> labels;  // r1..rk on (E0,E1) .. (E(k-1),Ek)

  int hops() const noexcept { return static_cast<int>(labels.size()); }

  std::vector<EventId> events() const {
    std::vector<EventId> out;
    for (int i = 0; i <= hops(); ++i) out.push_back("E" + std::to_string(i));
    return out;
  }

  // Names used in rendered text: A, B, C, ... while they last.
  std::vector<std::string> display_names() const {
    std::vector<std::string> out;
    for (int i = 0; i <= hops(); ++i)
      out.push_back(hops() <= 25 ? std::string(1, static_cast<char>('A' + i))
                                 : "E" + std::to_string(i));
    return out;
  }

  std::vector<Fact> premises() const {
    const auto ev = events();
    std::vector<Fact> out;
    for (std::size_t i = 0; i < labels.size(); ++i) out.push_back(Fact{labels[i], ev[i], ev[i + 1]});
    return out;
  }

  friend bool operator==(const ChainSpec&, const ChainSpec&) = default;
};

struct SynthInstance {
  ChainSpec chain;
  Label gold;
  DatasetFormat format = DatasetFormat::Finetune;
  std::string prompt;
  std::string response;

  EventId query_head() const { return "E0"; }
  EventId query_tail() const { return "E" + std::to_string(chain.hops()); }
};

struct DatasetStats {
  std::map<int, std::size_t> per_hop;

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& [hop, count] : per_hop) n += count;
    return n;
  }
};

// Published per-hop instance counts that the enumeration is checked against.
inline const std::map<int, std::size_t>& reference_hop_counts() {
  static const std::map<int, std::size_t> counts{{2, 39}, {3, 179}, {4, 945}, {5, 5613}};
  return counts;
}

namespace detail {

inline void check_hops(int k) {
  if (k < kMinHops || k > kMaxHops) throw HopOutOfRange(k);
}

// Labels derivable for the whole chain under any bracketing (CYK over the
// composition table). A chain is composable iff this set is non-empty.
inline std::vector<Label> bracketed_results(const std::vector<Label>& labels) {
  const std::size_t n = labels.size();
  // span[i][j]: bitmask over Label values derivable for labels[i..j)
  std::vector<std::vector<std::uint16_t>> span(n + 1, std::vector<std::uint16_t>(n + 1, 0));
  const auto& catalog = Catalog::instance();
  for (std::size_t i = 0; i < n; ++i)
    span[i][i + 1] = static_cast<std::uint16_t>(1U << static_cast<unsigned>(labels[i]));
  for (std::size_t len = 2; len <= n; ++len) {
    for (std::size_t i = 0; i + len <= n; ++i) {
      const std::size_t j = i + len;
      std::uint16_t acc = 0;
      for (std::size_t m = i + 1; m < j; ++m) {
        for (Label x : kPositiveLabels) {
          if (!(span[i][m] & (1U << static_cast<unsigned>(x)))) continue;
          for (Label y : kPositiveLabels) {
            if (!(span[m][j] & (1U << static_cast<unsigned>(y)))) continue;
            if (auto c = catalog.compose(x, y)) acc |= static_cast<std::uint16_t>(1U << static_cast<unsigned>(*c));
          }
        }
      }
      span[i][j] = acc;
    }
  }
  std::vector<Label> out;
  for (Label l : kPositiveLabels)
    if (span[0][n] & (1U << static_cast<unsigned>(l))) out.push_back(l);
  return out;
}

// A chain packed four bits per label, first label most significant, so that
// numeric order among equal-length codes is lexicographic label order.
using ChainCode = std::uint64_t;

inline std::vector<Label> decode_chain(ChainCode code, int length) {
  std::vector<Label> out(static_cast<std::size_t>(length));
  for (int i = length - 1; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = static_cast<Label>(code & 0xF);
    code >>= 4;
  }
  return out;
}

inline std::string sentence_for(const Fact& f, const std::vector<std::string>& names,
                                const std::vector<EventId>& ids) {
  auto name = [&](const EventId& id) {
    const auto it = std::find(ids.begin(), ids.end(), id);
    return it == ids.end() ? id : names[static_cast<std::size_t>(it - ids.begin())];
  };
  const std::string a = name(f.head);
  const std::string b = name(f.tail);
  switch (f.label) {
    case Label::Coreference: return "event " + a + " and event " + b + " are COREFERENCE";
    case Label::Before: return "event " + a + " happens BEFORE event " + b;
    case Label::Overlap: return "event " + a + " happens OVERLAP with event " + b;
    case Label::Contains: return "event " + a + "'s time CONTAINS event " + b + "'s time";
    case Label::Simultaneous: return "event " + a + " and event " + b + " happen SIMULTANEOUSly";
    case Label::EndsOn: return "event " + a + " ENDS-ON event " + b;
    case Label::BeginsOn: return "event " + a + " BEGINS-ON event " + b;
    case Label::Cause: return "event " + a + " CAUSEs event " + b;
    case Label::Precondition: return "event " + a + " is event " + b + "'s PRECONDITION";
    case Label::Subevent: return "event " + b + " is a SUBEVENT of event " + a;
    default: return std::string(to_string(f.label)) + "(" + a + ", " + b + ")";
  }
}

inline std::string capitalized(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

inline std::string symbolic(const Fact& f, const std::vector<std::string>& names,
                            const std::vector<EventId>& ids) {
  auto name = [&](const EventId& id) {
    const auto it = std::find(ids.begin(), ids.end(), id);
    return it == ids.end() ? id : names[static_cast<std::size_t>(it - ids.begin())];
  };
  return std::string(to_string(f.label)) + "(" + name(f.head) + ", " + name(f.tail) + ")";
}

}  // namespace detail

// Conclusion of composing the chain strictly left to right, if every step is defined.
inline std::optional<Label> left_fold(const ChainSpec& chain) {
  if (chain.labels.empty()) return std::nullopt;
  Label acc = chain.labels.front();
  for (std::size_t i = 1; i < chain.labels.size(); ++i) {
    auto next = compose(acc, chain.labels[i]);
    if (!next) return std::nullopt;
    acc = *next;
  }
  return acc;
}

// Number of length-k chains whose strict left fold is defined.
inline std::size_t count_left_fold_chains(int k) {
  detail::check_hops(k);
  std::array<std::size_t, kLabelCount> ways{};
  for (Label l : kPositiveLabels) ways[static_cast<std::size_t>(l)] = 1;
  for (int step = 2; step <= k; ++step) {
    std::array<std::size_t, kLabelCount> next{};
    for (Label acc : kPositiveLabels)
      for (Label r : kPositiveLabels)
        if (auto c = compose(acc, r)) next[static_cast<std::size_t>(*c)] += ways[static_cast<std::size_t>(acc)];
    ways = next;
  }
  std::size_t total = 0;
  for (auto w : ways) total += w;
  return total;
}

inline Label derive_answer(const ChainSpec& chain) {
  if (chain.hops() < 1) throw NotComposable("empty chain");
  const auto results = detail::bracketed_results(chain.labels);
  if (results.empty()) throw NotComposable("no composition of the chain is defined");
  if (results.size() > 1) throw NotComposable("chain composes to more than one label");
  const Label answer = results.front();

  KnowledgeBase kb;
  for (auto& f : chain.premises()) kb.add(f);
  const auto ev = chain.events();
  const auto entailed = saturate(kb).labels_on(ev.front(), ev.back());
  if (std::find(entailed.begin(), entailed.end(), answer) == entailed.end())
    throw NotComposable("saturation does not entail " + std::string(to_string(answer)));
  return answer;
}

// All label sequences of length k whose endpoint relation is entailed, in
// lexicographic label order. Generated bottom-up from the composition table:
// a sequence yielding X splits into a prefix yielding Y and a suffix yielding
// Z for some rule Y ^ Z -> X.
inline std::vector<ChainSpec> enumerate_chains(int k) {
  detail::check_hops(k);
  using detail::ChainCode;
  const auto& rules = transitivity_rules();
  // derivable[n][label]: codes of length-n sequences composing to label
  std::vector<std::array<std::vector<ChainCode>, kLabelCount>> derivable(static_cast<std::size_t>(k) + 1);
  for (Label l : kPositiveLabels)
    derivable[1][static_cast<std::size_t>(l)].push_back(static_cast<ChainCode>(l));

  for (int n = 2; n <= k; ++n) {
    auto& level = derivable[static_cast<std::size_t>(n)];
    for (const auto& rule : rules) {
      auto& out = level[static_cast<std::size_t>(rule.conclusion)];
      for (int m = 1; m < n; ++m) {
        const auto& prefixes = derivable[static_cast<std::size_t>(m)][static_cast<std::size_t>(rule.first)];
        const auto& suffixes = derivable[static_cast<std::size_t>(n - m)][static_cast<std::size_t>(rule.second)];
        const unsigned shift = 4U * static_cast<unsigned>(n - m);
        for (ChainCode p : prefixes)
          for (ChainCode s : suffixes) out.push_back((p << shift) | s);
      }
    }
    for (auto& codes : level) {
      std::sort(codes.begin(), codes.end());
      codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
    }
  }

  std::vector<ChainCode> all;
  for (const auto& codes : derivable[static_cast<std::size_t>(k)]) all.insert(all.end(), codes.begin(), codes.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  std::vector<ChainSpec> out;
  out.reserve(all.size());
  for (ChainCode c : all) out.push_back(ChainSpec{detail::decode_chain(c, k)});
  return out;
}

inline std::pair<std::string, std::string> render(const ChainSpec& chain, Label gold,
                                                  DatasetFormat format) {
  const auto names = chain.display_names();
  const auto ids = chain.events();
  const Fact query{gold, ids.front(), ids.back()};

  KnowledgeBase kb;
  for (auto& f : chain.premises()) kb.add(f);
  const Proof proof = entails(kb, query);

  std::ostringstream prompt;
  std::ostringstream response;
  if (format == DatasetFormat::Finetune) {
    prompt << "There are " << names.size() << " events:";
    for (std::size_t i = 0; i < names.size(); ++i) prompt << (i == 0 ? " " : ", ") << names[i];
    prompt << ".";
    for (const auto& f : chain.premises())
      prompt << " " << detail::capitalized(detail::sentence_for(f, names, ids)) << ".";
    prompt << " What is the relation between event " << names.front() << " and event "
           << names.back() << "? Answer with one of:";
    for (std::size_t i = 0; i < kPositiveLabels.size(); ++i)
      prompt << (i == 0 ? " " : ", ") << to_string(kPositiveLabels[i]);
    prompt << ".";

    response << to_string(gold) << ". Because";
    for (std::size_t i = 0; i < proof.steps.size(); ++i) {
      const auto& d = proof.steps[i];
      response << (i == 0 ? " " : "; ") << detail::symbolic(d.premises[0], names, ids) << " and "
               << detail::symbolic(d.premises[1], names, ids) << " give "
               << detail::symbolic(d.fact, names, ids);
    }
    response << ".";
  } else {
    prompt << "Facts:\n";
    for (const auto& f : chain.premises())
      prompt << "- " << detail::capitalized(detail::sentence_for(f, names, ids)) << ".\n";
    prompt << "Rules:\n";
    std::vector<std::string> used;
    for (const auto& d : proof.steps) {
      auto ref = [&](const EventId& id) {
        return names[static_cast<std::size_t>(std::find(ids.begin(), ids.end(), id) - ids.begin())];
      };
      const std::vector<std::string> triple{ref(d.premises[0].head), ref(d.premises[0].tail),
                                            ref(d.premises[1].tail)};
      auto text = describe(d.rule_id, std::span<const std::string>(triple)).text;
      if (std::find(used.begin(), used.end(), text) == used.end()) used.push_back(std::move(text));
    }
    for (const auto& r : used) prompt << "- " << r << "\n";
    prompt << "Query:\n- " << detail::capitalized(detail::sentence_for(query, names, ids)) << ".\n"
           << "Based on the facts and rules, is the query Proved, Disproved, or Unknown?";
    response << "Proved";
  }
  return {prompt.str(), response.str()};
}

inline SynthInstance make_instance(const ChainSpec& chain, DatasetFormat format) {
  SynthInstance inst{chain, derive_answer(chain), format, {}, {}};
  std::tie(inst.prompt, inst.response) = render(chain, inst.gold, format);
  return inst;
}

// Recovers the answer label from a rendered response: the first label named
// before the justification for finetune records, "Proved" etc. for deductive.
inline std::optional<Label> parse_finetune_response(std::string_view response) {
  const auto stop = response.find('.');
  const std::string head = detail::normalize_label_text(response.substr(0, stop));
  for (Label l : kPositiveLabels)
    if (detail::normalize_label_text(to_string(l)) == head) return l;
  return std::nullopt;
}

inline nlohmann::ordered_json to_json(const SynthInstance& inst) {
  nlohmann::ordered_json labels = nlohmann::ordered_json::array();
  for (Label l : inst.chain.labels) labels.push_back(std::string(to_string(l)));
  return nlohmann::ordered_json{{"hops", inst.chain.hops()},
                                {"labels", labels},
                                {"events", inst.chain.events()},
                                {"gold", std::string(to_string(inst.gold))},
                                {"prompt", inst.prompt},
                                {"response", inst.response}};
}

inline DatasetStats emit_dataset(int min_hops, int max_hops, DatasetFormat format, std::ostream& out) {
  detail::check_hops(min_hops);
  detail::check_hops(max_hops);
  if (min_hops > max_hops) throw ValidationError("empty hop range");
  DatasetStats stats;
  for (int k = min_hops; k <= max_hops; ++k) {
    const auto chains = enumerate_chains(k);
    for (const auto& chain : chains) {
      out << to_json(make_instance(chain, format)).dump() << '\n';
    }
    stats.per_hop[k] = chains.size();
  }
  if (!out) throw IoError("failed writing dataset");
  return stats;
}

inline DatasetStats emit_dataset(int min_hops, int max_hops, DatasetFormat format,
                                 const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return emit_dataset(min_hops, max_hops, format, out);
}

struct DatasetCheck {
  std::size_t records = 0;
  std::size_t entailed = 0;
  std::vector<std::size_t> failed_lines;
};

// Re-reads emitted records and checks each gold answer with the inference
// engine, independent of how the record was produced.
inline DatasetCheck validate_dataset(std::istream& in) {
  DatasetCheck check;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ++check.records;
    bool ok = false;
    try {
      const auto rec = nlohmann::json::parse(line);
      const auto events = rec.at("events").get<std::vector<std::string>>();
      const auto labels = rec.at("labels").get<std::vector<std::string>>();
      if (events.size() == labels.size() + 1 && rec.at("hops").get<std::size_t>() == labels.size()) {
        KnowledgeBase kb;
        for (std::size_t i = 0; i < labels.size(); ++i) {
          kb.add(Fact{parse_label_any(labels[i]), events[i], events[i + 1]});
        }
        const Label gold = parse_label_any(rec.at("gold").get<std::string>());
        ok = entails(kb, Fact{gold, events.front(), events.back()}).entailed;
      }
    } catch (const std::exception&) {
      ok = false;
    }
    if (ok) ++check.entailed;
    else check.failed_lines.push_back(line_no);
  }
  return check;
}

inline std::string format_stats(const DatasetStats& stats) {
  std::ostringstream os;
  os << "hop  count  reference  left-fold\n";
  std::size_t ref_total = 0;
  bool all_ref = true;
  for (const auto& [hop, count] : stats.per_hop) {
    const auto& refs = reference_hop_counts();
    const auto it = refs.find(hop);
    os << hop << "    " << count << "    ";
    if (it != refs.end()) {
      os << it->second;
      ref_total += it->second;
    } else {
      os << "-";
      all_ref = false;
    }
    os << "    " << count_left_fold_chains(hop) << "\n";
  }
  os << "total " << stats.total();
  if (all_ref) os << " (reference " << ref_total << ")";
  os << "\n"
     << "convention: a chain counts when some bracketing of its relations composes, i.e. the\n"
     << "saturated premise set entails a relation between its first and last events; each\n"
     << "sequence is one instance. The left-fold column counts chains that compose strictly\n"
     << "left to right.\n";
  return os.str();
}

}  // namespace erl
