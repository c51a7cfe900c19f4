// erl: command-line front end for the event-relation logic engine.
//
// Exit codes: 0 success, 1 validation error, 2 runtime error.
// Human-readable messages go to stderr; machine output to stdout or --out.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "erl/erl.hpp"
#include "erl/http_gateway.hpp"
#include "json.hpp"

namespace {

using erl::Axis;
using erl::AxisSet;
using erl::RelationTuple;

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw erl::IoError("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw erl::IoError("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

class Input {
 public:
  explicit Input(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
    if (!*file_) throw erl::IoError("cannot open '" + path + "'");
  }
  std::istream& stream() { return file_ ? *file_ : std::cin; }

 private:
  std::unique_ptr<std::ifstream> file_;
};

std::optional<AxisSet> parse_axes_flag(const std::vector<std::string>& names) {
  if (names.empty()) return std::nullopt;
  AxisSet axes;
  for (const auto& n : names) axes.insert(erl::parse_axis(n));
  if (axes.size() < 2) throw erl::TooFewAxes(axes.size());
  return axes;
}

struct RelationRecord {
  std::size_t line;
  RelationTuple tuple;
  AxisSet axes;
};

std::vector<RelationRecord> read_relation_records(std::istream& in, std::optional<AxisSet> forced) {
  std::vector<RelationRecord> out;
  erl::detail::for_each_jsonl(in, [&](const nlohmann::json& j, std::size_t line) {
    const AxisSet axes = forced ? *forced : erl::detail::axes_from_json(j);
    auto tuple = erl::detail::labels_from_json(j, axes, j.at("head").get<std::string>(),
                                               j.at("tail").get<std::string>());
    out.push_back({line, std::move(tuple), axes});
  });
  return out;
}

nlohmann::ordered_json labels_json(const std::vector<erl::Label>& labels) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (auto l : labels) arr.push_back(std::string(erl::to_string(l)));
  return arr;
}

int cmd_catalog(const std::string& out_path) {
  Output out(out_path);
  out.stream() << erl::Catalog::instance().to_json().dump(2) << '\n';
  out.finish();
  return 0;
}

int cmd_check(const std::string& in_path, const std::vector<std::string>& axes_flag, const std::string& out_path) {
  Input in(in_path);
  const auto records = read_relation_records(in.stream(), parse_axes_flag(axes_flag));

  std::map<std::pair<std::string, std::string>, const RelationRecord*> by_pair;
  for (const auto& r : records) by_pair[{r.tuple.head, r.tuple.tail}] = &r;

  Output out(out_path);
  double li_sum = 0.0;
  erl::Ratio pooled{0, 0};
  for (const auto& r : records) {
    const auto report = erl::check_pair(r.tuple, r.axes);
    nlohmann::ordered_json conflicts = nlohmann::ordered_json::array();
    for (const auto& c : report.conflicts) {
      conflicts.push_back({{"axes", {std::string(erl::to_string(c.first)), std::string(erl::to_string(c.second))}},
                           {"witness", {std::string(erl::to_string(c.witness_first)),
                                        std::string(erl::to_string(c.witness_second))}},
                           {"violated", c.violated_constraint_ids}});
    }
    nlohmann::ordered_json rec{{"line", r.line},
                               {"head", r.tuple.head},
                               {"tail", r.tuple.tail},
                               {"li", report.li().value()},
                               {"conflicts_count", report.conflicts.size()},
                               {"combinations", report.denominator},
                               {"conflicts", conflicts}};
    if (auto it = by_pair.find({r.tuple.tail, r.tuple.head}); it != by_pair.end()) {
      nlohmann::ordered_json rev = nlohmann::ordered_json::array();
      for (const auto& v : erl::check_reverse(r.tuple, it->second->tuple)) {
        rev.push_back({{"constraint", v.constraint_id},
                       {"axis", std::string(erl::to_string(v.axis))},
                       {"found", std::string(erl::to_string(v.found))},
                       {"allowed", labels_json(v.allowed)}});
      }
      rec["reverse_violations"] = rev;
    }
    out.stream() << rec.dump() << '\n';
    li_sum += report.li().value();
    pooled.num += report.conflicts.size();
    pooled.den += report.denominator;
  }
  const double mean = records.empty() ? 0.0 : li_sum / static_cast<double>(records.size());
  out.stream() << nlohmann::ordered_json{{"summary",
                                          {{"records", records.size()},
                                           {"mean_li", mean},
                                           {"pooled_li", pooled.value()},
                                           {"conflicts", pooled.num},
                                           {"combinations", pooled.den}}}}
                      .dump()
               << '\n';
  out.finish();
  std::cerr << "checked " << records.size() << " records, mean LI " << mean << ", pooled LI "
            << pooled.value() << "\n";
  return 0;
}

int cmd_repair(const std::string& in_path, const std::vector<std::string>& axes_flag, std::uint64_t seed,
               const std::string& out_path) {
  Input in(in_path);
  const auto records = read_relation_records(in.stream(), parse_axes_flag(axes_flag));
  Output out(out_path);
  std::size_t changed = 0;
  for (const auto& r : records) {
    const auto result = erl::repair(r.tuple, r.axes, seed);
    if (!result.chosen.same_labels(r.tuple)) ++changed;
    auto rec = erl::detail::tuple_json(result.chosen);
    rec["candidates"] = result.candidates.size();
    out.stream() << rec.dump() << '\n';
  }
  out.finish();
  std::cerr << "repaired " << records.size() << " records (" << changed << " changed), seed " << seed << "\n";
  return 0;
}

int cmd_infer(const std::string& facts_path, const std::string& pair, const std::string& out_path) {
  const auto comma = pair.find(',');
  if (comma == std::string::npos || comma == 0 || comma + 1 == pair.size())
    throw erl::ValidationError("--pair expects HEAD,TAIL");
  const std::string head = pair.substr(0, comma);
  const std::string tail = pair.substr(comma + 1);

  Input in(facts_path);
  erl::KnowledgeBase kb;
  erl::detail::for_each_jsonl(in.stream(), [&](const nlohmann::json& j, std::size_t) {
    kb.add(erl::Fact{erl::parse_label_any(j.at("label").get<std::string>()), j.at("head").get<std::string>(),
                     j.at("tail").get<std::string>()});
  });

  const auto closure = erl::saturate(kb);
  const auto labels = closure.labels_on(head, tail);
  nlohmann::ordered_json proofs = nlohmann::ordered_json::object();
  for (auto l : labels) {
    const auto proof = erl::entails(closure, erl::Fact{l, head, tail});
    proofs[std::string(erl::to_string(l))] = proof.lines();
    std::cerr << erl::to_string(l) << "(" << head << ", " << tail << ")";
    if (proof.steps.empty()) std::cerr << " is given\n";
    else std::cerr << " holds:\n";
    for (const auto& line : proof.lines()) std::cerr << "  " << line << "\n";
  }
  if (labels.empty()) std::cerr << "nothing entailed for (" << head << ", " << tail << ")\n";

  Output out(out_path);
  out.stream() << nlohmann::ordered_json{{"head", head},
                                         {"tail", tail},
                                         {"labels", labels_json(labels)},
                                         {"proofs", proofs},
                                         {"closure_size", closure.size()}}
                      .dump()
               << '\n';
  out.finish();
  return 0;
}

std::pair<int, int> parse_hop_range(const std::string& text) {
  auto to_int = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw erl::ValidationError("bad hop range '" + text + "'");
    }
  };
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const int k = to_int(text);
    return {k, k};
  }
  return {to_int(text.substr(0, dots)), to_int(text.substr(dots + 2))};
}

int cmd_synth(const std::string& hops, const std::string& format, const std::string& out_path, bool stats_flag) {
  const auto [lo, hi] = parse_hop_range(hops);
  const auto fmt = erl::parse_format(format);
  Output out(out_path);
  const auto stats = erl::emit_dataset(lo, hi, fmt, out.stream());
  out.finish();
  if (stats_flag) std::cerr << erl::format_stats(stats);
  else std::cerr << "wrote " << stats.total() << " instances\n";
  return 0;
}

int cmd_eval(const std::string& gold_path, const std::string& pred_path, const std::string& out_path) {
  const auto golds = erl::load_samples(gold_path);
  const auto preds = erl::load_predictions(pred_path, golds);
  const auto report = erl::evaluate(preds, golds);
  Output out(out_path);
  out.stream() << erl::to_json(report).dump(2) << '\n';
  out.finish();
  std::cerr << "micro-F1 " << report.micro_f1 << ", mean LI " << report.mean_li << " over " << report.samples
            << " samples\n";
  return 0;
}

struct PromptArgs {
  std::string strategy = "vanilla-icl";
  std::string gold;
  std::string demos;
  std::string mock;
  std::string transcripts;
  std::string out;
  std::size_t max_iters = 2;
  std::size_t max_in_flight = 1;
  std::uint64_t seed = 0;
  erl::GatewayConfig gateway;
};

int cmd_prompt(const PromptArgs& args) {
  const auto strategy = erl::parse_strategy(args.strategy);
  args.gateway.validate();
  const auto samples = erl::load_samples(args.gold);
  std::vector<erl::Demonstration> demos;
  if (!args.demos.empty()) {
    Input in(args.demos);
    demos = erl::load_demonstrations(in.stream());
  }
  if (erl::is_chain_of_thought(strategy))
    for (const auto& d : demos)
      if (d.rationale.empty()) throw erl::MissingDemoRationale(d.sample.id);

  std::unique_ptr<erl::ChatGateway> gateway;
  if (!args.mock.empty()) {
    gateway = std::make_unique<erl::MockGateway>(erl::MockGateway::from_script(args.mock));
  } else {
    gateway = std::make_unique<erl::HttpGateway>(args.gateway);
  }

  erl::RunOptions options;
  options.seed = args.seed;
  options.max_iters = args.max_iters;
  options.max_in_flight = args.max_in_flight;
  const auto runs = erl::run_strategy(*gateway, strategy, samples, demos, options);

  if (!args.transcripts.empty()) {
    Output t(args.transcripts);
    for (const auto& r : runs) t.stream() << erl::to_json(r).dump() << '\n';
    t.finish();
  }
  Output out(args.out);
  std::size_t errors = 0;
  for (const auto& r : runs) {
    auto rec = erl::detail::tuple_json(r.final_tuple);
    rec.erase("head");
    rec.erase("tail");
    nlohmann::ordered_json line{{"id", r.id}};
    line.update(rec);
    out.stream() << line.dump() << '\n';
    if (r.error) {
      ++errors;
      std::cerr << "sample " << r.id << ": " << *r.error << "\n";
    }
  }
  out.finish();
  const auto preds = erl::predictions_from_runs(runs);
  const auto report = erl::evaluate(preds, samples);
  std::cerr << erl::to_string(strategy) << ": " << runs.size() << " samples, " << errors << " gateway errors, micro-F1 "
            << report.micro_f1 << ", mean LI " << report.mean_li << "\n";
  return errors == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Logic engine for event relations: consistency, inference, dataset synthesis, evaluation"};
  app.require_subcommand(0, 1);
  bool show_version = false;
  app.add_flag("--version", show_version, "Print version and catalog checksum");

  std::string out_path;
  std::string in_path = "-";
  std::vector<std::string> axes;
  std::uint64_t seed = 0;

  auto* catalog = app.add_subcommand("catalog", "Print the constraint and rule catalog as JSON");
  catalog->add_option("--out", out_path, "Output file (default stdout)");

  auto* check = app.add_subcommand("check", "Check relation tuples for logical conflicts");
  check->add_option("--in", in_path, "JSONL records {head, tail, coref, temporal, causal, subevent}");
  check->add_option("--axes", axes, "Evaluated axes (default: the record's axes, else all four)")->delimiter(',');
  check->add_option("--out", out_path, "Output file (default stdout)");

  auto* repair = app.add_subcommand("repair", "Replace inconsistent tuples with a consistent candidate");
  repair->add_option("--in", in_path, "JSONL relation records");
  repair->add_option("--axes", axes, "Evaluated axes")->delimiter(',');
  repair->add_option("--seed", seed, "Seed for the candidate pick");
  repair->add_option("--out", out_path, "Output file (default stdout)");

  std::string facts_path;
  std::string pair;
  auto* infer = app.add_subcommand("infer", "Saturate facts and query an event pair");
  infer->add_option("--facts", facts_path, "JSONL facts {label, head, tail}")->required();
  infer->add_option("--pair", pair, "Query pair HEAD,TAIL")->required();
  infer->add_option("--out", out_path, "Output file (default stdout)");

  std::string hops = "2..5";
  std::string format = "finetune";
  bool stats_flag = false;
  auto* synth = app.add_subcommand("synth", "Emit the multi-hop relation dataset as JSONL");
  synth->add_option("--hops", hops, "Hop range, e.g. 2..5");
  synth->add_option("--format", format, "finetune or deductive")->check(CLI::IsMember({"finetune", "deductive"}));
  synth->add_option("--out", out_path, "Output file (default stdout)");
  synth->add_flag("--stats", stats_flag, "Print the per-hop count table");

  std::string gold_path;
  std::string pred_path;
  auto* eval = app.add_subcommand("eval", "Score predictions: micro-F1 and logical inconsistency");
  eval->add_option("--gold", gold_path, "Gold JSONL samples")->required();
  eval->add_option("--pred", pred_path, "Prediction JSONL ({id, raw_text} or {id, labels...})")->required();
  eval->add_option("--out", out_path, "Report file (default stdout)");

  PromptArgs pargs;
  auto* prompt = app.add_subcommand("prompt", "Run a prompting strategy against a chat endpoint or mock script");
  prompt->add_option("--strategy", pargs.strategy,
                     "vanilla-icl, vanilla-cot, cot-self-constraints, all-constraints, retrieved-constraints, "
                     "post-processing");
  prompt->add_option("--gold", pargs.gold, "Gold JSONL samples")->required();
  prompt->add_option("--demos", pargs.demos, "Demonstration JSONL (gold schema plus optional rationale)");
  prompt->add_option("--endpoint", pargs.gateway.endpoint, "Chat-completions URL");
  prompt->add_option("--model", pargs.gateway.model, "Model name");
  prompt->add_option("--temperature", pargs.gateway.temperature, "Sampling temperature");
  prompt->add_option("--max-tokens", pargs.gateway.max_tokens, "Maximum output length");
  prompt->add_option("--timeout", pargs.gateway.timeout_seconds, "Request timeout in seconds");
  prompt->add_option("--retries", pargs.gateway.max_retries, "Retries per request");
  prompt->add_option("--api-key-env", pargs.gateway.api_key_env, "Environment variable holding the API key");
  prompt->add_option("--mock", pargs.mock, "Offline mock script (JSONL by request ordinal)");
  prompt->add_option("--max-iters", pargs.max_iters, "Gateway calls per sample for retrieved-constraints");
  prompt->add_option("--max-in-flight", pargs.max_in_flight, "Concurrent samples");
  prompt->add_option("--seed", pargs.seed, "Seed for post-processing");
  prompt->add_option("--transcripts", pargs.transcripts, "Write full transcripts (JSONL)");
  prompt->add_option("--out", pargs.out, "Predictions JSONL (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (show_version) {
      std::cout << "erl " << erl::kVersion << " catalog " << erl::Catalog::instance().checksum() << "\n";
      return 0;
    }
    if (*catalog) return cmd_catalog(out_path);
    if (*check) return cmd_check(in_path, axes, out_path);
    if (*repair) return cmd_repair(in_path, axes, seed, out_path);
    if (*infer) return cmd_infer(facts_path, pair, out_path);
    if (*synth) return cmd_synth(hops, format, out_path, stats_flag);
    if (*eval) return cmd_eval(gold_path, pred_path, out_path);
    if (*prompt) return cmd_prompt(pargs);
    std::cerr << app.help();
    return 1;
  } catch (const erl::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
