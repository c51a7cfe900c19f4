#pragma once

// Prompt construction for each strategy, the chat gateway interface with an
// offline scripted mock, batch runs, and the iterative retrieval loop.
//
// Template wording is a reconstruction from the strategy descriptions; the
// original prompt figures were not available as text.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <future>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "erl/catalog.hpp"
#include "erl/consistency.hpp"
#include "erl/evaluation.hpp"
#include "erl/relation.hpp"
#include "json.hpp"

namespace erl {

enum class Strategy {
  VanillaICL,
  VanillaCoT,
  CoTWithSelfConstraints,
  WithAllConstraints,
  WithRetrievedConstraints,
  PostProcessing,
};

inline constexpr std::array<Strategy, 6> kAllStrategies = {
    Strategy::VanillaICL,         Strategy::VanillaCoT,
    Strategy::CoTWithSelfConstraints, Strategy::WithAllConstraints,
    Strategy::WithRetrievedConstraints, Strategy::PostProcessing,
};

inline std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::VanillaICL: return "vanilla-icl";
    case Strategy::VanillaCoT: return "vanilla-cot";
    case Strategy::CoTWithSelfConstraints: return "cot-self-constraints";
    case Strategy::WithAllConstraints: return "all-constraints";
    case Strategy::WithRetrievedConstraints: return "retrieved-constraints";
    case Strategy::PostProcessing: return "post-processing";
  }
  return "vanilla-icl";
}

inline Strategy parse_strategy(std::string_view text) {
  for (Strategy s : kAllStrategies)
    if (to_string(s) == text) return s;
  throw ValidationError("unknown strategy '" + std::string(text) + "'");
}

inline bool is_chain_of_thought(Strategy s) noexcept {
  return s == Strategy::VanillaCoT || s == Strategy::CoTWithSelfConstraints;
}

enum class Role { System, User, Assistant };

inline std::string_view to_string(Role r) noexcept {
  switch (r) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

inline Role parse_role(std::string_view text) {
  if (text == "system") return Role::System;
  if (text == "user") return Role::User;
  if (text == "assistant") return Role::Assistant;
  throw ValidationError("unknown role '" + std::string(text) + "'");
}

struct Message {
  Role role;
  std::string content;
  friend bool operator==(const Message&, const Message&) = default;
};

struct Conversation {
  std::vector<Message> turns;

  void add(Role role, std::string content) { turns.push_back({role, std::move(content)}); }

  std::string text() const {
    std::string out;
    for (const auto& m : turns) out += m.content + "\n";
    return out;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& m : turns) arr.push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
    return arr;
  }

  friend bool operator==(const Conversation&, const Conversation&) = default;
};

struct Demonstration {
  GoldSample sample;
  std::string rationale;  // required by chain-of-thought strategies
};

struct GatewayConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-3.5-turbo";
  double temperature = 0.0;
  int max_tokens = 512;
  int timeout_seconds = 60;
  int max_retries = 2;
  std::string api_key_env = "OPENAI_API_KEY";

  void validate() const {
    if (temperature < 0.0) throw ValidationError("temperature must be >= 0");
    if (max_retries < 0) throw ValidationError("max retries must be >= 0");
    if (max_tokens <= 0) throw ValidationError("max output length must be positive");
  }
};

class ChatGateway {
 public:
  virtual ~ChatGateway() = default;
  // Returns the first assistant message for the conversation.
  virtual std::string complete(const Conversation& conversation) = 0;
};

// Replays canned responses by request ordinal (0-based, counted per gateway).
// Script lines: {"ordinal": n, "response": "..."} or {"ordinal": n, "error": "..."};
// without "ordinal" a line's position is used.
class MockGateway : public ChatGateway {
 public:
  MockGateway() = default;
  MockGateway(MockGateway&& other) noexcept
      : script_(std::move(other.script_)), calls_(other.calls_), requests_(std::move(other.requests_)) {}
  explicit MockGateway(std::vector<std::string> responses) {
    for (std::size_t i = 0; i < responses.size(); ++i) script_[i] = Entry{std::move(responses[i]), false};
  }

  static MockGateway from_script(std::istream& in) {
    MockGateway g;
    std::string line;
    std::size_t position = 0;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        const std::size_t ordinal = j.contains("ordinal") ? j["ordinal"].get<std::size_t>() : position;
        if (j.contains("error")) g.script_[ordinal] = Entry{j["error"].get<std::string>(), true};
        else g.script_[ordinal] = Entry{j.at("response").get<std::string>(), false};
      } catch (const std::exception& e) {
        throw MalformedRecord(line_no, e.what());
      }
      ++position;
    }
    return g;
  }

  static MockGateway from_script(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open mock script '" + path + "'");
    return from_script(in);
  }

  std::string complete(const Conversation& conversation) override {
    std::lock_guard lock(mu_);
    const std::size_t ordinal = calls_++;
    requests_.push_back(conversation);
    auto it = script_.find(ordinal);
    if (it == script_.end())
      throw GatewayError("mock script has no response for request " + std::to_string(ordinal));
    if (it->second.is_error) throw GatewayError(it->second.text);
    return it->second.text;
  }

  std::size_t calls() const {
    std::lock_guard lock(mu_);
    return calls_;
  }
  std::vector<Conversation> requests() const {
    std::lock_guard lock(mu_);
    return requests_;
  }

 private:
  struct Entry {
    std::string text;
    bool is_error = false;
  };
  std::map<std::size_t, Entry> script_;
  mutable std::mutex mu_;
  std::size_t calls_ = 0;
  std::vector<Conversation> requests_;
};

namespace detail {

inline std::string event_name(const EventMention& m) { return m.trigger.empty() ? m.id : m.trigger; }

inline std::string answer_line(const RelationTuple& t, AxisSet axes) {
  std::string out = "Answer: ";
  bool first = true;
  for (Axis a : axes.members()) {
    if (!first) out += ", ";
    out += to_string(t.at(a));
    first = false;
  }
  return out;
}

inline std::string task_description(AxisSet axes) {
  std::ostringstream os;
  os << "This is an event relation extraction task. Given a document and two events mentioned in "
        "it, decide the relation from the first event to the second event for each relation "
        "type. The first event starts no later than the second one. Possible labels:\n";
  for (Axis a : axes.members()) {
    os << "- " << to_string(a) << ":";
    bool first = true;
    for (Label l : vocabulary(a)) {
      os << (first ? " " : ", ") << to_string(l);
      first = false;
    }
    os << "\n";
  }
  os << "Give exactly one label per relation type, in the order listed, on a final line starting "
        "with \"Answer:\".";
  return os.str();
}

inline std::string sample_query(const GoldSample& s) {
  std::ostringstream os;
  os << "Document: " << s.context << "\n"
     << "Event 1: " << event_name(s.head) << "\n"
     << "Event 2: " << event_name(s.tail) << "\n"
     << "What are the relations between event " << event_name(s.head) << " and event "
     << event_name(s.tail) << "?";
  return os.str();
}

inline constexpr std::string_view kStepByStep = "Let's think step by step.";
inline constexpr std::string_view kSelfConstraints =
    "First extract the obvious relations or facts between the two events and generate the "
    "logical constraints they imply, then use these constraints together with the known "
    "information to infer the remaining relations.";

}  // namespace detail

inline Conversation build_prompt(Strategy strategy, const GoldSample& sample,
                                 std::span<const Demonstration> demos) {
  if (is_chain_of_thought(strategy)) {
    for (const auto& d : demos)
      if (d.rationale.empty()) throw MissingDemoRationale(d.sample.id);
  }

  std::string system = detail::task_description(sample.axes);
  if (strategy == Strategy::WithAllConstraints) {
    const std::vector<std::string> names{"A", "B"};
    system += "\nThe answer must satisfy these logical constraints, where event A is the first "
              "event and event B is the second event:";
    for (const auto& c : binary_constraints())
      system += "\n- " + describe(c.id, std::span<const std::string>(names)).text;
  }

  std::string instruction;
  if (strategy == Strategy::VanillaCoT) instruction = std::string(detail::kStepByStep);
  if (strategy == Strategy::CoTWithSelfConstraints)
    instruction = std::string(detail::kSelfConstraints) + " " + std::string(detail::kStepByStep);

  Conversation conv;
  conv.add(Role::System, std::move(system));
  for (const auto& d : demos) {
    std::string q = detail::sample_query(d.sample);
    if (!instruction.empty()) q += "\n" + instruction;
    conv.add(Role::User, std::move(q));
    std::string a;
    if (is_chain_of_thought(strategy)) a = d.rationale + "\n";
    a += detail::answer_line(d.sample.gold, d.sample.axes);
    conv.add(Role::Assistant, std::move(a));
  }
  std::string q = detail::sample_query(sample);
  if (!instruction.empty()) q += "\n" + instruction;
  conv.add(Role::User, std::move(q));
  return conv;
}

// Follow-up turn listing the constraints the previous answer violates.
inline std::string retrieval_turn(const std::vector<ConstraintText>& texts) {
  std::string out = "Your answer conflicts with the following logical constraints:";
  for (const auto& t : texts) out += "\n- " + t.text;
  out += "\nPlease reconsider and answer again so that all of these constraints hold. Give the "
         "final line starting with \"Answer:\".";
  return out;
}

struct SampleRun {
  std::string id;
  Strategy strategy = Strategy::VanillaICL;
  Conversation transcript;
  std::vector<std::string> responses;    // raw gateway outputs, in call order
  ParsedAnswer parsed;                   // from the last response
  RelationTuple final_tuple;             // parsed, or repaired for post-processing
  std::vector<RelationTuple> candidates; // post-processing candidate set
  std::size_t calls = 0;
  bool exhausted = false;                // retrieval loop hit max_iters while inconsistent
  std::optional<std::string> error;
};

struct RunOptions {
  std::uint64_t seed = 0;
  std::size_t max_iters = 2;     // gateway calls per sample for the retrieval strategy
  std::size_t max_in_flight = 1; // concurrent samples; keep 1 for ordinal-scripted mocks
};

namespace detail {

inline ParsedAnswer parse_for(const GoldSample& sample, const std::string& response) {
  auto parsed = parse_llm_answer(response, sample.axes);
  parsed.tuple.head = sample.gold.head;
  parsed.tuple.tail = sample.gold.tail;
  return parsed;
}

}  // namespace detail

// Iteration 0 asks with the vanilla ICL prompt; each later iteration feeds back
// the sentences of the violated constraints and asks again, stopping as soon
// as an answer is conflict-free or after max_iters gateway calls.
inline SampleRun iterative_retrieval_loop(ChatGateway& gateway, const GoldSample& sample,
                                          std::span<const Demonstration> demos, std::size_t max_iters) {
  if (max_iters < 1) throw ValidationError("max_iters must be at least 1");
  SampleRun run;
  run.id = sample.id;
  run.strategy = Strategy::WithRetrievedConstraints;
  run.transcript = build_prompt(Strategy::VanillaICL, sample, demos);
  const std::vector<std::string> names{detail::event_name(sample.head), detail::event_name(sample.tail)};
  while (true) {
    std::string response = gateway.complete(run.transcript);
    ++run.calls;
    run.transcript.add(Role::Assistant, response);
    run.responses.push_back(response);
    run.parsed = detail::parse_for(sample, response);
    const auto report = check_pair(run.parsed.tuple, sample.axes);
    if (report.consistent()) break;
    if (run.calls >= max_iters) {
      run.exhausted = true;
      break;
    }
    run.transcript.add(Role::User,
                       retrieval_turn(retrieve_constraint_texts(report, std::span<const std::string>(names))));
  }
  run.final_tuple = run.parsed.tuple;
  return run;
}

inline SampleRun run_sample(ChatGateway& gateway, Strategy strategy, const GoldSample& sample,
                            std::span<const Demonstration> demos, const RunOptions& options) {
  SampleRun run;
  run.id = sample.id;
  run.strategy = strategy;
  run.final_tuple = RelationTuple::all_negative(sample.gold.head, sample.gold.tail);
  run.parsed.tuple = run.final_tuple;
  try {
    if (strategy == Strategy::WithRetrievedConstraints) {
      run = iterative_retrieval_loop(gateway, sample, demos, options.max_iters);
      return run;
    }
    const Strategy base = strategy == Strategy::PostProcessing ? Strategy::VanillaICL : strategy;
    run.transcript = build_prompt(base, sample, demos);
    std::string response = gateway.complete(run.transcript);
    ++run.calls;
    run.transcript.add(Role::Assistant, response);
    run.responses.push_back(response);
    run.parsed = detail::parse_for(sample, response);
    run.final_tuple = run.parsed.tuple;
  } catch (const GatewayError& e) {
    run.error = e.what();
  }
  if (strategy == Strategy::PostProcessing) {
    auto repaired = repair(run.final_tuple, sample.axes, options.seed);
    run.final_tuple = repaired.chosen;
    run.candidates = std::move(repaired.candidates);
  }
  return run;
}

// Gateway failures are recorded on the affected sample; the batch continues.
inline std::vector<SampleRun> run_strategy(ChatGateway& gateway, Strategy strategy,
                                           std::span<const GoldSample> samples,
                                           std::span<const Demonstration> demos, const RunOptions& options = {}) {
  std::vector<SampleRun> runs(samples.size());
  auto run_one = [&](std::size_t i) {
    try {
      runs[i] = run_sample(gateway, strategy, samples[i], demos, options);
    } catch (const GatewayError& e) {
      runs[i].id = samples[i].id;
      runs[i].strategy = strategy;
      runs[i].final_tuple = RelationTuple::all_negative(samples[i].gold.head, samples[i].gold.tail);
      runs[i].error = e.what();
    }
  };
  const std::size_t width = std::max<std::size_t>(1, options.max_in_flight);
  if (width == 1) {
    for (std::size_t i = 0; i < samples.size(); ++i) run_one(i);
    return runs;
  }
  for (std::size_t start = 0; start < samples.size(); start += width) {
    std::vector<std::future<void>> batch;
    for (std::size_t i = start; i < std::min(samples.size(), start + width); ++i)
      batch.push_back(std::async(std::launch::async, run_one, i));
    for (auto& f : batch) f.get();
  }
  return runs;
}

namespace detail {

inline nlohmann::ordered_json tuple_json(const RelationTuple& t) {
  return {{"head", t.head},
          {"tail", t.tail},
          {"coref", std::string(to_string(t.coref()))},
          {"temporal", std::string(to_string(t.temporal()))},
          {"causal", std::string(to_string(t.causal()))},
          {"subevent", std::string(to_string(t.subevent()))}};
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const SampleRun& run) {
  nlohmann::ordered_json diag = nlohmann::ordered_json::object();
  for (Axis a : kAllAxes) diag[std::string(to_string(a))] = std::string(to_string(run.parsed.diagnostic(a)));
  nlohmann::ordered_json j{{"id", run.id},
                           {"strategy", std::string(to_string(run.strategy))},
                           {"calls", run.calls},
                           {"exhausted", run.exhausted},
                           {"error", run.error ? nlohmann::ordered_json(*run.error) : nlohmann::ordered_json()},
                           {"turns", run.transcript.to_json()},
                           {"responses", run.responses},
                           {"parsed", detail::tuple_json(run.parsed.tuple)},
                           {"diagnostics", diag},
                           {"final", detail::tuple_json(run.final_tuple)}};
  if (!run.candidates.empty()) {
    j["candidates"] = nlohmann::ordered_json::array();
    for (const auto& c : run.candidates) j["candidates"].push_back(detail::tuple_json(c));
  }
  return j;
}

// Mock script reproducing the gateway outputs of earlier runs, in call order.
inline std::string script_from_runs(std::span<const SampleRun> runs) {
  std::string out;
  std::size_t ordinal = 0;
  for (const auto& run : runs) {
    for (const auto& r : run.responses) {
      out += nlohmann::ordered_json{{"ordinal", ordinal++}, {"response", r}}.dump();
      out += '\n';
    }
  }
  return out;
}

inline std::vector<Prediction> predictions_from_runs(std::span<const SampleRun> runs) {
  std::vector<Prediction> out;
  for (const auto& r : runs) out.push_back(Prediction{r.id, r.final_tuple, r.parsed});
  return out;
}

inline std::vector<Demonstration> load_demonstrations(std::istream& in) {
  std::vector<Demonstration> out;
  std::vector<std::string> rationales;
  std::stringstream copy;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rationales.push_back(nlohmann::json::parse(line).value("rationale", std::string()));
    } catch (const std::exception& e) {
      throw MalformedRecord(line_no, e.what());
    }
    copy << line << '\n';
  }
  auto samples = load_samples(copy);
  for (std::size_t i = 0; i < samples.size(); ++i) out.push_back({std::move(samples[i]), rationales[i]});
  return out;
}

}  // namespace erl
