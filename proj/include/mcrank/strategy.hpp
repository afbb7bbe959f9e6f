#pragma once

// Composite solving strategies S = H * T * U * X: typing, presets and
// execution with suspension for expert-driven techniques.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mcrank/core_model.hpp"
#include "mcrank/stages.hpp"

namespace mcrank {

enum class Stage { H, T, U, X };

inline char stage_letter(Stage s) { return "HTUX"[static_cast<int>(s)]; }

/// Highest technique index per stage; index 0 means the stage is absent.
inline int max_technique(Stage s) {
  switch (s) {
    case Stage::H: return 3;
    case Stage::T: return 2;
    case Stage::U: return 5;
    case Stage::X: return 2;
  }
  return 0;
}

struct Technique {
  Stage stage = Stage::H;
  int index = 0;

  bool absent() const { return index == 0; }
  std::string code() const { return std::string(1, stage_letter(stage)) + std::to_string(index); }

  friend bool operator==(const Technique&, const Technique&) = default;
};

inline Technique parse_technique(const std::string& code) {
  if (code.size() < 2) throw Error("malformed technique code \"" + code + "\"");
  Stage stage;
  switch (code[0]) {
    case 'H': stage = Stage::H; break;
    case 'T': stage = Stage::T; break;
    case 'U': stage = Stage::U; break;
    case 'X': stage = Stage::X; break;
    default: throw Error("unknown stage in technique code \"" + code + "\"");
  }
  auto digits = code.substr(1);
  if (digits.find_first_not_of("0123456789") != std::string::npos) {
    throw Error("malformed technique code \"" + code + "\"");
  }
  int index = std::stoi(digits);
  if (index > max_technique(stage)) throw Error("unknown technique \"" + code + "\"");
  return {stage, index};
}

/// Technique-specific parameters. Only the fields relevant to the chosen
/// technique are read.
struct StageParams {
  std::string source = "expert";                // H1, U4: judgment source
  std::optional<ElectreParams> electre;         // H3
  std::optional<std::vector<Rational>> weights; // T2
  std::vector<int> sizes;                       // U3
  int layers = 0;                               // U4: layer count m
  std::optional<RuleSet> rules;                 // U5
  std::optional<LayerCapacities> capacities;    // X2

  friend bool operator==(const StageParams&, const StageParams&) = default;
};

struct StageChoice {
  Technique technique;
  StageParams params;

  friend bool operator==(const StageChoice&, const StageChoice&) = default;
};

inline StageChoice choice(const std::string& code, StageParams params = {}) {
  return {parse_technique(code), std::move(params)};
}

struct Branch {
  StageChoice h{{Stage::H, 0}, {}};
  StageChoice t{{Stage::T, 0}, {}};
  StageChoice u{{Stage::U, 0}, {}};

  friend bool operator==(const Branch&, const Branch&) = default;
};

enum class Target { layered, fuzzy, linear };

inline std::string to_string(Target t) {
  switch (t) {
    case Target::layered: return "layered";
    case Target::fuzzy: return "fuzzy";
    case Target::linear: return "linear";
  }
  return "?";
}

inline Target parse_target(const std::string& s) {
  if (s == "layered") return Target::layered;
  if (s == "fuzzy") return Target::fuzzy;
  if (s == "linear") return Target::linear;
  throw Error("unknown target \"" + s + "\"");
}

struct StrategySpec {
  std::vector<Branch> branches;
  StageChoice aggregator{{Stage::X, 0}, {}};
  Target target = Target::layered;

  friend bool operator==(const StrategySpec&, const StrategySpec&) = default;
};

struct Diagnostic {
  int branch = -1;  // -1 for strategy-level problems
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

using StrategyReport = std::vector<Diagnostic>;

namespace detail {

inline void check_stage(const StageChoice& c, Stage expected, int branch, StrategyReport& out) {
  if (c.technique.stage != expected) {
    out.push_back({branch, c.technique.code() + " placed in stage " +
                               std::string(1, stage_letter(expected))});
  }
  if (c.technique.index < 0 || c.technique.index > max_technique(c.technique.stage)) {
    out.push_back({branch, "unknown technique " + c.technique.code()});
  }
}

}  // namespace detail

/// Type-checks every branch: consumers must have producers upstream.
inline StrategyReport validate_strategy(const StrategySpec& s) {
  StrategyReport out;
  if (s.branches.empty()) out.push_back({-1, "strategy needs at least one branch"});
  for (std::size_t i = 0; i < s.branches.size(); ++i) {
    const int b = static_cast<int>(i);
    const auto& br = s.branches[i];
    detail::check_stage(br.h, Stage::H, b, out);
    detail::check_stage(br.t, Stage::T, b, out);
    detail::check_stage(br.u, Stage::U, b, out);
    const int h = br.h.technique.index, t = br.t.technique.index, u = br.u.technique.index;
    const bool has_relation = h != 0;
    const bool has_order = t == 2 || (t == 1 && has_relation);
    if (t == 1 && !has_relation) out.push_back({b, "T1 needs a preference relation (H1-H3)"});
    if (u == 1 && !has_relation) out.push_back({b, "U1 needs a preference relation (H1-H3)"});
    if (u == 3 && !has_order) out.push_back({b, "U3 needs a linear order (T1 or T2)"});
    if (u == 3 && br.u.params.sizes.empty()) out.push_back({b, "U3 needs layer sizes"});
    if (u == 4 && br.u.params.layers < 1) out.push_back({b, "U4 needs a positive layer count"});
    if (u == 5 && !br.u.params.rules) out.push_back({b, "U5 needs a rule set"});
    if (u == 0 && s.target != Target::linear) {
      out.push_back({b, "a layered result needs a U stage"});
    }
    if (h == 3 && br.h.params.electre) {
      const auto& p = br.h.params.electre;
      if (p->concordance < 0 || p->concordance > 1 || p->discordance < 0 || p->discordance > 1) {
        out.push_back({b, "H3 thresholds must lie in [0,1]"});
      }
    }
    if (s.target == Target::linear && !has_order) {
      out.push_back({b, "a linear result needs a T stage with its inputs"});
    }
  }
  detail::check_stage(s.aggregator, Stage::X, -1, out);
  const int x = s.aggregator.technique.index;
  const auto branches = s.branches.size();
  switch (s.target) {
    case Target::layered:
      if (branches > 1 && x == 0) out.push_back({-1, "several branches need an aggregator (X1 or X2)"});
      break;
    case Target::fuzzy:
      if (branches < 2) out.push_back({-1, "a fuzzy result needs at least two branches"});
      if (x != 0) out.push_back({-1, "a fuzzy result aggregates by interval merging; use X0"});
      break;
    case Target::linear:
      if (branches != 1) out.push_back({-1, "a linear result needs exactly one branch"});
      if (x != 0) out.push_back({-1, "a linear result cannot be aggregated; use X0"});
      break;
  }
  if (x == 2 && !s.aggregator.params.capacities) out.push_back({-1, "X2 needs layer capacities"});
  return out;
}

// ------------------------------------------------------------- presets

struct StrategyTemplate {
  std::string name;
  std::string flow;
  std::vector<int> h, t, u, x;  // allowed technique indices per stage
  int min_branches = 1;
  int max_branches = 1;

  friend bool operator==(const StrategyTemplate&, const StrategyTemplate&) = default;
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"E", "W1", "W2", "W3", "W4", "W5", "D1", "D2"};
  return names;
}

inline StrategyTemplate preset(const std::string& name) {
  constexpr int many = 16;
  if (name == "E") return {"E", "A => G => B' => {B'} => B", {1, 2, 3}, {0, 1, 2}, {1, 3}, {0, 1, 2}, 1, many};
  if (name == "W1") return {"W1", "A => {B'} => B", {0}, {0}, {2, 4, 5}, {0, 1, 2}, 1, many};
  if (name == "W2") return {"W2", "A => G => {B'} => B", {1, 2, 3}, {0}, {1, 2}, {0, 1, 2}, 1, many};
  if (name == "W3") return {"W3", "A => G => B' => B", {1, 2, 3}, {1, 2}, {3}, {0}, 1, 1};
  if (name == "W4") return {"W4", "A => B' => {B'} => B", {0}, {2}, {3}, {0}, 1, 1};
  if (name == "W5") return {"W5", "A => B' => {B'} => B", {0}, {2}, {3}, {1, 2}, 2, many};
  if (name == "D1") return {"D1", "A => B (expert)", {0}, {0}, {4}, {0, 1}, 1, many};
  if (name == "D2") return {"D2", "A => B (logical)", {0}, {0}, {5}, {0, 1}, 1, many};
  throw Error("unknown preset \"" + name + "\"");
}

/// Binds techniques into a template; throws if a choice falls outside it.
inline StrategySpec instantiate(const StrategyTemplate& tpl, std::vector<Branch> branches,
                                StageChoice aggregator, Target target = Target::layered) {
  auto allowed = [&](const std::vector<int>& set, const StageChoice& c) {
    if (std::find(set.begin(), set.end(), c.technique.index) == set.end()) {
      throw Error("preset " + tpl.name + " does not admit " + c.technique.code());
    }
  };
  const int count = static_cast<int>(branches.size());
  if (count < tpl.min_branches || count > tpl.max_branches) {
    throw Error("preset " + tpl.name + " admits " + std::to_string(tpl.min_branches) + ".." +
                std::to_string(tpl.max_branches) + " branches");
  }
  for (const auto& b : branches) {
    allowed(tpl.h, b.h);
    allowed(tpl.t, b.t);
    allowed(tpl.u, b.u);
  }
  allowed(tpl.x, aggregator);
  return {std::move(branches), std::move(aggregator), target};
}

// ------------------------------------------------------------- execution

/// Answers collected from experts, keyed by judgment source.
struct ExpertInputs {
  std::map<std::string, JudgmentSet> judgments;
  std::map<std::string, std::map<AltId, int>> assignments;
  /// Scripted inputs are final: partial judgment sets are used as they are
  /// instead of prompting for the remaining pairs.
  bool scripted = false;

  friend bool operator==(const ExpertInputs&, const ExpertInputs&) = default;
};

struct ExpertRequest {
  enum class Kind { pair, layer };
  Kind kind = Kind::pair;
  int branch = 0;
  std::string source;
  AltId a = 0;
  AltId b = 0;     // pair requests only
  int layers = 0;  // layer requests only

  friend bool operator==(const ExpertRequest&, const ExpertRequest&) = default;
};

struct BranchTrace {
  std::optional<PreferenceRelation> relation;
  std::vector<std::vector<AltId>> contradictions;
  std::optional<LinearOrder> order;
  std::optional<LayeredRanking> preliminary;

  friend bool operator==(const BranchTrace&, const BranchTrace&) = default;
};

using FinalResult = std::variant<LayeredRanking, FuzzyRanking, LinearOrder>;

struct ExecutionTrace {
  std::vector<BranchTrace> branches;
  FinalResult result;

  friend bool operator==(const ExecutionTrace&, const ExecutionTrace&) = default;
};

/// Either a finished trace or the next question for an expert.
using ExecutionOutcome = std::variant<ExecutionTrace, ExpertRequest>;

namespace detail {

inline std::vector<Rational> criterion_weights(const EstimateMatrix& m) {
  std::vector<Rational> w;
  for (const auto& c : m.criteria()) w.push_back(c.weight);
  return w;
}

inline std::optional<ExpertRequest> pending_request(const StrategySpec& s, const EstimateMatrix& data,
                                                    const ExpertInputs& in) {
  for (std::size_t i = 0; i < s.branches.size(); ++i) {
    const auto& br = s.branches[i];
    const int b = static_cast<int>(i);
    if (br.h.technique.index == 1) {
      const auto& src = br.h.params.source;
      auto it = in.judgments.find(src);
      if (it == in.judgments.end()) {
        if (data.n() >= 2) return ExpertRequest{ExpertRequest::Kind::pair, b, src, 1, 2, 0};
      } else if (!in.scripted) {
        if (auto pair = it->second.first_missing(data.n())) {
          return ExpertRequest{ExpertRequest::Kind::pair, b, src, pair->first, pair->second, 0};
        }
      }
    }
    if (br.u.technique.index == 4) {
      const auto& src = br.u.params.source;
      auto it = in.assignments.find(src);
      if (it == in.assignments.end() || !in.scripted) {
        for (AltId a = 1; a <= data.n(); ++a) {
          if (it == in.assignments.end() || !it->second.count(a)) {
            return ExpertRequest{ExpertRequest::Kind::layer, b, src, a, 0, br.u.params.layers};
          }
        }
      }
    }
  }
  return std::nullopt;
}

inline BranchTrace run_branch(const Branch& br, const EstimateMatrix& data, const ExpertInputs& in) {
  BranchTrace trace;
  const auto empty_judgments = JudgmentSet{};
  switch (br.h.technique.index) {
    case 1: {
      auto it = in.judgments.find(br.h.params.source);
      trace.relation = h1_judgment_relation(data.n(), it == in.judgments.end() ? empty_judgments : it->second);
      break;
    }
    case 2: trace.relation = h2_pareto_relation(data); break;
    case 3: {
      ElectreParams p = br.h.params.electre.value_or(ElectreParams{{}, Rational(3, 4), Rational(1, 2)});
      if (p.weights.empty()) p.weights = criterion_weights(data);
      trace.relation = h3_electre_relation(data, p);
      break;
    }
    default: break;
  }
  if (trace.relation) trace.contradictions = detect_contradiction(*trace.relation);

  switch (br.t.technique.index) {
    case 1: trace.order = t1_row_sum_order(*trace.relation); break;
    case 2:
      trace.order = t2_additive_utility_order(data, br.t.params.weights.value_or(criterion_weights(data)));
      break;
    default: break;
  }

  switch (br.u.technique.index) {
    case 1: trace.preliminary = u1_maximal_layers(*trace.relation); break;
    case 2: trace.preliminary = u2_pareto_layers(data); break;
    case 3: trace.preliminary = u3_divide_linear(*trace.order, br.u.params.sizes); break;
    case 4: {
      auto it = in.assignments.find(br.u.params.source);
      trace.preliminary = u4_expert_layers(
          data.n(), it == in.assignments.end() ? std::map<AltId, int>{} : it->second, br.u.params.layers);
      break;
    }
    case 5: trace.preliminary = u5_logical_layers(data, *br.u.params.rules); break;
    default: break;
  }
  return trace;
}

}  // namespace detail

/// Runs every branch stage by stage and combines the branch outputs. Returns
/// an ExpertRequest instead when an expert technique still lacks answers.
/// Throws Error when the strategy does not validate.
inline ExecutionOutcome execute(const StrategySpec& s, const EstimateMatrix& data,
                                const ExpertInputs& inputs = {}) {
  auto report = validate_strategy(s);
  if (!report.empty()) throw Error("invalid strategy: " + report.front().message);
  if (auto req = detail::pending_request(s, data, inputs)) return *req;

  ExecutionTrace trace;
  std::vector<LayeredRanking> outputs;
  for (const auto& br : s.branches) {
    trace.branches.push_back(detail::run_branch(br, data, inputs));
    if (trace.branches.back().preliminary) outputs.push_back(*trace.branches.back().preliminary);
  }

  switch (s.target) {
    case Target::linear:
      trace.result = *trace.branches.front().order;
      break;
    case Target::fuzzy:
      trace.result = fuzzify(outputs);
      break;
    case Target::layered:
      switch (s.aggregator.technique.index) {
        case 0: trace.result = outputs.front(); break;
        case 1: trace.result = x1_election_aggregate(outputs); break;
        case 2: trace.result = x2_knapsack_aggregate(outputs, *s.aggregator.params.capacities); break;
      }
      break;
  }
  return trace;
}

}  // namespace mcrank
