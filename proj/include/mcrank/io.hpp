#pragma once

// JSON document formats: decision data, strategies, results, morphologies
// and synthesis reports. docs/formats.md describes the schema.

#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "mcrank/core_model.hpp"
#include "mcrank/hmmd.hpp"
#include "mcrank/multiset.hpp"
#include "mcrank/strategy.hpp"

namespace mcrank::io {

using json = nlohmann::json;

/// Integers stay JSON numbers; other rationals become "p/q" strings.
inline json rational_to_json(const Rational& r) {
  if (r.denominator() == 1) return r.numerator();
  return to_string(r);
}

inline Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw Error("expected an integer or \"p/q\" string, got " + j.dump());
}

namespace detail {

inline const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

inline json rationals_to_json(const std::vector<Rational>& v) {
  json out = json::array();
  for (const auto& r : v) out.push_back(rational_to_json(r));
  return out;
}

inline std::vector<Rational> rationals_from_json(const json& j) {
  if (!j.is_array()) throw Error("expected an array of numbers");
  std::vector<Rational> out;
  for (const auto& x : j) out.push_back(rational_from_json(x));
  return out;
}

}  // namespace detail

// ------------------------------------------------------------ decision data

inline json matrix_to_json(const EstimateMatrix& m) {
  json alts = json::array();
  for (const auto& a : m.alternatives()) alts.push_back(a.name);
  json crits = json::array();
  for (const auto& c : m.criteria()) {
    crits.push_back({{"name", c.name},
                     {"weight", rational_to_json(c.weight)},
                     {"scale", {c.scale_min, c.scale_max}},
                     {"higher_is_better", c.higher_is_better}});
  }
  json grid = json::array();
  for (const auto& row : m.scores()) grid.push_back(detail::rationals_to_json(row));
  return {{"alternatives", alts}, {"criteria", crits}, {"estimates", grid}};
}

/// Parses the document structure; range checks are left to validate_matrix.
inline EstimateMatrix matrix_from_json(const json& j) {
  std::vector<Alternative> alts;
  const auto& ja = detail::require(j, "alternatives");
  if (!ja.is_array()) throw Error("\"alternatives\" must be an array");
  for (const auto& a : ja) {
    alts.push_back({static_cast<AltId>(alts.size() + 1),
                    a.is_object() ? a.at("name").get<std::string>() : a.get<std::string>()});
  }
  std::vector<Criterion> crits;
  const auto& jc = detail::require(j, "criteria");
  if (!jc.is_array()) throw Error("\"criteria\" must be an array");
  for (const auto& c : jc) {
    Criterion k;
    k.id = static_cast<int>(crits.size() + 1);
    k.name = c.value("name", "K" + std::to_string(k.id));
    if (c.contains("weight")) k.weight = rational_from_json(c.at("weight"));
    const auto& scale = detail::require(c, "scale");
    if (!scale.is_array() || scale.size() != 2) throw Error("criterion scale must be [min, max]");
    k.scale_min = scale[0].get<int>();
    k.scale_max = scale[1].get<int>();
    k.higher_is_better = c.value("higher_is_better", true);
    crits.push_back(std::move(k));
  }
  std::vector<std::vector<Rational>> grid;
  const auto& jz = detail::require(j, "estimates");
  if (!jz.is_array()) throw Error("\"estimates\" must be an array of rows");
  for (std::size_t i = 0; i < jz.size(); ++i) {
    try {
      grid.push_back(detail::rationals_from_json(jz[i]));
    } catch (const Error& e) {
      throw Error("estimates row " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return EstimateMatrix(std::move(alts), std::move(crits), std::move(grid));
}

inline json report_to_json(const ValidationReport& report) {
  json out = json::array();
  for (const auto& v : report) {
    json item{{"message", v.message}};
    if (v.alternative) item["alternative"] = *v.alternative;
    if (v.criterion) item["criterion"] = *v.criterion;
    out.push_back(item);
  }
  return out;
}

// ---------------------------------------------------------------- strategy

inline json stage_to_json(const StageChoice& c) {
  const auto& p = c.params;
  json j{{"technique", c.technique.code()}};
  const int idx = c.technique.index;
  switch (c.technique.stage) {
    case Stage::H:
      if (idx == 1) j["source"] = p.source;
      if (idx == 3 && p.electre) {
        j["concordance"] = rational_to_json(p.electre->concordance);
        j["discordance"] = rational_to_json(p.electre->discordance);
        if (!p.electre->weights.empty()) j["weights"] = detail::rationals_to_json(p.electre->weights);
      }
      break;
    case Stage::T:
      if (idx == 2 && p.weights) j["weights"] = detail::rationals_to_json(*p.weights);
      break;
    case Stage::U:
      if (idx == 3) j["sizes"] = p.sizes;
      if (idx == 4) {
        j["source"] = p.source;
        j["layers"] = p.layers;
      }
      if (idx == 5 && p.rules) {
        json rules = json::array();
        for (const auto& r : p.rules->rules) {
          json when = json::array();
          for (const auto& t : r.conditions) {
            when.push_back({{"criterion", t.criterion}, {"min", rational_to_json(t.min)}});
          }
          rules.push_back({{"when", when}, {"layer", r.layer}});
        }
        j["rules"] = rules;
        j["default_layer"] = p.rules->default_layer;
      }
      break;
    case Stage::X:
      if (idx == 2 && p.capacities) j["capacities"] = p.capacities->capacities;
      break;
  }
  return j;
}

inline StageChoice stage_from_json(const json& j, Stage expected) {
  StageChoice c;
  c.technique = parse_technique(j.is_string() ? j.get<std::string>()
                                              : detail::require(j, "technique").get<std::string>());
  if (c.technique.stage != expected) {
    throw Error(c.technique.code() + " given for stage " + std::string(1, stage_letter(expected)));
  }
  if (j.is_string()) return c;
  auto& p = c.params;
  p.source = j.value("source", p.source);
  if (j.contains("concordance") || j.contains("discordance") ||
      (c.technique.stage == Stage::H && j.contains("weights"))) {
    ElectreParams e{{}, Rational(3, 4), Rational(1, 2)};
    if (j.contains("concordance")) e.concordance = rational_from_json(j.at("concordance"));
    if (j.contains("discordance")) e.discordance = rational_from_json(j.at("discordance"));
    if (j.contains("weights")) e.weights = detail::rationals_from_json(j.at("weights"));
    p.electre = e;
  }
  if (c.technique.stage == Stage::T && j.contains("weights")) {
    p.weights = detail::rationals_from_json(j.at("weights"));
  }
  if (j.contains("sizes")) p.sizes = j.at("sizes").get<std::vector<int>>();
  p.layers = j.value("layers", 0);
  if (j.contains("rules")) {
    RuleSet rs;
    for (const auto& r : j.at("rules")) {
      Rule rule;
      rule.layer = detail::require(r, "layer").get<int>();
      for (const auto& t : r.value("when", json::array())) {
        rule.conditions.push_back({detail::require(t, "criterion").get<int>(),
                                   rational_from_json(detail::require(t, "min"))});
      }
      rs.rules.push_back(std::move(rule));
    }
    rs.default_layer = j.value("default_layer", 1);
    p.rules = std::move(rs);
  }
  if (j.contains("capacities")) p.capacities = LayerCapacities{j.at("capacities").get<std::vector<int>>()};
  return c;
}

inline json inputs_to_json(const ExpertInputs& in) {
  json judgments = json::object();
  for (const auto& [src, set] : in.judgments) {
    json list = json::array();
    for (const auto& jd : set.list()) list.push_back({jd.a, jd.b, to_string(jd.verdict)});
    judgments[src] = list;
  }
  json assignments = json::object();
  for (const auto& [src, map] : in.assignments) {
    json obj = json::object();
    for (const auto& [a, k] : map) obj[std::to_string(a)] = k;
    assignments[src] = obj;
  }
  return {{"judgments", judgments}, {"assignments", assignments}};
}

inline ExpertInputs inputs_from_json(const json& j, bool scripted) {
  ExpertInputs in;
  in.scripted = scripted;
  const json judgments = j.value("judgments", json::object());
  const json assignments = j.value("assignments", json::object());
  for (const auto& [src, list] : judgments.items()) {
    std::vector<Judgment> verdicts;
    for (const auto& v : list) {
      if (!v.is_array() || v.size() != 3) throw Error("judgment must be [a, b, verdict]");
      verdicts.push_back({v[0].get<AltId>(), v[1].get<AltId>(), parse_verdict(v[2].get<std::string>())});
    }
    in.judgments[src] = JudgmentSet(verdicts);
  }
  for (const auto& [src, obj] : assignments.items()) {
    auto& map = in.assignments[src];
    for (const auto& [a, k] : obj.items()) map[std::stoi(a)] = k.get<int>();
  }
  return in;
}

struct StrategyDocument {
  std::optional<std::string> preset;
  StrategySpec spec;
  ExpertInputs inputs;

  friend bool operator==(const StrategyDocument&, const StrategyDocument&) = default;
};

inline json strategy_to_json(const StrategyDocument& doc) {
  json branches = json::array();
  for (const auto& b : doc.spec.branches) {
    branches.push_back({{"H", stage_to_json(b.h)}, {"T", stage_to_json(b.t)}, {"U", stage_to_json(b.u)}});
  }
  json j{{"target", to_string(doc.spec.target)},
         {"branches", branches},
         {"aggregator", stage_to_json(doc.spec.aggregator)},
         {"inputs", inputs_to_json(doc.inputs)},
         {"scripted", doc.inputs.scripted}};
  if (doc.preset) j["preset"] = *doc.preset;
  return j;
}

/// Inputs embedded in a strategy document are treated as scripted.
inline StrategyDocument strategy_from_json(const json& j) {
  StrategyDocument doc;
  if (j.contains("preset")) doc.preset = j.at("preset").get<std::string>();
  doc.spec.target = parse_target(j.value("target", "layered"));
  const auto& jb = detail::require(j, "branches");
  if (!jb.is_array()) throw Error("\"branches\" must be an array");
  for (const auto& b : jb) {
    Branch br;
    if (b.contains("H")) br.h = stage_from_json(b.at("H"), Stage::H);
    if (b.contains("T")) br.t = stage_from_json(b.at("T"), Stage::T);
    if (b.contains("U")) br.u = stage_from_json(b.at("U"), Stage::U);
    doc.spec.branches.push_back(std::move(br));
  }
  if (j.contains("aggregator")) doc.spec.aggregator = stage_from_json(j.at("aggregator"), Stage::X);
  doc.inputs = inputs_from_json(j.value("inputs", json::object()), j.value("scripted", true));
  if (doc.preset) {
    doc.spec = instantiate(preset(*doc.preset), doc.spec.branches, doc.spec.aggregator, doc.spec.target);
  }
  return doc;
}

inline json diagnostics_to_json(const StrategyReport& report) {
  json out = json::array();
  for (const auto& d : report) {
    json item{{"message", d.message}};
    if (d.branch >= 0) item["branch"] = d.branch;
    out.push_back(item);
  }
  return out;
}

// ----------------------------------------------------------------- results

inline json layers_to_json(const LayeredRanking& r) { return r.layers(); }

inline json result_to_json(const FinalResult& r) {
  return std::visit(
      [](const auto& v) -> json {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, LayeredRanking>) {
          return {{"kind", "layered"}, {"layers", v.layers()}};
        } else if constexpr (std::is_same_v<V, FuzzyRanking>) {
          json iv = json::array();
          for (const auto& i : v.intervals()) iv.push_back({i.lo, i.hi});
          return {{"kind", "fuzzy"}, {"m", v.m()}, {"intervals", iv}};
        } else {
          return {{"kind", "linear"}, {"order", v.sequence()}};
        }
      },
      r);
}

inline FinalResult result_from_json(const json& j) {
  auto kind = detail::require(j, "kind").get<std::string>();
  if (kind == "layered") return LayeredRanking(detail::require(j, "layers").get<std::vector<std::vector<AltId>>>());
  if (kind == "linear") return LinearOrder(detail::require(j, "order").get<std::vector<AltId>>());
  if (kind == "fuzzy") {
    std::vector<PriorityInterval> iv;
    for (const auto& p : detail::require(j, "intervals")) iv.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
    return FuzzyRanking(std::move(iv), detail::require(j, "m").get<int>());
  }
  throw Error("unknown result kind \"" + kind + "\"");
}

inline json trace_to_json(const ExecutionTrace& t) {
  json branches = json::array();
  for (const auto& b : t.branches) {
    json jb = json::object();
    if (b.relation) {
      json edges = json::array();
      for (const auto& [a, c] : b.relation->edges()) edges.push_back({a, c});
      jb["relation"] = edges;
      jb["contradictions"] = b.contradictions;
    }
    if (b.order) jb["order"] = b.order->sequence();
    if (b.preliminary) jb["layers"] = b.preliminary->layers();
    branches.push_back(jb);
  }
  return {{"branches", branches}, {"result", result_to_json(t.result)}};
}

inline json request_to_json(const ExpertRequest& r) {
  if (r.kind == ExpertRequest::Kind::pair) {
    return {{"kind", "pair"}, {"branch", r.branch}, {"source", r.source}, {"a", r.a}, {"b", r.b}};
  }
  return {{"kind", "layer"}, {"branch", r.branch}, {"source", r.source}, {"alternative", r.a},
          {"layers", r.layers}};
}

// -------------------------------------------------------------- morphology

struct MorphologyDocument {
  Morphology morphology;
  CompatibilitySpec compatibility;

  friend bool operator==(const MorphologyDocument&, const MorphologyDocument&) = default;
};

inline json morphology_to_json(const MorphologyDocument& doc) {
  const auto& m = doc.morphology;
  const auto& c = doc.compatibility;
  json parts = json::array();
  for (const auto& p : m.parts) {
    json das = json::array();
    for (const auto& da : p.alternatives) {
      json jd{{"name", da.name},
              {"contributes_estimate", da.contributes_estimate},
              {"compatibility", da.contributes_compatibility}};
      if (da.estimate) jd["estimate"] = to_string(*da.estimate);
      if (da.priority) jd["priority"] = *da.priority;
      das.push_back(jd);
    }
    parts.push_back({{"name", p.name}, {"alternatives", das}});
  }
  json entries = json::array();
  if (c.mode == CompatibilityMode::ordinal) {
    for (const auto& [k, w] : c.ordinal) entries.push_back({k.first, k.second, w});
  } else {
    for (const auto& [k, w] : c.multiset) entries.push_back({k.first, k.second, to_string(w)});
  }
  json compat{{"mode", c.mode == CompatibilityMode::ordinal ? "ordinal" : "multiset"},
              {"top", c.top},
              {"entries", entries}};
  if (c.w0) compat["w0"] = to_string(*c.w0);
  return {{"scale", to_string(m.scale)}, {"parts", parts}, {"compatibility", compat}};
}

inline MorphologyDocument morphology_from_json(const json& j) {
  MorphologyDocument doc;
  auto& m = doc.morphology;
  const auto& js = detail::require(j, "scale");
  if (js.is_string()) {
    m.scale = parse_scale(js.get<std::string>());
  } else {
    m.scale = {detail::require(js, "l").get<int>(), detail::require(js, "eta").get<int>()};
  }
  for (const auto& jp : detail::require(j, "parts")) {
    Part p;
    p.name = detail::require(jp, "name").get<std::string>();
    for (const auto& jd : detail::require(jp, "alternatives")) {
      DesignAlternative da;
      da.name = detail::require(jd, "name").get<std::string>();
      if (jd.contains("estimate") && !jd.at("estimate").is_null()) {
        da.estimate = parse_estimate(jd.at("estimate").get<std::string>());
      }
      if (jd.contains("priority") && !jd.at("priority").is_null()) da.priority = jd.at("priority").get<int>();
      da.contributes_estimate = jd.value("contributes_estimate", da.estimate.has_value() || da.priority.has_value());
      da.contributes_compatibility = jd.value("compatibility", true);
      p.alternatives.push_back(std::move(da));
    }
    m.parts.push_back(std::move(p));
  }
  auto& c = doc.compatibility;
  const auto& jc = j.value("compatibility", json::object());
  auto mode = jc.value("mode", "ordinal");
  if (mode == "ordinal") {
    c.mode = CompatibilityMode::ordinal;
  } else if (mode == "multiset") {
    c.mode = CompatibilityMode::multiset;
  } else {
    throw Error("unknown compatibility mode \"" + mode + "\"");
  }
  c.top = jc.value("top", 3);
  for (const auto& e : jc.value("entries", json::array())) {
    if (!e.is_array() || e.size() != 3) throw Error("compatibility entry must be [a, b, value]");
    auto a = e[0].get<std::string>(), b = e[1].get<std::string>();
    if (c.mode == CompatibilityMode::ordinal) {
      c.set(a, b, e[2].get<int>());
    } else {
      c.set(a, b, parse_estimate(e[2].get<std::string>()));
    }
  }
  if (jc.contains("w0")) c.w0 = parse_estimate(jc.at("w0").get<std::string>());
  return doc;
}

inline json solution_to_json(const CompositeSolution& s, int variant) {
  json e = variant == 1 ? json(s.quality.e) : json(to_string(MultisetEstimate(s.quality.e)));
  return {{"selection", s.names},
          {"w", s.quality.w},
          {"e", e},
          {"lattice", {{"w", s.quality.w}, {"e_height", lattice_height(s.quality.e)}}}};
}

inline json synthesis_to_json(const SynthesisReport& r, const MorphologyDocument& doc) {
  json pareto = json::array();
  for (const auto& s : r.pareto) pareto.push_back(solution_to_json(s, r.variant));
  json feasible = json::array();
  for (const auto& s : r.feasible) feasible.push_back(solution_to_json(s, r.variant));
  const auto& scale = doc.morphology.scale;
  std::vector<int> top(scale.levels, 0);
  top[0] = r.variant == 1 ? static_cast<int>(doc.morphology.parts.size()) : scale.eta;
  json out{{"variant", r.variant},
           {"composites", r.composites},
           {"feasible_count", r.feasible.size()},
           {"feasible", feasible},
           {"pareto", pareto},
           {"ideal", {{"w", r.variant == 3 ? 1 : doc.compatibility.top}, {"e_height", lattice_height(top)}}}};
  if (r.feasible.empty()) out["verdict"] = "no feasible composite";
  return out;
}

}  // namespace mcrank::io
