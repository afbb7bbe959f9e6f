#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mcrank/strategy.hpp"

using namespace mcrank;
using Layers = std::vector<std::vector<AltId>>;

namespace {

Branch branch(const std::string& h, const std::string& t, const std::string& u, StageParams up = {}) {
  return {choice(h), choice(t), choice(u, std::move(up))};
}

StageParams sizes(std::vector<int> s) {
  StageParams p;
  p.sizes = std::move(s);
  return p;
}

StageParams rules_top_only() {
  StageParams p;
  p.rules = RuleSet{{{{{1, Rational(4)}, {2, Rational(4)}}, 1}, {{{1, Rational(2)}}, 2}}, 3};
  return p;
}

StrategySpec single(Branch b, Target target = Target::layered) { return {{std::move(b)}, choice("X0"), target}; }

const ExecutionTrace& done(const ExecutionOutcome& o) {
  EXPECT_TRUE(std::holds_alternative<ExecutionTrace>(o));
  return std::get<ExecutionTrace>(o);
}

const LayeredRanking& layered(const ExecutionOutcome& o) { return std::get<LayeredRanking>(done(o).result); }

bool is_partition(const LayeredRanking& r, int n) {
  std::vector<int> seen(n + 1, 0);
  for (const auto& layer : r.layers()) {
    if (layer.empty()) return false;
    for (AltId a : layer) {
      if (a < 1 || a > n || seen[a]++) return false;
    }
  }
  return std::count(seen.begin() + 1, seen.end(), 1) == n && r.m() <= n;
}

}  // namespace

// ---------------------------------------------------------------- validation

TEST(ValidateStrategy, TypingExamples) {
  EXPECT_TRUE(validate_strategy(single(branch("H1", "T0", "U2"))).empty());
  EXPECT_FALSE(validate_strategy(single(branch("H0", "T0", "U3", sizes({9})))).empty());
  EXPECT_TRUE(validate_strategy(single({choice("H0"), choice("T0"), choice("U5", rules_top_only())})).empty());
}

TEST(ValidateStrategy, ConsumersNeedProducers) {
  EXPECT_FALSE(validate_strategy(single(branch("H0", "T1", "U2"))).empty());
  EXPECT_FALSE(validate_strategy(single(branch("H0", "T2", "U1"))).empty());
  EXPECT_TRUE(validate_strategy(single(branch("H2", "T1", "U3", sizes({1, 2, 3, 3})))).empty());
  EXPECT_TRUE(validate_strategy(single(branch("H0", "T2", "U3", sizes({1, 2, 3, 3})))).empty());
  EXPECT_FALSE(validate_strategy(single(branch("H2", "T0", "U5"))).empty());
  EXPECT_FALSE(validate_strategy(single(branch("H0", "T0", "U4"))).empty());
}

TEST(ValidateStrategy, BranchCountAndAggregator) {
  StrategySpec empty{{}, choice("X0"), Target::layered};
  EXPECT_FALSE(validate_strategy(empty).empty());
  StrategySpec two{{branch("H2", "T0", "U2"), branch("H0", "T0", "U2")}, choice("X0"), Target::layered};
  EXPECT_FALSE(validate_strategy(two).empty());
  two.aggregator = choice("X1");
  EXPECT_TRUE(validate_strategy(two).empty());
  two.aggregator = choice("X2");
  EXPECT_FALSE(validate_strategy(two).empty());
  StageParams caps;
  caps.capacities = LayerCapacities{{3, 3, 3}};
  two.aggregator = choice("X2", caps);
  EXPECT_TRUE(validate_strategy(two).empty());
}

TEST(ValidateStrategy, TargetRules) {
  EXPECT_TRUE(validate_strategy(single(branch("H2", "T1", "U0"), Target::linear)).empty());
  EXPECT_FALSE(validate_strategy(single(branch("H2", "T0", "U0"), Target::linear)).empty());
  EXPECT_FALSE(validate_strategy(single(branch("H2", "T0", "U0"))).empty());
  EXPECT_FALSE(validate_strategy(single(branch("H2", "T0", "U2"), Target::fuzzy)).empty());
  StrategySpec fuzzy{{branch("H2", "T0", "U2"), branch("H0", "T0", "U2")}, choice("X0"), Target::fuzzy};
  EXPECT_TRUE(validate_strategy(fuzzy).empty());
}

TEST(ValidateStrategy, DiagnosticsNameTheBranch) {
  StrategySpec s{{branch("H2", "T0", "U2"), branch("H0", "T0", "U1")}, choice("X1"), Target::layered};
  auto report = validate_strategy(s);
  ASSERT_EQ(report.size(), 1u);
  EXPECT_EQ(report[0].branch, 1);
}

TEST(Technique, Codes) {
  EXPECT_EQ(parse_technique("U3").code(), "U3");
  EXPECT_THROW(parse_technique("H4"), Error);
  EXPECT_THROW(parse_technique("T6"), Error);
  EXPECT_THROW(parse_technique("Q1"), Error);
  EXPECT_THROW(parse_technique("U"), Error);
}

// ---------------------------------------------------------------- execution

TEST(Execute, ParetoLayeringOfNineAlternatives) {
  auto out = execute(single(branch("H2", "T0", "U2")), fixtures::nine_alternatives());
  EXPECT_EQ(layered(out).layers(), (Layers{{4}, {2, 6}, {1}, {3, 7}, {8, 9}, {5}}));
}

TEST(Execute, TwoStageSeriesReproducesDivision) {
  auto out = execute(single(branch("H0", "T2", "U3", sizes({1, 2, 3, 3}))), fixtures::nine_alternatives());
  EXPECT_EQ(layered(out).layers(), (Layers{{4}, {2, 6}, {1, 3, 7}, {5, 8, 9}}));
  const auto& tr = done(out).branches.at(0);
  EXPECT_FALSE(tr.relation.has_value());
  ASSERT_TRUE(tr.order.has_value());
  EXPECT_EQ(tr.order->sequence(), (std::vector<AltId>{4, 6, 2, 1, 3, 7, 9, 5, 8}));
}

TEST(Execute, RowSumOrderDivision) {
  auto out = execute(single(branch("H2", "T1", "U3", sizes({1, 2, 3, 3}))), fixtures::nine_alternatives());
  EXPECT_EQ(layered(out).layers(), (Layers{{4}, {2, 6}, {1, 3, 7}, {5, 8, 9}}));
  const auto& tr = done(out).branches.at(0);
  EXPECT_TRUE(tr.relation && tr.order && tr.preliminary);
}

TEST(Execute, LinearTargetReturnsOrder) {
  auto out = execute(single(branch("H2", "T1", "U0"), Target::linear), fixtures::nine_alternatives());
  EXPECT_EQ(std::get<LinearOrder>(done(out).result).sequence(), (std::vector<AltId>{4, 2, 6, 1, 7, 3, 9, 5, 8}));
}

TEST(Execute, InvalidStrategyThrows) {
  EXPECT_THROW(execute(single(branch("H0", "T0", "U1")), fixtures::nine_alternatives()), Error);
}

TEST(Execute, ParallelBranchesMatchDirectAggregation) {
  auto m = fixtures::nine_alternatives();
  StrategySpec s{{branch("H2", "T1", "U3", sizes({2, 2, 2, 3})), branch("H0", "T2", "U3", sizes({1, 2, 3, 3})),
                  branch("H3", "T0", "U1")},
                 choice("X1"),
                 Target::layered};
  auto out = execute(s, m);
  const auto& tr = done(out);
  std::vector<LayeredRanking> outputs;
  for (const auto& b : tr.branches) outputs.push_back(*b.preliminary);
  EXPECT_EQ(std::get<LayeredRanking>(tr.result), x1_election_aggregate(outputs));
  EXPECT_EQ(outputs[0], u3_divide_linear(t1_row_sum_order(h2_pareto_relation(m)), std::vector<int>{2, 2, 2, 3}));
}

TEST(Execute, FuzzyTargetMergesBranchIntervals) {
  StrategySpec s{{branch("H0", "T2", "U3", sizes({2, 2, 2, 3})), branch("H0", "T2", "U3", sizes({1, 2, 3, 3}))},
                 choice("X0"),
                 Target::fuzzy};
  auto out = execute(s, fixtures::nine_alternatives());
  const auto& f = std::get<FuzzyRanking>(done(out).result);
  EXPECT_EQ(f.m(), 4);
  EXPECT_EQ(f.interval(6), (PriorityInterval{1, 2}));
  EXPECT_EQ(f.interval(1), (PriorityInterval{2, 3}));
  EXPECT_EQ(f.interval(3), (PriorityInterval{3, 3}));
  EXPECT_EQ(f.interval(4), (PriorityInterval{1, 1}));
}

TEST(Execute, SuspendsOnMissingJudgments) {
  auto m = fixtures::nine_alternatives();
  auto out = execute(single(branch("H1", "T1", "U1")), m);
  ASSERT_TRUE(std::holds_alternative<ExpertRequest>(out));
  auto req = std::get<ExpertRequest>(out);
  EXPECT_EQ(req.kind, ExpertRequest::Kind::pair);
  EXPECT_EQ(req.source, "expert");
  EXPECT_EQ(std::make_pair(req.a, req.b), std::make_pair(1, 2));

  ExpertInputs partial;
  partial.judgments["expert"] = JudgmentSet({{1, 2, Verdict::a_better}, {1, 3, Verdict::a_better}});
  req = std::get<ExpertRequest>(execute(single(branch("H1", "T1", "U1")), m, partial));
  EXPECT_EQ(std::make_pair(req.a, req.b), std::make_pair(1, 4));

  partial.scripted = true;
  EXPECT_TRUE(std::holds_alternative<ExecutionTrace>(execute(single(branch("H1", "T1", "U1")), m, partial)));
}

TEST(Execute, SuspendsOnMissingLayerAssignment) {
  StageParams p;
  p.layers = 3;
  auto out = execute(single({choice("H0"), choice("T0"), choice("U4", p)}), fixtures::nine_alternatives());
  auto req = std::get<ExpertRequest>(out);
  EXPECT_EQ(req.kind, ExpertRequest::Kind::layer);
  EXPECT_EQ(req.a, 1);
  EXPECT_EQ(req.layers, 3);

  ExpertInputs in;
  in.scripted = true;
  in.assignments["expert"] = {{1, 2}, {2, 1}, {3, 2}, {4, 1}, {5, 3}, {6, 1}, {7, 2}, {8, 3}, {9, 3}};
  auto res = execute(single({choice("H0"), choice("T0"), choice("U4", p)}), fixtures::nine_alternatives(), in);
  EXPECT_EQ(layered(res).layers(), (Layers{{2, 4, 6}, {1, 3, 7}, {5, 8, 9}}));
}

TEST(Execute, ContradictoryJudgmentsCondenseIntoOneLayer) {
  ExpertInputs in;
  in.scripted = true;
  in.judgments["expert"] = JudgmentSet({{1, 2, Verdict::a_better},
                                        {2, 3, Verdict::a_better},
                                        {3, 1, Verdict::a_better},
                                        {4, 1, Verdict::a_better}});
  auto out = execute(single(branch("H1", "T0", "U1")), fixtures::nine_alternatives(), in);
  const auto& tr = done(out);
  EXPECT_EQ(tr.branches[0].contradictions, (Layers{{1, 2, 3}}));
  EXPECT_EQ(layered(out).layers(), (Layers{{4, 5, 6, 7, 8, 9}, {1, 2, 3}}));
}

TEST(Execute, DeterministicTraces) {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    auto m = EstimateMatrix::from_scores(fixtures::random_rows(rng, 7, 3, 4), 0, 4);
    StrategySpec s{{branch("H2", "T1", "U3", sizes({2, 2, 3})), branch("H3", "T2", "U3", sizes({3, 2, 2})),
                    branch("H0", "T0", "U2")},
                   choice("X1"),
                   Target::layered};
    EXPECT_EQ(execute(s, m), execute(s, m));
  }
}

TEST(Execute, SkippingOrderStageIsTransparentToU1) {
  std::mt19937 rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    auto m = EstimateMatrix::from_scores(fixtures::random_rows(rng, 8, 3, 3), 0, 3);
    auto e = instantiate(preset("E"), {branch("H2", "T1", "U1")}, choice("X0"));
    auto skipped = instantiate(preset("E"), {branch("H2", "T0", "U1")}, choice("X0"));
    EXPECT_EQ(layered(execute(e, m)), layered(execute(skipped, m)));
  }
}

// ---------------------------------------------------------------- presets

TEST(Preset, Templates) {
  EXPECT_EQ(preset("E").h, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(preset("E").x, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(preset("D1").u, (std::vector<int>{4}));
  EXPECT_EQ(preset("D1").h, (std::vector<int>{0}));
  EXPECT_EQ(preset("W3").u, (std::vector<int>{3}));
  EXPECT_THROW(preset("W6"), Error);
}

TEST(Preset, InstantiateRejectsForeignTechniques) {
  EXPECT_THROW(instantiate(preset("D1"), {branch("H2", "T0", "U4")}, choice("X0")), Error);
  EXPECT_THROW(instantiate(preset("W3"), {branch("H2", "T1", "U3"), branch("H2", "T1", "U3")}, choice("X0")),
               Error);
  EXPECT_NO_THROW(instantiate(preset("W3"), {branch("H2", "T1", "U3", sizes({9}))}, choice("X0")));
}

TEST(Preset, EveryAdmissibleSingleBranchBindingExecutesToAPartition) {
  auto m = fixtures::nine_alternatives();
  ExpertInputs in;
  in.scripted = true;
  in.judgments["expert"] = JudgmentSet({{4, 1, Verdict::a_better}, {2, 5, Verdict::a_better}});
  in.assignments["expert"] = {{1, 2}, {2, 1}, {3, 2}, {4, 1}, {5, 3}, {6, 1}, {7, 2}, {8, 3}, {9, 3}};
  StageParams caps;
  caps.capacities = LayerCapacities{{3, 3, 3}};

  int executed = 0;
  for (const auto& name : preset_names()) {
    auto tpl = preset(name);
    for (int h : tpl.h) {
      for (int t : tpl.t) {
        for (int u : tpl.u) {
          for (int x : tpl.x) {
            StageParams up;
            up.sizes = {1, 2, 3, 3};
            up.layers = 3;
            up.rules = rules_top_only().rules;
            Branch b{{{Stage::H, h}, {}}, {{Stage::T, t}, {}}, {{Stage::U, u}, up}};
            const int count = std::max(tpl.min_branches, x == 0 ? 1 : 2);
            if (count > tpl.max_branches) continue;
            std::vector<Branch> branches(count, b);
            StageChoice agg{{Stage::X, x}, x == 2 ? caps : StageParams{}};
            auto spec = instantiate(tpl, branches, agg);
            if (!validate_strategy(spec).empty()) continue;  // e.g. T1 without a relation
            auto out = execute(spec, m, in);
            ASSERT_TRUE(std::holds_alternative<ExecutionTrace>(out)) << name;
            EXPECT_TRUE(is_partition(layered(out), 9)) << name << " " << spec.branches[0].u.technique.code();
            ++executed;
          }
        }
      }
    }
  }
  EXPECT_GE(executed, 40);
}
