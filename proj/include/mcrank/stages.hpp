#pragma once

// Local techniques of the stage morphology:
//   H  relation builders      (H1 judgments, H2 Pareto, H3 outranking)
//   T  linear-order builders  (T1 row sums, T2 additive utility)
//   U  layering procedures    (U1..U5)
//   X  aggregators            (X1 vote, X2 capacitated assignment)
// plus fuzzification of several layered rankings.

#include <algorithm>
#include <cstdlib>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "mcrank/assignment.hpp"
#include "mcrank/core_model.hpp"

namespace mcrank {

struct ElectreParams {
  std::vector<Rational> weights;
  Rational concordance{1};  // p
  Rational discordance{1};  // q

  friend bool operator==(const ElectreParams&, const ElectreParams&) = default;
};

struct Threshold {
  int criterion = 1;
  Rational min{0};

  friend bool operator==(const Threshold&, const Threshold&) = default;
};

struct Rule {
  std::vector<Threshold> conditions;  // conjunction
  int layer = 1;

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct RuleSet {
  std::vector<Rule> rules;  // first match wins
  int default_layer = 1;

  friend bool operator==(const RuleSet&, const RuleSet&) = default;
};

struct LayerCapacities {
  std::vector<int> capacities;

  friend bool operator==(const LayerCapacities&, const LayerCapacities&) = default;
};

// ---------------------------------------------------------------- H stage

inline PreferenceRelation h1_judgment_relation(int n, const JudgmentSet& judgments) {
  PreferenceRelation g(n);
  for (const auto& j : judgments.list()) {
    if (j.a < 1 || j.b > n) {
      throw Error("judgment references unknown alternative in pair (" + std::to_string(j.a) +
                  "," + std::to_string(j.b) + ")");
    }
    if (j.verdict == Verdict::a_better) g.add(j.a, j.b);
    if (j.verdict == Verdict::b_better) g.add(j.b, j.a);
  }
  return g;
}

/// Direction-adjusted weak componentwise dominance with at least one strict.
inline bool pareto_dominates(const EstimateMatrix& m, AltId a, AltId b) {
  bool strict = false;
  for (int j = 1; j <= m.d(); ++j) {
    auto za = m.oriented(a, j);
    auto zb = m.oriented(b, j);
    if (za < zb) return false;
    if (za > zb) strict = true;
  }
  return strict;
}

inline PreferenceRelation h2_pareto_relation(const EstimateMatrix& m) {
  PreferenceRelation g(m.n());
  for (AltId a = 1; a <= m.n(); ++a) {
    for (AltId b = 1; b <= m.n(); ++b) {
      if (a != b && pareto_dominates(m, a, b)) g.add(a, b);
    }
  }
  return g;
}

/// Share of total weight on criteria where a is at least as good as b.
inline Rational concordance(const EstimateMatrix& m, std::span<const Rational> weights,
                            AltId a, AltId b) {
  Rational total{0}, agree{0};
  for (int j = 1; j <= m.d(); ++j) {
    total += weights[j - 1];
    if (m.oriented(a, j) >= m.oriented(b, j)) agree += weights[j - 1];
  }
  if (total == Rational(0)) throw Error("outranking needs a positive total weight");
  return agree / total;
}

/// Largest shortfall of a against b, relative to the widest criterion scale.
inline Rational discordance(const EstimateMatrix& m, AltId a, AltId b) {
  int range = 0;
  for (const auto& c : m.criteria()) range = std::max(range, c.scale_max - c.scale_min);
  if (range == 0) return Rational(0);
  Rational worst{0};
  for (int j = 1; j <= m.d(); ++j) {
    worst = std::max(worst, m.oriented(b, j) - m.oriented(a, j));
  }
  return worst / Rational(range);
}

inline PreferenceRelation h3_electre_relation(const EstimateMatrix& m, const ElectreParams& p) {
  if (static_cast<int>(p.weights.size()) != m.d()) {
    throw Error("outranking needs one weight per criterion");
  }
  Rational total{0};
  for (const auto& w : p.weights) {
    if (w < 0) throw Error("outranking weights must be nonnegative");
    total += w;
  }
  if (total == Rational(0)) throw Error("outranking needs a positive total weight");
  PreferenceRelation g(m.n());
  for (AltId a = 1; a <= m.n(); ++a) {
    for (AltId b = 1; b <= m.n(); ++b) {
      if (a == b) continue;
      if (concordance(m, p.weights, a, b) >= p.concordance &&
          discordance(m, a, b) <= p.discordance) {
        g.add(a, b);
      }
    }
  }
  return g;
}

// ---------------------------------------------------------------- T stage

namespace detail {

template <typename Score>
LinearOrder order_by_descending(const std::vector<Score>& score) {
  std::vector<AltId> seq(score.size());
  std::iota(seq.begin(), seq.end(), 1);
  std::stable_sort(seq.begin(), seq.end(),
                   [&](AltId a, AltId b) { return score[a - 1] > score[b - 1]; });
  return LinearOrder(std::move(seq));
}

}  // namespace detail

/// Descending out-degree, ties by ascending id.
inline LinearOrder t1_row_sum_order(const PreferenceRelation& g) {
  std::vector<int> score(g.n());
  for (AltId a = 1; a <= g.n(); ++a) score[a - 1] = g.out_degree(a);
  return detail::order_by_descending(score);
}

/// Descending weighted sum of direction-adjusted scores, ties by ascending id.
inline LinearOrder t2_additive_utility_order(const EstimateMatrix& m,
                                             std::span<const Rational> weights) {
  if (static_cast<int>(weights.size()) != m.d()) {
    throw Error("additive utility needs one weight per criterion");
  }
  std::vector<Rational> score(m.n(), Rational(0));
  for (AltId a = 1; a <= m.n(); ++a) {
    for (int j = 1; j <= m.d(); ++j) score[a - 1] += weights[j - 1] * m.oriented(a, j);
  }
  return detail::order_by_descending(score);
}

inline LinearOrder t2_additive_utility_order(const EstimateMatrix& m) {
  std::vector<Rational> w;
  for (const auto& c : m.criteria()) w.push_back(c.weight);
  return t2_additive_utility_order(m, w);
}

// ---------------------------------------------------------------- U stage

/// Repeatedly peels the nodes with no incoming edge from the remaining
/// condensation; strongly connected members share a layer.
inline LayeredRanking u1_maximal_layers(const PreferenceRelation& g) {
  auto c = condense(g);
  const int nodes = c.relation.n();
  std::vector<int> indegree(nodes + 1, 0);
  auto adj = c.relation.successors();
  for (const auto& [a, b] : c.relation.edges()) ++indegree[b];

  std::vector<std::vector<AltId>> layers;
  std::vector<int> frontier;
  for (int v = 1; v <= nodes; ++v) {
    if (indegree[v] == 0) frontier.push_back(v);
  }
  while (!frontier.empty()) {
    std::vector<AltId> layer;
    std::vector<int> next;
    for (int v : frontier) {
      layer.insert(layer.end(), c.members[v - 1].begin(), c.members[v - 1].end());
      for (int w : adj[v]) {
        if (--indegree[w] == 0) next.push_back(w);
      }
    }
    layers.push_back(std::move(layer));
    std::sort(next.begin(), next.end());
    frontier = std::move(next);
  }
  return LayeredRanking(std::move(layers));
}

/// Repeatedly removes the Pareto frontier of the remaining alternatives.
inline LayeredRanking u2_pareto_layers(const EstimateMatrix& m) {
  std::vector<AltId> remaining(m.n());
  std::iota(remaining.begin(), remaining.end(), 1);
  std::vector<std::vector<AltId>> layers;
  while (!remaining.empty()) {
    std::vector<AltId> front, rest;
    for (AltId a : remaining) {
      bool dominated = std::any_of(remaining.begin(), remaining.end(),
                                   [&](AltId b) { return pareto_dominates(m, b, a); });
      (dominated ? rest : front).push_back(a);
    }
    layers.push_back(std::move(front));
    remaining = std::move(rest);
  }
  return LayeredRanking(std::move(layers));
}

/// Consecutive slices of the order of the given sizes.
inline LayeredRanking u3_divide_linear(const LinearOrder& order, std::span<const int> sizes) {
  int total = 0;
  for (int s : sizes) {
    if (s <= 0) throw Error("layer sizes must be positive");
    total += s;
  }
  if (total != order.n()) {
    throw Error("layer sizes sum to " + std::to_string(total) + " but there are " +
                std::to_string(order.n()) + " alternatives");
  }
  std::vector<std::vector<AltId>> layers;
  auto it = order.sequence().begin();
  for (int s : sizes) {
    layers.emplace_back(it, it + s);
    it += s;
  }
  return LayeredRanking(std::move(layers));
}

/// Expert layer assignment; unused layer indices are compressed away.
inline LayeredRanking u4_expert_layers(int n, const std::map<AltId, int>& assignment, int m) {
  std::vector<int> layer_of(n, 0);
  for (const auto& [a, k] : assignment) {
    if (a < 1 || a > n) throw Error("assignment for unknown alternative " + std::to_string(a));
    if (k < 1 || k > m) {
      throw Error("layer " + std::to_string(k) + " outside 1.." + std::to_string(m));
    }
    layer_of[a - 1] = k;
  }
  for (AltId a = 1; a <= n; ++a) {
    if (layer_of[a - 1] == 0) throw Error("missing layer assignment for alternative " + std::to_string(a));
  }
  return LayeredRanking::from_assignment(layer_of);
}

inline bool rule_matches(const EstimateMatrix& m, AltId a, const Rule& rule) {
  return std::all_of(rule.conditions.begin(), rule.conditions.end(), [&](const Threshold& t) {
    return m.z(a, t.criterion) >= t.min;
  });
}

inline void validate_rules(const EstimateMatrix& m, const RuleSet& r) {
  if (r.default_layer < 1) throw Error("default layer must be positive");
  for (const auto& rule : r.rules) {
    if (rule.layer < 1) throw Error("rule target layer must be positive");
    for (const auto& t : rule.conditions) {
      if (t.criterion < 1 || t.criterion > m.d()) {
        throw Error("rule references unknown criterion " + std::to_string(t.criterion));
      }
    }
  }
}

/// First matching rule decides the layer; the default layer catches the rest.
inline LayeredRanking u5_logical_layers(const EstimateMatrix& m, const RuleSet& r) {
  validate_rules(m, r);
  std::vector<int> layer_of(m.n(), r.default_layer);
  for (AltId a = 1; a <= m.n(); ++a) {
    for (const auto& rule : r.rules) {
      if (rule_matches(m, a, rule)) {
        layer_of[a - 1] = rule.layer;
        break;
      }
    }
  }
  return LayeredRanking::from_assignment(layer_of);
}

// ---------------------------------------------------------------- X stage

namespace detail {

inline int shared_size(std::span<const LayeredRanking> rs) {
  if (rs.empty()) throw Error("aggregation needs at least one ranking");
  for (const auto& r : rs) {
    if (r.n() != rs.front().n()) throw Error("rankings cover different alternative sets");
  }
  return rs.front().n();
}

}  // namespace detail

/// Plurality of layer indices per alternative; ties go to the worse index.
inline LayeredRanking x1_election_aggregate(std::span<const LayeredRanking> rs) {
  const int n = detail::shared_size(rs);
  std::vector<std::vector<int>> index;
  for (const auto& r : rs) index.push_back(r.layer_index());
  std::vector<int> layer_of(n, 0);
  for (int i = 0; i < n; ++i) {
    std::map<int, int> votes;
    for (const auto& idx : index) ++votes[idx[i]];
    int best = 0, best_votes = -1;
    for (const auto& [k, v] : votes) {
      if (v >= best_votes) {  // ascending k, so >= favours the worse layer
        best = k;
        best_votes = v;
      }
    }
    layer_of[i] = best;
  }
  return LayeredRanking::from_assignment(layer_of);
}

/// Rows to groups with per-group capacities at minimum total cost. Among
/// optimal assignments returns the lexicographically smallest group vector.
inline std::vector<int> capacitated_assignment(const std::vector<std::vector<std::int64_t>>& cost,
                                               std::vector<int> capacities) {
  const int rows = static_cast<int>(cost.size());
  const int groups = static_cast<int>(capacities.size());

  auto solve_rest = [&](int first_row, const std::vector<int>& caps) {
    std::vector<int> slot_group;
    for (int k = 0; k < groups; ++k) {
      for (int s = 0; s < caps[k]; ++s) slot_group.push_back(k);
    }
    std::vector<std::vector<std::int64_t>> expanded;
    for (int i = first_row; i < rows; ++i) {
      std::vector<std::int64_t> row;
      for (int k : slot_group) row.push_back(cost[i][k]);
      expanded.push_back(std::move(row));
    }
    return solve_assignment(expanded).cost;
  };

  const auto optimum = solve_rest(0, capacities);
  std::vector<int> group_of(rows, -1);
  std::int64_t fixed = 0;
  for (int i = 0; i < rows; ++i) {
    for (int k = 0; k < groups; ++k) {
      if (capacities[k] == 0) continue;
      --capacities[k];
      if (fixed + cost[i][k] + solve_rest(i + 1, capacities) == optimum) {
        group_of[i] = k;
        fixed += cost[i][k];
        break;
      }
      ++capacities[k];
    }
  }
  return group_of;
}

/// Capacity-constrained consensus: alternative a in layer k costs
/// sum over inputs of |k - layer_input(a)|.
inline LayeredRanking x2_knapsack_aggregate(std::span<const LayeredRanking> rs,
                                            const LayerCapacities& caps) {
  const int n = detail::shared_size(rs);
  int total = 0;
  for (int c : caps.capacities) {
    if (c <= 0) throw Error("layer capacities must be positive");
    total += c;
  }
  if (total < n) {
    throw Error("layer capacities hold " + std::to_string(total) + " of " +
                std::to_string(n) + " alternatives");
  }
  std::vector<std::vector<int>> index;
  for (const auto& r : rs) index.push_back(r.layer_index());
  const int m = static_cast<int>(caps.capacities.size());
  std::vector<std::vector<std::int64_t>> cost(n, std::vector<std::int64_t>(m, 0));
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < m; ++k) {
      for (const auto& idx : index) cost[i][k] += std::abs(k + 1 - idx[i]);
    }
  }
  auto group_of = capacitated_assignment(cost, caps.capacities);
  return LayeredRanking::from_assignment(group_of);
}

/// Interval [min, max] of each alternative's layer index across inputs.
inline FuzzyRanking fuzzify(std::span<const LayeredRanking> rs) {
  const int n = detail::shared_size(rs);
  const int m = rs.front().m();
  for (const auto& r : rs) {
    if (r.m() != m) throw Error("fuzzify needs rankings with equal layer counts");
  }
  std::vector<PriorityInterval> intervals(n, PriorityInterval{m, 1});
  for (const auto& r : rs) {
    auto idx = r.layer_index();
    for (int i = 0; i < n; ++i) {
      intervals[i].lo = std::min(intervals[i].lo, idx[i]);
      intervals[i].hi = std::max(intervals[i].hi, idx[i]);
    }
  }
  return FuzzyRanking(std::move(intervals), m);
}

}  // namespace mcrank
