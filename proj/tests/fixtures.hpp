#pragma once

// Shared fixtures and brute-force oracles for the test suites. Oracles here
// deliberately avoid the library's algorithms they are used to check.

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "mcrank/hmmd.hpp"
#include "mcrank/multiset.hpp"
#include "mcrank/stages.hpp"

namespace fixtures {

using namespace mcrank;

/// Nine alternatives on two criteria, scale [0,4], 4 best.
inline EstimateMatrix nine_alternatives() {
  return EstimateMatrix::from_scores(
      {{2, 3}, {2, 4}, {1, 3}, {4, 4}, {1, 1}, {4, 3}, {2, 2}, {0, 2}, {2, 1}}, 0, 4);
}

/// Local techniques with their interval estimates over P(3,4) and the
/// pairwise compatibility table of the series-strategy morphology.
inline std::pair<Morphology, CompatibilitySpec> series_morphology() {
  auto da = [](std::string name, std::optional<MultisetEstimate> e, bool compat = true) {
    DesignAlternative d;
    d.name = std::move(name);
    d.estimate = e;
    d.contributes_estimate = e.has_value();
    d.contributes_compatibility = compat;
    return d;
  };
  Morphology m;
  m.scale = {3, 4};
  m.parts = {
      {"H", {da("H0", std::nullopt), da("H1", MultisetEstimate{4, 0, 0}),
             da("H2", MultisetEstimate{3, 1, 0}), da("H3", MultisetEstimate{3, 1, 0})}},
      {"T", {da("T0", std::nullopt, false), da("T1", MultisetEstimate{1, 2, 1}),
             da("T2", MultisetEstimate{2, 2, 0})}},
      {"U", {da("U1", MultisetEstimate{2, 2, 0}), da("U2", MultisetEstimate{4, 0, 0}),
             da("U3", MultisetEstimate{0, 1, 3}), da("U4", MultisetEstimate{2, 2, 0}),
             da("U5", MultisetEstimate{3, 1, 0})}},
      {"X", {da("X0", MultisetEstimate{0, 4, 0}, false)}},
  };
  CompatibilitySpec c;
  c.mode = CompatibilityMode::ordinal;
  c.top = 3;
  const std::vector<std::string> cols{"T0", "T1", "T2", "U1", "U2", "U3", "U4", "U5", "X0"};
  const std::map<std::string, std::vector<int>> rows{
      {"H0", {3, 3, 3, 0, 0, 0, 3, 3, 0}},
      {"H1", {0, 1, 0, 2, 2, 0, 0, 0, 3}},
      {"H2", {0, 1, 0, 3, 3, 0, 0, 0, 3}},
      {"H3", {0, 1, 0, 3, 3, 0, 0, 0, 3}},
  };
  for (const auto& [row, vals] : rows) {
    for (std::size_t i = 0; i < cols.size(); ++i) c.set(row, cols[i], vals[i]);
  }
  const std::map<std::string, std::vector<int>> t_rows{
      {"T0", {0, 0, 0, 3, 3, 0}},
      {"T1", {0, 0, 2, 0, 0, 3}},
      {"T2", {0, 0, 2, 0, 0, 3}},
  };
  for (const auto& [row, vals] : t_rows) {
    for (std::size_t i = 0; i < 6; ++i) c.set(row, cols[3 + i], vals[i]);
  }
  for (const auto* u : {"U1", "U2", "U3", "U4", "U5"}) c.set(u, "X0", 3);
  return {m, c};
}

// ------------------------------------------------------------ oracles

/// One-step moves between multisets of equal cardinality: shift one element
/// to the adjacent better level (improvement) or worse level (degradation).
inline std::vector<std::pair<std::vector<int>, bool>> one_step_moves(const std::vector<int>& c) {
  std::vector<std::pair<std::vector<int>, bool>> out;
  for (std::size_t t = 0; t + 1 < c.size(); ++t) {
    if (c[t + 1] > 0) {  // improvement: level t+2 -> t+1
      auto n = c;
      --n[t + 1];
      ++n[t];
      out.push_back({n, true});
    }
    if (c[t] > 0) {  // degradation
      auto n = c;
      --n[t];
      ++n[t + 1];
      out.push_back({n, false});
    }
  }
  return out;
}

/// BFS over one-step moves; returns (improvements, degradations) along a
/// shortest path.
inline std::pair<int, int> bfs_proximity(const std::vector<int>& from, const std::vector<int>& to) {
  std::map<std::vector<int>, std::pair<int, int>> seen{{from, {0, 0}}};
  std::deque<std::vector<int>> queue{from};
  while (!queue.empty()) {
    auto cur = queue.front();
    queue.pop_front();
    if (cur == to) return seen[cur];
    for (const auto& [next, improve] : one_step_moves(cur)) {
      if (seen.count(next)) continue;
      auto d = seen[cur];
      (improve ? d.first : d.second) += 1;
      seen[next] = d;
      queue.push_back(next);
    }
  }
  return {-1, -1};
}

/// a dominates-or-equals b iff b is reachable from a by degradations only.
inline bool reachable_by_degradations(const std::vector<int>& a, const std::vector<int>& b) {
  std::set<std::vector<int>> seen{a};
  std::deque<std::vector<int>> queue{a};
  while (!queue.empty()) {
    auto cur = queue.front();
    queue.pop_front();
    if (cur == b) return true;
    for (const auto& [next, improve] : one_step_moves(cur)) {
      if (!improve && seen.insert(next).second) queue.push_back(next);
    }
  }
  return false;
}

/// Interval multisets of P(l, eta) by brute force over all count vectors.
inline std::vector<std::vector<int>> brute_interval_estimates(int l, int eta) {
  std::vector<std::vector<int>> out;
  std::vector<int> c(l, 0);
  std::function<void(int)> rec = [&](int pos) {
    if (pos == l) {
      int sum = 0;
      for (int x : c) sum += x;
      if (sum != eta) return;
      int first = -1, last = -1;
      for (int i = 0; i < l; ++i) {
        if (c[i] > 0) {
          if (first < 0) first = i;
          last = i;
        }
      }
      for (int i = first; i <= last; ++i) {
        if (c[i] == 0) return;
      }
      out.push_back(c);
      return;
    }
    for (int v = 0; v <= eta; ++v) {
      c[pos] = v;
      rec(pos + 1);
    }
  };
  rec(0);
  return out;
}

/// Exhaustive generalized median with BFS distances and the tie-break:
/// maximal under degradation-reachability, then lexicographically greatest.
inline std::vector<int> oracle_median(const std::vector<std::vector<int>>& es,
                                      const std::vector<std::vector<int>>& universe) {
  int best = -1;
  std::vector<std::vector<int>> ties;
  for (const auto& cand : universe) {
    int cost = 0;
    for (const auto& e : es) {
      auto [im, dg] = bfs_proximity(cand, e);
      cost += im + dg;
    }
    if (best < 0 || cost < best) {
      best = cost;
      ties = {cand};
    } else if (cost == best) {
      ties.push_back(cand);
    }
  }
  std::vector<std::vector<int>> maximal;
  for (const auto& x : ties) {
    bool dominated = false;
    for (const auto& y : ties) {
      if (y != x && reachable_by_degradations(y, x)) dominated = true;
    }
    if (!dominated) maximal.push_back(x);
  }
  return *std::max_element(maximal.begin(), maximal.end());
}

/// Layers by repeatedly removing alternatives no remaining one dominates,
/// with dominance evaluated inline from the raw scores.
inline std::vector<std::vector<int>> brute_frontier_layers(const std::vector<std::vector<int>>& rows) {
  auto dom = [&](int a, int b) {
    bool strict = false;
    for (std::size_t j = 0; j < rows[a].size(); ++j) {
      if (rows[a][j] < rows[b][j]) return false;
      if (rows[a][j] > rows[b][j]) strict = true;
    }
    return strict;
  };
  std::vector<int> remaining(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) remaining[i] = static_cast<int>(i);
  std::vector<std::vector<int>> layers;
  while (!remaining.empty()) {
    std::vector<int> front, rest;
    for (int a : remaining) {
      bool beaten = false;
      for (int b : remaining) beaten = beaten || dom(b, a);
      if (beaten) {
        rest.push_back(a);
      } else {
        front.push_back(a + 1);
      }
    }
    layers.push_back(front);
    remaining = rest;
  }
  return layers;
}

/// Exhaustive search over all assignments of n rows to groups respecting
/// capacities; returns the lexicographically smallest optimal group vector.
inline std::vector<int> brute_capacitated(const std::vector<std::vector<std::int64_t>>& cost,
                                          const std::vector<int>& caps) {
  const int n = static_cast<int>(cost.size());
  const int m = static_cast<int>(caps.size());
  std::vector<int> cur(n, 0), best;
  std::int64_t best_cost = -1;
  std::function<void(int, std::vector<int>&, std::int64_t)> rec = [&](int i, std::vector<int>& left,
                                                                      std::int64_t acc) {
    if (i == n) {
      if (best_cost < 0 || acc < best_cost) {  // lexicographic order of visit keeps the first optimum
        best_cost = acc;
        best = cur;
      }
      return;
    }
    for (int k = 0; k < m; ++k) {
      if (left[k] == 0) continue;
      --left[k];
      cur[i] = k;
      rec(i + 1, left, acc + cost[i][k]);
      ++left[k];
    }
  };
  auto left = caps;
  rec(0, left, 0);
  return best;
}

/// Double-loop Pareto oracle with its own cumulative comparison.
inline std::vector<std::size_t> brute_pareto(const std::vector<QualityPoint>& qs) {
  auto weakly_better = [](const std::vector<int>& a, const std::vector<int>& b) {
    int ca = 0, cb = 0;
    for (std::size_t t = 0; t + 1 < a.size(); ++t) {
      ca += a[t];
      cb += b[t];
      if (ca < cb) return false;
    }
    return true;
  };
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < qs.size(); ++j) {
      if (i == j) continue;
      const auto& a = qs[j];
      const auto& b = qs[i];
      bool ge = a.w >= b.w && (a.e == b.e || weakly_better(a.e, b.e));
      bool strict = a.w > b.w || (a.e != b.e && weakly_better(a.e, b.e) && !weakly_better(b.e, a.e));
      if (ge && strict) dominated = true;
    }
    if (!dominated) keep.push_back(i);
  }
  return keep;
}

inline std::vector<std::vector<int>> random_rows(std::mt19937& rng, int n, int d, int hi) {
  std::uniform_int_distribution<int> v(0, hi);
  std::vector<std::vector<int>> rows(n, std::vector<int>(d));
  for (auto& r : rows) {
    for (auto& x : r) x = v(rng);
  }
  return rows;
}

/// Random synthesis instance over P(3,4): every DA compatibility-active and
/// estimate-bearing, ordinal and multiset compatibility tables both filled.
inline std::pair<Morphology, CompatibilitySpec> random_morphology(std::mt19937& rng) {
  auto scale = enumerate_scale({3, 4});
  std::uniform_int_distribution<int> parts(1, 4), das(1, 5), w(0, 3);
  std::uniform_int_distribution<std::size_t> pick(0, scale.size() - 1);
  Morphology m;
  m.scale = {3, 4};
  CompatibilitySpec c;
  c.mode = CompatibilityMode::ordinal;
  c.top = 3;
  const int p = parts(rng);
  for (int i = 0; i < p; ++i) {
    Part part;
    part.name = "R" + std::to_string(i + 1);
    const int k = das(rng);
    for (int j = 0; j < k; ++j) {
      DesignAlternative d;
      d.name = part.name + "." + std::to_string(j + 1);
      d.estimate = scale[pick(rng)];
      part.alternatives.push_back(d);
    }
    m.parts.push_back(part);
  }
  for (std::size_t a = 0; a < m.parts.size(); ++a) {
    for (std::size_t b = a + 1; b < m.parts.size(); ++b) {
      for (const auto& x : m.parts[a].alternatives) {
        for (const auto& y : m.parts[b].alternatives) {
          c.set(x.name, y.name, w(rng));
          c.set(x.name, y.name, scale[pick(rng)]);
        }
      }
    }
  }
  return {m, c};
}

}  // namespace fixtures
