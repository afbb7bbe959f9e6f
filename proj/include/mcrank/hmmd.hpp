#pragma once

// Morphological combinatorial synthesis: pick one design alternative (DA)
// per system part, score the composite by N(S) = (w(S); e(S)) and keep the
// Pareto-efficient composites.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mcrank/multiset.hpp"

namespace mcrank {

struct DesignAlternative {
  std::string name;
  std::optional<int> priority;              // ordinal quality, 1 best (variant 1)
  std::optional<MultisetEstimate> estimate; // variants 2 and 3
  bool contributes_estimate = true;
  bool contributes_compatibility = true;

  friend bool operator==(const DesignAlternative&, const DesignAlternative&) = default;
};

struct Part {
  std::string name;
  std::vector<DesignAlternative> alternatives;

  friend bool operator==(const Part&, const Part&) = default;
};

struct Morphology {
  ScaleSpec scale;
  std::vector<Part> parts;

  friend bool operator==(const Morphology&, const Morphology&) = default;
};

enum class CompatibilityMode { ordinal, multiset };

/// Symmetric compatibility between DAs of different parts, keyed by DA name.
struct CompatibilitySpec {
  CompatibilityMode mode = CompatibilityMode::ordinal;
  int top = 3;  // nu, best ordinal compatibility
  std::map<std::pair<std::string, std::string>, int> ordinal;
  std::map<std::pair<std::string, std::string>, MultisetEstimate> multiset;
  std::optional<MultisetEstimate> w0;  // bottom bound in multiset mode

  static std::pair<std::string, std::string> key(const std::string& a, const std::string& b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  }
  void set(const std::string& a, const std::string& b, int w) { ordinal[key(a, b)] = w; }
  void set(const std::string& a, const std::string& b, MultisetEstimate w) {
    multiset[key(a, b)] = std::move(w);
  }

  friend bool operator==(const CompatibilitySpec&, const CompatibilitySpec&) = default;
};

/// DA index per part.
using Selection = std::vector<int>;

struct QualityPoint {
  int w = 0;
  std::vector<int> e;

  friend bool operator==(const QualityPoint&, const QualityPoint&) = default;
};

struct CompositeSolution {
  Selection selection;
  std::vector<std::string> names;
  QualityPoint quality;
  bool feasible = false;

  friend bool operator==(const CompositeSolution&, const CompositeSolution&) = default;
};

inline std::vector<std::string> validate_morphology(const Morphology& m) {
  std::vector<std::string> out;
  std::set<std::string> names;
  if (m.scale.levels < 1 || m.scale.eta < 1) out.push_back("scale requires l >= 1 and eta >= 1");
  for (const auto& part : m.parts) {
    if (part.alternatives.empty()) out.push_back("part " + part.name + " has no design alternatives");
    for (const auto& da : part.alternatives) {
      if (!names.insert(da.name).second) out.push_back("duplicate design alternative " + da.name);
      if (da.estimate && !da.contributes_estimate) {
        out.push_back(da.name + " carries an estimate but does not contribute one");
      }
      if (da.contributes_estimate && !da.estimate && !da.priority) {
        out.push_back(da.name + " contributes an estimate but carries none");
      }
      if (da.estimate && da.estimate->scale() != m.scale) {
        out.push_back(da.name + " estimate " + to_string(*da.estimate) + " is not on " + to_string(m.scale));
      }
      if (da.priority && (*da.priority < 1 || *da.priority > m.scale.levels)) {
        out.push_back(da.name + " priority outside 1.." + std::to_string(m.scale.levels));
      }
    }
  }
  return out;
}

inline std::vector<std::string> validate_compatibility(const Morphology& m, const CompatibilitySpec& c) {
  std::vector<std::string> out;
  std::map<std::string, std::size_t> part_of;
  for (std::size_t p = 0; p < m.parts.size(); ++p) {
    for (const auto& da : m.parts[p].alternatives) part_of[da.name] = p;
  }
  auto check_key = [&](const std::pair<std::string, std::string>& k) {
    auto a = part_of.find(k.first), b = part_of.find(k.second);
    if (a == part_of.end() || b == part_of.end()) {
      out.push_back("compatibility entry " + k.first + "-" + k.second + " names an unknown DA");
    } else if (a->second == b->second) {
      out.push_back("compatibility entry " + k.first + "-" + k.second + " joins DAs of one part");
    }
  };
  for (const auto& [k, w] : c.ordinal) {
    check_key(k);
    if (w < 0 || w > c.top) {
      out.push_back("compatibility " + k.first + "-" + k.second + " outside 0.." + std::to_string(c.top));
    }
  }
  for (const auto& [k, w] : c.multiset) {
    check_key(k);
    if (w.scale() != m.scale) out.push_back("compatibility " + k.first + "-" + k.second + " is off-scale");
  }
  if (c.w0 && c.w0->scale() != m.scale) out.push_back("w0 is off-scale");
  return out;
}

/// Cartesian product of the parts' DAs; the last part varies fastest.
inline std::vector<Selection> enumerate_composites(const Morphology& m) {
  for (const auto& part : m.parts) {
    if (part.alternatives.empty()) throw Error("part " + part.name + " has no design alternatives");
  }
  std::vector<Selection> out;
  if (m.parts.empty()) return out;
  Selection cur(m.parts.size(), 0);
  while (true) {
    out.push_back(cur);
    int p = static_cast<int>(m.parts.size()) - 1;
    while (p >= 0 && ++cur[p] == static_cast<int>(m.parts[p].alternatives.size())) {
      cur[p] = 0;
      --p;
    }
    if (p < 0) break;
  }
  return out;
}

namespace detail {

inline std::vector<const DesignAlternative*> selected(const Morphology& m, const Selection& sel) {
  if (sel.size() != m.parts.size()) throw Error("selection must pick one DA per part");
  std::vector<const DesignAlternative*> out;
  for (std::size_t p = 0; p < sel.size(); ++p) out.push_back(&m.parts[p].alternatives.at(sel[p]));
  return out;
}

inline std::vector<std::pair<std::string, std::string>> active_pairs(const Morphology& m, const Selection& sel) {
  auto das = selected(m, sel);
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < das.size(); ++i) {
    if (!das[i]->contributes_compatibility) continue;
    for (std::size_t j = i + 1; j < das.size(); ++j) {
      if (das[j]->contributes_compatibility) {
        out.push_back(CompatibilitySpec::key(das[i]->name, das[j]->name));
      }
    }
  }
  return out;
}

}  // namespace detail

/// Minimum pairwise ordinal compatibility among compatibility-active DAs;
/// the scale top when fewer than two take part.
inline int chain_compatibility(const Morphology& m, const Selection& sel, const CompatibilitySpec& c) {
  if (c.mode != CompatibilityMode::ordinal) throw Error("chain compatibility needs ordinal mode");
  int w = c.top;
  for (const auto& k : detail::active_pairs(m, sel)) {
    auto it = c.ordinal.find(k);
    if (it == c.ordinal.end()) throw Error("missing compatibility entry " + k.first + "-" + k.second);
    w = std::min(w, it->second);
  }
  return w;
}

/// Counts of selected estimate-bearing DAs per priority level.
inline std::vector<int> ordinal_quality(const Morphology& m, const Selection& sel) {
  std::vector<int> counts(m.scale.levels, 0);
  for (const auto* da : detail::selected(m, sel)) {
    if (!da->contributes_estimate) continue;
    if (!da->priority) throw Error(da->name + " has no ordinal priority");
    ++counts.at(*da->priority - 1);
  }
  return counts;
}

struct MedianQuality {
  bool feasible = true;
  MultisetEstimate e;
};

/// Variant 2: generalized median of the selected DA estimates. Variant 3
/// also pulls towards the pairwise compatibility estimates, and is
/// infeasible unless each of them is at least w0.
inline MedianQuality median_quality(const Morphology& m, const Selection& sel, const CompatibilitySpec& c,
                                    int variant) {
  if (variant != 2 && variant != 3) throw Error("median quality is defined for variants 2 and 3");
  std::vector<MultisetEstimate> terms;
  for (const auto* da : detail::selected(m, sel)) {
    if (!da->contributes_estimate) continue;
    if (!da->estimate) throw Error(da->name + " has no multiset estimate");
    terms.push_back(*da->estimate);
  }
  if (terms.empty()) throw Error("composite has no estimate-bearing design alternative");
  MedianQuality q;
  if (variant == 3) {
    if (c.mode != CompatibilityMode::multiset) throw Error("variant 3 needs multiset compatibility");
    if (!c.w0) throw Error("variant 3 needs a compatibility bound w0");
    for (const auto& k : detail::active_pairs(m, sel)) {
      auto it = c.multiset.find(k);
      if (it == c.multiset.end()) throw Error("missing compatibility entry " + k.first + "-" + k.second);
      auto ord = compare(it->second, *c.w0);
      if (ord != Ordering::greater && ord != Ordering::equal) q.feasible = false;
      terms.push_back(it->second);
    }
  }
  q.e = generalized_median(terms);
  return q;
}

/// True when a is at least as good as b on w and e, and better on one.
inline bool dominates(const QualityPoint& a, const QualityPoint& b) {
  auto ord = compare_counts(a.e, b.e);
  bool e_ge = ord == Ordering::greater || ord == Ordering::equal;
  if (a.w < b.w || !e_ge) return false;
  return a.w > b.w || ord == Ordering::greater;
}

/// Keeps non-dominated solutions in input order; equal-quality ones all stay.
inline std::vector<CompositeSolution> pareto_filter(const std::vector<CompositeSolution>& solutions) {
  std::vector<CompositeSolution> out;
  for (const auto& s : solutions) {
    bool beaten = std::any_of(solutions.begin(), solutions.end(), [&](const CompositeSolution& o) {
      return dominates(o.quality, s.quality);
    });
    if (!beaten) out.push_back(s);
  }
  return out;
}

struct SynthesisReport {
  int variant = 2;
  std::size_t composites = 0;
  std::vector<CompositeSolution> feasible;
  std::vector<CompositeSolution> pareto;
};

/// Exhaustive synthesis. Variants 1 and 2 require w(S) >= 1 under ordinal
/// compatibility; variant 3 requires every compatibility estimate >= w0 and
/// reports w = 1 for feasible composites.
inline SynthesisReport synthesize(const Morphology& m, const CompatibilitySpec& c, int variant) {
  if (variant < 1 || variant > 3) throw Error("variant must be 1, 2 or 3");
  if (auto issues = validate_morphology(m); !issues.empty()) throw Error(issues.front());
  if (auto issues = validate_compatibility(m, c); !issues.empty()) throw Error(issues.front());
  if (variant < 3 && c.mode != CompatibilityMode::ordinal) {
    throw Error("variants 1 and 2 need ordinal compatibility");
  }

  SynthesisReport report;
  report.variant = variant;
  for (const auto& sel : enumerate_composites(m)) {
    ++report.composites;
    CompositeSolution s;
    s.selection = sel;
    for (const auto* da : detail::selected(m, sel)) s.names.push_back(da->name);
    if (variant == 3) {
      auto q = median_quality(m, sel, c, 3);
      s.feasible = q.feasible;
      s.quality = {1, q.e.counts()};
    } else {
      s.quality.w = chain_compatibility(m, sel, c);
      s.feasible = s.quality.w >= 1;
      if (!s.feasible) continue;
      s.quality.e = variant == 1 ? ordinal_quality(m, sel) : median_quality(m, sel, c, 2).e.counts();
    }
    if (s.feasible) report.feasible.push_back(std::move(s));
  }
  report.pareto = pareto_filter(report.feasible);
  return report;
}

/// Height of an estimate in the cumulative-dominance lattice: 0 for the
/// all-worst estimate, one more per improvement step.
inline int lattice_height(const std::vector<int>& counts) {
  int h = 0, run = 0;
  for (std::size_t t = 0; t + 1 < counts.size(); ++t) {
    run += counts[t];
    h += run;
  }
  return h;
}

}  // namespace mcrank
