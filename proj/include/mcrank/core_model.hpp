#pragma once

// Decision data model: alternatives, criteria, estimates, preference
// relations, linear orders, layered and fuzzy rankings.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

namespace mcrank {

using Rational = boost::rational<std::int64_t>;

/// 1-based alternative identifier.
using AltId = int;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      auto v = std::stoll(text, &used);
      if (used != text.size()) throw Error("trailing characters");
      return Rational(v);
    }
    auto num = std::stoll(text.substr(0, slash), &used);
    if (used != slash) throw Error("trailing characters");
    auto den_text = text.substr(slash + 1);
    auto den = std::stoll(den_text, &used);
    if (used != den_text.size()) throw Error("trailing characters");
    if (den == 0) throw Error("zero denominator");
    return Rational(num, den);
  } catch (const std::logic_error&) {
    throw Error("malformed rational \"" + text + "\"");
  } catch (const Error& e) {
    throw Error("malformed rational \"" + text + "\": " + e.what());
  }
}

struct Alternative {
  AltId id = 0;
  std::string name;

  friend bool operator==(const Alternative&, const Alternative&) = default;
};

struct Criterion {
  int id = 0;
  std::string name;
  Rational weight{1};
  int scale_min = 0;
  int scale_max = 1;
  bool higher_is_better = true;

  friend bool operator==(const Criterion&, const Criterion&) = default;
};

/// Alternatives x criteria grid of exact scores. Construction does not
/// validate; call validate_matrix().
class EstimateMatrix {
 public:
  EstimateMatrix() = default;
  EstimateMatrix(std::vector<Alternative> alternatives,
                 std::vector<Criterion> criteria,
                 std::vector<std::vector<Rational>> z)
      : alternatives_(std::move(alternatives)),
        criteria_(std::move(criteria)),
        z_(std::move(z)) {}

  /// Builds a matrix with default names A1..An / K1..Kd, unit weights and
  /// a common higher-is-better scale.
  static EstimateMatrix from_scores(const std::vector<std::vector<int>>& rows,
                                    int scale_min, int scale_max) {
    std::vector<Alternative> alts;
    std::vector<Criterion> crits;
    std::vector<std::vector<Rational>> z;
    std::size_t d = rows.empty() ? 0 : rows.front().size();
    for (std::size_t j = 0; j < d; ++j) {
      crits.push_back({static_cast<int>(j + 1), "K" + std::to_string(j + 1),
                       Rational(1), scale_min, scale_max, true});
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      alts.push_back({static_cast<AltId>(i + 1), "A" + std::to_string(i + 1)});
      std::vector<Rational> row;
      for (int v : rows[i]) row.emplace_back(v);
      z.push_back(std::move(row));
    }
    return EstimateMatrix(std::move(alts), std::move(crits), std::move(z));
  }

  int n() const { return static_cast<int>(alternatives_.size()); }
  int d() const { return static_cast<int>(criteria_.size()); }
  const std::vector<Alternative>& alternatives() const { return alternatives_; }
  const std::vector<Criterion>& criteria() const { return criteria_; }
  const std::vector<std::vector<Rational>>& scores() const { return z_; }

  const Rational& z(AltId a, int j) const { return z_.at(a - 1).at(j - 1); }

  /// Score mapped so that larger is better on every criterion; stays on the
  /// criterion's own scale.
  Rational oriented(AltId a, int j) const {
    const auto& c = criteria_.at(j - 1);
    const auto& v = z(a, j);
    if (c.higher_is_better) return v;
    return Rational(c.scale_min + c.scale_max) - v;
  }

  friend bool operator==(const EstimateMatrix&, const EstimateMatrix&) = default;

 private:
  std::vector<Alternative> alternatives_;
  std::vector<Criterion> criteria_;
  std::vector<std::vector<Rational>> z_;
};

struct Violation {
  std::optional<AltId> alternative;
  std::optional<int> criterion;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

using ValidationReport = std::vector<Violation>;

inline ValidationReport validate_matrix(const EstimateMatrix& m) {
  ValidationReport report;
  for (int i = 0; i < m.n(); ++i) {
    if (m.alternatives()[i].id != i + 1) {
      report.push_back({i + 1, std::nullopt,
                        "alternative ids must be contiguous 1..n"});
    }
  }
  for (int j = 0; j < m.d(); ++j) {
    const auto& c = m.criteria()[j];
    if (c.id != j + 1) {
      report.push_back({std::nullopt, j + 1, "criterion ids must be contiguous 1..d"});
    }
    if (c.scale_min >= c.scale_max) {
      report.push_back({std::nullopt, j + 1, "scale_min must be below scale_max"});
    }
    if (c.weight < 0) {
      report.push_back({std::nullopt, j + 1, "weight must be nonnegative"});
    }
  }
  if (static_cast<int>(m.scores().size()) != m.n()) {
    report.push_back({std::nullopt, std::nullopt, "estimate grid must have one row per alternative"});
    return report;
  }
  for (int i = 0; i < m.n(); ++i) {
    const auto& row = m.scores()[i];
    if (static_cast<int>(row.size()) != m.d()) {
      report.push_back({i + 1, std::nullopt, "estimate row must have one entry per criterion"});
      continue;
    }
    for (int j = 0; j < m.d(); ++j) {
      const auto& c = m.criteria()[j];
      if (row[j] < c.scale_min || row[j] > c.scale_max) {
        std::ostringstream msg;
        msg << "score " << to_string(row[j]) << " outside [" << c.scale_min
            << "," << c.scale_max << "]";
        report.push_back({i + 1, j + 1, msg.str()});
      }
    }
  }
  return report;
}

/// Directed relation over 1..n; edge (a, b) reads "a preferred to b".
class PreferenceRelation {
 public:
  using Edge = std::pair<AltId, AltId>;

  PreferenceRelation() = default;
  explicit PreferenceRelation(int n) : n_(n) {}
  PreferenceRelation(int n, std::set<Edge> edges) : n_(n), edges_(std::move(edges)) {
    for (const auto& [a, b] : edges_) check(a, b);
  }

  int n() const { return n_; }
  const std::set<Edge>& edges() const { return edges_; }
  bool contains(AltId a, AltId b) const { return edges_.count({a, b}) != 0; }

  void add(AltId a, AltId b) {
    check(a, b);
    edges_.insert({a, b});
  }

  int out_degree(AltId a) const {
    auto lo = edges_.lower_bound({a, 0});
    auto hi = edges_.lower_bound({a + 1, 0});
    return static_cast<int>(std::distance(lo, hi));
  }

  std::vector<std::vector<AltId>> successors() const {
    std::vector<std::vector<AltId>> adj(n_ + 1);
    for (const auto& [a, b] : edges_) adj[a].push_back(b);
    return adj;
  }

  friend bool operator==(const PreferenceRelation&, const PreferenceRelation&) = default;

 private:
  void check(AltId a, AltId b) const {
    if (a < 1 || a > n_ || b < 1 || b > n_) {
      throw Error("relation edge (" + std::to_string(a) + "," + std::to_string(b) +
                  ") outside 1.." + std::to_string(n_));
    }
    if (a == b) throw Error("relation self-loop at " + std::to_string(a));
  }

  int n_ = 0;
  std::set<Edge> edges_;
};

/// Total order of alternatives, best first.
class LinearOrder {
 public:
  LinearOrder() = default;
  explicit LinearOrder(std::vector<AltId> sequence) : sequence_(std::move(sequence)) {
    std::vector<bool> seen(sequence_.size() + 1, false);
    for (AltId a : sequence_) {
      if (a < 1 || a > static_cast<int>(sequence_.size()) || seen[a]) {
        throw Error("linear order is not a permutation of 1..n");
      }
      seen[a] = true;
    }
  }

  int n() const { return static_cast<int>(sequence_.size()); }
  const std::vector<AltId>& sequence() const { return sequence_; }

  friend bool operator==(const LinearOrder&, const LinearOrder&) = default;

 private:
  std::vector<AltId> sequence_;
};

/// Ordered partition of 1..n into non-empty layers, layer 1 best. Members of
/// each layer are kept in ascending id order.
class LayeredRanking {
 public:
  LayeredRanking() = default;
  explicit LayeredRanking(std::vector<std::vector<AltId>> layers) : layers_(std::move(layers)) {
    int n = 0;
    for (auto& layer : layers_) {
      if (layer.empty()) throw Error("layered ranking has an empty layer");
      std::sort(layer.begin(), layer.end());
      n += static_cast<int>(layer.size());
    }
    std::vector<bool> seen(n + 1, false);
    for (const auto& layer : layers_) {
      for (AltId a : layer) {
        if (a < 1 || a > n || seen[a]) {
          throw Error("layers do not partition 1..n");
        }
        seen[a] = true;
      }
    }
    n_ = n;
  }

  /// Builds from a per-alternative layer index (index 0 of `layer_of` is
  /// alternative 1). Unused layer indices are dropped and the rest renumbered.
  static LayeredRanking from_assignment(const std::vector<int>& layer_of) {
    std::set<int> used(layer_of.begin(), layer_of.end());
    std::map<int, int> renumber;
    int next = 0;
    for (int k : used) renumber[k] = next++;
    std::vector<std::vector<AltId>> layers(used.size());
    for (std::size_t i = 0; i < layer_of.size(); ++i) {
      layers[renumber[layer_of[i]]].push_back(static_cast<AltId>(i + 1));
    }
    return LayeredRanking(std::move(layers));
  }

  int n() const { return n_; }
  int m() const { return static_cast<int>(layers_.size()); }
  const std::vector<std::vector<AltId>>& layers() const { return layers_; }

  /// Per-alternative 1-based layer index, indexed by id - 1.
  std::vector<int> layer_index() const {
    std::vector<int> out(n_, 0);
    for (std::size_t k = 0; k < layers_.size(); ++k) {
      for (AltId a : layers_[k]) out[a - 1] = static_cast<int>(k + 1);
    }
    return out;
  }

  friend bool operator==(const LayeredRanking&, const LayeredRanking&) = default;

 private:
  std::vector<std::vector<AltId>> layers_;
  int n_ = 0;
};

struct PriorityInterval {
  int lo = 1;
  int hi = 1;

  friend bool operator==(const PriorityInterval&, const PriorityInterval&) = default;
};

/// Per-alternative interval of layer indices; layers may overlap.
class FuzzyRanking {
 public:
  FuzzyRanking() = default;
  FuzzyRanking(std::vector<PriorityInterval> intervals, int m)
      : intervals_(std::move(intervals)), m_(m) {
    for (const auto& iv : intervals_) {
      if (iv.lo < 1 || iv.lo > iv.hi || iv.hi > m_) {
        throw Error("fuzzy interval outside 1..m");
      }
    }
  }

  int n() const { return static_cast<int>(intervals_.size()); }
  int m() const { return m_; }
  const std::vector<PriorityInterval>& intervals() const { return intervals_; }
  const PriorityInterval& interval(AltId a) const { return intervals_.at(a - 1); }

  friend bool operator==(const FuzzyRanking&, const FuzzyRanking&) = default;

 private:
  std::vector<PriorityInterval> intervals_;
  int m_ = 0;
};

enum class Verdict { a_better, b_better, equal, incomparable };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::a_better: return "a_better";
    case Verdict::b_better: return "b_better";
    case Verdict::equal: return "equal";
    case Verdict::incomparable: return "incomparable";
  }
  return "?";
}

inline Verdict parse_verdict(const std::string& s) {
  if (s == "a_better") return Verdict::a_better;
  if (s == "b_better") return Verdict::b_better;
  if (s == "equal") return Verdict::equal;
  if (s == "incomparable") return Verdict::incomparable;
  throw Error("unknown verdict \"" + s + "\"");
}

struct Judgment {
  AltId a = 0;
  AltId b = 0;
  Verdict verdict = Verdict::incomparable;

  friend bool operator==(const Judgment&, const Judgment&) = default;
};

/// Expert verdicts, at most one per unordered pair. Stored normalized with
/// a < b.
class JudgmentSet {
 public:
  JudgmentSet() = default;

  /// Rejects a list that judges the same unordered pair twice.
  explicit JudgmentSet(const std::vector<Judgment>& verdicts) {
    for (const auto& j : verdicts) {
      auto key = std::minmax(j.a, j.b);
      if (verdicts_.count(key)) {
        throw Error("duplicate verdict for pair (" + std::to_string(key.first) + "," +
                    std::to_string(key.second) + ")");
      }
      set(j);
    }
  }

  /// Records a verdict, replacing any earlier verdict for the same pair.
  void set(Judgment j) {
    if (j.a == j.b) throw Error("judgment compares an alternative with itself");
    if (j.a > j.b) {
      std::swap(j.a, j.b);
      if (j.verdict == Verdict::a_better) {
        j.verdict = Verdict::b_better;
      } else if (j.verdict == Verdict::b_better) {
        j.verdict = Verdict::a_better;
      }
    }
    verdicts_[{j.a, j.b}] = j.verdict;
  }

  /// Verdict from a's point of view.
  std::optional<Verdict> find(AltId a, AltId b) const {
    auto it = verdicts_.find(std::minmax(a, b));
    if (it == verdicts_.end()) return std::nullopt;
    if (a < b || it->second == Verdict::equal || it->second == Verdict::incomparable) return it->second;
    return it->second == Verdict::a_better ? Verdict::b_better : Verdict::a_better;
  }

  std::size_t size() const { return verdicts_.size(); }
  bool empty() const { return verdicts_.empty(); }

  std::vector<Judgment> list() const {
    std::vector<Judgment> out;
    for (const auto& [k, v] : verdicts_) out.push_back({k.first, k.second, v});
    return out;
  }

  /// First pair (a < b, lexicographic) without a verdict.
  std::optional<std::pair<AltId, AltId>> first_missing(int n) const {
    for (AltId a = 1; a <= n; ++a) {
      for (AltId b = a + 1; b <= n; ++b) {
        if (!verdicts_.count({a, b})) return std::make_pair(a, b);
      }
    }
    return std::nullopt;
  }

  friend bool operator==(const JudgmentSet&, const JudgmentSet&) = default;

 private:
  std::map<std::pair<AltId, AltId>, Verdict> verdicts_;
};

namespace detail {

// Tarjan's algorithm; component ids are assigned in reverse topological order.
inline std::vector<int> scc_ids(const PreferenceRelation& g, int& count) {
  const int n = g.n();
  auto adj = g.successors();
  std::vector<int> index(n + 1, -1), low(n + 1, 0), comp(n + 1, -1);
  std::vector<bool> on_stack(n + 1, false);
  std::vector<AltId> stack;
  int next_index = 0;
  count = 0;

  std::function<void(AltId)> visit = [&](AltId v) {
    index[v] = low[v] = next_index++;
    stack.push_back(v);
    on_stack[v] = true;
    for (AltId w : adj[v]) {
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      AltId w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = count;
      } while (w != v);
      ++count;
    }
  };
  for (AltId v = 1; v <= n; ++v) {
    if (index[v] < 0) visit(v);
  }
  return comp;
}

}  // namespace detail

/// Strongly connected components of size >= 2, each sorted, ordered by
/// smallest member.
inline std::vector<std::vector<AltId>> detect_contradiction(const PreferenceRelation& g) {
  int count = 0;
  auto comp = detail::scc_ids(g, count);
  std::vector<std::vector<AltId>> groups(count);
  for (AltId v = 1; v <= g.n(); ++v) groups[comp[v]].push_back(v);
  std::vector<std::vector<AltId>> out;
  for (auto& grp : groups) {
    if (grp.size() >= 2) out.push_back(std::move(grp));
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct Condensation {
  PreferenceRelation relation;
  /// component_of[a - 1] is the 1-based node holding alternative a.
  std::vector<int> component_of;
  /// members[k - 1] lists the alternatives of node k, ascending.
  std::vector<std::vector<AltId>> members;

  friend bool operator==(const Condensation&, const Condensation&) = default;
};

/// Acyclic quotient of g by its strongly connected components. Nodes are
/// numbered by their smallest member, so an acyclic input maps identically.
inline Condensation condense(const PreferenceRelation& g) {
  int count = 0;
  auto comp = detail::scc_ids(g, count);
  std::vector<std::vector<AltId>> groups(count);
  for (AltId v = 1; v <= g.n(); ++v) groups[comp[v]].push_back(v);
  std::sort(groups.begin(), groups.end());

  Condensation c;
  c.component_of.assign(g.n(), 0);
  for (std::size_t k = 0; k < groups.size(); ++k) {
    for (AltId a : groups[k]) c.component_of[a - 1] = static_cast<int>(k + 1);
  }
  c.relation = PreferenceRelation(static_cast<int>(groups.size()));
  for (const auto& [a, b] : g.edges()) {
    int ca = c.component_of[a - 1];
    int cb = c.component_of[b - 1];
    if (ca != cb) c.relation.add(ca, cb);
  }
  c.members = std::move(groups);
  return c;
}

}  // namespace mcrank
