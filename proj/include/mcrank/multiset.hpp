#pragma once

// Interval multiset estimates over an ordinal scale [1, l], level 1 best.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcrank/core_model.hpp"

namespace mcrank {

struct ScaleSpec {
  int levels = 1;  // l
  int eta = 1;     // multiset cardinality

  friend bool operator==(const ScaleSpec&, const ScaleSpec&) = default;
};

inline std::string to_string(const ScaleSpec& s) {
  return "P(l=" + std::to_string(s.levels) + ",eta=" + std::to_string(s.eta) + ")";
}

/// Position form (eta_1, ..., eta_l): eta_i elements sit at level i.
class MultisetEstimate {
 public:
  MultisetEstimate() = default;
  explicit MultisetEstimate(std::vector<int> counts) : counts_(std::move(counts)) {
    if (counts_.empty()) throw Error("estimate needs at least one level");
    for (int c : counts_) {
      if (c < 0) throw Error("estimate counts must be nonnegative");
    }
  }
  MultisetEstimate(std::initializer_list<int> counts)
      : MultisetEstimate(std::vector<int>(counts)) {}

  const std::vector<int>& counts() const { return counts_; }
  int levels() const { return static_cast<int>(counts_.size()); }
  int cardinality() const { return std::accumulate(counts_.begin(), counts_.end(), 0); }
  ScaleSpec scale() const { return {levels(), cardinality()}; }
  int operator[](std::size_t i) const { return counts_[i]; }

  /// Cumulative counts C(t) for t = 1..l-1.
  std::vector<int> cumulative() const {
    std::vector<int> c;
    int run = 0;
    for (std::size_t t = 0; t + 1 < counts_.size(); ++t) {
      run += counts_[t];
      c.push_back(run);
    }
    return c;
  }

  friend bool operator==(const MultisetEstimate&, const MultisetEstimate&) = default;
  friend auto operator<=>(const MultisetEstimate& a, const MultisetEstimate& b) {
    return a.counts_ <=> b.counts_;
  }

 private:
  std::vector<int> counts_;
};

inline std::string to_string(const MultisetEstimate& e) {
  std::string s = "(";
  for (std::size_t i = 0; i < e.counts().size(); ++i) {
    if (i) s += ",";
    s += std::to_string(e.counts()[i]);
  }
  return s + ")";
}

inline MultisetEstimate parse_estimate(const std::string& text) {
  std::string t;
  for (char ch : text) {
    if (ch != ' ') t += ch;
  }
  if (t.size() < 3 || t.front() != '(' || t.back() != ')') {
    throw Error("malformed estimate \"" + text + "\"");
  }
  std::vector<int> counts;
  std::size_t pos = 1;
  while (pos < t.size() - 1) {
    auto comma = t.find(',', pos);
    if (comma == std::string::npos || comma > t.size() - 1) comma = t.size() - 1;
    auto item = t.substr(pos, comma - pos);
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
      throw Error("malformed estimate \"" + text + "\"");
    }
    counts.push_back(std::stoi(item));
    pos = comma + 1;
  }
  return MultisetEstimate(std::move(counts));
}

inline ScaleSpec parse_scale(const std::string& text) {
  ScaleSpec s;
  char tail = 0;
  if (std::sscanf(text.c_str(), "P(l=%d,eta=%d%c", &s.levels, &s.eta, &tail) != 3 || tail != ')') {
    throw Error("malformed scale \"" + text + "\"");
  }
  return s;
}

inline void require_same_scale(const MultisetEstimate& a, const MultisetEstimate& b) {
  if (a.scale() != b.scale()) {
    throw Error("scale mismatch: " + to_string(a) + " vs " + to_string(b));
  }
}

/// True iff the occupied levels form one contiguous range.
inline bool is_interval(const MultisetEstimate& e) {
  const auto& c = e.counts();
  auto first = std::find_if(c.begin(), c.end(), [](int x) { return x > 0; });
  if (first == c.end()) return false;
  auto last = std::find_if(c.rbegin(), c.rend(), [](int x) { return x > 0; }).base();
  return std::all_of(first, last, [](int x) { return x > 0; });
}

namespace detail {

inline void compositions(int levels, int remaining, std::vector<int>& cur,
                         std::vector<MultisetEstimate>& out) {
  if (static_cast<int>(cur.size()) == levels - 1) {
    cur.push_back(remaining);
    out.emplace_back(cur);
    cur.pop_back();
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    cur.push_back(k);
    compositions(levels, remaining - k, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

/// Every multiset of cardinality eta over l levels, descending lexicographic.
inline std::vector<MultisetEstimate> enumerate_multisets(const ScaleSpec& s) {
  if (s.levels < 1 || s.eta < 1) throw Error("scale requires l >= 1 and eta >= 1");
  std::vector<MultisetEstimate> out;
  std::vector<int> cur;
  detail::compositions(s.levels, s.eta, cur, out);
  return out;
}

/// Interval estimates of P^{l,eta}, descending lexicographic.
inline std::vector<MultisetEstimate> enumerate_scale(const ScaleSpec& s) {
  auto all = enumerate_multisets(s);
  std::vector<MultisetEstimate> out;
  std::copy_if(all.begin(), all.end(), std::back_inserter(out), is_interval);
  return out;
}

/// mu^{l,eta} = l(l+1)...(l+eta-1) / eta!
inline std::uint64_t multiset_number(const ScaleSpec& s) {
  if (s.levels < 1 || s.eta < 1) throw Error("scale requires l >= 1 and eta >= 1");
  // Binomial(l + eta - 1, eta), built incrementally so each step is exact.
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= static_cast<std::uint64_t>(s.eta); ++i) {
    std::uint64_t factor = static_cast<std::uint64_t>(s.levels) - 1 + i;
    std::uint64_t g = std::gcd(result, i);
    result = (result / g) * (factor / (i / g));
  }
  return result;
}

/// Component-wise sum. The result is generally not an interval estimate.
inline MultisetEstimate integrate(std::span<const MultisetEstimate> es) {
  if (es.empty()) throw Error("integrate needs at least one estimate");
  std::vector<int> sum(es.front().levels(), 0);
  for (const auto& e : es) {
    if (e.levels() != es.front().levels()) throw Error("scale mismatch");
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += e[i];
  }
  return MultisetEstimate(std::move(sum));
}

struct Proximity {
  int improvements = 0;  // delta-minus
  int degradations = 0;  // delta-plus

  int magnitude() const { return improvements + degradations; }

  friend bool operator==(const Proximity&, const Proximity&) = default;
};

/// Minimum one-step improvement and degradation moves turning `from` into `to`.
inline Proximity proximity(const MultisetEstimate& from, const MultisetEstimate& to) {
  require_same_scale(from, to);
  auto c1 = from.cumulative();
  auto c2 = to.cumulative();
  Proximity p;
  for (std::size_t t = 0; t < c1.size(); ++t) {
    p.improvements += std::max(0, c2[t] - c1[t]);
    p.degradations += std::max(0, c1[t] - c2[t]);
  }
  return p;
}

enum class Ordering { greater, less, equal, incomparable };

inline std::string to_string(Ordering o) {
  switch (o) {
    case Ordering::greater: return "greater";
    case Ordering::less: return "less";
    case Ordering::equal: return "equal";
    case Ordering::incomparable: return "incomparable";
  }
  return "?";
}

/// Cumulative dominance over counts vectors of equal length. Vectors whose
/// cumulative sums agree but which differ (possible when totals differ) are
/// reported incomparable.
inline Ordering compare_counts(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw Error("scale mismatch");
  if (a == b) return Ordering::equal;
  bool ge = true, le = true;
  int ca = 0, cb = 0;
  for (std::size_t t = 0; t + 1 < a.size(); ++t) {
    ca += a[t];
    cb += b[t];
    if (ca < cb) ge = false;
    if (ca > cb) le = false;
  }
  if (ge && !le) return Ordering::greater;
  if (le && !ge) return Ordering::less;
  return Ordering::incomparable;
}

inline Ordering compare(const MultisetEstimate& a, const MultisetEstimate& b) {
  require_same_scale(a, b);
  return compare_counts(a.counts(), b.counts());
}

enum class MedianUniverse { interval_only, all_multisets };

inline int total_distance(const MultisetEstimate& candidate,
                          std::span<const MultisetEstimate> es) {
  int cost = 0;
  for (const auto& e : es) cost += proximity(candidate, e).magnitude();
  return cost;
}

namespace detail {

// Among cost minimizers keep the maximal elements, then the descending
// lexicographic greatest.
inline MultisetEstimate argmin_with_tiebreak(std::span<const MultisetEstimate> candidates,
                                             std::span<const MultisetEstimate> es) {
  std::vector<MultisetEstimate> best;
  int best_cost = 0;
  for (const auto& cand : candidates) {
    int cost = total_distance(cand, es);
    if (best.empty() || cost < best_cost) {
      best.assign(1, cand);
      best_cost = cost;
    } else if (cost == best_cost && std::find(best.begin(), best.end(), cand) == best.end()) {
      best.push_back(cand);
    }
  }
  std::vector<MultisetEstimate> maximal;
  for (const auto& x : best) {
    bool dominated = std::any_of(best.begin(), best.end(), [&](const MultisetEstimate& y) {
      return compare(y, x) == Ordering::greater;
    });
    if (!dominated) maximal.push_back(x);
  }
  return *std::max_element(maximal.begin(), maximal.end());
}

inline void require_shared_scale(std::span<const MultisetEstimate> es) {
  if (es.empty()) throw Error("median needs at least one estimate");
  for (const auto& e : es) require_same_scale(es.front(), e);
}

}  // namespace detail

/// Candidate of the chosen universe minimizing total |delta| to the inputs.
inline MultisetEstimate generalized_median(
    std::span<const MultisetEstimate> es,
    MedianUniverse universe = MedianUniverse::interval_only) {
  detail::require_shared_scale(es);
  auto scale = es.front().scale();
  auto candidates = universe == MedianUniverse::interval_only ? enumerate_scale(scale)
                                                              : enumerate_multisets(scale);
  return detail::argmin_with_tiebreak(candidates, es);
}

/// Same objective restricted to the input estimates themselves.
inline MultisetEstimate set_median(std::span<const MultisetEstimate> es) {
  detail::require_shared_scale(es);
  return detail::argmin_with_tiebreak(es, es);
}

}  // namespace mcrank
