// Combinatorial lemmas behind the finite-injury construction: the recurrence
// e(n) and the disjoint-interval selection it bounds.
#pragma once

#include "wlab/baire.hpp"

#include <map>
#include <vector>

namespace wlab {

/// e(1) = 3, e(n+1) = 2·n·e(n) + 2.
inline Nat e_bound(Nat n) {
  if (n == 0) throw Error("e_bound is defined for n >= 1");
  Nat e = 3;
  for (Nat i = 1; i < n; ++i) e = 2 * i * e + 2;
  return e;
}

/// Open rational interval (lo, hi) between two codes.
struct CodeInterval {
  Nat lo = 0, hi = 0;
  bool contains(Nat n) const { return rat_less(lo, n) && rat_less(n, hi); }
  friend bool operator==(const CodeInterval&, const CodeInterval&) = default;
};

inline bool disjoint(const CodeInterval& a, const CodeInterval& b) {
  return !rat_less(b.lo, a.hi) || !rat_less(a.lo, b.hi);
}

inline bool pairwise_disjoint(const std::vector<CodeInterval>& v) {
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      if (!disjoint(v[i], v[j])) return false;
  return true;
}

namespace detail {

inline std::vector<Nat> distinct_in_order(const std::vector<Nat>& s) {
  std::vector<Nat> out;
  std::set<Nat> seen;
  for (Nat v : s)
    if (seen.insert(v).second) out.push_back(v);
  return out;
}

inline std::vector<Nat> sorted_by_value(std::vector<Nat> s) {
  std::sort(s.begin(), s.end(), [](Nat a, Nat b) { return rat_less(a, b); });
  return s;
}

/// items: (set index, points); each has at least e(items.size()) distinct points.
inline void select_into(const std::vector<std::pair<std::size_t, std::vector<Nat>>>& items,
                        std::map<std::size_t, CodeInterval>& out) {
  const Nat k = items.size();
  if (k == 0) return;
  if (k == 1) {
    const auto s = sorted_by_value(items[0].second);
    out[items[0].first] = {s[0], s[1]};
    return;
  }
  const Nat keep = 2 * e_bound(k - 1);
  std::vector<std::pair<std::size_t, std::vector<Nat>>> others;
  std::vector<Nat> dividers;
  for (std::size_t i = 0; i + 1 < items.size(); ++i) {
    std::vector<Nat> pts(items[i].second.begin(),
                         items[i].second.begin() + std::min<std::size_t>(keep, items[i].second.size()));
    dividers.insert(dividers.end(), pts.begin(), pts.end());
    others.emplace_back(items[i].first, std::move(pts));
  }
  // Two consecutive points of the last set with no divider strictly between them.
  const auto last = sorted_by_value(items.back().second);
  std::optional<CodeInterval> chosen;
  for (std::size_t i = 0; i + 1 < last.size() && !chosen; ++i) {
    const CodeInterval cand{last[i], last[i + 1]};
    if (std::none_of(dividers.begin(), dividers.end(), [&](Nat d) { return cand.contains(d); })) chosen = cand;
  }
  if (!chosen) throw Error("interval selection invariant violated");
  out[items.back().first] = *chosen;
  std::vector<std::pair<std::size_t, std::vector<Nat>>> below, above;
  const Nat need = e_bound(k - 1);
  for (auto& [idx, pts] : others) {
    std::vector<Nat> lo, hi;
    for (Nat p : pts) (rat_less(chosen->lo, p) ? hi : lo).push_back(p);
    if (lo.size() >= need)
      below.emplace_back(idx, std::move(lo));
    else
      above.emplace_back(idx, std::move(hi));
  }
  select_into(below, out);
  select_into(above, out);
}

}  // namespace detail

/// k pairwise-disjoint open intervals, the i-th with both endpoints from set i.
inline std::vector<CodeInterval> select_disjoint_intervals(const std::vector<std::vector<Nat>>& sets) {
  const Nat k = sets.size();
  if (k == 0) return {};
  const Nat need = e_bound(k);
  std::vector<std::pair<std::size_t, std::vector<Nat>>> items;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    auto pts = detail::distinct_in_order(sets[i]);
    if (pts.size() < need)
      throw Error("set " + std::to_string(i) + " has " + std::to_string(pts.size()) + " points; needs " +
                  std::to_string(need));
    items.emplace_back(i, std::move(pts));
  }
  std::map<std::size_t, CodeInterval> chosen;
  detail::select_into(items, chosen);
  std::vector<CodeInterval> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(chosen.at(i));
  return out;
}

/// Whether some choice of intervals with endpoints from each set is pairwise disjoint.
inline bool disjoint_selection_exists(const std::vector<std::vector<Nat>>& sets) {
  std::vector<std::vector<CodeInterval>> options;
  for (const auto& s : sets) {
    const auto v = detail::sorted_by_value(detail::distinct_in_order(s));
    std::vector<CodeInterval> opts;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) opts.push_back({v[i], v[i + 1]});
    options.push_back(std::move(opts));
  }
  std::vector<CodeInterval> chosen;
  std::function<bool(std::size_t)> go = [&](std::size_t i) {
    if (i == options.size()) return true;
    for (const auto& iv : options[i]) {
      if (std::all_of(chosen.begin(), chosen.end(), [&](const CodeInterval& c) { return disjoint(c, iv); })) {
        chosen.push_back(iv);
        if (go(i + 1)) return true;
        chosen.pop_back();
      }
    }
    return false;
  };
  return go(0);
}

}  // namespace wlab
