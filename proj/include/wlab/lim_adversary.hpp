// Finite-extension construction against reductions of a two-coloring
// indivisibility problem to lim, presented through its hat-LPO form.
#pragma once

#include "wlab/adversary_report.hpp"

#include <map>

namespace wlab {

/// Result of a bounded search for an extension forcing a functional's value.
struct ExtensionSearch {
  std::optional<Prefix> found;
  bool inconclusive = false;
  Nat nodes = 0;
};

namespace detail {

/// Base prefix plus sparse assignments; reports the first unassigned position read.
class PartialOracle final : public Oracle {
 public:
  PartialOracle(const Prefix& base, const std::map<Nat, Nat>& extra) : base_(base), extra_(extra) {}
  std::optional<Nat> at(Nat pos) const override {
    if (pos < base_.size()) return base_[pos];
    if (auto it = extra_.find(pos); it != extra_.end()) return it->second;
    if (!missing_) missing_ = pos;
    return std::nullopt;
  }
  std::optional<Nat> missing() const { return missing_; }

 private:
  const Prefix& base_;
  const std::map<Nat, Nat>& extra_;
  mutable std::optional<Nat> missing_;
};

inline Prefix fill_extension(const Prefix& base, const std::map<Nat, Nat>& extra) {
  Prefix out = base;
  if (!extra.empty()) out.resize(std::max<Nat>(base.size(), extra.rbegin()->first + 1), 0);
  for (const auto& [pos, v] : extra) out[pos] = v;
  return out;
}

}  // namespace detail

/// Depth-first search over the positions f actually reads, values below `colors`,
/// for an extension of `base` on which f(input) converges to `want`.
inline ExtensionSearch search_extension(const Functional& f, const Prefix& base, Nat input, Nat want, Nat colors,
                                        Nat node_cap, Nat budget) {
  ExtensionSearch res;
  std::map<Nat, Nat> extra;
  std::function<bool()> go = [&]() -> bool {
    if (++res.nodes > node_cap) {
      res.inconclusive = true;
      return true;
    }
    detail::PartialOracle oracle(base, extra);
    const auto o = eval_functional(f, oracle, input, budget);
    if (const auto* v = converged(o)) {
      if (v->value != want) return false;
      res.found = detail::fill_extension(base, extra);
      return true;
    }
    const auto miss = oracle.missing();
    if (!miss || (f.has_use_bound() && *miss >= f.declared_use_bound(input))) {
      res.inconclusive = true;  // budget exhausted or a read beyond the declared use
      return true;
    }
    for (Nat v = 0; v < colors; ++v) {
      extra[*miss] = v;
      if (go()) return true;
    }
    extra.erase(*miss);
    return false;
  };
  go();
  return res;
}

struct LimCertificate {
  Nat p = 0, q = 0;
  Prefix sigma;
  Prefix solution;  // hat-LPO answer bits
  Nat tail = 0;
  Nat window = 0;
  Nat kind = 0;  // 0: equal colors, finite class; 1: colors differ
  StreamRule final_rule() const { return StreamRule(sigma, {tail}); }
};

namespace detail {
inline constexpr Nat kLimWindow = 8;     // j < J searched per hat-LPO instance
inline constexpr Nat kLimLookahead = 8;  // instances searched per stage
inline constexpr Nat kLimNodes = 4096;
inline constexpr Nat kLimBudget = 4096;
inline constexpr Nat kLimWatch = 128;
}  // namespace detail

/// Δ(cantor_pair(i, j)) is bit j of the i-th LPO instance; Ψ(p) = 1 puts code p in the solution.
inline AdversaryReport run_lim_adversary(const Functional& delta, const Functional& psi, Nat horizon, Nat seed = 0) {
  if (!delta.has_use_bound() || !psi.has_use_bound())
    throw Error("lim adversary needs declared use bounds for both functionals");
  using namespace detail;
  AdversaryReport rep;
  rep.transcript = duel_header("lim", delta.name, psi.name, horizon, seed);
  auto& tr = rep.transcript;
  Prefix sigma, a;
  std::set<Nat> settled;
  std::vector<Nat> commits;
  auto exhaust = [&](Nat s) {
    tr.add(s, "exhausted", {s});
    rep.coloring = sigma;
    return rep;
  };
  for (Nat s = 1; s < horizon; ++s) {
    const Nat i0 = a.size();
    bool found = false;
    for (Nat i = i0; i < i0 + kLimLookahead && !found; ++i)
      for (Nat j = 0; j < kLimWindow && !found; ++j) {
        const Nat q = cantor_pair(i, j);
        if (delta.declared_use_bound(q) > horizon) {
          tr.add(s, "use_exceeds_horizon", {i, j});
          return exhaust(s);
        }
        const auto r = search_extension(delta, sigma, q, 1, 2, kLimNodes, kLimBudget);
        if (r.inconclusive) {
          tr.add(s, "search_inconclusive", {i, j});
          return exhaust(s);
        }
        if (r.found) {
          sigma = *r.found;
          a.resize(i, 0);
          a.push_back(1);
          tr.add(s, "lpo_one", {i, j});
          found = true;
        }
      }
    if (!found) {
      a.push_back(0);
      tr.add(s, "lpo_zero", {i0});
    }
    if (sigma.size() < s) sigma.resize(s, 0);
    tr.add(s, "extend", {static_cast<Nat>(sigma.size()), static_cast<Nat>(a.size())});
    const PrefixOracle so(sigma), ao(a);
    const JoinOracle oracle(so, ao);
    for (Nat p = 0; p < std::min<Nat>(sigma.size(), kLimWatch) && commits.size() < 2; ++p) {
      if (settled.count(p)) continue;
      const auto v = converged(eval_functional(psi, oracle, p, kLimBudget));
      if (!v) continue;
      settled.insert(p);
      if (v->value == 1) {
        commits.push_back(p);
        tr.add(s, "commit", {p, sigma[p]});
      }
    }
    if (commits.size() == 2) {
      const Nat p = commits[0], q = commits[1];
      const bool same = sigma[p] == sigma[q];
      const Nat tail = same ? 1 - sigma[p] : 0;
      tr.add(s, "cert_points", {p, q});
      tr.add(s, "cert_sigma", sigma);
      tr.add(s, "cert_solution", a);
      tr.add(s, "cert_tail", {tail});
      tr.add(s, "cert_window", {kLimWindow});
      tr.add(s, "defeated", {same ? Nat{0} : Nat{1}});
      rep.coloring = sigma;
      return rep;
    }
  }
  return exhaust(horizon);
}

inline std::optional<LimCertificate> parse_lim_certificate(const Transcript& t) {
  const auto* pts = detail::only(t, "cert_points");
  const auto* sig = detail::only(t, "cert_sigma");
  const auto* sol = detail::only(t, "cert_solution");
  const auto* tail = detail::only(t, "cert_tail");
  const auto* win = detail::only(t, "cert_window");
  const auto* out = detail::only(t, "defeated");
  if (!pts || !sig || !sol || !tail || !win || !out) return std::nullopt;
  if (pts->data.size() != 2 || tail->data.size() != 1 || win->data.size() != 1 || out->data.size() != 1)
    return std::nullopt;
  return LimCertificate{pts->data[0], pts->data[1], sig->data, sol->data, tail->data[0], win->data[0], out->data[0]};
}

inline std::optional<std::string> audit_lim(const Transcript& t, const Functional& delta, const Functional& psi) {
  const auto cert = parse_lim_certificate(t);
  if (!cert) return std::string("malformed certificate");
  for (Nat v : cert->sigma)
    if (v > 1) return std::string("coloring is not binary");
  if (cert->tail > 1) return std::string("tail color is not binary");
  if (cert->p == cert->q || cert->p >= cert->sigma.size() || cert->q >= cert->sigma.size())
    return std::string("committed points are not colored distinct codes");
  const Stream d(cert->final_rule());
  const StreamOracle dor(d);
  const PrefixOracle ao(cert->solution);
  const JoinOracle oracle(dor, ao);
  for (Nat p : {cert->p, cert->q}) {
    const auto v = converged(eval_functional(psi, oracle, p, detail::kLimBudget));
    if (!v || v->value != 1) return "psi does not put " + std::to_string(p) + " in the solution";
  }
  for (Nat i = 0; i < cert->solution.size(); ++i) {
    Nat bit = 0;
    for (Nat j = 0; j < cert->window; ++j) {
      const auto v = converged(eval_functional(delta, dor, cantor_pair(i, j), detail::kLimBudget));
      if (!v) return "delta diverges on instance " + std::to_string(i);
      if (v->value == 1) bit = 1;
    }
    if (bit != cert->solution[i]) return "solution bit " + std::to_string(i) + " is wrong";
  }
  const Nat cp = cert->sigma[cert->p], cq = cert->sigma[cert->q];
  if (cert->kind == 1) {
    if (cp == cq) return std::string("mismatch claimed for equal colors");
    return std::nullopt;
  }
  if (cp != cq) return std::string("colors differ but a lock was claimed");
  if (cert->final_rule().tail_values().count(cp)) return std::string("committed color recurs in the final rule");
  return std::nullopt;
}

}  // namespace wlab
