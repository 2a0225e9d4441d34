// Lock-function construction against reductions of the column indivisibility
// problem to stable Ramsey for pairs, with its certificate audit.
#pragma once

#include "wlab/adversary_report.hpp"

#include <map>

namespace wlab {

/// Pair coloring d{x,y} = combine(c(x,j) for j in rows), x < y: each column's color
/// is read off a fixed set of its points, so d is stable.
struct TransparentPairDelta {
  std::string name;
  std::vector<Nat> rows;
  std::function<Nat(const std::vector<Nat>&)> combine;
  Nat colors = 2;

  Nat column_color(const std::function<Nat(Nat)>& c, Nat x) const {
    std::vector<Nat> vals;
    for (Nat j : rows) vals.push_back(c(cantor_pair(x, j)));
    return combine(vals);
  }

  Functional functional() const {
    return Functional{0, name,
                      [rows = rows, combine = combine](Tape& t, Nat q) {
                        const Nat x = cantor_unpair(q).first;
                        std::vector<Nat> vals;
                        t.tick();
                        for (Nat j : rows) vals.push_back(t.read(cantor_pair(x, j)));
                        return combine(vals);
                      },
                      [rows = rows](Nat q) {
                        const Nat x = cantor_unpair(q).first;
                        Nat u = 0;
                        for (Nat j : rows) u = std::max(u, cantor_pair(x, j) + 1);
                        return u;
                      }};
  }
};

/// Final coloring: the built prefix, then locked columns at their lock color, then a fallback rule.
struct PatchedEColoring {
  Prefix base;
  std::map<Nat, Nat> locks;
  StreamRule fallback = StreamRule::constant(0);

  Nat operator()(Nat code) const {
    if (code < base.size()) return base[code];
    if (auto it = locks.find(cantor_unpair(code).first); it != locks.end()) return it->second;
    return fallback(code);
  }

  Stream stream() const {
    return Stream([self = *this](Nat n) { return self(n); });
  }

  /// Exact: a column differs from the lock or the fallback at finitely many points.
  std::set<Nat> colors_infinite_in_column(Nat x) const {
    if (auto it = locks.find(x); it != locks.end()) return {it->second};
    return wlab::colors_infinite_in_column(fallback, x);
  }

  /// From this column on, every column is unlocked, past the base, and periodic in x with period 2P.
  Nat periodic_start() const {
    Nat n = periodic_column_start(fallback);
    while (cantor_pair(n, 0) < base.size()) ++n;
    if (!locks.empty()) n = std::max(n, locks.rbegin()->first + 1);
    return n;
  }
};

namespace detail {

/// Whether infinitely many columns beyond `after` have color i (exact by periodicity).
inline bool infinitely_many_columns(const PatchedEColoring& d, const TransparentPairDelta& delta, Nat i, Nat after) {
  const Nat start = std::max(d.periodic_start(), after + 1);
  const Nat span = 2 * d.fallback.period();
  const auto c = [&](Nat n) { return d(n); };
  for (Nat x = start; x < start + span; ++x)
    if (delta.column_color(c, x) == i) return true;
  return false;
}

inline std::vector<Nat> rule_data(const StreamRule& r) {
  return concat({{r.head_size()}, r.head(), r.tail()});
}

inline std::optional<StreamRule> rule_from_data(const std::vector<Nat>& d) {
  if (d.empty() || d[0] + 1 >= d.size()) return std::nullopt;
  const Nat h = d[0];
  return StreamRule(Prefix(d.begin() + 1, d.begin() + 1 + h), Prefix(d.begin() + 1 + h, d.end()));
}

inline constexpr Nat kSrtFreshColumns = 2;
inline constexpr Nat kSrtChoicePoints = 10;
inline constexpr Nat kSrtBudget = 1 << 14;

class SrtState {
 public:
  SrtState(const TransparentPairDelta& delta) : delta_(delta) {}

  /// Column n's color if every completion of its undetermined points agrees.
  std::optional<Nat> forced(const Prefix& tau, const std::map<Nat, Nat>& locks, Nat n) const {
    std::vector<std::optional<Nat>> vals;
    Nat free = 0;
    for (Nat j : delta_.rows) {
      const Nat p = cantor_pair(n, j);
      if (p < tau.size())
        vals.push_back(tau[p]);
      else if (auto it = locks.find(n); it != locks.end())
        vals.push_back(it->second);
      else {
        vals.push_back(std::nullopt);
        ++free;
      }
    }
    std::optional<Nat> out;
    for (Nat mask = 0; mask < (Nat{1} << free); ++mask) {
      std::vector<Nat> v;
      Nat bit = 0;
      for (const auto& x : vals) v.push_back(x ? *x : (mask >> bit++) & 1);
      const Nat col = delta_.combine(v);
      if (out && *out != col) return std::nullopt;
      out = col;
    }
    return out;
  }

  static Nat touched_columns(const Prefix& tau) {
    Nat n = 0;
    while (cantor_pair(n, 0) < tau.size()) ++n;
    return n;
  }

  std::vector<Nat> columns_of(const Prefix& tau, const std::map<Nat, Nat>& locks, Nat i) const {
    std::set<Nat> cols;
    for (Nat n = 0; n < touched_columns(tau); ++n) cols.insert(n);
    for (const auto& [x, c] : locks) cols.insert(x);
    std::vector<Nat> out;
    for (Nat n : cols)
      if (forced(tau, locks, n) == i) out.push_back(n);
    return out;
  }

  std::optional<Nat> max_column(const Prefix& tau, const std::map<Nat, Nat>& locks, Nat i) const {
    const auto cols = columns_of(tau, locks, i);
    if (cols.empty()) return std::nullopt;
    return cols.back();
  }

  /// Extensions covering the next one or two fresh columns, in lexicographic order.
  std::vector<Prefix> extensions(const Prefix& sigma, const std::map<Nat, Nat>& locks) const {
    std::vector<Prefix> out;
    const Nat f0 = touched_columns(sigma);
    std::set<Nat> relevant_rows(delta_.rows.begin(), delta_.rows.end());
    for (Nat r = 1; r <= kSrtFreshColumns; ++r) {
      Nat end = sigma.size();
      for (Nat n = f0; n < f0 + r; ++n) {
        end = std::max(end, cantor_pair(n, 0) + 1);
        for (Nat j : delta_.rows) end = std::max(end, cantor_pair(n, j) + 1);
      }
      std::vector<Nat> choice;
      for (Nat p = sigma.size(); p < end; ++p) {
        const auto [x, y] = cantor_unpair(p);
        if (!locks.count(x) && relevant_rows.count(y) && choice.size() < kSrtChoicePoints) choice.push_back(p);
      }
      for (Nat mask = 0; mask < (Nat{1} << choice.size()); ++mask) {
        Prefix tau = sigma;
        for (Nat p = sigma.size(); p < end; ++p) {
          auto it = locks.find(cantor_unpair(p).first);
          tau.push_back(it != locks.end() ? it->second : 0);
        }
        for (std::size_t b = 0; b < choice.size(); ++b) tau[choice[b]] = (mask >> (choice.size() - 1 - b)) & 1;
        out.push_back(std::move(tau));
      }
    }
    return out;
  }

  bool column_defined(const Prefix& tau, Nat n) const {
    return std::all_of(delta_.rows.begin(), delta_.rows.end(), [&](Nat j) { return cantor_pair(n, j) < tau.size(); }) &&
           cantor_pair(n, 0) < tau.size();
  }

 private:
  const TransparentPairDelta& delta_;
};

}  // namespace detail

struct SrtCertificate {
  PatchedEColoring coloring;
  Nat color = 0;
  std::vector<Nat> h;
  Nat point = 0;
};

/// Ψ reads σ ⊕ (characteristic string of a homogeneous set); Ψ(p) = 1 puts point p in the solution.
inline AdversaryReport run_srt_lock_adversary(const TransparentPairDelta& delta, const Functional& psi, Nat horizon,
                                              Nat seed = 0, const EngineFaults& faults = {}) {
  if (!psi.has_use_bound()) throw Error("lock adversary needs a declared use bound for psi");
  AdversaryReport rep;
  rep.transcript = duel_header("srt", delta.name, psi.name, horizon, seed);
  if (faults.wrong_lock_color) rep.transcript.set("fault", "wrong_lock_color");
  auto& tr = rep.transcript;
  const Functional df = delta.functional();
  detail::SrtState st(delta);
  Prefix sigma;
  std::map<Nat, Nat> locks;
  std::set<Nat> D;
  std::map<Nat, std::vector<Nat>> h;
  std::map<Nat, std::set<Nat>> settled;
  auto finish = [&](Nat s) {
    tr.add(s, "cert_D", detail::set_data(D));
    tr.add(s, "exhausted", {s});
    rep.coloring = sigma;
    return rep;
  };
  for (Nat s = 1; s < horizon; ++s) {
    std::vector<std::optional<Nat>> before;
    for (Nat i = 0; i < delta.colors; ++i) before.push_back(st.max_column(sigma, locks, i));
    Nat best_score = 0;
    std::optional<Prefix> best;
    for (auto& tau : st.extensions(sigma, locks)) {
      Nat score = 0;
      for (Nat i = 0; i < delta.colors; ++i) {
        if (D.count(i)) continue;
        const auto m = st.max_column(tau, locks, i);
        if (m && (!before[i] || *m > *before[i])) ++score;
      }
      if (score > best_score) {
        best_score = score;
        best = std::move(tau);
      }
    }
    if (!best) {
      tr.add(s, "stuck", {});
      return finish(s);
    }
    sigma = std::move(*best);
    tr.add(s, "extend", {static_cast<Nat>(sigma.size()), best_score});
    for (Nat i = 0; i < delta.colors; ++i) {
      if (D.count(i)) continue;
      const auto m = st.max_column(sigma, locks, i);
      if (!m) continue;
      tr.add(s, "m", {i, *m});
      auto& hi = h[i];
      for (Nat v : st.columns_of(sigma, locks, i)) {
        if (!hi.empty() && v <= hi.back()) continue;
        if (!st.column_defined(sigma, v)) continue;
        const bool homogeneous = std::all_of(hi.begin(), hi.end(), [&](Nat u) {
          const auto o = converged(eval_functional(df, sigma, pair_code(u, v), detail::kSrtBudget));
          return o && o->value == i;
        });
        if (!homogeneous) continue;
        hi.push_back(v);
        tr.add(s, "h", {i, v});
        break;
      }
    }
    for (Nat i = 0; i < delta.colors; ++i) {
      if (D.count(i) || h[i].empty()) continue;
      const Prefix hc = detail::char_string({h[i].begin(), h[i].end()}, h[i].back() + 1);
      const PrefixOracle so(sigma), ho(hc);
      const JoinOracle oracle(so, ho);
      std::optional<Nat> hit;
      for (Nat p = 0; p < sigma.size() && !hit; ++p) {
        if (locks.count(cantor_unpair(p).first) || settled[i].count(p)) continue;
        const auto o = converged(eval_functional(psi, oracle, p, detail::kSrtBudget));
        if (!o) continue;
        settled[i].insert(p);
        if (o->value == 1) hit = p;
      }
      if (!hit) continue;
      const Nat x = cantor_unpair(*hit).first;
      const Nat lock = faults.wrong_lock_color ? sigma[*hit] : 1 - sigma[*hit];
      locks[x] = lock;
      D.insert(i);
      tr.add(s, "watch", {i, *hit});
      tr.add(s, "lock", {x, lock});
      for (const auto& fb : {StreamRule::constant(0), StreamRule::constant(1), StreamRule({}, {0, 1}),
                             StreamRule({}, {1, 0})}) {
        const PatchedEColoring d{sigma, locks, fb};
        const auto c = [&](Nat n) { return d(n); };
        if (!std::all_of(h[i].begin(), h[i].end(), [&](Nat m) { return delta.column_color(c, m) == i; })) continue;
        if (!detail::infinitely_many_columns(d, delta, i, h[i].back())) continue;
        tr.add(s, "cert_base", sigma);
        std::vector<Nat> ld;
        for (const auto& [lx, lc] : locks) ld.insert(ld.end(), {lx, lc});
        tr.add(s, "cert_locks", ld);
        tr.add(s, "cert_fallback", detail::rule_data(fb));
        tr.add(s, "cert_color", {i});
        tr.add(s, "cert_h", h[i]);
        tr.add(s, "cert_point", {*hit});
        tr.add(s, "defeated", {i});
        rep.coloring = sigma;
        return rep;
      }
      tr.add(s, "no_continuation", {i});
    }
    if (D.size() == delta.colors) return finish(s);
  }
  return finish(horizon);
}

inline std::optional<SrtCertificate> parse_srt_certificate(const Transcript& t) {
  const auto* base = detail::only(t, "cert_base");
  const auto* locks = detail::only(t, "cert_locks");
  const auto* fb = detail::only(t, "cert_fallback");
  const auto* col = detail::only(t, "cert_color");
  const auto* h = detail::only(t, "cert_h");
  const auto* pt = detail::only(t, "cert_point");
  if (!base || !locks || !fb || !col || !h || !pt || locks->data.size() % 2 || col->data.size() != 1 ||
      pt->data.size() != 1)
    return std::nullopt;
  auto rule = detail::rule_from_data(fb->data);
  if (!rule) return std::nullopt;
  SrtCertificate cert;
  cert.coloring.base = base->data;
  for (std::size_t i = 0; i < locks->data.size(); i += 2) cert.coloring.locks[locks->data[i]] = locks->data[i + 1];
  cert.coloring.fallback = *rule;
  cert.color = col->data[0];
  cert.h = h->data;
  cert.point = pt->data[0];
  return cert;
}

inline std::optional<std::string> audit_srt(const Transcript& t, const TransparentPairDelta& delta,
                                            const Functional& psi) {
  const auto cert = parse_srt_certificate(t);
  if (!cert) return std::string("malformed certificate");
  const auto& d = cert->coloring;
  for (Nat v : d.base)
    if (v > 1) return std::string("base is not binary");
  for (const auto& [x, c] : d.locks)
    if (c > 1) return std::string("lock color is not binary");
  if (d.fallback.max_value() > 1) return std::string("fallback is not binary");
  if (cert->h.empty() || !std::is_sorted(cert->h.begin(), cert->h.end()) ||
      std::adjacent_find(cert->h.begin(), cert->h.end()) != cert->h.end())
    return std::string("h is not a strictly increasing nonempty sequence");
  const Stream ds = d.stream();
  const StreamOracle dor(ds);
  const Prefix hc = detail::char_string({cert->h.begin(), cert->h.end()}, cert->h.back() + 1);
  const PrefixOracle ho(hc);
  const auto o = converged(eval_functional(psi, JoinOracle(dor, ho), cert->point, detail::kSrtBudget));
  if (!o || o->value != 1) return std::string("psi does not put the cited point in the solution");
  const Functional df = delta.functional();
  const auto c = [&](Nat n) { return d(n); };
  for (std::size_t a = 0; a < cert->h.size(); ++a) {
    if (delta.column_color(c, cert->h[a]) != cert->color)
      return "column " + std::to_string(cert->h[a]) + " has another color";
    for (std::size_t b = a + 1; b < cert->h.size(); ++b) {
      const auto v = converged(eval_functional(df, dor, pair_code(cert->h[a], cert->h[b]), detail::kSrtBudget));
      if (!v || v->value != cert->color) return std::string("h is not homogeneous");
    }
  }
  if (!detail::infinitely_many_columns(d, delta, cert->color, cert->h.back()))
    return std::string("h cannot be extended to an infinite homogeneous set");
  const Nat x = cantor_unpair(cert->point).first;
  if (!d.locks.count(x)) return std::string("the cited point's column is not locked");
  if (cert->point >= d.base.size()) return std::string("the cited point was not colored before the lock");
  if (d.colors_infinite_in_column(x).count(d(cert->point)))
    return std::string("the cited point's color recurs in its column");
  return std::nullopt;
}

}  // namespace wlab
