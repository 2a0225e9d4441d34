// Finite-injury construction against reductions whose target problem has a
// pointwise computably enumerable trace, plus its certificate audit.
#pragma once

#include "wlab/adversary_report.hpp"

#include <map>

namespace wlab {

/// gamma converging on the target prefix licenses the stage-s enumeration.
struct PcetTrace {
  std::string name;
  Functional gamma;
  std::function<std::set<Nat>(const Prefix& target, Nat stage)> enumerate;
};

namespace detail {

inline Functional ticking_zero(std::string name) {
  return Functional{0, std::move(name), [](Tape& t, Nat) {
                      t.tick();
                      return Nat{0};
                    },
                    [](Nat) { return Nat{0}; }};
}

/// One half of the tape as an oracle; stalls propagate to the outer tape.
class HalfTapeOracle final : public Oracle {
 public:
  HalfTapeOracle(Tape& tape, Nat parity) : tape_(tape), parity_(parity) {}
  std::optional<Nat> at(Nat pos) const override { return tape_.read(2 * pos + parity_); }

 private:
  Tape& tape_;
  Nat parity_;
};

inline std::pair<Prefix, Prefix> split_prefix(const Prefix& p) {
  Prefix even, odd;
  for (std::size_t i = 0; i < p.size(); ++i) (i % 2 ? odd : even).push_back(p[i]);
  return {even, odd};
}

}  // namespace detail

/// Trace for cRT¹_k: the colors seen among the first `stage` entries.
inline PcetTrace crt_trace(Nat k) {
  if (k == 0) throw Error("crt_trace needs k >= 1");
  return {"crt" + std::to_string(k), detail::ticking_zero("crt_gamma"), [](const Prefix& target, Nat stage) {
            std::set<Nat> out;
            for (Nat n = 0; n < std::min<Nat>(stage, target.size()); ++n) out.insert(target[n]);
            return out;
          }};
}

/// Trace enumerating a fixed set at every stage.
inline PcetTrace constant_trace(std::set<Nat> values) {
  std::string name = "const";
  for (Nat v : values) name += "_" + std::to_string(v);
  return {name, detail::ticking_zero(name + "_gamma"),
          [values = std::move(values)](const Prefix&, Nat) { return values; }};
}

/// Trace for a product: pairs of the component enumerations on the split halves.
inline PcetTrace trace_product(const PcetTrace& t1, const PcetTrace& t2) {
  Functional gamma{0, t1.name + "_x_" + t2.name,
                   [g1 = t1.gamma, g2 = t2.gamma](Tape& t, Nat input) {
                     const detail::HalfTapeOracle even(t, 0), odd(t, 1);
                     const auto a = eval_functional(g1, even, input, ~Nat{0});
                     const auto b = eval_functional(g2, odd, input, ~Nat{0});
                     if (!converged(a) || !converged(b)) throw Tape::Stall{};
                     return cantor_pair(converged(a)->value, converged(b)->value);
                   },
                   {}};
  return {gamma.name, gamma, [e1 = t1.enumerate, e2 = t2.enumerate](const Prefix& target, Nat stage) {
            const auto [even, odd] = detail::split_prefix(target);
            std::set<Nat> out;
            for (Nat a : e1(even, stage))
              for (Nat b : e2(odd, stage)) out.insert(cantor_pair(a, b));
            return out;
          }};
}

struct PcetFollower {
  Nat index = 0, lo = 0, hi = 0, color = 0, stage = 0, n_lo = 0, n_hi = 0;
  CodeInterval interval() const { return {lo, hi}; }
  friend bool operator==(const PcetFollower&, const PcetFollower&) = default;
};

struct PcetMismatch {
  Nat index = 0, p = 0, q = 0, n_p = 0, n_q = 0;
  friend bool operator==(const PcetMismatch&, const PcetMismatch&) = default;
};

struct PcetCertificate {
  std::set<Nat> trace;
  std::vector<PcetFollower> followers;
  std::vector<PcetMismatch> mismatches;
  std::vector<Nat> starved;
  Prefix coloring;
};

namespace detail {

inline Nat pcet_budget(Nat length) { return 8 * (length + 16); }

/// Δ-image prefix of a coloring prefix, capped so total functionals terminate.
inline void extend_target(const Functional& delta, const Prefix& c, Prefix& target) {
  const Nat cap = 4 * c.size() + 4;
  while (target.size() < cap) {
    const auto o = eval_functional(delta, c, target.size(), pcet_budget(c.size()));
    const auto* v = converged(o);
    if (!v) break;
    target.push_back(v->value);
  }
}

inline std::set<Nat> trace_set(const PcetTrace& trace, const Prefix& target, Nat stage) {
  if (!converged(eval_functional(trace.gamma, target, 0, pcet_budget(target.size())))) return {};
  return trace.enumerate(target, stage);
}

}  // namespace detail

/// Colors ℚ (code s at stage s) against Ψ = (Ψ_i), where Ψ(cantor_pair(i, n)) is the n-th output of Ψ_i.
inline AdversaryReport run_pcet_adversary(const Functional& delta, const PcetTrace& trace, const Functional& psi,
                                          Nat horizon, Nat seed = 0, const EngineFaults& faults = {}) {
  AdversaryReport rep;
  rep.transcript = duel_header("pcet", delta.name + "+" + trace.name, psi.name, horizon, seed);
  if (faults.drop_cancellation) rep.transcript.set("fault", "drop_cancellation");
  auto& tr = rep.transcript;
  Prefix c{0}, target;
  std::set<Nat> N, A, V;
  std::map<Nat, std::vector<Nat>> outputs;
  std::map<Nat, PcetFollower> followers;
  std::map<Nat, PcetMismatch> mismatches;

  auto make_follower = [&](Nat i, Nat lo, Nat hi, Nat s) {
    const auto& out = outputs[i];
    const auto n_of = [&](Nat v) { return static_cast<Nat>(std::find(out.begin(), out.end(), v) - out.begin()); };
    PcetFollower f{i, lo, hi, 1 - c[lo], s, n_of(lo), n_of(hi)};
    tr.add(s, "follow", {i, lo, hi, f.color});
    return f;
  };

  for (Nat s = 1; s < horizon; ++s) {
    const Nat budget = detail::pcet_budget(c.size());
    detail::extend_target(delta, c, target);
    const auto N_now = detail::trace_set(trace, target, s);
    if (N_now != N) {
      N = N_now;
      tr.add(s, "trace", detail::set_data(N));
    }
    for (Nat i : N) {
      auto& out = outputs[i];
      for (int tries = 0; tries < 4; ++tries) {
        const auto v = converged(eval_functional(psi, c, cantor_pair(i, out.size()), budget));
        if (!v || v->value >= c.size()) break;  // uncolored outputs are retried later
        tr.add(s, "output", {i, static_cast<Nat>(out.size()), v->value});
        out.push_back(v->value);
      }
    }
    std::set<Nat> A_now;
    for (Nat i : N)
      if (!outputs[i].empty()) A_now.insert(i);
    for (Nat i : A) A_now.insert(i);
    if (A_now != A) {
      A = A_now;
      tr.add(s, "grow", detail::set_data(A));
      if (!faults.drop_cancellation) {
        for (const auto& [i, f] : followers) tr.add(s, "cancel", {i, f.lo, f.hi});
        followers.clear();
      }
    }
    for (Nat i : A) {
      if (mismatches.count(i)) continue;
      const auto& out = outputs[i];
      for (std::size_t n = 1; n < out.size(); ++n)
        if (c[out[n]] != c[out[0]]) {
          mismatches[i] = {i, out[0], out[n], 0, static_cast<Nat>(n)};
          tr.add(s, "mismatch", {i, out[0], out[n]});
          break;
        }
    }
    std::set<Nat> V_now;
    if (!A.empty()) {
      const Nat need = e_bound(A.size());
      for (Nat i : A)
        if (!mismatches.count(i) && detail::distinct_in_order(outputs[i]).size() >= need) V_now.insert(i);
    }
    if (V_now != V) {
      V = V_now;
      tr.add(s, "v", detail::set_data(V));
    }
    std::vector<Nat> needing;
    for (Nat i : V)
      if (!followers.count(i)) needing.push_back(i);
    if (!needing.empty()) {
      // First try gaps between the existing followers; otherwise reassign all of V.
      std::map<Nat, PcetFollower> tentative = followers;
      bool fits = true;
      for (Nat i : needing) {
        const auto sorted = detail::sorted_by_value(detail::distinct_in_order(outputs[i]));
        std::optional<CodeInterval> gap;
        for (std::size_t n = 0; n + 1 < sorted.size() && !gap; ++n) {
          const CodeInterval iv{sorted[n], sorted[n + 1]};
          if (std::all_of(tentative.begin(), tentative.end(),
                          [&](const auto& kv) { return disjoint(kv.second.interval(), iv); }))
            gap = iv;
        }
        if (!gap) {
          fits = false;
          break;
        }
        tentative[i] = make_follower(i, gap->lo, gap->hi, s);
      }
      if (!fits) {
        tr.records.erase(std::remove_if(tr.records.begin(), tr.records.end(),
                                        [&](const TranscriptRecord& r) { return r.stage == s && r.action == "follow"; }),
                         tr.records.end());
        tr.add(s, "reassign", detail::set_data(V));
        std::vector<Nat> order(V.begin(), V.end());
        std::vector<std::vector<Nat>> sets;
        for (Nat i : order) sets.push_back(outputs[i]);
        const auto ivs = select_disjoint_intervals(sets);
        tentative.clear();
        for (std::size_t n = 0; n < order.size(); ++n) tentative[order[n]] = make_follower(order[n], ivs[n].lo, ivs[n].hi, s);
      }
      followers = std::move(tentative);
    }
    Nat color = 0;
    for (const auto& [i, f] : followers)
      if (f.interval().contains(s)) color = f.color;
    c.push_back(color);
  }

  Nat entries = 0;
  tr.add(horizon, "cert_trace", detail::set_data(N));
  for (const auto& [i, f] : followers) {
    tr.add(horizon, "cert_follower", {f.index, f.lo, f.hi, f.color, f.stage, f.n_lo, f.n_hi});
    ++entries;
  }
  for (const auto& [i, m] : mismatches) {
    tr.add(horizon, "cert_mismatch", {m.index, m.p, m.q, m.n_p, m.n_q});
    ++entries;
  }
  for (Nat i : N)
    if (!followers.count(i) && !mismatches.count(i)) tr.add(horizon, "starved", {i});
  tr.add(horizon, "cert_coloring", c);
  if (entries > 0)
    tr.add(horizon, "defeated", {entries});
  else
    tr.add(horizon, "exhausted", {horizon});
  rep.coloring = std::move(c);
  return rep;
}

inline std::optional<PcetCertificate> parse_pcet_certificate(const Transcript& t) {
  PcetCertificate cert;
  const auto* tr = detail::only(t, "cert_trace");
  const auto* col = detail::only(t, "cert_coloring");
  if (!tr || !col) return std::nullopt;
  cert.trace = {tr->data.begin(), tr->data.end()};
  cert.coloring = col->data;
  for (const auto* r : t.find("cert_follower")) {
    if (r->data.size() != 7) return std::nullopt;
    const auto& d = r->data;
    cert.followers.push_back({d[0], d[1], d[2], d[3], d[4], d[5], d[6]});
  }
  for (const auto* r : t.find("cert_mismatch")) {
    if (r->data.size() != 5) return std::nullopt;
    const auto& d = r->data;
    cert.mismatches.push_back({d[0], d[1], d[2], d[3], d[4]});
  }
  for (const auto* r : t.find("starved"))
    if (!r->data.empty()) cert.starved.push_back(r->data[0]);
  return cert;
}

/// Follower discipline over the logged construction: disjoint at every stage,
/// every A(s) growth cancels all live followers, and cancellations happen only then.
inline std::optional<std::string> pcet_discipline_violation(const Transcript& t) {
  std::map<Nat, CodeInterval> alive;
  std::optional<Nat> stage;
  std::set<Nat> pending;  // followers that must be cancelled this stage
  bool grew = false;
  auto close_stage = [&]() -> std::optional<std::string> {
    if (!stage) return std::nullopt;
    if (!pending.empty())
      return "stage " + std::to_string(*stage) + ": A grew but follower " + std::to_string(*pending.begin()) +
             " was not cancelled";
    std::vector<CodeInterval> ivs;
    for (const auto& [i, iv] : alive) ivs.push_back(iv);
    if (!pairwise_disjoint(ivs)) return "stage " + std::to_string(*stage) + ": followers overlap";
    return std::nullopt;
  };
  for (const auto& r : t.records) {
    if (r.action.starts_with("cert_") || r.action == "starved" || r.action == "defeated" || r.action == "exhausted")
      continue;
    if (!stage || r.stage != *stage) {
      if (auto e = close_stage()) return e;
      stage = r.stage;
      grew = false;
    }
    if (r.action == "grow") {
      grew = true;
      for (const auto& [i, iv] : alive) pending.insert(i);
    } else if (r.action == "cancel") {
      if (!grew || r.data.empty()) return "stage " + std::to_string(r.stage) + ": cancellation without growth of A";
      pending.erase(r.data[0]);
      alive.erase(r.data[0]);
    } else if (r.action == "reassign") {
      alive.clear();
    } else if (r.action == "follow") {
      if (r.data.size() != 4) return "malformed follow record";
      if (alive.count(r.data[0])) return "stage " + std::to_string(r.stage) + ": second follower for one index";
      alive[r.data[0]] = {r.data[1], r.data[2]};
    }
  }
  if (auto e = close_stage()) return e;
  std::map<Nat, CodeInterval> cert;
  for (const auto* r : t.find("cert_follower"))
    if (r->data.size() == 7) cert[r->data[0]] = {r->data[1], r->data[2]};
  if (cert != alive) return std::string("certificate followers differ from the logged construction");
  return std::nullopt;
}

/// Audit of a pcet certificate against the candidate; the first failing check, if any.
inline std::optional<std::string> audit_pcet(const Transcript& t, const Functional& delta, const PcetTrace& trace,
                                             const Functional& psi) {
  const auto cert = parse_pcet_certificate(t);
  if (!cert) return std::string("malformed certificate");
  if (cert->followers.empty() && cert->mismatches.empty()) return std::string("no defeated index");
  const Prefix& c = cert->coloring;
  for (Nat v : c)
    if (v > 1) return std::string("coloring is not binary");
  Prefix target;
  detail::extend_target(delta, c, target);
  const auto N = detail::trace_set(trace, target, c.size());
  const Nat budget = detail::pcet_budget(c.size());
  auto output = [&](Nat i, Nat n) -> std::optional<Nat> {
    const auto v = converged(eval_functional(psi, c, cantor_pair(i, n), budget));
    if (!v) return std::nullopt;
    return v->value;
  };
  std::vector<CodeInterval> ivs;
  for (const auto& f : cert->followers) {
    const std::string who = "follower " + std::to_string(f.index);
    if (!N.count(f.index)) return who + ": index not in the trace";
    if (output(f.index, f.n_lo) != f.lo || output(f.index, f.n_hi) != f.hi)
      return who + ": endpoints are not the cited outputs";
    if (f.lo >= f.stage || f.hi >= f.stage || f.stage > c.size()) return who + ": endpoints colored too late";
    if (!rat_less(f.lo, f.hi)) return who + ": endpoints out of order";
    if (c[f.lo] != c[f.hi] || f.color != 1 - c[f.lo]) return who + ": wrong follower color";
    for (Nat p = f.stage; p < c.size(); ++p)
      if (f.interval().contains(p) && c[p] != f.color)
        return who + ": code " + std::to_string(p) + " breaks the lock";
    ivs.push_back(f.interval());
  }
  if (!pairwise_disjoint(ivs)) return std::string("follower intervals overlap");
  for (const auto& m : cert->mismatches) {
    const std::string who = "mismatch " + std::to_string(m.index);
    if (!N.count(m.index)) return who + ": index not in the trace";
    if (output(m.index, m.n_p) != m.p || output(m.index, m.n_q) != m.q) return who + ": outputs do not converge as cited";
    if (m.p >= c.size() || m.q >= c.size() || c[m.p] == c[m.q]) return who + ": colors agree";
  }
  if (auto e = pcet_discipline_violation(t)) return e;
  return std::nullopt;
}

}  // namespace wlab
