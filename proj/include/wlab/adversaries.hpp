// Candidate catalogs for the four adversary engines, a uniform duel entry
// point, and the certificate audit used by the CLI and the tests.
#pragma once

#include "wlab/cn_adversary.hpp"
#include "wlab/lim_adversary.hpp"
#include "wlab/pcet.hpp"
#include "wlab/srt_lock.hpp"

namespace wlab {

namespace candidates {

namespace impl {

inline Functional make(std::string name, Procedure step, std::function<Nat(Nat)> use) {
  return Functional{0, std::move(name), std::move(step), std::move(use)};
}

/// Ψ_i enumerates, in code order, the codes p with keep(tape, i, p); Ψ(cantor_pair(i, n)) is the n-th.
inline Functional enumerating(std::string name, std::function<bool(Tape&, Nat, Nat)> keep) {
  return make(std::move(name),
              [keep = std::move(keep)](Tape& t, Nat q) {
                const auto [i, n] = cantor_unpair(q);
                Nat seen = 0;
                for (Nat p = 0;; ++p) {
                  t.tick();
                  if (keep(t, i, p) && seen++ == n) return p;
                }
              },
              {});
}

inline Functional silent(std::string name) {
  return make(std::move(name),
              [](Tape& t, Nat) -> Nat {
                for (;;) t.tick();
              },
              [](Nat) { return Nat{0}; });
}

}  // namespace impl

// ---------------------------------------------------------------------------
// pcet: Δ entries pair a translation with its trace

struct PcetDelta {
  std::string name;
  Functional delta;
  PcetTrace trace;
};

inline Functional identity_delta() {
  return impl::make("identity", [](Tape& t, Nat n) { return t.read(n); }, [](Nat n) { return n + 1; });
}

inline std::vector<PcetDelta> pcet_deltas() {
  return {
      {"trace0", identity_delta(), constant_trace({0})},
      {"trace01", identity_delta(), constant_trace({0, 1})},
      {"crt2", identity_delta(), crt_trace(2)},
  };
}

inline std::vector<Functional> pcet_psis() {
  using impl::enumerating;
  return {
      enumerating("copycat0", [](Tape& t, Nat, Nat p) { return t.read(p) == 0; }),
      enumerating("copycat", [](Tape& t, Nat i, Nat p) { return t.read(p) == i; }),
      enumerating("skip_copycat",
                  [](Tape& t, Nat, Nat p) {
                    if (t.read(p) != 0) return false;
                    Nat rank = 0;
                    for (Nat q = 0; q < p; ++q) rank += t.read(q) == 0;
                    return rank % 2 == 0;
                  }),
      enumerating("positive_copycat", [](Tape& t, Nat, Nat p) { return p % 2 == 1 && t.read(p) == 0; }),
      enumerating("first_color_copycat", [](Tape& t, Nat, Nat p) { return t.read(p) == t.read(0); }),
      enumerating("late_copycat", [](Tape& t, Nat, Nat p) { return p >= 10 && t.read(p) == 0; }),
      impl::silent("silent"),
  };
}

// ---------------------------------------------------------------------------
// lim: Δ(cantor_pair(i, j)) is bit j of LPO instance i; Ψ reads c ⊕ a

inline std::vector<Functional> lim_deltas() {
  using impl::make;
  return {
      make("smalluse",
           [](Tape& t, Nat q) { return 1 - std::min<Nat>(t.read(cantor_unpair(q).first), 1); },
           [](Nat q) { return cantor_unpair(q).first + 1; }),
      make("delayed",
           [](Tape& t, Nat q) {
             const auto [i, j] = cantor_unpair(q);
             return Nat{j >= 1 && t.read(i) == 0};
           },
           [](Nat q) { return cantor_unpair(q).first + 1; }),
      make("alternating",
           [](Tape& t, Nat q) {
             const Nat i = cantor_unpair(q).first;
             return Nat{t.read(i) == i % 2};
           },
           [](Nat q) { return cantor_unpair(q).first + 1; }),
      make("hugeuse", [](Tape& t, Nat q) { return t.read(q + 1000000) % 2; }, [](Nat q) { return q + 1000001; }),
  };
}

inline std::vector<Functional> lim_psis() {
  using impl::make;
  return {
      // Codes p whose LPO answer bit is 1, the first two of them.
      make("echo2",
           [](Tape& t, Nat p) {
             Nat ones = 0;
             for (Nat q = 0; q < p; ++q) ones += t.read(2 * q + 1);
             return Nat{t.read(2 * p + 1) == 1 && ones < 2};
           },
           [](Nat p) { return 2 * p + 2; }),
      make("first_two_c0",
           [](Tape& t, Nat p) {
             Nat zeros = 0;
             for (Nat q = 0; q < p; ++q) zeros += t.read(2 * q) == 0;
             return Nat{t.read(2 * p) == 0 && zeros < 2};
           },
           [](Nat p) { return 2 * p + 1; }),
      make("first_two_codes",
           [](Tape& t, Nat p) {
             t.tick();
             return Nat{p < 2};
           },
           [](Nat) { return Nat{0}; }),
      impl::silent("silent"),
  };
}

// ---------------------------------------------------------------------------
// cn: transparent Δ from a C_N instance g to a k-coloring; Ψ reads g ⊕ χ_H

inline StreamRule count_image(const StreamRule& g, Nat k) {
  Prefix head;
  Nat count = 0;
  for (Nat n = 0;; ++n) {
    const Nat v = std::min(k - 1, count);
    if (n >= g.head_size() + g.period() && (v == k - 1 || g.max_value() == 0 ||
                                            std::all_of(g.tail().begin(), g.tail().end(), [](Nat x) { return x == 0; })))
      return StreamRule(head, {v}).normalized();
    head.push_back(v);
    count += g(n) != 0;
  }
}

inline std::vector<TransparentDelta> cn_deltas(Nat k) {
  using impl::make;
  return {
      {make("copy", [](Tape& t, Nat n) { return std::min<Nat>(t.read(n), 1); }, [](Nat n) { return n + 1; }),
       [](const StreamRule& g) { return map_rule(g, [](Nat v) { return std::min<Nat>(v, 1); }); }},
      {make("constant",
            [](Tape& t, Nat) {
              t.tick();
              return Nat{0};
            },
            [](Nat) { return Nat{0}; }),
       [](const StreamRule&) { return StreamRule::constant(0); }},
      {make("count",
            [k](Tape& t, Nat n) {
              Nat count = 0;
              t.tick();
              for (Nat i = 0; i < n && count < k - 1; ++i) count += t.read(i) != 0;
              return std::min(k - 1, count);
            },
            [](Nat n) { return n; }),
       [k](const StreamRule& g) { return count_image(g, k); }},
      {impl::silent("silent"), [](const StreamRule&) { return StreamRule::constant(0); }},
  };
}

inline std::vector<Functional> cn_psis() {
  using impl::make;
  return {
      make("const0",
           [](Tape& t, Nat) {
             t.tick();
             return Nat{0};
           },
           [](Nat) { return Nat{0}; }),
      // The least code in the solution.
      make("first_point",
           [](Tape& t, Nat) {
             for (Nat n = 0;; ++n)
               if (t.read(2 * n + 1) == 1) return n;
           },
           {}),
      impl::silent("silent"),
  };
}

// ---------------------------------------------------------------------------
// srt: transparent pair translations; Ψ reads c ⊕ χ_h

inline std::vector<TransparentPairDelta> srt_deltas() {
  return {
      {"first_point", {0}, [](const std::vector<Nat>& v) { return v[0]; }, 2},
      {"xor", {0, 1}, [](const std::vector<Nat>& v) { return v[0] ^ v[1]; }, 2},
      {"constant", {}, [](const std::vector<Nat>&) { return Nat{0}; }, 1},
  };
}

inline std::vector<Functional> srt_psis() {
  using impl::make;
  return {
      // Points of the first column of h that share that column's first point's color.
      make("column_match",
           [](Tape& t, Nat p) {
             const auto [x, y] = cantor_unpair(p);
             std::optional<Nat> h0;
             for (Nat n = 0; n <= x && !h0; ++n)
               if (t.read(2 * n + 1) == 1) h0 = n;
             if (h0 != x) return Nat{0};
             return Nat{t.read(2 * p) == t.read(2 * cantor_pair(x, 0))};
           },
           [](Nat p) { return 2 * p + 2; }),
      // Every point of every column in h.
      make("all_h", [](Tape& t, Nat p) { return t.read(2 * cantor_unpair(p).first + 1); },
           [](Nat p) { return 2 * cantor_unpair(p).first + 2; }),
      impl::silent("silent"),
  };
}

template <class T>
const T* by_name(const std::vector<T>& v, const std::string& name) {
  for (const auto& x : v) {
    if constexpr (requires { x.functional; }) {
      if (x.functional.name == name) return &x;
    } else {
      if (x.name == name) return &x;
    }
  }
  return nullptr;
}

}  // namespace candidates

// ---------------------------------------------------------------------------
// Uniform duel front end

struct DuelSpec {
  std::string engine;  // pcet, lim, cn, srt
  std::string delta;
  std::string psi;
  Nat horizon = 0;
  Nat seed = 0;
  Nat k = 2;  // cn only
  EngineFaults faults;
};

inline const std::vector<std::string>& engine_names() {
  static const std::vector<std::string> names{"pcet", "lim", "cn", "srt"};
  return names;
}

inline std::pair<std::string, std::string> default_candidate(const std::string& engine) {
  if (engine == "pcet") return {"trace0", "copycat0"};
  if (engine == "lim") return {"smalluse", "echo2"};
  if (engine == "cn") return {"copy", "const0"};
  if (engine == "srt") return {"first_point", "column_match"};
  throw Error("unknown engine " + engine);
}

namespace detail {

template <class T>
const T& require(const T* p, const std::string& what, const std::string& name) {
  if (!p) throw Error("unknown " + what + " candidate " + name);
  return *p;
}

}  // namespace detail

inline AdversaryReport run_duel(const DuelSpec& spec) {
  using namespace candidates;
  if (spec.engine == "pcet") {
    static const auto deltas = pcet_deltas();
    static const auto psis = pcet_psis();
    const auto& d = detail::require(by_name(deltas, spec.delta), "pcet delta", spec.delta);
    const auto& p = detail::require(by_name(psis, spec.psi), "pcet psi", spec.psi);
    auto rep = run_pcet_adversary(d.delta, d.trace, p, spec.horizon, spec.seed, spec.faults);
    rep.transcript.set("delta", spec.delta);
    return rep;
  }
  if (spec.engine == "lim") {
    static const auto deltas = lim_deltas();
    static const auto psis = lim_psis();
    return run_lim_adversary(detail::require(by_name(deltas, spec.delta), "lim delta", spec.delta),
                             detail::require(by_name(psis, spec.psi), "lim psi", spec.psi), spec.horizon, spec.seed);
  }
  if (spec.engine == "cn") {
    const auto deltas = cn_deltas(spec.k);
    static const auto psis = cn_psis();
    return run_cn_adversary(detail::require(by_name(deltas, spec.delta), "cn delta", spec.delta),
                            detail::require(by_name(psis, spec.psi), "cn psi", spec.psi), spec.k, spec.horizon,
                            spec.seed);
  }
  if (spec.engine == "srt") {
    static const auto deltas = srt_deltas();
    static const auto psis = srt_psis();
    return run_srt_lock_adversary(detail::require(by_name(deltas, spec.delta), "srt delta", spec.delta),
                                  detail::require(by_name(psis, spec.psi), "srt psi", spec.psi), spec.horizon,
                                  spec.seed, spec.faults);
  }
  throw Error("unknown engine " + spec.engine);
}

/// The duel parameters recorded in a report header.
inline DuelSpec duel_spec_of(const Transcript& t) {
  DuelSpec s;
  auto need = [&](const char* key) {
    auto v = t.get(key);
    if (!v) throw Error(std::string("report header lacks ") + key);
    return *v;
  };
  if (need("kind") != "duel") throw Error("not a duel report");
  s.engine = need("engine");
  s.delta = need("delta");
  s.psi = need("psi");
  s.horizon = t.get_nat("horizon");
  s.seed = t.get_nat("seed");
  if (s.engine == "cn") s.k = t.get_nat("k");
  if (auto f = t.get("fault")) {
    if (*f == "drop_cancellation")
      s.faults.drop_cancellation = true;
    else if (*f == "wrong_lock_color")
      s.faults.wrong_lock_color = true;
    else
      throw Error("unknown fault " + *f);
  }
  return s;
}

/// First failing certificate check of a Defeated report, judged against the
/// candidates named in its header; nothing when every check passes.
inline std::optional<std::string> defeat_audit_failure(const Transcript& t) {
  using namespace candidates;
  if (!t.first("defeated")) return std::string("report is not Defeated");
  const DuelSpec s = duel_spec_of(t);
  try {
    if (s.engine == "pcet") {
      const auto deltas = pcet_deltas();
      const auto psis = pcet_psis();
      const auto& d = detail::require(by_name(deltas, s.delta), "pcet delta", s.delta);
      return audit_pcet(t, d.delta, d.trace, detail::require(by_name(psis, s.psi), "pcet psi", s.psi));
    }
    if (s.engine == "lim") {
      const auto deltas = lim_deltas();
      const auto psis = lim_psis();
      return audit_lim(t, detail::require(by_name(deltas, s.delta), "lim delta", s.delta),
                       detail::require(by_name(psis, s.psi), "lim psi", s.psi));
    }
    if (s.engine == "cn") {
      const auto deltas = cn_deltas(s.k);
      const auto psis = cn_psis();
      return audit_cn(t, detail::require(by_name(deltas, s.delta), "cn delta", s.delta),
                      detail::require(by_name(psis, s.psi), "cn psi", s.psi), s.k);
    }
    if (s.engine == "srt") {
      const auto deltas = srt_deltas();
      const auto psis = srt_psis();
      return audit_srt(t, detail::require(by_name(deltas, s.delta), "srt delta", s.delta),
                       detail::require(by_name(psis, s.psi), "srt psi", s.psi));
    }
  } catch (const Error& e) {
    return std::string(e.what());
  }
  return "unknown engine " + s.engine;
}

inline bool check_defeat(const AdversaryReport& report) { return !defeat_audit_failure(report.transcript); }
inline bool check_defeat(const Transcript& t) { return !defeat_audit_failure(t); }

}  // namespace wlab
