// Concrete Weihrauch reductions between benchmark problems, each with a
// forward instance translation, a brute-force corpus of target solutions and
// an instrumented backward translation; plus the exact Ind𝓔 solver.
#pragma once

#include "wlab/combinators.hpp"

#include <memory>
#include <random>

namespace wlab {

enum class Mode { W, sW };

inline std::string mode_name(Mode m) { return m == Mode::W ? "W" : "sW"; }

/// The source instance as seen by a backward translation; every access counts.
class SourceAccess {
 public:
  explicit SourceAccess(const Instance& inst) : inst_(inst) {}
  const Instance& instance() const {
    ++reads_;
    return inst_;
  }
  Nat reads() const noexcept { return reads_; }

 private:
  const Instance& inst_;
  mutable Nat reads_ = 0;
};

struct BackwardResult {
  Solution solution;
  bool complete = true;         // false: the translation is still waiting for more of its input
  std::optional<std::string> error;
};

class ReductionPair {
 public:
  virtual ~ReductionPair() = default;
  virtual std::string name() const = 0;
  virtual ProblemId source() const = 0;
  virtual ProblemId target() const = 0;
  virtual Mode mode() const = 0;

  virtual Instance random_source(std::mt19937_64& rng) const = 0;
  virtual Instance forward(const Instance& src) const = 0;
  /// Bounded family of valid target solutions; may consult the source for hints.
  virtual std::vector<Solution> target_solutions(const Instance& src, const Instance& tgt, Nat depth) const = 0;
  virtual BackwardResult backward(const SourceAccess& src, const Solution& tgt_sol, Nat depth) const = 0;

  virtual Verdict validate_source_instance(const Instance& src, Nat depth) const {
    return validate_instance(source(), src, depth);
  }
  virtual Verdict validate_target_instance(const Instance& tgt, Nat depth) const {
    return validate_instance(target(), tgt, depth);
  }
  virtual Verdict validate_target(const Instance& tgt, const Solution& sol, Nat depth) const {
    return validate_solution(target(), tgt, sol, depth);
  }
  virtual Verdict validate_source(const Instance& src, const Solution& sol, Nat depth) const {
    return validate_solution(source(), src, sol, depth);
  }
};

// ---------------------------------------------------------------------------
// Shared helpers

namespace detail {

inline StreamRule random_coloring(std::mt19937_64& rng, Nat k, Nat max_head, Nat min_period, Nat max_period) {
  Prefix h(rng() % (max_head + 1)), t(min_period + rng() % (max_period - min_period + 1));
  for (auto& v : h) v = rng() % k;
  for (auto& v : t) v = rng() % k;
  return StreamRule(std::move(h), std::move(t));
}

constexpr Nat kDensityLimit = 4000;

inline bool in_interval(Nat lo, Nat hi, Nat n) { return rat_less(lo, n) && rat_less(n, hi); }

}  // namespace detail

/// Dense monochromatic solutions of a ℚ-coloring: each recurring color class,
/// and its trace on (-1,1), whenever density witnesses exist below the limit.
inline std::vector<Solution> dense_class_solutions(const Stream& c, const std::set<Nat>& colors, Nat depth,
                                                   Nat limit = detail::kDensityLimit) {
  std::vector<Solution> out;
  const Nat lo = 2, hi = 1;  // -1 and 1
  for (Nat color : colors) {
    std::vector<Nat> whole, inner;
    for (Nat n = 0; n < depth; ++n)
      if (c(n) == color) {
        whole.push_back(n);
        if (detail::in_interval(lo, hi, n)) inner.push_back(n);
      }
    if (auto cert = search_density(c, color, whole, limit)) {
      Certificates certs;
      certs.density = std::move(cert);
      out.push_back(Solution::of({whole.begin(), whole.end()}, depth, certs));
    }
    auto keep = [&](Nat n) { return detail::in_interval(lo, hi, n); };
    if (auto cert = search_density(c, color, inner, limit, keep); cert && !inner.empty()) {
      Certificates certs;
      certs.density = std::move(cert);
      out.push_back(Solution::of({inner.begin(), inner.end()}, depth, certs));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ind𝓔_k ≤ RT²_k: d{x,y} = c(x,y) for x < y

class IndEToRT2 : public ReductionPair {
 public:
  std::string name() const override { return "ind_e_to_rt2"; }
  ProblemId source() const override { return problem::IndE(3); }
  ProblemId target() const override { return problem::RT2(3); }
  Mode mode() const override { return Mode::sW; }

  Instance random_source(std::mt19937_64& rng) const override {
    return Instance::atomic(detail::random_coloring(rng, 3, 30, 1, 4));
  }

  /// Second coordinate of the pair coded by (x, z).
  virtual Nat pair_second(Nat x, Nat z) const { return x + z + 1; }

  Instance forward(const Instance& src) const override {
    const StreamRule c = src.rule();
    Instance out;
    out.stream = Stream([c, this](Nat n) {
      auto [x, z] = cantor_unpair(n);
      return c(cantor_pair(x, pair_second(x, z)));
    });
    return out;
  }

  std::vector<Solution> target_solutions(const Instance& src, const Instance& tgt, Nat depth) const override {
    const StreamRule& c = src.rule();
    const Nat m = 2 * c.period();
    const Nat x0 = periodic_column_start(c);
    const Nat horizon = std::max(depth, x0 + 4 * m + 2);
    std::vector<std::vector<Nat>> candidates;
    auto residue_set = [&](std::vector<Nat> residues, Nat from, Nat modulus) {
      std::vector<Nat> s;
      for (Nat x = from; x < horizon; ++x)
        if (std::find(residues.begin(), residues.end(), x % modulus) != residues.end()) s.push_back(x);
      return s;
    };
    for (Nat r = 0; r < m; ++r) {
      candidates.push_back(residue_set({r}, x0, m));
      candidates.push_back(residue_set({r}, x0 + m, 2 * m));
      for (Nat r2 = r + 1; r2 < m; ++r2) candidates.push_back(residue_set({r, r2}, x0, m));
    }
    auto homogeneous = [&](const std::vector<Nat>& s, Nat color) {
      for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j)
          if (pair_color(tgt.stream, s[i], s[j]) != color) return false;
      return true;
    };
    // Periodic bases, each optionally preceded by a greedy choice of early elements.
    const std::size_t base = candidates.size();
    for (std::size_t i = 0; i < base; ++i) {
      const auto s = candidates[i];
      if (s.size() < 2) continue;
      const Nat color = pair_color(tgt.stream, s[0], s[1]);
      if (!homogeneous(s, color)) continue;
      for (Nat first = 0; first < x0; ++first) {
        std::vector<Nat> pre;
        for (Nat a = first; a < x0; ++a) {
          pre.push_back(a);
          std::vector<Nat> all = pre;
          all.insert(all.end(), s.begin(), s.end());
          if (!homogeneous(all, color)) pre.pop_back();
        }
        if (pre.empty()) continue;
        pre.insert(pre.end(), s.begin(), s.end());
        candidates.push_back(std::move(pre));
      }
    }
    std::vector<Solution> out;
    std::set<std::vector<Nat>> seen;
    for (const auto& s : candidates) {
      if (s.size() < 2 || !seen.insert(s).second) continue;
      if (!homogeneous(s, pair_color(tgt.stream, s[0], s[1]))) continue;
      std::set<Nat> prefix;
      for (Nat x : s)
        if (x < depth) prefix.insert(x);
      out.push_back(Solution::of(std::move(prefix), depth));
    }
    return out;
  }

  BackwardResult backward(const SourceAccess&, const Solution& tgt_sol, Nat depth) const override {
    const std::vector<Nat> ht(tgt_sol.set.elements.begin(), tgt_sol.set.elements.end());
    BackwardResult r;
    ColumnCertificate cert;
    std::set<Nat> h;
    for (std::size_t i = 0; i < ht.size(); ++i) {
      cert.columns.push_back(ht[i]);
      auto& rows = cert.rows[ht[i]];
      for (std::size_t j = i + 1; j < ht.size(); ++j) {
        rows.push_back(ht[j]);
        const Nat code = cantor_pair(ht[i], ht[j]);
        if (code < depth) h.insert(code);
      }
    }
    r.solution = Solution::of(std::move(h), depth);
    r.solution.certs.column = std::move(cert);
    r.complete = ht.size() >= 2;
    return r;
  }
};

// ---------------------------------------------------------------------------
// SRT²_k ≤ Ind𝓔_k: d(x,y) = c{x,y} for x < y, 0 otherwise; greedy column extraction back

class SRT2ToIndE : public ReductionPair {
 public:
  std::string name() const override { return "srt2_to_ind_e"; }
  ProblemId source() const override { return problem::SRT2(3); }
  ProblemId target() const override { return problem::IndE(3); }
  Mode mode() const override { return Mode::W; }

  Instance random_source(std::mt19937_64& rng) const override {
    // Stable rules under the pair coding have a constant tail; heads vary freely.
    Prefix h(rng() % 60);
    for (auto& v : h) v = rng() % 3;
    return Instance::atomic(StreamRule(std::move(h), {rng() % 3}));
  }

  static Nat pair_value(const StreamRule& c, Nat n) {
    auto [x, y] = cantor_unpair(n);
    return x < y ? pair_color(c, x, y) : 0;
  }

  Instance forward(const Instance& src) const override {
    const StreamRule c = src.rule();
    Instance out;
    out.stream = Stream([c](Nat n) { return pair_value(c, n); });
    return out;
  }

  std::vector<Solution> target_solutions(const Instance& src, const Instance& tgt, Nat depth) const override {
    const StreamRule& c = src.rule();
    std::vector<Solution> out;
    // Column x of d is z ↦ c{x,z} beyond the diagonal: its stable color is exact from c.
    const Nat xs = periodic_column_start(c) + 1;
    for (Nat color = 0; color < 3; ++color) {
      for (auto [from, step] : {std::pair<Nat, Nat>{0, 1}, {xs, 1}, {xs, 2}, {1, 3}}) {
        std::vector<Nat> columns;
        bool ok = true;
        for (Nat x = from; x < depth && ok; x += step) {
          ok = stable_color(c, x) == color;
          columns.push_back(x);
        }
        if (!ok || columns.size() < 2) continue;
        for (bool beyond_diagonal : {false, true}) {
          std::set<Nat> pts;
          ColumnCertificate cert;
          cert.columns = columns;
          for (Nat x : columns)
            for (Nat y = 0; cantor_pair(x, y) < depth; ++y) {
              if (beyond_diagonal && y <= x) continue;
              if (tgt.stream(cantor_pair(x, y)) != color) continue;
              pts.insert(cantor_pair(x, y));
              cert.rows[x].push_back(y);
            }
          Solution s = Solution::of(std::move(pts), depth);
          s.certs.column = std::move(cert);
          out.push_back(std::move(s));
        }
      }
    }
    return out;
  }

  /// Extend the homogeneous set only when every earlier column agrees.
  virtual bool accept_column(const StreamRule& c, const std::vector<Nat>& xs, Nat x, Nat color) const {
    for (Nat prev : xs)
      if (pair_color(c, prev, x) != color) return false;
    return true;
  }

  BackwardResult backward(const SourceAccess& src, const Solution& tgt_sol, Nat depth) const override {
    BackwardResult r;
    const auto h = tgt_sol.set.below(depth);
    if (h.empty()) {
      r.complete = false;
      r.solution = Solution::of({}, depth);
      return r;
    }
    const StreamRule& c = src.instance().rule();
    std::set<Nat> columns;
    for (Nat code : h) columns.insert(cantor_unpair(code).first);
    const Nat x1 = cantor_unpair(h.front()).first;
    const Nat color = pair_value(c, h.front());
    std::vector<Nat> xs{x1};
    for (Nat x : columns)
      if (x > xs.back() && accept_column(c, xs, x, color)) xs.push_back(x);
    r.solution = Solution::of({xs.begin(), xs.end()}, depth);
    r.complete = xs.size() >= 2;
    return r;
  }
};

// ---------------------------------------------------------------------------
// IndQ × IndQ ≤ IndQ: c(n) = 2^{a(n)+1} 3^{b(n)+1}

inline Nat encode_product_color(Nat a, Nat b) {
  Nat v = 1;
  for (Nat i = 0; i <= a; ++i) v *= 2;
  for (Nat i = 0; i <= b; ++i) v *= 3;
  return v;
}

/// (i₁, i₂) with color = 2^{i₁+1} 3^{i₂+1}, or nothing when malformed.
inline std::optional<std::pair<Nat, Nat>> decode_product_color(Nat color) {
  Nat e2 = 0, e3 = 0;
  while (color > 1 && color % 2 == 0) {
    color /= 2;
    ++e2;
  }
  while (color > 1 && color % 3 == 0) {
    color /= 3;
    ++e3;
  }
  if (color != 1 || e2 == 0 || e3 == 0) return std::nullopt;
  return std::pair{e2 - 1, e3 - 1};
}

class PairProduct : public ReductionPair {
 public:
  PairProduct(Nat j = 2, Nat k = 3) : j_(j), k_(k) {}

  std::string name() const override { return "pair_product"; }
  ProblemId source() const override { return make_product(problem::IndQ(j_), problem::IndQ(k_)); }
  ProblemId target() const override { return problem::IndQ(encode_product_color(j_, k_)); }
  Mode mode() const override { return Mode::W; }

  Instance random_source(std::mt19937_64& rng) const override {
    return Instance::pair(Instance::atomic(detail::random_coloring(rng, j_, 12, 1, 2)),
                          Instance::atomic(detail::random_coloring(rng, k_, 12, 1, 2)));
  }

  static StreamRule combine(const StreamRule& a, const StreamRule& b) {
    return zip_rules(a, b, encode_product_color);
  }

  Instance forward(const Instance& src) const override {
    return Instance::atomic(combine(src.parts.at(0).rule(), src.parts.at(1).rule()));
  }

  std::vector<Solution> target_solutions(const Instance&, const Instance& tgt, Nat depth) const override {
    return dense_class_solutions(tgt.stream, tgt.rule().tail_values(), depth);
  }

  virtual std::optional<std::pair<Nat, Nat>> decode(Nat color) const { return decode_product_color(color); }

  BackwardResult backward(const SourceAccess& src, const Solution& tgt_sol, Nat depth) const override {
    BackwardResult r;
    const auto h = tgt_sol.set.below(depth);
    r.solution.parts = {Solution::of({}, depth), Solution::of({}, depth)};
    if (h.empty()) {
      r.complete = false;
      return r;
    }
    const Instance& inst = src.instance();
    const StreamRule& a = inst.parts.at(0).rule();
    const StreamRule& b = inst.parts.at(1).rule();
    const auto colors = decode(combine(a, b)(h.front()));
    if (!colors || colors->first >= j_ || colors->second >= k_) {
      r.error = "solution color is not a product code";
      return r;
    }
    // Each side keeps what the decoded color vouches for.
    const StreamRule* side[2] = {&a, &b};
    const Nat want[2] = {colors->first, colors->second};
    for (int s = 0; s < 2; ++s) {
      auto ok = [&](Nat n) { return (*side[s])(n) == want[s]; };
      Solution part = Solution::of({}, depth);
      for (Nat n : tgt_sol.set.elements)
        if (ok(n)) part.set.elements.insert(n);
      if (tgt_sol.certs.density) {
        DensityCertificate cert;
        for (auto [key, w] : tgt_sol.certs.density->between)
          if (ok(w)) cert.between[key] = w;
        for (auto [key, w] : tgt_sol.certs.density->below)
          if (ok(w)) cert.below[key] = w;
        for (auto [key, w] : tgt_sol.certs.density->above)
          if (ok(w)) cert.above[key] = w;
        part.certs.density = std::move(cert);
      }
      r.solution.parts[s] = std::move(part);
    }
    return r;
  }

 private:
  Nat j_, k_;
};

// ---------------------------------------------------------------------------
// IndQ_N ≤ IndQ ⋆ C_N: enumerate every number below each new color

/// The C_N instance: g(s) = v+1 enumerates v.
inline StreamRule ind_sn_forward(const StreamRule& c) {
  Prefix out;
  std::set<Nat> seen, enumerated;
  for (Nat n = 0; n < c.head_size() + c.period(); ++n) {
    const Nat m = c(n);
    if (!seen.insert(m).second) {
      out.push_back(0);
      continue;
    }
    bool any = false;
    for (Nat v = 0; v < m; ++v)
      if (enumerated.insert(v).second) {
        out.push_back(v + 1);
        any = true;
      }
    if (!any) out.push_back(0);
  }
  return StreamRule(std::move(out), {0});
}

class IndSNForward : public ReductionPair {
 public:
  std::string name() const override { return "indSN_forward"; }
  ProblemId source() const override { return problem::IndQN(); }
  ProblemId target() const override { return make_compose(problem::IndQ(2), problem::CN()); }
  Mode mode() const override { return Mode::sW; }

  Instance random_source(std::mt19937_64& rng) const override {
    const Nat k = 1 + rng() % 5;
    return Instance::atomic(detail::random_coloring(rng, k, 12, 1, 2));
  }

  Instance forward(const Instance& src) const override {
    return Instance::pair(src, Instance::atomic(ind_sn_forward(src.rule())));
  }

  std::vector<Solution> target_solutions(const Instance&, const Instance& tgt, Nat depth) const override {
    const StreamRule& c = tgt.parts.at(0).rule();
    const auto enumerated = cn_enumerated(tgt.parts.at(1).rule());
    std::vector<Solution> out;
    Nat found = 0;
    for (Nat k = 0; found < 3 && k < 64; ++k) {
      if (enumerated.count(k)) continue;
      ++found;
      std::set<Nat> colors;
      for (Nat v : c.tail_values())
        if (v <= k) colors.insert(v);
      for (auto& inner : dense_class_solutions(c, colors, depth)) {
        Solution s;
        s.parts = {std::move(inner), Solution::of({k}, 1)};
        out.push_back(std::move(s));
      }
    }
    return out;
  }

  BackwardResult backward(const SourceAccess&, const Solution& tgt_sol, Nat) const override {
    BackwardResult r;
    r.solution = tgt_sol.parts.at(0);
    r.complete = !r.solution.set.elements.empty();
    return r;
  }
};

// ---------------------------------------------------------------------------
// IndQ ⋆ Bound ≤ IndQ_N: stage-wise prime-power recoloring

inline Nat nth_prime(Nat i) {
  static const std::vector<Nat> primes = [] {
    std::vector<Nat> p;
    for (Nat n = 2; p.size() < 200; ++n) {
      bool prime = true;
      for (Nat q : p) {
        if (q * q > n) break;
        if (n % q == 0) {
          prime = false;
          break;
        }
      }
      if (prime) p.push_back(n);
    }
    return p;
  }();
  return primes.at(i);
}

/// (prime index, exponent) of a prime power, or nothing.
inline std::optional<std::pair<Nat, Nat>> decode_prime_power(Nat v) {
  for (Nat i = 0; i < 200 && nth_prime(i) <= v; ++i) {
    const Nat p = nth_prime(i);
    if (v % p) continue;
    Nat e = 0;
    while (v % p == 0) {
      v /= p;
      ++e;
    }
    if (v != 1) return std::nullopt;
    return std::pair{i, e};
  }
  return std::nullopt;
}

inline Nat int_pow(Nat base, Nat e) {
  Nat v = 1;
  while (e--) v *= base;
  return v;
}

/// A bound-producing family: entry i is either undefined or (delay, bound k_i, coloring c_i).
struct FamilyEntry {
  Nat delay = 0;
  Nat bound = 0;
  StreamRule coloring = StreamRule::constant(0);
};

/// Source layout: parts[0] enumerates Y (y(s) = v+1 adds v); parts[1+i] is family
/// entry i, with tag = bound (0 when undefined) and data = {delay}.
inline std::optional<FamilyEntry> family_entry(const Instance& src, Nat i) {
  if (i + 1 >= src.parts.size()) return std::nullopt;
  const Instance& e = src.parts[i + 1];
  if (e.tag == 0) return std::nullopt;
  return FamilyEntry{e.data.empty() ? 0 : e.data[0], e.tag, e.rule()};
}

struct PrimePowerRun {
  std::vector<std::pair<Nat, Nat>> guesses;  // (time, index)
  Prefix prefix;                             // points colored before the final guess took over
  std::optional<Nat> final_guess;
  std::optional<StreamRule> coloring;        // d
  Nat max_y_plus_one = 0;                    // 0 when Y is empty
};

inline std::optional<Nat> max_enumerated(const StreamRule& y) {
  auto e = cn_enumerated(y);
  if (e.empty()) return std::nullopt;
  return *e.rbegin();
}

/// Runs the staged construction until Y has shown all its elements and a guess
/// is in place; from then on d copies the final guess's coloring.
inline PrimePowerRun run_prime_power(const Instance& src, Nat horizon = 4096) {
  const StreamRule& y = src.parts.at(0).rule();
  const Nat settle = y.head_size() + y.period();
  PrimePowerRun run;
  std::optional<Nat> max_y;
  std::optional<Nat> guess;
  Nat lo = 0;
  for (Nat t = 0; t < horizon; ++t) {
    if (const Nat v = y(t); v > 0) max_y = std::max(max_y.value_or(0), v - 1);
    if (guess && max_y && *max_y >= *guess) guess.reset();
    if (max_y) lo = std::max(lo, *max_y + 1);
    if (!guess) {
      for (Nat i = lo; i <= lo + t; ++i) {
        auto e = family_entry(src, i);
        if (e && e->delay <= t) {
          guess = i;
          run.guesses.push_back({t, i});
          break;
        }
      }
    }
    if (t >= settle && guess) {
      const Nat p = nth_prime(*guess);
      const FamilyEntry e = *family_entry(src, *guess);
      run.final_guess = guess;
      run.coloring = splice_rule(run.prefix, e.coloring, [p](Nat v) { return int_pow(p, v + 1); });
      run.max_y_plus_one = max_y ? *max_y + 1 : 0;
      return run;
    }
    if (guess) {
      const Nat n = run.prefix.size();
      run.prefix.push_back(int_pow(nth_prime(*guess), family_entry(src, *guess)->coloring(n) + 1));
    }
  }
  return run;
}

class PrimePower : public ReductionPair {
 public:
  std::string name() const override { return "prime_power"; }
  ProblemId source() const override { return make_compose(problem::IndQ(2), problem::CN()); }
  ProblemId target() const override { return problem::IndQN(); }
  Mode mode() const override { return Mode::W; }

  Instance random_source(std::mt19937_64& rng) const override {
    Instance src;
    Prefix yh(rng() % 12);
    for (auto& v : yh) v = rng() % 3 == 0 ? 1 + rng() % 6 : 0;
    src.parts.push_back(Instance::atomic(StreamRule(std::move(yh), {0})));
    for (Nat i = 0; i < 12; ++i) {
      Instance e;
      const bool defined = i >= 7 || rng() % 2 == 0;
      const Nat k = 2 + rng() % 3;
      e.stream = detail::random_coloring(rng, k, 10, 1, 2);
      e.tag = defined ? k : 0;
      e.data = {rng() % 6};
      src.parts.push_back(std::move(e));
    }
    return src;
  }

  Instance forward(const Instance& src) const override {
    auto run = run_prime_power(src);
    if (!run.coloring) throw Error("prime-power construction stalled: no bound produced within horizon");
    return Instance::atomic(*run.coloring);
  }

  std::vector<Solution> target_solutions(const Instance&, const Instance& tgt, Nat depth) const override {
    return dense_class_solutions(tgt.stream, tgt.rule().tail_values(), depth);
  }

  virtual std::optional<std::pair<Nat, Nat>> decode(Nat color) const { return decode_prime_power(color); }

  BackwardResult backward(const SourceAccess& src, const Solution& tgt_sol, Nat depth) const override {
    BackwardResult r;
    const auto h = tgt_sol.set.below(depth);
    if (h.empty()) {
      r.complete = false;
      return r;
    }
    auto run = run_prime_power(src.instance());
    if (!run.coloring) {
      r.complete = false;
      return r;
    }
    auto dec = decode((*run.coloring)(h.front()));
    if (!dec) {
      r.error = "solution color is not a prime power";
      return r;
    }
    Solution inner = tgt_sol;
    r.solution.parts = {std::move(inner), Solution::of({dec->first}, 1)};
    return r;
  }

  Verdict validate_source_instance(const Instance& src, Nat) const override {
    if (src.parts.empty()) return Verdict::refuted("no enumeration of Y");
    for (Nat i = 0; i + 1 < src.parts.size(); ++i)
      if (auto e = family_entry(src, i))
        if (auto v = check_color_bound(e->coloring, e->bound); v.is_refuted())
          return prefix_witness("entry " + std::to_string(i), v);
    return Verdict::certified();
  }

  Verdict validate_source(const Instance& src, const Solution& sol, Nat depth) const override {
    if (sol.parts.size() != 2 || sol.parts[1].set.elements.size() != 1)
      return Verdict::refuted("solution must be (H, index)");
    const Nat i = *sol.parts[1].set.elements.begin();
    if (auto m = max_enumerated(src.parts.at(0).rule()); m && i <= *m)
      return Verdict::refuted("index " + std::to_string(i) + " is not above max Y");
    auto e = family_entry(src, i);
    if (!e) return Verdict::refuted("entry " + std::to_string(i) + " produces no bound");
    ProblemId inner = problem::IndQ(2);
    inner.k = e->bound;
    return prefix_witness("entry " + std::to_string(i),
                          validate_solution(inner, e->coloring, sol.parts[0].set, sol.parts[0].certs, depth));
  }
};

// ---------------------------------------------------------------------------
// RT¹_k ≤ IndQ_k: the color of a dense monochromatic set names its class

class RT1ToIndQ : public ReductionPair {
 public:
  std::string name() const override { return "rt1_to_indQ"; }
  ProblemId source() const override { return problem::RT1(3); }
  ProblemId target() const override { return problem::IndQ(3); }
  Mode mode() const override { return Mode::W; }

  Instance random_source(std::mt19937_64& rng) const override {
    return Instance::atomic(detail::random_coloring(rng, 3, 20, 1, 3));
  }

  Instance forward(const Instance& src) const override { return src; }

  std::vector<Solution> target_solutions(const Instance&, const Instance& tgt, Nat depth) const override {
    return dense_class_solutions(tgt.stream, tgt.rule().tail_values(), depth);
  }

  virtual Nat pick_color(const StreamRule& c, Nat first) const { return c(first); }

  BackwardResult backward(const SourceAccess& src, const Solution& tgt_sol, Nat depth) const override {
    BackwardResult r;
    const auto b = tgt_sol.set.below(depth);
    if (b.empty()) {
      r.complete = false;
      r.solution = Solution::of({}, depth);
      return r;
    }
    const StreamRule& c = src.instance().rule();
    const Nat color = pick_color(c, b.front());
    std::set<Nat> out;
    for (Nat n = 0; n < depth; ++n)
      if (c(n) == color) out.insert(n);
    r.solution = Solution::of(std::move(out), depth);
    return r;
  }
};

// ---------------------------------------------------------------------------
// IndQ_k ≤ iShuffle_k: in a shuffle, any occurring color is dense in the interval

class IndQToIShuffle : public ReductionPair {
 public:
  std::string name() const override { return "indQ_to_ishuffle"; }
  ProblemId source() const override { return problem::IndQ(2); }
  ProblemId target() const override { return problem::IShuffle(2); }
  Mode mode() const override { return Mode::W; }

  Instance random_source(std::mt19937_64& rng) const override {
    Prefix h(rng() % 16), t(3);
    for (auto& v : h) v = rng() % 2;
    for (auto& v : t) v = rng() % 2;
    return Instance::atomic(StreamRule(std::move(h), std::move(t)));
  }

  Instance forward(const Instance& src) const override { return src; }

  std::vector<Solution> target_solutions(const Instance&, const Instance& tgt, Nat depth) const override {
    const StreamRule& c = tgt.rule();
    const auto tail = c.tail_values();
    std::vector<Solution> out;
    for (Nat lo = 0; lo < 12; ++lo)
      for (Nat hi = 0; hi < 12; ++hi) {
        if (!rat_less(lo, hi)) continue;
        auto keep = [&](Nat n) { return detail::in_interval(lo, hi, n); };
        std::map<Nat, std::vector<Nat>> by_color;
        bool ok = true;
        for (Nat n = 0; n < detail::kDensityLimit && ok; ++n)
          if (keep(n)) {
            ok = tail.count(c(n)) != 0;
            if (n < depth) by_color[c(n)].push_back(n);
          }
        for (auto& [color, elems] : by_color)
          ok = ok && search_density(c, color, elems, detail::kDensityLimit, keep).has_value();
        if (ok) out.push_back(Solution::of({cantor_pair(lo, hi)}, 1));
      }
    return out;
  }

  BackwardResult backward(const SourceAccess& src, const Solution& tgt_sol, Nat depth) const override {
    BackwardResult r;
    if (tgt_sol.set.elements.size() != 1) {
      r.error = "target answer is not a single interval";
      return r;
    }
    auto [lo, hi] = cantor_unpair(*tgt_sol.set.elements.begin());
    if (!rat_less(lo, hi)) {
      r.error = "interval endpoints out of order";
      return r;
    }
    const StreamRule& c = src.instance().rule();
    auto keep = [&](Nat n) { return detail::in_interval(lo, hi, n); };
    std::optional<Nat> first;
    for (Nat n = 0; n < detail::kDensityLimit && !first; ++n)
      if (keep(n)) first = n;
    if (!first) {
      r.complete = false;
      return r;
    }
    const Nat color = c(*first);
    std::vector<Nat> b;
    for (Nat n = 0; n < depth; ++n)
      if (keep(n) && c(n) == color) b.push_back(n);
    auto cert = search_density(c, color, b, detail::kDensityLimit, keep);
    if (!cert) {
      r.complete = false;
      return r;
    }
    r.solution = Solution::of({b.begin(), b.end()}, depth);
    r.solution.certs.density = std::move(cert);
    return r;
  }
};

// ---------------------------------------------------------------------------
// Catalog

inline std::vector<std::shared_ptr<const ReductionPair>> reduction_catalog() {
  return {std::make_shared<IndEToRT2>(),   std::make_shared<SRT2ToIndE>(), std::make_shared<PairProduct>(),
          std::make_shared<IndSNForward>(), std::make_shared<PrimePower>(), std::make_shared<RT1ToIndQ>(),
          std::make_shared<IndQToIShuffle>()};
}

inline std::shared_ptr<const ReductionPair> find_reduction(std::string_view name) {
  for (auto& r : reduction_catalog())
    if (r->name() == name) return r;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Exact solver for Ind𝓔 on rule colorings

struct IndESolution {
  Solution solution;
  Nat color = 0;
  Nat n = 0;                  // least number of colors recurring in infinitely many columns
  std::vector<Nat> colors;    // the chosen color set
  int which_case = 0;         // 1 stabilizing columns, 2 two colors, 3 general
};

/// Case analysis by residues: columns from periodic_column_start on behave by x mod 2P,
/// so the jump queries of the general argument become finite searches.
inline IndESolution solve_ind_e(const StreamRule& c, Nat depth) {
  const Nat m = 2 * c.period();
  const Nat xs = periodic_column_start(c);
  std::vector<std::vector<Nat>> inf(m);
  for (Nat x = xs; x < xs + m; ++x) {
    auto s = colors_infinite_in_column(c, x);
    inf[x % m] = {s.begin(), s.end()};
  }
  IndESolution out;
  std::optional<std::vector<Nat>> best;
  for (Nat r = 0; r < m; ++r)
    if (!best || inf[r].size() < best->size() || (inf[r].size() == best->size() && inf[r] < *best)) best = inf[r];
  out.colors = *best;
  out.n = best->size();
  out.color = best->front();
  out.which_case = out.n == 1 ? 1 : out.n == 2 ? 2 : 3;
  ResiduePattern pat;
  pat.color = out.color;
  pat.modulus = m;
  pat.from = xs;
  for (Nat r = 0; r < m; ++r)
    if (inf[r] == *best) pat.residues.push_back(r);
  std::set<Nat> pts;
  ColumnCertificate cert;
  for (Nat code = 0; code < depth; ++code) {
    if (pat.selects(cantor_unpair(code).first) && c(code) == out.color) pts.insert(code);
  }
  for (Nat x = xs; cantor_pair(x, 0) < depth; ++x) {
    if (!pat.selects(x)) continue;
    cert.columns.push_back(x);
    for (Nat y = 0; cantor_pair(x, y) < depth; ++y)
      if (c(cantor_pair(x, y)) == out.color) cert.rows[x].push_back(y);
  }
  cert.pattern = pat;
  out.solution = Solution::of(std::move(pts), depth);
  out.solution.certs.column = std::move(cert);
  return out;
}

}  // namespace wlab
