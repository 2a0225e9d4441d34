// Benchmark problems as finite-depth validators over rule-described instances,
// with certificates for the infinite parts of solution contracts.
#pragma once

#include "wlab/baire.hpp"

#include <map>
#include <sstream>

namespace wlab {

// ---------------------------------------------------------------------------
// Problem identifiers

enum class Kind { LPO, Lim, CN, TCN, RT1, CRT1, RT2, SRT2, IndQ, IndE, IShuffle, IndQN, Composite };
enum class Shape { Product, Power, Star, Hat, Coproduct, Jump, WeakPar, Compose };

struct ProblemId {
  Kind kind = Kind::LPO;
  Nat k = 0;                     // number of colors for k-indexed kinds
  Shape shape = Shape::Product;  // composites only
  Nat n = 0;                     // Power exponent
  std::vector<ProblemId> parts;  // composites only

  bool colored() const noexcept {
    switch (kind) {
      case Kind::RT1: case Kind::CRT1: case Kind::RT2: case Kind::SRT2:
      case Kind::IndQ: case Kind::IndE: case Kind::IShuffle:
        return true;
      default:
        return false;
    }
  }

  std::string name() const {
    static const char* kinds[] = {"LPO", "Lim", "CN", "TCN", "RT1", "CRT1", "RT2",
                                  "SRT2", "IndQ", "IndE", "IShuffle", "IndQN", ""};
    if (kind != Kind::Composite) {
      std::string s = kinds[static_cast<int>(kind)];
      return colored() ? s + "(" + std::to_string(k) + ")" : s;
    }
    auto part = [&](std::size_t i) { return parts.at(i).name(); };
    switch (shape) {
      case Shape::Product: return "(" + part(0) + " x " + part(1) + ")";
      case Shape::Power: return part(0) + "^" + std::to_string(n);
      case Shape::Star: return part(0) + "^*";
      case Shape::Hat: return part(0) + "^";
      case Shape::Coproduct: return "(" + part(0) + " + " + part(1) + ")";
      case Shape::Jump: return part(0) + "'";
      case Shape::WeakPar: return part(0) + "~";
      case Shape::Compose: return "(" + part(0) + " * " + part(1) + ")";
    }
    return "?";
  }

  friend bool operator==(const ProblemId&, const ProblemId&) = default;
};

namespace problem {

inline ProblemId plain(Kind kind) {
  ProblemId id;
  id.kind = kind;
  return id;
}

inline ProblemId colored(Kind kind, Nat k) {
  if (k < 2) throw Error("color count must be at least 2");
  ProblemId id = plain(kind);
  id.k = k;
  return id;
}

inline ProblemId LPO() { return plain(Kind::LPO); }
inline ProblemId Lim() { return plain(Kind::Lim); }
inline ProblemId CN() { return plain(Kind::CN); }
inline ProblemId TCN() { return plain(Kind::TCN); }
inline ProblemId IndQN() { return plain(Kind::IndQN); }
inline ProblemId RT1(Nat k) { return colored(Kind::RT1, k); }
inline ProblemId CRT1(Nat k) { return colored(Kind::CRT1, k); }
inline ProblemId RT2(Nat k) { return colored(Kind::RT2, k); }
inline ProblemId SRT2(Nat k) { return colored(Kind::SRT2, k); }
inline ProblemId IndQ(Nat k) { return colored(Kind::IndQ, k); }
inline ProblemId IndE(Nat k) { return colored(Kind::IndE, k); }
inline ProblemId IShuffle(Nat k) { return colored(Kind::IShuffle, k); }

}  // namespace problem

// ---------------------------------------------------------------------------
// Verdicts

struct Verdict {
  enum class Tag { Refuted, Consistent, Certified };
  Tag tag = Tag::Certified;
  Nat depth = 0;
  std::string witness;

  static Verdict refuted(std::string why) { return {Tag::Refuted, 0, std::move(why)}; }
  static Verdict consistent(Nat d) { return {Tag::Consistent, d, {}}; }
  static Verdict certified() { return {Tag::Certified, 0, {}}; }

  bool ok() const noexcept { return tag != Tag::Refuted; }
  bool is_refuted() const noexcept { return tag == Tag::Refuted; }
  bool is_certified() const noexcept { return tag == Tag::Certified; }

  std::string str() const {
    switch (tag) {
      case Tag::Refuted: return "Refuted(" + witness + ")";
      case Tag::Consistent: return "ConsistentAtDepth(" + std::to_string(depth) + ")";
      case Tag::Certified: return "Certified";
    }
    return "?";
  }

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// Weakest of two verdicts; the first refutation wins.
inline Verdict meet(const Verdict& a, const Verdict& b) {
  if (a.tag != b.tag) return a.tag < b.tag ? a : b;
  if (a.tag == Verdict::Tag::Consistent) return a.depth <= b.depth ? a : b;
  return a;
}

inline Verdict prefix_witness(std::string side, const Verdict& v) {
  if (!v.is_refuted()) return v;
  return Verdict::refuted(std::move(side) + ": " + v.witness);
}

// ---------------------------------------------------------------------------
// Solutions and certificates

struct MissingCertificate : Error {
  using Error::Error;
};

struct SolutionPrefix {
  std::set<Nat> elements;
  Nat depth = 0;

  bool contains(Nat v) const { return elements.count(v) != 0; }
  std::vector<Nat> below(Nat d) const { return {elements.begin(), elements.lower_bound(d)}; }
  friend bool operator==(const SolutionPrefix&, const SolutionPrefix&) = default;
};

struct DensityCertificate {
  std::map<std::pair<Nat, Nat>, Nat> between;  // keyed by (lesser, greater) in value order
  std::map<Nat, Nat> below;
  std::map<Nat, Nat> above;
  friend bool operator==(const DensityCertificate&, const DensityCertificate&) = default;
};

/// Exact description of an infinite solution: every point of `color` in a
/// column x >= from with x mod modulus in residues.
struct ResiduePattern {
  Nat color = 0;
  Nat modulus = 1;
  std::vector<Nat> residues;
  Nat from = 0;

  bool selects(Nat x) const {
    return x >= from && std::find(residues.begin(), residues.end(), x % modulus) != residues.end();
  }
  friend bool operator==(const ResiduePattern&, const ResiduePattern&) = default;
};

struct ColumnCertificate {
  std::vector<Nat> columns;
  std::map<Nat, std::vector<Nat>> rows;
  std::optional<ResiduePattern> pattern;
  friend bool operator==(const ColumnCertificate&, const ColumnCertificate&) = default;
};

struct StabilityCertificate {
  std::map<Nat, Nat> bound;
  friend bool operator==(const StabilityCertificate&, const StabilityCertificate&) = default;
};

struct Certificates {
  std::optional<DensityCertificate> density;
  std::optional<ColumnCertificate> column;
  std::optional<StabilityCertificate> stability;
  friend bool operator==(const Certificates&, const Certificates&) = default;
};

// ---------------------------------------------------------------------------
// Coding of points

/// Color of the unordered pair {x,y}, x != y.
template <class Coloring>
Nat pair_color(const Coloring& c, Nat x, Nat y) {
  if (x > y) std::swap(x, y);
  return c(cantor_pair(x, y - x - 1));
}

inline Nat pair_code(Nat x, Nat y) { return cantor_pair(std::min(x, y), std::max(x, y) - std::min(x, y) - 1); }

// ---------------------------------------------------------------------------
// Column analysis

/// Eventual constant color of column x (the points (x,y), y ∈ ℕ), if any.
inline std::optional<Nat> stable_color(const StreamRule& rule, Nat x) {
  return row_rule(rule, x).constant_tail();
}

inline std::set<Nat> colors_infinite_in_column(const StreamRule& rule, Nat x) {
  return row_rule(rule, x).tail_values();
}

/// First column index from which column behaviour depends only on x mod 2P.
inline Nat periodic_column_start(const StreamRule& rule) {
  Nat x = 0;
  while (cantor_pair(x, 0) < rule.head_size()) ++x;
  return x;
}

/// Columns x whose analysis decides every column: [0, start + 2P).
inline Nat column_sample_bound(const StreamRule& rule) {
  return periodic_column_start(rule) + 2 * rule.period();
}

/// Stability bounds for a stable pair coloring: c{x,z} is constant for z >= bound(x).
inline std::optional<Nat> stability_bound(const StreamRule& rule, Nat x) {
  const StreamRule row = row_rule(rule, x);
  if (!row.constant_tail()) return std::nullopt;
  return x + 1 + row.head_size();
}

inline StabilityCertificate stability_certificate(const StreamRule& rule, Nat columns) {
  StabilityCertificate cert;
  for (Nat x = 0; x < columns; ++x)
    if (auto b = stability_bound(rule, x)) cert.bound[x] = *b;
  return cert;
}

/// Checks every bound against the rule up to z < depth.
inline Verdict check_stability(const StreamRule& rule, const StabilityCertificate& cert, Nat depth) {
  for (auto [x, b] : cert.bound) {
    if (b <= x) return Verdict::refuted("stability bound for column " + std::to_string(x) + " not past it");
    const Nat ref = pair_color(rule, x, std::max(b, x + 1));
    for (Nat z = std::max(b, x + 1); z < depth; ++z)
      if (pair_color(rule, x, z) != ref)
        return Verdict::refuted("column " + std::to_string(x) + " changes at " + std::to_string(z));
  }
  return Verdict::consistent(depth);
}

// ---------------------------------------------------------------------------
// Density witnesses

/// Codes below `limit` with a given color, sorted by the rational they denote.
class ColorClassIndex {
 public:
  ColorClassIndex(const Stream& rule, Nat color, Nat limit, const std::function<bool(Nat)>& keep = {}) {
    for (Nat n = 0; n < limit; ++n)
      if (rule(n) == color && (!keep || keep(n))) sorted_.push_back({rat_enum(n), n});
    std::sort(sorted_.begin(), sorted_.end());
  }

  std::optional<Nat> between(Nat a, Nat b) const {
    const Rational lo = rat_enum(a), hi = rat_enum(b);
    auto it = std::upper_bound(sorted_.begin(), sorted_.end(), std::pair{lo, ~Nat{0}});
    if (it != sorted_.end() && it->first < hi) return it->second;
    return std::nullopt;
  }

  std::optional<Nat> below(Nat a) const {
    auto it = std::lower_bound(sorted_.begin(), sorted_.end(), std::pair{rat_enum(a), Nat{0}});
    if (it == sorted_.begin()) return std::nullopt;
    return std::prev(it)->second;
  }

  std::optional<Nat> above(Nat a) const {
    auto it = std::upper_bound(sorted_.begin(), sorted_.end(), std::pair{rat_enum(a), ~Nat{0}});
    if (it == sorted_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<std::pair<Rational, Nat>> sorted_;
};

/// Density witnesses for `elements`, drawn from the color class below `limit`
/// (restricted to `keep` when given). Nothing when some witness is missing.
inline std::optional<DensityCertificate> search_density(const Stream& rule, Nat color,
                                                         const std::vector<Nat>& elements, Nat limit,
                                                         const std::function<bool(Nat)>& keep = {}) {
  ColorClassIndex index(rule, color, limit, keep);
  DensityCertificate cert;
  for (Nat i : elements) {
    auto lo = index.below(i), hi = index.above(i);
    if (!lo || !hi) return std::nullopt;
    cert.below[i] = *lo;
    cert.above[i] = *hi;
  }
  for (std::size_t a = 0; a < elements.size(); ++a)
    for (std::size_t b = a + 1; b < elements.size(); ++b) {
      Nat i = elements[a], j = elements[b];
      if (rat_less(j, i)) std::swap(i, j);
      auto m = index.between(i, j);
      if (!m) return std::nullopt;
      cert.between[{i, j}] = *m;
    }
  return cert;
}

// ---------------------------------------------------------------------------
// Instance validation

inline Verdict check_color_bound(const StreamRule& rule, Nat k) {
  for (Nat i = 0; i < rule.head_size() + rule.period(); ++i)
    if (rule(i) >= k) return Verdict::refuted("position " + std::to_string(i) + " has color " + std::to_string(rule(i)));
  return Verdict::certified();
}

/// Exact for rules: every verdict is Certified or Refuted.
inline Verdict validate_instance(const ProblemId& pid, const StreamRule& rule, Nat depth) {
  (void)depth;
  switch (pid.kind) {
    case Kind::LPO:
      return check_color_bound(rule, 2);
    case Kind::CN:
    case Kind::TCN:
    case Kind::IndQN:
      // A rule enumerates a finite set, so the complement is never exhausted.
      return Verdict::certified();
    case Kind::Lim: {
      for (Nat x = 0; x < column_sample_bound(rule); ++x)
        if (!stable_color(rule, x)) return Verdict::refuted("row " + std::to_string(x) + " does not converge");
      return Verdict::certified();
    }
    case Kind::SRT2: {
      if (auto v = check_color_bound(rule, pid.k); v.is_refuted()) return v;
      for (Nat x = 0; x < column_sample_bound(rule); ++x)
        if (!stable_color(rule, x)) return Verdict::refuted("column " + std::to_string(x) + " is not stable");
      return Verdict::certified();
    }
    case Kind::Composite:
      throw Error("composite problems are validated through the combinator layer");
    default:
      return check_color_bound(rule, pid.k);
  }
}

// ---------------------------------------------------------------------------
// Solution validation

namespace detail {

inline std::string pair_str(Nat a, Nat b) { return "{" + std::to_string(a) + "," + std::to_string(b) + "}"; }

/// First element below depth whose color differs from the first one.
inline std::optional<Verdict> mono_violation(const std::vector<Nat>& elems, const std::function<Nat(Nat)>& color) {
  if (elems.empty()) return std::nullopt;
  const Nat c0 = color(elems.front());
  for (Nat e : elems)
    if (color(e) != c0) return Verdict::refuted("colors differ on " + pair_str(elems.front(), e));
  return std::nullopt;
}

inline Verdict validate_density(const Stream& rule, const SolutionPrefix& sol, const Certificates& certs,
                                Nat depth) {
  const auto elems = sol.below(depth);
  if (auto v = mono_violation(elems, rule)) return *v;
  if (elems.empty()) return Verdict::consistent(depth);
  if (!certs.density) throw MissingCertificate("dense-order solution without density certificate");
  const auto& cert = *certs.density;
  const Nat color = rule(elems.front());
  auto check_point = [&](Nat w, const std::string& what) -> std::optional<Verdict> {
    if (rule(w) != color) return Verdict::refuted(what + " witness " + std::to_string(w) + " has another color");
    if (w < depth && !sol.contains(w)) return Verdict::refuted(what + " witness " + std::to_string(w) + " not in solution");
    return std::nullopt;
  };
  for (Nat i : elems) {
    auto lo = cert.below.find(i);
    if (lo == cert.below.end()) return Verdict::refuted("no lower witness for " + std::to_string(i));
    if (!rat_less(lo->second, i)) return Verdict::refuted("lower witness for " + std::to_string(i) + " is not below");
    if (auto v = check_point(lo->second, "lower")) return *v;
    auto hi = cert.above.find(i);
    if (hi == cert.above.end()) return Verdict::refuted("no upper witness for " + std::to_string(i));
    if (!rat_less(i, hi->second)) return Verdict::refuted("upper witness for " + std::to_string(i) + " is not above");
    if (auto v = check_point(hi->second, "upper")) return *v;
  }
  for (std::size_t a = 0; a < elems.size(); ++a)
    for (std::size_t b = a + 1; b < elems.size(); ++b) {
      Nat i = elems[a], j = elems[b];
      if (rat_less(j, i)) std::swap(i, j);
      auto m = cert.between.find({i, j});
      if (m == cert.between.end()) return Verdict::refuted("no witness between " + pair_str(i, j));
      if (!rat_less(i, m->second) || !rat_less(m->second, j))
        return Verdict::refuted("witness for " + pair_str(i, j) + " is not between");
      if (auto v = check_point(m->second, "between")) return *v;
    }
  // The whole color class is provably cofinite in ℚ, hence a dense copy.
  const StreamRule* exact = rule.rule();
  if (exact && exact->constant_tail() == color && depth >= exact->head_size()) {
    bool full = true;
    for (Nat n = 0; n < depth && full; ++n) full = (rule(n) == color) == sol.contains(n);
    if (full) return Verdict::certified();
  }
  return Verdict::consistent(depth);
}

inline Verdict validate_column_solution(const Stream& rule, const SolutionPrefix& sol, const Certificates& certs,
                                        Nat depth) {
  const auto elems = sol.below(depth);
  if (auto v = mono_violation(elems, rule)) return *v;
  if (elems.empty() && !certs.column) return Verdict::consistent(depth);
  if (!certs.column) throw MissingCertificate("equivalence-relation solution without column certificate");
  const auto& cert = *certs.column;
  for (std::size_t i = 1; i < cert.columns.size(); ++i)
    if (cert.columns[i] <= cert.columns[i - 1]) return Verdict::refuted("columns not increasing");
  for (Nat x : cert.columns) {
    auto it = cert.rows.find(x);
    if (it == cert.rows.end()) continue;
    const auto& ys = it->second;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      if (i > 0 && ys[i] <= ys[i - 1]) return Verdict::refuted("rows of column " + std::to_string(x) + " not increasing");
      const Nat code = cantor_pair(x, ys[i]);
      if (code < depth && !sol.contains(code))
        return Verdict::refuted("certified point (" + std::to_string(x) + "," + std::to_string(ys[i]) + ") missing");
    }
  }
  if (!cert.pattern || !rule.rule()) return Verdict::consistent(depth);
  const auto& pat = *cert.pattern;
  const StreamRule& exact = *rule.rule();
  if (pat.modulus == 0 || pat.modulus % (2 * exact.period()) != 0 || pat.residues.empty())
    return Verdict::consistent(depth);
  for (Nat code = 0; code < depth; ++code) {
    auto [x, y] = cantor_unpair(code);
    const bool want = pat.selects(x) && rule(code) == pat.color;
    if (want != sol.contains(code))
      return Verdict::refuted("point (" + std::to_string(x) + "," + std::to_string(y) + ") disagrees with pattern");
  }
  if (!elems.empty() && rule(elems.front()) != pat.color) return Verdict::refuted("pattern color differs");
  // Every selected column carries the color infinitely often.
  const Nat start = std::max(pat.from, periodic_column_start(exact));
  for (Nat x = pat.from; x < start + pat.modulus; ++x)
    if (pat.selects(x) && !colors_infinite_in_column(exact, x).count(pat.color))
      return Verdict::consistent(depth);
  return Verdict::certified();
}

inline Verdict validate_homogeneous(const Stream& rule, const SolutionPrefix& sol, Nat depth) {
  const auto elems = sol.below(depth);
  if (elems.size() < 2) return Verdict::consistent(depth);
  const Nat c0 = pair_color(rule, elems[0], elems[1]);
  for (std::size_t a = 0; a < elems.size(); ++a)
    for (std::size_t b = a + 1; b < elems.size(); ++b)
      if (pair_color(rule, elems[a], elems[b]) != c0)
        return Verdict::refuted("pair " + pair_str(elems[a], elems[b]) + " vs " + pair_str(elems[0], elems[1]));
  return Verdict::consistent(depth);
}

inline std::optional<Nat> single(const SolutionPrefix& sol) {
  if (sol.elements.size() != 1) return std::nullopt;
  return *sol.elements.begin();
}

}  // namespace detail

/// Codes enumerated by a C_N instance: g(s) = v+1 enumerates v.
inline std::set<Nat> cn_enumerated(const StreamRule& g) {
  std::set<Nat> out;
  for (Nat v : g.range())
    if (v > 0) out.insert(v - 1);
  return out;
}

inline Verdict validate_solution(const ProblemId& pid, const StreamRule& rule, const SolutionPrefix& sol,
                                 const Certificates& certs, Nat depth) {
  using detail::single;
  switch (pid.kind) {
    case Kind::LPO: {
      auto bit = single(sol);
      if (!bit || *bit > 1) return Verdict::refuted("answer is not a single bit");
      const bool has_one = rule.range().count(1) != 0;
      if ((*bit == 1) != has_one) return Verdict::refuted("answer " + std::to_string(*bit) + " is wrong");
      return Verdict::certified();
    }
    case Kind::Lim: {
      std::map<Nat, Nat> graph;
      for (Nat e : sol.elements) {
        auto [i, v] = cantor_unpair(e);
        if (!graph.emplace(i, v).second) return Verdict::refuted("coordinate " + std::to_string(i) + " given twice");
      }
      for (Nat i = 0; i < depth; ++i) {
        auto it = graph.find(i);
        if (it == graph.end()) return Verdict::refuted("coordinate " + std::to_string(i) + " missing");
        auto lim = stable_color(rule, i);
        if (!lim || *lim != it->second) return Verdict::refuted("coordinate " + std::to_string(i) + " is not the limit");
      }
      return Verdict::consistent(depth);
    }
    case Kind::CN:
    case Kind::TCN: {
      auto n = single(sol);
      if (!n) return Verdict::refuted("answer is not a single number");
      if (cn_enumerated(rule).count(*n)) return Verdict::refuted(std::to_string(*n) + " is enumerated");
      return Verdict::certified();
    }
    case Kind::RT1: {
      const auto elems = sol.below(depth);
      if (auto v = detail::mono_violation(elems, rule)) return *v;
      if (elems.empty()) return Verdict::consistent(depth);
      const Nat color = rule(elems.front());
      if (!rule.tail_values().count(color)) return Verdict::refuted("color " + std::to_string(color) + " is finite");
      return Verdict::consistent(depth);
    }
    case Kind::CRT1: {
      auto c = single(sol);
      if (!c) return Verdict::refuted("answer is not a single color");
      if (!rule.tail_values().count(*c)) return Verdict::refuted("color " + std::to_string(*c) + " is finite");
      return Verdict::certified();
    }
    case Kind::RT2:
    case Kind::SRT2:
      return detail::validate_homogeneous(rule, sol, depth);
    case Kind::IndQ:
    case Kind::IndQN:
      return detail::validate_density(rule, sol, certs, depth);
    case Kind::IndE:
      return detail::validate_column_solution(rule, sol, certs, depth);
    case Kind::IShuffle: {
      auto code = single(sol);
      if (!code) return Verdict::refuted("answer is not a single interval");
      auto [lo, hi] = cantor_unpair(*code);
      if (!rat_less(lo, hi)) return Verdict::refuted("interval endpoints out of order");
      const auto tail = rule.tail_values();
      std::set<Nat> seen;
      for (Nat n = 0; n < depth; ++n)
        if (rat_less(lo, n) && rat_less(n, hi)) {
          if (!tail.count(rule(n)))
            return Verdict::refuted("color " + std::to_string(rule(n)) + " occurs finitely often in the interval");
          seen.insert(rule(n));
        }
      if (rule.constant_tail() && depth >= rule.head_size() && seen.size() <= 1) return Verdict::certified();
      return Verdict::consistent(depth);
    }
    case Kind::Composite:
      throw Error("composite problems are validated through the combinator layer");
  }
  return Verdict::refuted("unknown problem");
}

/// Validators for derived instances known only as total functions: colors and
/// solution contracts are checked below depth, never certified.
inline Verdict validate_instance(const ProblemId& pid, const Stream& c, Nat depth) {
  if (const StreamRule* r = c.rule()) return validate_instance(pid, *r, depth);
  if (!pid.colored()) throw Error(pid.name() + " needs a rule-described instance");
  for (Nat n = 0; n < depth; ++n)
    if (c(n) >= pid.k) return Verdict::refuted("position " + std::to_string(n) + " has color " + std::to_string(c(n)));
  return Verdict::consistent(depth);
}

inline Verdict validate_solution(const ProblemId& pid, const Stream& c, const SolutionPrefix& sol,
                                 const Certificates& certs, Nat depth) {
  if (const StreamRule* r = c.rule()) return validate_solution(pid, *r, sol, certs, depth);
  switch (pid.kind) {
    case Kind::RT1: {
      const auto elems = sol.below(depth);
      if (auto v = detail::mono_violation(elems, c)) return *v;
      return Verdict::consistent(depth);
    }
    case Kind::RT2:
    case Kind::SRT2:
      return detail::validate_homogeneous(c, sol, depth);
    case Kind::IndQ:
    case Kind::IndQN:
      return detail::validate_density(c, sol, certs, depth);
    case Kind::IndE:
      return detail::validate_column_solution(c, sol, certs, depth);
    default:
      throw Error(pid.name() + " needs a rule-described instance");
  }
}

}  // namespace wlab
