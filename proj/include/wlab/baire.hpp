// Finite-prefix model of Baire space: pairing, the fixed enumeration of the
// rationals, eventually periodic stream rules and use-tracked functionals.
#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace wlab {

using Nat = std::uint64_t;
using Prefix = std::vector<Nat>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A stream rule whose periodic tail is empty.
struct MalformedRule : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Pairing

constexpr Nat cantor_pair(Nat x, Nat y) noexcept {
  const Nat s = x + y;
  return s * (s + 1) / 2 + y;
}

inline std::pair<Nat, Nat> cantor_unpair(Nat n) noexcept {
  // Largest s with s(s+1)/2 <= n. Start from a float guess and correct.
  Nat s = 0;
  {
    long double guess = (-1.0L + std::sqrt(1.0L + 8.0L * static_cast<long double>(n))) / 2.0L;
    s = guess < 0 ? 0 : static_cast<Nat>(guess);
  }
  while (s * (s + 1) / 2 > n) --s;
  while ((s + 1) * (s + 2) / 2 <= n) ++s;
  const Nat y = n - s * (s + 1) / 2;
  return {s - y, y};
}

// ---------------------------------------------------------------------------
// Rationals

struct Rational {
  std::int64_t num = 0;
  std::uint64_t den = 1;

  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
    const __int128 lhs = static_cast<__int128>(a.num) * static_cast<__int128>(b.den);
    const __int128 rhs = static_cast<__int128>(b.num) * static_cast<__int128>(a.den);
    return lhs <=> rhs;
  }
  friend bool operator==(const Rational& a, const Rational& b) noexcept {
    return (a <=> b) == std::strong_ordering::equal;
  }

  std::string str() const {
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

namespace detail {

// The m-th (1-indexed) reduced pair (a,b) of positive naturals, ordered by
// cantor_pair(a-1, b-1). Grown on demand; guarded for concurrent readers.
class ReducedPairTable {
 public:
  static ReducedPairTable& instance() {
    static ReducedPairTable table;
    return table;
  }

  std::pair<Nat, Nat> at(Nat m) {
    std::lock_guard lock(mutex_);
    while (pairs_.size() < m) grow();
    return pairs_[m - 1];
  }

 private:
  void grow() {
    // Walk diagonals d = (a-1)+(b-1); inside a diagonal cantor order is by b.
    for (;;) {
      const Nat b = next_y_ + 1;
      const Nat a = diag_ - next_y_ + 1;
      if (next_y_ == diag_) {
        ++diag_;
        next_y_ = 0;
      } else {
        ++next_y_;
      }
      if (std::gcd(a, b) == 1) {
        pairs_.emplace_back(a, b);
        return;
      }
    }
  }

  std::mutex mutex_;
  std::vector<std::pair<Nat, Nat>> pairs_;
  Nat diag_ = 0;
  Nat next_y_ = 0;
};

}  // namespace detail

/// The fixed presentation of Q: code 0 is zero, odd codes are positive and
/// even codes negative, magnitudes run through reduced fractions in cantor
/// order of (numerator-1, denominator-1).
inline Rational rat_enum(Nat n) {
  if (n == 0) return {0, 1};
  const Nat m = (n + 1) / 2;
  auto [a, b] = detail::ReducedPairTable::instance().at(m);
  const auto num = static_cast<std::int64_t>(a);
  return {n % 2 == 1 ? num : -num, b};
}

inline std::strong_ordering rat_compare(Nat i, Nat j) {
  if (i == j) return std::strong_ordering::equal;
  return rat_enum(i) <=> rat_enum(j);
}

inline bool rat_less(Nat i, Nat j) { return rat_compare(i, j) == std::strong_ordering::less; }

/// Code of a rational given in lowest terms, by search. Test helper.
inline std::optional<Nat> rat_code_of(Rational q, Nat search_limit) {
  for (Nat n = 0; n < search_limit; ++n)
    if (rat_enum(n) == q) return n;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Stream rules

class StreamRule {
 public:
  StreamRule(Prefix head, Prefix tail) : head_(std::move(head)), tail_(std::move(tail)) {
    if (tail_.empty()) throw MalformedRule("stream rule has an empty tail");
  }

  static StreamRule constant(Nat v) { return StreamRule({}, {v}); }

  Nat operator()(Nat n) const {
    if (n < head_.size()) return head_[n];
    return tail_[(n - head_.size()) % tail_.size()];
  }

  const Prefix& head() const noexcept { return head_; }
  const Prefix& tail() const noexcept { return tail_; }
  Nat period() const noexcept { return tail_.size(); }
  Nat head_size() const noexcept { return head_.size(); }

  Prefix take(Nat n) const {
    Prefix out(n);
    for (Nat i = 0; i < n; ++i) out[i] = (*this)(i);
    return out;
  }

  std::set<Nat> tail_values() const { return {tail_.begin(), tail_.end()}; }

  std::set<Nat> range() const {
    std::set<Nat> out(head_.begin(), head_.end());
    out.insert(tail_.begin(), tail_.end());
    return out;
  }

  Nat max_value() const { return *range().rbegin(); }

  std::optional<Nat> constant_tail() const {
    for (Nat v : tail_)
      if (v != tail_.front()) return std::nullopt;
    return tail_.front();
  }

  /// Same head, shortest period.
  StreamRule min_period() const {
    Prefix tail = tail_;
    for (Nat p = 1; p <= tail.size(); ++p) {
      if (tail.size() % p) continue;
      bool ok = true;
      for (Nat i = p; i < tail.size() && ok; ++i) ok = tail[i] == tail[i - p];
      if (ok) {
        tail.resize(p);
        break;
      }
    }
    return StreamRule(head_, std::move(tail));
  }

  /// Shortest period and shortest head describing the same stream.
  StreamRule normalized() const {
    const StreamRule m = min_period();
    Prefix tail = m.tail_;
    Prefix head = head_;
    while (!head.empty() && head.back() == tail.back()) {
      std::rotate(tail.rbegin(), tail.rbegin() + 1, tail.rend());
      head.pop_back();
    }
    return StreamRule(std::move(head), std::move(tail));
  }

  friend bool operator==(const StreamRule&, const StreamRule&) = default;

 private:
  Prefix head_;
  Prefix tail_;
};

/// Pointwise combination of two rules; the result is again a rule.
inline StreamRule zip_rules(const StreamRule& a, const StreamRule& b,
                            const std::function<Nat(Nat, Nat)>& f) {
  const Nat h = std::max(a.head_size(), b.head_size());
  const Nat p = std::lcm(a.period(), b.period());
  Prefix head(h), tail(p);
  for (Nat i = 0; i < h; ++i) head[i] = f(a(i), b(i));
  for (Nat i = 0; i < p; ++i) tail[i] = f(a(h + i), b(h + i));
  return StreamRule(std::move(head), std::move(tail)).normalized();
}

inline StreamRule map_rule(const StreamRule& a, const std::function<Nat(Nat)>& f) {
  Prefix head, tail;
  for (Nat v : a.head()) head.push_back(f(v));
  for (Nat v : a.tail()) tail.push_back(f(v));
  return StreamRule(std::move(head), std::move(tail)).normalized();
}

/// value(n) = prefix[n] below |prefix|, f(rule(n)) afterwards.
inline StreamRule splice_rule(const Prefix& prefix, const StreamRule& rule,
                              const std::function<Nat(Nat)>& f) {
  const Nat h = std::max<Nat>(prefix.size(), rule.head_size());
  Prefix head(h), tail(rule.period());
  for (Nat i = 0; i < h; ++i) head[i] = i < prefix.size() ? prefix[i] : f(rule(i));
  for (Nat i = 0; i < rule.period(); ++i) tail[i] = f(rule(h + i));
  return StreamRule(std::move(head), std::move(tail)).normalized();
}

/// Interleaving p ⊕ q: even positions from p, odd positions from q.
inline StreamRule join_streams(const StreamRule& p, const StreamRule& q) {
  const Nat h = std::max(p.head_size(), q.head_size());
  const Nat period = 2 * std::lcm(p.period(), q.period());
  Prefix head(2 * h), tail(period);
  for (Nat i = 0; i < 2 * h; ++i) head[i] = i % 2 ? q(i / 2) : p(i / 2);
  for (Nat i = 0; i < period; ++i) {
    const Nat n = 2 * h + i;
    tail[i] = n % 2 ? q(n / 2) : p(n / 2);
  }
  return StreamRule(std::move(head), std::move(tail)).min_period();
}

inline std::pair<StreamRule, StreamRule> split_stream(const StreamRule& joined) {
  const Nat h = (joined.head_size() + 1) / 2;
  const Nat p = joined.period();  // even/odd halves each repeat with period p (or p/2)
  Prefix eh(h), oh(h), et(p), ot(p);
  for (Nat i = 0; i < h; ++i) {
    eh[i] = joined(2 * i);
    oh[i] = joined(2 * i + 1);
  }
  for (Nat i = 0; i < p; ++i) {
    et[i] = joined(2 * (h + i));
    ot[i] = joined(2 * (h + i) + 1);
  }
  return {StreamRule(eh, et).normalized(), StreamRule(oh, ot).normalized()};
}

/// Row i of a cantor-coded rule: j ↦ rule(cantor_pair(i, j)). Exact, since the
/// code map is increasing in j and periodic modulo the tail period with
/// period dividing twice the tail period.
inline StreamRule row_rule(const StreamRule& rule, Nat i) {
  const Nat h = rule.head_size();
  const Nat p = rule.period();
  Nat j0 = 0;
  while (cantor_pair(i, j0) < h) ++j0;
  Prefix head(j0), tail(2 * p);
  for (Nat j = 0; j < j0; ++j) head[j] = rule(cantor_pair(i, j));
  for (Nat j = 0; j < 2 * p; ++j) tail[j] = rule(cantor_pair(i, j0 + j));
  return StreamRule(std::move(head), std::move(tail)).normalized();
}

/// Column view: s ↦ rule(cantor_pair(s, i)). Same argument as row_rule.
inline StreamRule column_rule(const StreamRule& rule, Nat i) {
  const Nat h = rule.head_size();
  const Nat p = rule.period();
  Nat s0 = 0;
  while (cantor_pair(s0, i) < h) ++s0;
  Prefix head(s0), tail(2 * p);
  for (Nat s = 0; s < s0; ++s) head[s] = rule(cantor_pair(s, i));
  for (Nat s = 0; s < 2 * p; ++s) tail[s] = rule(cantor_pair(s0 + s, i));
  return StreamRule(std::move(head), std::move(tail)).normalized();
}

// ---------------------------------------------------------------------------
// Streams: exact rules or opaque total functions (derived instances)

class Stream {
 public:
  Stream() : Stream(StreamRule::constant(0)) {}
  Stream(StreamRule rule)  // NOLINT(google-explicit-constructor)
      : rule_(std::make_shared<const StreamRule>(std::move(rule))) {}
  explicit Stream(std::function<Nat(Nat)> fn) : fn_(std::move(fn)) {}

  Nat operator()(Nat n) const { return rule_ ? (*rule_)(n) : fn_(n); }
  const StreamRule* rule() const noexcept { return rule_.get(); }

  Prefix take(Nat n) const {
    Prefix out(n);
    for (Nat i = 0; i < n; ++i) out[i] = (*this)(i);
    return out;
  }

 private:
  std::shared_ptr<const StreamRule> rule_;
  std::function<Nat(Nat)> fn_;
};

// ---------------------------------------------------------------------------
// Oracles and functionals

class Oracle {
 public:
  virtual ~Oracle() = default;
  /// Entry at pos, or nothing if the prefix does not reach it.
  virtual std::optional<Nat> at(Nat pos) const = 0;
};

class PrefixOracle final : public Oracle {
 public:
  explicit PrefixOracle(std::span<const Nat> prefix) : prefix_(prefix) {}
  std::optional<Nat> at(Nat pos) const override {
    if (pos < prefix_.size()) return prefix_[pos];
    return std::nullopt;
  }

 private:
  std::span<const Nat> prefix_;
};

/// Oracle p ⊕ q over two independent prefixes, counting reads of each half.
class JoinOracle final : public Oracle {
 public:
  JoinOracle(const Oracle& even, const Oracle& odd) : even_(even), odd_(odd) {}
  std::optional<Nat> at(Nat pos) const override {
    if (pos % 2 == 0) {
      ++even_reads_;
      return even_.at(pos / 2);
    }
    ++odd_reads_;
    return odd_.at(pos / 2);
  }
  Nat even_reads() const noexcept { return even_reads_; }
  Nat odd_reads() const noexcept { return odd_reads_; }

 private:
  const Oracle& even_;
  const Oracle& odd_;
  mutable Nat even_reads_ = 0;
  mutable Nat odd_reads_ = 0;
};

class StreamOracle final : public Oracle {
 public:
  explicit StreamOracle(const Stream& s) : s_(s) {}
  std::optional<Nat> at(Nat pos) const override { return s_(pos); }

 private:
  const Stream& s_;
};

struct NotYet {
  friend bool operator==(const NotYet&, const NotYet&) = default;
};
struct Converged {
  Nat value = 0;
  Nat use = 0;
  friend bool operator==(const Converged&, const Converged&) = default;
};
using EvalOutcome = std::variant<NotYet, Converged>;

inline const Converged* converged(const EvalOutcome& o) { return std::get_if<Converged>(&o); }
/// By value for temporaries, so the result never dangles.
inline std::optional<Converged> converged(EvalOutcome&& o) {
  if (const auto* c = std::get_if<Converged>(&o)) return *c;
  return std::nullopt;
}

/// Step-limited view of an oracle handed to a functional's procedure.
/// Reads past the prefix or past the budget abort the evaluation with NotYet.
class Tape {
 public:
  Tape(const Oracle& oracle, Nat budget) : oracle_(oracle), budget_(budget) {}

  Nat read(Nat pos) {
    tick();
    auto v = oracle_.at(pos);
    if (!v) throw Stall{};
    use_ = std::max(use_, pos + 1);
    return *v;
  }

  void tick() {
    if (steps_ >= budget_) throw Stall{};
    ++steps_;
  }

  Nat use() const noexcept { return use_; }
  Nat steps() const noexcept { return steps_; }

  struct Stall {};

 private:
  const Oracle& oracle_;
  Nat budget_;
  Nat steps_ = 0;
  Nat use_ = 0;
};

/// Deterministic procedure: must depend only on values returned by Tape::read.
using Procedure = std::function<Nat(Tape&, Nat input)>;

struct Functional {
  Nat id = 0;
  std::string name;
  Procedure step;
  std::function<Nat(Nat)> declared_use_bound;  // empty when undeclared

  bool has_use_bound() const noexcept { return static_cast<bool>(declared_use_bound); }
};

/// Converged reports the exact use: one past the largest position read.
inline EvalOutcome eval_functional(const Functional& f, const Oracle& oracle, Nat input, Nat budget) {
  Tape tape(oracle, budget);
  try {
    const Nat v = f.step(tape, input);
    return Converged{v, tape.use()};
  } catch (const Tape::Stall&) {
    return NotYet{};
  }
}

inline EvalOutcome eval_functional(const Functional& f, std::span<const Nat> oracle, Nat input, Nat budget) {
  return eval_functional(f, PrefixOracle(oracle), input, budget);
}

/// Registry of functionals by id; plays the role of the universal functional.
class Catalog {
 public:
  const Functional& add(std::string name, Procedure step, std::function<Nat(Nat)> use_bound = {}) {
    items_.push_back(Functional{items_.size(), std::move(name), std::move(step), std::move(use_bound)});
    return items_.back();
  }

  const Functional& at(Nat id) const {
    if (id >= items_.size()) throw Error("unknown catalog functional " + std::to_string(id));
    return items_[id];
  }

  const Functional* find(std::string_view name) const {
    for (const auto& f : items_)
      if (f.name == name) return &f;
    return nullptr;
  }

  Nat size() const noexcept { return items_.size(); }
  const std::vector<Functional>& items() const noexcept { return items_; }

  /// Small fixed catalog used by tests and the composition evaluator.
  static const Catalog& standard() {
    static const Catalog cat = [] {
      Catalog c;
      c.add("identity", [](Tape& t, Nat n) { return t.read(n); }, [](Nat n) { return n + 1; });
      c.add("succ", [](Tape& t, Nat n) { return t.read(n) + 1; }, [](Nat n) { return n + 1; });
      c.add("zero", [](Tape& t, Nat) {
        t.tick();
        return Nat{0};
      }, [](Nat) { return Nat{0}; });
      c.add("swap_halves", [](Tape& t, Nat n) { return t.read(n ^ 1); }, [](Nat n) { return (n ^ 1) + 1; });
      c.add("running_max", [](Tape& t, Nat n) {
        Nat m = 0;
        for (Nat i = 0; i <= n; ++i) m = std::max(m, t.read(i));
        return m;
      }, [](Nat n) { return n + 1; });
      c.add("first_nonzero_index", [](Tape& t, Nat) {
        for (Nat i = 0;; ++i)
          if (t.read(i) != 0) return i;
      });
      c.add("sum_pair", [](Tape& t, Nat n) { return t.read(2 * n) + t.read(2 * n + 1); },
            [](Nat n) { return 2 * n + 2; });
      return c;
    }();
    return cat;
  }

 private:
  std::vector<Functional> items_;
};

}  // namespace wlab
