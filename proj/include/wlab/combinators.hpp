// Algebra of problems: products, powers, finite and countable parallelization,
// coproduct, jump, weak parallelization and the compositional product.
#pragma once

#include "wlab/problems.hpp"

namespace wlab {

// ---------------------------------------------------------------------------
// Constructors

namespace detail {
inline ProblemId composite(Shape shape, std::vector<ProblemId> parts, Nat n = 0) {
  ProblemId id;
  id.kind = Kind::Composite;
  id.shape = shape;
  id.n = n;
  id.parts = std::move(parts);
  return id;
}
}  // namespace detail

inline ProblemId make_product(const ProblemId& p, const ProblemId& q) { return detail::composite(Shape::Product, {p, q}); }
inline ProblemId make_power(const ProblemId& p, Nat n) { return detail::composite(Shape::Power, {p}, n); }
inline ProblemId make_star(const ProblemId& p) { return detail::composite(Shape::Star, {p}); }
inline ProblemId make_hat(const ProblemId& p) { return detail::composite(Shape::Hat, {p}); }
inline ProblemId make_coproduct(const ProblemId& p, const ProblemId& q) { return detail::composite(Shape::Coproduct, {p, q}); }
inline ProblemId make_jump(const ProblemId& p) { return detail::composite(Shape::Jump, {p}); }
inline ProblemId make_weak_parallelization(const ProblemId& p) { return detail::composite(Shape::WeakPar, {p}); }

/// p ⋆ q where the answer n of q (C_N or TC_N) fixes p's color count to n+1.
inline ProblemId make_compose(const ProblemId& p, const ProblemId& q) {
  if (!p.colored() && p.kind != Kind::IndQN) throw Error("compose needs a color-indexed first problem");
  if (q.kind != Kind::CN && q.kind != Kind::TCN) throw Error("compose needs C_N or TC_N second");
  return detail::composite(Shape::Compose, {p, q});
}

// ---------------------------------------------------------------------------
// Instances and solutions

struct Instance {
  Stream stream;
  std::vector<Instance> parts;
  Nat tag = 0;                             // coproduct side, star count
  std::map<Nat, Nat> stabilization_bound;  // jump: coordinate -> stage
  std::vector<Nat> data;                   // auxiliary naturals for structured instances

  static Instance atomic(StreamRule rule) {
    Instance i;
    i.stream = std::move(rule);
    return i;
  }
  static Instance pair(Instance a, Instance b) {
    Instance i;
    i.parts = {std::move(a), std::move(b)};
    return i;
  }

  const StreamRule& rule() const {
    if (!stream.rule()) throw Error("instance is not rule-described");
    return *stream.rule();
  }
};

struct Solution {
  SolutionPrefix set;
  Certificates certs;
  std::vector<Solution> parts;
  Nat tag = 0;
  std::map<Nat, Solution> rows;

  static Solution of(std::set<Nat> elements, Nat depth, Certificates certs = {}) {
    Solution s;
    s.set = {std::move(elements), depth};
    s.certs = std::move(certs);
    return s;
  }
  friend bool operator==(const Solution&, const Solution&) = default;
};

/// Coordinate i of the jump instance at stage s is rule(cantor_pair(i, s)).
/// Valid bounds make the limit itself a rule.
inline StreamRule jump_limit(const StreamRule& rows) {
  const Nat start = periodic_column_start(rows);
  Prefix head, tail;
  for (Nat i = 0; i < start + 2 * rows.period(); ++i) {
    auto v = stable_color(rows, i);
    if (!v) throw Error("coordinate " + std::to_string(i) + " does not converge");
    (i < start ? head : tail).push_back(*v);
  }
  return StreamRule(std::move(head), std::move(tail)).normalized();
}

// ---------------------------------------------------------------------------
// Validation

namespace detail {

inline Verdict check_jump_bounds(const Instance& inst, Nat depth) {
  const StreamRule& rows = inst.rule();
  for (Nat i = 0; i < depth; ++i) {
    auto it = inst.stabilization_bound.find(i);
    if (it == inst.stabilization_bound.end()) return Verdict::refuted("no stabilization bound for " + std::to_string(i));
    const StreamRule r = row_rule(rows, i);
    const Nat b = it->second;
    const Nat horizon = std::max(depth, b + r.head_size() + r.period());
    for (Nat s = b; s < horizon; ++s)
      if (r(s) != r(b))
        return Verdict::refuted("coordinate " + std::to_string(i) + " changes at stage " + std::to_string(s));
  }
  return Verdict::certified();
}

inline Verdict cap(const Verdict& v, Nat depth) { return meet(v, Verdict::consistent(depth)); }

}  // namespace detail

inline Verdict validate_instance(const ProblemId& pid, const Instance& inst, Nat depth) {
  if (pid.kind != Kind::Composite) return validate_instance(pid, inst.stream, depth);
  const ProblemId& p0 = pid.parts.at(0);
  switch (pid.shape) {
    case Shape::Product:
      if (inst.parts.size() != 2) return Verdict::refuted("product needs two parts");
      return meet(prefix_witness("left", validate_instance(p0, inst.parts[0], depth)),
                  prefix_witness("right", validate_instance(pid.parts.at(1), inst.parts[1], depth)));
    case Shape::Power:
    case Shape::Star: {
      const Nat n = pid.shape == Shape::Power ? pid.n : inst.tag;
      if (inst.parts.size() != n) return Verdict::refuted("count " + std::to_string(inst.parts.size()) + " != " + std::to_string(n));
      Verdict v = Verdict::certified();
      for (Nat i = 0; i < n; ++i)
        v = meet(v, prefix_witness("index " + std::to_string(i), validate_instance(p0, inst.parts[i], depth)));
      return v;
    }
    case Shape::Hat:
    case Shape::WeakPar: {
      Verdict v = Verdict::certified();
      for (Nat i = 0; i < depth && v.ok(); ++i)
        v = meet(v, prefix_witness("row " + std::to_string(i), validate_instance(p0, Instance::atomic(row_rule(inst.rule(), i)), depth)));
      return detail::cap(v, depth);
    }
    case Shape::Coproduct:
      if (inst.tag >= 2) return Verdict::refuted("tag " + std::to_string(inst.tag));
      if (inst.parts.size() != 1) return Verdict::refuted("coproduct needs one part");
      return validate_instance(pid.parts.at(inst.tag), inst.parts[0], depth);
    case Shape::Jump: {
      if (auto v = detail::check_jump_bounds(inst, depth); v.is_refuted()) return v;
      return detail::cap(validate_instance(p0, Instance::atomic(jump_limit(inst.rule())), depth), depth);
    }
    case Shape::Compose:
      if (inst.parts.size() != 2) return Verdict::refuted("composition needs two parts");
      return validate_instance(pid.parts.at(1), inst.parts[1], depth);
  }
  return Verdict::refuted("unknown shape");
}

inline Verdict validate_solution(const ProblemId& pid, const Instance& inst, const Solution& sol, Nat depth) {
  if (pid.kind != Kind::Composite) return validate_solution(pid, inst.stream, sol.set, sol.certs, depth);
  const ProblemId& p0 = pid.parts.at(0);
  switch (pid.shape) {
    case Shape::Product:
      if (sol.parts.size() != 2) return Verdict::refuted("product solution needs two parts");
      return meet(prefix_witness("left", validate_solution(p0, inst.parts.at(0), sol.parts[0], depth)),
                  prefix_witness("right", validate_solution(pid.parts.at(1), inst.parts.at(1), sol.parts[1], depth)));
    case Shape::Power:
    case Shape::Star: {
      const Nat n = pid.shape == Shape::Power ? pid.n : inst.tag;
      if (pid.shape == Shape::Star && sol.tag != n) return Verdict::refuted("count echo " + std::to_string(sol.tag) + " != " + std::to_string(n));
      if (sol.parts.size() != n) return Verdict::refuted("solution count " + std::to_string(sol.parts.size()));
      Verdict v = Verdict::certified();
      for (Nat i = 0; i < n; ++i)
        v = meet(v, prefix_witness("index " + std::to_string(i), validate_solution(p0, inst.parts.at(i), sol.parts[i], depth)));
      return v;
    }
    case Shape::Hat: {
      Verdict v = Verdict::certified();
      for (Nat i = 0; i < depth; ++i) {
        auto it = sol.rows.find(i);
        if (it == sol.rows.end()) return Verdict::refuted("row " + std::to_string(i) + " missing");
        v = meet(v, prefix_witness("row " + std::to_string(i),
                                   validate_solution(p0, Instance::atomic(row_rule(inst.rule(), i)), it->second, depth)));
      }
      return detail::cap(v, depth);
    }
    case Shape::WeakPar: {
      if (!sol.certs.column) throw MissingCertificate("weak parallelization without row certificate");
      for (Nat x : sol.certs.column->columns)
        if (!sol.rows.count(x)) return Verdict::refuted("certified row " + std::to_string(x) + " missing");
      Verdict v = Verdict::certified();
      for (const auto& [n, s] : sol.rows) {
        if (n >= depth) break;
        v = meet(v, prefix_witness("row " + std::to_string(n),
                                   validate_solution(p0, Instance::atomic(row_rule(inst.rule(), n)), s, depth)));
      }
      return detail::cap(v, depth);
    }
    case Shape::Coproduct:
      if (inst.tag >= 2) return Verdict::refuted("tag " + std::to_string(inst.tag));
      if (sol.tag != inst.tag) return Verdict::refuted("solution answers side " + std::to_string(sol.tag));
      if (sol.parts.size() != 1) return Verdict::refuted("coproduct solution needs one part");
      return validate_solution(pid.parts.at(inst.tag), inst.parts.at(0), sol.parts[0], depth);
    case Shape::Jump:
      return validate_solution(p0, Instance::atomic(jump_limit(inst.rule())), sol, depth);
    case Shape::Compose: {
      if (sol.parts.size() != 2) return Verdict::refuted("composition solution needs two parts");
      const Verdict outer = validate_solution(pid.parts.at(1), inst.parts.at(1), sol.parts[1], depth);
      if (outer.is_refuted()) return prefix_witness("bound", outer);
      const Nat n = *sol.parts[1].set.elements.begin();
      ProblemId inner = p0;
      inner.k = n + 1;
      const StreamRule& c = inst.parts.at(0).rule();
      if (p0.kind != Kind::IndQN) {
        if (auto v = validate_instance(inner, c, depth); v.is_refuted()) return prefix_witness("bounded instance", v);
      }
      return meet(outer, prefix_witness("inner", validate_solution(inner, c, sol.parts[0].set, sol.parts[0].certs, depth)));
    }
  }
  return Verdict::refuted("unknown shape");
}

// ---------------------------------------------------------------------------
// Compositional product representative: ⟨id × f⟩ ∘ Φ_x ∘ g

struct CompositionStage {
  std::string name;
  Prefix output;
  Nat max_use = 0;
  bool complete = true;
};

struct CompositionTranscript {
  std::vector<CompositionStage> stages;
  Prefix output;
  bool complete = true;
  std::optional<std::string> stalled_at;
};

namespace detail {
inline CompositionStage run_stage(std::string name, const Functional& f, const Prefix& oracle, Nat length, Nat budget) {
  CompositionStage st{std::move(name), {}, 0, true};
  for (Nat n = 0; n < length; ++n) {
    auto out = eval_functional(f, oracle, n, budget);
    auto* c = converged(out);
    if (!c) {
      st.complete = false;
      break;
    }
    st.output.push_back(c->value);
    st.max_use = std::max(st.max_use, c->use);
  }
  return st;
}
}  // namespace detail

inline CompositionTranscript comp_product_eval(Nat f_id, Nat g_id, Nat x, const StreamRule& y, Nat budget, Nat length,
                                               const Catalog& catalog = Catalog::standard()) {
  CompositionTranscript t;
  const Prefix input = y.take(length);
  t.stages.push_back(detail::run_stage("g", catalog.at(g_id), input, length, budget));
  t.stages.push_back(detail::run_stage("phi", catalog.at(x), t.stages[0].output, length, budget));
  const Prefix& z = t.stages[1].output;
  Prefix z0, z1;
  for (Nat i = 0; i < z.size(); ++i) (i % 2 ? z1 : z0).push_back(z[i]);
  t.stages.push_back(detail::run_stage("f", catalog.at(f_id), z1, z1.size(), budget));
  const Prefix& fz = t.stages[2].output;
  for (Nat i = 0; i < z.size(); ++i) {
    if (i % 2 == 0) t.output.push_back(z0[i / 2]);
    else if (i / 2 < fz.size()) t.output.push_back(fz[i / 2]);
    else break;
  }
  for (const auto& st : t.stages)
    if (!st.complete) {
      t.complete = false;
      t.stalled_at = st.name;
      break;
    }
  return t;
}

}  // namespace wlab
