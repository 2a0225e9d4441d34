// Interval-tree game against reductions of C_N to the dense-subset
// indivisibility problem, with its game tree and certificate audit.
#pragma once

#include "wlab/adversary_report.hpp"

#include <map>

namespace wlab {

/// Endpoint of a rational interval: −∞, a rational code, or +∞.
struct Endpoint {
  enum Kind : Nat { NegInf = 0, Code = 1, PosInf = 2 };
  Nat kind = Code;
  Nat code = 0;

  static Endpoint neg_inf() { return {NegInf, 0}; }
  static Endpoint pos_inf() { return {PosInf, 0}; }
  static Endpoint at(Nat c) { return {Code, c}; }
  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

inline bool endpoint_less(const Endpoint& a, const Endpoint& b) {
  if (a.kind == Endpoint::Code && b.kind == Endpoint::Code) return rat_less(a.code, b.code);
  return a.kind < b.kind;
}

inline bool strictly_inside(const Endpoint& lo, const Endpoint& hi, Nat n) {
  return endpoint_less(lo, Endpoint::at(n)) && endpoint_less(Endpoint::at(n), hi);
}

/// Node α of the game: S_α with its characteristic length b, the answer m_α, and X_α.
struct GameNode {
  std::vector<Nat> path;
  std::optional<std::vector<Nat>> set;  // S_α in rational order
  Nat char_length = 0;
  std::optional<Nat> answer;
  std::vector<Endpoint> points;  // X_α in rational order

  Nat level() const { return path.size(); }
  Nat interval_count() const { return points.size() < 2 ? 0 : points.size() - 1; }
  friend bool operator==(const GameNode&, const GameNode&) = default;
};

struct GameTree {
  Nat k = 0;
  std::vector<Nat> color_order;
  std::vector<Prefix> sigma, sigma_prime;
  std::vector<GameNode> nodes;

  const GameNode* find(const std::vector<Nat>& path) const {
    for (const auto& n : nodes)
      if (n.path == path) return &n;
    return nullptr;
  }
  friend bool operator==(const GameTree&, const GameTree&) = default;
};

/// Functional together with its exact action on rule-described oracles.
struct TransparentDelta {
  Functional functional;
  std::function<StreamRule(const StreamRule&)> image;
};

namespace detail {

inline std::vector<Endpoint> node_points(const Endpoint& lo, const std::vector<Nat>& set, const Endpoint& hi) {
  std::vector<Endpoint> out{lo};
  for (Nat v : sorted_by_value(set)) out.push_back(Endpoint::at(v));
  out.push_back(hi);
  return out;
}

inline std::vector<Nat> encode_node(const GameNode& n) {
  std::vector<Nat> d{n.level()};
  d.insert(d.end(), n.path.begin(), n.path.end());
  d.push_back(n.set ? 1 : 0);
  d.push_back(n.char_length);
  d.push_back(n.answer.value_or(0));
  const auto& s = n.set ? *n.set : std::vector<Nat>{};
  d.push_back(s.size());
  d.insert(d.end(), s.begin(), s.end());
  d.push_back(n.points.size());
  for (const auto& e : n.points) {
    d.push_back(e.kind);
    d.push_back(e.code);
  }
  return d;
}

inline std::optional<GameNode> decode_node(const std::vector<Nat>& d) {
  std::size_t i = 0;
  auto next = [&]() -> std::optional<Nat> {
    if (i >= d.size()) return std::nullopt;
    return d[i++];
  };
  GameNode n;
  auto len = next();
  if (!len) return std::nullopt;
  for (Nat j = 0; j < *len; ++j) {
    auto v = next();
    if (!v) return std::nullopt;
    n.path.push_back(*v);
  }
  auto has = next(), b = next(), m = next(), ns = next();
  if (!has || !b || !m || !ns) return std::nullopt;
  n.char_length = *b;
  std::vector<Nat> s;
  for (Nat j = 0; j < *ns; ++j) {
    auto v = next();
    if (!v) return std::nullopt;
    s.push_back(*v);
  }
  if (*has) {
    n.set = s;
    n.answer = *m;
  }
  auto np = next();
  if (!np) return std::nullopt;
  for (Nat j = 0; j < *np; ++j) {
    auto kind = next(), code = next();
    if (!kind || !code || *kind > 2) return std::nullopt;
    n.points.push_back({*kind, *code});
  }
  if (i != d.size()) return std::nullopt;
  return n;
}

inline constexpr Nat kCnWordLength = 2;
inline constexpr Nat kCnAlphabet = 3;
inline constexpr Nat kCnConsistency = 64;

inline Nat cn_budget(Nat horizon) { return 16 * horizon + 64; }

/// All extension words of the fixed length in lexicographic order; shorter words equal zero-padded ones.
inline std::vector<Prefix> cn_words() {
  std::vector<Prefix> out;
  Nat total = 1;
  for (Nat i = 0; i < kCnWordLength; ++i) total *= kCnAlphabet;
  for (Nat w = 0; w < total; ++w) {
    Prefix word(kCnWordLength);
    Nat x = w;
    for (Nat i = kCnWordLength; i-- > 0;) {
      word[i] = x % kCnAlphabet;
      x /= kCnAlphabet;
    }
    out.push_back(word);
  }
  return out;
}

/// Whether the functional agrees with its claimed image on the first codes.
inline std::optional<std::string> image_mismatch(const TransparentDelta& delta, const StreamRule& g, Nat budget) {
  const StreamRule d = delta.image(g);
  const Stream gs(g);
  const StreamOracle go(gs);
  for (Nat n = 0; n < kCnConsistency; ++n) {
    const auto v = converged(eval_functional(delta.functional, go, n, budget));
    if (!v) return "delta diverges at " + std::to_string(n);
    if (v->value != d(n)) return "delta disagrees with its image at " + std::to_string(n);
  }
  return std::nullopt;
}

}  // namespace detail

/// Tree invariants: inherited endpoints, sets strictly inside their parent interval,
/// one child per parent interval, and each σ′_L enumerating every answer of level L.
inline std::optional<std::string> game_tree_violation(const GameTree& tree) {
  const GameNode* root = tree.find({});
  if (!root) return std::string("missing root");
  if (tree.sigma.size() != tree.sigma_prime.size() || tree.sigma.empty()) return std::string("missing level strings");
  for (const auto& n : tree.nodes) {
    const std::string who = "node at level " + std::to_string(n.level());
    if (n.level() >= tree.sigma.size()) return who + ": level without strings";
    if (n.points.size() < 2) return who + ": fewer than two endpoints";
    for (std::size_t i = 0; i + 1 < n.points.size(); ++i)
      if (!endpoint_less(n.points[i], n.points[i + 1])) return who + ": endpoints out of order";
    const auto& s = n.set ? *n.set : std::vector<Nat>{};
    if (n.points.size() != s.size() + 2) return who + ": X is not S plus two endpoints";
    for (std::size_t i = 0; i < s.size(); ++i)
      if (!(n.points[i + 1] == Endpoint::at(detail::sorted_by_value(s)[i]))) return who + ": X does not list S";
    for (Nat v : s)
      if (v >= n.char_length) return who + ": S exceeds its characteristic length";
    if (n.level() == 0) {
      if (!(n.points.front() == Endpoint::neg_inf()) || !(n.points.back() == Endpoint::pos_inf()))
        return std::string("root does not span the line");
      continue;
    }
    std::vector<Nat> parent_path(n.path.begin(), n.path.end() - 1);
    const GameNode* parent = tree.find(parent_path);
    if (!parent) return who + ": missing parent";
    const Nat i = n.path.back();
    if (i >= parent->interval_count()) return who + ": no such parent interval";
    if (!(n.points.front() == parent->points[i]) || !(n.points.back() == parent->points[i + 1]))
      return who + ": endpoints are not inherited from the parent interval";
  }
  for (const auto& n : tree.nodes) {
    if (n.level() + 1 >= tree.sigma.size()) continue;
    for (Nat i = 0; i < n.interval_count(); ++i) {
      auto child = n.path;
      child.push_back(i);
      if (!tree.find(child)) return std::string("a parent interval has no child");
    }
  }
  for (std::size_t L = 0; L < tree.sigma.size(); ++L) {
    const auto& s = tree.sigma[L];
    const auto& sp = tree.sigma_prime[L];
    if (L > 0) {
      const auto& prev = tree.sigma_prime[L - 1];
      if (s.size() < prev.size() || !std::equal(prev.begin(), prev.end(), s.begin()))
        return "sigma at level " + std::to_string(L) + " does not extend the previous level";
    }
    if (sp.size() < s.size() || !std::equal(s.begin(), s.end(), sp.begin()))
      return "sigma' at level " + std::to_string(L) + " does not extend sigma";
    std::vector<Nat> expected;
    for (const auto& n : tree.nodes)
      if (n.level() == L && n.answer) expected.push_back(*n.answer + 1);
    if (!std::equal(expected.begin(), expected.end(), sp.begin() + s.size(), sp.end()))
      return "sigma' at level " + std::to_string(L) + " does not enumerate the answers";
  }
  return std::nullopt;
}

inline void log_tree_level(Transcript& tr, const GameTree& tree, Nat L) {
  tr.add(L, "sigma", detail::concat({{L}, tree.sigma[L]}));
  tr.add(L, "sigma_prime", detail::concat({{L}, tree.sigma_prime[L]}));
  for (const auto& n : tree.nodes)
    if (n.level() == L) tr.add(L, "node", detail::encode_node(n));
}

inline std::optional<GameTree> parse_game_tree(const Transcript& t) {
  GameTree tree;
  const auto* order = t.first("order");
  if (!order) return std::nullopt;
  tree.color_order = order->data;
  tree.k = tree.color_order.size();
  for (const auto* r : t.find("sigma")) {
    if (r->data.empty() || r->data[0] != tree.sigma.size()) return std::nullopt;
    tree.sigma.emplace_back(r->data.begin() + 1, r->data.end());
  }
  for (const auto* r : t.find("sigma_prime")) {
    if (r->data.empty() || r->data[0] != tree.sigma_prime.size()) return std::nullopt;
    tree.sigma_prime.emplace_back(r->data.begin() + 1, r->data.end());
  }
  for (const auto* r : t.find("node")) {
    auto n = detail::decode_node(r->data);
    if (!n) return std::nullopt;
    tree.nodes.push_back(std::move(*n));
  }
  return tree;
}

struct CnCertificate {
  Prefix instance_head;  // the C_N instance is this head followed by zeros
  std::vector<Nat> path;
  Nat char_length = 0;
  std::vector<Nat> set;
  Nat answer = 0;
  Nat color = 0;
  StreamRule instance() const { return StreamRule(instance_head, {0}); }
};

namespace detail {

/// U = S ∪ {n ≥ b of the color}: the Δ-solution extending S.
inline Stream extension_solution(const StreamRule& d, const std::vector<Nat>& set, Nat b, Nat color) {
  std::set<Nat> s(set.begin(), set.end());
  return Stream([d, s, b, color](Nat n) -> Nat { return s.count(n) || (n >= b && d(n) == color) ? 1 : 0; });
}

}  // namespace detail

/// Ψ reads g ⊕ (characteristic function of a solution) and answers with input 0.
inline AdversaryReport run_cn_adversary(const TransparentDelta& delta, const Functional& psi, Nat k, Nat horizon,
                                        Nat seed = 0) {
  if (k < 2) throw Error("cn adversary needs k >= 2");
  AdversaryReport rep;
  rep.transcript = duel_header("cn", delta.functional.name, psi.name, horizon, seed);
  rep.transcript.set("k", k);
  auto& tr = rep.transcript;
  const Nat budget = detail::cn_budget(horizon);
  const Nat B = std::min<Nat>(horizon, 48);
  const auto words = detail::cn_words();
  GameTree tree;
  tree.k = k;

  const StreamRule g0 = StreamRule::constant(0);
  if (auto e = detail::image_mismatch(delta, g0, budget)) {
    tr.add(0, "delta_unusable", {});
    tr.add(0, "exhausted", {0});
    return rep;
  }
  const StreamRule d0 = delta.image(g0);
  if (check_color_bound(d0, k).is_refuted()) throw Error("delta colors outside the k colors");
  const auto c0 = d0.constant_tail();
  if (!c0) {
    tr.add(0, "no_constant_tail", {});
    tr.add(0, "exhausted", {0});
    return rep;
  }
  tree.color_order.push_back(*c0);
  for (Nat c = 0; c < k; ++c)
    if (c != *c0) tree.color_order.push_back(c);
  tr.add(0, "order", tree.color_order);

  // Try to close the game at level L with a constant-tail instance extending σ′_L.
  auto try_defeat = [&](Nat L) -> bool {
    const Nat color = tree.color_order[L];
    for (const auto& w : words) {
      const StreamRule g(detail::concat({tree.sigma_prime[L], w}), {0});
      const StreamRule d = delta.image(g);
      if (d.constant_tail() != color) continue;
      const auto enumerated = cn_enumerated(g);
      const Stream gs(g);
      const StreamOracle go(gs);
      for (const auto& n : tree.nodes) {
        if (n.level() != L || !n.set) continue;
        if (!std::all_of(n.set->begin(), n.set->end(), [&](Nat x) { return d(x) == color; })) continue;
        const Stream u = detail::extension_solution(d, *n.set, n.char_length, color);
        const StreamOracle uo(u);
        const auto v = converged(eval_functional(psi, JoinOracle(go, uo), 0, budget));
        if (!v || v->value != *n.answer || !enumerated.count(*n.answer)) continue;
        tr.add(L, "cert_instance", g.head());
        tr.add(L, "cert_node", n.path);
        tr.add(L, "cert_set", detail::concat({{n.char_length}, *n.set}));
        tr.add(L, "cert_answer", {*n.answer});
        tr.add(L, "cert_color", {color});
        tr.add(L, "defeated", {L});
        return true;
      }
    }
    return false;
  };

  // Level 0: the whole color class of the eventual color of Δ(0^ω).
  {
    const Stream gs(g0);
    const StreamOracle go(gs);
    const Stream h([d0, c = *c0](Nat n) -> Nat { return d0(n) == c ? 1 : 0; });
    const StreamOracle ho(h);
    const auto v = converged(eval_functional(psi, JoinOracle(go, ho), 0, budget));
    if (!v) {
      tr.add(0, "psi_silent", {});
      tr.add(0, "exhausted", {0});
      return rep;
    }
    const Nat b = v->use / 2, ug = (v->use + 1) / 2;
    std::vector<Nat> S;
    for (Nat n = 0; n < b; ++n)
      if (h(n)) S.push_back(n);
    Nat len = ug;
    for (Nat x : S) {
      const auto u = converged(eval_functional(delta.functional, go, x, budget));
      if (u) len = std::max(len, u->use);
    }
    Prefix sigma(len, 0);
    tree.sigma.push_back(sigma);
    sigma.push_back(v->value + 1);
    tree.sigma_prime.push_back(sigma);
    tree.nodes.push_back({{}, detail::sorted_by_value(S), b, v->value,
                          detail::node_points(Endpoint::neg_inf(), S, Endpoint::pos_inf())});
    log_tree_level(tr, tree, 0);
    if (try_defeat(0)) return rep;
  }

  for (Nat L = 1; L < k; ++L) {
    const Nat color = tree.color_order[L];
    struct Found {
      std::vector<Nat> set;
      Nat b = 0, m = 0;
    };
    std::vector<const GameNode*> parents;
    for (const auto& n : tree.nodes)
      if (n.level() == L - 1) parents.push_back(&n);
    Nat best_score = 0;
    std::optional<Prefix> best_tau;
    std::vector<std::vector<std::optional<Found>>> best_found;
    for (const auto& w : words) {
      Prefix tau = detail::concat({tree.sigma_prime[L - 1], w});
      tau.resize(std::max<Nat>(tau.size(), B + tree.sigma_prime[L - 1].size()), 0);
      const Nat range = tau.size();
      std::vector<std::optional<Nat>> dv(range);
      for (Nat n = 0; n < range; ++n)
        if (const auto v = converged(eval_functional(delta.functional, tau, n, budget))) dv[n] = v->value;
      Nat score = 0;
      std::vector<std::vector<std::optional<Found>>> found;
      for (const GameNode* p : parents) {
        found.emplace_back();
        for (Nat i = 0; i < p->interval_count(); ++i) {
          std::optional<Found> f;
          std::vector<Nat> S;
          for (Nat b = 1; b <= range && !f; ++b) {
            const Nat n = b - 1;
            if (dv[n] == color && strictly_inside(p->points[i], p->points[i + 1], n)) S.push_back(n);
            const Prefix hc = detail::char_string({S.begin(), S.end()}, b);
            const PrefixOracle to(tau), ho(hc);
            if (const auto v = converged(eval_functional(psi, JoinOracle(to, ho), 0, budget))) f = Found{S, b, v->value};
          }
          if (f) ++score;
          found.back().push_back(std::move(f));
        }
      }
      if (!best_tau || score > best_score) {
        best_score = score;
        best_tau = tau;
        best_found = std::move(found);
      }
    }
    if (best_score == 0) {
      tr.add(L, "no_fresh_witness", {});
      tr.add(L, "exhausted", {L});
      return rep;
    }
    Prefix sigma_prime = *best_tau;
    std::vector<GameNode> level;
    for (std::size_t pi = 0; pi < parents.size(); ++pi) {
      const GameNode& p = *parents[pi];
      for (Nat i = 0; i < p.interval_count(); ++i) {
        GameNode n;
        n.path = p.path;
        n.path.push_back(i);
        const auto& f = best_found[pi][i];
        if (f) {
          n.set = detail::sorted_by_value(f->set);
          n.char_length = f->b;
          n.answer = f->m;
          sigma_prime.push_back(f->m + 1);
        }
        n.points = detail::node_points(p.points[i], f ? f->set : std::vector<Nat>{}, p.points[i + 1]);
        level.push_back(std::move(n));
      }
    }
    tree.sigma.push_back(*best_tau);
    tree.sigma_prime.push_back(std::move(sigma_prime));
    for (auto& n : level) tree.nodes.push_back(std::move(n));
    log_tree_level(tr, tree, L);
    if (try_defeat(L)) return rep;
  }
  tr.add(k - 1, "exhausted", {k - 1});
  return rep;
}

inline std::optional<CnCertificate> parse_cn_certificate(const Transcript& t) {
  const auto* g = detail::only(t, "cert_instance");
  const auto* node = detail::only(t, "cert_node");
  const auto* set = detail::only(t, "cert_set");
  const auto* ans = detail::only(t, "cert_answer");
  const auto* col = detail::only(t, "cert_color");
  if (!g || !node || !set || !ans || !col || set->data.empty() || ans->data.size() != 1 || col->data.size() != 1)
    return std::nullopt;
  return CnCertificate{g->data, node->data, set->data[0], {set->data.begin() + 1, set->data.end()}, ans->data[0],
                       col->data[0]};
}

inline std::optional<std::string> audit_cn(const Transcript& t, const TransparentDelta& delta, const Functional& psi,
                                           Nat k) {
  const auto cert = parse_cn_certificate(t);
  if (!cert) return std::string("malformed certificate");
  const auto tree = parse_game_tree(t);
  if (!tree) return std::string("malformed game tree");
  if (auto e = game_tree_violation(*tree)) return "game tree: " + *e;
  const GameNode* node = tree->find(cert->path);
  if (!node || !node->set || *node->set != detail::sorted_by_value(cert->set) ||
      node->char_length != cert->char_length || node->answer != cert->answer)
    return std::string("certificate node differs from the game tree");
  if (node->level() >= tree->color_order.size() || tree->color_order[node->level()] != cert->color)
    return std::string("certificate color is not the node's level color");
  Nat horizon = 0;
  if (auto h = t.get("horizon")) horizon = std::stoull(*h);
  const Nat budget = detail::cn_budget(horizon);
  const StreamRule g = cert->instance();
  if (!cn_enumerated(g).count(cert->answer)) return std::string("the answer is not enumerated by the instance");
  if (auto e = detail::image_mismatch(delta, g, budget)) return *e;
  const StreamRule d = delta.image(g);
  if (check_color_bound(d, k).is_refuted()) return std::string("image uses more than k colors");
  if (d.constant_tail() != cert->color) return std::string("the color class is not cofinite");
  for (Nat x : cert->set)
    if (x >= cert->char_length || d(x) != cert->color) return "point " + std::to_string(x) + " breaks S";
  const Stream u = detail::extension_solution(d, cert->set, cert->char_length, cert->color);
  const Stream gs(g);
  const StreamOracle go(gs), uo(u);
  const auto v = converged(eval_functional(psi, JoinOracle(go, uo), 0, budget));
  if (!v || v->value != cert->answer) return std::string("psi does not answer as cited on the extension");
  constexpr Nat depth = 64;
  std::vector<Nat> elems;
  for (Nat n = 0; n < depth; ++n)
    if (u(n)) elems.push_back(n);
  const Stream ds(d);
  const auto dens = search_density(ds, cert->color, elems, 4000, [&](Nat n) { return u(n) == 1; });
  if (!dens) return std::string("extension is not dense below the audit depth");
  Certificates certs;
  certs.density = *dens;
  const auto verdict =
      validate_solution(problem::IndQ(k), d, SolutionPrefix{{elems.begin(), elems.end()}, depth}, certs, depth);
  if (!verdict.ok()) return "extension fails validation: " + verdict.str();
  return std::nullopt;
}

}  // namespace wlab
