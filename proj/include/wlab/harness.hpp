// Instance DSL, reduction checking runner, report emission and replay.
#pragma once

#include "wlab/adversaries.hpp"
#include "wlab/reductions.hpp"

#include <array>
#include <random>

namespace wlab {

// ---------------------------------------------------------------------------
// Instance DSL

/// `cert <kind>` block: `map a b -> c` lines in file order.
struct CertBlock {
  std::string kind;
  std::vector<std::array<Nat, 3>> maps;
  friend bool operator==(const CertBlock&, const CertBlock&) = default;
};

struct InstanceFile {
  std::string problem;  // kind name as written, e.g. IndQ
  Nat k = 0;
  Prefix head, tail;
  std::vector<CertBlock> certs;
  std::vector<std::string> functionals;  // candidate files: Δ first, then Ψ

  bool has_rule() const { return !tail.empty(); }
  ProblemId problem_id() const;
  StreamRule rule() const { return StreamRule(head, tail); }
  Instance instance() const { return Instance::atomic(rule()); }
  Certificates certificates() const;

  friend bool operator==(const InstanceFile&, const InstanceFile&) = default;
};

namespace detail {

inline const std::vector<std::pair<std::string, Kind>>& kind_names() {
  static const std::vector<std::pair<std::string, Kind>> v{
      {"LPO", Kind::LPO},   {"Lim", Kind::Lim},   {"CN", Kind::CN},     {"TCN", Kind::TCN},
      {"RT1", Kind::RT1},   {"CRT1", Kind::CRT1}, {"RT2", Kind::RT2},   {"SRT2", Kind::SRT2},
      {"IndQ", Kind::IndQ}, {"IndE", Kind::IndE}, {"IShuffle", Kind::IShuffle}, {"IndQN", Kind::IndQN}};
  return v;
}

inline std::optional<Kind> kind_of(std::string_view name) {
  for (const auto& [n, k] : kind_names())
    if (n == name) return k;
  return std::nullopt;
}

inline const std::vector<std::string>& cert_kinds() {
  static const std::vector<std::string> v{"between", "below", "above", "stability", "rows"};
  return v;
}

}  // namespace detail

inline ProblemId InstanceFile::problem_id() const {
  const auto kind = detail::kind_of(problem);
  if (!kind) throw Error("unknown problem " + problem);
  ProblemId id = problem::plain(*kind);
  if (id.colored()) id.k = k;  // other kinds read k only as a bound on values
  return id;
}

inline Certificates InstanceFile::certificates() const {
  Certificates c;
  for (const auto& b : certs) {
    if (b.kind == "between" || b.kind == "below" || b.kind == "above") {
      if (!c.density) c.density.emplace();
      for (const auto& [x, y, z] : b.maps) {
        if (b.kind == "between")
          c.density->between[{x, y}] = z;
        else
          (b.kind == "below" ? c.density->below : c.density->above)[x] = z;
      }
    } else if (b.kind == "stability") {
      if (!c.stability) c.stability.emplace();
      for (const auto& [x, y, z] : b.maps) c.stability->bound[x] = z;
    } else if (b.kind == "rows") {
      if (!c.column) c.column.emplace();
      for (const auto& [x, y, z] : b.maps) {
        auto& row = c.column->rows[x];
        if (row.empty()) c.column->columns.push_back(x);
        row.push_back(z);
      }
    }
  }
  return c;
}

enum class DslFlavor { Instance, Candidates };

/// Parses the DSL. Instance files need a tail; candidate files may omit the
/// rule and add `functional <id>` lines. Errors carry line and column.
inline InstanceFile parse_instance(const std::string& text, DslFlavor flavor = DslFlavor::Instance) {
  InstanceFile f;
  bool have_problem = false, have_head = false, have_tail = false;
  bool colored = false;
  CertBlock* block = nullptr;
  const auto lines = detail::split_lines(text);
  Nat line_no = 0;
  auto check_colors = [&](detail::LineCursor& cur, Prefix& out, bool nonempty) {
    while (!cur.at_end()) {
      const Nat col = cur.column();  // at_end skipped the spaces
      const Nat v = cur.nat();
      if (f.k > 0 && v >= f.k)
        throw PositionedError(line_no, col, "color " + std::to_string(v) + " is not below k=" + std::to_string(f.k));
      out.push_back(v);
    }
    if (nonempty && out.empty()) cur.fail("tail needs at least one value");
  };
  auto fail_at = [&](Nat col, const std::string& what) { throw PositionedError(line_no, col, what); };
  for (const auto& raw : lines) {
    ++line_no;
    const std::string line = raw.substr(0, raw.find('#'));
    detail::LineCursor cur(line, line_no);
    if (cur.at_end()) continue;
    const Nat kw_col = cur.column();
    const std::string kw = cur.word();
      if (!have_problem && kw != "problem") fail_at(kw_col, "expected 'problem' header");
    if (kw == "problem") {
      if (have_problem) fail_at(kw_col, "duplicate problem header");
      cur.skip_spaces();
      const Nat name_col = cur.column();
      f.problem = cur.word();
      const auto kind = detail::kind_of(f.problem);
      if (!kind) fail_at(name_col, "unknown problem " + f.problem);
      cur.expect("k=");
      f.k = cur.nat();
      if (!cur.at_end()) cur.fail("trailing input");
      colored = problem::plain(*kind).colored();
      if (colored && f.k < 2) fail_at(name_col, f.problem + " needs k >= 2");
      have_problem = true;
    } else if (kw == "head") {
      if (have_head) fail_at(kw_col, "duplicate head");
      if (have_tail) fail_at(kw_col, "head after tail");
      check_colors(cur, f.head, false);
      have_head = true;
    } else if (kw == "tail") {
      if (have_tail) fail_at(kw_col, "duplicate tail");
      check_colors(cur, f.tail, true);
      have_tail = true;
    } else if (kw == "cert") {
      cur.skip_spaces();
      const Nat col = cur.column();
      const std::string kind = cur.word();
      const auto& ks = detail::cert_kinds();
      if (std::find(ks.begin(), ks.end(), kind) == ks.end()) fail_at(col, "unknown certificate kind " + kind);
      if (!cur.at_end()) cur.fail("trailing input");
      f.certs.push_back({kind, {}});
      block = &f.certs.back();
    } else if (kw == "map") {
      if (!block) fail_at(kw_col, "map outside a cert block");
      std::array<Nat, 3> m{};
      m[0] = cur.nat();
      cur.skip_spaces();
      const Nat second_col = cur.column();
      m[1] = cur.nat();
      cur.expect("->");
      m[2] = cur.nat();
      if (!cur.at_end()) cur.fail("trailing input");
      if (block->kind != "between" && block->kind != "rows" && m[1] != 0)
        fail_at(second_col, block->kind + " maps take 0 as their second argument");
      if (block->kind == "rows") {
        Nat have = 0;
        for (const auto& p : block->maps) have += p[0] == m[0];
        if (m[1] != have) fail_at(second_col, "row index " + std::to_string(m[1]) + " out of order");
      }
      block->maps.push_back(m);
    } else if (kw == "functional" && flavor == DslFlavor::Candidates) {
      f.functionals.push_back(cur.word());
      if (!cur.at_end()) cur.fail("trailing input");
    } else {
      fail_at(kw_col, "unknown keyword '" + kw + "'");
    }
  }
  if (!have_problem) throw PositionedError(line_no + 1, 1, "missing problem header");
  if (flavor == DslFlavor::Instance && !have_tail) throw PositionedError(line_no + 1, 1, "missing tail");
  if (have_head && !have_tail) throw PositionedError(line_no + 1, 1, "head without tail");
  if (flavor == DslFlavor::Candidates && f.functionals.empty())
    throw PositionedError(line_no + 1, 1, "candidate file names no functional");
  return f;
}

/// Canonical form: comments dropped, one space between tokens, fixed section order.
inline std::string print_instance(const InstanceFile& f) {
  auto nats = [](std::string out, const Prefix& v) {
    for (Nat x : v) out += " " + std::to_string(x);
    return out + "\n";
  };
  std::string out = "problem " + f.problem + " k=" + std::to_string(f.k) + "\n";
  if (f.has_rule()) out += nats("head", f.head) + nats("tail", f.tail);
  for (const auto& b : f.certs) {
    out += "cert " + b.kind + "\n";
    for (const auto& [x, y, z] : b.maps)
      out += "map " + std::to_string(x) + " " + std::to_string(y) + " -> " + std::to_string(z) + "\n";
  }
  for (const auto& id : f.functionals) out += "functional " + id + "\n";
  return out;
}

inline InstanceFile load_instance_file(const std::string& path, DslFlavor flavor = DslFlavor::Instance) {
  const std::string text = read_text_file(path);
  try {
    return parse_instance(text, flavor);
  } catch (const PositionedError& e) {
    throw Error(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Reduction checking

struct CheckConfig {
  Nat depth = 50;
  Mode mode = Mode::W;
  Nat budget = 10000;  // cap on backward evaluations
  Nat seed = 0;

  void validate() const {
    if (depth < 1) throw Error("depth must be at least 1");
    if (budget < depth) throw Error("budget must be at least the depth");
  }
};

inline Mode parse_mode(std::string_view s) {
  if (s == "W") return Mode::W;
  if (s == "sW") return Mode::sW;
  throw Error("unknown mode " + std::string(s));
}

/// Verdicts per stage (source, forward, then one per corpus solution), the
/// final verdict and resource counters; `transcript` is the emitted form.
struct RunReport {
  std::vector<Verdict> stages;
  Verdict verdict;
  Nat evaluations = 0;
  Nat max_use = 0;
  Nat source_reads = 0;  // total source-instance reads by backward translations
  bool truncated = false;
  Transcript transcript;

  bool passed() const { return !verdict.is_refuted() && !truncated; }
  bool inconclusive() const { return !verdict.is_refuted() && truncated; }
};

namespace detail {

inline Nat verdict_tag(const Verdict& v) { return static_cast<Nat>(v.tag); }

inline std::vector<Nat> text_data(const std::string& s) { return {s.begin(), s.end()}; }

inline std::string data_text(const std::vector<Nat>& d) {
  std::string s;
  for (Nat v : d) s += static_cast<char>(v);
  return s;
}

inline Transcript reduce_header(const ReductionPair& pair, const CheckConfig& cfg, const std::string& source) {
  Transcript t;
  t.set("kind", "reduce");
  t.set("name", pair.name());
  t.set("mode", mode_name(cfg.mode));
  t.set("depth", cfg.depth);
  t.set("budget", cfg.budget);
  t.set("seed", cfg.seed);
  t.set("source", source);
  return t;
}

inline RunReport check_instance(const ReductionPair& pair, const Instance& src, const CheckConfig& cfg,
                                Transcript header) {
  cfg.validate();
  RunReport rep;
  rep.transcript = std::move(header);
  auto& tr = rep.transcript;
  Nat stage = 0;
  auto log_verdict = [&](const std::string& action, const Verdict& v, std::vector<Nat> extra = {}) {
    rep.stages.push_back(v);
    std::vector<Nat> data = extra;
    data.push_back(verdict_tag(v));
    data.push_back(v.depth);
    data.push_back(rep.evaluations);
    data.push_back(rep.max_use);
    tr.add(stage, action, std::move(data));
  };
  auto finish = [&](Verdict v) {
    rep.verdict = v;
    if (v.is_refuted()) tr.add(stage, "reason", text_data(v.witness));
    tr.add(stage, "verdict",
           {verdict_tag(v), v.depth, rep.evaluations, rep.max_use, rep.source_reads, rep.truncated ? Nat{1} : 0});
    return rep;
  };

  const Verdict sv = prefix_witness("source", pair.validate_source_instance(src, cfg.depth));
  log_verdict("source", sv);
  if (sv.is_refuted()) return finish(sv);

  ++stage;
  const Instance tgt = pair.forward(src);
  const Verdict fv = prefix_witness("forward", pair.validate_target_instance(tgt, cfg.depth));
  log_verdict("forward", fv);
  if (fv.is_refuted()) return finish(fv);

  ++stage;
  const auto corpus = pair.target_solutions(src, tgt, cfg.depth);
  tr.add(stage, "corpus", {static_cast<Nat>(corpus.size())});
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    ++stage;
    const Nat idx = i;
    if (!pair.validate_target(tgt, corpus[i], cfg.depth).ok()) {
      tr.add(stage, "corpus_invalid", {idx});
      continue;
    }
    if (rep.evaluations >= cfg.budget) {
      rep.truncated = true;
      tr.add(stage, "budget_exhausted", {idx});
      break;
    }
    SourceAccess access(src);
    const auto back = pair.backward(access, corpus[i], cfg.depth);
    ++rep.evaluations;
    rep.max_use = std::max(rep.max_use, access.reads());
    rep.source_reads += access.reads();
    Verdict v = Verdict::consistent(cfg.depth);
    if (cfg.mode == Mode::sW && access.reads() > 0)
      v = Verdict::refuted("mode: backward read the source instance " + std::to_string(access.reads()) + " times");
    else if (back.error)
      v = Verdict::refuted("backward: " + *back.error);
    else if (back.complete)
      v = prefix_witness("backward", pair.validate_source(src, back.solution, cfg.depth));
    log_verdict(back.complete || back.error ? "backward" : "pending", v, {idx, access.reads()});
    if (v.is_refuted()) return finish(v);
  }
  // A bounded corpus never proves the reduction, so a pass is only ever consistency at the depth.
  return finish(Verdict::consistent(cfg.depth));
}

}  // namespace detail

/// Checks one source instance described by a file.
inline RunReport run_reduction_check(const ReductionPair& pair, const InstanceFile& file, const CheckConfig& cfg) {
  if (!file.has_rule()) throw Error("instance file has no rule");
  if (!(file.problem_id() == pair.source()))
    throw Error(pair.name() + " expects a " + pair.source().name() + " instance, not " + file.problem_id().name());
  Transcript h = detail::reduce_header(pair, cfg, "file");
  h.set("problem", file.problem);
  h.set("k", file.k);
  h.add(0, "instance_head", file.head);
  h.add(0, "instance_tail", file.tail);
  return detail::check_instance(pair, file.instance(), cfg, std::move(h));
}

/// Checks the source instance drawn by the reduction's generator from cfg.seed.
inline RunReport run_reduction_check(const ReductionPair& pair, const CheckConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  const Instance src = pair.random_source(rng);
  return detail::check_instance(pair, src, cfg, detail::reduce_header(pair, cfg, "random"));
}

// ---------------------------------------------------------------------------
// Emission and replay

inline void emit_trace(const Transcript& t, const std::string& path) {
  try {
    write_text_file(path, print_transcript(t));
  } catch (const Error& e) {
    throw Error(std::string("emit_trace: ") + e.what());
  }
}
inline void emit_trace(const RunReport& r, const std::string& path) { emit_trace(r.transcript, path); }
inline void emit_trace(const AdversaryReport& r, const std::string& path) { emit_trace(r.transcript, path); }

inline Transcript load_trace(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_transcript(text);
  } catch (const PositionedError& e) {
    throw Error(path + ": " + e.what());
  }
}

/// Re-runs the reduction check recorded in a report header.
inline RunReport rerun_reduction(const Transcript& t) {
  if (t.get("kind") != "reduce") throw Error("not a reduction report");
  const auto name = *t.get("name");
  const auto pair = find_reduction(name);
  if (!pair) throw Error("unknown reduction " + name);
  CheckConfig cfg;
  cfg.mode = parse_mode(t.get("mode").value_or(""));
  cfg.depth = t.get_nat("depth");
  cfg.budget = t.get_nat("budget");
  cfg.seed = t.get_nat("seed");
  const auto source = t.get("source").value_or("");
  if (source == "random") return run_reduction_check(*pair, cfg);
  if (source != "file") throw Error("unknown report source " + source);
  const auto* head = t.first("instance_head");
  const auto* tail = t.first("instance_tail");
  if (!head || !tail) throw Error("report lacks the instance rule");
  InstanceFile f;
  f.problem = t.get("problem").value_or("");
  f.k = t.get_nat("k");
  f.head = head->data;
  f.tail = tail->data;
  return run_reduction_check(*pair, f, cfg);
}

struct ReplayResult {
  bool identical = false;
  std::string kind;
  std::string outcome;
  int exit_code = 1;          // exit status of the regenerated run
  std::optional<Nat> first_difference;  // 1-based line of the first differing line
};

namespace detail {

inline std::optional<Nat> first_differing_line(const std::string& a, const std::string& b) {
  const auto la = split_lines(a), lb = split_lines(b);
  for (std::size_t i = 0; i < std::max(la.size(), lb.size()); ++i)
    if (i >= la.size() || i >= lb.size() || la[i] != lb[i]) return i + 1;
  return std::nullopt;
}

}  // namespace detail

/// Exit status of a duel: 0 audited defeat, 2 exhausted, 1 audit failure.
inline int duel_exit_code(const AdversaryReport& r) {
  if (r.defeated()) return check_defeat(r) ? 0 : 1;
  return r.exhausted() ? 2 : 1;
}

inline int check_exit_code(const RunReport& r) { return r.verdict.is_refuted() ? 1 : r.truncated ? 2 : 0; }

/// Regenerates the run named in a transcript header and compares bytes.
inline ReplayResult replay_transcript(const Transcript& t) {
  ReplayResult res;
  res.kind = t.get("kind").value_or("");
  std::string regenerated;
  if (res.kind == "duel") {
    const auto rep = run_duel(duel_spec_of(t));
    regenerated = print_transcript(rep.transcript);
    res.outcome = rep.outcome();
    res.exit_code = duel_exit_code(rep);
  } else if (res.kind == "reduce") {
    const auto rep = rerun_reduction(t);
    regenerated = print_transcript(rep.transcript);
    res.outcome = rep.verdict.str();
    res.exit_code = check_exit_code(rep);
  } else {
    throw Error("transcript kind '" + res.kind + "' cannot be replayed");
  }
  const std::string recorded = print_transcript(t);
  res.identical = recorded == regenerated;
  if (!res.identical) res.first_difference = detail::first_differing_line(recorded, regenerated);
  return res;
}

// ---------------------------------------------------------------------------
// Interval lemma suite

struct LemmaSuiteResult {
  Nat checked = 0;
  std::vector<std::string> failures;
  bool passed() const { return failures.empty(); }
};

/// e_bound against its known values, then `trials` random families per k:
/// disjointness and endpoint provenance checked on rational values, and the
/// brute-force search must agree that a selection exists.
inline LemmaSuiteResult run_lemma_suite(Nat seed, Nat trials, Nat max_k = 4) {
  LemmaSuiteResult res;
  const std::vector<Nat> expected{3, 8, 34, 206, 1650, 16502};
  for (Nat n = 1; n <= expected.size(); ++n) {
    ++res.checked;
    if (e_bound(n) != expected[n - 1])
      res.failures.push_back("e_bound(" + std::to_string(n) + ") = " + std::to_string(e_bound(n)));
  }
  for (Nat k = 1; k <= max_k; ++k) {
    std::mt19937_64 rng(seed * 131 + k);
    for (Nat trial = 0; trial < trials; ++trial) {
      ++res.checked;
      std::vector<std::vector<Nat>> sets(k);
      std::set<Nat> used;
      const Nat universe = 4 * k * e_bound(k) + 50;
      for (auto& s : sets)
        while (s.size() < e_bound(k)) {
          const Nat v = rng() % universe;
          if (used.insert(v).second) s.push_back(v);
        }
      const std::string tag = "k=" + std::to_string(k) + " trial " + std::to_string(trial) + ": ";
      const auto ivs = select_disjoint_intervals(sets);
      bool ok = ivs.size() == k;
      for (Nat i = 0; ok && i < k; ++i) {
        const auto& s = sets[i];
        ok = rat_enum(ivs[i].lo) < rat_enum(ivs[i].hi) && std::count(s.begin(), s.end(), ivs[i].lo) &&
             std::count(s.begin(), s.end(), ivs[i].hi);
      }
      for (Nat i = 0; ok && i < k; ++i)
        for (Nat j = i + 1; ok && j < k; ++j)
          ok = rat_enum(ivs[i].hi) <= rat_enum(ivs[j].lo) || rat_enum(ivs[j].hi) <= rat_enum(ivs[i].lo);
      if (!ok) res.failures.push_back(tag + "selection is not disjoint with provenance");
      if (!disjoint_selection_exists(sets)) res.failures.push_back(tag + "brute force disagrees");
    }
  }
  return res;
}

}  // namespace wlab
