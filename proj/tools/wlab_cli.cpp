// Command-line front end: instance checks, reduction runs, duels, the interval
// lemma suite and transcript replay.
//
// Exit codes: 0 pass or audited defeat, 1 failure, 2 inconclusive.

#include "wlab/harness.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace wlab;

namespace {

constexpr int kPass = 0, kFail = 1, kInconclusive = 2;

int worst(int a, int b) {
  if (a == kFail || b == kFail) return kFail;
  return a == kInconclusive || b == kInconclusive ? kInconclusive : kPass;
}

struct CheckArgs {
  std::string path;
  Nat depth = 50;
};

int run_check(const CheckArgs& a) {
  const auto f = load_instance_file(a.path);
  const auto pid = f.problem_id();
  const auto v = validate_instance(pid, f.rule(), a.depth);
  std::cout << "instance " << pid.name() << ": " << v.str() << "\n";
  if (v.is_refuted()) return kFail;
  if (pid.kind == Kind::IndE) {
    const auto s = solve_ind_e(f.rule(), a.depth);
    const auto sv = validate_solution(pid, f.rule(), s.solution.set, s.solution.certs, a.depth);
    std::cout << "solution color " << s.color << " (case " << s.which_case << "): " << sv.str() << "\n";
    if (sv.is_refuted()) return kFail;
  }
  return kPass;
}

struct ReduceArgs {
  std::string name, instance, out, mode;
  Nat depth = 50, budget = 100000, seed = 0, trials = 1;
};

int run_reduce(const ReduceArgs& a) {
  const auto pair = find_reduction(a.name);
  if (!pair) {
    std::cerr << "unknown reduction " << a.name << "; known:";
    for (const auto& r : reduction_catalog()) std::cerr << " " << r->name();
    std::cerr << "\n";
    return kFail;
  }
  CheckConfig cfg;
  cfg.depth = a.depth;
  cfg.budget = a.budget;
  cfg.mode = a.mode.empty() ? pair->mode() : parse_mode(a.mode);
  std::optional<InstanceFile> file;
  if (!a.instance.empty()) file = load_instance_file(a.instance);
  int status = kPass;
  for (Nat t = 0; t < a.trials; ++t) {
    cfg.seed = a.seed + t;
    const auto rep = file ? run_reduction_check(*pair, *file, cfg) : run_reduction_check(*pair, cfg);
    std::cout << pair->name() << " mode " << mode_name(cfg.mode) << " seed " << cfg.seed << ": "
              << rep.verdict.str() << (rep.truncated ? " (budget exhausted)" : "") << ", evaluations "
              << rep.evaluations << ", max use " << rep.max_use << "\n";
    if (!a.out.empty()) emit_trace(rep, a.trials == 1 ? a.out : a.out + "." + std::to_string(cfg.seed));
    status = worst(status, check_exit_code(rep));
  }
  return status;
}

struct DuelArgs {
  std::string engine, delta, psi, candidates, replay, out, fault;
  Nat horizon = 2000, seed = 0, k = 2;
};

int report_replay(const std::string& path) {
  const auto res = replay_transcript(load_trace(path));
  if (!res.identical) {
    std::cout << path << ": replay differs at line " << res.first_difference.value_or(0) << "\n";
    return kFail;
  }
  std::cout << path << ": replay identical, " << res.kind << " outcome " << res.outcome << "\n";
  return res.exit_code;
}

int run_duel_cmd(const DuelArgs& a) {
  if (!a.replay.empty()) {
    const auto t = load_trace(a.replay);
    if (t.get("kind") != "duel") throw Error(a.replay + ": not a duel transcript");
    return report_replay(a.replay);
  }
  if (a.engine.empty()) throw Error("duel needs an engine or --replay");
  DuelSpec s;
  s.engine = a.engine;
  const auto [d0, p0] = default_candidate(a.engine);
  s.delta = d0;
  s.psi = p0;
  s.k = a.k;
  if (!a.candidates.empty()) {
    const auto f = load_instance_file(a.candidates, DslFlavor::Candidates);
    s.delta = f.functionals.at(0);
    if (f.functionals.size() > 1) s.psi = f.functionals.at(1);
    if (f.k >= 2) s.k = f.k;
  }
  if (!a.delta.empty()) s.delta = a.delta;
  if (!a.psi.empty()) s.psi = a.psi;
  s.horizon = a.horizon;
  s.seed = a.seed;
  if (a.fault == "drop_cancellation")
    s.faults.drop_cancellation = true;
  else if (a.fault == "wrong_lock_color")
    s.faults.wrong_lock_color = true;
  else if (!a.fault.empty())
    throw Error("unknown fault " + a.fault);
  const auto rep = run_duel(s);
  const int code = duel_exit_code(rep);
  std::cout << "duel " << s.engine << " delta " << s.delta << " psi " << s.psi << " horizon " << s.horizon << ": "
            << rep.outcome();
  if (rep.defeated()) {
    const auto why = defeat_audit_failure(rep.transcript);
    std::cout << (why ? ", audit failed: " + *why : ", audited");
  }
  std::cout << "\n";
  if (!a.out.empty()) emit_trace(rep, a.out);
  return code;
}

struct LemmaArgs {
  Nat seed = 0, budget = 500;
};

int run_lemma(const LemmaArgs& a) {
  for (Nat n = 1; n <= 6; ++n) std::cout << "e(" << n << ") = " << e_bound(n) << "\n";
  const auto res = run_lemma_suite(a.seed, a.budget);
  std::cout << "interval selections checked: " << res.checked << ", failures: " << res.failures.size() << "\n";
  for (const auto& f : res.failures) std::cout << "  " << f << "\n";
  return res.passed() ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weihrauch reduction lab: reduction checks, adversary duels and transcript replay"};
  app.require_subcommand(1);

  CheckArgs check;
  auto* c = app.add_subcommand("check", "Parse and validate an instance file");
  c->add_option("path", check.path, "Instance file")->required();
  c->add_option("--depth", check.depth, "Validation depth")->check(CLI::PositiveNumber);

  ReduceArgs reduce;
  auto* r = app.add_subcommand("reduce", "Check a catalog reduction on seeded or file instances");
  r->add_option("--name", reduce.name, "Reduction name")->required();
  r->add_option("--instance", reduce.instance, "Instance file for the source problem");
  r->add_option("--depth", reduce.depth, "Check depth")->check(CLI::PositiveNumber);
  r->add_option("--mode", reduce.mode, "Oracle discipline (default: the reduction's own)")
      ->check(CLI::IsMember({"W", "sW"}));
  r->add_option("--budget", reduce.budget, "Cap on backward evaluations");
  r->add_option("--seed", reduce.seed, "First seed");
  r->add_option("--trials", reduce.trials, "Number of consecutive seeds")->check(CLI::PositiveNumber);
  r->add_option("--out", reduce.out, "Report path (suffixed by seed when trials > 1)");

  DuelArgs duel;
  auto* d = app.add_subcommand("duel", "Run an adversary engine against candidate functionals");
  d->add_option("engine", duel.engine, "pcet, lim, cn or srt")->check(CLI::IsMember(engine_names()));
  d->add_option("--delta", duel.delta, "Forward candidate name");
  d->add_option("--psi", duel.psi, "Backward candidate name");
  d->add_option("--candidates", duel.candidates, "Candidate file with functional lines (delta first)");
  d->add_option("--horizon", duel.horizon, "Stage horizon");
  d->add_option("--seed", duel.seed, "Seed recorded in the report");
  d->add_option("--k", duel.k, "Color count for the cn engine")->check(CLI::Range(2, 16));
  d->add_option("--fault", duel.fault, "Planted engine defect")
      ->check(CLI::IsMember({"drop_cancellation", "wrong_lock_color"}));
  d->add_option("--replay", duel.replay, "Replay a duel transcript instead of running");
  d->add_option("--out", duel.out, "Transcript path");

  LemmaArgs lemma;
  auto* l = app.add_subcommand("lemma", "Run the recurrence and disjoint-interval property suite");
  l->add_option("--seed", lemma.seed, "Seed");
  l->add_option("--budget", lemma.budget, "Random families per color count");

  std::string replay_path;
  auto* p = app.add_subcommand("replay", "Replay any transcript and compare bytes");
  p->add_option("path", replay_path, "Transcript file")->required();

  CLI11_PARSE(app, argc, argv);
  if (check.depth == 0 || reduce.depth == 0) return kFail;
  try {
    if (*c) return run_check(check);
    if (*r) {
      if (reduce.budget < reduce.depth) throw Error("--budget must be at least --depth");
      return run_reduce(reduce);
    }
    if (*d) return run_duel_cmd(duel);
    if (*l) return run_lemma(lemma);
    if (*p) return report_replay(replay_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kFail;
}
