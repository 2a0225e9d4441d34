// Shared plumbing for the adversary engines: reports, fault knobs and small
// helpers over transcripts.
#pragma once

#include "wlab/lemmas.hpp"
#include "wlab/problems.hpp"
#include "wlab/transcript.hpp"

#include <string>

namespace wlab {

/// Outcome records: `defeated` (data: engine-specific kind) or `exhausted` (data: level or stage).
struct AdversaryReport {
  Transcript transcript;
  Prefix coloring;  // the instance built so far, when the engine builds one on ℚ

  bool defeated() const { return transcript.first("defeated") != nullptr; }
  bool exhausted() const { return transcript.first("exhausted") != nullptr; }
  std::string outcome() const {
    if (defeated()) return "Defeated";
    if (const auto* r = transcript.first("exhausted")) return "HorizonExhausted(" + std::to_string(r->stage) + ")";
    return "Unfinished";
  }
};

/// Planted engine defects used by the mutation suite.
struct EngineFaults {
  bool drop_cancellation = false;  // pcet: keep followers when A(s) grows
  bool wrong_lock_color = false;   // srt: lock a column to the committed point's own color
};

/// Canonical header shared by every duel report.
inline Transcript duel_header(const std::string& engine, const std::string& delta, const std::string& psi,
                              Nat horizon, Nat seed) {
  Transcript t;
  t.set("kind", "duel");
  t.set("engine", engine);
  t.set("delta", delta);
  t.set("psi", psi);
  t.set("horizon", horizon);
  t.set("seed", seed);
  return t;
}

namespace detail {

inline std::vector<Nat> concat(std::initializer_list<std::vector<Nat>> parts) {
  std::vector<Nat> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

inline std::vector<Nat> set_data(const std::set<Nat>& s) { return {s.begin(), s.end()}; }

/// Characteristic string of a finite set on [0, length).
inline Prefix char_string(const std::set<Nat>& s, Nat length) {
  Prefix out(length, 0);
  for (Nat v : s)
    if (v < length) out[v] = 1;
  return out;
}

/// Records of one action, failing when the count differs from `expected`.
inline const TranscriptRecord* only(const Transcript& t, std::string_view action) {
  const auto v = t.find(action);
  return v.size() == 1 ? v.front() : nullptr;
}

}  // namespace detail

}  // namespace wlab
