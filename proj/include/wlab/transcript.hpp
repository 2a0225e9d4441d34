// Line-oriented transcripts: a small header of named parameters followed by
// records `stage <s> | action <name> | data <nats>`.
#pragma once

#include "wlab/baire.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace wlab {

struct TranscriptRecord {
  Nat stage = 0;
  std::string action;
  std::vector<Nat> data;
  friend bool operator==(const TranscriptRecord&, const TranscriptRecord&) = default;
};

/// Replay/parse failure at a 1-based line and column.
struct PositionedError : Error {
  PositionedError(Nat line, Nat column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line(line),
        column(column) {}
  Nat line, column;
};

/// Header parameters keep insertion order so printing is canonical.
struct Transcript {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<TranscriptRecord> records;

  void set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : header)
      if (k == key) {
        v = value;
        return;
      }
    header.emplace_back(key, value);
  }
  void set(const std::string& key, Nat value) { set(key, std::to_string(value)); }

  std::optional<std::string> get(const std::string& key) const {
    for (const auto& [k, v] : header)
      if (k == key) return v;
    return std::nullopt;
  }
  Nat get_nat(const std::string& key) const {
    auto v = get(key);
    if (!v) throw Error("transcript header lacks " + key);
    return std::stoull(*v);
  }

  void add(Nat stage, std::string action, std::vector<Nat> data = {}) {
    records.push_back({stage, std::move(action), std::move(data)});
  }

  std::vector<const TranscriptRecord*> find(std::string_view action) const {
    std::vector<const TranscriptRecord*> out;
    for (const auto& r : records)
      if (r.action == action) out.push_back(&r);
    return out;
  }
  const TranscriptRecord* first(std::string_view action) const {
    for (const auto& r : records)
      if (r.action == action) return &r;
    return nullptr;
  }

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

inline std::string format_record(const TranscriptRecord& r) {
  std::string out = "stage " + std::to_string(r.stage) + " | action " + r.action + " | data";
  for (Nat v : r.data) out += " " + std::to_string(v);
  return out;
}

inline std::string print_transcript(const Transcript& t) {
  std::string out = "# wlab transcript\n";
  for (const auto& [k, v] : t.header) out += "# " + k + " " + v + "\n";
  out += "# records " + std::to_string(t.records.size()) + "\n";
  for (const auto& r : t.records) out += format_record(r) + "\n";
  return out;
}

namespace detail {

/// Cursor over one line; columns are 1-based.
class LineCursor {
 public:
  LineCursor(std::string_view line, Nat line_no) : s_(line), line_(line_no) {}

  [[noreturn]] void fail(const std::string& what) const { throw PositionedError(line_, pos_ + 1, what); }

  void skip_spaces() {
    while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
  }
  bool at_end() {
    skip_spaces();
    return pos_ >= s_.size();
  }
  void expect(std::string_view word) {
    skip_spaces();
    if (s_.substr(pos_, word.size()) != word) fail("expected '" + std::string(word) + "'");
    pos_ += word.size();
  }
  std::string word() {
    skip_spaces();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ' ') ++pos_;
    if (start == pos_) fail("expected a word");
    return std::string(s_.substr(start, pos_ - start));
  }
  Nat nat() {
    skip_spaces();
    const std::size_t start = pos_;
    Nat v = 0;
    while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') {
      v = v * 10 + static_cast<Nat>(s_[pos_] - '0');
      ++pos_;
    }
    if (start == pos_) fail("expected a natural number");
    if (pos_ < s_.size() && s_[pos_] != ' ') fail("unexpected character");
    return v;
  }
  Nat column() const { return pos_ + 1; }

 private:
  std::string_view s_;
  Nat line_;
  std::size_t pos_ = 0;
};

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      lines.push_back(std::move(cur));
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  if (!cur.empty()) lines.push_back(std::move(cur));
  return lines;
}

}  // namespace detail

inline Transcript parse_transcript(const std::string& text) {
  const auto lines = detail::split_lines(text);
  Transcript t;
  if (lines.empty() || lines[0] != "# wlab transcript") throw PositionedError(1, 1, "missing transcript banner");
  std::optional<Nat> declared;
  std::size_t i = 1;
  for (; i < lines.size() && lines[i].starts_with("#"); ++i) {
    detail::LineCursor cur(lines[i], i + 1);
    cur.expect("#");
    const std::string key = cur.word();
    cur.skip_spaces();
    std::string value = lines[i].substr(cur.column() - 1);
    if (key == "records") {
      detail::LineCursor num(value, i + 1);
      declared = num.nat();
    } else {
      t.header.emplace_back(key, value);
    }
  }
  if (!declared) throw PositionedError(i + 1, 1, "missing record count");
  for (; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    detail::LineCursor cur(lines[i], i + 1);
    TranscriptRecord r;
    cur.expect("stage");
    r.stage = cur.nat();
    cur.expect("|");
    cur.expect("action");
    r.action = cur.word();
    cur.expect("|");
    cur.expect("data");
    while (!cur.at_end()) r.data.push_back(cur.nat());
    t.records.push_back(std::move(r));
  }
  if (t.records.size() != *declared)
    throw PositionedError(lines.size() + 1, 1,
                          "expected " + std::to_string(*declared) + " records, found " + std::to_string(t.records.size()));
  return t;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw Error("write failed for " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace wlab
