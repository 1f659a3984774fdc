#pragma once

// Lexicon built from lemmas and suffix inflection rules, with a
// longest-match tokenizer/lemmatizer and stoplist filtering.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "conceptcut/error.hpp"
#include "conceptcut/text_util.hpp"

namespace conceptcut {

// Replace `strip` at the end of the lemma by `append`.
struct SuffixRule {
  std::string strip;
  std::string append;
  friend bool operator==(const SuffixRule&, const SuffixRule&) = default;
};

// A lemma with either suffix rules or an explicit list of irregular forms,
// never both. The lemma itself is always a surface form.
struct LemmaEntry {
  std::string lemma;
  std::string pos;
  std::vector<SuffixRule> rules;
  std::vector<std::string> irregular_forms;
  std::vector<std::string> concept_ids;
};

struct LemmaCandidate {
  std::string lemma;
  std::string pos;
  std::vector<std::string> concept_ids;
};

struct Token {
  std::string surface;  // original case
  std::size_t begin = 0;  // byte offsets into the source text, end exclusive
  std::size_t end = 0;
  std::vector<LemmaCandidate> lemma_candidates;  // empty for unknown tokens
  bool is_stopword = false;

  bool known() const { return !lemma_candidates.empty(); }
};

struct RejectedEntry {
  std::size_t index;
  std::string reason;
};

struct LexiconBuild;

class Lexicon {
 public:
  const std::vector<LemmaEntry>& entries() const { return entries_; }
  const std::set<std::string>& stoplist() const { return stoplist_; }

  // Entries producing the (case-insensitive) surface form.
  std::span<const std::uint32_t> lookup(std::string_view surface) const {
    auto it = index_.find(normalize_surface(surface));
    if (it == index_.end()) return {};
    return it->second;
  }

  bool is_stopword(std::string_view surface) const { return stop_index_.count(normalize_surface(surface)) != 0; }

  std::size_t surface_count() const { return index_.size(); }
  std::size_t max_surface_length() const { return max_len_; }

  // All normalized surface forms, sorted.
  std::vector<std::string> surfaces() const {
    std::vector<std::string> out;
    out.reserve(index_.size());
    for (const auto& [s, _] : index_) out.push_back(s);
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<LemmaCandidate> candidates(std::string_view surface) const {
    std::vector<LemmaCandidate> out;
    for (auto e : lookup(surface)) {
      const auto& entry = entries_[e];
      out.push_back({entry.lemma, entry.pos, entry.concept_ids});
    }
    return out;
  }

 private:
  friend LexiconBuild build_lexicon(std::vector<LemmaEntry> entries, std::set<std::string> stoplist);

  std::vector<LemmaEntry> entries_;
  std::unordered_map<std::string, std::vector<std::uint32_t>> index_;
  std::set<std::string> stoplist_;
  std::unordered_set<std::string> stop_index_;
  std::size_t max_len_ = 0;
};

struct LexiconBuild {
  Lexicon lexicon;
  std::vector<RejectedEntry> rejected;
};

namespace detail {

// Every surface form of a well-formed entry; the reason string is set instead
// when the entry is rejected.
inline std::vector<std::string> inflect(const LemmaEntry& e, std::string& reason) {
  std::vector<std::string> forms;
  if (trim(e.lemma).empty()) {
    reason = "empty lemma";
    return {};
  }
  if (!e.rules.empty() && !e.irregular_forms.empty()) {
    reason = "entry has both inflection rules and irregular forms";
    return {};
  }
  forms.push_back(e.lemma);
  for (const auto& r : e.rules) {
    if (r.strip.size() > e.lemma.size()) {
      reason = "rule strips '" + r.strip + "', longer than lemma '" + e.lemma + "'";
      return {};
    }
    if (e.lemma.compare(e.lemma.size() - r.strip.size(), r.strip.size(), r.strip) != 0) {
      reason = "rule strips '" + r.strip + "', not a suffix of '" + e.lemma + "'";
      return {};
    }
    auto form = e.lemma.substr(0, e.lemma.size() - r.strip.size()) + r.append;
    if (trim(form).empty()) {
      reason = "rule '" + r.strip + "/" + r.append + "' yields an empty form";
      return {};
    }
    forms.push_back(std::move(form));
  }
  for (const auto& f : e.irregular_forms) {
    if (trim(f).empty()) {
      reason = "empty irregular form";
      return {};
    }
    forms.push_back(f);
  }
  return forms;
}

}  // namespace detail

// Malformed entries are skipped and reported with their input index.
inline LexiconBuild build_lexicon(std::vector<LemmaEntry> entries, std::set<std::string> stoplist) {
  LexiconBuild out;
  auto& lex = out.lexicon;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    std::string reason;
    auto forms = detail::inflect(entries[i], reason);
    if (!reason.empty()) {
      out.rejected.push_back({i, std::move(reason)});
      continue;
    }
    const auto idx = static_cast<std::uint32_t>(lex.entries_.size());
    lex.entries_.push_back(std::move(entries[i]));
    for (const auto& f : forms) {
      auto key = normalize_surface(f);
      auto& slot = lex.index_[key];
      if (std::find(slot.begin(), slot.end(), idx) == slot.end()) slot.push_back(idx);
      lex.max_len_ = std::max(lex.max_len_, key.size());
    }
  }
  for (const auto& s : stoplist) {
    auto key = normalize_surface(s);
    if (!key.empty()) lex.stop_index_.insert(std::move(key));
  }
  lex.stoplist_ = std::move(stoplist);
  return out;
}

// Longest-match tokenization. At each word start, the longest lexicon form
// that ends on a word boundary is taken (a space inside a compound matches any
// whitespace run). Otherwise a maximal run of word characters becomes an
// unknown token. Whitespace and unmatched punctuation are skipped.
inline std::vector<Token> tokenize(std::string_view text, const Lexicon& lexicon) {
  std::vector<Token> tokens;
  const std::size_t n = text.size();
  auto word = [&](std::size_t i) { return is_word_char(static_cast<unsigned char>(text[i])); };
  auto boundary_at = [&](std::size_t e) { return e == n || !word(e) || !word(e - 1); };

  std::vector<std::size_t> ends;
  std::size_t p = 0;
  while (p < n) {
    if (is_space(static_cast<unsigned char>(text[p]))) {
      ++p;
      continue;
    }
    // Candidate ends, bounded by the longest normalized form; whitespace runs
    // count once, as they do after normalization.
    ends.clear();
    std::size_t normalized_len = 0;
    bool prev_space = false;
    for (std::size_t e = p + 1; e <= n; ++e) {
      const bool sp = is_space(static_cast<unsigned char>(text[e - 1]));
      if (!(sp && prev_space)) ++normalized_len;
      prev_space = sp;
      if (normalized_len > lexicon.max_surface_length()) break;
      if (!sp && boundary_at(e)) ends.push_back(e);
    }
    std::size_t match_end = 0;
    for (auto it = ends.rbegin(); it != ends.rend(); ++it) {
      if (!lexicon.lookup(text.substr(p, *it - p)).empty()) {
        match_end = *it;
        break;
      }
    }
    if (match_end == 0) {
      if (!word(p)) {
        ++p;
        continue;
      }
      match_end = p;
      while (match_end < n && word(match_end)) ++match_end;
    }
    Token t;
    t.surface = std::string(text.substr(p, match_end - p));
    t.begin = p;
    t.end = match_end;
    t.lemma_candidates = lexicon.candidates(t.surface);
    t.is_stopword = lexicon.is_stopword(t.surface);
    tokens.push_back(std::move(t));
    p = match_end;
  }
  return tokens;
}

inline std::vector<Token> filter_stopwords(std::vector<Token> tokens, const Lexicon& lexicon) {
  std::erase_if(tokens, [&](const Token& t) { return t.is_stopword || lexicon.is_stopword(t.surface); });
  return tokens;
}

// Lexicon file format (UTF-8, tab separated, '#' comments):
//   lemma <TAB> pos <TAB> spec <TAB> concept_ids
// spec is one of
//   -                         lemma only
//   rules:strip/append,...    suffix rules, e.g. rules:/s,/ed,/ing or rules:y/ies
//   forms:f1,f2,...           irregular forms
// concept_ids is a comma separated list, empty or '-' for none.
inline LemmaEntry parse_lexicon_line(std::string_view line, std::size_t line_no) {
  const auto where = " (line " + std::to_string(line_no) + ")";
  auto fields = split_tabs(line);
  if (fields.size() < 3 || fields.size() > 4) throw DataError("expected 3 or 4 tab-separated columns" + where);
  LemmaEntry e;
  e.lemma = std::string(fields[0]);
  e.pos = std::string(fields[1]);
  auto spec = trim(fields[2]);
  if (spec.rfind("rules:", 0) == 0) {
    for (auto rule : split(spec.substr(6), ',')) {
      auto slash = rule.find('/');
      if (slash == std::string_view::npos) throw DataError("rule '" + std::string(rule) + "' lacks '/'" + where);
      e.rules.push_back({std::string(rule.substr(0, slash)), std::string(rule.substr(slash + 1))});
    }
  } else if (spec.rfind("forms:", 0) == 0) {
    for (auto f : split(spec.substr(6), ',')) e.irregular_forms.emplace_back(f);
  } else if (!spec.empty() && spec != "-") {
    throw DataError("unknown inflection spec '" + std::string(spec) + "'" + where);
  }
  if (fields.size() == 4) {
    auto ids = trim(fields[3]);
    if (!ids.empty() && ids != "-")
      for (auto id : split(ids, ',')) {
        auto t = trim(id);
        if (t.empty()) throw DataError("empty concept id" + where);
        e.concept_ids.emplace_back(t);
      }
  }
  return e;
}

inline std::vector<LemmaEntry> load_lexicon_entries(std::istream& in) {
  std::vector<LemmaEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    entries.push_back(parse_lexicon_line(line, line_no));
  }
  return entries;
}

// One surface form per line; blank lines ignored.
inline std::set<std::string> load_stoplist(std::istream& in) {
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (!t.empty()) out.emplace(t);
  }
  return out;
}

}  // namespace conceptcut
