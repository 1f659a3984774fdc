#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "conceptcut/lexicon.hpp"

using namespace conceptcut;

namespace {

LemmaEntry entry(std::string lemma, std::vector<SuffixRule> rules = {}, std::vector<std::string> forms = {},
                 std::vector<std::string> concepts = {}) {
  LemmaEntry e;
  e.lemma = std::move(lemma);
  e.pos = "N";
  e.rules = std::move(rules);
  e.irregular_forms = std::move(forms);
  e.concept_ids = std::move(concepts);
  return e;
}

std::vector<std::string> surfaces(const std::vector<Token>& toks) {
  std::vector<std::string> out;
  for (const auto& t : toks) out.push_back(t.surface);
  return out;
}

bool has_lemma(const Token& t, const std::string& lemma) {
  for (const auto& c : t.lemma_candidates)
    if (c.lemma == lemma) return true;
  return false;
}

}  // namespace

TEST(BuildLexicon, SuffixRulesGenerateEveryForm) {
  // verb pattern (ed, ed, ing) plus noun pattern (s)
  auto b = build_lexicon({entry("call", {{"", "ed"}, {"", "ed"}, {"", "ing"}, {"", "s"}})}, {});
  ASSERT_TRUE(b.rejected.empty());
  EXPECT_EQ(b.lexicon.surfaces(), (std::vector<std::string>{"call", "called", "calling", "calls"}));
  for (auto f : {"call", "called", "calling", "calls"}) {
    auto c = b.lexicon.candidates(f);
    ASSERT_EQ(c.size(), 1u) << f;
    EXPECT_EQ(c[0].lemma, "call");
  }
}

TEST(BuildLexicon, StripAndAppend) {
  auto b = build_lexicon({entry("city", {{"y", "ies"}})}, {});
  EXPECT_EQ(b.lexicon.candidates("cities").at(0).lemma, "city");
  EXPECT_TRUE(b.lexicon.lookup("citys").empty());
}

TEST(BuildLexicon, EmptyEntryList) {
  auto b = build_lexicon({}, {});
  EXPECT_EQ(b.lexicon.surface_count(), 0u);
  EXPECT_TRUE(b.lexicon.lookup("anything").empty());
  EXPECT_TRUE(b.lexicon.candidates("").empty());
}

TEST(BuildLexicon, IrregularForms) {
  auto b = build_lexicon({entry("is", {}, {"be", "was", "been"})}, {});
  for (auto f : {"is", "be", "was", "been"}) {
    auto c = b.lexicon.candidates(f);
    ASSERT_EQ(c.size(), 1u) << f;
    EXPECT_EQ(c[0].lemma, "is");
  }
}

TEST(BuildLexicon, MalformedEntriesAreReportedWithIndex) {
  auto b = build_lexicon({entry("go", {{"", "es"}}),
                          entry("at", {{"cat", ""}}),
                          entry("run", {{"x", "s"}}),
                          entry("be", {{"", "s"}}, {"was"}),
                          entry(""),
                          entry("a", {{"a", ""}}),
                          entry("ok")},
                         {});
  ASSERT_EQ(b.rejected.size(), 5u);
  std::vector<std::size_t> idx;
  for (const auto& r : b.rejected) idx.push_back(r.index);
  EXPECT_EQ(idx, (std::vector<std::size_t>{1, 2, 3, 4, 5}));
  EXPECT_NE(b.rejected[0].reason.find("longer than lemma"), std::string::npos);
  EXPECT_NE(b.rejected[1].reason.find("not a suffix"), std::string::npos);
  EXPECT_NE(b.rejected[2].reason.find("both"), std::string::npos);
  EXPECT_EQ(b.lexicon.entries().size(), 2u);
  EXPECT_FALSE(b.lexicon.lookup("goes").empty());
  EXPECT_FALSE(b.lexicon.lookup("ok").empty());
}

TEST(BuildLexicon, StoplistKeptVerbatim) {
  auto b = build_lexicon({}, {"The", "of"});
  EXPECT_EQ(b.lexicon.stoplist(), (std::set<std::string>{"The", "of"}));
  EXPECT_TRUE(b.lexicon.is_stopword("the"));
  EXPECT_TRUE(b.lexicon.is_stopword("OF"));
  EXPECT_FALSE(b.lexicon.is_stopword("cat"));
}

TEST(BuildLexicon, SharedSurfaceKeepsBothEntries) {
  auto b = build_lexicon({entry("saw", {}, {}, {"tool"}), entry("see", {}, {"saw"}, {"vision"})}, {});
  auto c = b.lexicon.candidates("Saw");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].lemma, "saw");
  EXPECT_EQ(c[1].lemma, "see");
}

TEST(Tokenize, CompoundPreferred) {
  auto b = build_lexicon({entry("system"), entry("output"), entry("system output", {}, {}, {"c1"}), entry("ready")},
                         {"the", "is"});
  auto toks = tokenize("The system output is ready.", b.lexicon);
  EXPECT_EQ(surfaces(toks), (std::vector<std::string>{"The", "system output", "is", "ready"}));
  ASSERT_TRUE(toks[1].known());
  EXPECT_EQ(toks[1].lemma_candidates[0].lemma, "system output");
  EXPECT_EQ(toks[1].lemma_candidates[0].concept_ids, (std::vector<std::string>{"c1"}));
  EXPECT_TRUE(toks[0].is_stopword);
  EXPECT_FALSE(toks[0].known());
}

TEST(Tokenize, EmptyText) {
  auto b = build_lexicon({entry("a")}, {});
  EXPECT_TRUE(tokenize("", b.lexicon).empty());
  EXPECT_TRUE(tokenize("  \n\t ", b.lexicon).empty());
}

TEST(Tokenize, LongestMatchThenUnknown) {
  auto b = build_lexicon({entry("new"), entry("york"), entry("new york")}, {});
  auto toks = tokenize("new york city", b.lexicon);
  ASSERT_EQ(surfaces(toks), (std::vector<std::string>{"new york", "city"}));
  EXPECT_TRUE(toks[0].known());
  EXPECT_FALSE(toks[1].known());
  EXPECT_EQ(toks[0].begin, 0u);
  EXPECT_EQ(toks[0].end, 8u);
  EXPECT_EQ(toks[1].begin, 9u);
  EXPECT_EQ(toks[1].end, 13u);
}

TEST(Tokenize, CaseInsensitiveAndWhitespaceRuns) {
  auto b = build_lexicon({entry("new york")}, {});
  auto toks = tokenize("In NEW \n  York", b.lexicon);
  ASSERT_EQ(toks.size(), 2u);
  EXPECT_EQ(toks[1].surface, "NEW \n  York");
  EXPECT_EQ(toks[1].lemma_candidates.at(0).lemma, "new york");
}

TEST(Tokenize, MatchMustEndOnWordBoundary) {
  auto b = build_lexicon({entry("cat")}, {});
  auto toks = tokenize("cats cat.", b.lexicon);
  ASSERT_EQ(surfaces(toks), (std::vector<std::string>{"cats", "cat"}));
  EXPECT_FALSE(toks[0].known());
  EXPECT_TRUE(toks[1].known());
}

TEST(Tokenize, PunctuationSkippedUnlessInLexicon) {
  auto b = build_lexicon({entry("c++"), entry("e-mail")}, {});
  auto toks = tokenize("c++, e-mail; x-ray!", b.lexicon);
  EXPECT_EQ(surfaces(toks), (std::vector<std::string>{"c++", "e-mail", "x", "ray"}));
}

TEST(Tokenize, NonAsciiBytesAreWordCharacters) {
  auto b = build_lexicon({entry("caf\xc3\xa9")}, {});
  auto toks = tokenize("un caf\xc3\xa9 noir", b.lexicon);
  ASSERT_EQ(toks.size(), 3u);
  EXPECT_TRUE(toks[1].known());
}

TEST(FilterStopwords, RemovesStoppedTokensInOrder) {
  auto b = build_lexicon({}, {"the"});
  auto toks = filter_stopwords(tokenize("the cat sat", b.lexicon), b.lexicon);
  ASSERT_EQ(surfaces(toks), (std::vector<std::string>{"cat", "sat"}));
  EXPECT_EQ(toks[0].begin, 4u);
  EXPECT_EQ(toks[1].begin, 8u);
}

TEST(FilterStopwords, EmptyStoplistIsIdentity) {
  auto b = build_lexicon({}, {});
  auto toks = tokenize("the cat sat", b.lexicon);
  EXPECT_EQ(surfaces(filter_stopwords(toks, b.lexicon)), surfaces(toks));
}

TEST(FilterStopwords, AllStopped) {
  auto b = build_lexicon({}, {"a", "b"});
  EXPECT_TRUE(filter_stopwords(tokenize("a b A", b.lexicon), b.lexicon).empty());
}

TEST(LexiconFile, ParsesAllSpecKinds) {
  std::istringstream in(
      "# comment\n"
      "call\tV\trules:/ed,/ing,/s\tc1,c2\n"
      "\n"
      "is\tV\tforms:be,was,been\t-\n"
      "city\tN\trules:y/ies\n"
      "dog\tN\t-\tc3\r\n");
  auto entries = load_lexicon_entries(in);
  ASSERT_EQ(entries.size(), 4u);
  EXPECT_EQ(entries[0].rules, (std::vector<SuffixRule>{{"", "ed"}, {"", "ing"}, {"", "s"}}));
  EXPECT_EQ(entries[0].concept_ids, (std::vector<std::string>{"c1", "c2"}));
  EXPECT_EQ(entries[1].irregular_forms, (std::vector<std::string>{"be", "was", "been"}));
  EXPECT_TRUE(entries[1].concept_ids.empty());
  EXPECT_EQ(entries[2].rules, (std::vector<SuffixRule>{{"y", "ies"}}));
  EXPECT_EQ(entries[3].concept_ids, (std::vector<std::string>{"c3"}));
}

TEST(LexiconFile, MalformedLinesThrow) {
  EXPECT_THROW(parse_lexicon_line("only\ttwo", 1), DataError);
  EXPECT_THROW(parse_lexicon_line("a\tN\trules:ed", 1), DataError);
  EXPECT_THROW(parse_lexicon_line("a\tN\tpattern", 1), DataError);
  EXPECT_THROW(parse_lexicon_line("a\tN\t-\tc1,,c2", 1), DataError);
  try {
    parse_lexicon_line("a\tN\tbogus", 7);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 7"), std::string::npos);
  }
}

TEST(LexiconFile, Stoplist) {
  std::istringstream in("the\n  of \n\nand\n");
  EXPECT_EQ(load_stoplist(in), (std::set<std::string>{"the", "of", "and"}));
}

// Random lexicons over a small alphabet so that prefixes and compounds collide
// often.
class LexiconProperties : public ::testing::Test {
 protected:
  std::mt19937_64 rng{20240611};

  std::string word(std::size_t min_len = 1) {
    std::uniform_int_distribution<int> len(static_cast<int>(min_len), 5);
    std::uniform_int_distribution<int> ch(0, 3);
    std::string w;
    for (int i = len(rng); i > 0; --i) w += static_cast<char>('a' + ch(rng));
    return w;
  }

  std::vector<LemmaEntry> random_entries(std::size_t n) {
    std::vector<LemmaEntry> out;
    for (std::size_t i = 0; i < n; ++i) {
      std::string lemma = word();
      if (rng() % 4 == 0) lemma += " " + word();
      LemmaEntry e = entry(lemma);
      if (rng() % 2) e.rules.push_back({"", word()});
      if (rng() % 3 == 0 && lemma.size() > 1) e.rules.push_back({lemma.substr(lemma.size() - 1), word()});
      out.push_back(std::move(e));
    }
    return out;
  }
};

TEST_F(LexiconProperties, EveryGeneratedFormRoundTrips) {
  for (int trial = 0; trial < 30; ++trial) {
    auto entries = random_entries(20);
    auto b = build_lexicon(entries, {});
    ASSERT_TRUE(b.rejected.empty());
    for (const auto& e : b.lexicon.entries()) {
      std::string reason;
      for (const auto& f : detail::inflect(e, reason)) {
        auto toks = tokenize(f, b.lexicon);
        ASSERT_EQ(toks.size(), 1u) << "form '" << f << "'";
        EXPECT_TRUE(has_lemma(toks[0], e.lemma)) << "form '" << f << "'";
      }
    }
  }
}

TEST_F(LexiconProperties, LongestMatchDominatesPrefixes) {
  for (int trial = 0; trial < 200; ++trial) {
    std::string s1 = word();
    std::string s2 = s1 + (rng() % 2 ? " " : "") + word();
    auto b = build_lexicon({entry(s1), entry(s2)}, {});
    auto toks = tokenize(s2 + " " + word(), b.lexicon);
    ASSERT_FALSE(toks.empty());
    EXPECT_EQ(toks[0].surface, s2);
  }
}

TEST_F(LexiconProperties, SpansReconstructTheText) {
  static constexpr std::string_view delims[] = {" ", "  ", "\n", ", ", ". ", "-", "\t"};
  for (int trial = 0; trial < 100; ++trial) {
    auto b = build_lexicon(random_entries(15), {});
    std::string text;
    for (int w = 0; w < 30; ++w) {
      text += word();
      text += delims[rng() % std::size(delims)];
    }
    auto toks = tokenize(text, b.lexicon);
    std::string rebuilt;
    std::size_t pos = 0;
    for (const auto& t : toks) {
      ASSERT_GE(t.begin, pos);
      ASSERT_GT(t.end, t.begin);
      for (std::size_t i = pos; i < t.begin; ++i) ASSERT_FALSE(is_word_char(static_cast<unsigned char>(text[i])));
      rebuilt += text.substr(pos, t.begin - pos);
      ASSERT_EQ(text.substr(t.begin, t.end - t.begin), t.surface);
      rebuilt += t.surface;
      pos = t.end;
    }
    rebuilt += text.substr(pos);
    EXPECT_EQ(rebuilt, text);
  }
}
