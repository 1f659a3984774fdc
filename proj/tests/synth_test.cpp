#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "conceptcut/synth.hpp"

using namespace conceptcut;

TEST(WordSpans, Basics) {
  auto w = word_spans("ab, cd.\n ef");
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w[1], (std::pair<std::size_t, std::size_t>{4, 6}));
  EXPECT_EQ(word_index_at(w, 0), 0u);
  EXPECT_EQ(word_index_at(w, 3), 1u);
  EXPECT_EQ(word_index_at(w, 4), 1u);
  EXPECT_EQ(word_index_at(w, 100), 3u);
}

TEST(GenerateTaxonomy, ShapeAndDeterminism) {
  TaxonomyGenParams p;
  p.nodes = 50;
  p.roots = 3;
  p.extra_parent_prob = 0.3;
  p.anonymous_fraction = 0.2;
  p.orphans = 4;
  auto a = generate_taxonomy(p, 7);
  auto b = generate_taxonomy(p, 7);
  std::ostringstream sa, sb;
  write_taxonomy(sa, a);
  write_taxonomy(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(a.size(), 54u);
  EXPECT_EQ(a.orphans().size(), 4u);
  EXPECT_EQ(a.roots().size(), 7u);
  EXPECT_GT(a.anonymous_count(), 0u);
  for (auto r : a.roots()) EXPECT_FALSE(a.node(r).anonymous());

  std::ostringstream sc;
  write_taxonomy(sc, generate_taxonomy(p, 8));
  EXPECT_NE(sa.str(), sc.str());
}

TEST(GenerateTaxonomy, Validation) {
  TaxonomyGenParams p;
  p.roots = 0;
  EXPECT_THROW(generate_taxonomy(p, 1), ConfigError);
  p.roots = 1;
  p.extra_parent_prob = 2;
  EXPECT_THROW(generate_taxonomy(p, 1), ConfigError);
}

TEST(GenerateDocuments, DisjointVocabulariesAndLengths) {
  DocumentGenParams p;
  auto docs = generate_documents(8, p, 3);
  ASSERT_EQ(docs.size(), 8u);
  std::vector<std::set<std::string>> vocab;
  for (const auto& d : docs) {
    auto spans = word_spans(d);
    EXPECT_GE(spans.size(), p.min_words);
    EXPECT_LE(spans.size(), p.max_words);
    std::set<std::string> v;
    for (auto [b, e] : spans) v.insert(d.substr(b, e - b));
    EXPECT_LE(v.size(), p.vocabulary);
    for (const auto& other : vocab)
      for (const auto& w : v) EXPECT_EQ(other.count(w), 0u);
    vocab.push_back(std::move(v));
  }
  EXPECT_EQ(generate_documents(8, p, 3), docs);
  DocumentGenParams bad;
  bad.min_words = 10;
  bad.max_words = 5;
  EXPECT_THROW(generate_documents(1, bad, 1), ConfigError);
}

TEST(SynthesizeCorpus, BoundariesAtCumulativeOffsets) {
  std::vector<std::string> docs{"a b c", "d e", "f g h i", "j", "k l m"};
  auto c = synthesize_eval_corpus(docs, 5, 42);
  ASSERT_EQ(c.sources.size(), 5u);
  EXPECT_EQ(std::set<std::size_t>(c.sources.begin(), c.sources.end()).size(), 5u);
  std::size_t words = 0;
  std::vector<std::size_t> want;
  for (std::size_t i = 0; i < 5; ++i) {
    if (i) want.push_back(words);
    words += word_spans(docs[c.sources[i]]).size();
  }
  EXPECT_EQ(c.real.boundaries, want);
  EXPECT_EQ(c.real.word_count, 13u);
  auto spans = word_spans(c.text);
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_EQ(spans[want[i]].first, c.char_offsets[i]);

  auto again = synthesize_eval_corpus(docs, 5, 42);
  EXPECT_EQ(again.text, c.text);
  EXPECT_EQ(again.real.boundaries, c.real.boundaries);
}

TEST(SynthesizeCorpus, GroupOfTen) {
  auto docs = generate_documents(12, {}, 1);
  auto c = synthesize_eval_corpus(docs, 10, 2);
  EXPECT_EQ(c.real.boundaries.size(), 9u);
  EXPECT_EQ(c.real.segment_count(), 10u);
  EXPECT_NO_THROW(validate(c.real));
}

TEST(SynthesizeCorpus, Errors) {
  std::vector<std::string> docs{"a", "b"};
  EXPECT_THROW(synthesize_eval_corpus(docs, 3, 1), DataError);
  EXPECT_THROW(synthesize_eval_corpus(docs, 1, 1), ConfigError);
  std::vector<std::string> empty{"a", "..."};
  EXPECT_THROW(synthesize_eval_corpus(empty, 2, 1), DataError);
}
