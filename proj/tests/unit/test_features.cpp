#include <doctest.h>

#include <cmath>

#include "patent/error.hpp"
#include "patent/features.hpp"
#include "support/oracles.hpp"

using namespace patent;
using namespace patent::features;

namespace {

text::Vocabulary vocab_of(const std::vector<text::Tokens>& docs) {
  return text::build_vocabulary(docs, text::NgramConfig{1, 1});
}

}  // namespace

TEST_CASE("count_vector") {
  const auto v = vocab_of({{"a", "b"}});
  const auto c = count_vector(text::Tokens{"a", "b", "a"}, v);
  CHECK(c == SparseVector(2, {{0, 2.0}, {1, 1.0}}));
  CHECK(count_vector(text::Tokens{"q", "r"}, v).empty());
  CHECK(count_vector(text::Tokens{"b", "a"}, v) == count_vector(text::Tokens{"a", "b"}, v));
}

TEST_CASE("SparseVector invariants are enforced") {
  CHECK_THROWS_AS(SparseVector(2, {{1, 1.0}, {0, 1.0}}), Error);
  CHECK_THROWS_AS(SparseVector(2, {{2, 1.0}}), Error);
  CHECK_THROWS_AS(SparseVector(2, {{0, 1.0}, {0, 2.0}}), Error);
  CHECK(SparseVector(3, {{0, 0.0}, {2, 1.5}}).nnz() == 1);
}

TEST_CASE("tf-idf hand computation") {
  const std::vector<text::Tokens> docs = {{"a"}, {"a", "b"}};
  const auto v = vocab_of(docs);
  const auto idf = idf_table(v);
  CHECK(std::abs(idf[0] - 1.0) < 1e-12);
  CHECK(std::abs(idf[1] - (std::log(1.5) + 1.0)) < 1e-12);

  const auto m = tfidf_transform(count_matrix(docs, v), v);
  CHECK(m.rows[0] == SparseVector(2, {{0, 1.0}}));
  const double b = std::log(1.5) + 1.0;
  const double norm = std::sqrt(1.0 + b * b);
  CHECK(std::abs(m.rows[1].value_at(0) - 1.0 / norm) < 1e-12);
  CHECK(std::abs(m.rows[1].value_at(1) - b / norm) < 1e-12);
  CHECK(std::abs(m.rows[1].value_at(0) - 0.5797) < 5e-5);
  CHECK(std::abs(m.rows[1].value_at(1) - 0.8148) < 5e-5);
}

TEST_CASE("tf-idf properties on random count matrices") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<text::Tokens> docs(1 + rng.below(10));
    for (auto& d : docs) {
      d.resize(rng.below(8));
      for (auto& t : d) t = "w" + std::to_string(rng.below(9));
    }
    if (std::all_of(docs.begin(), docs.end(), [](const auto& d) { return d.empty(); })) docs[0].push_back("w0");
    const auto v = vocab_of(docs);
    const auto counts = count_matrix(docs, v);
    const auto m = tfidf_transform(counts, v);
    for (const double x : idf_table(v)) CHECK(x >= 1.0);
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
      REQUIRE(m.rows[i].nnz() == counts.rows[i].nnz());
      for (std::size_t j = 0; j < m.rows[i].nnz(); ++j) {
        CHECK(m.rows[i].entries()[j].index == counts.rows[i].entries()[j].index);
        CHECK(m.rows[i].entries()[j].value > 0.0);
      }
      if (!m.rows[i].empty()) CHECK(std::abs(std::sqrt(m.rows[i].squared_norm()) - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("binarize") {
  const SparseVector x(4, {{0, 2.0}, {3, 5.0}});
  CHECK(binarize(x) == SparseVector(4, {{0, 1.0}, {3, 1.0}}));
  CHECK(binarize(SparseVector(4)).empty());
  CHECK(binarize(binarize(x)) == binarize(x));
}

TEST_CASE("Featurizer fits on training text only") {
  Featurizer f(text::Stoplist::english(), text::NgramConfig{1, 2}, FeatureMode::tfidf);
  const std::vector<std::string> train = {"The fixing unit heats quickly.", "The cooling plate removes heat."};
  const auto m = f.fit_transform(train);
  CHECK(m.rows.size() == 2);
  CHECK(f.vocabulary().index_of("fixing unit").has_value());
  CHECK_FALSE(f.vocabulary().index_of("the").has_value());
  CHECK(f.transform("completely unseen words").empty());
  CHECK(f.transform(train[0]) == m.rows[0]);

  Featurizer b(text::Stoplist{}, text::NgramConfig{1, 1}, FeatureMode::binary);
  b.fit_transform(std::vector<std::string>{"a a b"});
  CHECK(b.transform("a a a b") == SparseVector(2, {{0, 1.0}, {1, 1.0}}));
}

TEST_CASE("FeatureMode names round-trip") {
  for (auto m : {FeatureMode::tfidf, FeatureMode::binary, FeatureMode::nb_scaled}) {
    CHECK(feature_mode_from_string(to_string(m)) == m);
  }
  CHECK_THROWS_AS(feature_mode_from_string("bogus"), Error);
}
