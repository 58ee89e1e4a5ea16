#include <doctest.h>

#include <cmath>
#include <random>

#include "synfix/ngram.hpp"

using namespace synfix;

namespace {

using Corpus = std::vector<std::vector<std::string>>;

Corpus random_corpus(std::mt19937_64& rng, std::size_t n) {
  const std::vector<std::string> toks{"a", "b", "c", "d"};
  Corpus c;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> s;
    for (std::size_t k = 0, len = 1 + rng() % 6; k < len; ++k) s.push_back(toks[rng() % toks.size()]);
    c.push_back(std::move(s));
  }
  return c;
}

std::vector<NGramModel::Id> random_context(std::mt19937_64& rng, const NGramModel& m) {
  std::vector<NGramModel::Id> ctx;
  for (std::size_t i = 0; i + 1 < m.order(); ++i)
    ctx.push_back(static_cast<NGramModel::Id>(rng() % m.vocab_size()));
  return ctx;
}

}  // namespace

TEST_CASE("bigram counts of a single sentence") {
  const NGramModel m = NGramModel::train({{"a", "b"}}, 2);
  using W = std::vector<NGramModel::Id>;
  const auto a = m.id("a"), b = m.id("b");
  CHECK(m.count(W{m.bos(), a}) == 1);
  CHECK(m.count(W{a, b}) == 1);
  CHECK(m.count(W{b, m.eos()}) == 1);
  CHECK(m.count(W{b, a}) == 0);
  CHECK(m.vocab_size() == 4);
  CHECK(m.vocabulary()[0] == "<s>");
  CHECK(m.vocabulary()[1] == "</s>");
}

TEST_CASE("duplicated sentences double every count") {
  const NGramModel one = NGramModel::train({{"a", "b", "a"}}, 3);
  const NGramModel two = NGramModel::train({{"a", "b", "a"}, {"a", "b", "a"}}, 3);
  using W = std::vector<NGramModel::Id>;
  const W w{one.bos(), one.bos(), one.id("a")};
  CHECK(two.count(w) == 2 * one.count(w));
  CHECK(two.count(W{one.id("a"), one.id("b"), one.id("a")}) == 2);
}

TEST_CASE("training rejects bad input") {
  CHECK_THROWS_AS(NGramModel::train({}, 2), NGramError);
  CHECK_THROWS_AS(NGramModel::train({{"a"}}, 1), NGramError);
  CHECK_THROWS_AS(NGramModel(1), NGramError);
  CHECK_THROWS_AS(NGramModel::train({{"a", "<s>"}}, 2), NGramError);
  const NGramModel m = NGramModel::train({{"a"}}, 2);
  CHECK_THROWS_AS(m.id("zzz"), NGramError);
}

TEST_CASE("totals are sums of counts") {
  std::mt19937_64 rng(7);
  const NGramModel m = NGramModel::train(random_corpus(rng, 50), 3);
  for (int it = 0; it < 200; ++it) {
    auto ctx = random_context(rng, m);
    std::uint64_t sum = 0;
    for (NGramModel::Id s = 0; s < m.vocab_size(); ++s) {
      auto w = ctx;
      w.push_back(s);
      sum += m.count(w);
    }
    CHECK(sum == m.total(ctx));
  }
}

TEST_CASE("unseen contexts are uniform") {
  const NGramModel m = NGramModel::train({{"a", "b"}}, 3);
  const std::vector<NGramModel::Id> ctx{m.id("b"), m.id("b")};
  for (NGramModel::Id s = 0; s < m.vocab_size(); ++s)
    CHECK(m.logprob(ctx, s) == doctest::Approx(-std::log(static_cast<double>(m.vocab_size()))));
}

TEST_CASE("per-context distributions sum to one") {
  std::mt19937_64 rng(8);
  for (std::size_t order = 2; order <= 4; ++order) {
    const NGramModel m = NGramModel::train(random_corpus(rng, 40), order);
    for (int it = 0; it < 100; ++it) {
      const auto ctx = random_context(rng, m);
      double sum = 0;
      for (NGramModel::Id s = 0; s < m.vocab_size(); ++s) {
        const double lp = m.logprob(ctx, s);
        CHECK(lp < 0);
        sum += std::exp(lp);
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("frequent continuations score higher") {
  const NGramModel m = NGramModel::train({{"a", "b"}, {"a", "b"}, {"a", "c"}}, 2);
  const std::vector<NGramModel::Id> ctx{m.id("a")};
  CHECK(m.logprob(ctx, m.id("b")) > m.logprob(ctx, m.id("c")));
  CHECK(m.logprob(ctx, m.id("c")) > m.logprob(ctx, m.id("a")));
}

TEST_CASE("scores are order sensitive") {
  const NGramModel m = NGramModel::train({{"a", "b"}}, 2);
  CHECK(m.score(std::vector<std::string>{"a", "b"}) != m.score(std::vector<std::string>{"b", "a"}));
  CHECK(m.score(std::vector<std::string>{"a", "b"}) > m.score(std::vector<std::string>{"b", "a"}));
}

TEST_CASE("single-token score is two transitions") {
  const NGramModel m = NGramModel::train({{"a", "b"}, {"b"}}, 2);
  using W = std::vector<NGramModel::Id>;
  const auto b = m.id("b");
  const double expected = m.logprob(W{m.bos()}, b) + m.logprob(W{b}, m.eos());
  CHECK(m.score(W{b}) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("score sums the padded windows") {
  const NGramModel m = NGramModel::train({{"a", "b", "c"}, {"c", "a"}}, 3);
  using W = std::vector<NGramModel::Id>;
  const auto a = m.id("a"), b = m.id("b"), c = m.id("c");
  const double expected = m.logprob(W{m.bos(), m.bos()}, c) + m.logprob(W{m.bos(), c}, a) +
                          m.logprob(W{c, a}, b) + m.logprob(W{a, b}, m.eos());
  CHECK(m.score(W{c, a, b}) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("more corpus support raises the score") {
  const Corpus base{{"a", "b"}, {"b", "c"}, {"c", "a", "a"}};
  Corpus more = base;
  more.push_back({"a", "b", "c"});
  const NGramModel m0 = NGramModel::train(base, 2);
  const NGramModel m1 = NGramModel::train(more, 2);
  // Same vocabulary; every window of `a b c` gains one count.
  CHECK(m1.score(std::vector<std::string>{"a", "b", "c"}) >
        m0.score(std::vector<std::string>{"a", "b", "c"}));
}

TEST_CASE("corpus order does not matter") {
  std::mt19937_64 rng(9);
  Corpus c = random_corpus(rng, 30);
  const NGramModel m0 = NGramModel::train(c, 3);
  std::reverse(c.begin(), c.end());
  const NGramModel m1 = NGramModel::train(c, 3);
  for (const auto& sentence : random_corpus(rng, 50)) CHECK(m0.score(sentence) == m1.score(sentence));
}

TEST_CASE("serialization round-trips") {
  std::mt19937_64 rng(10);
  const NGramModel m = NGramModel::train(random_corpus(rng, 30), 3);
  const std::string text = m.serialize();
  CHECK(text.rfind("ngram 3 6\n<s> </s> ", 0) == 0);
  const NGramModel r = NGramModel::deserialize(text);
  CHECK(r.serialize() == text);
  CHECK(r.vocabulary() == m.vocabulary());
  for (int it = 0; it < 200; ++it) {
    const auto ctx = random_context(rng, m);
    const auto s = static_cast<NGramModel::Id>(rng() % m.vocab_size());
    CHECK(r.logprob(ctx, s) == m.logprob(ctx, s));
  }
}

TEST_CASE("deserialize rejects malformed text") {
  CHECK_THROWS_AS(NGramModel::deserialize(""), NGramError);
  CHECK_THROWS_AS(NGramModel::deserialize("ngram x 3\n"), NGramError);
  CHECK_THROWS_AS(NGramModel::deserialize("ngram 2 3\n<s> </s>\n"), NGramError);
  CHECK_THROWS_AS(NGramModel::deserialize("ngram 2 3\n<s> </s> a\na b\t1\n"), NGramError);
}

TEST_CASE("binding an alphabet extends the vocabulary") {
  NGramModel m = NGramModel::train({{"a"}}, 2);
  const Alphabet al(std::vector<std::string>{"a", "z"});
  const auto ids = m.bind(al);
  REQUIRE(ids.size() == 2);
  CHECK(ids[0] == m.id("a"));
  CHECK(ids[1] == m.id("z"));
  CHECK(m.vocab_size() == 4);
  double sum = 0;
  for (NGramModel::Id s = 0; s < m.vocab_size(); ++s)
    sum += std::exp(m.logprob(std::vector<NGramModel::Id>{m.id("a")}, s));
  CHECK(std::abs(sum - 1.0) <= 1e-12);
}
