#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "dilab/semigroup.hpp"

using namespace dilab;

namespace {

// Independent rewriting oracle: repeatedly rewrite the rightmost adjacent
// (f, e) pair until none remains. normalize() scans left-to-right, so
// agreement exercises confluence.
NormalWord normal_form_oracle(const PermRelation& rel, std::vector<Gen> w) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t t = w.size(); t-- > 1;) {
      if (!w[t - 1].is_e && w[t].is_e) {
        auto [i, j] = rel.theta_inv(w[t].index, w[t - 1].index);
        w[t - 1] = Gen{true, i};
        w[t] = Gen{false, j};
        changed = true;
        break;
      }
    }
  }
  NormalWord out;
  for (const Gen& g : w) (g.is_e ? out.e : out.f).push_back(g.index);
  return out;
}

PermRelation random_relation(int m, int n, std::mt19937& gen) {
  std::vector<int> table(static_cast<std::size_t>(m) * n);
  std::iota(table.begin(), table.end(), 0);
  std::shuffle(table.begin(), table.end(), gen);
  return PermRelation(m, n, std::move(table));
}

std::vector<Gen> random_letters(int m, int n, int len, std::mt19937& gen) {
  std::vector<Gen> w;
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> em(0, m - 1), fn(0, n - 1);
  for (int t = 0; t < len; ++t) {
    if (coin(gen)) {
      w.push_back(Gen{true, em(gen)});
    } else {
      w.push_back(Gen{false, fn(gen)});
    }
  }
  return w;
}

Pattern random_pattern(const NormalWord& w, std::mt19937& gen) {
  Pattern p = pattern_of(w);
  std::shuffle(p.begin(), p.end(), gen);
  return p;
}

}  // namespace

TEST_CASE("commute_ef on the named relations") {
  const PermRelation flip = flip_relation();
  const PermRelation fwd = forward_cycle_relation();
  // e_2 f_1 = f_2 e_1
  CHECK(commute_ef(flip, 1, 0) == std::pair<int, int>{1, 0});
  // e_1 f_1 = f_1 e_1
  CHECK(commute_ef(flip, 0, 0) == std::pair<int, int>{0, 0});
  // e_1 f_1 = f_2 e_1
  CHECK(commute_ef(fwd, 0, 0) == std::pair<int, int>{1, 0});
  CHECK_THROWS_AS(commute_ef(flip, 2, 0), std::out_of_range);
}

TEST_CASE("forward cycle matches its relation list") {
  // e1f1=f2e1, e1f2=f1e2, e2f1=f1e1, e2f2=f2e2
  const PermRelation fwd = forward_cycle_relation();
  CHECK(commute_ef(fwd, 0, 0) == std::pair<int, int>{1, 0});
  CHECK(commute_ef(fwd, 0, 1) == std::pair<int, int>{0, 1});
  CHECK(commute_ef(fwd, 1, 0) == std::pair<int, int>{0, 0});
  CHECK(commute_ef(fwd, 1, 1) == std::pair<int, int>{1, 1});
}

TEST_CASE("normalize") {
  const PermRelation flip = flip_relation();
  const PermRelation fwd = forward_cycle_relation();

  CHECK(normalize(flip, parse_word("f2 e1", 2, 2)) == NormalWord{{1}, {0}});
  CHECK(normalize(flip, {}) == NormalWord{});
  CHECK(normalize(fwd, parse_word("f1 e2", 2, 2)) == NormalWord{{0}, {1}});

  CHECK_THROWS_AS(normalize(flip, std::vector<Gen>{Gen{true, 5}}), std::out_of_range);
}

TEST_CASE("factor") {
  const PermRelation flip = flip_relation();
  const PermRelation fwd = forward_cycle_relation();

  // e_1 f_2 = f_1 e_2 under the flip
  auto seq = factor(flip, NormalWord{{0}, {1}}, Pattern{false, true});
  CHECK(to_string(seq) == "f1 e2");

  // pure-e words are untouched
  auto seq2 = factor(flip, NormalWord{{1, 0}, {}}, Pattern{true, true});
  CHECK(to_string(seq2) == "e2 e1");

  // e_1 f_1 = f_2 e_1 under the forward cycle
  auto seq3 = factor(fwd, NormalWord{{0}, {0}}, Pattern{false, true});
  CHECK(to_string(seq3) == "f2 e1");

  CHECK_THROWS_AS(factor(flip, NormalWord{{0}, {1}}, Pattern{true, true}),
                  std::invalid_argument);
}

TEST_CASE("multiply") {
  const PermRelation flip = flip_relation();
  const NormalWord w2{{1}, {0, 1}};
  CHECK(multiply(flip, NormalWord{}, w2) == w2);
  CHECK(multiply(flip, w2, NormalWord{}) == w2);

  // e_2 * (f_1 f_2) has degree (1,2) and matches the oracle.
  auto prod = multiply(flip, NormalWord{{1}, {}}, NormalWord{{}, {0, 1}});
  CHECK(prod.degree() == std::pair<int, int>{1, 2});
  std::vector<Gen> raw = {Gen{true, 1}, Gen{false, 0}, Gen{false, 1}};
  CHECK(prod == normal_form_oracle(flip, raw));

  CHECK(multiply(flip, NormalWord{{0}, {}}, NormalWord{{1}, {}}) == NormalWord{{0, 1}, {}});
}

TEST_CASE("normalize agrees with the right-to-left oracle") {
  std::mt19937 gen(414213);
  for (int trial = 0; trial < 300; ++trial) {
    const PermRelation rel = random_relation(2, 2, gen);
    auto letters = random_letters(2, 2, 8, gen);
    CHECK(normalize(rel, letters) == normal_form_oracle(rel, letters));
  }
  for (int trial = 0; trial < 100; ++trial) {
    const PermRelation rel = random_relation(2, 3, gen);
    auto letters = random_letters(2, 3, 7, gen);
    CHECK(normalize(rel, letters) == normal_form_oracle(rel, letters));
  }
}

TEST_CASE("unique factorization property") {
  std::mt19937 gen(9001);
  for (int trial = 0; trial < 200; ++trial) {
    const PermRelation rel = random_relation(2, 2, gen);
    auto letters = random_letters(2, 2, 8, gen);
    const NormalWord w = normalize(rel, letters);
    const Pattern p = random_pattern(w, gen);
    auto seq = factor(rel, w, p);
    CHECK(pattern_of(seq) == p);
    CHECK(normalize(rel, seq) == w);
  }
}

TEST_CASE("normalize is idempotent and degree is additive") {
  std::mt19937 gen(77);
  for (int trial = 0; trial < 200; ++trial) {
    const PermRelation rel = random_relation(2, 2, gen);
    const NormalWord w = normalize(rel, random_letters(2, 2, 8, gen));
    CHECK(normalize(rel, letters_of(w)) == w);

    const NormalWord w2 = normalize(rel, random_letters(2, 2, 6, gen));
    const NormalWord prod = multiply(rel, w, w2);
    CHECK(prod.edeg() == w.edeg() + w2.edeg());
    CHECK(prod.fdeg() == w.fdeg() + w2.fdeg());
  }
}

TEST_CASE("multiply is associative") {
  std::mt19937 gen(123987);
  for (int trial = 0; trial < 150; ++trial) {
    const PermRelation rel = random_relation(2, 2, gen);
    const NormalWord a = normalize(rel, random_letters(2, 2, 5, gen));
    const NormalWord b = normalize(rel, random_letters(2, 2, 5, gen));
    const NormalWord c = normalize(rel, random_letters(2, 2, 5, gen));
    CHECK(multiply(rel, multiply(rel, a, b), c) == multiply(rel, a, multiply(rel, b, c)));
  }
}

TEST_CASE("right division by a degree-(1,1) block") {
  std::mt19937 gen(5150);
  for (int trial = 0; trial < 100; ++trial) {
    const PermRelation rel = random_relation(2, 2, gen);
    const NormalWord q = normalize(rel, random_letters(2, 2, 5, gen));
    std::uniform_int_distribution<int> idx(0, 1);
    const int i = idx(gen), j = idx(gen);
    const NormalWord g = multiply(rel, q, NormalWord{{i}, {j}});
    NormalWord back;
    REQUIRE(divide_right_block(rel, g, i, j, &back));
    CHECK(back == q);
  }
  // A word with no f cannot be divisible.
  const PermRelation flip = flip_relation();
  CHECK(!divide_right_block(flip, NormalWord{{0, 1}, {}}, 0, 0, nullptr));
}

TEST_CASE("classification of the 2x2 relations") {
  const ClassifyResult res = classify(2, 2);
  CHECK(res.permutation_count == 24);
  CHECK(res.classes.size() == 9);

  std::size_t covered = 0;
  std::set<std::vector<int>> seen;
  for (const auto& cls : res.classes) {
    covered += cls.size();
    for (const auto& t : cls) CHECK(seen.insert(t).second);  // disjoint
  }
  CHECK(covered == 24);

  CHECK(!is_isomorphic(forward_cycle_relation(), reverse_cycle_relation()));
  CHECK(is_isomorphic(flip_relation(), flip_relation()));
}

TEST_CASE("classification of the trivial case") {
  const ClassifyResult res = classify(1, 1);
  CHECK(res.classes.size() == 1);
  CHECK(res.permutation_count == 1);
}

TEST_CASE("classify guards the enumeration size") {
  CHECK_THROWS_AS(classify(3, 3), std::invalid_argument);
}

TEST_CASE("is_isomorphic is an equivalence on samples") {
  std::mt19937 gen(2024);
  std::vector<PermRelation> sample;
  for (int t = 0; t < 8; ++t) sample.push_back(random_relation(2, 2, gen));
  for (const auto& a : sample) {
    CHECK(is_isomorphic(a, a));
    for (const auto& b : sample) {
      CHECK(is_isomorphic(a, b) == is_isomorphic(b, a));
      for (const auto& c : sample) {
        if (is_isomorphic(a, b) && is_isomorphic(b, c)) CHECK(is_isomorphic(a, c));
      }
    }
  }
}
