#include "anosov/freegroup.hpp"
#include "anosov/symmetric_set.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <set>

using namespace anosov;

namespace {

ReducedWord word(std::initializer_list<Letter> letters, const Alphabet& a) {
  const std::vector<Letter> v(letters);
  return reduce(v, a);
}

std::vector<Letter> standard_inverse(std::size_t rank) {
  std::vector<Letter> inv;
  for (std::size_t k = 0; k < rank; ++k) {
    inv.push_back(static_cast<Letter>(2 * k + 1));
    inv.push_back(static_cast<Letter>(2 * k));
  }
  return inv;
}

}  // namespace

TEST_SUITE("freegroup") {

TEST_CASE("alphabet validation") {
  CHECK_THROWS_AS(Alphabet({0, 1}), InputError);     // fixpoint
  CHECK_THROWS_AS(Alphabet({1, 2, 0}), InputError);  // not an involution
  const Alphabet a = Alphabet::standard(2);
  CHECK(a.size() == 4);
  CHECK(a.rank() == 2);
  CHECK(a.inverse(0) == 1);
  CHECK(a.inverse(3) == 2);
}

TEST_CASE("free reduction") {
  const Alphabet a = Alphabet::standard(2);
  CHECK(word({0, 2, 3, 1}, a).empty());
  CHECK(word({0, 0, 1, 2}, a) == word({0, 2}, a));
  const ReducedWord w = word({0, 2, 1, 3}, a);
  CHECK(w.size() == 4);
  CHECK(concat(w, inverse(w, a), a).empty());
  CHECK(power(w, 3, a).size() == 12);
  CHECK(power(w, -1, a) == inverse(w, a));
  CHECK(power(w, 0, a).empty());
  const std::vector<Letter> bad{7};
  CHECK_THROWS_AS(reduce(bad, a), InputError);
}

TEST_CASE("reduced word counts and enumeration match breadth-first oracle") {
  for (std::size_t rank : {1u, 2u, 3u}) {
    const Alphabet a = Alphabet::standard(rank);
    const auto expect = oracle::reduced_words(a.size(), standard_inverse(rank), 5);
    std::set<std::vector<Letter>> seen;
    std::uint64_t visits = 0;
    for_each_reduced_word(a, 5, [&](std::span<const Letter> w) {
      ++visits;
      seen.emplace(w.begin(), w.end());
    });
    CHECK(visits == expect.size());
    CHECK(seen.size() == expect.size());
    for (const auto& w : expect) CHECK(seen.count(std::vector<Letter>(w.begin(), w.end())) == 1);
    for (int n = 1; n <= 5; ++n) {
      std::uint64_t count = 0;
      for (const auto& w : expect) count += w.size() == static_cast<std::size_t>(n);
      CHECK(reduced_word_count(rank, n) == count);
    }
  }
  CHECK(reduced_word_count(2, 6) == 4 * 243);
}

TEST_CASE("random reduced words are reduced and deterministic") {
  const Alphabet a = Alphabet::standard(3);
  std::mt19937_64 r1(17), r2(17);
  for (int t = 0; t < 100; ++t) {
    const ReducedWord w = random_reduced_word(a, 12, r1);
    CHECK(w.size() == 12);
    CHECK(reduce(w.letters(), a) == w);
    CHECK(random_reduced_word(a, 12, r2) == w);
  }
}

TEST_CASE("canonical order and formatting") {
  const Alphabet a = Alphabet::standard(2);
  CHECK(word({3}, a) < word({0, 0}, a));
  CHECK(word({0, 2}, a) < word({0, 3}, a));
  const std::vector<std::string> names{"a", "a^-1", "b", "b^-1"};
  CHECK(format_word(word({2, 0, 3}, a), names) == "b a b^-1");
  CHECK(format_word(ReducedWord{}, names) == "1");
}

TEST_CASE("evaluation agrees with plain products") {
  std::mt19937_64 rng(1);
  const std::vector<UnimodularMatrix> gens{UnimodularMatrix(oracle::random_sl(3, rng)),
                                           UnimodularMatrix(oracle::random_sl(3, rng))};
  const SymmetricSet set = SymmetricSet::from_generators(gens, {"a", "b"});
  std::vector<oracle::Mat> mats;
  for (std::size_t i = 0; i < set.size(); ++i) mats.push_back(set.matrix(i));
  std::mt19937_64 wr(2);
  for (int t = 0; t < 50; ++t) {
    const ReducedWord w = random_reduced_word(set.alphabet(), 1 + t % 7, wr);
    const std::vector<std::uint32_t> letters(w.letters().begin(), w.letters().end());
    const oracle::Mat plain = oracle::product(mats, letters);
    CHECK(evaluate(w, set).matrix().isApprox(plain, 1e-9));
    CHECK(evaluate_scaled(w, set).value().isApprox(plain, 1e-9));
  }
}

TEST_CASE("twist automorphisms") {
  const std::size_t rank = 3;
  const Alphabet a = Alphabet::standard(rank);
  const FreeAutomorphism t = twist_automorphism(rank, 1, 2);
  // a_1 -> a_0^2 a_1 a_0^-2, others fixed
  CHECK(t.images[1] == word({0, 0, 2, 1, 1}, a));
  CHECK(t.images[0] == word({0}, a));
  CHECK(t.images[2] == word({4}, a));
  CHECK_THROWS_AS(twist_automorphism(rank, 0, 1), InputError);
  CHECK_THROWS_AS(twist_automorphism(rank, 3, 1), InputError);

  const FreeAutomorphism back = twist_automorphism(rank, 1, -2);
  const FreeAutomorphism id = compose(t, back);
  for_each_reduced_word(a, 4, [&](std::span<const Letter> w) {
    const ReducedWord rw = reduce(w, a);
    CHECK(apply_automorphism(id, rw) == rw);
    // homomorphism: phi(uv) = phi(u) phi(v)
    if (rw.size() >= 2) {
      const ReducedWord u = reduce(w.subspan(0, 1), a);
      const ReducedWord v = reduce(w.subspan(1), a);
      CHECK(apply_automorphism(t, rw) == concat(apply_automorphism(t, u), apply_automorphism(t, v), a));
    }
  });
  // twists by powers of a_0 compose additively
  const FreeAutomorphism t3 = compose(twist_automorphism(rank, 1, 1), twist_automorphism(rank, 1, 2));
  CHECK(t3.images[1] == twist_automorphism(rank, 1, 3).images[1]);
}

}  // TEST_SUITE
