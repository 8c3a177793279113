#pragma once

// Reduced words over a symmetric alphabet, depth-first enumeration, matrix
// evaluation and free-group automorphisms (twists).

#include "anosov/linalg.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace anosov {

using Letter = std::uint32_t;

/// 2r letters with a fixpoint-free involution pairing each letter with its
/// inverse. The standard layout puts a_k at 2k and a_k^{-1} at 2k+1.
class Alphabet {
 public:
  explicit Alphabet(std::vector<Letter> inverse);
  static Alphabet standard(std::size_t rank);

  std::size_t size() const { return inverse_.size(); }
  std::size_t rank() const { return inverse_.size() / 2; }
  Letter inverse(Letter x) const { return inverse_[x]; }
  bool operator==(const Alphabet& other) const { return inverse_ == other.inverse_; }

 private:
  std::vector<Letter> inverse_;
};

/// A freely reduced word: no letter is followed by its inverse.
class ReducedWord {
 public:
  ReducedWord() = default;

  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  std::span<const Letter> letters() const { return letters_; }
  Letter operator[](std::size_t i) const { return letters_[i]; }

  bool operator==(const ReducedWord&) const = default;
  auto operator<=>(const ReducedWord& other) const {
    if (auto c = size() <=> other.size(); c != 0) return c;
    return letters_ <=> other.letters_;
  }

 private:
  friend ReducedWord reduce(std::span<const Letter>, const Alphabet&);
  std::vector<Letter> letters_;
};

/// Free reduction. Throws InputError for letters outside the alphabet.
ReducedWord reduce(std::span<const Letter> letters, const Alphabet& alphabet);

ReducedWord concat(const ReducedWord& u, const ReducedWord& v, const Alphabet& alphabet);
ReducedWord inverse(const ReducedWord& w, const Alphabet& alphabet);
ReducedWord power(const ReducedWord& w, int k, const Alphabet& alphabet);

/// Number of reduced words of length exactly n over a rank-r alphabet.
std::uint64_t reduced_word_count(std::size_t rank, int n);

/// Streams every reduced word of length 1..max_len exactly once, depth-first
/// with last-letter exclusion. The callback receives the current letters.
template <class Visit>
void for_each_reduced_word(const Alphabet& alphabet, int max_len, Visit&& visit) {
  if (max_len <= 0) return;
  std::vector<Letter> stack;
  stack.reserve(static_cast<std::size_t>(max_len));
  auto recurse = [&](auto&& self) -> void {
    for (Letter x = 0; x < alphabet.size(); ++x) {
      if (!stack.empty() && x == alphabet.inverse(stack.back())) continue;
      stack.push_back(x);
      visit(std::span<const Letter>(stack));
      if (static_cast<int>(stack.size()) < max_len) self(self);
      stack.pop_back();
    }
  };
  recurse(recurse);
}

/// Uniform random reduced word of the given length.
ReducedWord random_reduced_word(const Alphabet& alphabet, std::size_t length, std::mt19937_64& rng);

/// Human-readable form using the given letter names, e.g. "a b^-1".
std::string format_word(const ReducedWord& w, std::span<const std::string> names);

class SymmetricSet;

/// Ordered matrix product. Throws ComputationError when entries overflow.
UnimodularMatrix evaluate(const ReducedWord& w, const SymmetricSet& set);

/// Ordered product kept in log-rescaled form.
ScaledMatrix evaluate_scaled(const ReducedWord& w, const SymmetricSet& set);

/// Automorphism of the free group of the given rank, determined by the
/// images of the positive generators a_0, ..., a_{rank-1}.
struct FreeAutomorphism {
  std::size_t rank = 0;
  std::vector<ReducedWord> images;

  static FreeAutomorphism identity(std::size_t rank);
};

/// a_i -> a_0^k a_i a_0^{-k}, every other generator fixed.
FreeAutomorphism twist_automorphism(std::size_t rank, std::size_t twisted_index, int power);

ReducedWord apply_automorphism(const FreeAutomorphism& phi, const ReducedWord& w);

/// (phi o psi)(w) = phi(psi(w)).
FreeAutomorphism compose(const FreeAutomorphism& phi, const FreeAutomorphism& psi);

}  // namespace anosov
