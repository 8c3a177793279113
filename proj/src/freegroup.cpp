#include "anosov/freegroup.hpp"

#include "anosov/symmetric_set.hpp"

#include <numeric>

namespace anosov {

Alphabet::Alphabet(std::vector<Letter> inverse) : inverse_(std::move(inverse)) {
  if (inverse_.empty() || inverse_.size() % 2 != 0) {
    throw InputError("alphabet must have a positive even number of letters");
  }
  for (Letter x = 0; x < inverse_.size(); ++x) {
    const Letter y = inverse_[x];
    if (y >= inverse_.size() || y == x || inverse_[y] != x) {
      throw InputError("inverse pairing is not a fixpoint-free involution");
    }
  }
}

Alphabet Alphabet::standard(std::size_t rank) {
  std::vector<Letter> inv(2 * rank);
  for (Letter k = 0; k < rank; ++k) {
    inv[2 * k] = 2 * k + 1;
    inv[2 * k + 1] = 2 * k;
  }
  return Alphabet(std::move(inv));
}

ReducedWord reduce(std::span<const Letter> letters, const Alphabet& alphabet) {
  ReducedWord w;
  for (Letter x : letters) {
    if (x >= alphabet.size()) throw InputError("letter index out of range");
    if (!w.letters_.empty() && w.letters_.back() == alphabet.inverse(x)) {
      w.letters_.pop_back();
    } else {
      w.letters_.push_back(x);
    }
  }
  return w;
}

ReducedWord concat(const ReducedWord& u, const ReducedWord& v, const Alphabet& alphabet) {
  std::vector<Letter> all(u.letters().begin(), u.letters().end());
  all.insert(all.end(), v.letters().begin(), v.letters().end());
  return reduce(all, alphabet);
}

ReducedWord inverse(const ReducedWord& w, const Alphabet& alphabet) {
  std::vector<Letter> inv;
  inv.reserve(w.size());
  for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) {
    inv.push_back(alphabet.inverse(*it));
  }
  return reduce(inv, alphabet);
}

ReducedWord power(const ReducedWord& w, int k, const Alphabet& alphabet) {
  const ReducedWord base = k >= 0 ? w : inverse(w, alphabet);
  ReducedWord out;
  for (int i = 0; i < std::abs(k); ++i) out = concat(out, base, alphabet);
  return out;
}

std::uint64_t reduced_word_count(std::size_t rank, int n) {
  if (n <= 0) return n == 0 ? 1 : 0;
  std::uint64_t count = 2 * rank;
  for (int i = 1; i < n; ++i) count *= 2 * rank - 1;
  return count;
}

ReducedWord random_reduced_word(const Alphabet& alphabet, std::size_t length, std::mt19937_64& rng) {
  std::vector<Letter> letters;
  letters.reserve(length);
  const auto m = static_cast<Letter>(alphabet.size());
  for (std::size_t i = 0; i < length; ++i) {
    if (letters.empty()) {
      letters.push_back(std::uniform_int_distribution<Letter>(0, m - 1)(rng));
    } else {
      // Draw from the 2r-1 letters other than the inverse of the last one.
      const Letter banned = alphabet.inverse(letters.back());
      Letter x = std::uniform_int_distribution<Letter>(0, m - 2)(rng);
      if (x >= banned) ++x;
      letters.push_back(x);
    }
  }
  return reduce(letters, alphabet);
}

std::string format_word(const ReducedWord& w, std::span<const std::string> names) {
  if (w.empty()) return "1";
  std::string out;
  for (Letter x : w.letters()) {
    if (!out.empty()) out += ' ';
    out += x < names.size() ? names[x] : "x" + std::to_string(x);
  }
  return out;
}

UnimodularMatrix evaluate(const ReducedWord& w, const SymmetricSet& set) {
  Matrix m = Matrix::Identity(set.dim(), set.dim());
  for (Letter x : w.letters()) {
    if (x >= set.size()) throw InputError("word letter outside the symmetric set");
    m = m * set.element(x).value().value();
  }
  if (!m.allFinite()) throw ComputationError("word product overflows; use evaluate_scaled");
  return UnimodularMatrix::trusted(std::move(m));
}

ScaledMatrix evaluate_scaled(const ReducedWord& w, const SymmetricSet& set) {
  ScaledMatrix m = ScaledMatrix::identity(set.dim());
  for (Letter x : w.letters()) {
    if (x >= set.size()) throw InputError("word letter outside the symmetric set");
    m = m * set.element(x).value();
  }
  return m;
}

// --- automorphisms ------------------------------------------------------------

FreeAutomorphism FreeAutomorphism::identity(std::size_t rank) {
  FreeAutomorphism phi;
  phi.rank = rank;
  const Alphabet alphabet = Alphabet::standard(rank);
  for (Letter k = 0; k < rank; ++k) {
    const Letter a = 2 * k;
    phi.images.push_back(reduce(std::span<const Letter>(&a, 1), alphabet));
  }
  return phi;
}

FreeAutomorphism twist_automorphism(std::size_t rank, std::size_t twisted_index, int power_k) {
  if (twisted_index == 0) throw InputError("cannot twist the twisting generator a_0");
  if (twisted_index >= rank) throw InputError("twisted generator index out of range");
  const Alphabet alphabet = Alphabet::standard(rank);
  FreeAutomorphism phi = FreeAutomorphism::identity(rank);
  const ReducedWord z = power(phi.images[0], power_k, alphabet);
  phi.images[twisted_index] =
      concat(concat(z, phi.images[twisted_index], alphabet), inverse(z, alphabet), alphabet);
  return phi;
}

ReducedWord apply_automorphism(const FreeAutomorphism& phi, const ReducedWord& w) {
  const Alphabet alphabet = Alphabet::standard(phi.rank);
  std::vector<Letter> out;
  for (Letter x : w.letters()) {
    if (x >= alphabet.size()) throw InputError("word letter outside the automorphism's rank");
    const ReducedWord& image = phi.images[x / 2];
    if (x % 2 == 0) {
      out.insert(out.end(), image.letters().begin(), image.letters().end());
    } else {
      const ReducedWord inv = inverse(image, alphabet);
      out.insert(out.end(), inv.letters().begin(), inv.letters().end());
    }
  }
  return reduce(out, alphabet);
}

FreeAutomorphism compose(const FreeAutomorphism& phi, const FreeAutomorphism& psi) {
  if (phi.rank != psi.rank) throw InputError("rank mismatch in automorphism composition");
  FreeAutomorphism out;
  out.rank = phi.rank;
  for (const ReducedWord& image : psi.images) out.images.push_back(apply_automorphism(phi, image));
  return out;
}

}  // namespace anosov
