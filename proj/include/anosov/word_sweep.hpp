#pragma once

// Sweeps over all reduced words of length 1..L of a symmetric set, handing
// each word's log-rescaled product to an accumulator.
//
// Two implementations with identical arithmetic per word:
//   sweep_words_serial  plain depth-first recursion (reference)
//   sweep_words         OpenMP over the subtrees below a fixed prefix length
//
// Accumulators provide
//   void observe(const WordView&);
//   void merge(const Acc& later);
// and must break ties by canonical word order (length, then letters) so the
// merged result does not depend on visiting order.

#include "anosov/symmetric_set.hpp"

#include <omp.h>

#include <span>
#include <vector>

namespace anosov {

struct WordView {
  std::span<const Letter> letters;
  const ScaledMatrix& product;        // x_0 x_1 ... x_n
  const ScaledMatrix& wedge_product;  // wedge^2 of the same product
  double sum_log_norms;               // sum_i log ||x_i||
  double sum_alpha1;                  // sum_i alpha_1(mu(x_i))

  /// log(||x_0 ... x_n|| / (||x_0|| ... ||x_n||)).
  double log_norm_ratio() const { return product.log_norm() - sum_log_norms; }
  /// alpha_1(mu(x_0 ... x_n)).
  double alpha1() const { return 2.0 * product.log_norm() - wedge_product.log_norm(); }
};

/// Strict canonical order on words: shorter first, then lexicographic.
inline bool canonical_less(std::span<const Letter> a, std::span<const Letter> b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

/// True if (value, word) beats (best_value, best_word) for a minimum.
inline bool improves_min(double value, std::span<const Letter> word, double best_value,
                         std::span<const Letter> best_word, bool have_best) {
  if (!have_best) return true;
  if (value < best_value) return true;
  if (value > best_value) return false;
  return canonical_less(word, best_word);
}

namespace detail {

struct SweepFrame {
  ScaledMatrix product;
  ScaledMatrix wedge;
  double sum_log_norms;
  double sum_alpha1;
};

inline SweepFrame extend(const SweepFrame& f, const GroupElement& x) {
  return {f.product * x.value(), f.wedge * x.wedge(), f.sum_log_norms + x.log_norm(),
          f.sum_alpha1 + x.alpha1()};
}

inline SweepFrame root_frame(const SymmetricSet& set) {
  const int w = set.dim() * (set.dim() - 1) / 2;
  return {ScaledMatrix::identity(set.dim()), ScaledMatrix::identity(w), 0.0, 0.0};
}

// Visits every reduced extension of `letters` (not `letters` itself) up to max_len.
template <class Acc>
void descend(const SymmetricSet& set, int max_len, std::vector<Letter>& letters,
             const SweepFrame& frame, Acc& acc) {
  if (static_cast<int>(letters.size()) >= max_len) return;
  const Alphabet& alphabet = set.alphabet();
  for (Letter x = 0; x < set.size(); ++x) {
    if (!letters.empty() && x == alphabet.inverse(letters.back())) continue;
    letters.push_back(x);
    const SweepFrame next = extend(frame, set.element(x));
    acc.observe(WordView{letters, next.product, next.wedge, next.sum_log_norms, next.sum_alpha1});
    descend(set, max_len, letters, next, acc);
    letters.pop_back();
  }
}

}  // namespace detail

template <class Acc>
Acc sweep_words_serial(const SymmetricSet& set, int max_len, Acc acc) {
  std::vector<Letter> letters;
  detail::descend(set, max_len, letters, detail::root_frame(set), acc);
  return acc;
}

/// Prefix length at which sweep_words splits the word tree into tasks.
inline int sweep_split_depth(const SymmetricSet& set, int max_len, std::size_t min_tasks = 64) {
  int k = 1;
  std::size_t count = set.size();
  while (k < max_len && count < min_tasks) {
    count *= set.size() - 1;
    ++k;
  }
  return k;
}

template <class Acc>
Acc sweep_words(const SymmetricSet& set, int max_len, Acc prototype) {
  if (max_len <= 0) return prototype;
  const int split = sweep_split_depth(set, max_len);

  // Words shorter than the split depth are few; visit them serially.
  Acc acc = sweep_words_serial(set, split - 1, prototype);

  std::vector<std::vector<Letter>> prefixes;
  for_each_reduced_word(set.alphabet(), split, [&](std::span<const Letter> w) {
    if (static_cast<int>(w.size()) == split) prefixes.emplace_back(w.begin(), w.end());
  });

  std::vector<Acc> partial(prefixes.size(), prototype);
  const auto task_count = static_cast<std::int64_t>(prefixes.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t t = 0; t < task_count; ++t) {
    std::vector<Letter> letters;
    letters.reserve(static_cast<std::size_t>(max_len));
    detail::SweepFrame frame = detail::root_frame(set);
    for (Letter x : prefixes[static_cast<std::size_t>(t)]) {
      letters.push_back(x);
      frame = detail::extend(frame, set.element(x));
    }
    Acc& local = partial[static_cast<std::size_t>(t)];
    local.observe(WordView{letters, frame.product, frame.wedge, frame.sum_log_norms, frame.sum_alpha1});
    detail::descend(set, max_len, letters, frame, local);
  }

  for (const Acc& p : partial) acc.merge(p);
  return acc;
}

}  // namespace anosov
