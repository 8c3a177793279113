#pragma once

#include "anosov/freegroup.hpp"
#include "anosov/linalg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace anosov {

/// An element of SL_d(R) in log-rescaled form, carried together with its
/// second exterior power so that alpha_1 stays accurate for high powers.
class GroupElement {
 public:
  static GroupElement from(const UnimodularMatrix& g);

  int dim() const { return value_.dim(); }
  const ScaledMatrix& value() const { return value_; }
  const ScaledMatrix& wedge() const { return wedge_; }
  /// Projective representative (unit Frobenius norm).
  const Matrix& direction() const { return value_.unit; }

  double log_norm() const { return log_norm_; }
  /// alpha_1(mu(g)) = log(||g||^2 / ||wedge^2 g||).
  double alpha1() const { return 2.0 * log_norm_ - wedge_log_norm_; }

  GroupElement power(std::uint64_t n) const;
  GroupElement transpose() const;
  GroupElement operator*(const GroupElement& other) const;

 private:
  GroupElement(ScaledMatrix value, ScaledMatrix wedge);

  ScaledMatrix value_;
  ScaledMatrix wedge_;
  double log_norm_ = 0.0;
  double wedge_log_norm_ = 0.0;
};

/// S = {g_1, ..., g_2r} with an involution pairing each element with its inverse.
class SymmetricSet {
 public:
  /// Validates that the pairing is a fixpoint-free involution and that
  /// g_i g_pair(i) is the identity within pair_tol (scaled by the norms).
  SymmetricSet(const std::vector<UnimodularMatrix>& elements, std::vector<Letter> pairing,
               std::vector<std::string> names, double pair_tol = 1e-8);

  /// Closes generators under inversion: [g0, g0^-1, g1, g1^-1, ...].
  static SymmetricSet from_generators(const std::vector<UnimodularMatrix>& generators,
                                      std::vector<std::string> names = {});

  int dim() const { return dim_; }
  std::size_t size() const { return elements_.size(); }
  std::size_t rank() const { return elements_.size() / 2; }
  const GroupElement& element(std::size_t i) const { return elements_[i]; }
  /// Element i as a plain matrix: the loaded entries for sets built from
  /// matrices, exact transposes for duals, materialized powers otherwise.
  const Matrix& matrix(std::size_t i) const { return raw_[i]; }
  Letter inverse_index(std::size_t i) const { return alphabet_.inverse(static_cast<Letter>(i)); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  const std::vector<std::string>& names() const { return names_; }
  const Alphabet& alphabet() const { return alphabet_; }
  /// Exponent relative to the originally loaded set.
  std::uint64_t exponent() const { return exponent_; }

  /// S^n = {g_1^n, ..., g_2r^n}, same pairing.
  SymmetricSet power(std::uint64_t n) const;
  /// S* = {g_1^*, ..., g_2r^*} with g^* = (g^{-1})^T, using the paired inverse.
  SymmetricSet dual() const;
  /// Reorders elements: position k of the result holds element order[k].
  SymmetricSet permuted(const std::vector<std::size_t>& order) const;

 private:
  SymmetricSet(int dim, std::vector<GroupElement> elements, std::vector<Matrix> raw, Alphabet alphabet,
               std::vector<std::string> names, std::uint64_t exponent);

  int dim_ = 0;
  std::vector<GroupElement> elements_;
  std::vector<Matrix> raw_;
  Alphabet alphabet_;
  std::vector<std::string> names_;
  std::uint64_t exponent_ = 1;
};

}  // namespace anosov
