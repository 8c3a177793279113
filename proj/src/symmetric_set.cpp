#include "anosov/symmetric_set.hpp"

#include <algorithm>

namespace anosov {

namespace {

Alphabet checked_alphabet(std::size_t count, std::vector<Letter> pairing) {
  if (count == 0) throw InputError("symmetric set is empty (r = 0)");
  if (pairing.size() != count) throw InputError("pairing size does not match element count");
  return Alphabet(std::move(pairing));
}

}  // namespace

GroupElement::GroupElement(ScaledMatrix value, ScaledMatrix wedge)
    : value_(std::move(value)), wedge_(std::move(wedge)) {
  log_norm_ = value_.log_norm();
  wedge_log_norm_ = wedge_.log_norm();
}

GroupElement GroupElement::from(const UnimodularMatrix& g) {
  return GroupElement(ScaledMatrix::from(g.matrix()), ScaledMatrix::from(exterior_square(g)));
}

GroupElement GroupElement::power(std::uint64_t n) const {
  ScaledMatrix v = ScaledMatrix::identity(dim());
  ScaledMatrix w = ScaledMatrix::identity(static_cast<int>(wedge_.unit.rows()));
  ScaledMatrix bv = value_;
  ScaledMatrix bw = wedge_;
  while (n > 0) {
    if (n & 1U) {
      v = v * bv;
      w = w * bw;
    }
    n >>= 1U;
    if (n > 0) {
      bv = bv * bv;
      bw = bw * bw;
    }
  }
  return GroupElement(std::move(v), std::move(w));
}

GroupElement GroupElement::transpose() const {
  return GroupElement(value_.transpose(), wedge_.transpose());
}

GroupElement GroupElement::operator*(const GroupElement& other) const {
  return GroupElement(value_ * other.value_, wedge_ * other.wedge_);
}

SymmetricSet::SymmetricSet(const std::vector<UnimodularMatrix>& elements, std::vector<Letter> pairing,
                           std::vector<std::string> names, double pair_tol)
    : alphabet_(checked_alphabet(elements.size(), std::move(pairing))) {
  dim_ = elements.front().dim();
  for (const auto& g : elements) {
    if (g.dim() != dim_) throw InputError("elements of a symmetric set must share a dimension");
  }
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto j = alphabet_.inverse(static_cast<Letter>(i));
    const Matrix prod = elements[i].matrix() * elements[j].matrix();
    const double scale = std::max(1.0, operator_norm(elements[i].matrix()) * operator_norm(elements[j].matrix()));
    const double err = (prod - Matrix::Identity(dim_, dim_)).norm();
    if (!(err <= pair_tol * scale)) {
      throw InputError("element " + std::to_string(i) + " is not inverse to its partner " +
                       std::to_string(j) + " (residual " + std::to_string(err) + ")");
    }
  }
  if (names.empty()) {
    for (std::size_t i = 0; i < elements.size(); ++i) names.push_back("s" + std::to_string(i));
  }
  if (names.size() != elements.size()) throw InputError("name count does not match element count");
  names_ = std::move(names);
  elements_.reserve(elements.size());
  for (const auto& g : elements) {
    elements_.push_back(GroupElement::from(g));
    raw_.push_back(g.matrix());
  }
}

SymmetricSet::SymmetricSet(int dim, std::vector<GroupElement> elements, std::vector<Matrix> raw,
                           Alphabet alphabet, std::vector<std::string> names, std::uint64_t exponent)
    : dim_(dim),
      elements_(std::move(elements)),
      raw_(std::move(raw)),
      alphabet_(std::move(alphabet)),
      names_(std::move(names)),
      exponent_(exponent) {}

SymmetricSet SymmetricSet::from_generators(const std::vector<UnimodularMatrix>& generators,
                                           std::vector<std::string> names) {
  if (generators.empty()) throw InputError("symmetric set is empty (r = 0)");
  if (names.empty()) {
    for (std::size_t k = 0; k < generators.size(); ++k) names.push_back("g" + std::to_string(k));
  }
  if (names.size() != generators.size()) throw InputError("name count does not match generator count");
  std::vector<UnimodularMatrix> elements;
  std::vector<std::string> all_names;
  for (std::size_t k = 0; k < generators.size(); ++k) {
    elements.push_back(generators[k]);
    elements.push_back(generators[k].inverse());
    all_names.push_back(names[k]);
    all_names.push_back(names[k] + "^-1");
  }
  std::vector<Letter> pairing(elements.size());
  for (Letter i = 0; i < pairing.size(); ++i) pairing[i] = i ^ 1U;
  return SymmetricSet(elements, std::move(pairing), std::move(all_names));
}

SymmetricSet SymmetricSet::power(std::uint64_t n) const {
  if (n == 0) throw InputError("power exponent must be positive");
  std::vector<GroupElement> powered;
  powered.reserve(elements_.size());
  std::vector<Matrix> raw;
  for (const auto& g : elements_) {
    powered.push_back(g.power(n));
    // Beyond double range only the projective class survives.
    const ScaledMatrix& v = powered.back().value();
    raw.push_back(v.log_scale < 700.0 ? v.value() : v.unit);
  }
  std::vector<std::string> names = names_;
  if (n != 1) {
    for (auto& s : names) s = "(" + s + ")^" + std::to_string(n);
  }
  return SymmetricSet(dim_, std::move(powered), std::move(raw), alphabet_, std::move(names), exponent_ * n);
}

SymmetricSet SymmetricSet::dual() const {
  std::vector<GroupElement> duals;
  std::vector<Matrix> raw;
  duals.reserve(elements_.size());
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    duals.push_back(elements_[inverse_index(i)].transpose());
    raw.push_back(raw_[inverse_index(i)].transpose());
  }
  std::vector<std::string> names = names_;
  for (auto& s : names) s += "*";
  return SymmetricSet(dim_, std::move(duals), std::move(raw), alphabet_, std::move(names), exponent_);
}

SymmetricSet SymmetricSet::permuted(const std::vector<std::size_t>& order) const {
  if (order.size() != size()) throw InputError("permutation size mismatch");
  std::vector<std::size_t> where(size(), size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (order[k] >= size() || where[order[k]] != size()) throw InputError("not a permutation");
    where[order[k]] = k;
  }
  std::vector<GroupElement> elems;
  std::vector<Matrix> raw;
  std::vector<std::string> names;
  std::vector<Letter> pairing(size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    elems.push_back(elements_[order[k]]);
    raw.push_back(raw_[order[k]]);
    names.push_back(names_[order[k]]);
    pairing[k] = static_cast<Letter>(where[inverse_index(order[k])]);
  }
  return SymmetricSet(dim_, std::move(elems), std::move(raw), Alphabet(std::move(pairing)), std::move(names),
                      exponent_);
}

}  // namespace anosov
