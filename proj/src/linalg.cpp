#include "anosov/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace anosov {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool all_finite(const Matrix& m) { return m.allFinite(); }

std::vector<double> sorted_desc(std::vector<double> v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Index of the eigenvalue of maximal modulus.
Eigen::Index argmax_modulus(const Eigen::VectorXcd& ev) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < ev.size(); ++i) {
    if (std::abs(ev(i)) > std::abs(ev(best))) best = i;
  }
  return best;
}

}  // namespace

// --- UnimodularMatrix -------------------------------------------------------

UnimodularMatrix::UnimodularMatrix(Matrix m, double det_tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw InputError("matrix is not square");
  if (m_.rows() < 2) throw InputError("dimension must be at least 2");
  if (!all_finite(m_)) throw InputError("matrix has non-finite entries");
  const double d = static_cast<double>(m_.rows());
  const double det = m_.determinant();
  // Rounding in the determinant grows like ||g||^d.
  const double scale = std::pow(std::max(1.0, operator_norm(m_)), d);
  const double tol = std::max(det_tol, d * kEps * scale);
  if (!(std::abs(det - 1.0) <= tol)) {
    throw InputError("determinant " + std::to_string(det) + " differs from 1");
  }
}

UnimodularMatrix UnimodularMatrix::identity(int dim) {
  return trusted(Matrix::Identity(dim, dim));
}

UnimodularMatrix UnimodularMatrix::trusted(Matrix m) {
  UnimodularMatrix g;
  g.m_ = std::move(m);
  return g;
}

UnimodularMatrix UnimodularMatrix::inverse() const {
  return trusted(m_.partialPivLu().inverse());
}

UnimodularMatrix UnimodularMatrix::operator*(const UnimodularMatrix& other) const {
  if (dim() != other.dim()) throw InputError("dimension mismatch in product");
  return trusted(m_ * other.m_);
}

// --- projective points ------------------------------------------------------

ProjPoint::ProjPoint(const Vector& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw ComputationError("degenerate projective representative");
  rep_ = v / n;
  for (Eigen::Index i = 0; i < rep_.size(); ++i) {
    if (std::abs(rep_(i)) > 1e-12) {
      if (rep_(i) < 0) rep_ = -rep_;
      break;
    }
  }
}

Matrix ProjHyperplane::basis() const {
  const int d = dim();
  Eigen::HouseholderQR<Matrix> qr(conormal_.rep());
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  return q.rightCols(d - 1);
}

const char* to_string(NotProximalReason reason) {
  switch (reason) {
    case NotProximalReason::ComplexLeading: return "complex leading eigenvalue";
    case NotProximalReason::ModulusTie: return "modulus tie";
  }
  return "unknown";
}

double proj_distance(const ProjPoint& x, const ProjPoint& y) {
  if (x.dim() != y.dim()) throw InputError("dimension mismatch in proj_distance");
  return std::min((x.rep() - y.rep()).norm(), (x.rep() + y.rep()).norm());
}

double chord_from_sine(double s) {
  s = std::clamp(std::abs(s), 0.0, 1.0);
  return s * std::sqrt(2.0 / (1.0 + std::sqrt(1.0 - s * s)));
}

double sine_from_chord(double c) {
  // chord = 2 sin(theta/2), sine = sin(theta)
  c = std::clamp(c, 0.0, kProjectiveDiameter);
  const double half = std::asin(c / 2.0);
  return std::sin(2.0 * half);
}

double proj_distance(const ProjPoint& x, const ProjHyperplane& h) {
  if (x.dim() != h.dim()) throw InputError("dimension mismatch in proj_distance");
  return chord_from_sine(x.rep().dot(h.conormal().rep()));
}

double operator_norm(const Matrix& g) {
  Eigen::JacobiSVD<Matrix> svd(g);
  return svd.singularValues()(0);
}

// --- projections ------------------------------------------------------------

CartanVector cartan_projection(const UnimodularMatrix& g) {
  Eigen::JacobiSVD<Matrix> svd(g.matrix());
  const Vector& s = svd.singularValues();
  std::vector<double> mu(static_cast<std::size_t>(s.size()));
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (!(s(i) > 0.0) || !std::isfinite(s(i))) {
      throw ComputationError("singular value routine returned a non-positive value");
    }
    mu[static_cast<std::size_t>(i)] = std::log(s(i));
  }
  return {to_vector(sorted_desc(std::move(mu)))};
}

JordanVector jordan_projection(const UnimodularMatrix& g) {
  Eigen::EigenSolver<Matrix> es(g.matrix(), false);
  if (es.info() != Eigen::Success) throw ComputationError("eigenvalue routine failed");
  const auto& ev = es.eigenvalues();
  std::vector<double> lambda(static_cast<std::size_t>(ev.size()));
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    lambda[static_cast<std::size_t>(i)] = std::log(std::abs(ev(i)));
  }
  return {to_vector(sorted_desc(std::move(lambda)))};
}

double alpha1(const CartanVector& v) { return v.mu(0) - v.mu(1); }
double alpha1(const JordanVector& v) { return v.lambda(0) - v.lambda(1); }

// --- exterior powers and duals ----------------------------------------------

namespace detail {

Matrix exterior_power(const Matrix& g, int k) {
  const int d = static_cast<int>(g.rows());
  if (k < 1 || k > d) throw InputError("exterior power degree out of range");
  std::vector<std::vector<int>> subsets;
  std::vector<int> cur(static_cast<std::size_t>(k));
  std::iota(cur.begin(), cur.end(), 0);
  while (true) {
    subsets.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == d - k + i) --i;
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) {
      cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  const auto n = static_cast<Eigen::Index>(subsets.size());
  Matrix out(n, n);
  Matrix minor(k, k);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto& rows = subsets[static_cast<std::size_t>(r)];
      const auto& cols = subsets[static_cast<std::size_t>(c)];
      for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
          minor(a, b) = g(rows[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)]);
        }
      }
      out(r, c) = minor.determinant();
    }
  }
  return out;
}

}  // namespace detail

Matrix exterior_square(const Matrix& g) {
  if (g.rows() < 2) throw InputError("exterior square needs d >= 2");
  const int d = static_cast<int>(g.rows());
  const int n = d * (d - 1) / 2;
  Matrix out(n, n);
  int r = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j, ++r) {
      int c = 0;
      for (int k = 0; k < d; ++k) {
        for (int l = k + 1; l < d; ++l, ++c) {
          out(r, c) = g(i, k) * g(j, l) - g(i, l) * g(j, k);
        }
      }
    }
  }
  return out;
}

Matrix exterior_square(const UnimodularMatrix& g) { return exterior_square(g.matrix()); }

UnimodularMatrix dual_matrix(const UnimodularMatrix& g) {
  return UnimodularMatrix::trusted(g.inverse().matrix().transpose());
}

// --- proximality --------------------------------------------------------------

ProximalityResult proximality_test(const Matrix& g, double gap_tol) {
  if (g.rows() != g.cols() || g.rows() < 2) throw InputError("proximality_test needs a square matrix, d >= 2");
  Eigen::EigenSolver<Matrix> es(g, true);
  if (es.info() != Eigen::Success) throw ComputationError("eigenvalue routine failed");
  const Eigen::VectorXcd ev = es.eigenvalues();
  const Eigen::Index top = argmax_modulus(ev);
  const double top_mod = std::abs(ev(top));
  if (std::abs(ev(top).imag()) > 1e-12 * top_mod) {
    return NotProximal{NotProximalReason::ComplexLeading, 0.0};
  }
  double second = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (i != top) second = std::max(second, std::abs(ev(i)));
  }
  const double gap = second > 0.0 ? std::log(top_mod) - std::log(second)
                                  : std::numeric_limits<double>::infinity();
  if (!(gap > gap_tol)) return NotProximal{NotProximalReason::ModulusTie, gap};

  ProjPoint attracting(es.eigenvectors().col(top).real());

  // The repelling hyperplane is the invariant complement of the attracting
  // line; its conormal is the top eigenvector of the transpose.
  Eigen::EigenSolver<Matrix> est(g.transpose(), true);
  if (est.info() != Eigen::Success) throw ComputationError("eigenvalue routine failed");
  const Eigen::Index top_t = argmax_modulus(est.eigenvalues());
  ProjHyperplane repelling(Vector(est.eigenvectors().col(top_t).real()));

  return ProximalData{std::move(attracting), std::move(repelling), top_mod, gap};
}

ProximalityResult proximality_test(const UnimodularMatrix& g, double gap_tol) {
  return proximality_test(g.matrix(), gap_tol);
}

bool is_biproximal(const UnimodularMatrix& g, double gap_tol) {
  return std::holds_alternative<ProximalData>(proximality_test(g, gap_tol)) &&
         std::holds_alternative<ProximalData>(proximality_test(g.inverse(), gap_tol));
}

ProjPoint apply(const Matrix& g, const ProjPoint& x) { return ProjPoint(g * x.rep()); }

// --- log-rescaled matrices ----------------------------------------------------

ScaledMatrix ScaledMatrix::from(const Matrix& m) {
  const double f = m.norm();
  if (!(f > 0.0) || !std::isfinite(f)) throw ComputationError("cannot rescale a zero or non-finite matrix");
  return {m / f, std::log(f)};
}

ScaledMatrix ScaledMatrix::identity(int dim) {
  return from(Matrix::Identity(dim, dim));
}

double ScaledMatrix::log_norm() const { return log_scale + std::log(operator_norm(unit)); }

Matrix ScaledMatrix::value() const {
  Matrix m = std::exp(log_scale) * unit;
  if (!m.allFinite()) throw ComputationError("matrix entries overflow double range");
  return m;
}

ScaledMatrix ScaledMatrix::operator*(const ScaledMatrix& other) const {
  ScaledMatrix p = from(unit * other.unit);
  p.log_scale += log_scale + other.log_scale;
  return p;
}

ScaledMatrix scaled_power(const Matrix& g, std::uint64_t n) {
  ScaledMatrix result = ScaledMatrix::identity(static_cast<int>(g.rows()));
  ScaledMatrix base = ScaledMatrix::from(g);
  while (n > 0) {
    if (n & 1U) result = result * base;
    n >>= 1U;
    if (n > 0) base = base * base;
  }
  return result;
}

CartanVector cartan_projection_of_power(const UnimodularMatrix& g, std::uint64_t n) {
  const int d = g.dim();
  std::vector<double> partial(static_cast<std::size_t>(d), 0.0);  // log ||wedge^k g^n||
  for (int k = 1; k < d; ++k) {
    const Matrix wk = k == 1 ? g.matrix() : detail::exterior_power(g.matrix(), k);
    partial[static_cast<std::size_t>(k)] = scaled_power(wk, n).log_norm();
  }
  std::vector<double> mu(static_cast<std::size_t>(d));
  for (int k = 1; k < d; ++k) {
    mu[static_cast<std::size_t>(k - 1)] =
        partial[static_cast<std::size_t>(k)] - partial[static_cast<std::size_t>(k - 1)];
  }
  mu[static_cast<std::size_t>(d - 1)] = -partial[static_cast<std::size_t>(d - 1)];
  return {to_vector(sorted_desc(std::move(mu)))};
}

}  // namespace anosov
