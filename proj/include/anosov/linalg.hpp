#pragma once

// Numerical primitives on SL_d(R) and its action on projective space:
// projective points and hyperplanes, chordal distances, Cartan and Jordan
// projections, the second exterior power, duals and proximality.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace anosov {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Malformed or out-of-contract input (bad file, wrong dimension, det != 1).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed or produced non-finite output.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Diameter of P(R^d) in the chordal metric.
inline const double kProjectiveDiameter = 1.4142135623730951;

struct LinalgTolerances {
  double det_tol = 1e-9;
  double gap_tol = 1e-8;
};

/// Element of SL_d(R). Construction validates |det - 1| and finiteness.
class UnimodularMatrix {
 public:
  explicit UnimodularMatrix(Matrix m, double det_tol = LinalgTolerances{}.det_tol);

  static UnimodularMatrix identity(int dim);
  /// Skips the determinant check; for products and inverses of valid elements.
  static UnimodularMatrix trusted(Matrix m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  UnimodularMatrix inverse() const;
  UnimodularMatrix operator*(const UnimodularMatrix& other) const;

 private:
  UnimodularMatrix() = default;
  Matrix m_;
};

/// A line in R^d, stored as a unit vector whose first non-negligible
/// coordinate is positive.
class ProjPoint {
 public:
  explicit ProjPoint(const Vector& v);
  int dim() const { return static_cast<int>(rep_.size()); }
  const Vector& rep() const { return rep_; }

 private:
  Vector rep_;
};

/// A hyperplane in R^d, stored through its unit conormal (a point of the
/// dual projective space).
class ProjHyperplane {
 public:
  explicit ProjHyperplane(const Vector& conormal) : conormal_(conormal) {}
  explicit ProjHyperplane(ProjPoint conormal) : conormal_(std::move(conormal)) {}

  int dim() const { return conormal_.dim(); }
  const ProjPoint& conormal() const { return conormal_; }
  /// Orthonormal basis of the hyperplane, d x (d-1).
  Matrix basis() const;

 private:
  ProjPoint conormal_;
};

struct CartanVector {
  Vector mu;  // log singular values, non-increasing
};

struct JordanVector {
  Vector lambda;  // log eigenvalue moduli, non-increasing
};

struct ProximalData {
  ProjPoint attracting;
  ProjHyperplane repelling;
  double top_modulus;
  double gap;
};

enum class NotProximalReason { ComplexLeading, ModulusTie };

struct NotProximal {
  NotProximalReason reason;
  double gap;  // lambda_1 - lambda_2 as computed (0 for a complex pair)
};

const char* to_string(NotProximalReason reason);

using ProximalityResult = std::variant<ProximalData, NotProximal>;

double proj_distance(const ProjPoint& x, const ProjPoint& y);

/// Chordal distance from a line to the nearest line inside a hyperplane.
double proj_distance(const ProjPoint& x, const ProjHyperplane& h);

/// Chordal distance for the sine of the angle between a line and a hyperplane.
double chord_from_sine(double s);

/// Inverse of chord_from_sine: |<n, x>| at chordal distance c from the hyperplane.
double sine_from_chord(double c);

double operator_norm(const Matrix& g);

CartanVector cartan_projection(const UnimodularMatrix& g);
JordanVector jordan_projection(const UnimodularMatrix& g);

double alpha1(const CartanVector& v);
double alpha1(const JordanVector& v);

/// Induced action on 2-vectors in the lexicographic basis e_i ^ e_j, i < j.
Matrix exterior_square(const Matrix& g);
Matrix exterior_square(const UnimodularMatrix& g);

/// Inverse transpose: the action theta -> theta o g^{-1} on covectors.
UnimodularMatrix dual_matrix(const UnimodularMatrix& g);

ProximalityResult proximality_test(const UnimodularMatrix& g,
                                   double gap_tol = LinalgTolerances{}.gap_tol);

/// Same test for any invertible real matrix. Proximality is projective, so
/// scalar multiples of an SL_d element give the same answer.
ProximalityResult proximality_test(const Matrix& g,
                                   double gap_tol = LinalgTolerances{}.gap_tol);

bool is_biproximal(const UnimodularMatrix& g,
                   double gap_tol = LinalgTolerances{}.gap_tol);

/// Projective action g . [x].
ProjPoint apply(const Matrix& g, const ProjPoint& x);

/// A matrix held as exp(log_scale) * unit with ||unit||_F = 1, so that long
/// products and high powers never overflow.
struct ScaledMatrix {
  Matrix unit;
  double log_scale = 0.0;

  static ScaledMatrix from(const Matrix& m);
  static ScaledMatrix identity(int dim);

  int dim() const { return static_cast<int>(unit.rows()); }
  /// log of the operator norm of the represented matrix.
  double log_norm() const;
  /// Materializes the matrix; throws ComputationError on overflow.
  Matrix value() const;

  ScaledMatrix operator*(const ScaledMatrix& other) const;
  ScaledMatrix transpose() const { return {unit.transpose(), log_scale}; }
};

/// g^n by repeated squaring with renormalization after every product.
ScaledMatrix scaled_power(const Matrix& g, std::uint64_t n);

/// Cartan projection of g^n computed through log-rescaled powers of the
/// exterior powers of g, so small singular values keep full relative accuracy.
CartanVector cartan_projection_of_power(const UnimodularMatrix& g, std::uint64_t n);

namespace detail {
/// k-th exterior power in the lexicographic basis of k-subsets.
Matrix exterior_power(const Matrix& g, int k);
}  // namespace detail

}  // namespace anosov
