#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's numerics: plain dense products, closed-form 2x2 eigendata, power
// iteration, brute-force enumeration and dense sampling on P^1.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#ifndef ANOSOV_DATA_DIR
#define ANOSOV_DATA_DIR "data"
#endif

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline std::string data(const std::string& name) {
  return std::string(ANOSOV_DATA_DIR) + "/" + name;
}

inline double chord(const Vec& a, const Vec& b) {
  const Vec x = a / a.norm();
  const Vec y = b / b.norm();
  return std::min((x - y).norm(), (x + y).norm());
}

inline double op_norm(const Mat& g) {
  Eigen::JacobiSVD<Mat> svd(g);
  return svd.singularValues()(0);
}

inline Vec singular_values(const Mat& g) {
  Eigen::JacobiSVD<Mat> svd(g);
  return svd.singularValues();
}

inline Mat rotation(double t) {
  Mat r(2, 2);
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}

inline Mat diag2(double t) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = t;
  m(1, 1) = 1.0 / t;
  return m;
}

/// Random d x d matrix with N(0,1) entries scaled to det = +1 (rows swapped
/// first when the determinant is negative).
inline Mat random_sl(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  for (;;) {
    Mat m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = n(rng);
    double det = m.determinant();
    if (std::abs(det) < 1e-3) continue;
    if (det < 0) {
      m.row(0).swap(m.row(1));
      det = -det;
    }
    return m / std::pow(det, 1.0 / d);
  }
}

/// Second exterior power from 2x2 minors, basis e_i ^ e_j with i < j.
inline Mat wedge2(const Mat& g) {
  const int d = static_cast<int>(g.rows());
  std::vector<std::pair<int, int>> idx;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) idx.emplace_back(i, j);
  Mat w(idx.size(), idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    for (std::size_t c = 0; c < idx.size(); ++c) {
      const auto [i, j] = idx[r];
      const auto [k, l] = idx[c];
      w(r, c) = g(i, k) * g(j, l) - g(i, l) * g(j, k);
    }
  }
  return w;
}

// --- 2x2 closed forms ----------------------------------------------------------

struct Eig2 {
  double lambda_big;  // eigenvalue of larger modulus
  double lambda_small;
  Vec attracting;  // eigenvector of lambda_big
  Vec repelling;   // eigenvector of lambda_small (the repelling "hyperplane")
};

inline Vec eigvec2(const Mat& g, double lambda) {
  Vec v(2);
  // (g - lambda) v = 0; pick the better conditioned row.
  const double a = g(0, 0) - lambda, b = g(0, 1);
  const double c = g(1, 0), d = g(1, 1) - lambda;
  if (std::hypot(a, b) >= std::hypot(c, d)) {
    v << -b, a;
  } else {
    v << -d, c;
  }
  return v / v.norm();
}

/// Eigendata of a real 2x2 matrix with real eigenvalues of distinct modulus,
/// from the quadratic formula.
inline std::optional<Eig2> eig2(const Mat& g) {
  const double tr = g.trace();
  const double det = g.determinant();
  const double disc = tr * tr - 4.0 * det;
  if (disc <= 0.0) return std::nullopt;
  const double s = std::sqrt(disc);
  const double l1 = tr >= 0 ? (tr + s) / 2.0 : (tr - s) / 2.0;
  const double l2 = det / l1;
  if (std::abs(std::abs(l1) - std::abs(l2)) < 1e-14 * std::abs(l1)) return std::nullopt;
  return Eig2{l1, l2, eigvec2(g, l1), eigvec2(g, l2)};
}

// --- power iteration ---------------------------------------------------------

/// Attracting line by power iteration from a fixed generic start.
inline Vec power_iteration(const Mat& g, int steps = 4000) {
  Vec x = Vec::Ones(g.rows());
  for (int i = 0; i < g.rows(); ++i) x(i) += 0.1 * (i + 1);
  for (int k = 0; k < steps; ++k) {
    x = g * x;
    x /= x.norm();
  }
  return x;
}

// --- P^1 sampling ------------------------------------------------------------

inline Vec line_at(double phi) {
  Vec v(2);
  v << std::cos(phi), std::sin(phi);
  return v;
}

inline double angle_of(const Vec& v) {
  double a = std::atan2(v(1), v(0));
  if (a < 0) a += M_PI;
  if (a >= M_PI) a -= M_PI;
  return a;
}

struct P1Proximal {
  bool proximal = false;
  double separation = 0.0;   // d(g+, g-)
  double lipschitz = 0.0;    // sup of chord ratios over sampled pairs in B(g-, eps)
  double containment = 0.0;  // sup of d(g x, g+) over sampled x in B(g-, eps)
};

/// Dense sampling of the three eps-proximality quantities for a 2x2 matrix.
/// In P^1 the repelling hyperplane is the line g-; B(g-, eps) is the arc of
/// lines at chordal distance >= eps from it.
inline P1Proximal p1_proximal(const Mat& g, double eps, int grid = 4001) {
  P1Proximal r;
  const auto e = eig2(g);
  if (!e) return r;
  r.proximal = true;
  r.separation = chord(e->attracting, e->repelling);
  const double center = angle_of(e->repelling);
  const double gap = 2.0 * std::asin(eps / 2.0);  // angle <-> chord
  // arc of allowed angles: center + [gap, pi - gap]
  std::vector<Vec> pts;
  std::vector<Vec> imgs;
  for (int k = 0; k < grid; ++k) {
    const double phi = center + gap + (M_PI - 2.0 * gap) * k / (grid - 1);
    pts.push_back(line_at(phi));
    Vec y = g * pts.back();
    imgs.push_back(y / y.norm());
  }
  for (int k = 0; k < grid; ++k) r.containment = std::max(r.containment, chord(imgs[k], e->attracting));
  // adjacent pairs carry the local sup; a coarse all-pairs pass covers the rest
  for (int k = 0; k + 1 < grid; ++k) {
    const double d = chord(pts[k], pts[k + 1]);
    if (d > 0) r.lipschitz = std::max(r.lipschitz, chord(imgs[k], imgs[k + 1]) / d);
  }
  const int stride = std::max(1, grid / 200);
  for (int i = 0; i < grid; i += stride) {
    for (int j = i + stride; j < grid; j += stride) {
      r.lipschitz = std::max(r.lipschitz, chord(imgs[i], imgs[j]) / chord(pts[i], pts[j]));
    }
  }
  return r;
}

inline bool p1_eps_proximal(const Mat& g, double eps, int grid = 4001) {
  const P1Proximal r = p1_proximal(g, eps, grid);
  return r.proximal && r.separation >= 2 * eps && r.lipschitz <= eps && r.containment <= eps;
}

// --- words -------------------------------------------------------------------

/// Every reduced word of length 1..max_len over the given inverse table, built
/// breadth-first (independent of the library's depth-first enumerator).
inline std::vector<std::vector<std::uint32_t>> reduced_words(std::size_t letters,
                                                             const std::vector<std::uint32_t>& inverse,
                                                             int max_len) {
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::vector<std::uint32_t>> layer{{}};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<std::vector<std::uint32_t>> next;
    for (const auto& w : layer) {
      for (std::uint32_t x = 0; x < letters; ++x) {
        if (!w.empty() && inverse[w.back()] == x) continue;
        auto v = w;
        v.push_back(x);
        next.push_back(v);
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

inline Mat product(const std::vector<Mat>& mats, const std::vector<std::uint32_t>& w) {
  Mat p = Mat::Identity(mats[0].rows(), mats[0].cols());
  for (auto x : w) p = p * mats[x];
  return p;
}

/// Proximal iff the top eigenvalue is real and strictly dominant, by a
/// general eigensolver on the plain product.
inline bool proximal_dense(const Mat& g, double rel_gap = 1e-8) {
  Eigen::EigenSolver<Mat> es(g);
  std::vector<std::complex<double>> ev(es.eigenvalues().data(), es.eigenvalues().data() + g.rows());
  std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return std::abs(a) > std::abs(b); });
  if (std::abs(ev[0].imag()) > 1e-12 * std::abs(ev[0])) return false;
  return g.rows() == 1 || std::abs(ev[0]) - std::abs(ev[1]) > rel_gap * std::abs(ev[0]);
}

}  // namespace oracle
