#include "anosov/schottky.hpp"

#include "anosov/word_sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace anosov {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative padding on analytic bounds to absorb rounding in their inputs.
constexpr double kBoundPad = 1.0 + 1e-10;
// Step for the near-pair Lipschitz probes.
constexpr double kNearStep = 1e-6;

double chord(const Vector& a, const Vector& b) {
  return std::min((a - b).norm(), (a + b).norm());
}

Vector random_unit(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> normal;
  Vector z(d);
  do {
    for (int k = 0; k < d; ++k) z(k) = normal(rng);
  } while (z.norm() < 1e-12);
  return z / z.norm();
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

const char* to_string(WellPositionedFailure f) {
  switch (f) {
    case WellPositionedFailure::None: return "none";
    case WellPositionedFailure::NotBiproximal: return "not-biproximal";
    case WellPositionedFailure::SameAttractingLine: return "same-attracting-line";
    case WellPositionedFailure::PointInHyperplane: return "point-in-hyperplane";
  }
  return "unknown";
}

const char* to_string(CheckMethod m) {
  return m == CheckMethod::Analytic ? "analytic" : "sampled";
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(seed ^ mix(stream));
}

ProximalityBundle proximality_bundle(const SymmetricSet& set, double gap_tol) {
  ProximalityBundle b;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const GroupElement& g = set.element(i);
    const GroupElement& ginv = set.element(set.inverse_index(i));
    // g* = (g^{-1})^T
    const Matrix dual = ginv.direction().transpose();
    const auto p = proximality_test(g.direction(), gap_tol);
    const auto q = proximality_test(dual, gap_tol);
    for (const auto* r : {&p, &q}) {
      if (const auto* np = std::get_if<NotProximal>(r)) {
        throw CertificationError("biproximality", {i},
                                 "element " + set.name(i) + (r == &q ? " (dual)" : "") +
                                     " is not proximal: " + to_string(np->reason));
      }
    }
    b.primal.push_back(std::get<ProximalData>(p));
    b.dual.push_back(std::get<ProximalData>(q));
  }
  return b;
}

WellPositionedVerdict check_well_positioned(const SymmetricSet& set, const Tolerances& tol) {
  WellPositionedVerdict v;
  std::vector<ProximalData> data;
  for (std::size_t i = 0; i < set.size(); ++i) {
    // Biproximality of g_i means g_i and g_i^{-1} are proximal; the inverse is
    // itself an element, so testing every element suffices.
    const auto r = proximality_test(set.element(i).direction(), tol.gap_tol);
    if (const auto* np = std::get_if<NotProximal>(&r)) {
      v.failure = WellPositionedFailure::NotBiproximal;
      v.offending = {i};
      v.message = "element " + set.name(i) + " is not biproximal: " + to_string(np->reason);
      return v;
    }
    data.push_back(std::get<ProximalData>(r));
  }

  v.min_attracting_distance = kInf;
  v.min_point_hyperplane = kInf;
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = 0; j < set.size(); ++j) {
      if (i != j) {
        const double d = proj_distance(data[i].attracting, data[j].attracting);
        if (d < v.min_attracting_distance) {
          v.min_attracting_distance = d;
          v.attracting_pair[0] = i;
          v.attracting_pair[1] = j;
        }
      }
      if (j != set.inverse_index(i)) {
        const double d = proj_distance(data[i].attracting, data[j].repelling);
        if (d < v.min_point_hyperplane) {
          v.min_point_hyperplane = d;
          v.point_hyperplane_pair[0] = i;
          v.point_hyperplane_pair[1] = j;
        }
      }
    }
  }

  if (set.size() > 1 && v.min_attracting_distance <= tol.pos_tol) {
    v.failure = WellPositionedFailure::SameAttractingLine;
    v.offending = {v.attracting_pair[0], v.attracting_pair[1]};
    v.message = "attracting lines of " + set.name(v.attracting_pair[0]) + " and " +
                set.name(v.attracting_pair[1]) + " coincide (distance " +
                format_double(v.min_attracting_distance) + ")";
    return v;
  }
  if (v.min_point_hyperplane <= tol.pos_tol) {
    v.failure = WellPositionedFailure::PointInHyperplane;
    v.offending = {v.point_hyperplane_pair[0], v.point_hyperplane_pair[1]};
    v.message = "attracting line of " + set.name(v.point_hyperplane_pair[0]) +
                " lies in the repelling hyperplane of " + set.name(v.point_hyperplane_pair[1]) +
                " (distance " + format_double(v.min_point_hyperplane) + ")";
    return v;
  }
  v.ok = true;
  return v;
}

double compute_epsilon(const SymmetricSet& set, const Tolerances& tol) {
  const WellPositionedVerdict v = check_well_positioned(set, tol);
  if (!v.ok) throw CertificationError("well-positioned", v.offending, v.message);
  return v.min_point_hyperplane / 6.0;
}

// --- epsilon-proximality --------------------------------------------------------

EpsilonProximalCert check_epsilon_proximal(const Matrix& g, const ProximalData& data, double wedge_norm,
                                           double eps, const SamplingOptions& sampling) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InputError("epsilon must be positive and finite");
  const int d = static_cast<int>(g.rows());
  EpsilonProximalCert cert;
  cert.epsilon = eps;
  cert.samples = sampling.samples;

  const Vector& p = data.attracting.rep();
  const Vector& n = data.repelling.conormal().rep();
  cert.separation = proj_distance(data.attracting, data.repelling);

  // B(g^-, eps) = { x : d(x, g^-) >= eps } = { x : |<n, x>| >= s }, a convex
  // cap around the conormal.
  const double s = sine_from_chord(eps);

  // Analytic bounds. Split a unit x with t = <n, x> as x = a p + h, a = t / c_p,
  // h in the hyperplane with ||h|| <= sqrt(1 - t^2) + |a| sqrt(1 - c_p^2).
  // Then g x = a lambda (+-p + e) with ||e|| <= q, so the image lies within
  // angle asin(q) of p. For the Lipschitz constant, the sphere derivative of
  // x -> g x / ||g x|| is at most ||wedge^2 g|| / ||g x||^2 with
  // ||g x|| >= m on the cap; converting angles to chords costs pi / 2, and
  // pairs whose chord is realized through -y are at least 2 s apart and land
  // within 2 R of each other.
  cert.analytic_lipschitz = kInf;
  cert.analytic_containment = kInf;
  const double cp = std::abs(n.dot(p));
  const double lambda = data.top_modulus;
  const double rho = operator_norm(g * data.repelling.basis());
  if (cp > 0.0 && s > 0.0) {
    const double q = rho * (cp * std::sqrt(std::max(0.0, 1.0 - s * s)) / s + std::sqrt(std::max(0.0, 1.0 - cp * cp))) / lambda;
    if (q < 1.0) {
      const double r = chord_from_sine(q);
      const double m = s * lambda * (1.0 - q) / cp;
      const double local = (std::numbers::pi / 2.0) * wedge_norm / (m * m);
      cert.analytic_containment = r * kBoundPad;
      cert.analytic_lipschitz = std::max(local, r / s) * kBoundPad;
    }
  }

  // Sampling: alternate interior points (rejection from the sphere) and
  // boundary points |<n, x>| = s; each point is paired with a nearby point
  // and with the previous sample.
  std::mt19937_64 rng(sampling.seed);
  auto image = [&](const Vector& x) {
    Vector y = g * x;
    return Vector(y / y.norm());
  };
  auto inside = [&](const Vector& x) { return std::abs(n.dot(x)) >= s; };
  auto tangent = [&](const Vector& x) {
    Vector t = random_unit(rng, d);
    t -= t.dot(x) * x;
    const double nt = t.norm();
    return nt < 1e-12 ? t : Vector(t / nt);
  };

  double worst_lip = 0.0;
  double worst_cont = 0.0;
  Vector prev;
  Vector prev_image;
  bool have_prev = false;
  for (std::size_t k = 0; k < sampling.samples; ++k) {
    Vector x;
    auto with_height = [&](double t) {
      Vector h = random_unit(rng, d);
      h -= h.dot(n) * n;
      const double nh = h.norm();
      if (nh < 1e-12) return Vector(n);
      return Vector(t * n + std::sqrt(std::max(0.0, 1.0 - t * t)) * (h / nh));
    };
    if (k % 2 == 0) {
      // Uniform on the cap by rejection; tiny caps fall back to a radial draw.
      bool found = false;
      for (int attempt = 0; attempt < 64 && !found; ++attempt) {
        x = random_unit(rng, d);
        found = inside(x);
      }
      if (!found) x = with_height(std::uniform_real_distribution<double>(s, 1.0)(rng));
    } else {
      x = with_height(s);
    }
    const Vector gx = image(x);
    worst_cont = std::max(worst_cont, chord(gx, p));

    const Vector t = tangent(x);
    for (double sign : {1.0, -1.0}) {
      Vector y = x + sign * kNearStep * t;
      y /= y.norm();
      if (!inside(y)) continue;
      const double dx = chord(x, y);
      if (dx > 0.0) worst_lip = std::max(worst_lip, chord(image(y), gx) / dx);
      break;
    }
    if (have_prev) {
      const double dx = chord(x, prev);
      if (dx > 1e-12) worst_lip = std::max(worst_lip, chord(prev_image, gx) / dx);
    }
    prev = x;
    prev_image = gx;
    have_prev = true;
  }
  cert.sampled_lipschitz = worst_lip;
  cert.sampled_containment = worst_cont;
  cert.lipschitz_method = cert.analytic_lipschitz <= eps ? CheckMethod::Analytic : CheckMethod::Sampled;
  cert.containment_method = cert.analytic_containment <= eps ? CheckMethod::Analytic : CheckMethod::Sampled;

  if (cert.separation < 2.0 * eps) {
    cert.failed_condition = "separation";
  } else if (cert.lipschitz_margin() < 0.0) {
    cert.failed_condition = "lipschitz";
  } else if (cert.containment_margin() < 0.0) {
    cert.failed_condition = "containment";
  }
  cert.ok = cert.failed_condition.empty();
  return cert;
}

EpsilonProximalCert check_epsilon_proximal(const UnimodularMatrix& g, double eps,
                                           const SamplingOptions& sampling, double gap_tol) {
  const auto r = proximality_test(g, gap_tol);
  if (std::holds_alternative<NotProximal>(r)) {
    EpsilonProximalCert cert;
    cert.epsilon = eps;
    cert.failed_condition = "not-proximal";
    cert.analytic_lipschitz = kInf;
    cert.analytic_containment = kInf;
    return cert;
  }
  return check_epsilon_proximal(g.matrix(), std::get<ProximalData>(r),
                                operator_norm(exterior_square(g)), eps, sampling);
}

EpsilonProximalCert check_epsilon_proximal(const GroupElement& g, const ProximalData& data, double eps,
                                           const SamplingOptions& sampling) {
  // ||wedge^2 (g / e^s)|| = ||wedge^2 g|| / e^{2s} for the unit representative.
  const double wedge_norm = std::exp(g.wedge().log_norm() - 2.0 * g.value().log_scale);
  return check_epsilon_proximal(g.direction(), data, wedge_norm, eps, sampling);
}

// --- epsilon-Schottky -------------------------------------------------------------

bool SchottkyCertificate::analytic() const {
  auto all = [](const std::vector<EpsilonProximalCert>& v) {
    return std::all_of(v.begin(), v.end(), [](const auto& c) { return c.analytic(); });
  };
  return all(primal) && all(dual);
}

SchottkyCertificate check_epsilon_schottky(const SymmetricSet& set, double eps, const SamplingOptions& sampling,
                                           const Tolerances& tol) {
  return check_epsilon_schottky(set, proximality_bundle(set, tol.gap_tol), eps, sampling, tol);
}

SchottkyCertificate check_epsilon_schottky(const SymmetricSet& set, const ProximalityBundle& bundle,
                                           double eps, const SamplingOptions& sampling,
                                           const Tolerances& tol) {
  if (!(eps > 0.0)) throw InputError("epsilon must be positive");
  const std::size_t m = set.size();
  SchottkyCertificate cert;
  cert.epsilon = eps;
  cert.power = set.exponent();
  cert.primal.resize(m);
  cert.dual.resize(m);

  const SymmetricSet dual = set.dual();
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(2 * m); ++t) {
    const auto i = static_cast<std::size_t>(t / 2);
    const SamplingOptions opts{sampling.samples, derive_seed(sampling.seed, static_cast<std::uint64_t>(t))};
    if (t % 2 == 0) {
      cert.primal[i] = check_epsilon_proximal(set.element(i), bundle.primal[i], eps, opts);
    } else {
      cert.dual[i] = check_epsilon_proximal(dual.element(i), bundle.dual[i], eps, opts);
    }
  }

  const double threshold = 6.0 * eps;
  cert.containment_margin = kInf;
  auto table = [&](const std::vector<ProximalData>& data, std::vector<PairEntry>& out) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (i == j) continue;
        PairEntry e{i, j, proj_distance(data[i].attracting, data[set.inverse_index(j)].repelling), false};
        e.ok = meets_threshold(e.distance, threshold, tol);
        cert.containment_margin = std::min(cert.containment_margin, e.distance - 2.0 * eps);
        out.push_back(e);
      }
    }
  };
  table(bundle.primal, cert.pairs);
  table(bundle.dual, cert.dual_pairs);
  if (cert.pairs.empty()) cert.containment_margin = 0.0;

  for (std::size_t i = 0; i < m && cert.failure.empty(); ++i) {
    for (const auto* c : {&cert.primal[i], &cert.dual[i]}) {
      if (!c->ok) {
        cert.failure = "element " + set.name(i) + (c == &cert.dual[i] ? " (dual)" : "") +
                       " is not eps-proximal: " + c->failed_condition;
        cert.failing_indices = {i};
        break;
      }
    }
  }
  for (const auto* tab : {&cert.pairs, &cert.dual_pairs}) {
    for (const PairEntry& e : *tab) {
      if (!cert.failure.empty()) break;
      if (!e.ok) {
        cert.failure = std::string(tab == &cert.dual_pairs ? "dual " : "") + "pair (" + set.name(e.i) + ", " +
                       set.name(e.j) + ") too close: " + format_double(e.distance) + " < 6 eps = " +
                       format_double(threshold);
        cert.failing_indices = {e.i, e.j};
      }
    }
  }
  cert.ok = cert.failure.empty();
  return cert;
}

// --- power search -----------------------------------------------------------------

PowerSearchResult power_search(const SymmetricSet& set, std::optional<double> c_eps, std::uint64_t n_max,
                               const SamplingOptions& sampling, const Tolerances& tol) {
  if (c_eps && !(*c_eps > 0.0 && *c_eps < 1.0)) throw InputError("C_eps must lie in (0, 1)");
  if (n_max == 0) throw InputError("n_max must be positive");
  PowerSearchResult result;
  result.epsilon = compute_epsilon(set, tol);
  result.c_eps = c_eps;
  const double alpha_threshold = c_eps ? -3.0 * std::log(*c_eps) : -kInf;

  for (std::uint64_t n = 1; n <= n_max; ++n) {
    const SymmetricSet sn = set.power(n);
    PowerAttempt attempt;
    attempt.n = n;
    attempt.min_alpha1 = kInf;
    for (std::size_t i = 0; i < sn.size(); ++i) attempt.min_alpha1 = std::min(attempt.min_alpha1, sn.element(i).alpha1());
    attempt.alpha1_margin = attempt.min_alpha1 - alpha_threshold;

    SchottkyCertificate cert;
    try {
      cert = check_epsilon_schottky(sn, proximality_bundle(sn, tol.gap_tol), result.epsilon, sampling, tol);
    } catch (const CertificationError& e) {
      cert.ok = false;
      cert.failure = e.what();
    }
    attempt.schottky_ok = cert.ok;
    attempt.schottky_failure = cert.failure;
    attempt.worst_lipschitz_margin = kInf;
    attempt.worst_containment_margin = kInf;
    for (const auto* v : {&cert.primal, &cert.dual}) {
      for (const auto& c : *v) {
        attempt.worst_lipschitz_margin = std::min(attempt.worst_lipschitz_margin, c.lipschitz_margin());
        attempt.worst_containment_margin = std::min(attempt.worst_containment_margin, c.containment_margin());
      }
    }
    result.attempts.push_back(attempt);
    if (cert.ok && attempt.alpha1_margin >= 0.0) {
      result.found = true;
      result.n = n;
      result.certificate = std::move(cert);
      return result;
    }
  }
  return result;
}

// --- C_eps estimate ----------------------------------------------------------------

namespace {

struct RootRatioMin {
  bool have = false;
  double root = 0.0;
  double log_ratio = 0.0;
  std::vector<Letter> word;
  std::uint64_t count = 0;

  void consider(double r, double lr, std::span<const Letter> w) {
    if (improves_min(r, w, root, word, have)) {
      have = true;
      root = r;
      log_ratio = lr;
      word.assign(w.begin(), w.end());
    }
  }
  void observe(const WordView& v) {
    ++count;
    const double lr = v.log_norm_ratio();
    consider(lr / static_cast<double>(v.letters.size() + 1), lr, v.letters);
  }
  void merge(const RootRatioMin& o) {
    count += o.count;
    if (o.have) consider(o.root, o.log_ratio, o.word);
  }
};

}  // namespace

CEstimate estimate_C_epsilon(const SymmetricSet& set, int max_len) {
  if (max_len < 1) throw InputError("word length bound L must be at least 1");
  const RootRatioMin acc = sweep_words(set, max_len, RootRatioMin{});
  CEstimate est;
  est.value = std::exp(acc.root);
  est.extremal_word = reduce(acc.word, set.alphabet());
  est.extremal_log_ratio = acc.log_ratio;
  est.words = acc.count;
  return est;
}

}  // namespace anosov
