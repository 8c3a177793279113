#include "anosov/certify.hpp"

#include "anosov/word_sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace anosov {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Log-domain slack for the norm-ratio inequality; the extremal word meets
// C-hat with equality up to rounding.
constexpr double kRatioTol = 1e-12;
constexpr std::size_t kBaseAttempts = 1000;
// Distances between computed lines are only resolved to a few ulps; bounds
// that fall below this are compared against it instead.
constexpr double kResolution = 1e-14;

double margin_in_region(const ProjPoint& v, const std::vector<ProximalData>& data, double eps) {
  double m = kInf;
  for (const auto& pd : data) m = std::min(m, proj_distance(v, pd.repelling) - eps);
  return m;
}

ProjPoint find_base_point(const SymmetricSet& set, const std::vector<ProximalData>& data, double eps,
                          std::mt19937_64& rng, std::size_t& attempts, double& margin) {
  // Start at g_1^+ and move off (g_1^{-1})^-, which contains g_1^+, to chordal
  // distance 3 eps: d(v, g_1^+) = 3 eps < 5 eps and every other repelling
  // hyperplane stays at least 6 eps - 3 eps away.
  const Vector& p = data[0].attracting.rep();
  Vector dir = data[set.inverse_index(0)].repelling.conormal().rep();
  dir -= dir.dot(p) * p;
  if (dir.norm() < 1e-12) {
    dir = Vector::Unit(set.dim(), 0);
    dir -= dir.dot(p) * p;
    if (dir.norm() < 1e-12) dir = Vector::Unit(set.dim(), 1) - p(1) * p;
  }
  dir /= dir.norm();
  const double angle = 2.0 * std::asin(std::min(1.0, 1.5 * eps));
  const Vector v0 = std::cos(angle) * p + std::sin(angle) * dir;

  auto admissible = [&](const ProjPoint& v) {
    return margin_in_region(v, data, eps) >= 0.0 && proj_distance(v, data[0].attracting) < 5.0 * eps;
  };
  ProjPoint v(v0);
  attempts = 0;
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  while (!admissible(v)) {
    if (attempts == kBaseAttempts) {
      throw CertificationError("ping-pong-base", {0},
                               "no ping-pong base point found after " + std::to_string(kBaseAttempts) +
                                   " perturbations");
    }
    ++attempts;
    Vector z(set.dim());
    for (int k = 0; k < set.dim(); ++k) z(k) = normal(rng);
    v = ProjPoint(v0 + eps * unit(rng) * z / z.norm());
  }
  margin = margin_in_region(v, data, eps);
  return v;
}

std::vector<Letter> padded_word(const ReducedWord& prefix, const Alphabet& alphabet, int length,
                                std::optional<Letter> pad) {
  if (prefix.empty()) throw InputError("boundary prefix must be non-empty");
  if (length < static_cast<int>(prefix.size())) throw InputError("depth is shorter than the prefix");
  const Letter last = prefix.letters().back();
  const Letter x = pad.value_or(last);
  if (x >= alphabet.size()) throw InputError("pad letter out of range");
  if (x == alphabet.inverse(last)) throw InputError("pad letter cancels the prefix");
  std::vector<Letter> w(prefix.letters().begin(), prefix.letters().end());
  while (static_cast<int>(w.size()) < length) w.push_back(x);
  return w;
}

// x_0 ... x_{count-1} applied to v, one normalized matrix-vector product per letter.
Vector push(std::span<const Letter> w, std::size_t count, const SymmetricSet& set, const Vector& v) {
  Vector x = v;
  for (std::size_t k = count; k-- > 0;) {
    x = set.element(w[k]).direction() * x;
    x /= x.norm();
  }
  return x;
}

double chord(const Vector& a, const Vector& b) {
  return std::min((a - b).norm(), (a + b).norm());
}

struct LimitPair {
  Vector xi;
  Vector theta;  // conormal
};

// xi and theta for the padded word, evaluated to `depth` letters.
LimitPair limits(std::span<const Letter> prefix, const SymmetricSet& set, const SymmetricSet& dual,
                 const PingPongBase& base, int depth) {
  const ReducedWord w = reduce(prefix, set.alphabet());
  const std::vector<Letter> full = padded_word(w, set.alphabet(), depth, std::nullopt);
  return {push(full, full.size(), set, base.v.rep()), push(full, full.size(), dual, base.w.conormal().rep())};
}

double min_singular(const Vector& xi, const Vector& theta) {
  const ProjHyperplane h(theta);
  const Matrix basis = h.basis();
  Matrix m(xi.size(), xi.size());
  m.col(0) = xi;
  m.rightCols(xi.size() - 1) = basis;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().minCoeff();
}

std::size_t common_prefix(const ReducedWord& x, const ReducedWord& y) {
  std::size_t c = 0;
  while (c < x.size() && c < y.size() && x[c] == y[c]) ++c;
  return c;
}

std::vector<std::pair<ReducedWord, ReducedWord>> random_pairs(const Alphabet& alphabet, int depth,
                                                              std::size_t pairs, std::uint64_t seed) {
  if (depth < 1) throw InputError("depth must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<std::pair<ReducedWord, ReducedWord>> out;
  out.reserve(pairs);
  while (out.size() < pairs) {
    ReducedWord x = random_reduced_word(alphabet, static_cast<std::size_t>(depth), rng);
    ReducedWord y = random_reduced_word(alphabet, static_cast<std::size_t>(depth), rng);
    if (x == y) continue;
    out.emplace_back(std::move(x), std::move(y));
  }
  return out;
}

struct MinTracker {
  bool have = false;
  double value = 0.0;
  std::vector<Letter> word;
  void consider(double v, std::span<const Letter> w) {
    if (improves_min(v, w, value, word, have)) {
      have = true;
      value = v;
      word.assign(w.begin(), w.end());
    }
  }
  void merge(const MinTracker& o) {
    if (o.have) consider(o.value, o.word);
  }
};

struct FirstTracker {
  bool have = false;
  std::vector<Letter> word;
  void consider(std::span<const Letter> w) {
    if (!have || canonical_less(w, word)) {
      have = true;
      word.assign(w.begin(), w.end());
    }
  }
  void merge(const FirstTracker& o) {
    if (o.have) consider(o.word);
  }
};

// Proximality is conjugation invariant, so a reduced word u c u^-1 is tested
// through its cyclically reduced core c. Long conjugates are numerically
// close to rank one with a tiny top eigenvalue relative to their norm, and
// their computed spectrum is meaningless; the core has no such cancellation.
bool word_is_proximal(const WordView& v, const SymmetricSet& set, double gap_tol) {
  const Alphabet& alphabet = set.alphabet();
  std::size_t lo = 0;
  std::size_t hi = v.letters.size();
  while (hi - lo >= 2 && v.letters[lo] == alphabet.inverse(v.letters[hi - 1])) {
    ++lo;
    --hi;
  }
  if (lo == 0) return std::holds_alternative<ProximalData>(proximality_test(v.product.unit, gap_tol));
  ScaledMatrix core = ScaledMatrix::identity(set.dim());
  for (std::size_t k = lo; k < hi; ++k) core = core * set.element(v.letters[k]).value();
  return std::holds_alternative<ProximalData>(proximality_test(core.unit, gap_tol));
}

struct BenoistAcc {
  const SymmetricSet* set = nullptr;
  double log_c = 0.0;
  double gap_tol = 1e-8;
  std::uint64_t words = 0;
  std::uint64_t non_proximal = 0;
  std::uint64_t violations = 0;
  FirstTracker first_np;
  FirstTracker first_violation;
  MinTracker worst;
  MinTracker extremal;

  void observe(const WordView& v) {
    ++words;
    if (!word_is_proximal(v, *set, gap_tol)) {
      ++non_proximal;
      first_np.consider(v.letters);
    }
    const double lr = v.log_norm_ratio();
    const double exponent = static_cast<double>(v.letters.size() + 1);
    const double margin = lr - exponent * log_c;
    if (margin < -kRatioTol) {
      ++violations;
      first_violation.consider(v.letters);
    }
    worst.consider(margin, v.letters);
    extremal.consider(lr / exponent, v.letters);
  }
  void merge(const BenoistAcc& o) {
    words += o.words;
    non_proximal += o.non_proximal;
    violations += o.violations;
    first_np.merge(o.first_np);
    first_violation.merge(o.first_violation);
    worst.merge(o.worst);
    extremal.merge(o.extremal);
  }
};

struct Alpha1Acc {
  double log_c = 0.0;
  std::uint64_t words = 0;
  MinTracker worst;

  void observe(const WordView& v) {
    ++words;
    // bound -(n-1) log C for a word x_0 ... x_n of n+1 letters
    const double n = static_cast<double>(v.letters.size()) - 1.0;
    worst.consider(v.alpha1() + (n - 1.0) * log_c, v.letters);
  }
  void merge(const Alpha1Acc& o) {
    words += o.words;
    worst.merge(o.worst);
  }
};

void check_c(double c_eps) {
  if (!(c_eps > 0.0 && c_eps < 1.0)) throw InputError("C_eps must lie in (0, 1)");
}

BenoistReport finish(const BenoistAcc& acc, const SymmetricSet& set, double c_eps, int max_len) {
  BenoistReport r;
  r.c_eps = c_eps;
  r.max_len = max_len;
  r.words = acc.words;
  r.non_proximal = acc.non_proximal;
  r.violations = acc.violations;
  if (acc.first_np.have) r.first_non_proximal = reduce(acc.first_np.word, set.alphabet());
  if (acc.first_violation.have) r.first_violation = reduce(acc.first_violation.word, set.alphabet());
  r.worst_margin = acc.worst.value;
  r.worst_word = reduce(acc.worst.word, set.alphabet());
  r.extremal_word = reduce(acc.extremal.word, set.alphabet());
  r.extremal_root = std::exp(acc.extremal.value);
  const double ext_exponent = static_cast<double>(acc.extremal.word.size() + 1);
  r.extremal_violates = acc.extremal.value * ext_exponent - ext_exponent * std::log(c_eps) < -kRatioTol;
  r.ok = r.non_proximal == 0 && r.violations == 0;
  return r;
}

Alpha1Report finish(const Alpha1Acc& acc, const SymmetricSet& set, double c_eps) {
  Alpha1Report r;
  r.hypothesis_margin = kInf;
  for (std::size_t i = 0; i < set.size(); ++i) {
    r.hypothesis_margin = std::min(r.hypothesis_margin, set.element(i).alpha1() + 3.0 * std::log(c_eps));
  }
  r.hypothesis_ok = r.hypothesis_margin >= 0.0;
  r.words = acc.words;
  r.worst_slack = acc.worst.value;
  r.worst_word = reduce(acc.worst.word, set.alphabet());
  r.ok = r.hypothesis_ok && r.worst_slack >= 0.0;
  return r;
}

}  // namespace

PingPongBase ping_pong_base(const SymmetricSet& set, const ProximalityBundle& bundle, double eps,
                            std::uint64_t seed) {
  if (!(eps > 0.0)) throw InputError("epsilon must be positive");
  std::mt19937_64 rng(derive_seed(seed, 0xba5e));
  std::size_t primal_attempts = 0;
  std::size_t dual_attempts = 0;
  double v_margin = 0.0;
  double w_margin = 0.0;
  ProjPoint v = find_base_point(set, bundle.primal, eps, rng, primal_attempts, v_margin);
  ProjPoint w = find_base_point(set.dual(), bundle.dual, eps, rng, dual_attempts, w_margin);
  return PingPongBase{std::move(v), ProjHyperplane(std::move(w)), v_margin, w_margin,
                      primal_attempts + dual_attempts};
}

ProjPoint limit_point(const ReducedWord& prefix, const SymmetricSet& set, const ProjPoint& v, int depth,
                      std::optional<Letter> pad) {
  const std::vector<Letter> w = padded_word(prefix, set.alphabet(), depth, pad);
  return ProjPoint(push(w, w.size(), set, v.rep()));
}

LimitMapSample limit_map(const ReducedWord& prefix, const SymmetricSet& set, const PingPongBase& base, int depth,
                         std::optional<Letter> pad) {
  const std::vector<Letter> w = padded_word(prefix, set.alphabet(), depth + 1, pad);
  const auto n = static_cast<std::size_t>(depth);
  const SymmetricSet dual = set.dual();
  const Vector xi = push(w, n, set, base.v.rep());
  const Vector theta = push(w, n, dual, base.w.conormal().rep());
  const Vector xi_next = push(w, n + 1, set, base.v.rep());
  const Vector theta_next = push(w, n + 1, dual, base.w.conormal().rep());
  return LimitMapSample{prefix, depth, ProjPoint(xi), ProjHyperplane(theta), chord(xi, xi_next),
                        chord(theta, theta_next)};
}

TransversalityReport transversality_check(const SymmetricSet& set, const PingPongBase& base, int depth,
                                          std::size_t pairs, std::uint64_t seed, double transv_tol) {
  const auto samples = random_pairs(set.alphabet(), depth, pairs, seed);
  const SymmetricSet dual = set.dual();
  std::vector<double> normalized(samples.size());
  std::vector<double> raw(samples.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(samples.size()); ++t) {
    const auto& [x, y] = samples[static_cast<std::size_t>(t)];
    const std::size_t c = common_prefix(x, y);
    const auto xs = x.letters();
    const auto ys = y.letters();
    const LimitPair lx = limits(xs.subspan(c), set, dual, base, depth);
    const LimitPair ly = limits(ys.subspan(c), set, dual, base, depth);
    normalized[static_cast<std::size_t>(t)] = min_singular(lx.xi, ly.theta);
    const LimitPair fx = limits(xs, set, dual, base, depth);
    const LimitPair fy = limits(ys, set, dual, base, depth);
    raw[static_cast<std::size_t>(t)] = min_singular(fx.xi, fy.theta);
  }
  TransversalityReport r;
  r.pairs = samples.size();
  r.depth = depth;
  r.tolerance = transv_tol;
  r.min_singular_value = kInf;
  r.min_raw_singular_value = kInf;
  for (std::size_t t = 0; t < samples.size(); ++t) {
    if (normalized[t] < r.min_singular_value) {
      r.min_singular_value = normalized[t];
      r.worst_x = samples[t].first;
      r.worst_y = samples[t].second;
    }
    r.min_raw_singular_value = std::min(r.min_raw_singular_value, raw[t]);
  }
  r.ok = r.min_singular_value >= transv_tol;
  return r;
}

DynamicsReport dynamics_check(const SymmetricSet& set, const ProximalityBundle& bundle, const PingPongBase& base,
                              double eps, int depth) {
  if (depth < 1) throw InputError("depth must be at least 1");
  DynamicsReport r;
  r.depth = depth;
  r.bound = std::max(std::pow(eps, depth - 1) * kProjectiveDiameter, kResolution);
  r.worst_margin = kInf;
  const SymmetricSet dual = set.dual();
  for (std::size_t i = 0; i < set.size(); ++i) {
    const std::vector<Letter> ray(static_cast<std::size_t>(depth), static_cast<Letter>(i));
    const LimitPair l = limits(ray, set, dual, base, depth);
    const double dx = chord(l.xi, bundle.primal[i].attracting.rep());
    const double dt = chord(l.theta, bundle.dual[i].attracting.rep());
    r.xi_distance.push_back(dx);
    r.theta_distance.push_back(dt);
    r.worst_margin = std::min({r.worst_margin, r.bound - dx, r.bound - dt});
  }
  r.ok = r.worst_margin >= 0.0;
  return r;
}

InjectivityReport injectivity_check(const SymmetricSet& set, const ProximalityBundle& bundle,
                                    const PingPongBase& base, double eps, int depth, std::size_t pairs,
                                    std::uint64_t seed) {
  InjectivityReport r;
  r.core_separation = kInf;
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = i + 1; j < set.size(); ++j) {
      r.core_separation = std::min(
          r.core_separation, proj_distance(bundle.primal[i].attracting, bundle.primal[j].attracting) - 2.0 * eps);
    }
  }
  if (set.size() < 2) r.core_separation = kProjectiveDiameter;

  const auto samples = random_pairs(set.alphabet(), depth, pairs, derive_seed(seed, 0x1ec7));
  const SymmetricSet dual = set.dual();
  std::vector<double> margin(samples.size());
  std::vector<double> tail_distance(samples.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(samples.size()); ++t) {
    const auto& [x, y] = samples[static_cast<std::size_t>(t)];
    const std::size_t c = common_prefix(x, y);
    const LimitPair lx = limits(x.letters(), set, dual, base, depth);
    const LimitPair ly = limits(y.letters(), set, dual, base, depth);
    const double bound = std::max(std::pow(eps, static_cast<double>(c)) * kProjectiveDiameter, kResolution) +
                         (c == 0 ? kResolution : 0.0);
    margin[static_cast<std::size_t>(t)] = bound - chord(lx.xi, ly.xi);
    const LimitPair tx = limits(x.letters().subspan(c), set, dual, base, depth);
    const LimitPair ty = limits(y.letters().subspan(c), set, dual, base, depth);
    tail_distance[static_cast<std::size_t>(t)] = chord(tx.xi, ty.xi);
  }
  r.pairs = samples.size();
  r.worst_continuity_margin = kInf;
  r.min_xi_distance = kInf;
  for (std::size_t t = 0; t < samples.size(); ++t) {
    r.worst_continuity_margin = std::min(r.worst_continuity_margin, margin[t]);
    r.min_xi_distance = std::min(r.min_xi_distance, tail_distance[t]);
  }
  r.ok = r.core_separation > 0.0 && r.worst_continuity_margin >= 0.0 && r.min_xi_distance > 0.0;
  return r;
}

BenoistReport benoist_check(const SymmetricSet& set, double c_eps, int max_len, double gap_tol) {
  check_c(c_eps);
  BenoistAcc proto;
  proto.set = &set;
  proto.log_c = std::log(c_eps);
  proto.gap_tol = gap_tol;
  return finish(sweep_words(set, max_len, proto), set, c_eps, max_len);
}

BenoistReport benoist_check_serial(const SymmetricSet& set, double c_eps, int max_len, double gap_tol) {
  check_c(c_eps);
  BenoistAcc proto;
  proto.set = &set;
  proto.log_c = std::log(c_eps);
  proto.gap_tol = gap_tol;
  return finish(sweep_words_serial(set, max_len, proto), set, c_eps, max_len);
}

Alpha1Report alpha1_growth_check(const SymmetricSet& set, double c_eps, int max_len) {
  check_c(c_eps);
  Alpha1Acc proto;
  proto.log_c = std::log(c_eps);
  return finish(sweep_words(set, max_len, proto), set, c_eps);
}

Alpha1Report alpha1_growth_check_serial(const SymmetricSet& set, double c_eps, int max_len) {
  check_c(c_eps);
  Alpha1Acc proto;
  proto.log_c = std::log(c_eps);
  return finish(sweep_words_serial(set, max_len, proto), set, c_eps);
}

const char* to_string(Grade g) {
  return g == Grade::Analytic ? "analytic" : "evidence";
}

namespace {

// C-hat can round to 1 (e.g. commuting generators); keep it inside (0, 1).
double clamp_c(double c) {
  return std::min(c, std::nextafter(1.0, 0.0));
}

}  // namespace

AnosovVerdict certify_projective_anosov(const SymmetricSet& set, const CertifyOptions& options) {
  AnosovVerdict v;
  v.word_len = options.word_len;
  v.depth = options.depth;
  const SamplingOptions sampling{options.samples, options.seed};
  auto fail = [&](std::string stage, std::string message, std::vector<std::size_t> indices = {}) {
    v.ok = false;
    v.failure_stage = std::move(stage);
    v.failure = std::move(message);
    v.failing_indices = std::move(indices);
    return v;
  };

  const WellPositionedVerdict wp = check_well_positioned(set, options.tol);
  if (!wp.ok) {
    const std::string stage =
        wp.failure == WellPositionedFailure::NotBiproximal ? "biproximality" : "well-positioned";
    return fail(stage, wp.message, wp.offending);
  }

  PowerSearchResult search = power_search(set, options.c_eps, options.n_max, sampling, options.tol);
  v.epsilon = search.epsilon;
  if (!search.found) {
    v.search = std::move(search);
    return fail("power-search", "no power n <= " + std::to_string(options.n_max) + " certifies");
  }

  std::uint64_t n = search.n;
  SchottkyCertificate cert = search.certificate;
  if (options.c_eps) {
    v.c_eps = *options.c_eps;
  } else {
    // Raise the power until alpha_1 of every generator clears -3 log C-hat,
    // with C-hat estimated on the powered set itself.
    v.c_eps_estimated = true;
    bool done = false;
    for (; n <= options.n_max; ++n) {
      const SymmetricSet sn = set.power(n);
      if (n != search.n) {
        cert = check_epsilon_schottky(sn, proximality_bundle(sn, options.tol.gap_tol), v.epsilon, sampling,
                                      options.tol);
        if (!cert.ok) continue;
      }
      const CEstimate est = estimate_C_epsilon(sn, options.word_len);
      const double c = clamp_c(est.value);
      double min_alpha = kInf;
      for (std::size_t i = 0; i < sn.size(); ++i) min_alpha = std::min(min_alpha, sn.element(i).alpha1());
      if (min_alpha >= -3.0 * std::log(c)) {
        v.c_eps = c;
        v.c_estimate = est;
        done = true;
        break;
      }
    }
    if (!done) {
      v.search = std::move(search);
      return fail("power-search", "no power n <= " + std::to_string(options.n_max) +
                                      " satisfies the alpha_1 condition with the estimated C_eps");
    }
  }
  v.search = std::move(search);
  v.power = n;
  v.schottky = cert;

  const SymmetricSet sn = set.power(n);
  const ProximalityBundle bundle = proximality_bundle(sn, options.tol.gap_tol);
  try {
    v.base = ping_pong_base(sn, bundle, v.epsilon, options.seed);
  } catch (const CertificationError& e) {
    return fail(e.stage(), e.what(), e.indices());
  }

  v.benoist = benoist_check(sn, v.c_eps, options.word_len, options.tol.gap_tol);
  v.alpha1 = alpha1_growth_check(sn, v.c_eps, options.word_len);
  v.transversality =
      transversality_check(sn, *v.base, options.depth, options.pairs, options.seed, options.tol.transv_tol);
  v.dynamics = dynamics_check(sn, bundle, *v.base, v.epsilon, options.depth);
  v.injectivity = injectivity_check(sn, bundle, *v.base, v.epsilon, options.depth, options.pairs, options.seed);

  v.benoist_ok = v.benoist->ok;
  v.alpha1_growth_ok = v.alpha1->ok;
  v.transversality_ok = v.transversality->ok;
  v.dynamics_ok = v.dynamics->ok;
  v.injectivity_ok = v.injectivity->ok;
  v.ok = v.benoist_ok && v.alpha1_growth_ok && v.transversality_ok && v.dynamics_ok && v.injectivity_ok;
  v.grade = v.ok && cert.analytic() ? Grade::Analytic : Grade::Evidence;
  if (!v.ok) {
    if (!v.benoist_ok) {
      v.failure_stage = "benoist";
      if (v.benoist->non_proximal > 0) {
        v.failure = "a word of length <= L is not proximal: " +
                    format_word(*v.benoist->first_non_proximal, set.names());
      } else {
        const ReducedWord& named =
            v.benoist->extremal_violates ? v.benoist->extremal_word : *v.benoist->first_violation;
        v.failure = "norm-ratio inequality violated by " + format_word(named, set.names());
      }
    } else if (!v.alpha1_growth_ok) {
      v.failure_stage = "alpha1-growth";
      v.failure = v.alpha1->hypothesis_ok ? "alpha_1 growth bound violated"
                                          : "alpha_1 hypothesis fails on a generator";
    } else if (!v.transversality_ok) {
      v.failure_stage = "transversality";
      v.failure = "limit maps not transverse within tolerance";
    } else if (!v.dynamics_ok) {
      v.failure_stage = "dynamics";
      v.failure = "limit map misses an attracting line";
    } else {
      v.failure_stage = "injectivity";
      v.failure = "limit map injectivity check failed";
    }
  }
  return v;
}

}  // namespace anosov
