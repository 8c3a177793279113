#include "anosov/certify.hpp"
#include "anosov/io.hpp"
#include "anosov/word_sweep.hpp"
#include "exact.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace anosov;

namespace {

SymmetricSet load(const std::string& name) {
  return load_matrix_set(oracle::data(name));
}

std::vector<oracle::Mat> plain_matrices(const SymmetricSet& s) {
  std::vector<oracle::Mat> m;
  for (std::size_t i = 0; i < s.size(); ++i) m.push_back(s.matrix(i));
  return m;
}

std::vector<std::uint32_t> inverse_table(const SymmetricSet& s) {
  std::vector<std::uint32_t> inv;
  for (std::size_t i = 0; i < s.size(); ++i) inv.push_back(s.inverse_index(i));
  return inv;
}

ReducedWord word_of(const std::vector<std::uint32_t>& w, const SymmetricSet& s) {
  return reduce(std::vector<Letter>(w.begin(), w.end()), s.alphabet());
}

const double kSl2Epsilon = 2.0 * std::sin(M_PI / 8.0) / 6.0;
const double kSl2CHat = 0.7806002272956507;

void check_same(const BenoistReport& a, const BenoistReport& b) {
  CHECK(a.ok == b.ok);
  CHECK(a.words == b.words);
  CHECK(a.non_proximal == b.non_proximal);
  CHECK(a.violations == b.violations);
  CHECK(a.first_violation == b.first_violation);
  CHECK(a.worst_margin == b.worst_margin);
  CHECK(a.worst_word == b.worst_word);
  CHECK(a.extremal_word == b.extremal_word);
  CHECK(a.extremal_root == b.extremal_root);
}

}  // namespace

TEST_SUITE("certify") {

TEST_CASE("parallel and serial word sweeps agree bitwise") {
  for (const auto& [name, n] : {std::pair{"sl2_example.json", 3u}, std::pair{"sl3_example.json", 6u}}) {
    const SymmetricSet s = load(name).power(n);
    for (double c : {0.2, 0.5, 0.9}) {
      check_same(benoist_check(s, c, 6), benoist_check_serial(s, c, 6));
      const Alpha1Report a = alpha1_growth_check(s, c, 6);
      const Alpha1Report b = alpha1_growth_check_serial(s, c, 6);
      CHECK(a.words == b.words);
      CHECK(a.worst_slack == b.worst_slack);
      CHECK(a.worst_word == b.worst_word);
      CHECK(a.ok == b.ok);
    }
  }
}

TEST_CASE("C-hat and the norm ratios match plain products") {
  const SymmetricSet s = load("sl2_example.json").power(3);
  const auto mats = plain_matrices(s);
  const auto words = oracle::reduced_words(s.size(), inverse_table(s), 6);
  double best = 10.0;
  std::vector<std::uint32_t> best_word;
  for (const auto& w : words) {
    double denom = 1.0;
    for (auto x : w) denom *= oracle::op_norm(mats[x]);
    const double root = std::pow(oracle::op_norm(oracle::product(mats, w)) / denom, 1.0 / (w.size() + 1.0));
    if (root < best - 1e-13) {
      best = root;
      best_word = w;
    }
  }
  const CEstimate est = estimate_C_epsilon(s, 6);
  CHECK(est.words == words.size());
  CHECK(est.value == doctest::Approx(best).epsilon(1e-10));
  CHECK(est.value == doctest::Approx(kSl2CHat).epsilon(1e-12));
  // several words tie to rounding; the reported one must attain the oracle minimum
  const std::vector<std::uint32_t> ext(est.extremal_word.letters().begin(), est.extremal_word.letters().end());
  double denom = 1.0;
  for (auto x : ext) denom *= oracle::op_norm(mats[x]);
  const double root = std::pow(oracle::op_norm(oracle::product(mats, ext)) / denom, 1.0 / (ext.size() + 1.0));
  CHECK(root == doctest::Approx(best).epsilon(1e-10));
  CHECK(best_word.size() == 6);
  CHECK(est.extremal_word == word_of({2, 0, 3, 1, 2, 0}, s));
}

TEST_CASE("alpha_1 of every word matches dense singular values") {
  const SymmetricSet s = load("sl3_example.json").power(6);
  const auto mats = plain_matrices(s);
  const auto words = oracle::reduced_words(s.size(), inverse_table(s), 3);
  const double c = 0.2;
  double worst = 1e300;
  for (const auto& w : words) {
    const oracle::Vec sv = oracle::singular_values(oracle::product(mats, w));
    const double a1 = std::log(sv(0) / sv(1));
    worst = std::min(worst, a1 + (static_cast<double>(w.size()) - 2.0) * std::log(c));
  }
  const Alpha1Report r = alpha1_growth_check(s, c, 3);
  CHECK(r.words == words.size());
  CHECK(r.worst_slack == doctest::Approx(worst).epsilon(1e-6));
}

TEST_CASE("conjugates are tested for proximality through their core") {
  // u c u^-1 has the spectrum of c; every such word of the certified SL3
  // set is proximal although the normalized products are nearly nilpotent
  const SymmetricSet s = load("sl3_example.json").power(6);
  const BenoistReport r = benoist_check(s, 0.2, 6);
  CHECK(r.non_proximal == 0);
  const auto mats = plain_matrices(s);
  // the double product of h a^-1 h^-1 already has a spurious complex top
  // eigenvalue; the exact product does not
  const std::vector<std::uint32_t> conj{2, 1, 3};
  CHECK_FALSE(oracle::proximal_dense(oracle::product(mats, conj)));
  CHECK(oracle::proximal_exact(mats, conj));
  for (const auto& w : oracle::reduced_words(s.size(), inverse_table(s), 4)) {
    CHECK(oracle::proximal_exact(mats, w));
  }
}

TEST_CASE("SL2 example certifies with frozen reference values") {
  const SymmetricSet s = load("sl2_example.json");
  const AnosovVerdict v = certify_projective_anosov(s);
  REQUIRE(v.ok);
  CHECK(v.failure_stage.empty());
  CHECK(v.power == 3);
  CHECK(v.epsilon == doctest::Approx(kSl2Epsilon).epsilon(1e-12));
  CHECK(v.c_eps_estimated);
  CHECK(v.c_eps == doctest::Approx(kSl2CHat).epsilon(1e-12));
  CHECK(v.grade == Grade::Analytic);
  CHECK(v.benoist->words == 1456);
  CHECK(v.benoist->worst_margin == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(v.transversality->min_singular_value >= 1e-6);
  CHECK(v.dynamics->bound == doctest::Approx(std::pow(kSl2Epsilon, 9) * std::sqrt(2.0)));
  CHECK(v.injectivity->core_separation > 0.0);
}

TEST_CASE("SL3 example certifies") {
  const AnosovVerdict v = certify_projective_anosov(load("sl3_example.json"));
  CHECK(v.ok);
  CHECK(v.power == 6);
  CHECK(v.c_eps == doctest::Approx(0.2081693972723088).epsilon(1e-10));
}

TEST_CASE("single diagonal generator") {
  const AnosovVerdict v = certify_projective_anosov(load("sl2_single.json"));
  CHECK(v.ok);
  CHECK(v.power == 1);
  // a commuting pair has norm ratio exactly 1; C-hat stays inside (0, 1)
  CHECK(v.c_eps < 1.0);
}

TEST_CASE("certification failures name the stage") {
  CHECK(certify_projective_anosov(load("rotation.json")).failure_stage == "biproximality");
  CHECK(certify_projective_anosov(load("duplicate_line.json")).failure_stage == "well-positioned");
  CHECK(certify_projective_anosov(load("point_in_hyperplane.json")).failure_stage == "well-positioned");

  CertifyOptions o;
  o.c_eps = kSl2CHat * (1.0 + 1e-6);
  const AnosovVerdict v = certify_projective_anosov(load("sl2_example.json"), o);
  CHECK_FALSE(v.ok);
  CHECK(v.failure_stage == "benoist");
  CHECK(v.benoist->extremal_violates);
  CHECK(v.failure.find("b a b^-1 a^-1 b a") != std::string::npos);

  CertifyOptions few;
  few.n_max = 2;
  CHECK(certify_projective_anosov(load("sl2_example.json"), few).failure_stage == "power-search");
}

TEST_CASE("ping-pong base lies outside every repelling neighborhood") {
  const SymmetricSet s = load("sl3_example.json").power(6);
  const ProximalityBundle b = proximality_bundle(s, 1e-8);
  const double eps = compute_epsilon(s);
  const PingPongBase base = ping_pong_base(s, b, eps);
  CHECK(base.v_margin >= 0.0);
  CHECK(base.w_margin >= 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const oracle::Vec n = b.primal[i].repelling.conormal().rep();
    CHECK(std::abs(n.dot(base.v.rep())) >= sine_from_chord(eps) - 1e-12);
  }
}

TEST_CASE("limit maps contract at rate eps and converge to attracting lines") {
  const SymmetricSet s = load("sl2_example.json").power(3);
  const ProximalityBundle b = proximality_bundle(s, 1e-8);
  const PingPongBase base = ping_pong_base(s, b, kSl2Epsilon);
  for_each_reduced_word(s.alphabet(), 5, [&](std::span<const Letter> w) {
    const ReducedWord p = reduce(w, s.alphabet());
    for (int depth = static_cast<int>(p.size()); depth <= 8; ++depth) {
      const LimitMapSample m = limit_map(p, s, base, depth);
      const double bound = std::pow(kSl2Epsilon, depth) * std::sqrt(2.0);
      CHECK(m.depth_gap <= bound);
      CHECK(m.theta_depth_gap <= bound);
      CHECK(proj_distance(m.xi, limit_point(p, s, base.v, depth)) < 1e-15);
    }
  });
  // the constant ray x x x ... lands on x^+
  for (std::size_t i = 0; i < s.size(); ++i) {
    const ReducedWord ray = reduce(std::vector<Letter>{static_cast<Letter>(i)}, s.alphabet());
    const auto e = oracle::eig2(s.matrix(i));
    CHECK(oracle::chord(limit_point(ray, s, base.v, 12).rep(), e->attracting) < 1e-12);
  }
  const ReducedWord a = reduce(std::vector<Letter>{0}, s.alphabet());
  CHECK_THROWS_AS(limit_map(a, s, base, 4, Letter{1}), InputError);
  CHECK_THROWS_AS(limit_map(ReducedWord{}, s, base, 4), InputError);
}

TEST_CASE("randomized checks are deterministic for a seed") {
  const SymmetricSet s = load("sl2_example.json").power(3);
  const ProximalityBundle b = proximality_bundle(s, 1e-8);
  const PingPongBase base = ping_pong_base(s, b, kSl2Epsilon, 3);
  const auto t1 = transversality_check(s, base, 10, 200, 9, 1e-6);
  const auto t2 = transversality_check(s, base, 10, 200, 9, 1e-6);
  CHECK(t1.min_singular_value == t2.min_singular_value);
  CHECK(t1.worst_x == t2.worst_x);
  const auto i1 = injectivity_check(s, b, base, kSl2Epsilon, 10, 200, 9);
  const auto i2 = injectivity_check(s, b, base, kSl2Epsilon, 10, 200, 9);
  CHECK(i1.worst_continuity_margin == i2.worst_continuity_margin);
  CHECK(i1.min_xi_distance == i2.min_xi_distance);
}

TEST_CASE("C_eps outside (0, 1) is rejected") {
  const SymmetricSet s = load("sl2_example.json");
  CHECK_THROWS_AS(benoist_check(s, 1.0, 3), InputError);
  CHECK_THROWS_AS(alpha1_growth_check(s, 0.0, 3), InputError);
}

}  // TEST_SUITE
