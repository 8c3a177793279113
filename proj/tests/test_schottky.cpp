#include "anosov/io.hpp"
#include "anosov/schottky.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace anosov;

namespace {

SymmetricSet load(const std::string& name) {
  return load_matrix_set(oracle::data(name));
}

// The four lines of the shipped SL2 set are 45 degrees apart.
const double kSl2Epsilon = 2.0 * std::sin(M_PI / 8.0) / 6.0;

// Least n such that every element of S^n and of its dual passes the dense
// P^1 sampling oracle and every table entry clears 6 eps.
std::uint64_t brute_force_power(const SymmetricSet& set, double eps, std::uint64_t n_max) {
  const double pos_tol = Tolerances{}.pos_tol;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    std::vector<oracle::Mat> gs;
    for (std::size_t i = 0; i < set.size(); ++i) {
      oracle::Mat p = oracle::Mat::Identity(2, 2);
      for (std::uint64_t k = 0; k < n; ++k) p = p * set.matrix(i);
      gs.push_back(p);
    }
    bool ok = true;
    for (std::size_t i = 0; i < gs.size() && ok; ++i) {
      ok = oracle::p1_eps_proximal(gs[i], eps) && oracle::p1_eps_proximal(gs[i].inverse().transpose(), eps);
    }
    for (std::size_t i = 0; i < gs.size() && ok; ++i) {
      for (std::size_t j = 0; j < gs.size() && ok; ++j) {
        if (i == j) continue;
        const auto ei = oracle::eig2(gs[i]);
        const auto ej = oracle::eig2(gs[set.inverse_index(j)]);
        ok = oracle::chord(ei->attracting, ej->repelling) >= 6 * eps - pos_tol;
      }
    }
    if (ok) return n;
  }
  return 0;
}

}  // namespace

TEST_SUITE("schottky") {

TEST_CASE("shipped SL2 set is well positioned with closed-form epsilon") {
  const SymmetricSet s = load("sl2_example.json");
  CHECK(s.size() == 4);
  const WellPositionedVerdict wp = check_well_positioned(s);
  CHECK(wp.ok);
  CHECK(wp.min_attracting_distance == doctest::Approx(2.0 * std::sin(M_PI / 8.0)));
  CHECK(wp.min_point_hyperplane == doctest::Approx(2.0 * std::sin(M_PI / 8.0)));
  CHECK(compute_epsilon(s) == doctest::Approx(kSl2Epsilon).epsilon(1e-12));
}

TEST_CASE("well-positioned failures name their cause") {
  const auto rot = check_well_positioned(load("rotation.json"));
  CHECK_FALSE(rot.ok);
  CHECK(rot.failure == WellPositionedFailure::NotBiproximal);
  CHECK(rot.offending.size() == 1);

  const auto dup = check_well_positioned(load("duplicate_line.json"));
  CHECK_FALSE(dup.ok);
  CHECK(dup.failure == WellPositionedFailure::SameAttractingLine);
  CHECK(dup.offending.size() == 2);

  const auto pih = check_well_positioned(load("point_in_hyperplane.json"));
  CHECK_FALSE(pih.ok);
  CHECK(pih.failure == WellPositionedFailure::PointInHyperplane);

  CHECK_THROWS_AS(compute_epsilon(load("duplicate_line.json")), CertificationError);
}

TEST_CASE("eps-proximality of diag(t, 1/t) at eps = 0.1 against a dense sweep") {
  const double eps = 0.1;
  // oracle threshold: the dense P^1 check is monotone in t, so bisect it
  double lo = 20.0, hi = 45.0;
  REQUIRE_FALSE(oracle::p1_eps_proximal(oracle::diag2(lo), eps, 40001));
  REQUIRE(oracle::p1_eps_proximal(oracle::diag2(hi), eps, 40001));
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    (oracle::p1_eps_proximal(oracle::diag2(mid), eps, 40001) ? hi : lo) = mid;
  }
  const double t_star = hi;
  // derivative of the action at the edge of B(g^-, eps) equals eps
  const double delta = 2.0 * std::asin(eps / 2.0);
  const double s2 = std::sin(delta) * std::sin(delta);
  const double c2 = 1.0 - s2;
  // 1/t^2 = eps (s2 + c2 / t^4)  <=>  eps s2 u^2 - u + eps c2 = 0 with u = t^2
  const double u = (1.0 + std::sqrt(1.0 - 4.0 * eps * eps * s2 * c2)) / (2.0 * eps * s2);
  CHECK(t_star == doctest::Approx(std::sqrt(u)).epsilon(1e-3));

  for (double t = 20.0; t <= 45.0; t += 0.25) {
    if (std::abs(t - t_star) < 0.05) continue;
    const auto cert = check_epsilon_proximal(UnimodularMatrix(oracle::diag2(t)), eps, SamplingOptions{});
    CHECK_MESSAGE(cert.ok == (t > t_star), "t = " << t);
  }
}

TEST_CASE("sampled quantities never exceed the analytic bounds") {
  std::mt19937_64 rng(33);
  int analytic = 0;
  for (int t = 0; t < 600; ++t) {
    const int d = 2 + t % 3;
    const Matrix m = oracle::random_sl(d, rng);
    const auto pr = proximality_test(UnimodularMatrix(m));
    if (!std::holds_alternative<ProximalData>(pr)) continue;
    // moderate powers keep both quantities well above the rounding floor of
    // a sampled quotient, about 1e-16 / chord(x, y)
    const ScaledMatrix p = scaled_power(m, static_cast<std::uint64_t>(3 + t % 4));
    const Matrix g = p.unit;
    const auto pd = proximality_test(g);
    if (!std::holds_alternative<ProximalData>(pd)) continue;
    const double wedge = oracle::op_norm(exterior_square(g));
    const auto cert = check_epsilon_proximal(g, std::get<ProximalData>(pd), wedge, 0.02, SamplingOptions{500, 7});
    if (std::isfinite(cert.analytic_lipschitz)) {
      ++analytic;
      CHECK(cert.sampled_lipschitz <= cert.analytic_lipschitz * (1 + 1e-9));
    }
    if (std::isfinite(cert.analytic_containment)) {
      CHECK(cert.sampled_containment <= cert.analytic_containment * (1 + 1e-9));
    }
    if (d == 2 && std::isfinite(cert.analytic_lipschitz)) {
      const auto dense = oracle::p1_proximal(g, 0.02, 2001);
      CHECK(dense.lipschitz <= cert.analytic_lipschitz * (1 + 1e-9));
      CHECK(dense.containment <= cert.analytic_containment * (1 + 1e-9));
    }
  }
  CHECK(analytic >= 20);
}

TEST_CASE("power search on the SL2 set agrees with the brute-force oracle") {
  const SymmetricSet s = load("sl2_example.json");
  const PowerSearchResult r = power_search(s, std::nullopt, 4096);
  REQUIRE(r.found);
  CHECK(r.n == 3);
  CHECK(r.n == brute_force_power(s, kSl2Epsilon, 20));
  CHECK(r.epsilon == doctest::Approx(kSl2Epsilon).epsilon(1e-12));
  CHECK(r.attempts.size() == 3);
  CHECK_FALSE(r.attempts[0].schottky_ok);
  CHECK(r.certificate.ok);
  CHECK(r.certificate.analytic());
  CHECK(r.certificate.pairs.size() == 12);
}

TEST_CASE("power search with C_eps adds the alpha_1 condition") {
  const SymmetricSet s = load("sl2_example.json");
  // alpha_1(mu(a^n)) = 2 n log 4 for every element
  const double c = 1e-6;
  const auto expect = static_cast<std::uint64_t>(std::ceil(-3.0 * std::log(c) / (2.0 * std::log(4.0))));
  const PowerSearchResult r = power_search(s, c, 4096);
  REQUIRE(r.found);
  CHECK(r.n == std::max<std::uint64_t>(3, expect));
  CHECK(r.attempts.back().alpha1_margin >= 0.0);
  const PowerSearchResult loose = power_search(s, 0.5, 4096);
  CHECK(loose.n == 3);
}

TEST_CASE("power search reports exhaustion") {
  const PowerSearchResult r = power_search(load("sl2_example.json"), std::nullopt, 2);
  CHECK_FALSE(r.found);
  CHECK(r.attempts.size() == 2);
}

TEST_CASE("attracting lines and epsilon are invariant under powers and reordering") {
  const SymmetricSet s = load("sl3_example.json");
  const double eps = compute_epsilon(s);
  for (std::uint64_t k : {2u, 5u, 40u}) {
    const SymmetricSet p = s.power(k);
    CHECK(p.exponent() == k);
    CHECK(compute_epsilon(p) == doctest::Approx(eps).epsilon(1e-9));
    const auto a = check_well_positioned(s);
    const auto b = check_well_positioned(p);
    CHECK(b.min_attracting_distance == doctest::Approx(a.min_attracting_distance).epsilon(1e-9));
  }
  const SymmetricSet q = s.permuted({2, 3, 0, 1});
  CHECK(compute_epsilon(q) == doctest::Approx(eps).epsilon(1e-12));
  const auto r1 = power_search(s, std::nullopt, 64);
  const auto r2 = power_search(q, std::nullopt, 64);
  CHECK(r1.n == r2.n);
}

TEST_CASE("SL3 example reference values") {
  const SymmetricSet s = load("sl3_example.json");
  const PowerSearchResult r = power_search(s, std::nullopt, 4096);
  REQUIRE(r.found);
  CHECK(r.n == 6);
  CHECK(r.epsilon == doctest::Approx(0.018547251967899393).epsilon(1e-12));
}

TEST_CASE("Schottky checks are deterministic for a seed") {
  const SymmetricSet s = load("sl3_example.json").power(6);
  const double eps = compute_epsilon(s);
  const auto a = check_epsilon_schottky(s, eps, SamplingOptions{300, 42});
  const auto b = check_epsilon_schottky(s, eps, SamplingOptions{300, 42});
  REQUIRE(a.primal.size() == b.primal.size());
  for (std::size_t i = 0; i < a.primal.size(); ++i) {
    CHECK(a.primal[i].sampled_lipschitz == b.primal[i].sampled_lipschitz);
    CHECK(a.primal[i].sampled_containment == b.primal[i].sampled_containment);
    CHECK(a.dual[i].sampled_lipschitz == b.dual[i].sampled_lipschitz);
  }
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("Schottky table entries match closed-form fixed points") {
  const SymmetricSet s = load("sl2_example.json").power(3);
  const auto cert = check_epsilon_schottky(s, kSl2Epsilon);
  CHECK(cert.ok);
  for (const PairEntry& e : cert.pairs) {
    const auto ei = oracle::eig2(s.matrix(e.i));
    const auto ej = oracle::eig2(s.matrix(s.inverse_index(e.j)));
    CHECK(e.distance == doctest::Approx(oracle::chord(ei->attracting, ej->repelling)).epsilon(1e-10));
    CHECK(e.ok);
  }
  // eps_1 is attained, so the closest entries sit on the threshold
  double least = 10.0;
  for (const PairEntry& e : cert.pairs) least = std::min(least, e.distance);
  CHECK(least == doctest::Approx(6.0 * kSl2Epsilon).epsilon(1e-12));
}

TEST_CASE("epsilon-proximal failure conditions") {
  // d(g+, g-) = sqrt 2 < 2 eps fails separation
  const auto sep = check_epsilon_proximal(UnimodularMatrix(oracle::diag2(1e4)), 0.8, SamplingOptions{});
  CHECK_FALSE(sep.ok);
  CHECK(sep.failed_condition == "separation");
  const auto weak = check_epsilon_proximal(UnimodularMatrix(oracle::diag2(2.0)), 0.1, SamplingOptions{});
  CHECK_FALSE(weak.ok);
  CHECK(weak.failed_condition == "lipschitz");
  const auto rot = check_epsilon_proximal(UnimodularMatrix(oracle::rotation(0.4)), 0.1, SamplingOptions{});
  CHECK_FALSE(rot.ok);
  CHECK(rot.failed_condition == "not-proximal");
}

}  // TEST_SUITE
