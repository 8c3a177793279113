#pragma once

// Projective Anosov verdict for a Schottky set: ping-pong base points, limit
// maps xi and theta by nested images, the word inequalities checked to a
// finite length, and transversality / dynamics / injectivity of the maps.

#include "anosov/freegroup.hpp"
#include "anosov/schottky.hpp"

#include <optional>
#include <string>
#include <vector>

namespace anosov {

/// v lies at distance >= eps from every repelling hyperplane of S; w is the
/// same for S*, stored as a hyperplane of R^d.
struct PingPongBase {
  ProjPoint v;
  ProjHyperplane w;
  double v_margin = 0.0;  // min_j d(v, g_j^-) - eps
  double w_margin = 0.0;
  std::size_t attempts = 0;  // perturbations tried beyond the first candidate
};

/// Throws CertificationError("ping-pong-base") when no admissible point is
/// found within the perturbation budget.
PingPongBase ping_pong_base(const SymmetricSet& set, const ProximalityBundle& bundle, double eps,
                            std::uint64_t seed = 1);

struct LimitMapSample {
  ReducedWord prefix;
  int depth = 0;
  ProjPoint xi;
  ProjHyperplane theta;
  double depth_gap = 0.0;        // d(w_n v, w_{n+1} v) for the padded word
  double theta_depth_gap = 0.0;  // same for the dual
};

/// Approximates xi and theta at the boundary point that starts with `prefix`
/// and continues with `pad` forever (default: the last letter of prefix).
/// The word is evaluated to `depth` letters (at least the prefix length).
LimitMapSample limit_map(const ReducedWord& prefix, const SymmetricSet& set, const PingPongBase& base, int depth,
                         std::optional<Letter> pad = std::nullopt);

/// Point version of limit_map with an explicit base point, for base-point
/// independence checks.
ProjPoint limit_point(const ReducedWord& prefix, const SymmetricSet& set, const ProjPoint& v, int depth,
                      std::optional<Letter> pad = std::nullopt);

struct TransversalityReport {
  bool ok = false;
  std::size_t pairs = 0;
  int depth = 0;
  double tolerance = 0.0;
  // smallest singular value of [xi(x) | basis theta(y)], with the common
  // prefix of x and y stripped (the tails first differ at their first letter)
  double min_singular_value = 0.0;
  // the same quantity evaluated on the full words
  double min_raw_singular_value = 0.0;
  ReducedWord worst_x;
  ReducedWord worst_y;
};

TransversalityReport transversality_check(const SymmetricSet& set, const PingPongBase& base, int depth,
                                          std::size_t pairs, std::uint64_t seed, double transv_tol);

struct DynamicsReport {
  bool ok = false;
  int depth = 0;
  double bound = 0.0;                 // eps^{depth-1} sqrt(2), floored at 1e-14
  std::vector<double> xi_distance;    // d(xi(g_i^infty), g_i^+)
  std::vector<double> theta_distance; // d(theta(g_i^infty), (g_i^*)^+) in the dual
  double worst_margin = 0.0;          // min of bound - distance
};

DynamicsReport dynamics_check(const SymmetricSet& set, const ProximalityBundle& bundle, const PingPongBase& base,
                              double eps, int depth);

struct InjectivityReport {
  bool ok = false;
  // min over i != j of d(g_i^+, g_j^+) - 2 eps: the cores b(g_i^+, eps) are disjoint
  double core_separation = 0.0;
  std::size_t pairs = 0;
  // sampled prefix pairs: d(xi(x), xi(y)) <= eps^{r-1} sqrt(2) when x and y
  // first differ at position r (1-based); bounds floored at 1e-14
  double worst_continuity_margin = 0.0;
  double min_xi_distance = 0.0;
};

InjectivityReport injectivity_check(const SymmetricSet& set, const ProximalityBundle& bundle,
                                    const PingPongBase& base, double eps, int depth, std::size_t pairs,
                                    std::uint64_t seed);

struct BenoistReport {
  bool ok = false;
  double c_eps = 0.0;
  int max_len = 0;
  std::uint64_t words = 0;
  std::uint64_t non_proximal = 0;
  std::optional<ReducedWord> first_non_proximal;
  std::uint64_t violations = 0;
  std::optional<ReducedWord> first_violation;  // canonical order
  // log(ratio) - (n+2) log C_eps, minimized over words
  double worst_margin = 0.0;
  ReducedWord worst_word;
  // argmin of the ratio root (ratio^{1/(n+2)}); the word attaining C-hat
  ReducedWord extremal_word;
  double extremal_root = 0.0;
  bool extremal_violates = false;
};

/// Every reduced word x_0...x_n of length <= L is proximal and has
/// ||x_0...x_n|| / (||x_0||...||x_n||) >= C_eps^{n+2}.
BenoistReport benoist_check(const SymmetricSet& set, double c_eps, int max_len, double gap_tol = 1e-8);

struct Alpha1Report {
  bool ok = false;
  bool hypothesis_ok = false;  // alpha_1(mu(g_i)) >= -3 log C_eps for all i
  double hypothesis_margin = 0.0;
  std::uint64_t words = 0;
  // alpha_1(mu(x_0...x_n)) + (n-1) log C_eps, minimized over words
  double worst_slack = 0.0;
  ReducedWord worst_word;
};

Alpha1Report alpha1_growth_check(const SymmetricSet& set, double c_eps, int max_len);

/// Serial references for the two word sweeps.
BenoistReport benoist_check_serial(const SymmetricSet& set, double c_eps, int max_len, double gap_tol = 1e-8);
Alpha1Report alpha1_growth_check_serial(const SymmetricSet& set, double c_eps, int max_len);

enum class Grade { Analytic, Evidence };

const char* to_string(Grade g);

struct CertifyOptions {
  std::optional<double> c_eps;  // estimated from the words when absent
  int word_len = 6;
  int depth = 10;
  std::size_t pairs = 500;
  std::uint64_t seed = 1;
  std::size_t samples = 2000;
  std::uint64_t n_max = 4096;
  Tolerances tol;
};

struct AnosovVerdict {
  bool ok = false;
  std::string failure_stage;  // empty on success
  std::string failure;
  std::vector<std::size_t> failing_indices;

  double epsilon = 0.0;
  std::uint64_t power = 0;
  double c_eps = 0.0;
  bool c_eps_estimated = false;
  std::optional<CEstimate> c_estimate;
  int word_len = 0;
  int depth = 0;

  std::optional<PowerSearchResult> search;
  std::optional<SchottkyCertificate> schottky;
  std::optional<PingPongBase> base;
  std::optional<BenoistReport> benoist;
  std::optional<Alpha1Report> alpha1;
  std::optional<TransversalityReport> transversality;
  std::optional<DynamicsReport> dynamics;
  std::optional<InjectivityReport> injectivity;

  bool benoist_ok = false;
  bool alpha1_growth_ok = false;
  bool transversality_ok = false;
  bool dynamics_ok = false;
  bool injectivity_ok = false;
  Grade grade = Grade::Evidence;
};

/// Well-positioned check, power search (with C_eps supplied or estimated),
/// then the five finite-depth checks on the certified power S^n.
AnosovVerdict certify_projective_anosov(const SymmetricSet& set, const CertifyOptions& options = {});

}  // namespace anosov
