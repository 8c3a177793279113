#pragma once

// Well-positioned, epsilon-proximal and epsilon-Schottky checks for symmetric
// sets of matrices and their duals, plus the scan over powers S^n.

#include "anosov/freegroup.hpp"
#include "anosov/linalg.hpp"
#include "anosov/symmetric_set.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace anosov {

struct Tolerances {
  double det_tol = 1e-9;
  double gap_tol = 1e-8;
  double pos_tol = 1e-8;
  double transv_tol = 1e-6;
};

/// A certification stage rejected its input. `indices` name the offending
/// elements (a single index or a pair).
class CertificationError : public std::runtime_error {
 public:
  CertificationError(std::string stage, std::vector<std::size_t> indices, const std::string& what)
      : std::runtime_error(what), stage_(std::move(stage)), indices_(std::move(indices)) {}
  const std::string& stage() const { return stage_; }
  const std::vector<std::size_t>& indices() const { return indices_; }

 private:
  std::string stage_;
  std::vector<std::size_t> indices_;
};

/// Per-index proximal data for S and for the dual set S*.
struct ProximalityBundle {
  std::vector<ProximalData> primal;
  std::vector<ProximalData> dual;
};

/// Throws CertificationError("biproximality", {i}) when some element (or
/// its dual) is not proximal.
ProximalityBundle proximality_bundle(const SymmetricSet& set, double gap_tol);

enum class WellPositionedFailure { None, NotBiproximal, SameAttractingLine, PointInHyperplane };

const char* to_string(WellPositionedFailure f);

struct WellPositionedVerdict {
  bool ok = false;
  WellPositionedFailure failure = WellPositionedFailure::None;
  std::vector<std::size_t> offending;  // index or (i, j)
  std::string message;

  // min over i != j of d(g_i^+, g_j^+)
  double min_attracting_distance = 0.0;
  std::size_t attracting_pair[2] = {0, 0};
  // min over g_j != g_i^{-1} of d(g_i^+, g_j^-)
  double min_point_hyperplane = 0.0;
  std::size_t point_hyperplane_pair[2] = {0, 0};
};

WellPositionedVerdict check_well_positioned(const SymmetricSet& set, const Tolerances& tol = {});

/// epsilon = eps_1 / 6 with eps_1 = min over g_j != g_i^{-1} of d(g_i^+, g_j^-).
/// Throws CertificationError if the set is not well-positioned.
double compute_epsilon(const SymmetricSet& set, const Tolerances& tol = {});

enum class CheckMethod { Analytic, Sampled };

const char* to_string(CheckMethod m);

struct SamplingOptions {
  std::size_t samples = 2000;
  std::uint64_t seed = 1;
};

struct EpsilonProximalCert {
  double epsilon = 0.0;
  bool ok = false;
  std::string failed_condition;  // empty, "not-proximal", "separation", "lipschitz", "containment"

  // (1) d(g^+, g^-) >= 2 eps
  double separation = 0.0;
  // (2) Lipschitz constant of the projective action on B(g^-, eps)
  double analytic_lipschitz = 0.0;  // rigorous upper bound, +inf when unavailable
  double sampled_lipschitz = 0.0;   // worst observed quotient
  CheckMethod lipschitz_method = CheckMethod::Sampled;
  // (3) sup over x in B(g^-, eps) of d(g x, g^+)
  double analytic_containment = 0.0;
  double sampled_containment = 0.0;
  CheckMethod containment_method = CheckMethod::Sampled;
  std::size_t samples = 0;

  double separation_margin() const { return separation - 2.0 * epsilon; }
  double lipschitz_margin() const {
    return epsilon - (lipschitz_method == CheckMethod::Analytic ? analytic_lipschitz : sampled_lipschitz);
  }
  double containment_margin() const {
    return epsilon - (containment_method == CheckMethod::Analytic ? analytic_containment : sampled_containment);
  }
  bool analytic() const {
    return lipschitz_method == CheckMethod::Analytic && containment_method == CheckMethod::Analytic;
  }
};

/// Checks the three epsilon-proximality conditions for a projective
/// representative g with known proximal data. `wedge_norm` is ||wedge^2 g||
/// for the same representative.
EpsilonProximalCert check_epsilon_proximal(const Matrix& g, const ProximalData& data, double wedge_norm,
                                           double eps, const SamplingOptions& sampling);

EpsilonProximalCert check_epsilon_proximal(const UnimodularMatrix& g, double eps,
                                           const SamplingOptions& sampling,
                                           double gap_tol = Tolerances{}.gap_tol);

EpsilonProximalCert check_epsilon_proximal(const GroupElement& g, const ProximalData& data, double eps,
                                           const SamplingOptions& sampling);

struct PairEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  double distance = 0.0;  // d(g_i^+, (g_j^{-1})^-)
  bool ok = false;
};

struct SchottkyCertificate {
  double epsilon = 0.0;
  std::uint64_t power = 1;
  bool ok = false;
  std::string failure;
  std::vector<std::size_t> failing_indices;

  std::vector<EpsilonProximalCert> primal;
  std::vector<EpsilonProximalCert> dual;
  std::vector<PairEntry> pairs;       // i != j, threshold 6 eps
  std::vector<PairEntry> dual_pairs;  // same table for S*
  // min over table entries of (distance - 2 eps): the margin by which
  // b(g_i^+, eps) sits inside B(g_k^-, eps) for every g_k != g_i^{-1}.
  double containment_margin = 0.0;

  bool analytic() const;
};

SchottkyCertificate check_epsilon_schottky(const SymmetricSet& set, double eps,
                                           const SamplingOptions& sampling = {},
                                           const Tolerances& tol = {});

/// Same, reusing precomputed proximal data for the set and its dual.
SchottkyCertificate check_epsilon_schottky(const SymmetricSet& set, const ProximalityBundle& bundle,
                                           double eps, const SamplingOptions& sampling,
                                           const Tolerances& tol);

/// Table comparisons accept d >= threshold - pos_tol: eps = eps_1 / 6 puts
/// the closest pair exactly on the 6 eps threshold.
inline bool meets_threshold(double distance, double threshold, const Tolerances& tol) {
  return distance >= threshold - tol.pos_tol;
}

struct PowerAttempt {
  std::uint64_t n = 0;
  bool schottky_ok = false;
  std::string schottky_failure;
  double min_alpha1 = 0.0;     // min_i alpha_1(mu(g_i^n))
  double alpha1_margin = 0.0;  // min_alpha1 + 3 log C_eps (or +inf without C_eps)
  // worst margins across all elements, for diagnostics
  double worst_lipschitz_margin = 0.0;
  double worst_containment_margin = 0.0;
};

struct PowerSearchResult {
  bool found = false;
  std::uint64_t n = 0;
  double epsilon = 0.0;
  std::optional<double> c_eps;
  std::vector<PowerAttempt> attempts;
  SchottkyCertificate certificate;  // at n when found
};

/// Minimal n <= n_max such that S^n and (S^n)^* are eps-Schottky and, when
/// c_eps is given, alpha_1(mu(g_i^n)) >= -3 log c_eps for all i.
/// found == false reports exhaustion; attempts carries per-n diagnostics.
PowerSearchResult power_search(const SymmetricSet& set, std::optional<double> c_eps, std::uint64_t n_max,
                               const SamplingOptions& sampling = {}, const Tolerances& tol = {});

struct CEstimate {
  double value = 1.0;  // C-hat
  ReducedWord extremal_word;
  double extremal_log_ratio = 0.0;  // log(||w|| / prod ||x_i||) for the extremal word
  std::uint64_t words = 0;
};

/// C-hat = min over reduced words of length 1..L of
/// (||x_0...x_n|| / (||x_0||...||x_n||))^{1/(n+2)}.
CEstimate estimate_C_epsilon(const SymmetricSet& set, int max_len);

/// 64-bit seed for an independent random stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace anosov
