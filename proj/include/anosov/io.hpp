#pragma once

// JSON file formats for matrix sets, JSJ graphs and registering specs; run
// configuration; certificate serialization.
//
// Matrix set:
//   {"dimension": 2,
//    "generators": [{"name": "a", "matrix": [["4", "0"], ["0", "1/4"]]},
//                   {"name": "b", "matrix": [...], "inverse": "B"},
//                   {"name": "B", "matrix": [...], "inverse": "b"}]}
// Entries are decimal strings, "p/q" fractions or JSON numbers. A generator
// without "inverse" gets its inverse computed and appended after it.

#include "anosov/certify.hpp"
#include "anosov/jsj.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace anosov {

using Json = nlohmann::ordered_json;

/// Parse failure with the path of the offending field.
class SchemaError : public InputError {
 public:
  using InputError::InputError;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);
/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(const std::string& bytes);

double parse_entry(const Json& value, const std::string& where);
Matrix parse_matrix(const Json& value, int dim, const std::string& where);

SymmetricSet parse_matrix_set(const Json& doc, double det_tol = Tolerances{}.det_tol);
SymmetricSet load_matrix_set(const std::filesystem::path& path, double det_tol = Tolerances{}.det_tol);
/// Writes every element with an explicit inverse, entries printed to 17
/// significant digits so loading reproduces them exactly.
Json matrix_set_to_json(const SymmetricSet& set);

GraphOfGroups parse_graph(const Json& doc);
GraphOfGroups load_graph(const std::filesystem::path& path);
Json graph_to_json(const GraphOfGroups& graph);

/// {"cyclic_vertex": "c", "a0": {"label": "a", "matrix": ...},
///  "neighbors": [{"vertex": "L1", "label": "g1", "matrix": ...}],
///  "graph": {...}}   ("graph" optional)
struct RegisteringFile {
  RegisteringSpec spec;
  std::optional<GraphOfGroups> graph;
};
RegisteringFile parse_registering(const Json& doc, double det_tol = Tolerances{}.det_tol);
RegisteringFile load_registering(const std::filesystem::path& path, double det_tol = Tolerances{}.det_tol);

struct RunConfig {
  Tolerances tol;
  std::optional<double> c_eps;  // nullopt: estimate
  int max_word_length = 6;
  int depth = 10;
  std::size_t samples = 2000;
  std::size_t pairs = 500;
  std::uint64_t seed = 1;
  std::uint64_t n_max = 4096;

  /// Throws InputError when a field is out of range.
  void validate() const;
  CertifyOptions certify_options() const;
};

/// Applies the keys present in a JSON config object on top of `base`.
RunConfig parse_config(const Json& doc, RunConfig base = {});
/// "estimate" or a number in (0, 1).
std::optional<double> parse_c_eps(const std::string& s);
Json config_to_json(const RunConfig& config);

// --- serialization ------------------------------------------------------------

Json word_to_json(const ReducedWord& w, const SymmetricSet& set);
Json to_json(const WellPositionedVerdict& v);
Json to_json(const EpsilonProximalCert& c);
Json to_json(const SchottkyCertificate& c, const SymmetricSet& set);
Json to_json(const PowerSearchResult& r, const SymmetricSet& set);
Json to_json(const CEstimate& e, const SymmetricSet& set);
Json to_json(const BenoistReport& r, const SymmetricSet& set);
Json to_json(const Alpha1Report& r, const SymmetricSet& set);
Json to_json(const TransversalityReport& r, const SymmetricSet& set);
Json to_json(const DynamicsReport& r);
Json to_json(const InjectivityReport& r);
Json to_json(const AnosovVerdict& v, const SymmetricSet& set);
Json to_json(const JsjVerdict& v);
Json to_json(const TwistGroupModel& m);

/// Finite doubles as numbers, infinities as the strings "inf" / "-inf".
Json number(double x);

}  // namespace anosov
