#pragma once

// JSJ graphs of groups as labeled graphs, the twist group of a cyclic vertex,
// and registering subgroups handed to the Anosov certifier.

#include "anosov/certify.hpp"
#include "anosov/freegroup.hpp"

#include <optional>
#include <string>
#include <vector>

namespace anosov {

enum class VertexKind { Cyclic, Fuchsian, Rigid };

const char* to_string(VertexKind k);
/// Parses "cyclic" | "fuchsian" | "rigid"; throws InputError otherwise.
VertexKind parse_vertex_kind(const std::string& s);

struct JsjVertex {
  std::string id;
  VertexKind kind = VertexKind::Rigid;
  std::string label;  // opaque name of the vertex group
};

struct JsjEdge {
  std::string from;
  std::string to;
  std::string label;
  std::string group = "cyclic";  // edge groups must be infinite cyclic
};

struct GraphOfGroups {
  std::vector<JsjVertex> vertices;
  std::vector<JsjEdge> edges;

  /// Index of the vertex with this id, or nullopt.
  std::optional<std::size_t> find(const std::string& id) const;
  /// Indices of the edges incident to vertex `id`, in edge order.
  std::vector<std::size_t> incident_edges(const std::string& id) const;
};

enum class JsjRule {
  SameTypeAdjacent,       // rule (1)
  FuchsianRigidAdjacent,  // rule (1)
  Disconnected,
  NonCyclicEdgeGroup,
  UnknownVertex,
  DuplicateVertex,
};

const char* to_string(JsjRule r);
/// Human-readable statement of the rule a violation breaks.
const char* citation(JsjRule r);

struct JsjViolation {
  JsjRule rule;
  std::string where;  // edge or vertex description
};

struct JsjVerdict {
  bool valid = false;
  std::vector<JsjViolation> violations;
};

JsjVerdict validate_jsj(const GraphOfGroups& graph);

class NotCyclicVertex : public InputError {
 public:
  using InputError::InputError;
};

struct TwistGroupModel {
  std::string cyclic_vertex;
  std::size_t degree = 0;  // n_v, incident edges
  std::size_t rank = 0;    // n_v - 1
  std::vector<std::string> generators;  // D(z, e_1) ... D(z, e_{n_v - 1})
};

/// Throws NotCyclicVertex for fuchsian or rigid vertices, InputError for unknown ids.
TwistGroupModel twist_group(const GraphOfGroups& graph, const std::string& vertex);

/// A cyclic vertex generator a_0 and one element per adjacent vertex, with
/// optional matrices for the certifier. Generator k of the free model is
/// a_k, with a_0 the twister.
struct RegisteringSpec {
  std::string cyclic_vertex;
  std::string a0_label;
  std::optional<UnimodularMatrix> a0_matrix;
  std::vector<std::string> neighbor_vertices;
  std::vector<std::string> neighbor_labels;
  std::vector<std::optional<UnimodularMatrix>> neighbor_matrices;

  std::size_t degree() const { return neighbor_vertices.size(); }
  /// n_v + 1
  std::size_t rank() const { return degree() + 1; }
};

/// Checks the registering input is well formed; with a graph, also that the cyclic vertex
/// is cyclic and the neighbors are exactly its adjacent vertices (one element
/// per incident edge).
void check_registering_spec(const RegisteringSpec& spec, const GraphOfGroups* graph = nullptr);

/// Twist along edge i (1 <= i <= n_v) by a_0^k: a_i -> a_0^k a_i a_0^-k.
FreeAutomorphism realize_twist(const RegisteringSpec& spec, std::size_t edge_index, int power_k);

struct RegisteringReport {
  bool ok = false;
  AnosovVerdict verdict;
  std::uint64_t power = 0;
  std::vector<std::string> subgroup_generators;  // a_0^n, g_1^n, ...
};

/// Builds {a_0^{+-1}, g_1^{+-1}, ...} from the registering matrices and runs the
/// Anosov certifier. Throws InputError when a matrix is missing.
RegisteringReport certify_registering(const RegisteringSpec& spec, const CertifyOptions& options = {});

}  // namespace anosov
