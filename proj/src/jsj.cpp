#include "anosov/jsj.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace anosov {

const char* to_string(VertexKind k) {
  switch (k) {
    case VertexKind::Cyclic: return "cyclic";
    case VertexKind::Fuchsian: return "fuchsian";
    case VertexKind::Rigid: return "rigid";
  }
  return "unknown";
}

VertexKind parse_vertex_kind(const std::string& s) {
  if (s == "cyclic") return VertexKind::Cyclic;
  if (s == "fuchsian") return VertexKind::Fuchsian;
  if (s == "rigid") return VertexKind::Rigid;
  throw InputError("unknown vertex kind '" + s + "' (expected cyclic, fuchsian or rigid)");
}

const char* to_string(JsjRule r) {
  switch (r) {
    case JsjRule::SameTypeAdjacent: return "same-type-adjacent";
    case JsjRule::FuchsianRigidAdjacent: return "fuchsian-rigid-adjacent";
    case JsjRule::Disconnected: return "disconnected";
    case JsjRule::NonCyclicEdgeGroup: return "non-cyclic-edge-group";
    case JsjRule::UnknownVertex: return "unknown-vertex";
    case JsjRule::DuplicateVertex: return "duplicate-vertex";
  }
  return "unknown";
}

const char* citation(JsjRule r) {
  switch (r) {
    case JsjRule::SameTypeAdjacent:
      return "rule (1): no two vertices of the same type are adjacent";
    case JsjRule::FuchsianRigidAdjacent:
      return "rule (1): no fuchsian vertex is adjacent to a rigid vertex";
    case JsjRule::Disconnected:
      return "graph of groups must be connected";
    case JsjRule::NonCyclicEdgeGroup:
      return "every edge group is infinite cyclic";
    case JsjRule::UnknownVertex:
      return "edge endpoints must be vertices of the graph";
    case JsjRule::DuplicateVertex:
      return "vertex ids must be unique";
  }
  return "";
}

std::optional<std::size_t> GraphOfGroups::find(const std::string& id) const {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i].id == id) return i;
  }
  return std::nullopt;
}

std::vector<std::size_t> GraphOfGroups::incident_edges(const std::string& id) const {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].from == id || edges[e].to == id) out.push_back(e);
  }
  return out;
}

JsjVerdict validate_jsj(const GraphOfGroups& graph) {
  JsjVerdict v;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < graph.vertices.size(); ++i) {
    if (!index.emplace(graph.vertices[i].id, i).second) {
      v.violations.push_back({JsjRule::DuplicateVertex, "vertex " + graph.vertices[i].id});
    }
  }

  std::vector<std::size_t> parent(graph.vertices.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  for (const JsjEdge& e : graph.edges) {
    const std::string where = "edge " + (e.label.empty() ? e.from + "-" + e.to : e.label) + " (" + e.from +
                              " - " + e.to + ")";
    const auto a = index.find(e.from);
    const auto b = index.find(e.to);
    if (a == index.end() || b == index.end()) {
      v.violations.push_back({JsjRule::UnknownVertex, where});
      continue;
    }
    if (e.group != "cyclic") v.violations.push_back({JsjRule::NonCyclicEdgeGroup, where});
    const VertexKind ka = graph.vertices[a->second].kind;
    const VertexKind kb = graph.vertices[b->second].kind;
    if (ka == kb) {
      v.violations.push_back({JsjRule::SameTypeAdjacent, where});
    } else if ((ka == VertexKind::Fuchsian && kb == VertexKind::Rigid) ||
               (ka == VertexKind::Rigid && kb == VertexKind::Fuchsian)) {
      v.violations.push_back({JsjRule::FuchsianRigidAdjacent, where});
    }
    parent[root(a->second)] = root(b->second);
  }

  if (graph.vertices.empty()) {
    v.violations.push_back({JsjRule::Disconnected, "graph has no vertices"});
  } else {
    for (std::size_t i = 1; i < graph.vertices.size(); ++i) {
      if (root(i) != root(0)) {
        v.violations.push_back(
            {JsjRule::Disconnected, "vertex " + graph.vertices[i].id + " not connected to " + graph.vertices[0].id});
      }
    }
  }
  v.valid = v.violations.empty();
  return v;
}

TwistGroupModel twist_group(const GraphOfGroups& graph, const std::string& vertex) {
  const auto i = graph.find(vertex);
  if (!i) throw InputError("unknown vertex '" + vertex + "'");
  if (graph.vertices[*i].kind != VertexKind::Cyclic) {
    throw NotCyclicVertex("vertex '" + vertex + "' is " + to_string(graph.vertices[*i].kind) + ", not cyclic");
  }
  TwistGroupModel m;
  m.cyclic_vertex = vertex;
  const std::vector<std::size_t> edges = graph.incident_edges(vertex);
  m.degree = edges.size();
  m.rank = m.degree == 0 ? 0 : m.degree - 1;
  const std::string z = graph.vertices[*i].label.empty() ? vertex : graph.vertices[*i].label;
  for (std::size_t k = 0; k < m.rank; ++k) {
    const JsjEdge& e = graph.edges[edges[k]];
    m.generators.push_back("D(" + z + ", " + (e.label.empty() ? e.from + "-" + e.to : e.label) + ")");
  }
  return m;
}

void check_registering_spec(const RegisteringSpec& spec, const GraphOfGroups* graph) {
  if (spec.neighbor_vertices.empty()) throw InputError("registering spec has no neighbor elements");
  if (spec.neighbor_labels.size() != spec.degree() || spec.neighbor_matrices.size() != spec.degree()) {
    throw InputError("registering spec neighbor lists have mismatched lengths");
  }
  if (!graph) return;
  const auto v = graph->find(spec.cyclic_vertex);
  if (!v) throw InputError("unknown cyclic vertex '" + spec.cyclic_vertex + "'");
  if (graph->vertices[*v].kind != VertexKind::Cyclic) {
    throw NotCyclicVertex("vertex '" + spec.cyclic_vertex + "' is not cyclic");
  }
  std::vector<std::string> adjacent;
  for (std::size_t e : graph->incident_edges(spec.cyclic_vertex)) {
    const JsjEdge& edge = graph->edges[e];
    adjacent.push_back(edge.from == spec.cyclic_vertex ? edge.to : edge.from);
  }
  std::vector<std::string> given = spec.neighbor_vertices;
  std::sort(adjacent.begin(), adjacent.end());
  std::sort(given.begin(), given.end());
  if (adjacent != given) {
    throw InputError("registering spec must name exactly one element per vertex adjacent to '" +
                     spec.cyclic_vertex + "'");
  }
}

FreeAutomorphism realize_twist(const RegisteringSpec& spec, std::size_t edge_index, int power_k) {
  if (edge_index < 1 || edge_index > spec.degree()) {
    throw InputError("edge index " + std::to_string(edge_index) + " out of range 1.." +
                     std::to_string(spec.degree()));
  }
  return twist_automorphism(spec.rank(), edge_index, power_k);
}

RegisteringReport certify_registering(const RegisteringSpec& spec, const CertifyOptions& options) {
  check_registering_spec(spec);
  if (!spec.a0_matrix) throw InputError("registering spec has no matrix for " + spec.a0_label);
  std::vector<UnimodularMatrix> gens{*spec.a0_matrix};
  std::vector<std::string> names{spec.a0_label};
  for (std::size_t k = 0; k < spec.degree(); ++k) {
    if (!spec.neighbor_matrices[k]) {
      throw InputError("registering spec has no matrix for neighbor " + spec.neighbor_vertices[k]);
    }
    gens.push_back(*spec.neighbor_matrices[k]);
    names.push_back(spec.neighbor_labels[k]);
  }
  const SymmetricSet set = SymmetricSet::from_generators(gens, names);

  RegisteringReport r;
  r.verdict = certify_projective_anosov(set, options);
  r.ok = r.verdict.ok;
  r.power = r.verdict.power;
  if (r.ok) {
    for (const std::string& name : names) r.subgroup_generators.push_back(name + "^" + std::to_string(r.power));
  }
  return r;
}

}  // namespace anosov
