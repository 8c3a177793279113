#include "anosov/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace anosov {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << contents;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw ComputationError("SHA-256 digest failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

namespace {

double parse_decimal(std::string_view s, const std::string& where) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
    throw SchemaError(where + ": '" + std::string(s) + "' is not a number");
  }
  return v;
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(source + ": " + e.what());
  }
}

const Json& field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw SchemaError(where + ": expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(where + ": missing field '" + key + "'");
  return *it;
}

std::string string_field(const Json& obj, const char* key, const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_string()) throw SchemaError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::string optional_string(const Json& obj, const char* key, const std::string& fallback) {
  const auto it = obj.find(key);
  return it != obj.end() && it->is_string() ? it->get<std::string>() : fallback;
}

std::string entry_string(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

double parse_entry(const Json& value, const std::string& where) {
  double v = 0.0;
  if (value.is_number()) {
    v = value.get<double>();
  } else if (value.is_string()) {
    const std::string s = value.get<std::string>();
    const auto slash = s.find('/');
    if (slash == std::string::npos) {
      v = parse_decimal(s, where);
    } else {
      const double num = parse_decimal(std::string_view(s).substr(0, slash), where);
      const double den = parse_decimal(std::string_view(s).substr(slash + 1), where);
      if (den == 0.0) throw SchemaError(where + ": zero denominator");
      v = num / den;
    }
  } else {
    throw SchemaError(where + ": expected a number or numeric string");
  }
  if (!std::isfinite(v)) throw SchemaError(where + ": entry is not finite");
  return v;
}

Matrix parse_matrix(const Json& value, int dim, const std::string& where) {
  if (!value.is_array() || static_cast<int>(value.size()) != dim) {
    throw SchemaError(where + ": expected " + std::to_string(dim) + " rows");
  }
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const Json& row = value[static_cast<std::size_t>(i)];
    const std::string rw = where + "[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != dim) {
      throw SchemaError(rw + ": expected " + std::to_string(dim) + " entries (matrix must be square)");
    }
    for (int j = 0; j < dim; ++j) {
      m(i, j) = parse_entry(row[static_cast<std::size_t>(j)], rw + "[" + std::to_string(j) + "]");
    }
  }
  return m;
}

SymmetricSet parse_matrix_set(const Json& doc, double det_tol) {
  const Json& dim_v = field(doc, "dimension", "set");
  if (!dim_v.is_number_integer() || dim_v.get<int>() < 2) throw SchemaError("set.dimension: expected an integer >= 2");
  const int dim = dim_v.get<int>();
  const Json& gens = field(doc, "generators", "set");
  if (!gens.is_array() || gens.empty()) throw SchemaError("set.generators: expected a non-empty array");

  struct Entry {
    std::string name;
    Matrix m;
    std::optional<std::string> inverse;
  };
  std::vector<Entry> entries;
  std::map<std::string, std::size_t> by_name;
  for (std::size_t k = 0; k < gens.size(); ++k) {
    const std::string where = "set.generators[" + std::to_string(k) + "]";
    Entry e;
    e.name = optional_string(gens[k], "name", "g" + std::to_string(k));
    e.m = parse_matrix(field(gens[k], "matrix", where), dim, where + ".matrix");
    if (gens[k].contains("inverse")) e.inverse = string_field(gens[k], "inverse", where);
    if (!by_name.emplace(e.name, k).second) throw SchemaError(where + ": duplicate name '" + e.name + "'");
    entries.push_back(std::move(e));
  }

  std::vector<UnimodularMatrix> elements;
  std::vector<std::string> names;
  std::vector<Letter> pairing;
  std::vector<std::size_t> position(entries.size(), entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const std::string where = "set.generators[" + std::to_string(k) + "]";
    UnimodularMatrix g = [&] {
      try {
        return UnimodularMatrix(entries[k].m, det_tol);
      } catch (const InputError& e) {
        throw InputError(where + " (" + entries[k].name + "): " + e.what());
      }
    }();
    if (!entries[k].inverse) {
      const auto p = static_cast<Letter>(elements.size());
      elements.push_back(g);
      elements.push_back(g.inverse());
      names.push_back(entries[k].name);
      names.push_back(entries[k].name + "^-1");
      pairing.push_back(p + 1);
      pairing.push_back(p);
      continue;
    }
    const auto it = by_name.find(*entries[k].inverse);
    if (it == by_name.end()) throw SchemaError(where + ".inverse: unknown name '" + *entries[k].inverse + "'");
    const std::size_t j = it->second;
    if (!entries[j].inverse || *entries[j].inverse != entries[k].name || j == k) {
      throw SchemaError(where + ".inverse: pairing with '" + entries[j].name + "' is not mutual");
    }
    position[k] = elements.size();
    elements.push_back(g);
    names.push_back(entries[k].name);
    pairing.push_back(0);  // filled below
  }
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (position[k] == entries.size()) continue;
    pairing[position[k]] = static_cast<Letter>(position[by_name.at(*entries[k].inverse)]);
  }
  return SymmetricSet(elements, std::move(pairing), std::move(names));
}

SymmetricSet load_matrix_set(const std::filesystem::path& path, double det_tol) {
  return parse_matrix_set(parse_json(read_file(path), path.string()), det_tol);
}

Json matrix_set_to_json(const SymmetricSet& set) {
  Json doc;
  doc["dimension"] = set.dim();
  Json gens = Json::array();
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Matrix& m = set.matrix(i);
    Json rows = Json::array();
    for (int r = 0; r < m.rows(); ++r) {
      Json row = Json::array();
      for (int c = 0; c < m.cols(); ++c) row.push_back(entry_string(m(r, c)));
      rows.push_back(row);
    }
    Json g;
    g["name"] = set.name(i);
    g["matrix"] = rows;
    g["inverse"] = set.name(set.inverse_index(i));
    gens.push_back(g);
  }
  doc["generators"] = gens;
  return doc;
}

// --- graphs -----------------------------------------------------------------------

GraphOfGroups parse_graph(const Json& doc) {
  GraphOfGroups g;
  const Json& vs = field(doc, "vertices", "graph");
  if (!vs.is_array()) throw SchemaError("graph.vertices: expected an array");
  for (std::size_t k = 0; k < vs.size(); ++k) {
    const std::string where = "graph.vertices[" + std::to_string(k) + "]";
    JsjVertex v;
    v.id = string_field(vs[k], "id", where);
    try {
      v.kind = parse_vertex_kind(string_field(vs[k], "kind", where));
    } catch (const SchemaError&) {
      throw;
    } catch (const InputError& e) {
      throw SchemaError(where + ".kind: " + e.what());
    }
    v.label = optional_string(vs[k], "label", v.id);
    g.vertices.push_back(std::move(v));
  }
  const Json& es = field(doc, "edges", "graph");
  if (!es.is_array()) throw SchemaError("graph.edges: expected an array");
  for (std::size_t k = 0; k < es.size(); ++k) {
    const std::string where = "graph.edges[" + std::to_string(k) + "]";
    JsjEdge e;
    e.from = string_field(es[k], "from", where);
    e.to = string_field(es[k], "to", where);
    e.label = optional_string(es[k], "label", "e" + std::to_string(k + 1));
    e.group = optional_string(es[k], "group", "cyclic");
    g.edges.push_back(std::move(e));
  }
  return g;
}

GraphOfGroups load_graph(const std::filesystem::path& path) {
  return parse_graph(parse_json(read_file(path), path.string()));
}

Json graph_to_json(const GraphOfGroups& graph) {
  Json doc;
  doc["vertices"] = Json::array();
  for (const auto& v : graph.vertices) {
    doc["vertices"].push_back({{"id", v.id}, {"kind", to_string(v.kind)}, {"label", v.label}});
  }
  doc["edges"] = Json::array();
  for (const auto& e : graph.edges) {
    doc["edges"].push_back({{"from", e.from}, {"to", e.to}, {"label", e.label}, {"group", e.group}});
  }
  return doc;
}

RegisteringFile parse_registering(const Json& doc, double det_tol) {
  RegisteringFile f;
  RegisteringSpec& s = f.spec;
  s.cyclic_vertex = string_field(doc, "cyclic_vertex", "spec");
  const int dim = doc.contains("dimension") ? doc["dimension"].get<int>() : -1;
  auto matrix_of = [&](const Json& obj, const std::string& where) -> std::optional<UnimodularMatrix> {
    if (!obj.contains("matrix")) return std::nullopt;
    const Json& m = obj["matrix"];
    const int d = dim > 0 ? dim : static_cast<int>(m.size());
    return UnimodularMatrix(parse_matrix(m, d, where + ".matrix"), det_tol);
  };
  const Json& a0 = field(doc, "a0", "spec");
  s.a0_label = optional_string(a0, "label", "a0");
  s.a0_matrix = matrix_of(a0, "spec.a0");
  const Json& ns = field(doc, "neighbors", "spec");
  if (!ns.is_array()) throw SchemaError("spec.neighbors: expected an array");
  for (std::size_t k = 0; k < ns.size(); ++k) {
    const std::string where = "spec.neighbors[" + std::to_string(k) + "]";
    s.neighbor_vertices.push_back(string_field(ns[k], "vertex", where));
    s.neighbor_labels.push_back(optional_string(ns[k], "label", "g" + std::to_string(k + 1)));
    s.neighbor_matrices.push_back(matrix_of(ns[k], where));
  }
  if (doc.contains("graph")) f.graph = parse_graph(doc["graph"]);
  return f;
}

RegisteringFile load_registering(const std::filesystem::path& path, double det_tol) {
  return parse_registering(parse_json(read_file(path), path.string()), det_tol);
}

// --- configuration ----------------------------------------------------------------

void RunConfig::validate() const {
  for (double t : {tol.det_tol, tol.gap_tol, tol.pos_tol, tol.transv_tol}) {
    if (!(t > 0.0)) throw InputError("tolerances must be positive");
  }
  if (c_eps && !(*c_eps > 0.0 && *c_eps < 1.0)) throw InputError("c_eps must lie in (0, 1)");
  if (max_word_length < 1) throw InputError("max word length must be at least 1");
  if (depth < 1) throw InputError("depth must be at least 1");
  if (n_max < 1) throw InputError("n_max must be at least 1");
}

CertifyOptions RunConfig::certify_options() const {
  CertifyOptions o;
  o.c_eps = c_eps;
  o.word_len = max_word_length;
  o.depth = depth;
  o.pairs = pairs;
  o.seed = seed;
  o.samples = samples;
  o.n_max = n_max;
  o.tol = tol;
  return o;
}

std::optional<double> parse_c_eps(const std::string& s) {
  if (s == "estimate") return std::nullopt;
  const double c = parse_decimal(s, "c_eps");
  if (!(c > 0.0 && c < 1.0)) throw InputError("c_eps must be 'estimate' or a number in (0, 1)");
  return c;
}

RunConfig parse_config(const Json& doc, RunConfig c) {
  if (!doc.is_object()) throw SchemaError("config: expected an object");
  auto num = [&](const char* key, double& out) {
    if (doc.contains(key)) out = parse_entry(doc[key], std::string("config.") + key);
  };
  auto integer = [&](const char* key, auto& out) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number_integer() || doc[key].get<long long>() < 0) {
      throw SchemaError(std::string("config.") + key + ": expected a non-negative integer");
    }
    out = static_cast<std::remove_reference_t<decltype(out)>>(doc[key].get<long long>());
  };
  num("det_tol", c.tol.det_tol);
  num("gap_tol", c.tol.gap_tol);
  num("pos_tol", c.tol.pos_tol);
  num("transv_tol", c.tol.transv_tol);
  if (doc.contains("c_eps")) {
    const Json& v = doc["c_eps"];
    c.c_eps = v.is_string() ? parse_c_eps(v.get<std::string>()) : std::optional<double>(parse_entry(v, "config.c_eps"));
  }
  integer("max_word_length", c.max_word_length);
  integer("depth", c.depth);
  integer("samples", c.samples);
  integer("pairs", c.pairs);
  integer("seed", c.seed);
  integer("n_max", c.n_max);
  c.validate();
  return c;
}

Json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

Json config_to_json(const RunConfig& c) {
  Json j;
  j["det_tol"] = c.tol.det_tol;
  j["gap_tol"] = c.tol.gap_tol;
  j["pos_tol"] = c.tol.pos_tol;
  j["transv_tol"] = c.tol.transv_tol;
  j["c_eps"] = c.c_eps ? Json(*c.c_eps) : Json("estimate");
  j["max_word_length"] = c.max_word_length;
  j["depth"] = c.depth;
  j["samples"] = c.samples;
  j["pairs"] = c.pairs;
  j["seed"] = c.seed;
  j["n_max"] = c.n_max;
  return j;
}

// --- serialization ------------------------------------------------------------------

namespace {

Json vec(const Vector& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}

Json indices(const std::vector<std::size_t>& v) {
  Json a = Json::array();
  for (auto i : v) a.push_back(i);
  return a;
}

Json pair_table(const std::vector<PairEntry>& entries, const SymmetricSet& set) {
  Json a = Json::array();
  for (const auto& e : entries) {
    a.push_back({{"i", set.name(e.i)}, {"j", set.name(e.j)}, {"distance", number(e.distance)}, {"ok", e.ok}});
  }
  return a;
}

}  // namespace

Json word_to_json(const ReducedWord& w, const SymmetricSet& set) {
  return format_word(w, set.names());
}

Json to_json(const WellPositionedVerdict& v) {
  Json j;
  j["ok"] = v.ok;
  j["failure"] = to_string(v.failure);
  j["offending"] = indices(v.offending);
  j["message"] = v.message;
  j["min_attracting_distance"] = number(v.min_attracting_distance);
  j["min_point_hyperplane"] = number(v.min_point_hyperplane);
  return j;
}

Json to_json(const EpsilonProximalCert& c) {
  Json j;
  j["ok"] = c.ok;
  j["failed_condition"] = c.failed_condition;
  j["separation"] = number(c.separation);
  j["separation_margin"] = number(c.separation_margin());
  j["lipschitz"] = {{"method", to_string(c.lipschitz_method)},
                    {"analytic_bound", number(c.analytic_lipschitz)},
                    {"sampled", number(c.sampled_lipschitz)},
                    {"margin", number(c.lipschitz_margin())}};
  j["image_containment"] = {{"method", to_string(c.containment_method)},
                            {"analytic_bound", number(c.analytic_containment)},
                            {"sampled", number(c.sampled_containment)},
                            {"margin", number(c.containment_margin())}};
  j["samples"] = c.samples;
  return j;
}

Json to_json(const SchottkyCertificate& c, const SymmetricSet& set) {
  Json j;
  j["ok"] = c.ok;
  j["epsilon"] = number(c.epsilon);
  j["power"] = c.power;
  j["analytic"] = c.analytic();
  if (!c.failure.empty()) {
    j["failure"] = c.failure;
    j["failing_indices"] = indices(c.failing_indices);
  }
  Json per = Json::array();
  for (std::size_t i = 0; i < c.primal.size(); ++i) {
    per.push_back({{"element", set.name(i)}, {"primal", to_json(c.primal[i])}, {"dual", to_json(c.dual[i])}});
  }
  j["per_element"] = per;
  j["pairwise"] = pair_table(c.pairs, set);
  j["dual_pairwise"] = pair_table(c.dual_pairs, set);
  j["containment_margin"] = number(c.containment_margin);
  return j;
}

Json to_json(const PowerSearchResult& r, const SymmetricSet& set) {
  Json j;
  j["found"] = r.found;
  j["n"] = r.n;
  j["epsilon"] = number(r.epsilon);
  j["c_eps"] = r.c_eps ? Json(*r.c_eps) : Json(nullptr);
  Json attempts = Json::array();
  for (const auto& a : r.attempts) {
    attempts.push_back({{"n", a.n},
                        {"schottky_ok", a.schottky_ok},
                        {"schottky_failure", a.schottky_failure},
                        {"min_alpha1", number(a.min_alpha1)},
                        {"alpha1_margin", number(a.alpha1_margin)},
                        {"worst_lipschitz_margin", number(a.worst_lipschitz_margin)},
                        {"worst_containment_margin", number(a.worst_containment_margin)}});
  }
  j["attempts"] = attempts;
  if (r.found) j["certificate"] = to_json(r.certificate, set);
  return j;
}

Json to_json(const CEstimate& e, const SymmetricSet& set) {
  return {{"value", number(e.value)},
          {"extremal_word", word_to_json(e.extremal_word, set)},
          {"extremal_log_ratio", number(e.extremal_log_ratio)},
          {"words", e.words}};
}

Json to_json(const BenoistReport& r, const SymmetricSet& set) {
  Json j;
  j["ok"] = r.ok;
  j["c_eps"] = number(r.c_eps);
  j["max_word_length"] = r.max_len;
  j["words"] = r.words;
  j["non_proximal"] = r.non_proximal;
  j["first_non_proximal"] = r.first_non_proximal ? word_to_json(*r.first_non_proximal, set) : Json(nullptr);
  j["violations"] = r.violations;
  j["first_violation"] = r.first_violation ? word_to_json(*r.first_violation, set) : Json(nullptr);
  j["worst_margin"] = number(r.worst_margin);
  j["worst_word"] = word_to_json(r.worst_word, set);
  j["extremal_word"] = word_to_json(r.extremal_word, set);
  j["extremal_root"] = number(r.extremal_root);
  j["extremal_violates"] = r.extremal_violates;
  return j;
}

Json to_json(const Alpha1Report& r, const SymmetricSet& set) {
  return {{"ok", r.ok},
          {"hypothesis_ok", r.hypothesis_ok},
          {"hypothesis_margin", number(r.hypothesis_margin)},
          {"words", r.words},
          {"worst_slack", number(r.worst_slack)},
          {"worst_word", word_to_json(r.worst_word, set)}};
}

Json to_json(const TransversalityReport& r, const SymmetricSet& set) {
  return {{"ok", r.ok},
          {"pairs", r.pairs},
          {"depth", r.depth},
          {"tolerance", number(r.tolerance)},
          {"min_singular_value", number(r.min_singular_value)},
          {"min_raw_singular_value", number(r.min_raw_singular_value)},
          {"worst_x", word_to_json(r.worst_x, set)},
          {"worst_y", word_to_json(r.worst_y, set)}};
}

Json to_json(const DynamicsReport& r) {
  Json xi = Json::array();
  Json theta = Json::array();
  for (double d : r.xi_distance) xi.push_back(number(d));
  for (double d : r.theta_distance) theta.push_back(number(d));
  return {{"ok", r.ok},         {"depth", r.depth},           {"bound", number(r.bound)},
          {"xi_distance", xi}, {"theta_distance", theta}, {"worst_margin", number(r.worst_margin)}};
}

Json to_json(const InjectivityReport& r) {
  return {{"ok", r.ok},
          {"core_separation", number(r.core_separation)},
          {"pairs", r.pairs},
          {"worst_continuity_margin", number(r.worst_continuity_margin)},
          {"min_xi_distance", number(r.min_xi_distance)}};
}

Json to_json(const AnosovVerdict& v, const SymmetricSet& set) {
  Json j;
  j["ok"] = v.ok;
  j["grade"] = to_string(v.grade);
  j["failure_stage"] = v.failure_stage;
  j["failure"] = v.failure;
  Json names = Json::array();
  for (auto i : v.failing_indices) names.push_back(i < set.size() ? set.name(i) : std::to_string(i));
  j["failing_elements"] = names;
  j["epsilon"] = number(v.epsilon);
  j["power"] = v.power;
  j["c_eps"] = number(v.c_eps);
  j["c_eps_source"] = v.c_eps_estimated ? "estimated" : "supplied";
  j["conditional_on_c_eps"] = true;
  if (v.c_estimate) j["c_estimate"] = to_json(*v.c_estimate, set);
  j["max_word_length"] = v.word_len;
  j["depth"] = v.depth;
  j["checks"] = {{"benoist", v.benoist_ok},
                 {"alpha1_growth", v.alpha1_growth_ok},
                 {"transversality", v.transversality_ok},
                 {"dynamics", v.dynamics_ok},
                 {"injectivity", v.injectivity_ok}};
  if (v.base) {
    j["ping_pong_base"] = {{"v", vec(v.base->v.rep())},
                           {"w_conormal", vec(v.base->w.conormal().rep())},
                           {"v_margin", number(v.base->v_margin)},
                           {"w_margin", number(v.base->w_margin)},
                           {"perturbations", v.base->attempts}};
  }
  if (v.benoist) j["benoist"] = to_json(*v.benoist, set);
  if (v.alpha1) j["alpha1_growth"] = to_json(*v.alpha1, set);
  if (v.transversality) j["transversality"] = to_json(*v.transversality, set);
  if (v.dynamics) j["dynamics"] = to_json(*v.dynamics);
  if (v.injectivity) j["injectivity"] = to_json(*v.injectivity);
  return j;
}

Json to_json(const JsjVerdict& v) {
  Json j;
  j["valid"] = v.valid;
  Json a = Json::array();
  for (const auto& x : v.violations) {
    a.push_back({{"rule", to_string(x.rule)}, {"citation", citation(x.rule)}, {"where", x.where}});
  }
  j["violations"] = a;
  return j;
}

Json to_json(const TwistGroupModel& m) {
  return {{"cyclic_vertex", m.cyclic_vertex}, {"degree", m.degree}, {"rank", m.rank}, {"generators", m.generators}};
}

}  // namespace anosov
