#include "anosov/cli.hpp"

#include "anosov/io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace anosov {

namespace {

struct Flags {
  std::string config_path;
  std::string output;
  std::optional<std::string> c_eps;
  std::optional<int> max_word_length;
  std::optional<int> depth;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> pairs;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> n_max;
  std::optional<double> det_tol;
  std::optional<double> gap_tol;
  std::optional<double> pos_tol;
  std::optional<double> transv_tol;
};

void add_run_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file (overrides $" + std::string(kConfigEnv) + ")");
  cmd->add_option("--output,-o", f.output, "Output file (default: stdout)");
  cmd->add_option("--c-eps", f.c_eps, "C_eps in (0,1) or 'estimate'");
  cmd->add_option("--max-word-length,-L", f.max_word_length, "Word length bound L");
  cmd->add_option("--depth", f.depth, "Limit-map depth");
  cmd->add_option("--samples", f.samples, "Samples per eps-proximality check");
  cmd->add_option("--pairs", f.pairs, "Prefix pairs for transversality and injectivity");
  cmd->add_option("--seed", f.seed, "Random seed");
  cmd->add_option("--n-max", f.n_max, "Largest power tried by the power search");
  cmd->add_option("--det-tol", f.det_tol, "Determinant tolerance");
  cmd->add_option("--gap-tol", f.gap_tol, "Spectral gap tolerance");
  cmd->add_option("--pos-tol", f.pos_tol, "Position tolerance");
  cmd->add_option("--transv-tol", f.transv_tol, "Transversality tolerance");
}

RunConfig resolve_config(const Flags& f) {
  RunConfig c;
  std::string path = f.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv(kConfigEnv)) path = env;
  }
  if (!path.empty()) {
    try {
      c = parse_config(Json::parse(read_file(path)), c);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError(path + ": " + e.what());
    }
  }
  if (f.c_eps) c.c_eps = parse_c_eps(*f.c_eps);
  if (f.max_word_length) c.max_word_length = *f.max_word_length;
  if (f.depth) c.depth = *f.depth;
  if (f.samples) c.samples = *f.samples;
  if (f.pairs) c.pairs = *f.pairs;
  if (f.seed) c.seed = *f.seed;
  if (f.n_max) c.n_max = *f.n_max;
  if (f.det_tol) c.tol.det_tol = *f.det_tol;
  if (f.gap_tol) c.tol.gap_tol = *f.gap_tol;
  if (f.pos_tol) c.tol.pos_tol = *f.pos_tol;
  if (f.transv_tol) c.tol.transv_tol = *f.transv_tol;
  c.validate();
  return c;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_file(path, text);
  }
}

std::string iso_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Json header(const std::string& command, const std::string& input_path, const RunConfig& config) {
  Json j;
  j["tool"] = "anosov-cert";
  j["version"] = kToolVersion;
  j["command"] = command;
  j["input"] = {{"path", input_path}, {"sha256", sha256_hex(read_file(input_path))}};
  j["config"] = config_to_json(config);
  return j;
}

Json timing(const Stopwatch& sw) {
  return {{"seconds", sw.seconds()}, {"timestamp", iso_timestamp()}};
}

int run_certify(const std::string& input, const Flags& flags, std::ostream& out) {
  Stopwatch sw;
  const RunConfig config = resolve_config(flags);
  const SymmetricSet set = load_matrix_set(input, config.tol.det_tol);
  Json doc = header("certify", input, config);
  doc["set"] = {{"dimension", set.dim()}, {"rank", set.rank()}, {"elements", set.names()}};
  doc["well_positioned"] = to_json(check_well_positioned(set, config.tol));
  const AnosovVerdict v = certify_projective_anosov(set, config.certify_options());
  doc["schottky"] = v.schottky ? to_json(*v.schottky, set) : Json(nullptr);
  if (v.search) {
    Json attempts = to_json(*v.search, set)["attempts"];
    doc["power_search"] = {{"found", v.search->found}, {"n", v.power}, {"attempts", attempts}};
  }
  doc["verdict"] = to_json(v, set);
  doc["timing"] = timing(sw);
  emit(doc.dump(2) + "\n", flags.output, out);
  return v.ok ? kExitPass : kExitCertifiedFail;
}

int run_power_search(const std::string& input, const Flags& flags, std::ostream& out) {
  Stopwatch sw;
  const RunConfig config = resolve_config(flags);
  const SymmetricSet set = load_matrix_set(input, config.tol.det_tol);
  Json doc = header("power-search", input, config);
  const WellPositionedVerdict wp = check_well_positioned(set, config.tol);
  doc["well_positioned"] = to_json(wp);
  int code = kExitCertifiedFail;
  if (wp.ok) {
    const PowerSearchResult r =
        power_search(set, config.c_eps, config.n_max, {config.samples, config.seed}, config.tol);
    doc["power_search"] = to_json(r, set);
    code = r.found ? kExitPass : kExitCertifiedFail;
  }
  doc["timing"] = timing(sw);
  emit(doc.dump(2) + "\n", flags.output, out);
  return code;
}

int run_estimate_c(const std::string& input, std::uint64_t power, const Flags& flags, std::ostream& out) {
  Stopwatch sw;
  const RunConfig config = resolve_config(flags);
  const SymmetricSet set = load_matrix_set(input, config.tol.det_tol);
  if (power < 1) throw InputError("power must be at least 1");
  Json doc = header("estimate-c", input, config);
  const SymmetricSet sn = set.power(power);
  doc["power"] = power;
  doc["estimate"] = to_json(estimate_C_epsilon(sn, config.max_word_length), set);
  doc["timing"] = timing(sw);
  emit(doc.dump(2) + "\n", flags.output, out);
  return kExitPass;
}

int run_limit_set(const std::string& input, const Flags& flags, std::ostream& out, std::ostream& err) {
  const RunConfig config = resolve_config(flags);
  const SymmetricSet set = load_matrix_set(input, config.tol.det_tol);
  const WellPositionedVerdict wp = check_well_positioned(set, config.tol);
  if (!wp.ok) {
    err << "limit-set: set is not well-positioned: " << wp.message << "\n";
    return kExitCertifiedFail;
  }
  const PowerSearchResult r = power_search(set, std::nullopt, config.n_max, {config.samples, config.seed}, config.tol);
  if (!r.found) {
    err << "limit-set: no power n <= " << config.n_max << " is eps-Schottky; refusing\n";
    return kExitCertifiedFail;
  }
  const SymmetricSet sn = set.power(r.n);
  const ProximalityBundle bundle = proximality_bundle(sn, config.tol.gap_tol);
  const PingPongBase base = ping_pong_base(sn, bundle, r.epsilon, config.seed);

  std::ostringstream csv;
  csv << std::setprecision(17);
  csv << "word,depth";
  for (int k = 0; k < sn.dim(); ++k) csv << ",xi_" << k;
  csv << ",depth_gap\n";
  for_each_reduced_word(sn.alphabet(), config.max_word_length, [&](std::span<const Letter> w) {
    const ReducedWord prefix = reduce(w, sn.alphabet());
    const LimitMapSample s = limit_map(prefix, sn, base, static_cast<int>(prefix.size()));
    csv << format_word(prefix, set.names()) << "," << s.depth;
    for (int k = 0; k < sn.dim(); ++k) csv << "," << s.xi.rep()(k);
    csv << "," << s.depth_gap << "\n";
  });
  emit(csv.str(), flags.output, out);
  err << "limit-set: power n = " << r.n << ", eps = " << r.epsilon << "\n";
  return kExitPass;
}

int run_jsj_validate(const std::string& path, const std::string& output, std::ostream& out) {
  const GraphOfGroups graph = load_graph(path);
  Json doc;
  doc["tool"] = "anosov-cert";
  doc["version"] = kToolVersion;
  doc["command"] = "jsj-validate";
  doc["input"] = {{"path", path}, {"sha256", sha256_hex(read_file(path))}};
  const JsjVerdict v = validate_jsj(graph);
  doc["verdict"] = to_json(v);
  Json twists = Json::array();
  for (const auto& vertex : graph.vertices) {
    if (vertex.kind == VertexKind::Cyclic) twists.push_back(to_json(twist_group(graph, vertex.id)));
  }
  doc["twist_groups"] = twists;
  emit(doc.dump(2) + "\n", output, out);
  return v.valid ? kExitPass : kExitCertifiedFail;
}

int run_register(const std::string& path, const Flags& flags, std::ostream& out) {
  Stopwatch sw;
  const RunConfig config = resolve_config(flags);
  const RegisteringFile file = load_registering(path, config.tol.det_tol);
  check_registering_spec(file.spec, file.graph ? &*file.graph : nullptr);
  Json doc = header("register", path, config);
  if (file.graph) {
    const JsjVerdict jv = validate_jsj(*file.graph);
    doc["graph"] = to_json(jv);
    doc["twist_group"] = to_json(twist_group(*file.graph, file.spec.cyclic_vertex));
  }
  const RegisteringReport r = certify_registering(file.spec, config.certify_options());
  std::vector<std::string> names{file.spec.a0_label};
  names.insert(names.end(), file.spec.neighbor_labels.begin(), file.spec.neighbor_labels.end());
  std::vector<UnimodularMatrix> gens{*file.spec.a0_matrix};
  for (const auto& m : file.spec.neighbor_matrices) gens.push_back(*m);
  const SymmetricSet set = SymmetricSet::from_generators(gens, names);
  doc["registering"] = {{"ok", r.ok},
                        {"cyclic_vertex", file.spec.cyclic_vertex},
                        {"power", r.power},
                        {"subgroup_generators", r.subgroup_generators}};
  doc["verdict"] = to_json(r.verdict, set);
  doc["timing"] = timing(sw);
  emit(doc.dump(2) + "\n", flags.output, out);
  return r.ok ? kExitPass : kExitCertifiedFail;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certify projective Anosov Schottky groups in SL(d, R)", "anosov-cert"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  std::string input;
  std::string graph_path;
  std::string spec_path;
  std::uint64_t power = 1;
  Flags flags;

  auto* certify = app.add_subcommand("certify", "Run the full certification and write a certificate");
  certify->add_option("--input,-i", input, "Matrix set JSON")->required();
  add_run_flags(certify, flags);

  auto* search = app.add_subcommand("power-search", "Find the least power n with S^n eps-Schottky");
  search->add_option("--input,-i", input, "Matrix set JSON")->required();
  add_run_flags(search, flags);

  auto* limit = app.add_subcommand("limit-set", "Write limit-map samples for all prefixes as CSV");
  limit->add_option("--input,-i", input, "Matrix set JSON")->required();
  add_run_flags(limit, flags);

  auto* estimate = app.add_subcommand("estimate-c", "Estimate C_eps from the words of length <= L");
  estimate->add_option("--input,-i", input, "Matrix set JSON")->required();
  estimate->add_option("--power", power, "Evaluate on S^n");
  add_run_flags(estimate, flags);

  auto* jsj = app.add_subcommand("jsj-validate", "Validate a JSJ graph of groups");
  jsj->add_option("--graph,-g", graph_path, "Graph JSON")->required();
  jsj->add_option("--output,-o", flags.output, "Output file (default: stdout)");

  auto* reg = app.add_subcommand("register", "Certify a registering subgroup of a cyclic vertex");
  reg->add_option("--spec,-s", spec_path, "Registering spec JSON")->required();
  add_run_flags(reg, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitError;
  }

  try {
    if (*certify) return run_certify(input, flags, out);
    if (*search) return run_power_search(input, flags, out);
    if (*limit) return run_limit_set(input, flags, out, err);
    if (*estimate) return run_estimate_c(input, power, flags, out);
    if (*jsj) return run_jsj_validate(graph_path, flags.output, out);
    if (*reg) return run_register(spec_path, flags, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const CertificationError& e) {
    err << "certification failed at " << e.stage() << ": " << e.what() << "\n";
    return kExitCertifiedFail;
  } catch (const ComputationError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace anosov
