#include "ddtop/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <ios>
#include <json.hpp>
#include <map>
#include <sstream>

#include "ddtop/oracle.hpp"

namespace ddtop::cli {

using Json = nlohmann::ordered_json;

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Solve:
      return "solve";
    case Mode::Oracle:
      return "oracle";
    case Mode::GeometryExport:
      return "geometry-export";
  }
  return "solve";
}

std::string RunConfig::validate() const {
  if (instance_path.empty()) return "--instance is required";
  if (discretizations && *discretizations < 1) return "--discretizations must be at least 1";
  if (turn_radius && !(*turn_radius > 0.0)) return "--turn-radius must be positive";
  if (!(time_limit_seconds > 0.0)) return "--time-limit must be positive";
  if (workers < 1) return "--workers must be positive";
  if (!(big_m > 0.0)) return "--big-m must be positive";
  if (max_paths < 1) return "--max-paths must be positive";
  return {};
}

Instance load_configured_instance(const RunConfig& config) {
  InstanceOverrides overrides;
  if (config.turn_radius) overrides.turn_radius = *config.turn_radius;
  if (config.discretizations) overrides.discretizations = *config.discretizations;
  Instance inst = load_instance(config.instance_path, overrides);
  if (config.turn_radius) inst.turn_radius = *config.turn_radius;
  if (config.discretizations) inst.headings = uniform_headings(*config.discretizations);
  inst.validate();
  return inst;
}

namespace {

Json config_echo(const Instance& inst, const RunConfig& config) {
  Json c;
  c["instance"] = config.instance_path;
  c["mode"] = to_string(config.mode);
  c["discretizations"] = inst.headings.size();
  c["turn_radius"] = inst.turn_radius;
  c["time_limit"] = config.time_limit_seconds;
  c["workers"] = config.workers;
  c["big_m"] = config.big_m;
  c["max_paths"] = config.max_paths;
  return c;
}

Json instance_summary(const Instance& inst) {
  Json s;
  s["name"] = inst.name;
  s["num_targets"] = inst.num_targets();
  s["num_vehicles"] = inst.num_vehicles;
  s["length_budget"] = inst.length_budget;
  s["headings"] = inst.headings;
  return s;
}

Json route_json(const DiscretizedGraph& graph, const std::vector<int>& targets,
                const std::vector<VertexId>& vertices, double length, double score) {
  Json r;
  r["targets"] = targets;
  Json headings = Json::array();
  for (VertexId v : vertices) headings.push_back(graph.heading_of(v));
  r["headings"] = headings;
  r["vertices"] = vertices;
  r["length"] = length;
  r["score"] = score;
  return r;
}

Json polyline(const DiscretizedGraph& graph, const std::vector<VertexId>& vertices) {
  Json points = Json::array();
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    const auto a = graph.configuration(vertices[i]);
    const auto b = graph.configuration(vertices[i + 1]);
    const auto path = geometry::shortest_dubins(a, b, graph.instance().turn_radius);
    auto poses = geometry::sample_path(path, a, kPolylineStep);
    // Each leg starts where the previous one ended.
    for (std::size_t j = (i == 0 ? 0 : 1); j < poses.size(); ++j)
      points.push_back(Json::array({poses[j].x, poses[j].y}));
  }
  if (vertices.size() == 1) {
    const auto a = graph.configuration(vertices[0]);
    points.push_back(Json::array({a.x, a.y}));
  }
  return points;
}

void write_report(const std::string& text, const RunConfig& config, std::ostream& out) {
  if (config.output_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(config.output_path);
  if (!file) throw std::ios_base::failure("cannot write report file '" + config.output_path + "'");
  file << text;
}

std::string solve_report_impl(const DiscretizedGraph& graph, const search::Solution& solution,
                              const RunConfig& config, bool with_polylines) {
  const auto& inst = graph.instance();
  const auto& st = solution.stats;
  Json doc;
  doc["status"] = search::to_string(st.status);
  doc["opt"] = solution.incumbent.objective;
  doc["rub"] = st.root_bound;
  doc["bound"] = solution.bound;
  doc["nn"] = st.nodes;
  if (!config.omit_timing) doc["time"] = st.wall_seconds;
  doc["max_concurrent"] = st.max_concurrent;
  doc["integralized_nodes"] = st.integralized_nodes;
  doc["integralization_failures"] = st.integralization_failures;
  Json routes = Json::array();
  for (const auto& r : solution.incumbent.routes) {
    Json rj = route_json(graph, r.targets, r.vertices, r.length, r.score);
    if (with_polylines) rj["polyline"] = polyline(graph, r.vertices);
    routes.push_back(std::move(rj));
  }
  doc["routes"] = std::move(routes);
  doc["instance"] = instance_summary(inst);
  doc["config"] = config_echo(inst, config);
  return doc.dump(2) + "\n";
}

}  // namespace

std::string solve_report(const DiscretizedGraph& graph, const search::Solution& solution,
                         const RunConfig& config) {
  return solve_report_impl(graph, solution, config, config.mode == Mode::GeometryExport);
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (auto problem = config.validate(); !problem.empty()) {
    err << "error: " << problem << "\n";
    return kExitInvalidFlags;
  }
  Instance inst;
  try {
    inst = load_configured_instance(config);
  } catch (const InputError& e) {
    err << "error: malformed instance: " << e.what() << "\n";
    return kExitMalformedInstance;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << "\n";
    return kExitUnreadableFile;
  }
  const DiscretizedGraph graph = build_graph(inst);

  try {
    if (config.mode == Mode::Oracle) {
      oracle::OracleResult res;
      try {
        res = oracle::enumerate_dtop(graph, inst.num_vehicles, inst.length_budget);
      } catch (const oracle::SizeGuardError&) {
        err << "error: oracle mode needs at most " << oracle::kMaxTargets << " non-terminal targets and "
            << oracle::kMaxHeadings << " headings\n";
        return kExitInvalidFlags;
      }
      Json doc;
      doc["status"] = "optimal";
      doc["opt"] = res.objective;
      doc["enumerated"] = res.enumerated;
      Json routes = Json::array();
      for (const auto& r : res.routes) routes.push_back(route_json(graph, r.targets, r.vertices, r.length, r.score));
      doc["routes"] = std::move(routes);
      doc["instance"] = instance_summary(inst);
      doc["config"] = config_echo(inst, config);
      write_report(doc.dump(2) + "\n", config, out);
      return kExitOptimal;
    }

    search::SolveParams params;
    params.workers = config.workers;
    params.time_limit_seconds = config.time_limit_seconds;
    params.big_m = config.big_m;
    params.max_paths = config.max_paths;
    const auto solution = search::solve(graph, params);
    write_report(solve_report(graph, solution, config), config, out);
    return solution.stats.status == search::Status::Optimal ? kExitOptimal : kExitTimeLimit;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << "\n";
    return kExitUnreadableFile;
  }
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact branch-and-price solver for the discretized Dubins team orienteering problem"};
  RunConfig config;
  int k = 0;
  double rho = 0.0;
  std::string mode = "solve";
  app.add_option("--instance", config.instance_path, "Instance file (TOP text or JSON)")->required();
  auto* k_opt = app.add_option("--discretizations", k, "Headings per target (default 2)");
  auto* rho_opt = app.add_option("--turn-radius", rho, "Minimum turn radius (default 1)");
  app.add_option("--time-limit", config.time_limit_seconds, "Wall-clock limit in seconds")->capture_default_str();
  app.add_option("--workers", config.workers, "Concurrent node workers")->capture_default_str();
  app.add_option("--big-m", config.big_m, "Penalty on the artificial column")->capture_default_str();
  app.add_option("--max-paths", config.max_paths, "Join-phase route cap per pricing call")->capture_default_str();
  app.add_option("--output", config.output_path, "Report path (default: standard output)");
  app.add_option("--mode", mode, "solve | oracle | geometry-export")
      ->check(CLI::IsMember({"solve", "oracle", "geometry-export"}))
      ->capture_default_str();
  app.add_flag("--omit-timing", config.omit_timing, "Leave wall-clock time out of the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOptimal;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return kExitOptimal;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidFlags;
  }
  if (k_opt->count() > 0) config.discretizations = k;
  if (rho_opt->count() > 0) config.turn_radius = rho;
  static const std::map<std::string, Mode> kModes{
      {"solve", Mode::Solve}, {"oracle", Mode::Oracle}, {"geometry-export", Mode::GeometryExport}};
  config.mode = kModes.at(mode);
  return run(config, out, err);
}

}  // namespace ddtop::cli
