#include "ddtop/instance.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "ddtop/target_set.hpp"

namespace ddtop {

InputError::InputError(const std::string& what, std::size_t line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

void Instance::validate() const {
  if (targets.size() < 2) throw InputError("instance needs at least 2 targets (source and destination)");
  if (targets.size() > TargetSet::kCapacity)
    throw InputError("instance has " + std::to_string(targets.size()) + " targets; at most " +
                     std::to_string(TargetSet::kCapacity) + " are supported");
  if (num_vehicles < 1) throw InputError("vehicle count must be at least 1");
  if (!(length_budget > 0.0) || !std::isfinite(length_budget))
    throw InputError("length budget must be positive");
  if (!(turn_radius > 0.0) || !std::isfinite(turn_radius))
    throw InputError("turn radius must be positive");
  if (headings.empty()) throw InputError("heading set must be nonempty");
  for (std::size_t i = 0; i < headings.size(); ++i) {
    if (!(headings[i] >= 0.0 && headings[i] < geometry::kTwoPi))
      throw InputError("headings must lie in [0, 2pi)");
    if (i > 0 && !(headings[i] > headings[i - 1]))
      throw InputError("headings must be strictly increasing");
  }
  for (const auto& t : targets) {
    if (!(t.score >= 0.0) || !std::isfinite(t.score))
      throw InputError("target " + std::to_string(t.id) + " has a negative score");
    if (!std::isfinite(t.x) || !std::isfinite(t.y))
      throw InputError("target " + std::to_string(t.id) + " has non-finite coordinates");
  }
  if (targets.front().score != 0.0 || targets.back().score != 0.0)
    throw InputError("source and destination must have zero score");
}

std::vector<double> uniform_headings(int k) {
  if (k < 1) throw InputError("number of discretizations must be at least 1");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(k));
  // (2i/k)·π keeps shared angles of nested sets identical, e.g. π for k = 2, 4, 6.
  for (int i = 0; i < k; ++i) out.push_back((2.0 * i / k) * std::numbers::pi);
  return out;
}

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

double to_double(const std::string& token, std::size_t line, const char* what) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v))
    throw InputError(std::string("non-numeric ") + what + " '" + token + "'", line);
  return v;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Header line: "key value" with an expected key, or a bare value.
double header_value(const std::string& line, std::size_t lineno, const char* key) {
  auto tokens = split_ws(line);
  if (tokens.size() == 1) return to_double(tokens[0], lineno, key);
  if (tokens.size() == 2 && lower(tokens[0]) == key) return to_double(tokens[1], lineno, key);
  throw InputError(std::string("malformed header, expected '") + key + " <value>'", lineno);
}

}  // namespace

Instance parse_top_instance(std::istream& in, const InstanceOverrides& overrides, std::string name) {
  Instance inst;
  inst.name = std::move(name);
  inst.turn_radius = overrides.turn_radius;
  inst.headings = uniform_headings(overrides.discretizations);

  std::vector<std::pair<std::size_t, std::string>> lines;
  std::size_t lineno = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    auto t = trim(raw);
    if (!t.empty()) lines.emplace_back(lineno, std::move(t));
  }
  if (lines.size() < 3) throw InputError("missing header: expected n, m and tmax lines", lineno + 1);

  const double n_raw = header_value(lines[0].second, lines[0].first, "n");
  const double m_raw = header_value(lines[1].second, lines[1].first, "m");
  const double tmax = header_value(lines[2].second, lines[2].first, "tmax");
  if (n_raw != std::floor(n_raw) || n_raw < 0)
    throw InputError("target count must be a nonnegative integer", lines[0].first);
  if (m_raw != std::floor(m_raw) || m_raw < 1)
    throw InputError("vehicle count must be a positive integer", lines[1].first);
  if (!(tmax > 0.0)) throw InputError("budget must be positive", lines[2].first);
  const auto n = static_cast<std::size_t>(n_raw);
  if (n < 2) throw InputError("instance needs at least 2 targets", lines[0].first);

  inst.num_vehicles = static_cast<int>(m_raw);
  inst.length_budget = tmax;

  if (lines.size() - 3 < n)
    throw InputError("expected " + std::to_string(n) + " target lines, found " +
                         std::to_string(lines.size() - 3),
                     lineno + 1);
  if (lines.size() - 3 > n)
    throw InputError("unexpected trailing content after " + std::to_string(n) + " targets",
                     lines[3 + n].first);

  for (std::size_t i = 0; i < n; ++i) {
    const auto& [ln, text] = lines[3 + i];
    auto tok = split_ws(text);
    if (tok.size() != 3) throw InputError("target line must hold 'x y score'", ln);
    Target t;
    t.id = static_cast<int>(i);
    t.x = to_double(tok[0], ln, "x-coordinate");
    t.y = to_double(tok[1], ln, "y-coordinate");
    t.score = to_double(tok[2], ln, "score");
    if (t.score < 0.0) throw InputError("negative score", ln);
    inst.targets.push_back(t);
  }
  inst.targets.front().score = 0.0;
  inst.targets.back().score = 0.0;
  inst.validate();
  return inst;
}

Instance parse_json_instance(std::istream& in, std::string name) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
  Instance inst;
  inst.name = doc.value("name", std::move(name));
  try {
    inst.num_vehicles = doc.at("num_vehicles").get<int>();
    inst.length_budget = doc.at("length_budget").get<double>();
    inst.turn_radius = doc.value("turn_radius", 1.0);
    if (doc.contains("headings")) {
      inst.headings = doc.at("headings").get<std::vector<double>>();
    } else {
      inst.headings = uniform_headings(doc.value("discretizations", 2));
    }
    int id = 0;
    for (const auto& jt : doc.at("targets")) {
      Target t;
      t.id = id++;
      t.x = jt.at("x").get<double>();
      t.y = jt.at("y").get<double>();
      t.score = jt.value("score", 0.0);
      inst.targets.push_back(t);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed instance document: ") + e.what());
  }
  if (!inst.targets.empty()) {
    inst.targets.front().score = 0.0;
    inst.targets.back().score = 0.0;
  }
  inst.validate();
  return inst;
}

Instance load_instance(const std::string& path, const InstanceOverrides& overrides) {
  std::ifstream file(path);
  if (!file) throw std::ios_base::failure("cannot open instance file '" + path + "'");
  auto slash = path.find_last_of('/');
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);

  char first = 0;
  while (file.get(first) && std::isspace(static_cast<unsigned char>(first))) {
  }
  file.clear();
  file.seekg(0);
  if (first == '{') {
    std::stringstream buf;
    buf << file.rdbuf();
    auto doc = nlohmann::json::parse(buf.str(), nullptr, false);
    if (doc.is_discarded()) throw InputError("invalid JSON instance");
    // Fields absent from the document fall back to the overrides.
    if (!doc.contains("turn_radius")) doc["turn_radius"] = overrides.turn_radius;
    if (!doc.contains("headings") && !doc.contains("discretizations"))
      doc["discretizations"] = overrides.discretizations;
    std::istringstream again(doc.dump());
    return parse_json_instance(again, name);
  }
  return parse_top_instance(file, overrides, name);
}

void write_top_instance(std::ostream& out, const Instance& instance) {
  out.precision(17);
  out << "n " << instance.targets.size() << "\n";
  out << "m " << instance.num_vehicles << "\n";
  out << "tmax " << instance.length_budget << "\n";
  for (const auto& t : instance.targets) out << t.x << "\t" << t.y << "\t" << t.score << "\n";
}

DiscretizedGraph::DiscretizedGraph(const Instance& instance)
    : instance_(std::make_shared<const Instance>(instance)),
      num_targets_(instance.num_targets()),
      k_(static_cast<int>(instance.headings.size())) {
  const auto nv = static_cast<std::size_t>(num_vertices());
  cost_.assign(nv * nv, std::numeric_limits<double>::infinity());
  for (VertexId p = 0; p < num_vertices(); ++p) {
    const auto from = configuration(p);
    for (VertexId q = 0; q < num_vertices(); ++q) {
      if (!has_edge(p, q)) continue;
      cost_[static_cast<std::size_t>(p) * nv + static_cast<std::size_t>(q)] =
          geometry::shortest_dubins(from, configuration(q), instance.turn_radius).total_length;
    }
  }
}

geometry::Configuration DiscretizedGraph::configuration(VertexId v) const {
  const auto& t = instance_->targets[static_cast<std::size_t>(target_of(v))];
  return {t.x, t.y, heading_of(v)};
}

double DiscretizedGraph::min_target_cost(int a, int b) const {
  double best = std::numeric_limits<double>::infinity();
  for (int h = 0; h < k_; ++h)
    for (int g = 0; g < k_; ++g) best = std::min(best, cost(vertex(a, h), vertex(b, g)));
  return best;
}

DiscretizedGraph build_graph(const Instance& instance) {
  instance.validate();
  return DiscretizedGraph(instance);
}

}  // namespace ddtop
