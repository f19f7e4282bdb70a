#pragma once

#include <cstddef>
#include <istream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddtop/geometry.hpp"

namespace ddtop {

/// Raised for malformed instance input. `line()` is 1-based, or 0 when the
/// problem is not tied to a line.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& what, std::size_t line = 0);
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct Target {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  double score = 0.0;
};

/// Targets are ordered with the source first and the destination last.
struct Instance {
  std::string name;
  std::vector<Target> targets;
  int num_vehicles = 1;
  double length_budget = 0.0;
  double turn_radius = 1.0;
  std::vector<double> headings;

  [[nodiscard]] int num_targets() const { return static_cast<int>(targets.size()); }
  [[nodiscard]] int source() const { return 0; }
  [[nodiscard]] int destination() const { return num_targets() - 1; }
  [[nodiscard]] bool is_terminal(int t) const { return t == source() || t == destination(); }

  /// Throws InputError if an invariant does not hold.
  void validate() const;
};

/// k headings uniformly spaced over [0, 2π), starting at 0. Nested sets (k | k')
/// produce bit-identical shared angles.
[[nodiscard]] std::vector<double> uniform_headings(int k);

/// Values not carried by TOP benchmark files.
struct InstanceOverrides {
  double turn_radius = 1.0;
  int discretizations = 2;
};

/// Parses the TOP benchmark text format: header lines for the target count,
/// vehicle count and budget (`n 21` / `m 2` / `tmax 7.5`, keys case-insensitive,
/// bare numbers accepted), then one `x y score` line per target. Source and
/// destination scores are forced to 0.
[[nodiscard]] Instance parse_top_instance(std::istream& in, const InstanceOverrides& overrides,
                                          std::string name = {});

/// Parses the JSON fixture format documented in docs/formats.md.
[[nodiscard]] Instance parse_json_instance(std::istream& in, std::string name = {});

/// Reads either format from a file, picking JSON when the first non-blank
/// character is '{'. Overrides apply to TOP files, and to JSON files that omit
/// the corresponding fields.
[[nodiscard]] Instance load_instance(const std::string& path, const InstanceOverrides& overrides);

/// Writes an instance in the TOP text format.
void write_top_instance(std::ostream& out, const Instance& instance);

using VertexId = int;

/// Vertex-expanded graph: vertex `t * k + h` is target t entered and left at
/// heading `headings[h]`. Costs are dense over ordered vertex pairs; pairs of the
/// same target hold +infinity.
class DiscretizedGraph {
 public:
  explicit DiscretizedGraph(const Instance& instance);

  [[nodiscard]] const Instance& instance() const { return *instance_; }
  [[nodiscard]] int num_targets() const { return num_targets_; }
  [[nodiscard]] int num_headings() const { return k_; }
  [[nodiscard]] int num_vertices() const { return num_targets_ * k_; }

  [[nodiscard]] VertexId vertex(int target, int heading_index) const {
    return target * k_ + heading_index;
  }
  [[nodiscard]] int target_of(VertexId v) const { return v / k_; }
  [[nodiscard]] int heading_index_of(VertexId v) const { return v % k_; }
  [[nodiscard]] double heading_of(VertexId v) const {
    return instance_->headings[static_cast<std::size_t>(heading_index_of(v))];
  }
  [[nodiscard]] geometry::Configuration configuration(VertexId v) const;

  /// c_pq; +infinity for vertices of the same target.
  [[nodiscard]] double cost(VertexId p, VertexId q) const {
    return cost_[static_cast<std::size_t>(p) * static_cast<std::size_t>(num_vertices()) +
                 static_cast<std::size_t>(q)];
  }
  [[nodiscard]] bool has_edge(VertexId p, VertexId q) const {
    return target_of(p) != target_of(q);
  }

  [[nodiscard]] double score(int target) const {
    return instance_->targets[static_cast<std::size_t>(target)].score;
  }

  /// Minimum cost over all vertex pairs from target a to target b.
  [[nodiscard]] double min_target_cost(int a, int b) const;

 private:
  std::shared_ptr<const Instance> instance_;
  int num_targets_;
  int k_;
  std::vector<double> cost_;
};

/// Builds the discretized graph with Dubins edge costs.
[[nodiscard]] DiscretizedGraph build_graph(const Instance& instance);

}  // namespace ddtop
