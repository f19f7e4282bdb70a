#pragma once

#include <array>
#include <numbers>
#include <string_view>
#include <vector>

namespace ddtop::geometry {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Tolerance used when deciding whether a Dubins word applies.
inline constexpr double kFeasibilityTol = 1e-9;

/// Reduces an angle into [0, 2π).
[[nodiscard]] double normalize_angle(double radians);

/// Planar pose. `heading` is kept in [0, 2π) by the constructor.
struct Configuration {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  Configuration() = default;
  Configuration(double x_, double y_, double heading_)
      : x(x_), y(y_), heading(normalize_angle(heading_)) {}
};

/// The six Dubins words, in tie-breaking order.
enum class DubinsWord { LSL, RSR, LSR, RSL, RLR, LRL };

inline constexpr std::array<DubinsWord, 6> kAllWords = {DubinsWord::LSL, DubinsWord::RSR,
                                                        DubinsWord::LSR, DubinsWord::RSL,
                                                        DubinsWord::RLR, DubinsWord::LRL};

[[nodiscard]] std::string_view to_string(DubinsWord word);

/// Segment kind: left arc, right arc, or straight line.
enum class SegmentKind { Left, Right, Straight };

[[nodiscard]] std::array<SegmentKind, 3> segments_of(DubinsWord word);

struct DubinsPath {
  DubinsWord word = DubinsWord::LSL;
  // Arc segments hold turn angles in radians, the straight segment holds a length.
  std::array<double, 3> segment_params{0.0, 0.0, 0.0};
  double rho = 1.0;
  double total_length = 0.0;

  /// Physical length of segment `i`.
  [[nodiscard]] double segment_length(std::size_t i) const;
};

/// Shortest curvature-constrained path from `start` to `end` with turn radius `rho`.
/// Requires rho > 0; ties between words resolve in `kAllWords` order.
[[nodiscard]] DubinsPath shortest_dubins(const Configuration& start, const Configuration& end,
                                         double rho);

/// Closed-form candidate for a single word; false if the word does not apply.
[[nodiscard]] bool dubins_word_candidate(const Configuration& start, const Configuration& end,
                                         double rho, DubinsWord word, DubinsPath& out);

/// Pose reached after travelling `arc_length` along `path` from `start`.
[[nodiscard]] Configuration pose_at(const DubinsPath& path, const Configuration& start,
                                    double arc_length);

/// Poses at arc-length spacing of at most `step`; the first pose is `start` and the
/// last is the endpoint. A zero-length path yields just `start`.
[[nodiscard]] std::vector<Configuration> sample_path(const DubinsPath& path,
                                                     const Configuration& start, double step);

}  // namespace ddtop::geometry
