#include "ddtop/geometry.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace ddtop::geometry {

namespace {

// Angle reduction that snaps values numerically equal to 2π back to 0, so that
// aligned configurations do not pick up a spurious full loop.
double mod2pi(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r > kTwoPi - kFeasibilityTol) r = 0.0;
  return r;
}

// Normalized inputs shared by the six closed forms (unit turn radius).
struct Normalized {
  double alpha, beta, d;
  double sa, sb, ca, cb, c_ab;
};

Normalized normalize(const Configuration& start, const Configuration& end, double rho) {
  const double dx = end.x - start.x;
  const double dy = end.y - start.y;
  const double dist = std::hypot(dx, dy);
  const double theta = dist > 0.0 ? mod2pi(std::atan2(dy, dx)) : 0.0;
  Normalized n{};
  n.d = dist / rho;
  n.alpha = mod2pi(start.heading - theta);
  n.beta = mod2pi(end.heading - theta);
  n.sa = std::sin(n.alpha);
  n.sb = std::sin(n.beta);
  n.ca = std::cos(n.alpha);
  n.cb = std::cos(n.beta);
  n.c_ab = std::cos(n.alpha - n.beta);
  return n;
}

// Returns false if the word does not apply. Parameters are (arc, straight/arc, arc)
// at unit radius.
bool solve_word(const Normalized& n, DubinsWord word, std::array<double, 3>& p) {
  const double d = n.d;
  switch (word) {
    case DubinsWord::LSL: {
      const double tmp0 = d + n.sa - n.sb;
      double p_sq = 2.0 + d * d - 2.0 * n.c_ab + 2.0 * d * (n.sa - n.sb);
      if (p_sq < -kFeasibilityTol) return false;
      p_sq = std::max(p_sq, 0.0);
      const double tmp1 = std::atan2(n.cb - n.ca, tmp0);
      p = {mod2pi(tmp1 - n.alpha), std::sqrt(p_sq), mod2pi(n.beta - tmp1)};
      return true;
    }
    case DubinsWord::RSR: {
      const double tmp0 = d - n.sa + n.sb;
      double p_sq = 2.0 + d * d - 2.0 * n.c_ab + 2.0 * d * (n.sb - n.sa);
      if (p_sq < -kFeasibilityTol) return false;
      p_sq = std::max(p_sq, 0.0);
      const double tmp1 = std::atan2(n.ca - n.cb, tmp0);
      p = {mod2pi(n.alpha - tmp1), std::sqrt(p_sq), mod2pi(tmp1 - n.beta)};
      return true;
    }
    case DubinsWord::LSR: {
      double p_sq = -2.0 + d * d + 2.0 * n.c_ab + 2.0 * d * (n.sa + n.sb);
      if (p_sq < -kFeasibilityTol) return false;
      p_sq = std::max(p_sq, 0.0);
      const double len = std::sqrt(p_sq);
      const double tmp2 = std::atan2(-n.ca - n.cb, d + n.sa + n.sb) - std::atan2(-2.0, len);
      p = {mod2pi(tmp2 - n.alpha), len, mod2pi(tmp2 - n.beta)};
      return true;
    }
    case DubinsWord::RSL: {
      double p_sq = -2.0 + d * d + 2.0 * n.c_ab - 2.0 * d * (n.sa + n.sb);
      if (p_sq < -kFeasibilityTol) return false;
      p_sq = std::max(p_sq, 0.0);
      const double len = std::sqrt(p_sq);
      const double tmp2 = std::atan2(n.ca + n.cb, d - n.sa - n.sb) - std::atan2(2.0, len);
      p = {mod2pi(n.alpha - tmp2), len, mod2pi(n.beta - tmp2)};
      return true;
    }
    case DubinsWord::RLR: {
      double tmp0 = (6.0 - d * d + 2.0 * n.c_ab + 2.0 * d * (n.sa - n.sb)) / 8.0;
      if (std::abs(tmp0) > 1.0 + kFeasibilityTol) return false;
      tmp0 = std::clamp(tmp0, -1.0, 1.0);
      const double phi = std::atan2(n.ca - n.cb, d - n.sa + n.sb);
      const double mid = mod2pi(kTwoPi - std::acos(tmp0));
      const double t = mod2pi(n.alpha - phi + mod2pi(mid / 2.0));
      p = {t, mid, mod2pi(n.alpha - n.beta - t + mod2pi(mid))};
      return true;
    }
    case DubinsWord::LRL: {
      double tmp0 = (6.0 - d * d + 2.0 * n.c_ab + 2.0 * d * (n.sb - n.sa)) / 8.0;
      if (std::abs(tmp0) > 1.0 + kFeasibilityTol) return false;
      tmp0 = std::clamp(tmp0, -1.0, 1.0);
      const double phi = std::atan2(n.ca - n.cb, d + n.sa - n.sb);
      const double mid = mod2pi(kTwoPi - std::acos(tmp0));
      const double t = mod2pi(-n.alpha - phi + mid / 2.0);
      p = {t, mid, mod2pi(n.beta - n.alpha - t + mod2pi(mid))};
      return true;
    }
  }
  return false;
}

Configuration advance(const Configuration& pose, SegmentKind kind, double length, double rho) {
  const double h = pose.heading;
  switch (kind) {
    case SegmentKind::Straight:
      return {pose.x + length * std::cos(h), pose.y + length * std::sin(h), h};
    case SegmentKind::Left: {
      const double phi = length / rho;
      return {pose.x + rho * (std::sin(h + phi) - std::sin(h)),
              pose.y + rho * (std::cos(h) - std::cos(h + phi)), h + phi};
    }
    case SegmentKind::Right: {
      const double phi = length / rho;
      return {pose.x + rho * (std::sin(h) - std::sin(h - phi)),
              pose.y + rho * (std::cos(h - phi) - std::cos(h)), h - phi};
    }
  }
  return pose;
}

}  // namespace

double normalize_angle(double radians) {
  double r = std::fmod(radians, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

std::string_view to_string(DubinsWord word) {
  switch (word) {
    case DubinsWord::LSL: return "LSL";
    case DubinsWord::RSR: return "RSR";
    case DubinsWord::LSR: return "LSR";
    case DubinsWord::RSL: return "RSL";
    case DubinsWord::RLR: return "RLR";
    case DubinsWord::LRL: return "LRL";
  }
  return "?";
}

std::array<SegmentKind, 3> segments_of(DubinsWord word) {
  using enum SegmentKind;
  switch (word) {
    case DubinsWord::LSL: return {Left, Straight, Left};
    case DubinsWord::RSR: return {Right, Straight, Right};
    case DubinsWord::LSR: return {Left, Straight, Right};
    case DubinsWord::RSL: return {Right, Straight, Left};
    case DubinsWord::RLR: return {Right, Left, Right};
    case DubinsWord::LRL: return {Left, Right, Left};
  }
  return {Straight, Straight, Straight};
}

double DubinsPath::segment_length(std::size_t i) const {
  return segments_of(word)[i] == SegmentKind::Straight ? segment_params[i]
                                                       : rho * segment_params[i];
}

bool dubins_word_candidate(const Configuration& start, const Configuration& end, double rho,
                           DubinsWord word, DubinsPath& out) {
  std::array<double, 3> p{};
  if (!solve_word(normalize(start, end, rho), word, p)) return false;
  out.word = word;
  out.rho = rho;
  const auto kinds = segments_of(word);
  for (std::size_t i = 0; i < 3; ++i)
    out.segment_params[i] = kinds[i] == SegmentKind::Straight ? p[i] * rho : p[i];
  out.total_length = rho * (p[0] + p[1] + p[2]);
  return true;
}

DubinsPath shortest_dubins(const Configuration& start, const Configuration& end, double rho) {
  assert(rho > 0.0);
  DubinsPath best;
  best.rho = rho;

  const double sep = std::hypot(end.x - start.x, end.y - start.y);
  const double dh = std::abs(mod2pi(end.heading - start.heading));
  if (sep < kFeasibilityTol && dh < kFeasibilityTol) return best;

  best.total_length = std::numeric_limits<double>::infinity();
  for (auto word : kAllWords) {
    DubinsPath candidate;
    if (!dubins_word_candidate(start, end, rho, word, candidate)) continue;
    // Near-ties keep the earlier word.
    if (candidate.total_length < best.total_length - 1e-12 * std::max(1.0, best.total_length) ||
        !std::isfinite(best.total_length))
      best = candidate;
  }
  return best;
}

Configuration pose_at(const DubinsPath& path, const Configuration& start, double arc_length) {
  const auto kinds = segments_of(path.word);
  Configuration pose = start;
  double remaining = std::max(arc_length, 0.0);
  for (std::size_t i = 0; i < 3; ++i) {
    const double seg = path.segment_length(i);
    const double take = std::min(seg, remaining);
    pose = advance(pose, kinds[i], take, path.rho);
    remaining -= take;
    if (remaining <= 0.0) break;
  }
  return pose;
}

std::vector<Configuration> sample_path(const DubinsPath& path, const Configuration& start,
                                       double step) {
  assert(step > 0.0);
  if (path.total_length <= 0.0) return {start};
  const auto n = static_cast<std::size_t>(std::ceil(path.total_length / step - 1e-12));
  std::vector<Configuration> poses;
  poses.reserve(n + 1);
  poses.push_back(start);
  for (std::size_t i = 1; i <= n; ++i)
    poses.push_back(pose_at(path, start, path.total_length * static_cast<double>(i) /
                                             static_cast<double>(n)));
  return poses;
}

}  // namespace ddtop::geometry
