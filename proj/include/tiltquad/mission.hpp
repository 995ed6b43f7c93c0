// Waypoint missions: file loading and setpoint scheduling.
//
// Mission file format: one waypoint per line, comma separated,
//   x,y,z,hold_time,acceptance_radius
// in meters/seconds.  Lines starting with '#' and blank lines are ignored.

#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tiltquad/control.hpp"
#include "tiltquad/types.hpp"

namespace tiltquad {

struct Waypoint {
  Vec3 position = Vec3::Zero();  // m, world
  double hold_time = 0.0;        // s
  double acceptance_radius = 0.1;  // m
};

struct Mission {
  std::vector<Waypoint> waypoints;
  double takeoff_altitude = 0.0;  // m; defaults to the first waypoint's z
  bool loop = false;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view token, int line, int field) {
  const std::string_view t = trim(token);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ParseError("invalid number '" + std::string(t) + "'", line, field);
  }
  if (!std::isfinite(value)) {
    throw ParseError("non-finite number '" + std::string(t) + "'", line, field);
  }
  return value;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

inline Mission parse_mission(std::istream& in) {
  Mission mission;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view stripped = detail::trim(line);
    if (stripped.empty() || stripped.front() == '#') {
      continue;
    }
    const auto fields = detail::split(stripped, ',');
    if (fields.size() != 5) {
      throw ParseError("expected 5 fields (x,y,z,hold_time,acceptance_radius), got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    Waypoint wp;
    wp.position.x() = detail::parse_double(fields[0], line_no, 1);
    wp.position.y() = detail::parse_double(fields[1], line_no, 2);
    wp.position.z() = detail::parse_double(fields[2], line_no, 3);
    wp.hold_time = detail::parse_double(fields[3], line_no, 4);
    wp.acceptance_radius = detail::parse_double(fields[4], line_no, 5);
    if (wp.hold_time < 0.0) {
      throw ParseError("hold_time must be >= 0", line_no, 4);
    }
    if (!(wp.acceptance_radius > 0.0)) {
      throw ParseError("acceptance_radius must be > 0", line_no, 5);
    }
    mission.waypoints.push_back(wp);
  }
  if (mission.waypoints.empty()) {
    throw ParseError("no waypoints", line_no);
  }
  mission.takeoff_altitude = mission.waypoints.front().position.z();
  return mission;
}

inline Mission load_mission(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open mission file '" + path + "'", 0);
  }
  return parse_mission(in);
}

// Tracks the active waypoint.  A waypoint is satisfied once the vehicle has
// stayed within its acceptance radius for hold_time continuously; the index
// then advances (or wraps when the mission loops).
class MissionScheduler {
 public:
  explicit MissionScheduler(const Mission& mission) : mission_(mission) {}

  struct Progress {
    size_t waypoint_index = 0;
    bool complete = false;
  };

  // dt is the time since the previous call (0 on the first call).
  Setpoint advance(const VehicleState& state, double dt) {
    const Waypoint& wp = mission_.waypoints[index_];
    const double dist = (state.position - wp.position).norm();
    if (dist <= wp.acceptance_radius) {
      time_in_radius_ += dt;
      if (time_in_radius_ >= wp.hold_time && !complete_) {
        if (index_ + 1 < mission_.waypoints.size()) {
          ++index_;
          time_in_radius_ = 0.0;
        } else if (mission_.loop) {
          index_ = 0;
          time_in_radius_ = 0.0;
        } else {
          complete_ = true;
        }
      }
    } else {
      time_in_radius_ = 0.0;
    }
    Setpoint sp;
    sp.position = mission_.waypoints[index_].position;
    sp.yaw = 0.0;
    return sp;
  }

  Progress progress() const { return {index_, complete_}; }

 private:
  Mission mission_;
  size_t index_ = 0;
  double time_in_radius_ = 0.0;
  bool complete_ = false;
};

}  // namespace tiltquad
