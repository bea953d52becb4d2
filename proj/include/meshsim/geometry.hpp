#pragma once

#include <cmath>

namespace meshsim {

struct Position {
    double x = 0.0;  // meters, in [0, world.width]
    double y = 0.0;  // meters, in [0, world.height]

    friend bool operator==(const Position&, const Position&) = default;
};

struct Velocity {
    double vx = 0.0;  // meters per slot
    double vy = 0.0;

    friend bool operator==(const Velocity&, const Velocity&) = default;
};

inline double speed_of(const Velocity& v) { return std::hypot(v.vx, v.vy); }

/// Euclidean distance.
inline double distance(const Position& a, const Position& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace meshsim
