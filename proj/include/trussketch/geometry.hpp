#pragma once

#include <cmath>
#include <cstdint>

namespace trussketch {

struct Point2i {
    int x = 0;
    int y = 0;
    friend bool operator==(const Point2i&, const Point2i&) = default;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    Vec2 normalized() const {
        double n = norm();
        return n > 0 ? Vec2{x / n, y / n} : Vec2{0, 0};
    }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double d) { return d * kPi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }

/// Wraps an angle into [0, 360).
inline double wrap_deg_360(double d) {
    double r = std::fmod(d, 360.0);
    if (r < 0) r += 360.0;
    return r;
}

/// Wraps an angle into [0, 180) for undirected lines.
inline double wrap_deg_180(double d) {
    double r = std::fmod(d, 180.0);
    if (r < 0) r += 180.0;
    return r;
}

/// Absolute difference between two directed angles, in [0, 180].
inline double angle_diff_deg(double a, double b) {
    double d = std::fabs(wrap_deg_360(a) - wrap_deg_360(b));
    return d > 180.0 ? 360.0 - d : d;
}

/// Absolute difference between two undirected line angles, in [0, 90].
inline double line_angle_diff_deg(double a, double b) {
    double d = std::fabs(wrap_deg_180(a) - wrap_deg_180(b));
    return d > 90.0 ? 180.0 - d : d;
}

/// Deterministic RNG used by generators. Wraps the 64-bit Mersenne engine
/// with explicit range arithmetic so sequences do not depend on the
/// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next() % span);
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) {
        double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    }

    bool chance(double p) { return uniform(0.0, 1.0) < p; }

private:
    std::uint64_t state_;
};

}  // namespace trussketch
