#pragma once

#include <cmath>

namespace geosketch {

/// Map-plane point or vector in meters (x easting, y northing).
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

using Vector2 = Point2;

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vector2 a, Vector2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vector2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Axis-aligned rectangle.
struct Bounds {
    Point2 min;
    Point2 max;

    double width() const { return max.x - min.x; }
    double height() const { return max.y - min.y; }
    double diagonal() const { return std::hypot(width(), height()); }
    bool contains(Point2 p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
    }

    friend bool operator==(const Bounds&, const Bounds&) = default;
};

/// Euclidean distance from p to the closed segment [a, b].
inline double point_segment_distance(Point2 p, Point2 a, Point2 b) {
    const Vector2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) {
        return distance(p, a);
    }
    double t = dot(p - a, ab) / len2;
    t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
    return distance(p, a + t * ab);
}

/// Unit vector for a compass azimuth in degrees, clockwise from +y (north).
inline Vector2 azimuth_direction(double azimuth_deg) {
    const double rad = azimuth_deg * (M_PI / 180.0);
    return {std::sin(rad), std::cos(rad)};
}

}  // namespace geosketch
