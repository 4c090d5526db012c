#pragma once

#include <cmath>
#include <complex>

namespace moeb {

using Cx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Normalize an angle to [0, 2*pi).
inline double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0) a += kTwoPi;
    // fmod can return exactly 2*pi after the correction for tiny negatives
    if (a >= kTwoPi) a -= kTwoPi;
    return a;
}

// Signed angular difference a - b mapped to (-pi, pi].
inline double angle_diff(double a, double b) {
    double d = std::fmod(a - b, kTwoPi);
    if (d <= -kPi) d += kTwoPi;
    if (d > kPi) d -= kTwoPi;
    return d;
}

struct Vec2 {
    double x = 0.0, y = 0.0;
    Vec2() = default;
    Vec2(double xx, double yy) : x(xx), y(yy) {}
    explicit Vec2(Cx z) : x(z.real()), y(z.imag()) {}
    Cx z() const { return {x, y}; }
    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    Vec2 normalized() const {
        double n = norm();
        return {x / n, y / n};
    }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

// A point of the open unit disk (the single chart for the plane).
struct DiskPoint {
    double x = 0.0, y = 0.0;
    DiskPoint() = default;
    DiskPoint(double xx, double yy) : x(xx), y(yy) {}
    explicit DiskPoint(Cx zz) : x(zz.real()), y(zz.imag()) {}
    Cx z() const { return {x, y}; }
    double abs2() const { return x * x + y * y; }
};

// An ideal boundary point, parameterized by its angle on the unit circle.
struct IdealPoint {
    double angle = 0.0;
    IdealPoint() = default;
    explicit IdealPoint(double a) : angle(wrap_angle(a)) {}
    Cx z() const { return {std::cos(angle), std::sin(angle)}; }
};

// Tangent vector of unit length with respect to the active metric.
// `dir` holds Euclidean components in the disk chart.
struct UnitTangent {
    DiskPoint base;
    Vec2 dir;
};

// Symmetric 2x2 metric tensor in disk coordinates.
struct Metric2 {
    double g11 = 1.0, g12 = 0.0, g22 = 1.0;
    double dot(Vec2 u, Vec2 v) const {
        return g11 * u.x * v.x + g12 * (u.x * v.y + u.y * v.x) + g22 * u.y * v.y;
    }
    double norm(Vec2 v) const { return std::sqrt(dot(v, v)); }
    double det() const { return g11 * g22 - g12 * g12; }
};

struct Mat2 {
    // row-major [[a, b], [c, d]]
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
    Vec2 apply(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    Mat2 mul(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    double det() const { return a * d - b * c; }
    Mat2 inverse() const {
        double dt = det();
        return {d / dt, -b / dt, -c / dt, a / dt};
    }
    Mat2 transpose() const { return {a, c, b, d}; }
};

}  // namespace moeb
