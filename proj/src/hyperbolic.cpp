#include "moebius/hyperbolic.hpp"

#include <cmath>

#include "moebius/errors.hpp"

namespace moeb::h2 {

double distance(DiskPoint x, DiskPoint y) {
    double num = std::abs(x.z() - y.z());
    double den = std::sqrt((1.0 - x.abs2()) * (1.0 - y.abs2()));
    return 2.0 * std::asinh(num / den);
}

double poisson(DiskPoint x, IdealPoint xi) {
    double d2 = std::norm(x.z() - xi.z());
    return (1.0 - x.abs2()) / d2;
}

double busemann(DiskPoint x, DiskPoint y, IdealPoint xi) {
    return std::log(poisson(y, xi) / poisson(x, xi));
}

double visual(DiskPoint x, IdealPoint xi, IdealPoint eta) {
    double chord = 0.5 * std::abs(xi.z() - eta.z());
    double v = chord * std::sqrt(poisson(x, xi) * poisson(x, eta));
    return std::min(v, 1.0);
}

double gromov(DiskPoint x, IdealPoint xi, IdealPoint eta) {
    if (xi.angle == eta.angle) throw InfiniteGromovProduct();
    double chord = 0.5 * std::abs(xi.z() - eta.z());
    if (chord == 0.0) throw InfiniteGromovProduct();
    return -std::log(chord) - 0.5 * std::log(poisson(x, xi) * poisson(x, eta));
}

Vec2 direction_to_ideal(DiskPoint x, IdealPoint xi) {
    Cx u = to_origin(x, xi.z());
    return Vec2(u / std::abs(u));
}

Vec2 direction_to_point(DiskPoint x, DiskPoint y) {
    Cx w = to_origin(x, y.z());
    return Vec2(w / std::abs(w));
}

UnitTangent ray(DiskPoint x, IdealPoint xi) {
    Vec2 e = direction_to_ideal(x, xi);
    return {x, e * (1.0 / lambda(x))};
}

Flow advance(DiskPoint p, Vec2 e_unit, double t) {
    Cx e = e_unit.z();
    Cx w = std::tanh(0.5 * t) * e;
    Cx zp = from_origin(p, w);
    Cx denom = 1.0 + std::conj(p.z()) * w;
    Cx ep = e / (denom * denom);
    return {DiskPoint(zp), Vec2(ep / std::abs(ep))};
}

DiskPoint geodesic_point(DiskPoint x, IdealPoint xi, double t) {
    return advance(x, direction_to_ideal(x, xi), t).p;
}

IdealPoint ideal_from(DiskPoint p, Vec2 e_unit) {
    Cx xi = from_origin(p, e_unit.z());
    return IdealPoint(std::arg(xi));
}

IdealPoint involution(DiskPoint x, IdealPoint xi) {
    Cx w = to_origin(x, xi.z());
    return IdealPoint(std::arg(from_origin(x, -w)));
}

double angle(DiskPoint x, IdealPoint xi, IdealPoint eta) {
    Cx u = to_origin(x, xi.z());
    Cx v = to_origin(x, eta.z());
    double a = std::abs(std::arg(u * std::conj(v)));
    return a;
}

double distance_derivative(DiskPoint p, Vec2 e_unit, DiskPoint c) {
    return -e_unit.dot(direction_to_point(p, c));
}

namespace {
// cosh of the distance to c along the geodesic is A cosh s + B sinh s.
struct CoshCoeffs {
    double A, B;
};
CoshCoeffs cosh_coeffs(DiskPoint p, Vec2 e_unit, DiskPoint c) {
    double d = distance(p, c);
    double A = std::cosh(d);
    double B = (d == 0.0) ? 0.0 : std::sinh(d) * distance_derivative(p, e_unit, c);
    return {A, B};
}
}  // namespace

std::optional<double> ball_entry(DiskPoint p, Vec2 e_unit, DiskPoint c, double r, double horizon) {
    if (distance(p, c) <= r) return 0.0;
    auto [A, B] = cosh_coeffs(p, e_unit, c);
    double C2 = A * A - B * B;  // >= 1
    double C = std::sqrt(std::max(C2, 1.0));
    double target = std::cosh(r);
    if (C > target) return std::nullopt;
    double s_min = std::atanh(-B / A);
    double half = std::acosh(target / C);
    double entry = s_min - half;
    if (entry <= 0.0 || entry > horizon) return std::nullopt;
    return entry;
}

double ray_min_distance(DiskPoint p, Vec2 e_unit, DiskPoint c) {
    auto [A, B] = cosh_coeffs(p, e_unit, c);
    if (B >= 0.0) return distance(p, c);  // moving away; minimum at s = 0
    double C = std::sqrt(std::max(A * A - B * B, 1.0));
    return std::acosh(C);
}

EuclideanBall ball_in_chart(DiskPoint c, double r) {
    double t = std::tanh(0.5 * r);
    double rho2 = c.abs2();
    double den = 1.0 - rho2 * t * t;
    return {c.z() * ((1.0 - t * t) / den), t * (1.0 - rho2) / den};
}

}  // namespace moeb::h2
