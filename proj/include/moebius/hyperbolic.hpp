#pragma once

// Closed-form model of the curvature -1 plane in the unit-disk chart.
// These expressions are the authority for every limit-based quantity; the
// truncated-limit evaluators of the deformed space are checked against them.

#include <optional>

#include "moebius/geometry.hpp"

namespace moeb::h2 {

// Conformal factor: the metric is lambda(z)^2 (dx^2 + dy^2).
inline double lambda(DiskPoint p) { return 2.0 / (1.0 - p.abs2()); }

// Disk automorphism sending c to the origin, with positive real derivative
// at c (so Euclidean directions at c are unchanged at the origin).
inline Cx to_origin(DiskPoint c, Cx z) { return (z - c.z()) / (1.0 - std::conj(c.z()) * z); }
inline Cx from_origin(DiskPoint c, Cx w) { return (w + c.z()) / (1.0 + std::conj(c.z()) * w); }

double distance(DiskPoint x, DiskPoint y);

// Poisson kernel (1 - |x|^2) / |x - xi|^2.
double poisson(DiskPoint x, IdealPoint xi);

// B(x, y, xi) = lim_{z -> xi} d(x, z) - d(y, z).
double busemann(DiskPoint x, DiskPoint y, IdealPoint xi);

double gromov(DiskPoint x, IdealPoint xi, IdealPoint eta);

// Visual metric rho_x(xi, eta) = exp(-(xi|eta)_x), values in (0, 1].
double visual(DiskPoint x, IdealPoint xi, IdealPoint eta);

// Unit tangent at x pointing along the geodesic ray [x, xi).
UnitTangent ray(DiskPoint x, IdealPoint xi);

// Euclidean unit direction at x toward xi (metric-unit up to the conformal factor).
Vec2 direction_to_ideal(DiskPoint x, IdealPoint xi);

// Euclidean unit direction at x along the geodesic toward the point y != x.
Vec2 direction_to_point(DiskPoint x, DiskPoint y);

DiskPoint geodesic_point(DiskPoint x, IdealPoint xi, double t);

// Other ideal endpoint of the geodesic through x and xi.
IdealPoint involution(DiskPoint x, IdealPoint xi);

// Riemannian angle at x between the rays [x, xi) and [x, eta), in [0, pi].
double angle(DiskPoint x, IdealPoint xi, IdealPoint eta);

// Advance along the geodesic from p with Euclidean unit direction e by
// arclength t; returns the new point and new Euclidean unit direction.
struct Flow {
    DiskPoint p;
    Vec2 e;  // Euclidean unit
};
Flow advance(DiskPoint p, Vec2 e_unit, double t);

// Ideal endpoint of the ray from p with Euclidean unit direction e.
IdealPoint ideal_from(DiskPoint p, Vec2 e_unit);

// Derivative at t = 0 of t -> d(advance(p, e, t).p, c).
double distance_derivative(DiskPoint p, Vec2 e_unit, DiskPoint c);

// Smallest t in (0, horizon] at which the geodesic from p with direction e
// enters the closed ball of hyperbolic radius r about c; nullopt if it
// stays outside. Returns 0 when p starts inside.
std::optional<double> ball_entry(DiskPoint p, Vec2 e_unit, DiskPoint c, double r, double horizon);

// Closest approach (hyperbolic) of the full forward ray from p to c.
double ray_min_distance(DiskPoint p, Vec2 e_unit, DiskPoint c);

// Euclidean center/radius of the hyperbolic ball B(c, r).
struct EuclideanBall {
    Cx center;
    double radius;
};
EuclideanBall ball_in_chart(DiskPoint c, double r);

}  // namespace moeb::h2
