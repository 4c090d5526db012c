#pragma once

// The deformed plane (X, g1) with g1 = g0 outside a compact set: metric
// fields, geodesic shooting and boundary-value solves, ideal endpoints and
// the truncated-limit Busemann/Gromov/visual quantities.
//
// Geodesics are traced in a hybrid fashion: closed-form advance wherever the
// metric is exactly the base hyperbolic metric, adaptive Runge-Kutta only
// across the deformation support. Distances between far-out truncation
// points therefore cost one short numerical crossing at most.

#include <iosfwd>
#include <optional>
#include <vector>

#include "moebius/boundary.hpp"
#include "moebius/geometry.hpp"

namespace moeb {

enum class FieldKind { pure, conformal_bump, pullback_twist };

struct MetricJet {
    Metric2 g;
    Metric2 dgx;  // d g_ij / dx
    Metric2 dgy;  // d g_ij / dy
};

// Compactly supported twist diffeomorphism about a center: in geodesic polar
// coordinates (r, theta), psi(r, theta) = (r, theta + alpha(r)) with alpha a
// smoothstep profile vanishing for r >= radius. The pushforward of the base
// metric by psi is the pullback_twist field; psi is then an isometry from
// (X, g0) to (X, g1) equal to the identity outside the support.
struct TwistMap {
    DiskPoint center;
    double radius = 1.0;
    double alpha0 = 0.0;
    int order = 3;

    DiskPoint apply(DiskPoint p) const;
    DiskPoint inverse(DiskPoint p) const;
    Mat2 jacobian(DiskPoint p) const;  // d(apply) in disk coordinates

    double alpha(double r) const;
    double alpha_prime(double r) const;
};

class MetricField {
  public:
    static MetricField pure();
    static MetricField conformal_bump(DiskPoint center, double radius, double amplitude, int order = 3);
    static MetricField pullback_twist(DiskPoint center, double radius, double alpha0, int order = 3);

    FieldKind kind() const { return kind_; }
    DiskPoint center() const { return center_; }
    double support_radius() const { return radius_; }
    double amplitude() const { return amplitude_; }
    int order() const { return order_; }
    bool deformed() const { return kind_ != FieldKind::pure && amplitude_ != 0.0; }

    Metric2 metric(DiskPoint p) const;
    MetricJet jet(DiskPoint p) const;

    // Gaussian curvature: closed form for pure/conformal kinds, the exact
    // pushforward value (-1) for the twist.
    double curvature(DiskPoint p) const;
    // Brioschi formula on finite differences of metric(); validation path.
    double curvature_numeric(DiskPoint p, double h = 1e-2) const;

    const TwistMap& twist() const;

  private:
    FieldKind kind_ = FieldKind::pure;
    DiskPoint center_;
    double radius_ = 0.0;
    double amplitude_ = 0.0;
    int order_ = 3;
    TwistMap twist_;

    double bump(double r) const;        // conformal exponent u(r)
    double bump_prime(double r) const;  // du/dr
};

struct SpaceOptions {
    double ode_tol = 1e-10;
    double bvp_tol = 1e-7;
    double r_max = 25.0;       // truncation radius for boundary limits
    double limit_tol = 1e-7;   // Cauchy stopping tolerance for limits
    double limit_t0 = 8.0;     // first truncation parameter
    double limit_dt = 2.0;     // truncation increment
    double curv_tol = 1e-3;    // slack on the K <= -1 validation
    int curv_grid = 48;        // validation grid is curv_grid^2 over the support
    bool enforce_curvature = true;
};

class PerturbedSpace {
  public:
    explicit PerturbedSpace(MetricField field, SpaceOptions opts = {});

    const MetricField& field() const { return field_; }
    const SpaceOptions& opts() const { return opts_; }
    double pinching_b() const { return pinching_b_; }
    double max_curvature() const { return max_curvature_; }
    bool deformed() const { return field_.deformed(); }

  private:
    MetricField field_;
    SpaceOptions opts_;
    double pinching_b_ = 1.0;
    double max_curvature_ = -1.0;
};

struct PathNode {
    double s;
    DiskPoint p;
    Vec2 v;  // metric-unit velocity, Euclidean components
};

struct GeodesicPath {
    std::vector<PathNode> nodes;
    std::optional<IdealPoint> forward_ideal;
    std::optional<IdealPoint> backward_ideal;
    double length() const { return nodes.empty() ? 0.0 : nodes.back().s; }
    void write_csv(std::ostream& os) const;
};

// Velocity is metric-unit with Euclidean components.
struct TraceState {
    DiskPoint p;
    Vec2 v;
};

struct Christoffel {
    // symbols[k][i][j] = Gamma^k_ij
    double s[2][2][2];
};

Christoffel christoffel(const PerturbedSpace& space, DiskPoint p);
Christoffel christoffel(const MetricJet& jet);

// Advance a unit-speed geodesic by arclength T (T may be negative).
TraceState trace(const PerturbedSpace& space, TraceState st, double T, GeodesicPath* rec = nullptr);

GeodesicPath shoot(const PerturbedSpace& space, const UnitTangent& v, double T);

IdealPoint ideal_endpoint(const PerturbedSpace& space, const UnitTangent& v);
IdealPoint ideal_endpoint(const PerturbedSpace& space, const TraceState& st);

// Shooting solution of the two-point problem x -> y.
struct BvpSolution {
    double angle;   // Euclidean direction angle at x
    double length;  // arclength
    Vec2 exit_dir;  // Euclidean unit direction at y
};

BvpSolution solve_connect(const PerturbedSpace& space, DiskPoint x, DiskPoint y,
                          const BvpSolution* guess = nullptr);

GeodesicPath connect(const PerturbedSpace& space, DiskPoint x, DiskPoint y);

double p_distance(const PerturbedSpace& space, DiskPoint x, DiskPoint y);

UnitTangent p_ray(const PerturbedSpace& space, DiskPoint x, IdealPoint xi);

double p_busemann(const PerturbedSpace& space, DiskPoint x, DiskPoint y, IdealPoint xi);

double p_gromov(const PerturbedSpace& space, DiskPoint x, IdealPoint xi, IdealPoint eta);
double p_visual(const PerturbedSpace& space, DiskPoint x, IdealPoint xi, IdealPoint eta);

SampledMetric p_visual_sample(const PerturbedSpace& space, DiskPoint x, const BoundarySample& sample);

IdealPoint p_involution(const PerturbedSpace& space, DiskPoint x, IdealPoint xi);

bool in_shadow(const PerturbedSpace& space, DiskPoint x, IdealPoint xi, DiskPoint center, double radius);

double p_angle(const PerturbedSpace& space, DiskPoint x, IdealPoint xi, IdealPoint eta);

// Metric-unit vector in the direction of the Euclidean unit vector e.
Vec2 metric_unit(const Metric2& g, Vec2 e);

}  // namespace moeb
