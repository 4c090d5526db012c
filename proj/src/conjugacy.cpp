#include "moebius/conjugacy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <utility>
#include <vector>

#include "moebius/errors.hpp"
#include "moebius/hyperbolic.hpp"

namespace moeb {

namespace {

// Distance at which an anchor point of a bi-infinite geodesic is treated as
// purely hyperbolic; rays from this far out see the deformation only through
// an exponentially small angular window.
constexpr double kAnchorLength = 12.0;

// Visual metric of the space on an arbitrary (typically bespoke) sample,
// skipping the antipodality certificate: closed form when the space is
// undeformed, truncated limits otherwise.
SampledMetric small_visuals(const PerturbedSpace& space, DiskPoint x, const BoundarySample& s) {
    const int n = s.size();
    std::vector<double> dist(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double v = space.deformed() ? p_visual(space, x, s.point(i), s.point(j))
                                        : h2::visual(x, s.point(i), s.point(j));
            dist[static_cast<size_t>(i) * n + j] = dist[static_cast<size_t>(j) * n + i] = v;
        }
    return SampledMetric::unchecked(s, std::move(dist));
}

// Closed-form visual metric of an undeformed space on the shared sample,
// certified like the truncated-limit path: the tolerance is the measured
// antipodality deficit with a margin.
SampledMetric pure_visuals(DiskPoint x, const BoundarySample& s) {
    const int n = s.size();
    std::vector<double> dist(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            dist[static_cast<size_t>(i) * n + j] = dist[static_cast<size_t>(j) * n + i] =
                h2::visual(x, s.point(i), s.point(j));
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row = std::max(row, dist[static_cast<size_t>(i) * n + j]);
        worst = std::max(worst, 1.0 - row);
    }
    if (worst > 0.05) throw Error("visual sample is far from antipodal; sample too coarse");
    return SampledMetric(s, std::move(dist), std::max(1e-3, 1.5 * worst));
}

SampledMetric visuals_at(const PerturbedSpace& space, DiskPoint x, const BoundarySample& s) {
    return space.deformed() ? p_visual_sample(space, x, s) : pure_visuals(x, s);
}

// The bi-infinite deformed geodesic with the prescribed ideal endpoints,
// represented by a state at arclength kAnchorLength before the region of
// interest; built by shooting from a far anchor on the base geodesic.
TraceState anchored_line(const PerturbedSpace& space, DiskPoint x, Vec2 e_unit, IdealPoint xi) {
    double T = kAnchorLength;
    DiskPoint a = h2::advance(x, -e_unit, T).p;
    const MetricField& field = space.field();
    while (field.deformed() &&
           h2::distance(a, field.center()) < field.support_radius() + 2.0 && T < 60.0) {
        T += 4.0;
        a = h2::advance(x, -e_unit, T).p;
    }
    UnitTangent r = p_ray(space, a, xi);
    return trace(space, {r.base, r.dir}, T);
}

}  // namespace

DeformationPair::DeformationPair(PerturbedSpace space0, PerturbedSpace space1,
                                 BoundarySample sample)
    : space0_(std::move(space0)), space1_(std::move(space1)), sample_(std::move(sample)) {
    if (space0_.deformed())
        throw InvalidParameter("the first space of a deformation pair must be undeformed");
}

void write_csv(std::ostream& os, const std::vector<ConjugacyResult>& rows) {
    os << "base_x,base_y,dir_x,dir_y,foot_x,foot_y,derivative_residual\n";
    char buf[256];
    for (const ConjugacyResult& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.input.base.x,
                      r.input.base.y, r.output.dir.x, r.output.dir.y, r.foot.x, r.foot.y,
                      r.derivative_residual);
        os << buf;
    }
}

IdealPoint boundary_map(const DeformationPair&, IdealPoint xi) { return xi; }

std::pair<SampledMetric, SampledMetric> pair_visuals(const DeformationPair& pair, DiskPoint x,
                                                     DiskPoint y) {
    return {visuals_at(pair.space0(), x, pair.sample()), visuals_at(pair.space1(), y, pair.sample())};
}

double deformation_moebius_defect(const DeformationPair& pair, const std::vector<DiskPoint>& probes,
                                  const MoebiusOptions& opts) {
    if (probes.empty()) throw InvalidParameter("at least one probe basepoint is required");
    double defect = 0.0;
    for (DiskPoint x : probes) {
        auto [m0, m1] = pair_visuals(pair, x, x);
        defect = std::max(defect, moebius_defect(m0, m1, opts.seed, opts.quadruple_budget));
    }
    return defect;
}

ConjugacyResult conjugate(const DeformationPair& pair, const UnitTangent& v,
                          const MoebiusOptions& opts) {
    DiskPoint x = v.base;
    Vec2 e = v.dir.normalized();
    IdealPoint xi = h2::ideal_from(x, e);
    IdealPoint eta = h2::ideal_from(x, -e);

    // Reference state on the deformed geodesic (eta, xi), near x.
    TraceState y0 = anchored_line(pair.space1(), x, e, xi);

    // Bespoke sample around the two endpoints; the auxiliary points sit one
    // shared-sample step away from xi unless the endpoints are close enough
    // in angle to force a smaller step.
    double gap = std::abs(angle_diff(xi.angle, eta.angle));
    double step = std::min(kTwoPi / pair.sample().size(), gap / 4.0);
    BoundarySample bs({xi.angle, wrap_angle(xi.angle - step), wrap_angle(xi.angle + step),
                       eta.angle, wrap_angle(eta.angle - step), wrap_angle(eta.angle + step)});
    int i_xi = bs.nearest(xi.angle);
    std::pair<int, int> aux{bs.nearest(wrap_angle(xi.angle - step)),
                            bs.nearest(wrap_angle(xi.angle + step))};

    SampledMetric m_x = small_visuals(pair.space0(), x, bs);
    SampledMetric m_y0 = small_visuals(pair.space1(), y0.p, bs);

    // Moving arclength s toward xi scales the derivative at xi by e^s, so a
    // single correction lands exactly on the derivative-one point.
    double c = std::log(derivative(m_x, m_y0, i_xi, aux, opts));
    TraceState foot = trace(pair.space1(), y0, -c);

    SampledMetric m_foot = small_visuals(pair.space1(), foot.p, bs);
    double residual = std::abs(std::log(derivative(m_x, m_foot, i_xi, aux, opts)));
    return {v, UnitTangent{foot.p, foot.v}, foot.p, residual};
}

FlipReport maxmin_flip_check(const DeformationPair& pair, DiskPoint x, DiskPoint y,
                             const MoebiusOptions& opts) {
    auto [m_x, m_y] = pair_visuals(pair, x, y);
    // Derivative of the base visual metric at x with respect to the
    // pulled-back deformed one at y; its maximum defines d_M.
    DerivativeFunction df = derivative_function(m_y, m_x, opts);

    FlipReport rep;
    rep.argmax = df.argmax();
    rep.argmin = df.argmin();

    // The sampled argmax is only grid-accurate and the involution/foot
    // checks are first-order sensitive to it; refine by fitting a parabola
    // to log-derivative values at the argmax and its two neighbours.
    const int n = pair.sample().size();
    int lo = (rep.argmax + n - 1) % n, hi = (rep.argmax + 1) % n;
    double a0 = pair.sample().angle(rep.argmax);
    double dl = angle_diff(pair.sample().angle(lo), a0);
    double dh = angle_diff(pair.sample().angle(hi), a0);
    double fl = std::log(df.values[lo]), f0 = std::log(df.values[rep.argmax]),
           fh = std::log(df.values[hi]);
    double denom = dl * dl * (dh - 0.0) - dh * dh * (dl - 0.0);
    double shift = 0.0, peak = f0;
    if (std::abs(denom) > 1e-30) {
        // Quadratic through (dl, fl), (0, f0), (dh, fh) about a0.
        double b = (dl * dl * (fh - f0) - dh * dh * (fl - f0)) / denom;
        double c = (dh * (fl - f0) - dl * (fh - f0)) / denom;
        if (c < 0.0) {
            shift = std::clamp(-b / (2.0 * c), -std::abs(dl), std::abs(dh));
            peak = f0 + b * shift + c * shift * shift;
        }
    }
    rep.dM = peak;

    IdealPoint xi_star(wrap_angle(a0 + shift));
    IdealPoint i0 = h2::involution(x, xi_star);
    rep.antipode_nearest = pair.sample().nearest(i0.angle);
    IdealPoint i1 = p_involution(pair.space1(), y, boundary_map(pair, xi_star));
    rep.involution_residual = std::abs(angle_diff(boundary_map(pair, i0).angle, i1.angle));

    ConjugacyResult cr = conjugate(pair, h2::ray(x, xi_star), opts);
    rep.foot = cr.foot;
    double d = p_distance(pair.space1(), y, cr.foot);
    rep.foot_distance_residual = std::abs(d - rep.dM);
    UnitTangent w = p_ray(pair.space1(), y, boundary_map(pair, xi_star));
    DiskPoint on_ray = trace(pair.space1(), {w.base, w.dir}, d).p;
    rep.foot_ray_residual = p_distance(pair.space1(), on_ray, cr.foot);
    return rep;
}

}  // namespace moeb
