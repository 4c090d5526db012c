#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "moebius/errors.hpp"
#include "moebius/hyperbolic.hpp"

using namespace moeb;

namespace {

DiskPoint radial(double t, double theta = 0.0) {
    double r = std::tanh(t / 2.0);
    return {r * std::cos(theta), r * std::sin(theta)};
}

// Truncated-limit oracle for the Busemann function.
double busemann_limit(DiskPoint x, DiskPoint y, IdealPoint xi, double t) {
    DiskPoint z = h2::geodesic_point({0.0, 0.0}, xi, t);
    return h2::distance(x, z) - h2::distance(y, z);
}

std::mt19937_64 rng(7);

DiskPoint random_point(double max_t = 3.0) {
    std::uniform_real_distribution<double> ut(0.0, max_t), ua(0.0, kTwoPi);
    return radial(ut(rng), ua(rng));
}

IdealPoint random_ideal() {
    std::uniform_real_distribution<double> ua(0.0, kTwoPi);
    return IdealPoint(ua(rng));
}

}  // namespace

TEST_CASE("distance: radial closed form and invariances") {
    for (double t : {0.1, 0.5, 2.0, 8.0, 14.0})
        CHECK(h2::distance({0.0, 0.0}, radial(t, 0.7)) == doctest::Approx(t).epsilon(1e-9));
    for (int i = 0; i < 50; ++i) {
        DiskPoint a = random_point(), b = random_point(), c = random_point();
        double dab = h2::distance(a, b);
        CHECK(dab == doctest::Approx(h2::distance(b, a)).epsilon(1e-12));
        CHECK(dab <= h2::distance(a, c) + h2::distance(c, b) + 1e-10);
        // invariance under the chart automorphism centered at c
        DiskPoint a2{h2::to_origin(c, a.z())}, b2{h2::to_origin(c, b.z())};
        CHECK(h2::distance(a2, b2) == doctest::Approx(dab).epsilon(1e-10));
    }
}

TEST_CASE("busemann: radial value, cocycle, limit oracle") {
    IdealPoint xi(0.0);
    // y moved distance r straight toward xi gains r
    CHECK(h2::busemann({0.0, 0.0}, radial(1.3), xi) == doctest::Approx(1.3).epsilon(1e-12));
    CHECK(h2::busemann({0.0, 0.0}, radial(1.3, kPi), xi) == doctest::Approx(-1.3).epsilon(1e-12));
    for (int i = 0; i < 30; ++i) {
        DiskPoint x = random_point(), y = random_point(), w = random_point();
        IdealPoint e = random_ideal();
        double b = h2::busemann(x, y, e);
        CHECK(b == doctest::Approx(busemann_limit(x, y, e, 16.0)).epsilon(1e-9));
        // cocycle identity B(x,y) + B(y,w) = B(x,w)
        CHECK(b + h2::busemann(y, w, e) == doctest::Approx(h2::busemann(x, w, e)).epsilon(1e-9));
        CHECK(std::abs(b) <= h2::distance(x, y) + 1e-10);
    }
}

TEST_CASE("gromov product and visual metric") {
    // at the origin the visual distance is half the chord
    for (int i = 0; i < 30; ++i) {
        IdealPoint xi = random_ideal(), eta = random_ideal();
        if (std::abs(angle_diff(xi.angle, eta.angle)) < 1e-6) continue;
        double chord = std::abs(xi.z() - eta.z());
        CHECK(h2::visual({0.0, 0.0}, xi, eta) == doctest::Approx(chord / 2.0).epsilon(1e-12));
        DiskPoint x = random_point();
        double g = h2::gromov(x, xi, eta);
        CHECK(h2::visual(x, xi, eta) == doctest::Approx(std::exp(-g)).epsilon(1e-12));
        // truncated-limit oracle (x_t, y_t on the rays)
        double t = 15.0;
        DiskPoint yt = h2::geodesic_point(x, xi, t), zt = h2::geodesic_point(x, eta, t);
        CHECK(g == doctest::Approx(t - 0.5 * h2::distance(yt, zt)).epsilon(1e-8));
        CHECK(g >= -1e-12);
    }
    CHECK_THROWS_AS((void)h2::gromov({0.1, 0.2}, IdealPoint(1.0), IdealPoint(1.0)),
                    InfiniteGromovProduct);
}

TEST_CASE("advance: consistency with geodesic_point and the flow property") {
    for (int i = 0; i < 30; ++i) {
        DiskPoint x = random_point();
        IdealPoint xi = random_ideal();
        Vec2 e = h2::direction_to_ideal(x, xi);
        double t = 2.3;
        h2::Flow f = h2::advance(x, e, t);
        DiskPoint gp = h2::geodesic_point(x, xi, t);
        CHECK(std::abs(f.p.z() - gp.z()) < 1e-12);
        CHECK(h2::distance(x, f.p) == doctest::Approx(t).epsilon(1e-10));
        // flow property: two half steps equal one full step
        h2::Flow g1 = h2::advance(x, e, t / 2.0);
        h2::Flow g2 = h2::advance(g1.p, g1.e, t / 2.0);
        CHECK(std::abs(g2.p.z() - f.p.z()) < 1e-12);
        CHECK(std::abs(g2.e.z() - f.e.z()) < 1e-10);
        // the ray converges to xi
        CHECK(std::abs(angle_diff(h2::ideal_from(x, e).angle, xi.angle)) < 1e-12);
    }
}

TEST_CASE("direction and angle") {
    for (int i = 0; i < 30; ++i) {
        DiskPoint x = random_point();
        DiskPoint y = random_point();
        if (h2::distance(x, y) < 1e-6) continue;
        Vec2 e = h2::direction_to_point(x, y);
        CHECK(e.norm() == doctest::Approx(1.0).epsilon(1e-12));
        h2::Flow f = h2::advance(x, e, h2::distance(x, y));
        CHECK(std::abs(f.p.z() - y.z()) < 1e-10);
    }
    // angle at the origin is the Euclidean angle between boundary points
    CHECK(h2::angle({0.0, 0.0}, IdealPoint(0.3), IdealPoint(1.5)) == doctest::Approx(1.2));
    // right-angle triangle check via the hyperbolic law of cosines at a vertex
    DiskPoint x{0.3, -0.1};
    IdealPoint a(0.2), b(2.9);
    double th = h2::angle(x, a, b);
    // compare against the angle between initial directions measured numerically
    Vec2 ea = h2::direction_to_ideal(x, a), eb = h2::direction_to_ideal(x, b);
    double cosang = ea.dot(eb);
    CHECK(std::cos(th) == doctest::Approx(cosang).epsilon(1e-12));
}

TEST_CASE("involution: antipode through the basepoint") {
    CHECK(h2::involution({0.0, 0.0}, IdealPoint(0.4)).angle ==
          doctest::Approx(wrap_angle(0.4 + kPi)).epsilon(1e-12));
    for (int i = 0; i < 20; ++i) {
        DiskPoint x = random_point();
        IdealPoint xi = random_ideal();
        IdealPoint eta = h2::involution(x, xi);
        // x lies on the geodesic (xi, eta): the two rays are opposite
        Vec2 u = h2::direction_to_ideal(x, xi), v = h2::direction_to_ideal(x, eta);
        CHECK(u.dot(v) == doctest::Approx(-1.0).epsilon(1e-10));
        CHECK(std::abs(angle_diff(h2::involution(x, eta).angle, xi.angle)) < 1e-10);
    }
}

TEST_CASE("poisson kernel and conformal derivative of the visual metric") {
    for (int i = 0; i < 20; ++i) {
        DiskPoint x = random_point(2.0), y = random_point(2.0);
        IdealPoint xi = random_ideal(), eta = random_ideal();
        if (std::abs(angle_diff(xi.angle, eta.angle)) < 1e-3) continue;
        // geometric-mean identity rho_y = rho_x * sqrt(P ratio at both points)
        double lhs = h2::visual(y, xi, eta);
        double rhs = h2::visual(x, xi, eta) *
                     std::sqrt(std::exp(h2::busemann(x, y, xi)) * std::exp(h2::busemann(x, y, eta)));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
        CHECK(h2::busemann(x, y, xi) ==
              doctest::Approx(std::log(h2::poisson(y, xi) / h2::poisson(x, xi))).epsilon(1e-10));
    }
}

TEST_CASE("distance_derivative matches finite differences") {
    for (int i = 0; i < 20; ++i) {
        DiskPoint p = random_point(), c = random_point();
        if (h2::distance(p, c) < 0.2) continue;
        std::uniform_real_distribution<double> ua(0.0, kTwoPi);
        double a = ua(rng);
        Vec2 e{std::cos(a), std::sin(a)};
        double h = 1e-5;
        double fp = h2::distance(h2::advance(p, e, h).p, c);
        double fm = h2::distance(h2::advance(p, e, -h).p, c);
        CHECK(h2::distance_derivative(p, e, c) == doctest::Approx((fp - fm) / (2.0 * h)).epsilon(1e-6));
    }
}

TEST_CASE("ball_entry against bisection oracle") {
    std::uniform_real_distribution<double> ua(0.0, kTwoPi), ur(0.3, 2.0);
    int hits = 0;
    for (int i = 0; i < 60; ++i) {
        DiskPoint p = random_point(3.0), c = random_point(1.5);
        double r = ur(rng);
        if (h2::distance(p, c) <= r) continue;
        double a = ua(rng);
        Vec2 e{std::cos(a), std::sin(a)};
        double horizon = 12.0;
        auto entry = h2::ball_entry(p, e, c, r, horizon);
        // oracle: scan then bisect the first crossing of d(gamma(t), c) = r
        double t_hit = -1.0, prev = 0.0;
        for (double t = 0.0; t <= horizon; t += 1e-3) {
            if (h2::distance(h2::advance(p, e, t).p, c) <= r) {
                t_hit = t;
                break;
            }
            prev = t;
        }
        if (t_hit >= 0.0) {
            double lo = prev, hi = t_hit;
            for (int k = 0; k < 60; ++k) {
                double mid = 0.5 * (lo + hi);
                (h2::distance(h2::advance(p, e, mid).p, c) <= r ? hi : lo) = mid;
            }
            REQUIRE(entry.has_value());
            CHECK(*entry == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-7));
            ++hits;
        } else {
            CHECK(!entry.has_value());
        }
        // closest-approach value agrees with a dense scan
        double best = 1e30;
        for (double t = 0.0; t <= 25.0; t += 1e-2)
            best = std::min(best, h2::distance(h2::advance(p, e, t).p, c));
        CHECK(h2::ray_min_distance(p, e, c) <= best + 1e-6);
        CHECK(h2::ray_min_distance(p, e, c) >= best - 1e-2);
    }
    CHECK(hits > 3);  // the scan must have exercised the entry branch
}

TEST_CASE("ball_in_chart: hyperbolic circles are Euclidean circles") {
    for (int i = 0; i < 15; ++i) {
        DiskPoint c = random_point(2.0);
        double r = 1.1;
        h2::EuclideanBall b = h2::ball_in_chart(c, r);
        for (double th = 0.0; th < kTwoPi; th += 0.7) {
            DiskPoint q = h2::advance(c, {std::cos(th), std::sin(th)}, r).p;
            CHECK(std::abs(q.z() - b.center) == doctest::Approx(b.radius).epsilon(1e-10));
        }
    }
}

TEST_CASE("ray and geodesic_point stay consistent at long range") {
    DiskPoint x{0.2, -0.35};
    IdealPoint xi(2.1);
    UnitTangent u = h2::ray(x, xi);
    // metric-unit: Euclidean norm is (1 - |x|^2) / 2
    CHECK(u.dir.norm() == doctest::Approx((1.0 - x.abs2()) / 2.0).epsilon(1e-12));
    for (double t : {1.0, 5.0, 12.0}) {
        DiskPoint p = h2::geodesic_point(x, xi, t);
        CHECK(h2::distance(x, p) == doctest::Approx(t).epsilon(1e-9));
        CHECK(h2::busemann(x, p, xi) == doctest::Approx(t).epsilon(1e-9));
    }
}
