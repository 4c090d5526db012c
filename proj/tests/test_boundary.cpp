#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "moebius/boundary.hpp"
#include "moebius/errors.hpp"
#include "moebius/hyperbolic.hpp"

using namespace moeb;

namespace {

// Closed-form sampled visual metric of the curvature -1 plane at basepoint x.
SampledMetric pure_sample(BoundarySample s, DiskPoint x, double tol = 1e-3) {
    int n = s.size();
    std::vector<double> d(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) d[static_cast<size_t>(i) * n + j] = h2::visual(x, s.point(i), s.point(j));
    return SampledMetric(std::move(s), std::move(d), tol);
}

}  // namespace

TEST_CASE("boundary sample basics") {
    BoundarySample s = BoundarySample::uniform(8, 0.1);
    CHECK(s.size() == 8);
    CHECK(s.angle(0) == doctest::Approx(0.1));
    CHECK(s.nearest(0.11) == 0);
    CHECK(s.nearest(0.1 + kTwoPi * 7.0 / 8.0 + 0.01) == 7);
    CHECK_THROWS_AS(BoundarySample({0.0, 1.0, 1.0, 2.0}), InvalidParameter);
    CHECK_THROWS_AS(BoundarySample({0.0, 1.0, 2.0}), InsufficientSample);
}

TEST_CASE("sampled metric validation") {
    BoundarySample s = BoundarySample::uniform(16);
    SampledMetric m = pure_sample(s, {0.0, 0.0});
    CHECK(m.rho(0, 8) == doctest::Approx(1.0));  // antipodal pair at the origin
    // scaling down breaks antipodality for the checked constructor
    std::vector<double> half;
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) half.push_back(0.5 * m.rho(i, j));
    CHECK_THROWS_AS(SampledMetric(s, half, 1e-3), Error);
    SampledMetric bad = SampledMetric::unchecked(s, half);
    CHECK_THROWS_AS((void)antipode_of(bad, 0), NotAntipodalAtPoint);
    CHECK(antipode_of(m, 3) == 11);
}

TEST_CASE("csv round trip") {
    SampledMetric m = pure_sample(BoundarySample::uniform(12, 0.3), {0.2, -0.1}, 3e-2);
    std::ostringstream os;
    m.write_csv(os);
    std::istringstream is(os.str());
    SampledMetric r = SampledMetric::read_csv(is, 3e-2);
    REQUIRE(r.size() == m.size());
    for (int i = 0; i < m.size(); ++i) {
        CHECK(r.sample().angle(i) == doctest::Approx(m.sample().angle(i)).epsilon(1e-15));
        for (int j = 0; j < m.size(); ++j) CHECK(r.rho(i, j) == doctest::Approx(m.rho(i, j)).epsilon(1e-15));
    }
    std::ostringstream os2;
    r.write_csv(os2);
    CHECK(os.str() == os2.str());  // byte-stable serialization
}

TEST_CASE("cross ratio: closed form and Moebius invariance") {
    BoundarySample s = BoundarySample::uniform(16, 0.05);
    SampledMetric m0 = pure_sample(s, {0.0, 0.0});
    SampledMetric m1 = pure_sample(s, {0.35, -0.2}, 3e-2);
    // at the origin the visual metric is half the chord; compare directly
    auto chord = [&](int i, int j) { return std::abs(s.point(i).z() - s.point(j).z()) / 2.0; };
    double expect = chord(0, 4) * chord(2, 9) / (chord(0, 9) * chord(2, 4));
    CHECK(cross_ratio(m0, 0, 2, 4, 9) == doctest::Approx(expect).epsilon(1e-12));
    // visual metrics at two basepoints are Moebius equivalent: equal cross-ratios
    for (auto [i, j, k, l] : {std::array<int, 4>{0, 2, 4, 9}, {1, 5, 8, 13}, {3, 7, 11, 15}})
        CHECK(cross_ratio(m0, i, j, k, l) == doctest::Approx(cross_ratio(m1, i, j, k, l)).epsilon(1e-10));
    CHECK_THROWS_AS((void)cross_ratio(m0, 0, 0, 4, 9), InvalidQuadruple);
    CHECK(moebius_defect(m0, m1) < 1e-9);
}

TEST_CASE("moebius defect detects non-equivalent metrics") {
    BoundarySample s = BoundarySample::uniform(16);
    SampledMetric m0 = pure_sample(s, {0.0, 0.0});
    // perturb one entry multiplicatively: cross-ratios move by the same log amount
    std::vector<double> d;
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) {
            double v = m0.rho(i, j);
            if ((i == 2 && j == 9) || (i == 9 && j == 2)) v *= 1.02;
            d.push_back(v);
        }
    SampledMetric warped = SampledMetric::unchecked(s, d);
    double defect = moebius_defect(m0, warped);
    CHECK(defect == doctest::Approx(std::log(1.02)).epsilon(1e-6));
    CHECK_THROWS_AS((void)dM_distance(m0, warped), NotMoebiusEquivalent);
}

TEST_CASE("derivative function matches the Poisson-kernel ratio") {
    BoundarySample s = BoundarySample::uniform(24, 0.02);
    DiskPoint x{0.0, 0.0}, y{0.3, 0.15};
    SampledMetric mx = pure_sample(s, x);
    SampledMetric my = pure_sample(s, y, 2e-2);
    DerivativeFunction d = derivative_function(mx, my);
    REQUIRE(static_cast<int>(d.values.size()) == s.size());
    for (int i = 0; i < s.size(); ++i) {
        double expect = std::exp(h2::busemann(x, y, s.point(i)));
        CHECK(d.values[i] == doctest::Approx(expect).epsilon(1e-9));
    }
    CHECK(d.consistency_residual < 1e-9);
    CHECK(derivative(mx, my, 5) == doctest::Approx(d.values[5]).epsilon(1e-9));
    CHECK(derivative(mx, my, 5, std::pair<int, int>{11, 19}) ==
          doctest::Approx(d.values[5]).epsilon(1e-9));
}

TEST_CASE("max-min product and the dM distance") {
    BoundarySample s = BoundarySample::uniform(64);
    DiskPoint x{0.0, 0.0};
    // place y on the geodesic through two sampled antipodal boundary points so
    // the sampled extrema sit exactly at sample points
    IdealPoint xi = s.point(0);
    DiskPoint y = h2::geodesic_point(x, xi, 0.8);
    SampledMetric mx = pure_sample(s, x);
    SampledMetric my = pure_sample(s, y, 5e-3);
    DerivativeFunction d = derivative_function(mx, my);
    CHECK(d.max() * d.min() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(d.argmax() == 0);
    CHECK(d.argmin() == 32);
    double dm = dM_distance(mx, my);
    CHECK(dm == doctest::Approx(0.8).epsilon(1e-9));  // max log derivative = d(x, y)
    CHECK(dM_distance(my, mx) == doctest::Approx(dm).epsilon(1e-9));
    CHECK(dM_distance(mx, mx) == doctest::Approx(0.0));
}

TEST_CASE("sample mismatch is rejected") {
    SampledMetric a = pure_sample(BoundarySample::uniform(8), {0.0, 0.0});
    SampledMetric b = pure_sample(BoundarySample::uniform(8, 0.01), {0.0, 0.0});
    CHECK_THROWS_AS((void)moebius_defect(a, b), SampleMismatch);
    CHECK_THROWS_AS((void)derivative_function(a, b), SampleMismatch);
}
