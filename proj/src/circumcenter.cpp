#include "moebius/circumcenter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <utility>
#include <vector>

#include "moebius/errors.hpp"
#include "moebius/hyperbolic.hpp"

namespace moeb {

namespace {

double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

// Min-norm point of the convex hull of pts: full-length weight vector (at
// most three nonzero entries) and the point itself.
std::pair<std::vector<double>, Vec2> min_norm_point(const std::vector<Vec2>& pts) {
    const int n = static_cast<int>(pts.size());
    std::vector<double> w(n, 0.0);
    if (n == 0) return {w, {0.0, 0.0}};
    if (n == 1) {
        w[0] = 1.0;
        return {w, pts[0]};
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return pts[a].x != pts[b].x ? pts[a].x < pts[b].x : pts[a].y < pts[b].y;
    });
    // Monotone-chain hull, counterclockwise.
    std::vector<int> hull;
    auto build = [&](auto begin, auto end) {
        size_t base = hull.size();
        for (auto it = begin; it != end; ++it) {
            while (hull.size() >= base + 2 &&
                   cross(pts[hull.back()] - pts[hull[hull.size() - 2]],
                         pts[*it] - pts[hull.back()]) <= 0.0)
                hull.pop_back();
            hull.push_back(*it);
        }
        hull.pop_back();
    };
    build(order.begin(), order.end());
    build(order.rbegin(), order.rend());
    if (hull.empty()) hull.push_back(order[0]);
    const int h = static_cast<int>(hull.size());

    if (h == 1) {
        w[hull[0]] = 1.0;
        return {w, pts[hull[0]]};
    }
    if (h >= 3) {
        bool inside = true;
        for (int k = 0; k < h && inside; ++k) {
            Vec2 a = pts[hull[k]], b = pts[hull[(k + 1) % h]];
            if (cross(b - a, Vec2{-a.x, -a.y}) < -1e-14) inside = false;
        }
        if (inside) {
            // Fan triangulation from hull[0]; barycentric weights of the origin.
            Vec2 p0 = pts[hull[0]];
            for (int k = 1; k + 1 < h; ++k) {
                Vec2 p1 = pts[hull[k]], p2 = pts[hull[k + 1]];
                double det = cross(p1 - p0, p2 - p0);
                if (std::abs(det) < 1e-18) continue;
                double w1 = cross(Vec2{-p0.x, -p0.y}, p2 - p0) / det;
                double w2 = cross(p1 - p0, Vec2{-p0.x, -p0.y}) / det;
                double w0 = 1.0 - w1 - w2;
                if (w0 < -1e-10 || w1 < -1e-10 || w2 < -1e-10) continue;
                w[hull[0]] += std::max(0.0, w0);
                w[hull[k]] += std::max(0.0, w1);
                w[hull[k + 1]] += std::max(0.0, w2);
                return {w, {0.0, 0.0}};
            }
        }
    }
    // Closest point to the origin over the hull boundary.
    double best = std::numeric_limits<double>::infinity();
    Vec2 m{0.0, 0.0};
    int bi = hull[0], bj = hull[0];
    double bt = 0.0;
    const int edges = (h == 2) ? 1 : h;
    for (int k = 0; k < edges; ++k) {
        Vec2 a = pts[hull[k]], b = pts[hull[(k + 1) % h]];
        Vec2 ab = b - a;
        double len2 = ab.dot(ab);
        double t = len2 > 0.0 ? std::clamp(-a.dot(ab) / len2, 0.0, 1.0) : 0.0;
        Vec2 q = a + ab * t;
        if (q.dot(q) < best) {
            best = q.dot(q);
            m = q;
            bi = hull[k];
            bj = hull[(k + 1) % h];
            bt = t;
        }
    }
    w[bi] += 1.0 - bt;
    w[bj] += bt;
    return {w, m};
}

// Cholesky frame of a metric: g = L L^T; tangent vectors measured through
// L^T have Euclidean geometry.
struct Frame {
    double l11, l21, l22;
    explicit Frame(const Metric2& g)
        : l11(std::sqrt(g.g11)),
          l21(g.g12 / l11),
          l22(std::sqrt(std::max(g.g22 - l21 * l21, 1e-300))) {}
    Vec2 to(Vec2 v) const { return {l11 * v.x + l21 * v.y, l22 * v.y}; }
    Vec2 from(Vec2 f) const {
        double vy = f.y / l22;
        return {(f.x - l21 * vy) / l11, vy};
    }
};

// Distances from a moving basepoint to the fixed far anchors, warm-started
// across optimizer iterations.
struct Objective {
    const PerturbedSpace& s1;
    const FootAnchors& feet;
    std::vector<BvpSolution> warm;
    std::vector<char> have;

    Objective(const PerturbedSpace& s, const FootAnchors& f)
        : s1(s), feet(f), warm(f.anchors.size()), have(f.anchors.size(), 0) {}

    // Fills per-direction values and Euclidean launch directions; returns max.
    double eval(DiskPoint y, std::vector<double>& f, std::vector<Vec2>& e) {
        double m = -std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < feet.anchors.size(); ++i) {
            BvpSolution sol = solve_connect(s1, y, feet.anchors[i], have[i] ? &warm[i] : nullptr);
            warm[i] = sol;
            have[i] = 1;
            f[i] = sol.length - feet.t_anchor;
            e[i] = {std::cos(sol.angle), std::sin(sol.angle)};
            m = std::max(m, f[i]);
        }
        return m;
    }
};

double band_width(const DeformationPair& pair, const ExtendOptions& opts) {
    if (opts.delta_band > 0.0) return opts.delta_band;
    return std::max(5e-3, 3.0 * pair.space1().opts().limit_tol * pair.sample().size());
}

std::vector<std::pair<int, double>> prune_weights(const std::vector<double>& w,
                                                  const std::vector<int>& band) {
    std::vector<std::pair<int, double>> out;
    for (size_t k = 0; k < w.size(); ++k)
        if (w[k] > 1e-9) out.emplace_back(band[k], w[k]);
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.second > b.second; });
    if (out.size() > 3) out.resize(3);
    double total = 0.0;
    for (auto& [i, v] : out) total += v;
    for (auto& [i, v] : out) v /= total;
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

FootAnchors conjugacy_feet(const DeformationPair& pair, DiskPoint x, double t_anchor) {
    const PerturbedSpace& s1 = pair.space1();
    const SpaceOptions& o = s1.opts();
    const MetricField& field = s1.field();
    const int n = pair.sample().size();
    FootAnchors out{x, t_anchor, {}, {}};
    out.feet.reserve(n);
    out.anchors.reserve(n);
    for (int i = 0; i < n; ++i) {
        IdealPoint xi = pair.sample().point(i);
        Vec2 e = h2::direction_to_ideal(x, xi);
        // When the whole base line through x misses the support, the deformed
        // geodesic coincides with it and the conjugacy is the identity: the
        // foot is x itself and the anchored ray stays closed-form. This also
        // covers distant basepoints whose anchored construction would push
        // the anchor beyond usable chart precision.
        if (!field.deformed() ||
            (h2::distance(x, field.center()) >= field.support_radius() &&
             h2::ray_min_distance(x, e, field.center()) > field.support_radius() &&
             h2::ray_min_distance(x, -e, field.center()) > field.support_radius())) {
            out.feet.push_back(x);
            out.anchors.push_back(h2::advance(x, e, t_anchor).p);
            continue;
        }
        // Anchor the deformed geodesic with endpoint xi behind x, far enough
        // from the support that the ray from the anchor toward xi matches the
        // full line to below solver tolerance. Clearance is measured from the
        // support rather than from x, so distant basepoints get short offsets
        // and the anchor stays inside the usable part of the chart.
        double T = 0.5;
        DiskPoint a = h2::advance(x, -e, T).p;
        while (h2::distance(a, field.center()) < field.support_radius() + 12.0 && T < 60.0) {
            T += 0.5;
            a = h2::advance(x, -e, T).p;
        }
        UnitTangent r = p_ray(s1, a, xi);
        TraceState y0 = trace(s1, {r.base, r.dir}, T);

        // Log derivative of the pulled-back visual metric at xi, as the
        // cross-space Busemann limit of d0(x, p_t) - d1(y0, p_t) along the
        // base ray toward xi.
        double c = 0.0, prev = 0.0, last_t = 0.0;
        bool have = false, settled = false;
        BvpSolution warm{};
        for (double t = o.limit_t0; t <= o.r_max + 1e-9; t += o.limit_dt) {
            DiskPoint p = h2::geodesic_point(x, xi, t);
            if (have) warm.length += t - last_t;
            BvpSolution sol = solve_connect(s1, y0.p, p, have ? &warm : nullptr);
            warm = sol;
            c = t - sol.length;
            if (have && std::abs(c - prev) <= o.limit_tol) {
                settled = true;
                break;
            }
            prev = c;
            have = true;
            last_t = t;
        }
        if (!settled) throw LimitNotConverged("conjugacy foot limit did not settle");

        TraceState foot = trace(s1, y0, -c);
        out.feet.push_back(foot.p);
        out.anchors.push_back(trace(s1, foot, t_anchor).p);
    }
    return out;
}

std::pair<double, std::vector<double>> dM_pushforward(const DeformationPair& pair,
                                                      const FootAnchors& feet, DiskPoint y) {
    const PerturbedSpace& s1 = pair.space1();
    std::vector<double> values(feet.anchors.size());
    double m = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < feet.anchors.size(); ++i) {
        values[i] = p_distance(s1, y, feet.anchors[i]) - feet.t_anchor;
        m = std::max(m, values[i]);
    }
    return {m, std::move(values)};
}

std::pair<double, std::vector<double>> dM_pushforward(const DeformationPair& pair, DiskPoint x,
                                                      DiskPoint y) {
    return dM_pushforward(pair, conjugacy_feet(pair, x), y);
}

ExtensionResult circumcenter_extend(const DeformationPair& pair, DiskPoint x,
                                    const ExtendOptions& opts, const FootAnchors* cache) {
    FootAnchors local;
    if (!cache) {
        local = conjugacy_feet(pair, x, opts.t_anchor);
        cache = &local;
    }
    const PerturbedSpace& s1 = pair.space1();
    const int n = pair.sample().size();
    const double delta = band_width(pair, opts);

    Objective obj(s1, *cache);
    std::vector<double> f(n);
    std::vector<Vec2> e(n);
    DiskPoint y = x;
    double fmax = obj.eval(y, f, e);

    ExtensionResult res;
    res.x = x;
    double step0 = 0.25;
    std::vector<Vec2> grads;
    std::vector<int> band;
    std::vector<double> weights;
    Vec2 mnorm{0.0, 0.0};

    auto active_set = [&]() {
        band.clear();
        grads.clear();
        Frame fr(s1.field().metric(y));
        for (int i = 0; i < n; ++i)
            if (f[i] >= fmax - delta) {
                band.push_back(i);
                // Gradient of y -> d1(y, w_i): minus the unit vector toward w_i.
                grads.push_back(fr.to(-metric_unit(s1.field().metric(y), e[i])));
            }
        std::tie(weights, mnorm) = min_norm_point(grads);
        return fr;
    };

    int iter = 0;
    for (; iter < opts.max_iters; ++iter) {
        Frame fr = active_set();
        double gnorm = mnorm.norm();
        if (gnorm <= opts.grad_tol) {
            res.converged = true;
            break;
        }
        Vec2 desc = fr.from(mnorm * (-1.0 / gnorm));
        double s = step0;
        bool moved = false;
        std::vector<double> f2(n);
        std::vector<Vec2> e2(n);
        while (s >= opts.step_tol) {
            DiskPoint cand{y.x + s * desc.x, y.y + s * desc.y};
            if (cand.abs2() < 1.0) {
                double f2max = obj.eval(cand, f2, e2);
                if (f2max <= fmax - opts.armijo_c * s * gnorm) {
                    y = cand;
                    f = f2;
                    e = e2;
                    fmax = f2max;
                    moved = true;
                    break;
                }
            }
            s *= 0.5;
        }
        if (!moved) {
            res.converged = gnorm <= 10.0 * opts.grad_tol;
            break;
        }
        step0 = std::min(0.5, 2.0 * s);
    }

    active_set();
    res.F_x = y;
    res.r_x = fmax;
    res.argmax_band = band;
    res.balanced_weights = prune_weights(weights, band);
    res.balance_residual_at_Fx = mnorm.norm();
    res.optimizer_iters = iter;
    if (res.balance_residual_at_Fx <= opts.grad_tol) res.converged = true;

    // Balance of the base directions at x itself.
    std::vector<Vec2> base_dirs;
    for (int i : band) base_dirs.push_back(h2::direction_to_ideal(x, pair.sample().point(i)));
    res.balance_residual_at_x = min_norm_point(base_dirs).second.norm();
    return res;
}

RProfile r_profile(const DeformationPair& pair, const std::vector<DiskPoint>& grid,
                   const ExtendOptions& opts) {
    RProfile out;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (DiskPoint x : grid) {
        out.points.push_back(circumcenter_extend(pair, x, opts));
        lo = std::min(lo, out.points.back().r_x);
        hi = std::max(hi, out.points.back().r_x);
    }
    out.spread = grid.empty() ? 0.0 : hi - lo;
    return out;
}

QisomReport qisom_check(const DeformationPair& pair,
                        const std::vector<std::pair<DiskPoint, DiskPoint>>& pairs, double tol,
                        const ExtendOptions& opts) {
    QisomReport rep;
    std::vector<DiskPoint> points;
    std::vector<ExtensionResult> exts;
    auto extend = [&](DiskPoint p) -> const ExtensionResult& {
        for (size_t k = 0; k < points.size(); ++k)
            if (points[k].x == p.x && points[k].y == p.y) return exts[k];
        points.push_back(p);
        exts.push_back(circumcenter_extend(pair, p, opts));
        return exts.back();
    };
    for (const auto& [x, y] : pairs) {
        rep.M_hat = std::max({rep.M_hat, extend(x).r_x, extend(y).r_x});
    }
    double sb = std::sqrt(pair.space1().pinching_b());
    for (const auto& [x, y] : pairs) {
        double d0 = h2::distance(x, y);
        double d1 = p_distance(pair.space1(), extend(x).F_x, extend(y).F_x);
        rep.max_upper_excess = std::max(rep.max_upper_excess, d1 - d0 - 2.0 * rep.M_hat);
        rep.max_lower_excess = std::max(rep.max_lower_excess, d0 - 2.0 * rep.M_hat - d1);
        rep.max_bilipschitz =
            std::max({rep.max_bilipschitz, d1 - sb * d0 - 2.0 * rep.M_hat, d0 / sb - 2.0 * rep.M_hat - d1});
    }
    rep.pass = rep.max_upper_excess <= tol && rep.max_lower_excess <= tol &&
               rep.max_bilipschitz <= tol;
    return rep;
}

AdjointReport dF_adjoint_check(const DeformationPair& pair, DiskPoint x, double h,
                               const ExtendOptions& opts) {
    FootAnchors feet = conjugacy_feet(pair, x, opts.t_anchor);
    ExtensionResult center = circumcenter_extend(pair, x, opts, &feet);
    if (!center.converged) throw Error("circumcenter did not converge at the probe point");
    DiskPoint stencil[4] = {{x.x + h, x.y}, {x.x - h, x.y}, {x.x, x.y + h}, {x.x, x.y - h}};
    DiskPoint img[4];
    for (int k = 0; k < 4; ++k) {
        ExtensionResult r = circumcenter_extend(pair, stencil[k], opts);
        if (!r.converged) throw Error("circumcenter did not converge on the stencil");
        img[k] = r.F_x;
    }
    // Chart differential of F by central differences.
    Mat2 dF{(img[0].x - img[1].x) / (2.0 * h), (img[2].x - img[3].x) / (2.0 * h),
            (img[0].y - img[1].y) / (2.0 * h), (img[2].y - img[3].y) / (2.0 * h)};

    const PerturbedSpace& s1 = pair.space1();
    Metric2 g1 = s1.field().metric(center.F_x);
    double lam = h2::lambda(x);
    AdjointReport rep{x, center.F_x, h, 0.0};
    for (int i : center.argmax_band) {
        // g1-unit direction at F_x toward the anchored ideal point.
        BvpSolution sol = solve_connect(s1, center.F_x, feet.anchors[i]);
        Vec2 u = metric_unit(g1, {std::cos(sol.angle), std::sin(sol.angle)});
        Vec2 b = h2::direction_to_ideal(x, pair.sample().point(i)) * (1.0 / lam);
        for (Vec2 v : {Vec2{1.0 / lam, 0.0}, Vec2{0.0, 1.0 / lam}}) {
            Vec2 dFv = dF.apply(v);
            double lhs = g1.dot(dFv, u);
            double rhs = lam * lam * v.dot(b);
            rep.max_residual = std::max(rep.max_residual, std::abs(lhs - rhs));
        }
    }
    return rep;
}

ConeReport cone_analysis(const DeformationPair& pair, DiskPoint x0, double R, double theta0,
                         double t, const ExtendOptions& opts) {
    if (t <= R) throw InvalidParameter("the cone parameter t must exceed the ball radius");
    IdealPoint xi0(theta0);
    ConeReport rep;
    rep.t = t;
    rep.x_t = h2::geodesic_point(x0, h2::involution(x0, xi0), t);

    // The shadow of B(x0, R) from x_t is an interval of launch angles around
    // the direction back toward xi0; locate its edges by bisection.
    Vec2 back = h2::direction_to_ideal(rep.x_t, xi0);
    double phi0 = std::atan2(back.y, back.x);
    auto outside = [&](double phi) {
        return h2::ray_min_distance(rep.x_t, {std::cos(phi), std::sin(phi)}, x0) > R;
    };
    double eps = 0.0;
    for (double sign : {1.0, -1.0}) {
        double lo = 0.0, hi = kPi / 2.0;
        if (!outside(phi0 + sign * hi)) {
            eps = kPi;
            break;
        }
        for (int k = 0; k < 60; ++k) {
            double mid = 0.5 * (lo + hi);
            (outside(phi0 + sign * mid) ? hi : lo) = mid;
        }
        eps = std::max(eps, hi);
    }
    rep.eps_t = eps;

    // Classify the sample directions by angle to xi0 and to its flip at x_t.
    const int n = pair.sample().size();
    rep.classification.resize(n);
    for (int i = 0; i < n; ++i) {
        Vec2 d = h2::direction_to_ideal(rep.x_t, pair.sample().point(i));
        double phi = std::atan2(d.y, d.x);
        double to_xi = std::abs(angle_diff(phi, phi0));
        if (to_xi <= eps)
            rep.classification[i] = ConeClass::in_C;
        else if (kPi - to_xi <= eps)
            rep.classification[i] = ConeClass::in_D;
        else
            rep.classification[i] = ConeClass::outside;
    }

    // Trichotomy of the balanced support at x_t.
    ExtensionResult ext = circumcenter_extend(pair, rep.x_t, opts);
    const auto& atoms = ext.balanced_weights;
    if (atoms.size() == 2) {
        Vec2 d0 = h2::direction_to_ideal(rep.x_t, pair.sample().point(atoms[0].first));
        Vec2 d1 = h2::direction_to_ideal(rep.x_t, pair.sample().point(atoms[1].first));
        double ang = std::acos(std::clamp(d0.dot(d1), -1.0, 1.0));
        bool out0 = rep.classification[atoms[0].first] == ConeClass::outside;
        bool out1 = rep.classification[atoms[1].first] == ConeClass::outside;
        if (ang >= kPi - 5e-2)
            rep.case_label = CaseLabel::case1;
        else if (out0 && out1)
            rep.case_label = CaseLabel::case2;
        else
            rep.case_label = CaseLabel::case3;
    } else {
        rep.case_label = CaseLabel::case3;
    }
    return rep;
}

std::pair<std::vector<double>, double> caratheodory_balance(const std::vector<Vec2>& directions) {
    if (directions.empty()) throw InvalidParameter("at least one direction is required");
    auto [w, m] = min_norm_point(directions);
    return {std::move(w), m.norm()};
}

void write_csv(std::ostream& os, const std::vector<ExtensionResult>& rows) {
    os << "x_x,x_y,Fx_x,Fx_y,r,iters,converged,band_size,balance_at_x,balance_at_Fx,"
          "atom0,weight0,atom1,weight1,atom2,weight2\n";
    char buf[512];
    for (const ExtensionResult& r : rows) {
        int idx[3] = {-1, -1, -1};
        double wv[3] = {0.0, 0.0, 0.0};
        for (size_t k = 0; k < r.balanced_weights.size() && k < 3; ++k) {
            idx[k] = r.balanced_weights[k].first;
            wv[k] = r.balanced_weights[k].second;
        }
        std::snprintf(buf, sizeof buf,
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%d,%.17g,%.17g,%d,%.17g,%d,%.17g,%d,%"
                      ".17g\n",
                      r.x.x, r.x.y, r.F_x.x, r.F_x.y, r.r_x, r.optimizer_iters,
                      r.converged ? 1 : 0, static_cast<int>(r.argmax_band.size()),
                      r.balance_residual_at_x, r.balance_residual_at_Fx, idx[0], wv[0], idx[1],
                      wv[1], idx[2], wv[2]);
        os << buf;
    }
}

void write_csv(std::ostream& os, const std::vector<ConeReport>& rows) {
    os << "t,eps_t,xt_x,xt_y,case,n_in_C,n_in_D,n_outside\n";
    char buf[256];
    for (const ConeReport& r : rows) {
        int counts[3] = {0, 0, 0};
        for (ConeClass c : r.classification) ++counts[static_cast<int>(c)];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d,%d,%d,%d\n", r.t, r.eps_t,
                      r.x_t.x, r.x_t.y, static_cast<int>(r.case_label) + 1, counts[0], counts[1],
                      counts[2]);
        os << buf;
    }
}

}  // namespace moeb
