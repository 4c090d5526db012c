#pragma once

// The circumcenter extension of the boundary identification: for each x the
// point F(x) minimizing y -> d_M(f* rho_x, rho_y), computed as a finite
// minimax of Busemann functions over the sample, together with the radius
// function r, balance certificates, quasi-isometry diagnostics, the adjoint
// identity of dF and the cone trichotomy of far-out basepoints.

#include <iosfwd>
#include <utility>
#include <vector>

#include "moebius/conjugacy.hpp"
#include "moebius/geometry.hpp"
#include "moebius/manifold.hpp"

namespace moeb {

// Per-basepoint cache: conjugacy feet z_i of the rays x -> xi_i and far
// anchors w_i beyond them, so that B_{g1}(y, z_i, xi_i) reduces to
// d_{g1}(y, w_i) - t_anchor up to an exponentially small truncation error.
struct FootAnchors {
    DiskPoint x;
    double t_anchor = 14.0;
    std::vector<DiskPoint> feet;     // z_i
    std::vector<DiskPoint> anchors;  // w_i, at arclength t_anchor past z_i toward xi_i
};

FootAnchors conjugacy_feet(const DeformationPair& pair, DiskPoint x, double t_anchor = 14.0);

// d_M(f* rho_x, rho_y) through the Busemann route: value and the per-sample
// log-derivative list B_{g1}(y, z_i, f(xi_i)).
std::pair<double, std::vector<double>> dM_pushforward(const DeformationPair& pair, DiskPoint x,
                                                      DiskPoint y);
std::pair<double, std::vector<double>> dM_pushforward(const DeformationPair& pair,
                                                      const FootAnchors& feet, DiskPoint y);

struct ExtendOptions {
    double grad_tol = 1e-5;   // stop when the min-norm subgradient is this small
    double step_tol = 1e-8;   // stop when the line search collapses below this
    int max_iters = 500;
    double armijo_c = 0.25;
    double delta_band = 0.0;  // argmax band width; 0 selects max(5e-3, 3 limit_tol N)
    double t_anchor = 14.0;
};

struct ExtensionResult {
    DiskPoint x;
    DiskPoint F_x;
    double r_x = 0.0;
    std::vector<int> argmax_band;
    std::vector<std::pair<int, double>> balanced_weights;  // <= 3 atoms
    double balance_residual_at_x = 0.0;
    double balance_residual_at_Fx = 0.0;
    int optimizer_iters = 0;
    bool converged = false;
};

void write_csv(std::ostream& os, const std::vector<ExtensionResult>& rows);

ExtensionResult circumcenter_extend(const DeformationPair& pair, DiskPoint x,
                                    const ExtendOptions& opts = {},
                                    const FootAnchors* cache = nullptr);

struct RProfile {
    std::vector<ExtensionResult> points;
    double spread = 0.0;  // max - min of r over the grid
};

RProfile r_profile(const DeformationPair& pair, const std::vector<DiskPoint>& grid,
                   const ExtendOptions& opts = {});

struct QisomReport {
    double M_hat = 0.0;             // max observed r over the tested points
    double max_upper_excess = 0.0;  // max of d1(F x, F y) - d0(x, y) - 2 M_hat
    double max_lower_excess = 0.0;  // max of d0(x, y) - 2 M_hat - d1(F x, F y)
    double max_bilipschitz = 0.0;   // worst violation of the sqrt(b) sandwich
    bool pass = false;
};

QisomReport qisom_check(const DeformationPair& pair, const std::vector<std::pair<DiskPoint, DiskPoint>>& pairs,
                        double tol = 1e-2, const ExtendOptions& opts = {});

struct AdjointReport {
    DiskPoint x;
    DiskPoint F_x;
    double h = 0.0;
    double max_residual = 0.0;  // worst |<dF v, u_i>_g1 - <v, b_i>_g0| over band x basis
};

AdjointReport dF_adjoint_check(const DeformationPair& pair, DiskPoint x, double h,
                               const ExtendOptions& opts = {});

enum class ConeClass { in_C, in_D, outside };
enum class CaseLabel { case1, case2, case3 };

struct ConeReport {
    double t = 0.0;
    double eps_t = 0.0;  // max angle at x_t between xi0 and the shadow of B(x0, R)
    DiskPoint x_t;
    std::vector<ConeClass> classification;  // one entry per sample direction
    CaseLabel case_label = CaseLabel::case3;
};

void write_csv(std::ostream& os, const std::vector<ConeReport>& rows);

ConeReport cone_analysis(const DeformationPair& pair, DiskPoint x0, double R, double theta0,
                         double t, const ExtendOptions& opts = {});

// Min-norm point of the convex hull of unit directions: weights over the
// input list (at most three nonzero) and the norm of the combination; a
// near-zero residual certifies that the direction set is balanced.
std::pair<std::vector<double>, double> caratheodory_balance(const std::vector<Vec2>& directions);

}  // namespace moeb
