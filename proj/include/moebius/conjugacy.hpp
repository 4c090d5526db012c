#pragma once

// The boundary identification between the base plane and a compactly
// supported deformation of it, its Moebius defect, and the induced geodesic
// conjugacy. Both spaces share the disk chart, so rays that eventually leave
// the deformation support identify the two ideal boundaries point by point;
// the boundary map is the identity on circle parameters and every f / f^{-1}
// site below is routed through boundary_map to keep that choice explicit.

#include <iosfwd>
#include <utility>
#include <vector>

#include "moebius/boundary.hpp"
#include "moebius/geometry.hpp"
#include "moebius/manifold.hpp"

namespace moeb {

// The base plane, a deformation of it, and a shared evaluation sample.
class DeformationPair {
  public:
    DeformationPair(PerturbedSpace space0, PerturbedSpace space1, BoundarySample sample);

    const PerturbedSpace& space0() const { return space0_; }
    const PerturbedSpace& space1() const { return space1_; }
    const BoundarySample& sample() const { return sample_; }

  private:
    PerturbedSpace space0_;  // undeformed model
    PerturbedSpace space1_;  // deformed metric
    BoundarySample sample_;
};

// Image of the deformed unit tangent: base point of the output, the output
// tangent itself, and the closure residual of the defining normalization
// (the log derivative of the pulled-back visual metric at the forward
// endpoint, re-evaluated at the foot; zero in exact arithmetic).
struct ConjugacyResult {
    UnitTangent input;    // unit for space0
    UnitTangent output;   // unit for space1
    DiskPoint foot;       // base point of output
    double derivative_residual = 0.0;
};

void write_csv(std::ostream& os, const std::vector<ConjugacyResult>& rows);

// Identification of the two ideal boundaries (the identity on angles).
IdealPoint boundary_map(const DeformationPair& pair, IdealPoint xi);

// Visual metrics of the two spaces on the shared sample: rho^{g0}_x and the
// pullback of rho^{g1}_y under the boundary map.
std::pair<SampledMetric, SampledMetric> pair_visuals(const DeformationPair& pair, DiskPoint x,
                                                     DiskPoint y);

// Max over probe basepoints of the Moebius defect between rho^{g0}_x and the
// pulled-back rho^{g1}_x; near zero exactly when the boundary map is Moebius.
double deformation_moebius_defect(const DeformationPair& pair,
                                  const std::vector<DiskPoint>& probes,
                                  const MoebiusOptions& opts = {});

// Geodesic conjugacy: v spans the bi-infinite geodesic (eta, xi) of the base
// plane; the image is the unit tangent on the deformed geodesic with the
// same ideal endpoints, based at the unique point where the derivative of
// the pulled-back visual metric equals 1 at xi.
ConjugacyResult conjugate(const DeformationPair& pair, const UnitTangent& v,
                          const MoebiusOptions& opts = {});

// Max/min-flip diagnostics of the derivative of the pulled-back visual
// metric of y with respect to the visual metric of x.
struct FlipReport {
    int argmax = 0;                       // sample index of the maximum
    int argmin = 0;                       // sample index of the minimum
    double dM = 0.0;                      // log of the maximum derivative
    int antipode_nearest = 0;             // sample index nearest i^{g0}_x(argmax point)
    double involution_residual = 0.0;     // angle gap between the two involutions at argmax
    DiskPoint foot;                       // conjugacy foot of the ray from x to argmax
    double foot_distance_residual = 0.0;  // |d_{g1}(y, foot) - dM|
    double foot_ray_residual = 0.0;       // d_{g1} gap between foot and the ray [y, argmax point)
};

// Checks that the derivative flips its extrema between a point and its
// involution and that the conjugacy foot realizes the d_M distance from y
// along the ray toward the maximizing direction.
FlipReport maxmin_flip_check(const DeformationPair& pair, DiskPoint x, DiskPoint y,
                             const MoebiusOptions& opts = {});

}  // namespace moeb
