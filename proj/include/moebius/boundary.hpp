#pragma once

// Calculus of diameter-one antipodal metrics on a finite boundary sample:
// cross-ratios, Moebius equivalence, metric derivatives and the d_M distance.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "moebius/geometry.hpp"

namespace moeb {

// Ordered list of distinct ideal-point angles in [0, 2*pi).
class BoundarySample {
  public:
    explicit BoundarySample(std::vector<double> angles);
    static BoundarySample uniform(int n, double offset = 0.0);

    int size() const { return static_cast<int>(angles_.size()); }
    double angle(int i) const { return angles_[i]; }
    IdealPoint point(int i) const { return IdealPoint(angles_[i]); }
    const std::vector<double>& angles() const { return angles_; }
    bool operator==(const BoundarySample& o) const { return angles_ == o.angles_; }

    // Index of the sampled angle nearest to a (circular distance).
    int nearest(double a) const;

  private:
    std::vector<double> angles_;
};

// Pairwise-distance matrix of a diameter-one antipodal metric on a sample.
class SampledMetric {
  public:
    SampledMetric(BoundarySample sample, std::vector<double> dist, double antipodal_tol = 1e-3);

    int size() const { return sample_.size(); }
    const BoundarySample& sample() const { return sample_; }
    double antipodal_tol() const { return antipodal_tol_; }
    double rho(int i, int j) const { return dist_[static_cast<size_t>(i) * size() + j]; }

    void write_csv(std::ostream& os) const;
    static SampledMetric read_csv(std::istream& is, double antipodal_tol = 1e-3);

    // Skips the diameter-one/antipodality checks (shape and symmetry are
    // still enforced); antipode_of reports NotAntipodalAtPoint on such data.
    static SampledMetric unchecked(BoundarySample sample, std::vector<double> dist,
                                   double antipodal_tol = 1e-3);

  private:
    struct Unchecked {};
    SampledMetric(BoundarySample sample, std::vector<double> dist, double antipodal_tol, Unchecked)
        : sample_(std::move(sample)), dist_(std::move(dist)), antipodal_tol_(antipodal_tol) {}

    BoundarySample sample_;
    std::vector<double> dist_;
    double antipodal_tol_;
};

struct DerivativeFunction {
    std::vector<double> values;
    double consistency_residual = 0.0;
    double max() const;
    double min() const;
    int argmax() const;
    int argmin() const;
};

struct MoebiusOptions {
    double tol_moebius = 1e-3;     // gate for derivative-based operations
    double maxmin_tol = 5e-2;      // sanity bound on max*min of the derivative
    std::uint64_t seed = 1;        // quadruple subsampling seed
    int quadruple_budget = 20000;  // cap on enumerated quadruples
    bool check_moebius = true;     // skip the defect gate when false
};

// [xi, xi', eta, eta'] = rho(i,k) rho(j,l) / (rho(i,l) rho(j,k)).
double cross_ratio(const SampledMetric& m, int i, int j, int k, int l);

// Max |log CR_1 - log CR_2| over (a budgeted subset of) distinct quadruples.
double moebius_defect(const SampledMetric& m1, const SampledMetric& m2,
                      std::uint64_t seed = 1, int quadruple_budget = 20000);

// d rho_2 / d rho_1 at sample index i via the three-point closed form; with
// no auxiliary pair given, the median over all admissible pairs.
double derivative(const SampledMetric& m1, const SampledMetric& m2, int i,
                  std::optional<std::pair<int, int>> aux = std::nullopt,
                  const MoebiusOptions& opts = {});

DerivativeFunction derivative_function(const SampledMetric& m1, const SampledMetric& m2,
                                       const MoebiusOptions& opts = {});

// d_M(rho_1, rho_2) = max_i log (d rho_2 / d rho_1)(xi_i).
double dM_distance(const SampledMetric& m1, const SampledMetric& m2,
                   const MoebiusOptions& opts = {});

// Index of the sampled antipode of i (argmax of rho(i, .), lowest index on ties).
int antipode_of(const SampledMetric& m, int i);

}  // namespace moeb
