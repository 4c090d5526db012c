#include "moebius/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "moebius/errors.hpp"

namespace moeb {

BoundarySample::BoundarySample(std::vector<double> angles) : angles_(std::move(angles)) {
    if (angles_.size() < 4) throw InsufficientSample("boundary sample needs at least 4 points");
    for (double& a : angles_) a = wrap_angle(a);
    std::sort(angles_.begin(), angles_.end());
    for (size_t i = 1; i < angles_.size(); ++i)
        if (angles_[i] == angles_[i - 1]) throw InvalidParameter("boundary sample angles must be distinct");
}

BoundarySample BoundarySample::uniform(int n, double offset) {
    std::vector<double> a(n);
    for (int i = 0; i < n; ++i) a[i] = wrap_angle(offset + kTwoPi * i / n);
    return BoundarySample(std::move(a));
}

int BoundarySample::nearest(double a) const {
    int best = 0;
    double bd = 10.0;
    for (int i = 0; i < size(); ++i) {
        double d = std::abs(angle_diff(angles_[i], a));
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return best;
}

SampledMetric::SampledMetric(BoundarySample sample, std::vector<double> dist, double antipodal_tol)
    : sample_(std::move(sample)), dist_(std::move(dist)), antipodal_tol_(antipodal_tol) {
    const int n = sample_.size();
    if (dist_.size() != static_cast<size_t>(n) * n) throw InvalidParameter("distance matrix size mismatch");
    if (antipodal_tol_ <= 0.0) throw InvalidParameter("antipodal_tol must be positive");
    double global_max = 0.0;
    for (int i = 0; i < n; ++i) {
        if (rho(i, i) != 0.0) throw InvalidParameter("distance matrix diagonal must be zero");
        double row_max = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double v = rho(i, j);
            if (!(v > 0.0)) throw InvalidParameter("off-diagonal distances must be strictly positive");
            if (v != rho(j, i)) throw InvalidParameter("distance matrix must be symmetric");
            row_max = std::max(row_max, v);
        }
        if (row_max < 1.0 - antipodal_tol_)
            throw NotAntipodalAtPoint("row max below antipodality tolerance");
        global_max = std::max(global_max, row_max);
    }
    if (global_max > 1.0 || global_max < 1.0 - antipodal_tol_)
        throw InvalidParameter("metric diameter must be one within tolerance");
}

SampledMetric SampledMetric::unchecked(BoundarySample sample, std::vector<double> dist,
                                       double antipodal_tol) {
    SampledMetric m(std::move(sample), {}, antipodal_tol, Unchecked{});
    const int n = m.sample_.size();
    if (dist.size() != static_cast<size_t>(n) * n) throw InvalidParameter("distance matrix size mismatch");
    m.dist_ = std::move(dist);
    for (int i = 0; i < n; ++i) {
        if (m.rho(i, i) != 0.0) throw InvalidParameter("distance matrix diagonal must be zero");
        for (int j = i + 1; j < n; ++j) {
            if (!(m.rho(i, j) > 0.0)) throw InvalidParameter("off-diagonal distances must be strictly positive");
            if (m.rho(i, j) != m.rho(j, i)) throw InvalidParameter("distance matrix must be symmetric");
        }
    }
    return m;
}

void SampledMetric::write_csv(std::ostream& os) const {
    const int n = size();
    char buf[40];
    for (int i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", sample_.angle(i));
        os << buf << (i + 1 < n ? ',' : '\n');
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", rho(i, j));
            os << buf << (j + 1 < n ? ',' : '\n');
        }
}

SampledMetric SampledMetric::read_csv(std::istream& is, double antipodal_tol) {
    std::string line;
    if (!std::getline(is, line)) throw InvalidParameter("empty CSV");
    auto parse_row = [](const std::string& s) {
        std::vector<double> row;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        return row;
    };
    std::vector<double> angles = parse_row(line);
    const size_t n = angles.size();
    std::vector<double> dist;
    dist.reserve(n * n);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto row = parse_row(line);
        if (row.size() != n) throw InvalidParameter("CSV row length mismatch");
        dist.insert(dist.end(), row.begin(), row.end());
    }
    return SampledMetric(BoundarySample(std::move(angles)), std::move(dist), antipodal_tol);
}

double DerivativeFunction::max() const { return *std::max_element(values.begin(), values.end()); }
double DerivativeFunction::min() const { return *std::min_element(values.begin(), values.end()); }
int DerivativeFunction::argmax() const {
    return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}
int DerivativeFunction::argmin() const {
    return static_cast<int>(std::min_element(values.begin(), values.end()) - values.begin());
}

double cross_ratio(const SampledMetric& m, int i, int j, int k, int l) {
    const int n = m.size();
    for (int v : {i, j, k, l})
        if (v < 0 || v >= n) throw InvalidParameter("index out of range");
    if (i == j || i == k || i == l || j == k || j == l || k == l) throw InvalidQuadruple();
    return m.rho(i, k) * m.rho(j, l) / (m.rho(i, l) * m.rho(j, k));
}

namespace {

void require_same_sample(const SampledMetric& m1, const SampledMetric& m2) {
    if (!(m1.sample() == m2.sample())) throw SampleMismatch();
}

// Defect of one 4-subset: the two independent log-cross-ratio differences
// and their sum cover all orderings up to sign.
double quadruple_defect(const SampledMetric& m1, const SampledMetric& m2, int i, int j, int k, int l) {
    double d1 = std::log(cross_ratio(m1, i, j, k, l)) - std::log(cross_ratio(m2, i, j, k, l));
    double d2 = std::log(cross_ratio(m1, i, k, j, l)) - std::log(cross_ratio(m2, i, k, j, l));
    // the third arrangement's log cross-ratio is the difference of the first two
    return std::max({std::abs(d1), std::abs(d2), std::abs(d1 - d2)});
}

}  // namespace

double moebius_defect(const SampledMetric& m1, const SampledMetric& m2,
                      std::uint64_t seed, int quadruple_budget) {
    require_same_sample(m1, m2);
    const int n = m1.size();
    double total = static_cast<double>(n) * (n - 1) * (n - 2) * (n - 3) / 24.0;
    double defect = 0.0;
    if (total <= quadruple_budget) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                for (int k = j + 1; k < n; ++k)
                    for (int l = k + 1; l < n; ++l)
                        defect = std::max(defect, quadruple_defect(m1, m2, i, j, k, l));
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> pick(0, n - 1);
        int done = 0;
        while (done < quadruple_budget) {
            int a = pick(rng), b = pick(rng), c = pick(rng), d = pick(rng);
            if (a == b || a == c || a == d || b == c || b == d || c == d) continue;
            defect = std::max(defect, quadruple_defect(m1, m2, a, b, c, d));
            ++done;
        }
    }
    return defect;
}

namespace {

double derivative_from_pair(const SampledMetric& m1, const SampledMetric& m2, int i, int j, int k) {
    return m2.rho(i, j) * m2.rho(i, k) * m1.rho(j, k) / (m1.rho(i, j) * m1.rho(i, k) * m2.rho(j, k));
}

void gate_moebius(const SampledMetric& m1, const SampledMetric& m2, const MoebiusOptions& opts) {
    require_same_sample(m1, m2);
    if (m1.size() < 3) throw InsufficientSample();
    if (!opts.check_moebius) return;
    double defect = moebius_defect(m1, m2, opts.seed, opts.quadruple_budget);
    if (defect > opts.tol_moebius)
        throw NotMoebiusEquivalent("moebius defect " + std::to_string(defect) + " above tolerance");
}

double median_derivative(const SampledMetric& m1, const SampledMetric& m2, int i, double* spread) {
    const int n = m1.size();
    std::vector<double> vals;
    vals.reserve(static_cast<size_t>(n - 1) * (n - 2) / 2);
    for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        for (int k = j + 1; k < n; ++k) {
            if (k == i) continue;
            vals.push_back(derivative_from_pair(m1, m2, i, j, k));
        }
    }
    auto mid = vals.begin() + vals.size() / 2;
    std::nth_element(vals.begin(), mid, vals.end());
    double med = *mid;
    if (spread) {
        double s = 0.0;
        for (double v : vals) s = std::max(s, std::abs(std::log(v) - std::log(med)));
        *spread = s;
    }
    return med;
}

}  // namespace

double derivative(const SampledMetric& m1, const SampledMetric& m2, int i,
                  std::optional<std::pair<int, int>> aux, const MoebiusOptions& opts) {
    gate_moebius(m1, m2, opts);
    const int n = m1.size();
    if (i < 0 || i >= n) throw InvalidParameter("index out of range");
    if (aux) {
        auto [j, k] = *aux;
        if (j < 0 || j >= n || k < 0 || k >= n || j == i || k == i || j == k)
            throw InvalidParameter("auxiliary pair must be two indices distinct from i");
        return derivative_from_pair(m1, m2, i, j, k);
    }
    return median_derivative(m1, m2, i, nullptr);
}

DerivativeFunction derivative_function(const SampledMetric& m1, const SampledMetric& m2,
                                       const MoebiusOptions& opts) {
    gate_moebius(m1, m2, opts);
    const int n = m1.size();
    DerivativeFunction out;
    out.values.resize(n);
    for (int i = 0; i < n; ++i) {
        double spread = 0.0;
        out.values[i] = median_derivative(m1, m2, i, &spread);
        out.consistency_residual = std::max(out.consistency_residual, spread);
    }
    double prod = out.max() * out.min();
    if (std::abs(prod - 1.0) > opts.maxmin_tol)
        throw Error("derivative max*min = " + std::to_string(prod) + " violates the unit-product relation");
    return out;
}

double dM_distance(const SampledMetric& m1, const SampledMetric& m2, const MoebiusOptions& opts) {
    DerivativeFunction d = derivative_function(m1, m2, opts);
    return std::log(d.max());
}

int antipode_of(const SampledMetric& m, int i) {
    const int n = m.size();
    if (i < 0 || i >= n) throw InvalidParameter("index out of range");
    int best = -1;
    double bv = -1.0;
    for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        if (m.rho(i, j) > bv) {  // strict: lowest index wins ties
            bv = m.rho(i, j);
            best = j;
        }
    }
    if (bv < 1.0 - m.antipodal_tol()) throw NotAntipodalAtPoint();
    return best;
}

}  // namespace moeb
