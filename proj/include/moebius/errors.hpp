#pragma once

#include <stdexcept>
#include <string>

namespace moeb {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidQuadruple : Error {
    explicit InvalidQuadruple(const std::string& m = "quadruple indices must be pairwise distinct") : Error(m) {}
};
struct SampleMismatch : Error {
    explicit SampleMismatch(const std::string& m = "metrics live on different boundary samples") : Error(m) {}
};
struct NotMoebiusEquivalent : Error {
    explicit NotMoebiusEquivalent(const std::string& m = "metrics are not Moebius equivalent within tolerance") : Error(m) {}
};
struct InsufficientSample : Error {
    explicit InsufficientSample(const std::string& m = "boundary sample too small") : Error(m) {}
};
struct NotAntipodalAtPoint : Error {
    explicit NotAntipodalAtPoint(const std::string& m = "no sampled point within tolerance of distance one") : Error(m) {}
};
struct InfiniteGromovProduct : Error {
    explicit InfiniteGromovProduct(const std::string& m = "Gromov product diverges for coinciding ideal points") : Error(m) {}
};
struct IntegrationFailure : Error {
    explicit IntegrationFailure(const std::string& m = "geodesic integration failed") : Error(m) {}
};
struct BvpFailure : Error {
    explicit BvpFailure(const std::string& m = "geodesic boundary-value solve did not converge") : Error(m) {}
};
struct LimitNotConverged : Error {
    explicit LimitNotConverged(const std::string& m = "truncated limit did not converge before R_max") : Error(m) {}
};
struct InvalidParameter : Error {
    explicit InvalidParameter(const std::string& m = "invalid parameter") : Error(m) {}
};
struct CurvatureBoundViolated : Error {
    explicit CurvatureBoundViolated(const std::string& m = "metric violates the upper curvature bound") : Error(m) {}
};

}  // namespace moeb
