#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ads {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Face = std::array<int, 3>;

enum class ErrorKind {
    InvalidArgument,
    UnmatchedBoundaryVertex,
    NonManifoldAfterMerge,
    NonManifold,
    OpenMesh,
    RemeshDegenerate,
    FillFailed,
    ZeroNormal,
    SingularEdgeSystem,
    DegenerateFace,
    NoConvergence,
    SingularTensor,
    EmptyLevelSet,
    NonManifoldExtraction,
    ProjectionDiverged,
    Io,
    Config,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// The unit cell is [-1,1)^3 with period 2 along every axis.
namespace torus {

inline constexpr double kPeriod = 2.0;
inline constexpr double kHalf = 1.0;

inline double wrap(double x) {
    double r = std::fmod(x + kHalf, kPeriod);
    if (r < 0.0) r += kPeriod;
    r -= kHalf;
    if (r >= kHalf) r -= kPeriod;
    return r;
}

inline Vec3 wrap(const Vec3& p) { return {wrap(p.x()), wrap(p.y()), wrap(p.z())}; }

// Translate a difference vector into the representative with components in [-1,1].
inline Vec3 min_image(Vec3 d) {
    for (int i = 0; i < 3; ++i) {
        if (d[i] > kHalf || d[i] < -kHalf) d[i] -= kPeriod * std::round(d[i] / kPeriod);
    }
    return d;
}

inline Vec3 unfold(const Vec3& p, const Vec3& ref) { return ref + min_image(p - ref); }

}  // namespace torus
}  // namespace ads
