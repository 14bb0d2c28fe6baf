#pragma once

#include <array>
#include <string_view>

#include "ads/core.hpp"
#include "ads/geometry.hpp"

namespace ads {

struct LameSet {
    double lambda = 0.0;
    double mu = 0.0;
    double lambda0 = 0.0;  // 2 lambda mu / (lambda + 2 mu)

    /// Throws InvalidArgument unless mu > 0 and lambda + 2 mu > 0.
    static LameSet from_lame(double lambda, double mu);
};

/// Throws InvalidArgument unless Y > 0 and -1 < nu < 0.5.
LameSet lame_from_engineering(double youngs_modulus, double poisson_ratio);

/// Membrane elasticity matrix acting on in-plane Voigt strains (e11, e22, 2 e12).
Mat3 membrane_matrix(const LameSet& lame);

enum class StrainScheme {
    Corrected,    // rotated vertex tangent planes plus curvature term
    Uncorrected,  // face projection plus curvature term
    PlaneStress,  // face projection only
};

StrainScheme parse_scheme(std::string_view name);
const char* to_string(StrainScheme scheme);

using StrainMatrix = Eigen::Matrix<double, 3, 9>;
using ElementStiffness = Eigen::Matrix<double, 9, 9>;
using ElementLoads = Eigen::Matrix<double, 9, 6>;

/// Strain-displacement operator of a face split into its constant
/// tangential part and the barycentric-weighted curvature rows.
struct FaceKinematics {
    StrainMatrix tangential = StrainMatrix::Zero();
    std::array<Eigen::Matrix<double, 3, 3>, 3> normal;  // [b] n_i^T per corner

    /// Full map at barycentric coordinates `bary`: tangential - sum_i bary_i normal_i.
    StrainMatrix at(const Vec3& bary) const;
};

FaceKinematics face_kinematics(const FaceGeometry& face, const std::array<Vec3, 3>& corner_normals,
                               StrainScheme scheme);

inline StrainMatrix strain_displacement(const FaceGeometry& face,
                                        const std::array<Vec3, 3>& corner_normals,
                                        StrainScheme scheme, const Vec3& bary) {
    return face_kinematics(face, corner_normals, scheme).at(bary);
}

/// In-plane Voigt strain (e11, e22, 2 e12) of P eps P^T in the face frame.
Vec3 projected_strain(const FaceGeometry& face, const Mat3& eps);

/// Lifts an in-plane Voigt strain (e11, e22, 2 e12) to a world tensor.
Mat3 strain_to_world(const FaceGeometry& face, const Vec3& strain);

/// Edge-midpoint rule: sum_q area/3 B_q^T D B_q.
ElementStiffness element_stiffness(const FaceGeometry& face, const FaceKinematics& kin,
                                   const LameSet& lame);

/// Centroid rule: -area B_c^T D [P eps P^T].
Eigen::Matrix<double, 9, 1> element_load(const FaceGeometry& face, const FaceKinematics& kin,
                                         const LameSet& lame, const Mat3& eps);

/// Loads for the six unit macro-strains, one per column.
ElementLoads element_unit_loads(const FaceGeometry& face, const FaceKinematics& kin,
                                const LameSet& lame);

}  // namespace ads
