#include "ads/membrane.hpp"

#include "ads/voigt.hpp"

namespace ads {

LameSet LameSet::from_lame(double lambda, double mu) {
    if (!(mu > 0.0) || !(lambda + 2.0 * mu > 0.0))
        throw Error(ErrorKind::InvalidArgument, "Lame parameters violate mu > 0, lambda + 2 mu > 0");
    return {lambda, mu, 2.0 * lambda * mu / (lambda + 2.0 * mu)};
}

LameSet lame_from_engineering(double youngs_modulus, double poisson_ratio) {
    if (!(youngs_modulus > 0.0) || !(poisson_ratio > -1.0) || !(poisson_ratio < 0.5))
        throw Error(ErrorKind::InvalidArgument, "material requires Y > 0 and -1 < nu < 0.5");
    const double y = youngs_modulus, nu = poisson_ratio;
    return LameSet::from_lame(y * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), y / (2.0 * (1.0 + nu)));
}

Mat3 membrane_matrix(const LameSet& lame) {
    const double l0 = lame.lambda0, mu = lame.mu;
    Mat3 d;
    d << l0 + 2.0 * mu, l0, 0.0, l0, l0 + 2.0 * mu, 0.0, 0.0, 0.0, mu;
    return d;
}

StrainScheme parse_scheme(std::string_view name) {
    if (name == "corrected") return StrainScheme::Corrected;
    if (name == "uncorrected") return StrainScheme::Uncorrected;
    if (name == "plane-stress" || name == "plane_stress") return StrainScheme::PlaneStress;
    throw Error(ErrorKind::Config, "unknown scheme '" + std::string(name) + "'");
}

const char* to_string(StrainScheme scheme) {
    switch (scheme) {
        case StrainScheme::Corrected: return "corrected";
        case StrainScheme::Uncorrected: return "uncorrected";
        case StrainScheme::PlaneStress: return "plane-stress";
    }
    return "corrected";
}

StrainMatrix FaceKinematics::at(const Vec3& bary) const {
    StrainMatrix b = tangential;
    for (int i = 0; i < 3; ++i) b.block<3, 3>(0, 3 * i) -= bary[i] * normal[i];
    return b;
}

FaceKinematics face_kinematics(const FaceGeometry& face, const std::array<Vec3, 3>& corner_normals,
                               StrainScheme scheme) {
    FaceKinematics k;
    const Eigen::Matrix<double, 2, 3> proj = face.tangent_basis().transpose();
    const Mat2& b = face.second_form;
    const Vec3 bv(b(0, 0), b(1, 1), 2.0 * b(0, 1));
    for (int i = 0; i < 3; ++i) {
        Eigen::Matrix<double, 2, 3> tangential = proj;
        if (scheme == StrainScheme::Corrected)
            tangential = proj * rotation_between(corner_normals[i], face.normal);
        const Vec2& g = face.grad_phi[i];
        auto block = k.tangential.block<3, 3>(0, 3 * i);
        block.row(0) = g[0] * tangential.row(0);
        block.row(1) = g[1] * tangential.row(1);
        block.row(2) = g[1] * tangential.row(0) + g[0] * tangential.row(1);
        if (scheme == StrainScheme::PlaneStress)
            k.normal[i].setZero();
        else
            k.normal[i] = bv * corner_normals[i].transpose();
    }
    return k;
}

Vec3 projected_strain(const FaceGeometry& face, const Mat3& eps) {
    const auto t = face.tangent_basis();
    const Mat2 e = t.transpose() * eps * t;
    return {e(0, 0), e(1, 1), 2.0 * e(0, 1)};
}

Mat3 strain_to_world(const FaceGeometry& face, const Vec3& strain) {
    Mat2 e;
    e << strain[0], 0.5 * strain[2], 0.5 * strain[2], strain[1];
    const auto t = face.tangent_basis();
    return t * e * t.transpose();
}

ElementStiffness element_stiffness(const FaceGeometry& face, const FaceKinematics& kin,
                                   const LameSet& lame) {
    const Mat3 d = membrane_matrix(lame);
    ElementStiffness k = ElementStiffness::Zero();
    static const std::array<Vec3, 3> kMidpoints{Vec3(0.5, 0.5, 0.0), Vec3(0.0, 0.5, 0.5),
                                                Vec3(0.5, 0.0, 0.5)};
    for (const Vec3& q : kMidpoints) {
        const StrainMatrix b = kin.at(q);
        k.noalias() += (face.area / 3.0) * b.transpose() * d * b;
    }
    return 0.5 * (k + k.transpose());
}

Eigen::Matrix<double, 9, 1> element_load(const FaceGeometry& face, const FaceKinematics& kin,
                                         const LameSet& lame, const Mat3& eps) {
    const StrainMatrix b = kin.at(Vec3::Constant(1.0 / 3.0));
    return -face.area * b.transpose() * membrane_matrix(lame) * projected_strain(face, eps);
}

ElementLoads element_unit_loads(const FaceGeometry& face, const FaceKinematics& kin,
                                const LameSet& lame) {
    const StrainMatrix b = kin.at(Vec3::Constant(1.0 / 3.0));
    const Eigen::Matrix<double, 9, 3> bd = -face.area * b.transpose() * membrane_matrix(lame);
    ElementLoads f;
    for (int s = 0; s < 6; ++s) f.col(s) = bd * projected_strain(face, voigt::unit_strain(s));
    return f;
}

}  // namespace ads
