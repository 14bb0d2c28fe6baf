#pragma once

// Scalar-generic per-face kernels used to differentiate the discrete cell
// energy. They mirror face_frame, face_second_form, face_kinematics and the
// element quadrature rules, but are written for any scalar type.

#include <array>

#include "ads/membrane.hpp"
#include "ads/voigt.hpp"

namespace ads::kernel {

template <typename T>
using V3 = Eigen::Matrix<T, 3, 1>;
template <typename T>
using M3 = Eigen::Matrix<T, 3, 3>;

template <typename T>
struct Frame {
    V3<T> t1, t2, normal;
    T area;
    std::array<Eigen::Matrix<T, 2, 1>, 3> grad_phi;
    Eigen::Matrix<T, 3, 1> second_form;  // (b11, b22, b12)
};

template <typename T>
T norm3(const V3<T>& v) {
    using std::sqrt;
    return sqrt(v.squaredNorm());
}

template <typename T>
Frame<T> frame(const std::array<V3<T>, 3>& x, const std::array<V3<T>, 3>& n) {
    Frame<T> f;
    const V3<T> e1 = x[1] - x[0], e2 = x[2] - x[0];
    const V3<T> cross = e1.cross(e2);
    const T len = norm3(cross);
    f.area = len / 2.0;
    f.normal = cross / len;
    f.t1 = e1 / norm3(e1);
    f.t2 = f.normal.cross(f.t1);
    for (int i = 0; i < 3; ++i) {
        const V3<T> grad = f.normal.cross(V3<T>(x[(i + 2) % 3] - x[(i + 1) % 3])) / len;
        f.grad_phi[i] << grad.dot(f.t1), grad.dot(f.t2);
    }
    // Edge equations, solved by Cramer's rule.
    M3<T> a;
    V3<T> rhs;
    for (int k = 0; k < 3; ++k) {
        const int i = k, j = (k + 1) % 3;
        const V3<T> l = x[j] - x[i];
        const T l1 = l.dot(f.t1), l2 = l.dot(f.t2);
        a(k, 0) = l1 * l1;
        a(k, 1) = l2 * l2;
        a(k, 2) = 2.0 * l1 * l2;
        rhs[k] = -V3<T>(n[j] - n[i]).dot(l);
    }
    const T det = a.determinant();
    for (int c = 0; c < 3; ++c) {
        M3<T> ac = a;
        ac.col(c) = rhs;
        f.second_form[c] = ac.determinant() / det;
    }
    return f;
}

template <typename T>
M3<T> rotation(const V3<T>& from, const V3<T>& to) {
    const T c = from.dot(to);
    const V3<T> axis = from.cross(to);
    M3<T> k;
    k << T(0.0), -axis.z(), axis.y(), axis.z(), T(0.0), -axis.x(), -axis.y(), axis.x(), T(0.0);
    return M3<T>::Identity() + k + k * k / (1.0 + c);
}

/// Strain rows (3 x 9) split into the tangential part and per-corner normal blocks.
template <typename T>
struct Kinematics {
    Eigen::Matrix<T, 3, 9> tangential;
    std::array<M3<T>, 3> normal;

    Eigen::Matrix<T, 3, 9> at(const Vec3& bary) const {
        Eigen::Matrix<T, 3, 9> b = tangential;
        for (int i = 0; i < 3; ++i) b.template block<3, 3>(0, 3 * i) -= bary[i] * normal[i];
        return b;
    }
};

template <typename T>
Kinematics<T> kinematics(const Frame<T>& f, const std::array<V3<T>, 3>& n, StrainScheme scheme) {
    Kinematics<T> k;
    Eigen::Matrix<T, 2, 3> proj;
    proj.row(0) = f.t1.transpose();
    proj.row(1) = f.t2.transpose();
    const V3<T> bv(f.second_form[0], f.second_form[1], 2.0 * f.second_form[2]);
    for (int i = 0; i < 3; ++i) {
        Eigen::Matrix<T, 2, 3> t = proj;
        if (scheme == StrainScheme::Corrected) t = proj * rotation<T>(n[i], f.normal);
        const auto& g = f.grad_phi[i];
        k.tangential.template block<1, 3>(0, 3 * i) = g[0] * t.row(0);
        k.tangential.template block<1, 3>(1, 3 * i) = g[1] * t.row(1);
        k.tangential.template block<1, 3>(2, 3 * i) = g[1] * t.row(0) + g[0] * t.row(1);
        if (scheme == StrainScheme::PlaneStress)
            k.normal[i].setZero();
        else
            k.normal[i] = bv * n[i].transpose();
    }
    return k;
}

/// In-plane Voigt strain of the unit macro-strain `slot`.
template <typename T>
V3<T> projected_unit_strain(const Frame<T>& f, int slot) {
    const auto [i, j] = voigt::kIndexPairs[slot];
    if (i == j) return V3<T>(f.t1[i] * f.t1[i], f.t2[i] * f.t2[i], 2.0 * f.t1[i] * f.t2[i]);
    return V3<T>(f.t1[i] * f.t1[j], f.t2[i] * f.t2[j], f.t1[i] * f.t2[j] + f.t1[j] * f.t2[i]);
}

/// Face contribution to W_IJ = A C_IJ with the corner displacements held
/// fixed; the last entry is the face area. Upper triangle in row-major order.
template <typename T>
Eigen::Matrix<T, 22, 1> cell_energy(const std::array<V3<T>, 3>& x, const std::array<V3<T>, 3>& n,
                                    const Eigen::Matrix<double, 9, 6>& u, const LameSet& lame,
                                    StrainScheme scheme) {
    const Frame<T> f = frame<T>(x, n);
    const Kinematics<T> k = kinematics<T>(f, n, scheme);
    const Mat3 d = membrane_matrix(lame);
    static const std::array<Vec3, 3> kMidpoints{Vec3(0.5, 0.5, 0.0), Vec3(0.0, 0.5, 0.5),
                                                Vec3(0.5, 0.0, 0.5)};
    std::array<Eigen::Matrix<T, 3, 6>, 3> quad;
    for (int q = 0; q < 3; ++q) quad[q] = k.at(kMidpoints[q]) * u.cast<T>();
    const Eigen::Matrix<T, 3, 6> centre = k.at(Vec3::Constant(1.0 / 3.0)) * u.cast<T>();
    Eigen::Matrix<T, 3, 6> eps;
    for (int s = 0; s < 6; ++s) eps.col(s) = projected_unit_strain<T>(f, s);
    const Eigen::Matrix<T, 3, 6> d_eps = d.cast<T>() * eps;

    Eigen::Matrix<T, 22, 1> out;
    int idx = 0;
    for (int a = 0; a < 6; ++a)
        for (int b = a; b < 6; ++b) {
            T w = eps.col(a).dot(d_eps.col(b)) + centre.col(a).dot(d_eps.col(b)) +
                  centre.col(b).dot(d_eps.col(a));
            T relax = quad[0].col(a).dot(d.cast<T>() * quad[0].col(b));
            relax += quad[1].col(a).dot(d.cast<T>() * quad[1].col(b));
            relax += quad[2].col(a).dot(d.cast<T>() * quad[2].col(b));
            out[idx++] = f.area * w + (f.area / 3.0) * relax;
        }
    out[21] = f.area;
    return out;
}

/// Angle-weighted unit face normal per corner, the summands of the vertex normals.
template <typename T>
Eigen::Matrix<T, 9, 1> normal_summands(const std::array<V3<T>, 3>& x) {
    using std::atan2;
    const V3<T> cross = V3<T>(x[1] - x[0]).cross(V3<T>(x[2] - x[0]));
    const V3<T> nf = cross / norm3(cross);
    Eigen::Matrix<T, 9, 1> out;
    for (int c = 0; c < 3; ++c) {
        const V3<T> u = x[(c + 1) % 3] - x[c], v = x[(c + 2) % 3] - x[c];
        const T theta = atan2(norm3(V3<T>(u.cross(v))), u.dot(v));
        out.template segment<3>(3 * c) = theta * nf;
    }
    return out;
}

}  // namespace ads::kernel
