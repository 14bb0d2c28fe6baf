#pragma once

#include <array>

#include "ads/core.hpp"

namespace ads {

// World-space symmetric tensors use the ordering (11, 22, 33, 23, 13, 12).
// Strain vectors carry a factor 2 on the shear entries, so that
// eps : C : eps == strain_to_voigt(eps)^T * C * strain_to_voigt(eps)
// with C(I, J) holding the tensor component C^{ijkl}.
namespace voigt {

inline constexpr std::array<std::array<int, 2>, 6> kIndexPairs{
    {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}}};

/// Voigt slot of the index pair (i, j).
inline int slot(int i, int j) { return i == j ? i : 6 - i - j; }

inline Vec6 strain_to_voigt(const Mat3& e) {
    Vec6 v;
    v << e(0, 0), e(1, 1), e(2, 2), 2.0 * e(1, 2), 2.0 * e(0, 2), 2.0 * e(0, 1);
    return v;
}

inline Mat3 voigt_to_strain(const Vec6& v) {
    Mat3 e;
    e << v[0], 0.5 * v[5], 0.5 * v[4], 0.5 * v[5], v[1], 0.5 * v[3], 0.5 * v[4], 0.5 * v[3], v[2];
    return e;
}

/// Unit macro-strain whose Voigt strain vector is the I-th basis vector.
inline Mat3 unit_strain(int slot_index) {
    const auto [i, j] = kIndexPairs[slot_index];
    Mat3 e = Mat3::Zero();
    if (i == j) {
        e(i, i) = 1.0;
    } else {
        e(i, j) = e(j, i) = 0.5;
    }
    return e;
}

/// Scaling that turns a Voigt tensor into its orthonormal (Mandel) form,
/// whose eigenvalues are those of the operator on symmetric matrices.
inline Mat6 mandel(const Mat6& c) {
    Vec6 w;
    const double r2 = std::sqrt(2.0);
    w << 1, 1, 1, r2, r2, r2;
    return w.asDiagonal() * c * w.asDiagonal();
}

}  // namespace voigt

/// Symmetric fourth-order tensor in Voigt form.
class Tensor4Voigt {
public:
    Tensor4Voigt() : c_(Mat6::Zero()) {}
    explicit Tensor4Voigt(const Mat6& c) : c_(c) {}

    const Mat6& matrix() const { return c_; }
    Mat6& matrix() { return c_; }
    double operator()(int i, int j) const { return c_(i, j); }
    double& operator()(int i, int j) { return c_(i, j); }

    /// Component C^{ijkl} from tensor indices in 0..2.
    double component(int i, int j, int k, int l) const;

    /// eps : C : eps
    double energy(const Mat3& eps) const {
        const Vec6 s = voigt::strain_to_voigt(eps);
        return s.dot(c_ * s);
    }
    /// Sum of the eigenvalues of the operator on symmetric matrices.
    double eigenvalue_sum() const { return voigt::mandel(c_).trace(); }
    Vec6 mandel_eigenvalues() const;

    void symmetrize() { c_ = 0.5 * (c_ + c_.transpose()).eval(); }

private:
    Mat6 c_;
};

/// (1/9) sum_ij C^{iijj}, the energy under a hydrostatic strain I/3.
double bulk_modulus(const Tensor4Voigt& c);
/// eps : C : eps
inline double ads(const Tensor4Voigt& c, const Mat3& eps) { return c.energy(eps); }
/// ||A - B||_F / ||A||_F on the tensor components. Throws InvalidArgument if A = 0.
double tensor_rel_error(const Tensor4Voigt& a, const Tensor4Voigt& b);

}  // namespace ads
