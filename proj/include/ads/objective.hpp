#pragma once

#include <array>
#include <string>
#include <string_view>

#include "ads/voigt.hpp"

namespace ads {

enum class ObjectiveKind {
    Bulk,               // (1/9) sum_ij C^{iijj}
    Component,          // a single C^{ijkl}
    DirectionalYoung,   // 1 / (zz : C^-1 : zz)
    StrainEnergy,       // eps : C : eps
    DeviatoricAverage,  // mean of R s R^T : C : R s R^T over all rotations R
    CustomLinear,       // sum_IJ W_IJ C_IJ on the Voigt matrix
    Poisson,            // sum of the two lateral contractions under uniaxial z strain
};

ObjectiveKind parse_objective_kind(std::string_view name);
const char* to_string(ObjectiveKind kind);

struct ObjectiveSpec {
    ObjectiveKind kind = ObjectiveKind::Bulk;
    std::array<int, 4> component{0, 0, 0, 0};  // zero-based tensor indices
    Vec3 direction = Vec3::UnitZ();
    Mat3 strain = Mat3::Identity() / 3.0;               // StrainEnergy
    Mat3 deviator = Eigen::Vector3d(1, -2, 1).asDiagonal();  // DeviatoricAverage
    Mat6 weights = Mat6::Zero();                        // CustomLinear
    /// Weight of the anisotropy penalty; it always works against the goal.
    double isotropy_penalty = 0.0;

    /// Stiffness objectives are maximized; the Poisson objective is minimized.
    bool maximize() const { return kind != ObjectiveKind::Poisson; }
    /// Throws InvalidArgument on out-of-range indices or a non-finite penalty.
    void validate() const;
    std::string describe() const;
};

/// Objective value including the isotropy penalty term.
/// Throws SingularTensor for DirectionalYoung and Poisson when the needed
/// block of C is not invertible.
double evaluate_objective(const ObjectiveSpec& spec, const Tensor4Voigt& c);

/// Symmetric G with d(objective) = sum_IJ G_IJ dC_IJ for symmetric dC.
Mat6 objective_derivative(const ObjectiveSpec& spec, const Tensor4Voigt& c);

struct IsotropicFit {
    double lambda = 0.0;
    double mu = 0.0;
    double residual = 0.0;  // (1/2) ||C - (lambda C_lambda + mu C_mu)||^2 over all 81 components
};

/// Closest isotropic tensor in the component Frobenius norm.
IsotropicFit isotropic_fit(const Tensor4Voigt& c);
Mat6 isotropic_tensor(double lambda, double mu);

/// Lateral contractions (e1, e2) minimizing F : C : F for F = diag(-e1, -e2, 1).
Vec2 lateral_contractions(const Tensor4Voigt& c);

}  // namespace ads
