#pragma once

#include "ads/solver.hpp"

namespace ads {

/// Per-vertex coefficients of -sum_f (area_f / 3) tr b_f, so that the area
/// rate under a normal velocity v is coefficients . v.
Eigen::VectorXd area_rate_coefficients(const TriMesh& mesh, const SurfaceGeometry& geom);

enum class SensitivityMethod {
    Discrete,    // exact derivative of the discrete tensor with frozen connectivity
    Continuous,  // quadrature of the continuous shape derivative
};

SensitivityMethod parse_sensitivity(std::string_view name);
const char* to_string(SensitivityMethod method);

/// Shape derivatives of the cell tensor under per-vertex normal velocities
/// x_i -> x_i + t v_i n_i. The mesh and analysis must outlive this object.
class ShapeSensitivity {
public:
    ShapeSensitivity(const TriMesh& mesh, const CellAnalysis& analysis,
                     SensitivityMethod method = SensitivityMethod::Discrete);

    /// Rate of C_A (full symmetric 6x6) for the velocity field v.
    Mat6 ca_rate(const Eigen::VectorXd& v) const;

    /// Rate of the total area for the velocity field v.
    double area_rate(const Eigen::VectorXd& v) const;

    /// Coefficients V with sum_IJ weights_IJ dC_IJ = V . v for all v.
    /// `weights` is read as a symmetric matrix over the full Voigt index set.
    Eigen::VectorXd gradient(const Mat6& weights) const;

    /// Coefficients of the area rate.
    Eigen::VectorXd area_gradient() const;

    SensitivityMethod method() const { return method_; }

private:
    struct Rates;
    Rates forward(const Eigen::VectorXd& v) const;
    Eigen::VectorXd reverse(const Mat6& weights, double area_weight) const;
    Rates forward_continuous(const Eigen::VectorXd& v) const;
    Eigen::VectorXd reverse_continuous(const Mat6& weights, double area_weight) const;

    const TriMesh& mesh_;
    const CellAnalysis& analysis_;
    SensitivityMethod method_;
    std::vector<Vec3> translation_residual_;  // per strain: r = m (x) c, the value of c
    std::vector<double> normal_scale_;        // |sum of angle-weighted face normals| per vertex
};

}  // namespace ads
