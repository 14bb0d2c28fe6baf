#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ads/membrane.hpp"
#include "ads/solver.hpp"
#include "ads/surface_gen.hpp"

namespace ads {

/// Smooth ambient vector field with its Jacobian (rows: components).
struct VectorField {
    std::function<Vec3(const Vec3&)> value;
    std::function<Mat3(const Vec3&)> jacobian;
};

/// The field (cos x, sin xy, sin(x + z)).
VectorField wave_field();

/// Area-weighted RMS over faces of |gamma_h - gamma| at the centroid, where
/// gamma = P Sym(Du) P is the exact membrane strain of the sampled field.
double patch_strain_error(const AnalyticPatch& patch, const VectorField& field, StrainScheme scheme);

/// Laplacian seminorm -u^T L u summed over the components of a per-vertex
/// displacement field (stacked xyz per vertex).
double displacement_roughness(const TriMesh& mesh, const Eigen::VectorXd& displacement);

struct IdentityCheck {
    std::string name;
    double value = 0.0;
    double reference = 0.0;  // expected value, or the upper bound
    double tolerance = 0.0;
    bool is_bound = false;
    bool passed = false;
};

/// Identities every closed surface satisfies: the hydrostatic energy and the
/// eigenvalue sum of the homogeneous tensor are shape independent, and C_A is
/// positive semidefinite and bounded by the homogeneous tensor (per unit
/// strain, in the operator order, and for the bulk modulus).
std::vector<IdentityCheck> identity_checks(const CellAnalysis& analysis);

/// 1.2 cos(pi x) + 0.9 cos(pi y) + 1.5 cos(pi z).
LevelSetField ladder_field();

struct LadderOptions {
    double base_edge = 0.1;
    double ratio = 0.8;
    int grid = 64;
    int remesh_iterations = 10;
    LameSet lame = lame_from_engineering(1.0, 0.3);
    StrainScheme scheme = StrainScheme::Corrected;
    SolverOptions solver;
};

struct LadderLevel {
    int level = 0;
    double target_edge = 0.0;
    double mesh_size = 0.0;  // mean circumradius
    int vertices = 0;
    Tensor4Voigt asymptotic;
    double successive_error = 0.0;  // relative to the previous level; 0 at level 0
};

/// Extracts and projects the field at edge lengths base * ratio^k for
/// k = 0..levels-1 and compares C_A between successive levels.
std::vector<LadderLevel> refinement_ladder(const LevelSetField& field, int levels, const LadderOptions& options = {});

}  // namespace ads
