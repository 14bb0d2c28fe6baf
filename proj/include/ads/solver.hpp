#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ads/geometry.hpp"
#include "ads/membrane.hpp"
#include "ads/voigt.hpp"

namespace ads {

using DisplacementFields = Eigen::Matrix<double, Eigen::Dynamic, 6>;

enum class Preconditioner {
    Auto,  // Cholesky up to kAutoCholeskyVertices, Jacobi beyond
    Jacobi,
    Cholesky,  // sparse LDLT of a slightly shifted K
};

struct SolverOptions {
    double tol_rel = 1e-9;
    int max_iter = 0;  // 0 selects 50 sqrt(n)
    Preconditioner preconditioner = Preconditioner::Auto;
};

inline constexpr int kAutoCholeskyVertices = 30000;

Preconditioner parse_preconditioner(std::string_view name);
const char* to_string(Preconditioner preconditioner);

/// Global membrane system of a surface for the six unit macro-strains.
struct Assembly {
    LameSet lame;
    StrainScheme scheme = StrainScheme::Corrected;
    std::vector<FaceKinematics> kinematics;
    SparseMatrix stiffness;   // 3|V| x 3|V|
    DisplacementFields loads;  // one column per unit strain
    Eigen::VectorXd mass;      // lumped, per vertex
    double area = 0.0;
    Tensor4Voigt homogeneous;  // face-quadrature membrane energy of the projected strains
};

Assembly assemble(const TriMesh& mesh, const SurfaceGeometry& geom, const LameSet& lame,
                  StrainScheme scheme = StrainScheme::Corrected);

struct CellSolution {
    DisplacementFields displacements;  // per vertex 3-vectors stacked, one column per strain
    std::array<double, 6> relative_residual{};
    std::array<int, 6> iterations{};
};

/// Projected conjugate gradients on the complement of the mass-weighted
/// translations. Throws NoConvergence.
CellSolution solve_cell(const Assembly& system, const SolverOptions& options = {});

/// Solves K u = f for a single right-hand side under the same constraint.
Eigen::VectorXd solve_constrained(const SparseMatrix& k, const Eigen::VectorXd& f,
                                  const Eigen::VectorXd& mass, const SolverOptions& options,
                                  double* relative_residual = nullptr, int* iterations = nullptr);

Tensor4Voigt compute_CA(const Assembly& system, const CellSolution& cell);

/// Area average of the projected isotropic membrane tensor.
Tensor4Voigt compute_EM_tensor(const TriMesh& mesh, const SurfaceGeometry& geom, const LameSet& lame);

struct OptimalityResidual {
    std::vector<Vec3> tangential;  // per face, world coordinates
    std::vector<double> normal;    // per face
    double tangential_l2 = 0.0;    // area-weighted L2 norms
    double normal_l2 = 0.0;
};

OptimalityResidual optimality_residual(const TriMesh& mesh, const SurfaceGeometry& geom,
                                       const LameSet& lame, const Mat3& eps);

/// Geometry, system, solution and tensors for one surface.
struct CellAnalysis {
    SurfaceGeometry geometry;
    Assembly system;
    CellSolution cell;
    Tensor4Voigt asymptotic;   // C_A
    Tensor4Voigt homogeneous;  // P-bar
};

CellAnalysis analyze(const TriMesh& mesh, const LameSet& lame, StrainScheme scheme = StrainScheme::Corrected,
                     const SolverOptions& options = {},
                     std::optional<std::span<const Vec3>> normals = std::nullopt);

}  // namespace ads
