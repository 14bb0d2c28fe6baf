#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "ads/core.hpp"
#include "ads/periodic_mesh.hpp"

namespace ads {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Per-face frame and curvature data. All 2x2 quantities are expressed in
/// the orthonormal tangent frame (t1, t2); t1 follows the first edge.
struct FaceGeometry {
    std::array<Vec3, 3> corners;  // unfolded relative to corner 0
    Vec3 t1, t2, normal;
    double area = 0.0;
    Mat2 second_form = Mat2::Zero();  // b
    Mat2 third_form = Mat2::Zero();   // c = b b
    std::array<Vec2, 3> grad_phi;     // gradients of the barycentric functions

    Eigen::Matrix<double, 3, 2> tangent_basis() const {
        Eigen::Matrix<double, 3, 2> t;
        t << t1, t2;
        return t;
    }
    Mat3 projection() const { return Mat3::Identity() - normal * normal.transpose(); }
    /// b lifted to a 3x3 world tensor that vanishes along the normal.
    Mat3 second_form_world() const;
};

struct VertexNormals {
    std::vector<Vec3> normals;
    /// Faces whose normal has a non-positive dot product with a corner normal.
    int inconsistent_faces = 0;
    bool orientation_consistent() const { return inconsistent_faces == 0; }
};

/// Angle-weighted vertex normals. Throws ZeroNormal for degenerate stars.
VertexNormals vertex_normals(const TriMesh& mesh);

/// Frame, area and barycentric gradients (no curvature). Throws DegenerateFace.
FaceGeometry face_frame(const std::array<Vec3, 3>& corners);

/// Solves the three edge equations l^T b l = -(n_j - n_i) . l for b.
/// Throws SingularEdgeSystem.
Mat2 face_second_form(const FaceGeometry& face, const std::array<Vec3, 3>& corner_normals);

struct SurfaceGeometry {
    std::vector<Vec3> vertex_normals;
    std::vector<FaceGeometry> faces;
    int inconsistent_faces = 0;
};

/// Full per-face geometry. When `normals` is given it replaces the computed
/// vertex normals (analytic test fixtures).
SurfaceGeometry compute_geometry(const TriMesh& mesh,
                                 std::optional<std::span<const Vec3>> normals = std::nullopt);

/// Minimal rotation taking unit vector `from` to unit vector `to`.
/// Throws DegenerateFace when the vectors are nearly opposite.
Mat3 rotation_between(const Vec3& from, const Vec3& to);

/// Cotangent Laplacian with negative diagonal (negative semidefinite).
SparseMatrix cotan_laplacian(const TriMesh& mesh);
/// Lumped barycentric mass: a third of each incident face area.
Eigen::VectorXd lumped_mass(const TriMesh& mesh);

/// Largest absolute principal curvature per vertex from the area-weighted
/// face second forms rotated into the vertex tangent plane.
std::vector<double> vertex_max_curvature(const TriMesh& mesh, const SurfaceGeometry& geom);

}  // namespace ads
