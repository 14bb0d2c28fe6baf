#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "ads/geometry.hpp"
#include "ads/surface_gen.hpp"
#include "fixtures.hpp"

using namespace ads;

TEST(VertexNormals, FlatPlaneIsVertical) {
    const TriMesh m = flat_plane(8).tri_mesh();
    const VertexNormals vn = vertex_normals(m);
    for (const Vec3& n : vn.normals) EXPECT_NEAR((n - Vec3::UnitZ()).norm(), 0.0, 1e-14);
    EXPECT_TRUE(vn.orientation_consistent());
}

TEST(VertexNormals, IcosphereMatchesRadialDirection) {
    const TriMesh m = test::icosphere(0.7, 3);
    const VertexNormals vn = vertex_normals(m);
    double worst = 0.0;
    for (int v = 0; v < m.num_vertices(); ++v) {
        const double c = std::clamp(vn.normals[v].dot(m.vertices[v].normalized()), -1.0, 1.0);
        worst = std::max(worst, std::acos(c));
    }
    EXPECT_LT(worst * 180.0 / M_PI, 2.0);
}

TEST(VertexNormals, FlagsInconsistentOrientation) {
    TriMesh m = test::icosphere(1.0, 2);
    std::swap(m.faces[5][0], m.faces[5][1]);
    EXPECT_FALSE(vertex_normals(m).orientation_consistent());
}

TEST(FaceFrame, OrthonormalAndGradientsSumToZero) {
    const FaceGeometry g = face_frame({Vec3(0.1, 0.2, 0.3), Vec3(0.5, 0.1, 0.2), Vec3(0.2, 0.6, 0.1)});
    EXPECT_NEAR(g.t1.dot(g.t2), 0.0, 1e-14);
    EXPECT_NEAR(g.t1.norm(), 1.0, 1e-14);
    EXPECT_NEAR((g.t1.cross(g.t2) - g.normal).norm(), 0.0, 1e-14);
    EXPECT_NEAR((g.grad_phi[0] + g.grad_phi[1] + g.grad_phi[2]).norm(), 0.0, 1e-12);
}

TEST(FaceFrame, RejectsDegenerateFace) {
    EXPECT_THROW(face_frame({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)}), Error);
}

TEST(SecondForm, FlatPlaneVanishes) {
    const SurfaceGeometry g = compute_geometry(flat_plane(6).tri_mesh());
    for (const auto& f : g.faces) EXPECT_LT(f.second_form.norm(), 1e-14);
}

TEST(SecondForm, SphereWithExactNormalsIsExact) {
    const double r = 0.8;
    const TriMesh m = test::icosphere(r, 2);
    std::vector<Vec3> exact;
    for (const Vec3& x : m.vertices) exact.push_back(x.normalized());
    const SurfaceGeometry g = compute_geometry(m, exact);
    for (const auto& f : g.faces) {
        EXPECT_LT((f.second_form + Mat2::Identity() / r).norm(), 1e-12);
        EXPECT_NEAR((f.third_form - f.second_form * f.second_form).norm(), 0.0, 1e-12);
    }
}

TEST(SecondForm, SphereConvergesToMinusIdentityOverRadius) {
    const double r = 0.8;
    double previous = 1e300, trace_err = 0.0;
    for (int s = 2; s <= 5; ++s) {
        const SurfaceGeometry g = compute_geometry(test::icosphere(r, s));
        double err2 = 0.0, area = 0.0;
        trace_err = 0.0;
        for (const auto& f : g.faces) {
            err2 += f.area * (f.second_form + Mat2::Identity() / r).squaredNorm();
            area += f.area;
            trace_err += f.area * std::abs(f.second_form.trace() + 2.0 / r);
        }
        trace_err /= area;
        const double rms = std::sqrt(err2 / area);
        EXPECT_LT(rms, previous);
        previous = rms;
    }
    EXPECT_LT(previous, 0.05 / r);
    EXPECT_LT(trace_err, 0.05 / r);
}

TEST(SecondForm, ReproducesEdgeEquationsExactly) {
    const TriMesh m = test::icosphere(1.0, 1);
    const SurfaceGeometry g = compute_geometry(m);
    for (int f = 0; f < m.num_faces(); ++f) {
        const auto& fg = g.faces[f];
        for (int k = 0; k < 3; ++k) {
            const int i = k, j = (k + 1) % 3;
            const Vec3 l = fg.corners[j] - fg.corners[i];
            const Vec2 ll(l.dot(fg.t1), l.dot(fg.t2));
            const Vec3 dn = g.vertex_normals[m.faces[f][j]] - g.vertex_normals[m.faces[f][i]];
            EXPECT_NEAR(ll.dot(fg.second_form * ll), -dn.dot(l), 1e-12);
        }
    }
}

TEST(SecondForm, CylinderPrincipalCurvatures) {
    const double r = 0.5;
    const TriMesh m = test::cylinder(r, 48, 12, 0.5);
    std::vector<Vec3> exact;
    for (const Vec3& x : m.vertices) exact.emplace_back(x.x() / r, x.y() / r, 0.0);
    const SurfaceGeometry g = compute_geometry(m, exact);
    for (const auto& f : g.faces) {
        Eigen::SelfAdjointEigenSolver<Mat2> es(f.second_form);
        EXPECT_NEAR(es.eigenvalues()[0], -1.0 / r, 0.02);
        EXPECT_NEAR(es.eigenvalues()[1], 0.0, 0.02);
    }
}

TEST(SecondForm, FrameInvariant) {
    const TriMesh m = test::icosphere(1.0, 2);
    const SurfaceGeometry g = compute_geometry(m);
    const Face t = m.faces[3];
    const Face rotated{t[1], t[2], t[0]};
    FaceGeometry fr = face_frame({m.vertices[rotated[0]], m.vertices[rotated[1]], m.vertices[rotated[2]]});
    fr.second_form = face_second_form(
        fr, {g.vertex_normals[rotated[0]], g.vertex_normals[rotated[1]], g.vertex_normals[rotated[2]]});
    EXPECT_NEAR((fr.second_form_world() - g.faces[3].second_form_world()).norm(), 0.0, 1e-12);
}

TEST(Laplacian, KernelAndMass) {
    const TriMesh m = test::icosphere(1.3, 2);
    const SparseMatrix l = cotan_laplacian(m);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m.num_vertices());
    EXPECT_LT((l * ones).norm(), 1e-12);
    EXPECT_LT((l - SparseMatrix(l.transpose())).norm(), 1e-12);
    Eigen::VectorXd x(m.num_vertices());
    for (int v = 0; v < m.num_vertices(); ++v) x[v] = m.vertices[v].x() + 0.3 * m.vertices[v].y();
    EXPECT_LE(x.dot(l * x), 0.0);

    double area = 0.0;
    for (int f = 0; f < m.num_faces(); ++f) {
        const auto c = m.corners(f);
        area += 0.5 * (c[1] - c[0]).cross(c[2] - c[0]).norm();
    }
    EXPECT_NEAR(lumped_mass(m).sum(), area, 1e-12);
}

TEST(Laplacian, LinearFunctionOnFlatPlane) {
    // A periodic grid carries no global linear function; use an open patch.
    const AnalyticPatch patch = analytic_patch(PatchKind::Parabolic, 8);
    TriMesh m = patch.mesh;
    for (auto& v : m.vertices) v.z() = 0.0;
    const SparseMatrix l = cotan_laplacian(m);
    Eigen::VectorXd u(m.num_vertices());
    for (int v = 0; v < m.num_vertices(); ++v) u[v] = 2.0 * m.vertices[v].x() - m.vertices[v].y();
    const Eigen::VectorXd lu = l * u;
    for (int v = 0; v < m.num_vertices(); ++v) {
        const Vec3& x = m.vertices[v];
        if (std::abs(x.x()) < 0.99 && std::abs(x.y()) < 0.99) EXPECT_NEAR(lu[v], 0.0, 1e-12);
    }
}

TEST(Rotation, MapsFromToAndIsOrthogonal) {
    const Vec3 a = Vec3(1, 2, 3).normalized(), b = Vec3(-2, 0.5, 1).normalized();
    const Mat3 r = rotation_between(a, b);
    EXPECT_NEAR((r * a - b).norm(), 0.0, 1e-14);
    EXPECT_NEAR((r.transpose() * r - Mat3::Identity()).norm(), 0.0, 1e-14);
    EXPECT_NEAR((rotation_between(a, a) - Mat3::Identity()).norm(), 0.0, 1e-15);
    EXPECT_THROW(rotation_between(a, -a), Error);
}
