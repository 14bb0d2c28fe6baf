#include <gtest/gtest.h>

#include "ads/geometry.hpp"
#include "ads/surface_gen.hpp"
#include "ads/surgery.hpp"

using namespace ads;

namespace {

// Tube around the z axis, periodic in z, pinched to radius `throat` at z = 0.
PeriodicMesh necked_tube(double throat, int around, int along) {
    const double wide = 0.4;
    std::vector<Vec3> pos;
    for (int j = 0; j < along; ++j) {
        const double z = -1.0 + 2.0 * j / along;
        const double r = throat + (wide - throat) * 0.5 * (1.0 - std::cos(M_PI * z));
        for (int i = 0; i < around; ++i) {
            const double a = 2.0 * M_PI * (i + 0.5 * (j % 2)) / around;
            pos.emplace_back(r * std::cos(a), r * std::sin(a), z);
        }
    }
    auto id = [&](int i, int j) { return (j % along) * around + (i % around + around) % around; };
    std::vector<Face> faces;
    for (int j = 0; j < along; ++j)
        for (int i = 0; i < around; ++i) {
            if (j % 2 == 0) {
                faces.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
                faces.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
            } else {
                faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
                faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
            }
        }
    return PeriodicMesh::from_faces(pos, faces);
}

}  // namespace

TEST(FillPolygon, SquareUsesTwoTriangles) {
    const std::vector<Vec3> square{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    const std::vector<Face> tris = fill_polygon(square);
    ASSERT_EQ(tris.size(), 2u);
    double area = 0.0;
    for (const Face& t : tris) {
        const Vec3 n = (square[t[1]] - square[t[0]]).cross(square[t[2]] - square[t[0]]);
        EXPECT_LT(n.z(), 0.0);  // reversed relative to the counter-clockwise polygon
        area += 0.5 * n.norm();
    }
    EXPECT_NEAR(area, 1.0, 1e-12);
}

TEST(FillPolygon, ForbiddenChordsRespected) {
    const std::vector<Vec3> square{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    const std::vector<Face> tris = fill_polygon(square, [](int i, int j) { return i == 0 && j == 2; });
    ASSERT_EQ(tris.size(), 2u);
    for (const Face& t : tris) {
        const bool has0 = std::count(t.begin(), t.end(), 0) > 0, has2 = std::count(t.begin(), t.end(), 2) > 0;
        EXPECT_FALSE(has0 && has2);
    }
    EXPECT_TRUE(fill_polygon(square, [](int, int) { return true; }).empty());
}

TEST(Surgery, NeckIsCutAndGenusDrops) {
    PeriodicMesh mesh = necked_tube(0.03, 16, 96);
    ASSERT_EQ(mesh.genus(), 1);
    const SurgeryReport report = numerical_surgery(mesh);
    EXPECT_GE(report.regions_removed, 1);
    EXPECT_EQ(report.holes_filled, 2);
    EXPECT_EQ(report.fairing_reverted, 0);
    EXPECT_EQ(mesh.validate(), "");
    EXPECT_EQ(mesh.genus(), 0);
    EXPECT_EQ(mesh.num_components(), 1);
    EXPECT_LT(mesh.max_edge_length(), 0.3);
    const TriMesh t = mesh.tri_mesh();
    EXPECT_TRUE(vertex_normals(t).orientation_consistent());
}

TEST(Surgery, SmoothSchwarzPUnchanged) {
    ExtractOptions opt;
    opt.grid_n = 32;
    opt.target_edge_length = 0.1;
    PeriodicMesh mesh = extract_mesh(tpms_field(TpmsKind::P), opt);
    const auto before = mesh.tri_mesh();
    const SurgeryReport report = numerical_surgery(mesh);
    EXPECT_EQ(report.regions_removed, 0);
    EXPECT_EQ(mesh.tri_mesh().vertices, before.vertices);
}

TEST(Surgery, InfiniteThresholdIsIdentity) {
    PeriodicMesh mesh = necked_tube(0.03, 16, 96);
    SurgeryOptions opt;
    opt.curvature_threshold = std::numeric_limits<double>::infinity();
    EXPECT_EQ(numerical_surgery(mesh, opt).regions_removed, 0);
    EXPECT_EQ(mesh.genus(), 1);
}

TEST(Surgery, RejectsInvalidOptions) {
    PeriodicMesh mesh = necked_tube(0.03, 16, 96);
    SurgeryOptions opt;
    opt.curvature_threshold = -1.0;
    EXPECT_THROW(numerical_surgery(mesh, opt), Error);
}
