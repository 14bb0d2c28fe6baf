#include <gtest/gtest.h>

#include "ads/periodic_mesh.hpp"
#include "ads/remesh.hpp"
#include "ads/surface_gen.hpp"

using namespace ads;

namespace {

// Grid over [-1,1]^2 at z = 0 with duplicated boundary vertices, as written by
// a non-periodic exporter.
RawMesh open_plane(int n) {
    RawMesh m;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) m.vertices.emplace_back(-1.0 + 2.0 * i / n, -1.0 + 2.0 * j / n, 0.0);
    auto id = [n](int i, int j) { return i * (n + 1) + j; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return m;
}

}  // namespace

TEST(Torus, WrapAndMinImage) {
    EXPECT_DOUBLE_EQ(torus::wrap(1.0), -1.0);
    EXPECT_DOUBLE_EQ(torus::wrap(-1.0), -1.0);
    EXPECT_DOUBLE_EQ(torus::wrap(2.5), 0.5);
    EXPECT_NEAR(torus::min_image(Vec3(-1.8, 0.0, 0.0)).x(), 0.2, 1e-15);
}

TEST(UnfoldRing, SingleAxisShift) {
    EXPECT_TRUE(torus::unfold(Vec3(-0.9, 0, 0), Vec3(0.9, 0, 0)).isApprox(Vec3(1.1, 0, 0)));
    EXPECT_TRUE(torus::unfold(Vec3(0.1, 0.1, 0), Vec3(0, 0, 0)).isApprox(Vec3(0.1, 0.1, 0)));
    EXPECT_TRUE(torus::unfold(Vec3(-0.9, -0.9, 0), Vec3(0.9, 0.9, 0)).isApprox(Vec3(1.1, 1.1, 0)));
}

TEST(UnfoldRing, NeighborsWithinHalfPeriod) {
    PeriodicMesh m = flat_plane(10);
    for (int v = 0; v < m.num_vertices(); ++v) {
        const UnfoldedRing ring = unfold_ring(m, v);
        EXPECT_EQ(ring.neighbors.size(), 6u);
        for (const Vec3& p : ring.positions) {
            EXPECT_LE((p - ring.center_position).cwiseAbs().maxCoeff(), 1.0);
            EXPECT_NEAR((p - ring.center_position).norm(), 0.2, 0.09);
            // Idempotent on already unfolded coordinates.
            EXPECT_TRUE(torus::unfold(p, ring.center_position).isApprox(p));
        }
    }
}

TEST(PeriodicMesh, FlatPlaneIsTorus) {
    PeriodicMesh m = flat_plane(10);
    EXPECT_EQ(m.euler_characteristic(), 0);
    EXPECT_EQ(m.genus(), 1);
    EXPECT_EQ(m.validate(), "");
}

TEST(Canonicalize, MergesPlaneBoundary) {
    RawMesh raw = open_plane(8);
    auto result = canonicalize(raw.vertices, raw.faces, 1e-6);
    EXPECT_EQ(result.mesh.num_vertices(), 64);
    EXPECT_EQ(result.mesh.euler_characteristic(), 0);
    EXPECT_EQ(result.mesh.validate(), "");
    EXPECT_EQ(result.merge_map.size(), raw.vertices.size());
    for (const Vec3& p : result.mesh.positions()) {
        EXPECT_GE(p.minCoeff(), -1.0);
        EXPECT_LT(p.maxCoeff(), 1.0);
    }
}

TEST(Canonicalize, PerturbedBoundaryVertexIsUnmatched) {
    RawMesh raw = open_plane(8);
    const double tol = 1e-6;
    for (Vec3& p : raw.vertices)
        if (p.x() == 1.0 && std::abs(p.y()) < 0.5) {
            p.y() += 10 * tol;
            break;
        }
    try {
        canonicalize(raw.vertices, raw.faces, tol);
        FAIL() << "expected UnmatchedBoundaryVertex";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnmatchedBoundaryVertex);
    }
}

TEST(PeriodicMesh, OpenMeshRejected) {
    RawMesh raw = open_plane(4);
    try {
        PeriodicMesh::from_faces(raw.vertices, raw.faces);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::OpenMesh);
    }
}

TEST(PeriodicMesh, RoundTripObj) {
    PeriodicMesh m = flat_plane(6);
    const std::string path = testing::TempDir() + "plane.obj";
    write_obj(path, m.tri_mesh());
    PeriodicMesh back = load_periodic_mesh(path);
    EXPECT_EQ(back.num_vertices(), m.num_vertices());
    EXPECT_EQ(back.num_faces(), m.num_faces());
    const std::string off = testing::TempDir() + "plane.off";
    write_off(off, m.tri_mesh());
    EXPECT_EQ(load_periodic_mesh(off).num_faces(), m.num_faces());
}

TEST(PeriodicMesh, LocalOperationsKeepValidity) {
    PeriodicMesh m = flat_plane(8);
    const int chi = m.euler_characteristic();
    const int v = m.split_edge(0, m.position(m.from(0)) + 0.5 * m.edge_vector(0));
    EXPECT_EQ(m.validate(), "");
    EXPECT_EQ(m.euler_characteristic(), chi);
    EXPECT_EQ(m.valence(v), 4);
    int flipped = 0;
    for (int e = 0; e < m.edge_slots() && flipped < 3; ++e)
        if (m.is_flip_ok(e)) {
            m.flip(e);
            ++flipped;
            EXPECT_EQ(m.validate(), "");
        }
    int h = m.vertex_halfedge(v);
    ASSERT_TRUE(m.is_collapse_ok(h));
    m.collapse(h, m.position(m.to(h)));
    EXPECT_EQ(m.validate(), "");
    m.garbage_collection();
    EXPECT_EQ(m.validate(), "");
    EXPECT_EQ(m.euler_characteristic(), chi);
}

TEST(ElementSize, EquilateralAndDegenerate) {
    const double s = 0.3;
    bool degenerate = true;
    EXPECT_NEAR(circumradius({0, 0, 0}, {s, 0, 0}, {s / 2, s * std::sqrt(3.0) / 2, 0}, &degenerate),
                s / std::sqrt(3.0), 1e-14);
    EXPECT_FALSE(degenerate);
    EXPECT_NEAR(circumradius({0, 0, 0}, {1, 0, 0}, {2, 0, 0}, &degenerate), 1.0, 1e-14);
    EXPECT_TRUE(degenerate);
}

TEST(Remesh, RejectsLargeTarget) {
    PeriodicMesh m = flat_plane(8);
    RemeshOptions o;
    o.target_edge_length = 0.5;
    EXPECT_THROW(dynamic_remesh(m, o), Error);
}

TEST(Remesh, SplitsLongEdgesAndKeepsTopology) {
    PeriodicMesh m = flat_plane(8);  // edges 0.25 and diagonals 0.35
    RemeshOptions o;
    o.target_edge_length = 0.05;
    dynamic_remesh(m, o);
    EXPECT_EQ(m.validate(), "");
    EXPECT_EQ(m.euler_characteristic(), 0);
    EXPECT_LE(m.max_edge_length(), 4.0 / 3.0 * 0.05 + 1e-12);
    for (const Vec3& p : m.positions()) {
        EXPECT_NEAR(p.z(), 0.0, 1e-12);
        EXPECT_GE(p.minCoeff(), -1.0);
        EXPECT_LT(p.maxCoeff(), 1.0);
    }
}

TEST(Remesh, RefinementHalvesElementSize) {
    PeriodicMesh a = flat_plane(8), b = flat_plane(8);
    RemeshOptions o;
    o.target_edge_length = 0.1;
    dynamic_remesh(a, o);
    o.target_edge_length = 0.05;
    dynamic_remesh(b, o);
    const double ratio = mean_element_size(b).mean / mean_element_size(a).mean;
    EXPECT_NEAR(ratio, 0.5, 0.05 * 0.5 + 0.03);
}
