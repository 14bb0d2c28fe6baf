#include <gtest/gtest.h>

#include "ads/benchmarks.hpp"

using namespace ads;

namespace {

const LameSet kLame = lame_from_engineering(1.0, 0.3);

}  // namespace

TEST(IdentityChecks, FlatPlanePassesEverything) {
    const CellAnalysis a = analyze(flat_plane(10).tri_mesh(), kLame);
    const std::vector<IdentityCheck> checks = identity_checks(a);
    EXPECT_EQ(checks.size(), 11u);
    for (const IdentityCheck& c : checks) EXPECT_TRUE(c.passed) << c.name << ' ' << c.value << ' ' << c.reference;
}

TEST(IdentityChecks, DetectsViolatedBound) {
    CellAnalysis a = analyze(flat_plane(10).tri_mesh(), kLame);
    a.asymptotic.matrix() *= 1e3;
    int failed = 0;
    for (const IdentityCheck& c : identity_checks(a)) failed += !c.passed;
    EXPECT_GE(failed, 2);
}

TEST(Roughness, ConstantFieldIsFree) {
    const TriMesh m = flat_plane(8).tri_mesh();
    Eigen::VectorXd u(3 * m.num_vertices());
    for (int v = 0; v < m.num_vertices(); ++v) u.segment<3>(3 * v) = Vec3(0.3, -1.0, 2.0);
    EXPECT_NEAR(displacement_roughness(m, u), 0.0, 1e-12);
}

TEST(Roughness, GrowsWithFrequency) {
    const TriMesh m = flat_plane(32).tri_mesh();
    auto wave = [&](int k) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(3 * m.num_vertices());
        for (int v = 0; v < m.num_vertices(); ++v) u[3 * v + 2] = std::sin(M_PI * k * m.vertices[v].x());
        return displacement_roughness(m, u);
    };
    // Dirichlet energy of sin(k pi x) over the 2x2 cell is 2 (k pi)^2.
    EXPECT_NEAR(wave(1), 2.0 * M_PI * M_PI, 0.02 * 2.0 * M_PI * M_PI);
    EXPECT_GT(wave(4), 10.0 * wave(1));
}

TEST(Ladder, FieldIsPeriodicWithMatchingGradient) {
    const LevelSetField f = ladder_field();
    const Vec3 x(0.3, -0.7, 0.45);
    EXPECT_NEAR(f.value(x), f.value(x + Vec3(2.0, -2.0, 2.0)), 1e-12);
    for (int i = 0; i < 3; ++i) {
        const Vec3 e = 1e-6 * Vec3::Unit(i);
        EXPECT_NEAR(f.gradient(x)[i], (f.value(x + e) - f.value(x - e)) / 2e-6, 1e-6);
    }
}

TEST(Ladder, CoarseLevelsRefine) {
    LadderOptions opt;
    opt.grid = 32;
    opt.base_edge = 0.14;
    const std::vector<LadderLevel> levels = refinement_ladder(ladder_field(), 3, opt);
    ASSERT_EQ(levels.size(), 3u);
    EXPECT_EQ(levels[0].successive_error, 0.0);
    for (int k = 1; k < 3; ++k) {
        EXPECT_LT(levels[k].mesh_size, levels[k - 1].mesh_size);
        EXPECT_GT(levels[k].vertices, levels[k - 1].vertices);
        EXPECT_GT(levels[k].successive_error, 0.0);
        EXPECT_LT(levels[k].successive_error, 0.1);
        EXPECT_NEAR(levels[k].target_edge, 0.14 * std::pow(0.8, k), 1e-12);
    }
    EXPECT_THROW(refinement_ladder(ladder_field(), 0), Error);
}
