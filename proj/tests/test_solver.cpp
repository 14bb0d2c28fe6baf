#include <gtest/gtest.h>

#include "ads/solver.hpp"
#include "ads/surface_gen.hpp"

using namespace ads;

namespace {

const LameSet kLame = lame_from_engineering(1.0, 0.3);

TriMesh perturbed_p(double strength, std::uint64_t seed) {
    const PerturbedField pf = perturbed_field({TpmsKind::P, 1, strength, seed});
    ExtractOptions opt;
    opt.grid_n = 32;
    opt.target_edge_length = 0.12;
    opt.remesh_iterations = 5;
    return extract_mesh(pf.field, opt).tri_mesh();
}

// Periodic cylinder of radius r around the z axis.
TriMesh periodic_cylinder(double r, int around, int along) {
    TriMesh m;
    m.periodic = true;
    for (int j = 0; j < along; ++j)
        for (int i = 0; i < around; ++i) {
            const double a = 2.0 * M_PI * (i + 0.5 * (j % 2)) / around;
            m.vertices.emplace_back(r * std::cos(a), r * std::sin(a), -1.0 + 2.0 * j / along);
        }
    auto id = [&](int i, int j) { return (j % along) * around + (i % around + around) % around; };
    for (int j = 0; j < along; ++j)
        for (int i = 0; i < around; ++i) {
            if (j % 2 == 0) {
                m.faces.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
                m.faces.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
            } else {
                m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
                m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
            }
        }
    return m;
}

}  // namespace

TEST(Assembly, FlatPlaneStructure) {
    const TriMesh m = flat_plane(10).tri_mesh();
    const SurfaceGeometry g = compute_geometry(m);
    const Assembly sys = assemble(m, g, kLame);
    EXPECT_LT((sys.stiffness - SparseMatrix(sys.stiffness.transpose())).norm(), 1e-12);
    for (int s : {2, 3, 4}) EXPECT_LT(sys.loads.col(s).norm(), 1e-14);
    for (int axis = 0; axis < 3; ++axis) {
        Eigen::VectorXd t = Eigen::VectorXd::Zero(3 * m.num_vertices());
        for (int v = 0; v < m.num_vertices(); ++v) t[3 * v + axis] = 1.0;
        EXPECT_LT((sys.stiffness * t).norm(), 1e-12);
    }
    EXPECT_NEAR(sys.area, 4.0, 1e-12);
}

TEST(CellTensor, FlatPlaneAttainsBound) {
    const CellAnalysis a = analyze(flat_plane(10).tri_mesh(), kLame);
    EXPECT_LE(tensor_rel_error(a.asymptotic, a.homogeneous), 1e-8);
    EXPECT_NEAR(a.asymptotic.component(0, 0, 0, 0), 1.098901, 1e-6);
    EXPECT_NEAR(a.asymptotic.component(0, 0, 1, 1), 0.329670, 1e-6);
    EXPECT_NEAR(a.asymptotic.component(2, 2, 2, 2), 0.0, 1e-8);
    EXPECT_NEAR(bulk_modulus(a.asymptotic), 0.317460, 1e-6);
    EXPECT_NEAR(a.asymptotic.energy(voigt::unit_strain(2)), 0.0, 1e-12);
}

TEST(CellTensor, PeriodicCylinderAxialStiffness) {
    // Hoop and shear strains relax through inextensional modes; only axial
    // stretching survives, with modulus 4 mu (lambda0 + mu) / (lambda0 + 2 mu).
    const CellAnalysis a = analyze(periodic_cylinder(0.5, 48, 48), kLame);
    const double axial = 4.0 * kLame.mu * (kLame.lambda0 + kLame.mu) / (kLame.lambda0 + 2.0 * kLame.mu);
    EXPECT_NEAR(axial, 1.0, 1e-12);
    Mat6 expected = Mat6::Zero();
    expected(2, 2) = axial;
    EXPECT_LT((a.asymptotic.matrix() - expected).cwiseAbs().maxCoeff(), 5e-3);
}

TEST(CellTensor, UpperBoundAndSymmetryOnPerturbedSurface) {
    const TriMesh m = perturbed_p(0.3, 7);
    const CellAnalysis a = analyze(m, kLame);
    for (int s = 0; s < 6; ++s) {
        const Mat3 e = voigt::unit_strain(s);
        EXPECT_LE(a.asymptotic.energy(e), a.homogeneous.energy(e) + 1e-8);
        EXPECT_LE(a.cell.relative_residual[s], 1e-9);
    }
    EXPECT_NEAR(bulk_modulus(a.homogeneous), 4.0 / 9.0 * (kLame.lambda0 + kLame.mu), 1e-12);
    EXPECT_NEAR(a.homogeneous.eigenvalue_sum(), 2.0 * kLame.lambda0 + 6.0 * kLame.mu, 1e-10);
    EXPECT_LT(tensor_rel_error(a.homogeneous, a.system.homogeneous), 1e-12);
    // Symmetry before the explicit symmetrization in compute_CA.
    const Mat6 raw = a.cell.displacements.transpose() * a.system.loads;
    EXPECT_LT((raw - raw.transpose()).norm(), 1e-7 * raw.norm());
}

TEST(CellTensor, DisplacementsOrthogonalToTranslations) {
    const TriMesh m = perturbed_p(0.2, 3);
    const CellAnalysis a = analyze(m, kLame);
    for (int s = 0; s < 6; ++s) {
        Vec3 mean = Vec3::Zero();
        for (int v = 0; v < m.num_vertices(); ++v)
            mean += a.system.mass[v] * a.cell.displacements.col(s).segment<3>(3 * v);
        EXPECT_LT(mean.norm(), 1e-10);
    }
}

TEST(CellTensor, JacobiAndCholeskyAgree) {
    const TriMesh m = perturbed_p(0.2, 11);
    SolverOptions jacobi;
    jacobi.preconditioner = Preconditioner::Jacobi;
    jacobi.max_iter = 20000;
    SolverOptions cholesky;
    cholesky.preconditioner = Preconditioner::Cholesky;
    const CellAnalysis a = analyze(m, kLame, StrainScheme::Corrected, jacobi);
    const CellAnalysis b = analyze(m, kLame, StrainScheme::Corrected, cholesky);
    EXPECT_LT(tensor_rel_error(a.asymptotic, b.asymptotic), 1e-7);
}

TEST(OptimalityResidual, FlatPlaneAndHydrostatic) {
    const TriMesh plane = flat_plane(6).tri_mesh();
    const OptimalityResidual flat = optimality_residual(plane, compute_geometry(plane), kLame, voigt::unit_strain(0));
    EXPECT_LT(flat.tangential_l2 + flat.normal_l2, 1e-14);

    const TriMesh m = perturbed_p(0.3, 5);
    const SurfaceGeometry g = compute_geometry(m);
    const OptimalityResidual r = optimality_residual(m, g, kLame, Mat3::Identity() / 3.0);
    EXPECT_LT(r.tangential_l2, 1e-12);
    for (int f = 0; f < m.num_faces(); ++f) {
        const double h = 0.5 * g.faces[f].second_form.trace();
        EXPECT_NEAR(r.normal[f], 4.0 / 3.0 * (kLame.lambda0 + kLame.mu) * h, 1e-12);
    }
}

TEST(OptimalityResidual, SchwarzPMeanCurvatureDecreases) {
    double previous = 1e300;
    for (auto [grid, edge] : {std::pair{32, 0.12}, {48, 0.08}, {64, 0.06}}) {
        ExtractOptions opt;
        opt.grid_n = grid;
        opt.target_edge_length = edge;
        const TriMesh m = extract_mesh(tpms_field(TpmsKind::P), opt).tri_mesh();
        const OptimalityResidual r = optimality_residual(m, compute_geometry(m), kLame, Mat3::Identity() / 3.0);
        EXPECT_LT(r.normal_l2, previous * 1.05);
        previous = r.normal_l2;
    }
}

TEST(TensorError, Examples) {
    Mat6 c = Mat6::Random();
    c = (c + c.transpose()).eval();
    const Tensor4Voigt a(c);
    EXPECT_DOUBLE_EQ(tensor_rel_error(a, a), 0.0);
    EXPECT_NEAR(tensor_rel_error(a, Tensor4Voigt()), 1.0, 1e-15);
    EXPECT_NEAR(tensor_rel_error(a, Tensor4Voigt(1.01 * c)), 0.01, 1e-12);
    EXPECT_THROW(tensor_rel_error(Tensor4Voigt(), a), Error);
}

TEST(Voigt, RoundTripAndEnergy) {
    Mat3 e;
    e << 1.0, 0.2, -0.3, 0.2, 0.5, 0.7, -0.3, 0.7, -1.1;
    EXPECT_LT((voigt::voigt_to_strain(voigt::strain_to_voigt(e)) - e).norm(), 1e-15);
    for (int s = 0; s < 6; ++s) {
        const Vec6 v = voigt::strain_to_voigt(voigt::unit_strain(s));
        EXPECT_LT((v - Vec6::Unit(s)).norm(), 1e-15);
        const auto [i, j] = voigt::kIndexPairs[s];
        EXPECT_EQ(voigt::slot(i, j), s);
        EXPECT_EQ(voigt::slot(j, i), s);
    }
    const Tensor4Voigt p = analyze(flat_plane(4).tri_mesh(), kLame).homogeneous;
    EXPECT_NEAR(p.energy(2.0 * e), 4.0 * p.energy(e), 1e-12);
    EXPECT_NEAR(p.component(0, 1, 0, 1), kLame.mu, 1e-12);
    EXPECT_NEAR(p.component(1, 0, 0, 1), kLame.mu, 1e-12);
}

TEST(Preconditioner, Parse) {
    EXPECT_EQ(parse_preconditioner("auto"), Preconditioner::Auto);
    EXPECT_EQ(parse_preconditioner("jacobi"), Preconditioner::Jacobi);
    EXPECT_EQ(parse_preconditioner("cholesky"), Preconditioner::Cholesky);
    EXPECT_THROW(parse_preconditioner("amg"), Error);
}
