#include "ads/benchmarks.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace ads {

VectorField wave_field() {
    VectorField f;
    f.value = [](const Vec3& x) {
        return Vec3(std::cos(x.x()), std::sin(x.x() * x.y()), std::sin(x.x() + x.z()));
    };
    f.jacobian = [](const Vec3& x) {
        const double c = std::cos(x.x() * x.y()), s = std::cos(x.x() + x.z());
        Mat3 j;
        j << -std::sin(x.x()), 0.0, 0.0, x.y() * c, x.x() * c, 0.0, s, 0.0, s;
        return j;
    };
    return f;
}

double patch_strain_error(const AnalyticPatch& patch, const VectorField& field, StrainScheme scheme) {
    const TriMesh& mesh = patch.mesh;
    const SurfaceGeometry geom = compute_geometry(mesh, patch.normals);
    double err2 = 0.0, area = 0.0;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const FaceGeometry& g = geom.faces[f];
        const Face& t = mesh.faces[f];
        const std::array<Vec3, 3> normals{patch.normals[t[0]], patch.normals[t[1]], patch.normals[t[2]]};
        const FaceKinematics kin = face_kinematics(g, normals, scheme);
        Eigen::Matrix<double, 9, 1> u;
        for (int c = 0; c < 3; ++c) u.segment<3>(3 * c) = field.value(mesh.vertices[t[c]]);
        const Mat3 discrete = strain_to_world(g, kin.at(Vec3::Constant(1.0 / 3.0)) * u);

        const Vec3 centroid = (g.corners[0] + g.corners[1] + g.corners[2]) / 3.0;
        const Vec3 x = patch.point(centroid.x(), centroid.y());
        const Vec3 n = patch.normal_at(centroid.x(), centroid.y());
        const Mat3 p = Mat3::Identity() - n * n.transpose();
        const Mat3 du = field.jacobian(x);
        const Mat3 exact = p * (0.5 * (du + du.transpose())) * p;

        err2 += g.area * (discrete - exact).squaredNorm();
        area += g.area;
    }
    return std::sqrt(err2 / area);
}

double displacement_roughness(const TriMesh& mesh, const Eigen::VectorXd& displacement) {
    const SparseMatrix l = cotan_laplacian(mesh);
    const int nv = mesh.num_vertices();
    double energy = 0.0;
    for (int c = 0; c < 3; ++c) {
        Eigen::VectorXd u(nv);
        for (int v = 0; v < nv; ++v) u[v] = displacement[3 * v + c];
        energy -= u.dot(l * u);
    }
    return energy;
}

std::vector<IdentityCheck> identity_checks(const CellAnalysis& analysis) {
    const LameSet& lame = analysis.system.lame;
    const Tensor4Voigt& ca = analysis.asymptotic;
    const Tensor4Voigt& pb = analysis.homogeneous;
    std::vector<IdentityCheck> out;
    auto equal = [&](std::string name, double value, double reference, double tol) {
        out.push_back({std::move(name), value, reference, tol, false, std::abs(value - reference) <= tol});
    };
    auto bounded = [&](std::string name, double value, double bound, double tol) {
        out.push_back({std::move(name), value, bound, tol, true, value <= bound + tol});
    };
    equal("hydrostatic_energy", bulk_modulus(pb), 4.0 / 9.0 * (lame.lambda0 + lame.mu), 1e-9);
    equal("eigenvalue_sum", pb.eigenvalue_sum(), 2.0 * lame.lambda0 + 6.0 * lame.mu, 1e-8);
    static const char* names[6] = {"11", "22", "33", "23", "13", "12"};
    for (int s = 0; s < 6; ++s) {
        const Mat3 e = voigt::unit_strain(s);
        bounded(std::string("unit_strain_bound_") + names[s], ca.energy(e), pb.energy(e), 1e-8);
    }
    const Eigen::SelfAdjointEigenSolver<Mat6> gap(voigt::mandel(pb.matrix() - ca.matrix()));
    bounded("operator_bound", -gap.eigenvalues().minCoeff(), 0.0, 1e-8);
    bounded("positive_semidefinite", -ca.mandel_eigenvalues().minCoeff(), 0.0, 1e-8);
    bounded("bulk_bound", bulk_modulus(ca), 4.0 / 9.0 * (lame.lambda0 + lame.mu), 1e-8);
    return out;
}

LevelSetField ladder_field() {
    LevelSetField f;
    f.value = [](const Vec3& x) {
        return 1.2 * std::cos(M_PI * x.x()) + 0.9 * std::cos(M_PI * x.y()) + 1.5 * std::cos(M_PI * x.z());
    };
    f.gradient = [](const Vec3& x) {
        return Vec3(-1.2 * M_PI * std::sin(M_PI * x.x()), -0.9 * M_PI * std::sin(M_PI * x.y()),
                    -1.5 * M_PI * std::sin(M_PI * x.z()));
    };
    return f;
}

std::vector<LadderLevel> refinement_ladder(const LevelSetField& field, int levels, const LadderOptions& options) {
    if (levels < 1) throw Error(ErrorKind::InvalidArgument, "ladder needs at least one level");
    std::vector<LadderLevel> out;
    for (int k = 0; k < levels; ++k) {
        LadderLevel level;
        level.level = k;
        level.target_edge = options.base_edge * std::pow(options.ratio, k);
        ExtractOptions ex;
        ex.grid_n = options.grid;
        ex.target_edge_length = level.target_edge;
        ex.remesh_iterations = options.remesh_iterations;
        ex.project = true;
        const TriMesh mesh = extract_mesh(field, ex).tri_mesh();
        level.mesh_size = mean_element_size(mesh).mean;
        level.vertices = mesh.num_vertices();
        level.asymptotic = analyze(mesh, options.lame, options.scheme, options.solver).asymptotic;
        if (k > 0) level.successive_error = tensor_rel_error(level.asymptotic, out.back().asymptotic);
        out.push_back(level);
    }
    return out;
}

}  // namespace ads
