#include "ads/solver.hpp"

#include <cmath>

#include <Eigen/SparseCholesky>

namespace ads {

Assembly assemble(const TriMesh& mesh, const SurfaceGeometry& geom, const LameSet& lame,
                  StrainScheme scheme) {
    const int nv = mesh.num_vertices();
    Assembly sys;
    sys.lame = lame;
    sys.scheme = scheme;
    sys.loads = DisplacementFields::Zero(3 * nv, 6);
    sys.mass = lumped_mass(mesh);
    sys.kinematics.reserve(mesh.num_faces());

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(mesh.num_faces()) * 81);
    const Mat3 d = membrane_matrix(lame);
    Mat6 em = Mat6::Zero();

    for (int f = 0; f < mesh.num_faces(); ++f) {
        const FaceGeometry& g = geom.faces[f];
        const Face& t = mesh.faces[f];
        const std::array<Vec3, 3> normals{geom.vertex_normals[t[0]], geom.vertex_normals[t[1]],
                                          geom.vertex_normals[t[2]]};
        FaceKinematics kin = face_kinematics(g, normals, scheme);
        const ElementStiffness ke = element_stiffness(g, kin, lame);
        const ElementLoads fe = element_unit_loads(g, kin, lame);
        for (int a = 0; a < 3; ++a) {
            for (int i = 0; i < 3; ++i) {
                const int row = 3 * t[a] + i;
                sys.loads.row(row) += fe.row(3 * a + i);
                for (int b = 0; b < 3; ++b)
                    for (int j = 0; j < 3; ++j)
                        trip.emplace_back(row, 3 * t[b] + j, ke(3 * a + i, 3 * b + j));
            }
        }
        Eigen::Matrix<double, 3, 6> proj;
        for (int s = 0; s < 6; ++s) proj.col(s) = projected_strain(g, voigt::unit_strain(s));
        em.noalias() += g.area * proj.transpose() * d * proj;
        sys.area += g.area;
        sys.kinematics.push_back(std::move(kin));
    }
    sys.stiffness.resize(3 * nv, 3 * nv);
    sys.stiffness.setFromTriplets(trip.begin(), trip.end());
    sys.homogeneous = Tensor4Voigt(em / sys.area);
    sys.homogeneous.symmetrize();
    return sys;
}

Preconditioner parse_preconditioner(std::string_view name) {
    if (name == "auto") return Preconditioner::Auto;
    if (name == "jacobi") return Preconditioner::Jacobi;
    if (name == "cholesky") return Preconditioner::Cholesky;
    throw Error(ErrorKind::InvalidArgument, "unknown preconditioner: " + std::string(name));
}

const char* to_string(Preconditioner preconditioner) {
    switch (preconditioner) {
        case Preconditioner::Auto: return "auto";
        case Preconditioner::Jacobi: return "jacobi";
        case Preconditioner::Cholesky: return "cholesky";
    }
    return "auto";
}

namespace {

// Orthogonal projector onto {u : sum_i m_i u_i = 0}.
class TranslationProjector {
public:
    explicit TranslationProjector(const Eigen::VectorXd& mass) : mass_(mass), norm2_(mass.squaredNorm()) {}

    void apply(Eigen::VectorXd& u) const {
        const int nv = static_cast<int>(mass_.size());
        Eigen::Map<Eigen::Matrix<double, 3, Eigen::Dynamic>> block(u.data(), 3, nv);
        const Vec3 c = block * mass_ / norm2_;
        block -= c * mass_.transpose();
    }

private:
    const Eigen::VectorXd& mass_;
    double norm2_;
};

class PreconditionerOp {
public:
    PreconditionerOp(const SparseMatrix& k, Preconditioner kind) : kind_(kind) {
        if (kind_ == Preconditioner::Auto)
            kind_ = k.rows() <= 3 * kAutoCholeskyVertices ? Preconditioner::Cholesky : Preconditioner::Jacobi;
        const Eigen::VectorXd diag = k.diagonal();
        const double scale = diag.cwiseAbs().maxCoeff();
        if (kind_ == Preconditioner::Jacobi) {
            inv_diag_ = diag.unaryExpr([&](double x) { return x > 1e-12 * scale ? 1.0 / x : 0.0; });
            if (scale <= 0.0) inv_diag_.setZero();
            return;
        }
        SparseMatrix shifted = k;
        const double shift = 1e-8 * (scale > 0.0 ? scale : 1.0);
        for (int i = 0; i < shifted.rows(); ++i) shifted.coeffRef(i, i) += shift;
        ldlt_.compute(shifted);
        if (ldlt_.info() != Eigen::Success)
            throw Error(ErrorKind::NoConvergence, "factorization of the shifted stiffness failed");
    }

    Eigen::VectorXd apply(const Eigen::VectorXd& r) const {
        if (kind_ == Preconditioner::Jacobi) return inv_diag_.cwiseProduct(r);
        return ldlt_.solve(r);
    }

private:
    Preconditioner kind_;
    Eigen::VectorXd inv_diag_;
    Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
};

Eigen::VectorXd projected_cg(const SparseMatrix& k, const Eigen::VectorXd& f,
                             const TranslationProjector& proj, const PreconditionerOp& pre,
                             const SolverOptions& options, double* relative_residual, int* iterations) {
    const int n = static_cast<int>(f.size());
    const int max_iter = options.max_iter > 0 ? options.max_iter
                                              : static_cast<int>(50.0 * std::sqrt(static_cast<double>(n)));
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r = f;
    proj.apply(r);
    const double rhs_norm = r.norm();
    const double scale = std::max(f.norm(), 1e-300);
    if (rhs_norm <= 1e-14 * scale || rhs_norm == 0.0) {
        if (relative_residual) *relative_residual = 0.0;
        if (iterations) *iterations = 0;
        return u;
    }
    Eigen::VectorXd z = pre.apply(r);
    proj.apply(z);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    Eigen::VectorXd kp(n);
    for (int it = 1; it <= max_iter; ++it) {
        kp.noalias() = k * p;
        proj.apply(kp);
        const double pkp = p.dot(kp);
        if (!(pkp > 0.0)) {
            // Search direction in the kernel: the residual is kernel-consistent, stop here.
            break;
        }
        const double alpha = rz / pkp;
        u += alpha * p;
        r -= alpha * kp;
        const double rel = r.norm() / rhs_norm;
        if (rel <= options.tol_rel) {
            if (relative_residual) *relative_residual = rel;
            if (iterations) *iterations = it;
            return u;
        }
        z = pre.apply(r);
        proj.apply(z);
        const double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    // Report the true residual.
    Eigen::VectorXd res = f - k * u;
    proj.apply(res);
    const double rel = res.norm() / rhs_norm;
    if (relative_residual) *relative_residual = rel;
    if (iterations) *iterations = max_iter;
    if (rel > options.tol_rel)
        throw Error(ErrorKind::NoConvergence,
                    "CG stopped at relative residual " + std::to_string(rel));
    return u;
}

}  // namespace

Eigen::VectorXd solve_constrained(const SparseMatrix& k, const Eigen::VectorXd& f,
                                  const Eigen::VectorXd& mass, const SolverOptions& options,
                                  double* relative_residual, int* iterations) {
    const TranslationProjector proj(mass);
    const PreconditionerOp pre(k, options.preconditioner);
    return projected_cg(k, f, proj, pre, options, relative_residual, iterations);
}

CellSolution solve_cell(const Assembly& system, const SolverOptions& options) {
    const TranslationProjector proj(system.mass);
    const PreconditionerOp pre(system.stiffness, options.preconditioner);
    CellSolution cell;
    cell.displacements.resize(system.loads.rows(), 6);
    for (int s = 0; s < 6; ++s) {
        const Eigen::VectorXd f = system.loads.col(s);
        cell.displacements.col(s) = projected_cg(system.stiffness, f, proj, pre, options,
                                                 &cell.relative_residual[s], &cell.iterations[s]);
    }
    return cell;
}

Tensor4Voigt compute_CA(const Assembly& system, const CellSolution& cell) {
    const Mat6 work = cell.displacements.transpose() * system.loads;
    Tensor4Voigt c(system.homogeneous.matrix() - work / system.area);
    c.symmetrize();
    return c;
}

Tensor4Voigt compute_EM_tensor(const TriMesh& mesh, const SurfaceGeometry& geom, const LameSet& lame) {
    Mat6 acc = Mat6::Zero();
    double area = 0.0;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const FaceGeometry& g = geom.faces[f];
        const Mat3 p = g.projection();
        Mat6 local;
        for (int a = 0; a < 6; ++a) {
            const auto [i, j] = voigt::kIndexPairs[a];
            for (int b = 0; b < 6; ++b) {
                const auto [k, l] = voigt::kIndexPairs[b];
                local(a, b) = lame.lambda0 * p(i, j) * p(k, l) + lame.mu * (p(i, l) * p(j, k) + p(i, k) * p(j, l));
            }
        }
        acc += g.area * local;
        area += g.area;
    }
    return Tensor4Voigt(acc / area);
}

OptimalityResidual optimality_residual(const TriMesh& mesh, const SurfaceGeometry& geom,
                                       const LameSet& lame, const Mat3& eps) {
    OptimalityResidual out;
    out.tangential.resize(mesh.num_faces());
    out.normal.resize(mesh.num_faces());
    double area = 0.0, t2 = 0.0, n2 = 0.0;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const FaceGeometry& g = geom.faces[f];
        const Mat3 b = g.second_form_world();
        const Mat3 p = g.projection();
        const double h = 0.5 * g.second_form.trace();
        out.tangential[f] = (2.0 * (lame.lambda0 + lame.mu) * b + 4.0 * lame.mu * h * p) * eps * g.normal;
        out.normal[f] = 2.0 * (lame.lambda0 * h * p + lame.mu * b).cwiseProduct(eps).sum();
        area += g.area;
        t2 += g.area * out.tangential[f].squaredNorm();
        n2 += g.area * out.normal[f] * out.normal[f];
    }
    if (area > 0.0) {
        out.tangential_l2 = std::sqrt(t2 / area);
        out.normal_l2 = std::sqrt(n2 / area);
    }
    return out;
}

CellAnalysis analyze(const TriMesh& mesh, const LameSet& lame, StrainScheme scheme,
                     const SolverOptions& options, std::optional<std::span<const Vec3>> normals) {
    CellAnalysis a;
    a.geometry = compute_geometry(mesh, normals);
    a.system = assemble(mesh, a.geometry, lame, scheme);
    a.cell = solve_cell(a.system, options);
    a.asymptotic = compute_CA(a.system, a.cell);
    a.homogeneous = compute_EM_tensor(mesh, a.geometry, lame);
    return a;
}

}  // namespace ads
