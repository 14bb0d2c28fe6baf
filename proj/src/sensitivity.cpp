#include "ads/sensitivity.hpp"

#include <unsupported/Eigen/AutoDiff>

#include "face_kernel.hpp"

namespace ads {

namespace {

using Jet18 = Eigen::AutoDiffScalar<Eigen::Matrix<double, 18, 1>>;
using Jet9 = Eigen::AutoDiffScalar<Eigen::Matrix<double, 9, 1>>;
using EnergyJacobian = Eigen::Matrix<double, 22, 18>;
using NormalJacobian = Eigen::Matrix<double, 9, 9>;

constexpr int kPairs = 21;

// Index of the unordered Voigt pair (a, b) in the 21-entry upper triangle.
int pair_index(int a, int b) {
    if (a > b) std::swap(a, b);
    return a * 6 - a * (a - 1) / 2 + (b - a);
}

Mat6 unpack(const Eigen::Matrix<double, kPairs, 1>& p) {
    Mat6 m;
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) m(a, b) = p[pair_index(a, b)];
    return m;
}

// Weights on the upper-triangle entries equivalent to sum_IJ w_IJ X_IJ over a symmetric X.
Eigen::Matrix<double, kPairs, 1> pack_weights(const Mat6& w) {
    Eigen::Matrix<double, kPairs, 1> p = Eigen::Matrix<double, kPairs, 1>::Zero();
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) p[pair_index(a, b)] += w(a, b);
    return p;
}

std::array<Vec3, 3> face_normals(const TriMesh& mesh, const SurfaceGeometry& geom, int f) {
    const Face& t = mesh.faces[f];
    return {geom.vertex_normals[t[0]], geom.vertex_normals[t[1]], geom.vertex_normals[t[2]]};
}

Eigen::Matrix<double, 9, 6> face_displacements(const Face& t, const DisplacementFields& u) {
    Eigen::Matrix<double, 9, 6> out;
    for (int c = 0; c < 3; ++c) out.middleRows<3>(3 * c) = u.middleRows<3>(3 * t[c]);
    return out;
}

EnergyJacobian energy_jacobian(const std::array<Vec3, 3>& x, const std::array<Vec3, 3>& n,
                               const Eigen::Matrix<double, 9, 6>& u, const LameSet& lame,
                               StrainScheme scheme) {
    std::array<kernel::V3<Jet18>, 3> xs, ns;
    for (int c = 0; c < 3; ++c)
        for (int k = 0; k < 3; ++k) {
            xs[c][k] = Jet18(x[c][k], 18, 3 * c + k);
            ns[c][k] = Jet18(n[c][k], 18, 9 + 3 * c + k);
        }
    const auto out = kernel::cell_energy<Jet18>(xs, ns, u, lame, scheme);
    EnergyJacobian j;
    for (int r = 0; r < 22; ++r) j.row(r) = out[r].derivatives().transpose();
    return j;
}

NormalJacobian normal_jacobian(const std::array<Vec3, 3>& x) {
    std::array<kernel::V3<Jet9>, 3> xs;
    for (int c = 0; c < 3; ++c)
        for (int k = 0; k < 3; ++k) xs[c][k] = Jet9(x[c][k], 9, 3 * c + k);
    const auto out = kernel::normal_summands<Jet9>(xs);
    NormalJacobian j;
    for (int r = 0; r < 9; ++r) j.row(r) = out[r].derivatives().transpose();
    return j;
}

Mat2 sym(const Mat2& m) { return 0.5 * (m + m.transpose()); }

double form_a(const LameSet& l, const Mat2& e1, const Mat2& e2) {
    return l.lambda0 * e1.trace() * e2.trace() + 2.0 * l.mu * (e1 * e2).trace();
}

double form_b(const LameSet& l, const Mat2& b, const Mat2& e1, const Mat2& e2) {
    return l.lambda0 * ((b * e1).trace() * e2.trace() + (b * e2).trace() * e1.trace()) +
           4.0 * l.mu * (b * e1 * e2).trace();
}

// Per-vertex coefficients of the continuous rate integrand on one face:
// rows are the three corners, columns the 21 tensor pairs, then the area rate.
Eigen::Matrix<double, 3, kPairs + 1> continuous_coefficients(const FaceGeometry& g,
                                                              const std::array<Vec3, 3>& n,
                                                              const Eigen::Matrix<double, 9, 6>& u,
                                                              const LameSet& lame, StrainScheme scheme) {
    const auto t = g.tangent_basis();
    const Mat2& b = g.second_form;
    const Mat2& c = g.third_form;
    std::array<Eigen::Matrix<double, 2, 3>, 3> tangential;
    for (int i = 0; i < 3; ++i) {
        tangential[i] = t.transpose();
        if (scheme == StrainScheme::Corrected) tangential[i] = t.transpose() * rotation_between(n[i], g.normal);
    }
    const bool curved = scheme != StrainScheme::PlaneStress;

    std::array<Mat2, 6> strain;
    std::array<Mat2, 6> grad_ut, proj_strain;
    std::array<Vec2, 6> ut, grad_u3, eps_n;
    std::array<double, 6> u3;
    for (int s = 0; s < 6; ++s) {
        grad_ut[s].setZero();
        ut[s].setZero();
        grad_u3[s].setZero();
        u3[s] = 0.0;
        for (int i = 0; i < 3; ++i) {
            const Vec3 ui = u.col(s).segment<3>(3 * i);
            const Vec2 ti = tangential[i] * ui;
            const double ni = curved ? n[i].dot(ui) : 0.0;
            grad_ut[s] += ti * g.grad_phi[i].transpose();
            ut[s] += ti / 3.0;
            grad_u3[s] += ni * g.grad_phi[i];
            u3[s] += ni / 3.0;
        }
        const Mat3 eps = voigt::unit_strain(s);
        const Mat2 proj = t.transpose() * eps * t;
        strain[s] = sym(grad_ut[s]) - u3[s] * b + proj;
        proj_strain[s] = proj;
        eps_n[s] = t.transpose() * (eps * g.normal);
    }

    Eigen::Matrix<double, 3, kPairs + 1> out;
    for (int q = 0; q < 3; ++q) {
        const Vec2& gq = g.grad_phi[q];
        std::array<Mat2, 6> zeta;
        for (int s = 0; s < 6; ++s) {
            zeta[s] = b * ut[s] * gq.transpose() - (1.0 / 3.0) * b * grad_ut[s] + grad_u3[s] * gq.transpose() +
                      (u3[s] / 3.0) * c + 2.0 * eps_n[s] * gq.transpose();
            // Weingarten rate of the projected macro-strain.
            zeta[s] -= (2.0 / 3.0) * b * proj_strain[s];
        }
        for (int a = 0; a < 6; ++a)
            for (int bb = a; bb < 6; ++bb) {
                const double volume = form_b(lame, b, strain[a], strain[bb]) -
                                      0.5 * b.trace() * form_a(lame, strain[a], strain[bb]);
                out(q, pair_index(a, bb)) =
                    g.area * ((2.0 / 3.0) * volume + form_a(lame, strain[a], zeta[bb]) +
                              form_a(lame, strain[bb], zeta[a]));
            }
        out(q, kPairs) = -g.area / 3.0 * b.trace();
    }
    return out;
}

}  // namespace

Eigen::VectorXd area_rate_coefficients(const TriMesh& mesh, const SurfaceGeometry& geom) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.num_vertices());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const FaceGeometry& g = geom.faces[f];
        for (int v : mesh.faces[f]) out[v] -= g.area / 3.0 * g.second_form.trace();
    }
    return out;
}

SensitivityMethod parse_sensitivity(std::string_view name) {
    if (name == "discrete") return SensitivityMethod::Discrete;
    if (name == "continuous") return SensitivityMethod::Continuous;
    throw Error(ErrorKind::Config, "unknown sensitivity method '" + std::string(name) + "'");
}

const char* to_string(SensitivityMethod method) {
    return method == SensitivityMethod::Discrete ? "discrete" : "continuous";
}

struct ShapeSensitivity::Rates {
    Mat6 tensor = Mat6::Zero();
    double area = 0.0;
};

ShapeSensitivity::ShapeSensitivity(const TriMesh& mesh, const CellAnalysis& analysis, SensitivityMethod method)
    : mesh_(mesh), analysis_(analysis), method_(method) {
    const Assembly& sys = analysis.system;
    const double m2 = sys.mass.squaredNorm();
    const int nv = mesh.num_vertices();
    translation_residual_.resize(6);
    for (int s = 0; s < 6; ++s) {
        const Eigen::VectorXd r = sys.stiffness * analysis.cell.displacements.col(s) - sys.loads.col(s);
        Vec3 c = Vec3::Zero();
        for (int v = 0; v < nv; ++v) c += sys.mass[v] * r.segment<3>(3 * v);
        translation_residual_[s] = c / m2;
    }
    normal_scale_.assign(nv, 0.0);
    std::vector<Vec3> sums(nv, Vec3::Zero());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto x = mesh.corners(f);
        const Vec3 cross = (x[1] - x[0]).cross(x[2] - x[0]);
        const Vec3 nf = cross.normalized();
        for (int c = 0; c < 3; ++c) {
            const Vec3 u = x[(c + 1) % 3] - x[c], w = x[(c + 2) % 3] - x[c];
            sums[mesh.faces[f][c]] += std::atan2(u.cross(w).norm(), u.dot(w)) * nf;
        }
    }
    for (int v = 0; v < nv; ++v) normal_scale_[v] = sums[v].norm();
}

ShapeSensitivity::Rates ShapeSensitivity::forward(const Eigen::VectorXd& v) const {
    const TriMesh& mesh = mesh_;
    const SurfaceGeometry& geom = analysis_.geometry;
    const Assembly& sys = analysis_.system;
    const int nv = mesh.num_vertices();
    std::vector<Vec3> dx(nv), dn(nv, Vec3::Zero());
    for (int i = 0; i < nv; ++i) dx[i] = v[i] * geom.vertex_normals[i];

    for (int f = 0; f < mesh.num_faces(); ++f) {
        const Face& t = mesh.faces[f];
        Eigen::Matrix<double, 9, 1> d;
        for (int c = 0; c < 3; ++c) d.segment<3>(3 * c) = dx[t[c]];
        const Eigen::Matrix<double, 9, 1> ds = normal_jacobian(mesh.corners(f)) * d;
        for (int c = 0; c < 3; ++c) dn[t[c]] += ds.segment<3>(3 * c);
    }
    for (int i = 0; i < nv; ++i) {
        const Vec3& n = geom.vertex_normals[i];
        dn[i] = (dn[i] - n * n.dot(dn[i])) / normal_scale_[i];
    }

    Eigen::Matrix<double, 22, 1> dw = Eigen::Matrix<double, 22, 1>::Zero();
    std::vector<double> dmass(nv, 0.0);
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const Face& t = mesh.faces[f];
        Eigen::Matrix<double, 18, 1> d;
        for (int c = 0; c < 3; ++c) {
            d.segment<3>(3 * c) = dx[t[c]];
            d.segment<3>(9 + 3 * c) = dn[t[c]];
        }
        const Eigen::Matrix<double, 22, 1> df =
            energy_jacobian(mesh.corners(f), face_normals(mesh, geom, f),
                            face_displacements(t, analysis_.cell.displacements), sys.lame, sys.scheme) * d;
        dw += df;
        for (int c = 0; c < 3; ++c) dmass[t[c]] += df[21] / 3.0;
    }
    // The deflation constraint moves with the mass; its work is r . du.
    std::array<Vec3, 6> mass_moment;
    for (int s = 0; s < 6; ++s) {
        mass_moment[s].setZero();
        for (int i = 0; i < nv; ++i)
            mass_moment[s] += dmass[i] * analysis_.cell.displacements.col(s).segment<3>(3 * i);
    }

    Rates r;
    r.area = dw[21];
    const Mat6& c = analysis_.asymptotic.matrix();
    const double area = sys.area;
    Mat6 dW = unpack(dw.head<kPairs>());
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b)
            dW(a, b) -= translation_residual_[b].dot(mass_moment[a]) + translation_residual_[a].dot(mass_moment[b]);
    r.tensor = (dW - c * r.area) / area;
    return r;
}

Eigen::VectorXd ShapeSensitivity::reverse(const Mat6& weights, double area_weight) const {
    const TriMesh& mesh = mesh_;
    const SurfaceGeometry& geom = analysis_.geometry;
    const Assembly& sys = analysis_.system;
    const int nv = mesh.num_vertices();
    const double area = sys.area;
    const Mat6 w = 0.5 * (weights + weights.transpose());
    const Mat6& c = analysis_.asymptotic.matrix();

    Eigen::Matrix<double, 22, 1> out_weight;
    out_weight.head<kPairs>() = pack_weights(w) / area;
    // Area enters through 1/A directly and through the mass-weighted constraint.
    const double area_direct = area_weight - (w.cwiseProduct(c)).sum() / area;
    std::vector<double> mass_weight(nv, 0.0);
    for (int i = 0; i < nv; ++i) {
        double s = 0.0;
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b)
                s -= 2.0 * w(a, b) * translation_residual_[b].dot(analysis_.cell.displacements.col(a).segment<3>(3 * i));
        mass_weight[i] = s / area;
    }

    std::vector<Vec3> gx(nv, Vec3::Zero()), gn(nv, Vec3::Zero());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const Face& t = mesh.faces[f];
        out_weight[21] = area_direct + (mass_weight[t[0]] + mass_weight[t[1]] + mass_weight[t[2]]) / 3.0;
        const Eigen::Matrix<double, 18, 1> g =
            energy_jacobian(mesh.corners(f), face_normals(mesh, geom, f),
                            face_displacements(t, analysis_.cell.displacements), sys.lame, sys.scheme)
                .transpose() *
            out_weight;
        for (int k = 0; k < 3; ++k) {
            gx[t[k]] += g.segment<3>(3 * k);
            gn[t[k]] += g.segment<3>(9 + 3 * k);
        }
    }
    for (int i = 0; i < nv; ++i) {
        const Vec3& n = geom.vertex_normals[i];
        gn[i] = (gn[i] - n * n.dot(gn[i])) / normal_scale_[i];
    }
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const Face& t = mesh.faces[f];
        Eigen::Matrix<double, 9, 1> gs;
        for (int k = 0; k < 3; ++k) gs.segment<3>(3 * k) = gn[t[k]];
        const Eigen::Matrix<double, 9, 1> g = normal_jacobian(mesh.corners(f)).transpose() * gs;
        for (int k = 0; k < 3; ++k) gx[t[k]] += g.segment<3>(3 * k);
    }
    Eigen::VectorXd out(nv);
    for (int i = 0; i < nv; ++i) out[i] = gx[i].dot(geom.vertex_normals[i]);
    return out;
}

ShapeSensitivity::Rates ShapeSensitivity::forward_continuous(const Eigen::VectorXd& v) const {
    const Assembly& sys = analysis_.system;
    Eigen::Matrix<double, kPairs + 1, 1> acc = Eigen::Matrix<double, kPairs + 1, 1>::Zero();
    for (int f = 0; f < mesh_.num_faces(); ++f) {
        const Face& t = mesh_.faces[f];
        const auto k = continuous_coefficients(analysis_.geometry.faces[f], face_normals(mesh_, analysis_.geometry, f),
                                               face_displacements(t, analysis_.cell.displacements), sys.lame,
                                               sys.scheme);
        for (int q = 0; q < 3; ++q) acc += v[t[q]] * k.row(q).transpose();
    }
    Rates r;
    r.area = acc[kPairs];
    r.tensor = (unpack(acc.head<kPairs>()) - analysis_.asymptotic.matrix() * r.area) / sys.area;
    return r;
}

Eigen::VectorXd ShapeSensitivity::reverse_continuous(const Mat6& weights, double area_weight) const {
    const Assembly& sys = analysis_.system;
    const Mat6 w = 0.5 * (weights + weights.transpose());
    Eigen::Matrix<double, kPairs + 1, 1> out_weight;
    out_weight.head<kPairs>() = pack_weights(w) / sys.area;
    out_weight[kPairs] = area_weight - (w.cwiseProduct(analysis_.asymptotic.matrix())).sum() / sys.area;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh_.num_vertices());
    for (int f = 0; f < mesh_.num_faces(); ++f) {
        const Face& t = mesh_.faces[f];
        const auto k = continuous_coefficients(analysis_.geometry.faces[f], face_normals(mesh_, analysis_.geometry, f),
                                               face_displacements(t, analysis_.cell.displacements), sys.lame,
                                               sys.scheme);
        const Vec3 g = k * out_weight;
        for (int q = 0; q < 3; ++q) out[t[q]] += g[q];
    }
    return out;
}

Mat6 ShapeSensitivity::ca_rate(const Eigen::VectorXd& v) const {
    if (v.size() != mesh_.num_vertices()) throw Error(ErrorKind::InvalidArgument, "velocity size mismatch");
    return method_ == SensitivityMethod::Discrete ? forward(v).tensor : forward_continuous(v).tensor;
}

double ShapeSensitivity::area_rate(const Eigen::VectorXd& v) const { return area_gradient().dot(v); }

Eigen::VectorXd ShapeSensitivity::gradient(const Mat6& weights) const {
    return method_ == SensitivityMethod::Discrete ? reverse(weights, 0.0) : reverse_continuous(weights, 0.0);
}

Eigen::VectorXd ShapeSensitivity::area_gradient() const {
    if (method_ == SensitivityMethod::Continuous) return area_rate_coefficients(mesh_, analysis_.geometry);
    return reverse(Mat6::Zero(), 1.0);
}

}  // namespace ads
