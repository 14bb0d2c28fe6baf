#include "ads/geometry.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace ads {

namespace {

constexpr double kMinArea = 1e-12;

double corner_angle(const Vec3& at, const Vec3& p, const Vec3& q) {
    const Vec3 u = p - at, v = q - at;
    return std::atan2(u.cross(v).norm(), u.dot(v));
}

}  // namespace

Mat3 FaceGeometry::second_form_world() const {
    const auto t = tangent_basis();
    return t * second_form * t.transpose();
}

VertexNormals vertex_normals(const TriMesh& mesh) {
    VertexNormals out;
    out.normals.assign(mesh.num_vertices(), Vec3::Zero());
    std::vector<Vec3> face_normals(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto x = mesh.corners(f);
        const Vec3 cross = (x[1] - x[0]).cross(x[2] - x[0]);
        const double len = cross.norm();
        face_normals[f] = len > 0.0 ? Vec3(cross / len) : Vec3::Zero();
        for (int c = 0; c < 3; ++c) {
            const double theta = corner_angle(x[c], x[(c + 1) % 3], x[(c + 2) % 3]);
            out.normals[mesh.faces[f][c]] += theta * face_normals[f];
        }
    }
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const double len = out.normals[v].norm();
        if (!(len > 1e-14)) throw Error(ErrorKind::ZeroNormal, "vertex " + std::to_string(v));
        out.normals[v] /= len;
    }
    for (int f = 0; f < mesh.num_faces(); ++f) {
        for (int c : mesh.faces[f]) {
            if (out.normals[c].dot(face_normals[f]) <= 0.0) {
                ++out.inconsistent_faces;
                break;
            }
        }
    }
    return out;
}

FaceGeometry face_frame(const std::array<Vec3, 3>& corners) {
    FaceGeometry g;
    g.corners = corners;
    const Vec3 e1 = corners[1] - corners[0];
    const Vec3 e2 = corners[2] - corners[0];
    const Vec3 cross = e1.cross(e2);
    g.area = 0.5 * cross.norm();
    if (!(g.area > kMinArea)) throw Error(ErrorKind::DegenerateFace, "face area below threshold");
    g.normal = cross.normalized();
    g.t1 = e1.normalized();
    g.t2 = g.normal.cross(g.t1);
    for (int i = 0; i < 3; ++i) {
        const Vec3 opposite = corners[(i + 2) % 3] - corners[(i + 1) % 3];
        const Vec3 grad = g.normal.cross(opposite) / (2.0 * g.area);
        g.grad_phi[i] = Vec2(grad.dot(g.t1), grad.dot(g.t2));
    }
    return g;
}

Mat2 face_second_form(const FaceGeometry& face, const std::array<Vec3, 3>& corner_normals) {
    Mat3 a;
    Vec3 rhs;
    double scale = 0.0;
    for (int k = 0; k < 3; ++k) {
        const int i = k, j = (k + 1) % 3;
        const Vec3 l = face.corners[j] - face.corners[i];
        const double l1 = l.dot(face.t1), l2 = l.dot(face.t2);
        a.row(k) << l1 * l1, l2 * l2, 2.0 * l1 * l2;
        rhs[k] = -(corner_normals[j] - corner_normals[i]).dot(l);
        scale = std::max(scale, l.squaredNorm());
    }
    Eigen::FullPivLU<Mat3> lu(a);
    lu.setThreshold(1e-10);
    if (!lu.isInvertible() || std::abs(a.determinant()) < 1e-14 * scale * scale * scale)
        throw Error(ErrorKind::SingularEdgeSystem, "collinear edge system");
    const Vec3 s = lu.solve(rhs);
    Mat2 b;
    b << s[0], s[2], s[2], s[1];
    return b;
}

SurfaceGeometry compute_geometry(const TriMesh& mesh, std::optional<std::span<const Vec3>> normals) {
    SurfaceGeometry geom;
    if (normals) {
        if (static_cast<int>(normals->size()) != mesh.num_vertices())
            throw Error(ErrorKind::InvalidArgument, "normal count mismatch");
        geom.vertex_normals.assign(normals->begin(), normals->end());
    } else {
        VertexNormals vn = vertex_normals(mesh);
        geom.vertex_normals = std::move(vn.normals);
        geom.inconsistent_faces = vn.inconsistent_faces;
    }
    geom.faces.reserve(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        FaceGeometry g = face_frame(mesh.corners(f));
        const Face& t = mesh.faces[f];
        g.second_form = face_second_form(
            g, {geom.vertex_normals[t[0]], geom.vertex_normals[t[1]], geom.vertex_normals[t[2]]});
        g.third_form = g.second_form * g.second_form;
        geom.faces.push_back(std::move(g));
    }
    return geom;
}

Mat3 rotation_between(const Vec3& from, const Vec3& to) {
    const double c = from.dot(to);
    if (c < -0.99984769515639127)  // cos(179 degrees)
        throw Error(ErrorKind::DegenerateFace, "vertex normal opposes face normal");
    const Vec3 axis = from.cross(to);
    Mat3 k;
    k << 0, -axis.z(), axis.y(), axis.z(), 0, -axis.x(), -axis.y(), axis.x(), 0;
    return Mat3::Identity() + k + k * k / (1.0 + c);
}

SparseMatrix cotan_laplacian(const TriMesh& mesh) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(mesh.num_faces() * 12);
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto x = mesh.corners(f);
        const Face& t = mesh.faces[f];
        for (int c = 0; c < 3; ++c) {
            const int i = t[(c + 1) % 3], j = t[(c + 2) % 3];
            const Vec3 u = x[(c + 1) % 3] - x[c], v = x[(c + 2) % 3] - x[c];
            const double cross = u.cross(v).norm();
            const double w = cross > 0.0 ? 0.5 * u.dot(v) / cross : 0.0;
            trip.emplace_back(i, j, w);
            trip.emplace_back(j, i, w);
            trip.emplace_back(i, i, -w);
            trip.emplace_back(j, j, -w);
        }
    }
    SparseMatrix l(mesh.num_vertices(), mesh.num_vertices());
    l.setFromTriplets(trip.begin(), trip.end());
    return l;
}

Eigen::VectorXd lumped_mass(const TriMesh& mesh) {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(mesh.num_vertices());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto x = mesh.corners(f);
        const double area = 0.5 * (x[1] - x[0]).cross(x[2] - x[0]).norm();
        for (int c : mesh.faces[f]) m[c] += area / 3.0;
    }
    return m;
}

std::vector<double> vertex_max_curvature(const TriMesh& mesh, const SurfaceGeometry& geom) {
    const int nv = mesh.num_vertices();
    std::vector<Mat3> acc(nv, Mat3::Zero());
    std::vector<double> weight(nv, 0.0);
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const FaceGeometry& g = geom.faces[f];
        const Mat3 b = g.second_form_world();
        for (int v : mesh.faces[f]) {
            const Vec3& n = geom.vertex_normals[v];
            Mat3 r = Mat3::Identity();
            if (n.dot(g.normal) > -0.9998) r = rotation_between(g.normal, n);
            acc[v] += g.area * r * b * r.transpose();
            weight[v] += g.area;
        }
    }
    std::vector<double> out(nv, 0.0);
    for (int v = 0; v < nv; ++v) {
        if (weight[v] <= 0.0) continue;
        const Vec3& n = geom.vertex_normals[v];
        const Mat3 p = Mat3::Identity() - n * n.transpose();
        const Mat3 t = p * (acc[v] / weight[v]) * p;
        Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (t + t.transpose()), Eigen::EigenvaluesOnly);
        out[v] = es.eigenvalues().cwiseAbs().maxCoeff();
    }
    return out;
}

}  // namespace ads
