#include "ads/surface_gen.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <unordered_map>

namespace ads {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec3 to_unit(const Vec3& x) { return 0.5 * (x + Vec3::Ones()); }

Vec3 tpms_gradient_unit(TpmsKind kind, const Vec3& r) {
    const double sx = std::sin(kTwoPi * r.x()), sy = std::sin(kTwoPi * r.y()), sz = std::sin(kTwoPi * r.z());
    const double cx = std::cos(kTwoPi * r.x()), cy = std::cos(kTwoPi * r.y()), cz = std::cos(kTwoPi * r.z());
    switch (kind) {
        case TpmsKind::P:
            return -kTwoPi * Vec3(sx, sy, sz);
        case TpmsKind::G:
            return kTwoPi * Vec3(cx * cy - sz * sx, cy * cz - sx * sy, cz * cx - sy * sz);
        case TpmsKind::D:
            return kTwoPi * Vec3(cx * sy * sz + cx * cy * cz - sx * sy * cz - sx * cy * sz,
                                 sx * cy * sz - sx * sy * cz + cx * cy * cz - cx * sy * sz,
                                 sx * sy * cz - sx * cy * sz - cx * sy * sz + cx * cy * cz);
        case TpmsKind::IWP: {
            const double k2 = 2.0 * kTwoPi;
            return Vec3(-2.0 * kTwoPi * sx * (cy + cz) + k2 * std::sin(k2 * r.x()),
                        -2.0 * kTwoPi * sy * (cx + cz) + k2 * std::sin(k2 * r.y()),
                        -2.0 * kTwoPi * sz * (cx + cy) + k2 * std::sin(k2 * r.z()));
        }
    }
    return Vec3::Zero();
}

// One trigonometric mode sin/cos(2 pi k r_axis).
struct Mode {
    int axis;
    int k;
    bool is_sin;

    double value(const Vec3& r) const {
        const double a = kTwoPi * k * r[axis];
        return is_sin ? std::sin(a) : std::cos(a);
    }
    Vec3 gradient(const Vec3& r) const {
        const double a = kTwoPi * k * r[axis];
        Vec3 g = Vec3::Zero();
        g[axis] = kTwoPi * k * (is_sin ? std::cos(a) : -std::sin(a));
        return g;
    }
    std::string name() const {
        static const char* axes[] = {"x", "y", "z"};
        return std::string(is_sin ? "sin" : "cos") + "(2pi*" + std::to_string(k) + "*" + axes[axis] + ")";
    }
};

}  // namespace

TpmsKind parse_tpms(std::string_view name) {
    if (name == "P" || name == "p") return TpmsKind::P;
    if (name == "G" || name == "g") return TpmsKind::G;
    if (name == "D" || name == "d") return TpmsKind::D;
    if (name == "IWP" || name == "iwp") return TpmsKind::IWP;
    throw Error(ErrorKind::Config, "unknown surface kind '" + std::string(name) + "'");
}

const char* to_string(TpmsKind kind) {
    switch (kind) {
        case TpmsKind::P: return "P";
        case TpmsKind::G: return "G";
        case TpmsKind::D: return "D";
        case TpmsKind::IWP: return "IWP";
    }
    return "P";
}

double tpms_value_unit(TpmsKind kind, const Vec3& r) {
    const double sx = std::sin(kTwoPi * r.x()), sy = std::sin(kTwoPi * r.y()), sz = std::sin(kTwoPi * r.z());
    const double cx = std::cos(kTwoPi * r.x()), cy = std::cos(kTwoPi * r.y()), cz = std::cos(kTwoPi * r.z());
    switch (kind) {
        case TpmsKind::P: return cx + cy + cz;
        case TpmsKind::G: return sx * cy + sz * cx + sy * cz;
        case TpmsKind::D: return sx * sy * sz + sx * cy * cz + cx * sy * cz + cx * cy * sz;
        case TpmsKind::IWP:
            return 2.0 * (cx * cy + cy * cz + cz * cx) -
                   (std::cos(2.0 * kTwoPi * r.x()) + std::cos(2.0 * kTwoPi * r.y()) +
                    std::cos(2.0 * kTwoPi * r.z()));
    }
    return 0.0;
}

LevelSetField tpms_field(TpmsKind kind) {
    return {[kind](const Vec3& x) { return tpms_value_unit(kind, to_unit(x)); },
            [kind](const Vec3& x) -> Vec3 { return 0.5 * tpms_gradient_unit(kind, to_unit(x)); }};
}

PerturbedField perturbed_field(const PerturbationSpec& spec) {
    if (spec.frequency_cap < 1) throw Error(ErrorKind::InvalidArgument, "frequency cap must be >= 1");
    if (!(spec.strength >= 0.0)) throw Error(ErrorKind::InvalidArgument, "strength must be >= 0");
    std::vector<Mode> modes;
    for (int k = 1; k <= spec.frequency_cap; ++k)
        for (int axis = 0; axis < 3; ++axis)
            for (bool is_sin : {true, false}) modes.push_back({axis, k, is_sin});

    // Single modes first, then unordered products p*q with p <= q.
    struct Term {
        int p, q;  // q < 0 for a single mode
    };
    std::vector<Term> terms;
    for (int p = 0; p < static_cast<int>(modes.size()); ++p) terms.push_back({p, -1});
    for (int p = 0; p < static_cast<int>(modes.size()); ++p)
        for (int q = p; q < static_cast<int>(modes.size()); ++q) terms.push_back({p, q});

    PerturbedField out;
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> dist(-spec.strength, spec.strength);
    for (const Term& t : terms) {
        out.coefficients.push_back(spec.strength > 0.0 ? dist(rng) : 0.0);
        out.basis.push_back(t.q < 0 ? modes[t.p].name() : modes[t.p].name() + "*" + modes[t.q].name());
    }

    const TpmsKind base = spec.base;
    auto coeffs = out.coefficients;
    auto value = [base, modes, terms, coeffs](const Vec3& x) {
        const Vec3 r = to_unit(x);
        double v = tpms_value_unit(base, r);
        for (size_t i = 0; i < terms.size(); ++i) {
            if (coeffs[i] == 0.0) continue;
            const double a = modes[terms[i].p].value(r);
            v += coeffs[i] * (terms[i].q < 0 ? a : a * modes[terms[i].q].value(r));
        }
        return v;
    };
    auto gradient = [base, modes, terms, coeffs](const Vec3& x) -> Vec3 {
        const Vec3 r = to_unit(x);
        Vec3 g = tpms_gradient_unit(base, r);
        for (size_t i = 0; i < terms.size(); ++i) {
            if (coeffs[i] == 0.0) continue;
            const Mode& p = modes[terms[i].p];
            if (terms[i].q < 0) {
                g += coeffs[i] * p.gradient(r);
            } else {
                const Mode& q = modes[terms[i].q];
                g += coeffs[i] * (p.gradient(r) * q.value(r) + p.value(r) * q.gradient(r));
            }
        }
        return 0.5 * g;
    };
    out.field = {value, gradient};
    return out;
}

LevelSetField numeric_field(std::function<double(const Vec3&)> value, double step) {
    auto grad = [value, step](const Vec3& x) {
        Vec3 g;
        for (int i = 0; i < 3; ++i) {
            Vec3 a = x, b = x;
            a[i] += step;
            b[i] -= step;
            g[i] = (value(a) - value(b)) / (2.0 * step);
        }
        return g;
    };
    return {value, grad};
}

// ---------------------------------------------------------------------------

PeriodicMesh extract_raw(const LevelSetField& field, int grid_n) {
    if (grid_n < 4) throw Error(ErrorKind::InvalidArgument, "grid resolution too small");
    const int n = grid_n;
    const double h = torus::kPeriod / n;
    auto idx = [n](int i, int j, int k) {
        i = ((i % n) + n) % n;
        j = ((j % n) + n) % n;
        k = ((k % n) + n) % n;
        return (static_cast<long>(i) * n + j) * n + k;
    };
    std::vector<double> phi(static_cast<size_t>(n) * n * n);
    bool has_pos = false, has_neg = false;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double v = field.value(Vec3(-1.0 + i * h, -1.0 + j * h, -1.0 + k * h));
                if (v == 0.0) v = 1e-14;
                phi[idx(i, j, k)] = v;
                (v > 0.0 ? has_pos : has_neg) = true;
            }
    if (!has_pos || !has_neg) throw Error(ErrorKind::EmptyLevelSet, "field does not change sign on the grid");

    std::vector<Vec3> positions;
    std::vector<Face> faces;
    std::unordered_map<long, int> edge_vertex;

    // Corner offsets of the cube; tets follow the main diagonal 0 -> 7.
    static const int kPermutations[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};

    auto vertex_on_edge = [&](const std::array<int, 3>& a, const std::array<int, 3>& b, const Vec3& origin) {
        const std::array<int, 3> d{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
        const int code = d[0] * 4 + d[1] * 2 + d[2];
        const long key = idx(a[0], a[1], a[2]) * 8 + code;
        const double pa = phi[idx(a[0], a[1], a[2])], pb = phi[idx(b[0], b[1], b[2])];
        const double t = std::clamp(pa / (pa - pb), 1e-4, 1.0 - 1e-4);
        const Vec3 xa = origin + h * Vec3(a[0], a[1], a[2]);
        const Vec3 xb = origin + h * Vec3(b[0], b[1], b[2]);
        const Vec3 p = xa + t * (xb - xa);
        auto [it, inserted] = edge_vertex.try_emplace(key, static_cast<int>(positions.size()));
        if (inserted) positions.push_back(torus::wrap(p));
        return std::pair<int, Vec3>{it->second, p};
    };

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const Vec3 origin(-1.0, -1.0, -1.0);
                for (const auto& perm : kPermutations) {
                    std::array<std::array<int, 3>, 4> v;
                    v[0] = {i, j, k};
                    for (int s = 0; s < 3; ++s) {
                        v[s + 1] = v[s];
                        v[s + 1][perm[s]] += 1;
                    }
                    std::array<double, 4> val;
                    int positive = 0;
                    for (int s = 0; s < 4; ++s) {
                        val[s] = phi[idx(v[s][0], v[s][1], v[s][2])];
                        positive += val[s] > 0.0;
                    }
                    if (positive == 0 || positive == 4) continue;

                    // Cut edges as (positive corner, negative corner) pairs, ordered as a polygon.
                    std::vector<std::pair<int, int>> cuts;
                    std::vector<int> pos, neg;
                    for (int s = 0; s < 4; ++s) (val[s] > 0.0 ? pos : neg).push_back(s);
                    if (pos.size() == 1) {
                        for (int q : neg) cuts.emplace_back(pos[0], q);
                    } else if (neg.size() == 1) {
                        for (int q : pos) cuts.emplace_back(q, neg[0]);
                    } else {
                        cuts = {{pos[0], neg[0]}, {pos[0], neg[1]}, {pos[1], neg[1]}, {pos[1], neg[0]}};
                    }
                    std::vector<int> ids;
                    std::vector<Vec3> pts;
                    Vec3 toward_positive = Vec3::Zero();
                    for (auto [p, q] : cuts) {
                        const int lo = p < q ? p : q, hi = p < q ? q : p;  // chain order: lo reaches hi
                        auto [id, x] = vertex_on_edge(v[lo], v[hi], origin);
                        ids.push_back(id);
                        pts.push_back(x);
                        toward_positive += h * (Vec3(v[p][0], v[p][1], v[p][2]) - Vec3(v[q][0], v[q][1], v[q][2]));
                    }
                    auto emit = [&](int a, int b, int c) {
                        const Vec3 nrm = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
                        if (nrm.dot(toward_positive) >= 0.0)
                            faces.push_back({ids[a], ids[b], ids[c]});
                        else
                            faces.push_back({ids[a], ids[c], ids[b]});
                    };
                    emit(0, 1, 2);
                    if (cuts.size() == 4) emit(0, 2, 3);
                }
            }

    try {
        return PeriodicMesh::from_faces(std::move(positions), faces);
    } catch (const Error& e) {
        throw Error(ErrorKind::NonManifoldExtraction, e.what());
    }
}

PeriodicMesh extract_mesh(const LevelSetField& field, const ExtractOptions& options) {
    PeriodicMesh mesh = extract_raw(field, options.grid_n);
    RemeshOptions ro;
    ro.target_edge_length = options.target_edge_length;
    ro.iterations = options.remesh_iterations;
    if (options.project) {
        ro.reproject = [&field](const Vec3& x) {
            Vec3 y = x;
            project_point(field, y);
            return y;
        };
    }
    dynamic_remesh(mesh, ro);
    if (options.project) project_to_levelset(mesh, field);
    return mesh;
}

bool project_point(const LevelSetField& field, Vec3& x, double tol) {
    const double f0 = field.value(x);
    if (std::abs(f0) < tol) return true;
    const Vec3 g = field.gradient(x);
    const double gn = g.norm();
    if (!(gn > 1e-12)) return false;
    const Vec3 dir = (f0 > 0.0 ? -1.0 : 1.0) * g / gn;
    double lo = 0.0, hi = std::abs(f0) / gn;
    bool bracketed = false;
    for (int k = 0; k < 40 && hi < 0.5; ++k) {
        const double f = field.value(x + hi * dir);
        if ((f > 0.0) != (f0 > 0.0) || std::abs(f) < tol) {
            bracketed = true;
            break;
        }
        lo = hi;
        hi *= 1.5;
    }
    if (!bracketed) return false;
    double flo = f0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = field.value(x + mid * dir);
        if (std::abs(fm) < tol) {
            x += mid * dir;
            return true;
        }
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-16) break;
    }
    const double fh = field.value(x + hi * dir);
    if (std::abs(fh) < tol) {
        x += hi * dir;
        return true;
    }
    return false;
}

ProjectionReport project_to_levelset(PeriodicMesh& mesh, const LevelSetField& field, double tol) {
    ProjectionReport report;
    for (int v = 0; v < mesh.vertex_slots(); ++v) {
        if (mesh.vertex_deleted(v)) continue;
        Vec3 x = mesh.position(v);
        const Vec3 before = x;
        if (project_point(field, x, tol)) {
            if (x != before) ++report.moved;
            mesh.set_position(v, x);
        } else {
            ++report.diverged;
        }
        report.max_abs_value = std::max(report.max_abs_value, std::abs(field.value(mesh.position(v))));
    }
    return report;
}

PeriodicMesh flat_plane(int n) {
    if (n < 4) throw Error(ErrorKind::InvalidArgument, "plane needs at least 4 vertices per side");
    std::vector<Vec3> positions;
    const double h = torus::kPeriod / n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) positions.emplace_back(-1.0 + i * h, -1.0 + j * h, 0.0);
    auto id = [n](int i, int j) { return (i % n) * n + (j % n); };
    std::vector<Face> faces;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return PeriodicMesh::from_faces(std::move(positions), faces);
}

// ---------------------------------------------------------------------------

namespace {

struct GraphDerivatives {
    double fx, fy, fxx, fyy, fxy;
};

GraphDerivatives graph_derivatives(PatchKind kind, double x, double y) {
    switch (kind) {
        case PatchKind::Elliptic: return {x / 2, y / 2, 0.5, 0.5, 0.0};
        case PatchKind::Parabolic: return {x / 2, 0.0, 0.5, 0.0, 0.0};
        case PatchKind::Hyperbolic: return {x / 2, -y / 2, 0.5, -0.5, 0.0};
    }
    return {};
}

}  // namespace

double AnalyticPatch::height(double x, double y) const {
    switch (kind) {
        case PatchKind::Elliptic: return (x * x + y * y) / 4.0;
        case PatchKind::Parabolic: return x * x / 4.0;
        case PatchKind::Hyperbolic: return (x * x - y * y) / 4.0;
    }
    return 0.0;
}

Vec3 AnalyticPatch::normal_at(double x, double y) const {
    const GraphDerivatives d = graph_derivatives(kind, x, y);
    return Vec3(-d.fx, -d.fy, 1.0).normalized();
}

Mat3 AnalyticPatch::second_form_at(double x, double y) const {
    const GraphDerivatives d = graph_derivatives(kind, x, y);
    const double w = std::sqrt(1.0 + d.fx * d.fx + d.fy * d.fy);
    Eigen::Matrix<double, 3, 2> j;
    j << 1, 0, 0, 1, d.fx, d.fy;
    Mat2 second;
    second << d.fxx, d.fxy, d.fxy, d.fyy;
    second /= w;
    const Eigen::Matrix<double, 2, 3> pinv = (j.transpose() * j).inverse() * j.transpose();
    return pinv.transpose() * second * pinv;
}

AnalyticPatch analytic_patch(PatchKind kind, int resolution, double half_width) {
    if (resolution < 2) throw Error(ErrorKind::InvalidArgument, "patch resolution must be >= 2");
    AnalyticPatch patch{kind, {}, {}};
    patch.mesh.periodic = false;
    const int n = resolution;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            const double x = -half_width + 2.0 * half_width * i / n;
            const double y = -half_width + 2.0 * half_width * j / n;
            patch.mesh.vertices.push_back(patch.point(x, y));
            patch.normals.push_back(patch.normal_at(x, y));
        }
    auto id = [n](int i, int j) { return i * (n + 1) + j; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            patch.mesh.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            patch.mesh.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return patch;
}

}  // namespace ads
