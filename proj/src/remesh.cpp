#include "ads/remesh.hpp"

#include <cmath>
#include <vector>

namespace ads {

Vec3 face_area_vector(const PeriodicMesh& mesh, int f) {
    const auto x = mesh.face_corners(f);
    return (x[1] - x[0]).cross(x[2] - x[0]);
}

Vec3 vertex_normal(const PeriodicMesh& mesh, int v) {
    const Vec3& p = mesh.position(v);
    Vec3 n = Vec3::Zero();
    mesh.for_each_outgoing(v, [&](int h) {
        const Vec3 a = p + mesh.edge_vector(h);
        const int g = mesh.next(h);
        const Vec3 c = a + mesh.edge_vector(g);
        const Vec3 u = a - p, w = c - p;
        const Vec3 cross = u.cross(w);
        const double len = cross.norm();
        if (len > 0.0) n += std::atan2(len, u.dot(w)) * cross / len;
    });
    const double len = n.norm();
    return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

namespace {

struct Remesher {
    PeriodicMesh& mesh;
    const RemeshOptions& opt;
    RemeshStats stats;
    double high, low;

    static constexpr double kMinNormalDot = 0.5;
    static constexpr double kMinReferenceDot = 0.2;

    // Normal of the triangle (p, q, r) given in any consistent unfolding.
    static Vec3 tri_normal(const Vec3& p, const Vec3& q, const Vec3& r) {
        return (q - p).cross(r - p);
    }

    void split_long_edges() {
        for (int pass = 0; pass < 20; ++pass) {
            bool any = false;
            const int n = mesh.edge_slots();
            for (int e = 0; e < n; ++e) {
                if (mesh.edge_deleted(e)) continue;
                if (mesh.edge_length(e) <= high) continue;
                const int h = 2 * e;
                const Vec3 mid = mesh.position(mesh.from(h)) + 0.5 * mesh.edge_vector(h);
                mesh.split_edge(h, mid);
                ++stats.splits;
                any = true;
            }
            if (!any) break;
        }
    }

    // Geometric validity of moving the endpoints of h into p.
    bool collapse_geometry_ok(int h, const Vec3& p) const {
        const int a = mesh.from(h), b = mesh.to(h);
        const int f0 = mesh.face_of(h), f1 = mesh.face_of(h ^ 1);
        Vec3 reference = Vec3::Zero();
        for (int v : {a, b})
            mesh.for_each_outgoing(v, [&](int g) { reference += face_area_vector(mesh, mesh.face_of(g)).stableNormalized(); });
        reference.stableNormalize();
        bool ok = true;
        auto check_star = [&](int v) {
            mesh.for_each_outgoing(v, [&](int g) {
                if (!ok) return;
                const int f = mesh.face_of(g);
                if (f == f0 || f == f1) return;
                const Vec3 q = p + torus::min_image(mesh.position(mesh.to(g)) - p);
                const Vec3 r = q + mesh.edge_vector(mesh.next(g));
                if ((q - p).norm() >= high || (r - p).norm() >= high) {
                    ok = false;
                    return;
                }
                const Vec3 old_n = face_area_vector(mesh, f);
                const Vec3 new_n = tri_normal(p, q, r);
                const double on = old_n.norm(), nn = new_n.norm();
                if (nn <= 1e-14 || new_n.dot(reference) < kMinReferenceDot * nn) {
                    ok = false;
                } else if (on > 1e-14 && old_n.dot(new_n) < kMinNormalDot * on * nn) {
                    ok = false;
                }
            });
        };
        check_star(a);
        if (ok) check_star(b);
        return ok;
    }

    void collapse_short_edges() {
        for (int pass = 0; pass < 5; ++pass) {
            bool any = false;
            for (int e = 0; e < mesh.edge_slots(); ++e) {
                if (mesh.edge_deleted(e)) continue;
                if (mesh.edge_length(e) >= low) continue;
                bool done = false;
                for (int h : {2 * e, 2 * e + 1}) {
                    if (!mesh.is_collapse_ok(h)) continue;
                    const Vec3 mid = mesh.position(mesh.from(h)) + 0.5 * mesh.edge_vector(h);
                    if (!collapse_geometry_ok(h, mid)) continue;
                    mesh.collapse(h, mid);
                    ++stats.collapses;
                    done = any = true;
                    break;
                }
                if (!done) ++stats.skipped;
            }
            if (!any) break;
        }
    }

    bool flip_geometry_ok(int e) const {
        const int h = 2 * e, o = h + 1;
        const Vec3 a = mesh.position(mesh.from(h));
        const Vec3 b = a + mesh.edge_vector(h);
        const Vec3 c = b + mesh.edge_vector(mesh.next(h));
        const Vec3 d = a + mesh.edge_vector(mesh.next(o));
        const Vec3 n_old = face_area_vector(mesh, mesh.face_of(h)).stableNormalized() +
                           face_area_vector(mesh, mesh.face_of(o)).stableNormalized();
        const Vec3 n0 = tri_normal(c, a, d), n1 = tri_normal(d, b, c);
        const double on = n_old.norm();
        for (const Vec3& n : {n0, n1}) {
            const double len = n.norm();
            if (len <= 1e-14 || n.dot(n_old) < kMinNormalDot * len * on) return false;
        }
        return (c - d).norm() < high;
    }

    void flip_edges() {
        for (int e = 0; e < mesh.edge_slots(); ++e) {
            if (mesh.edge_deleted(e)) continue;
            const int h = 2 * e, o = h + 1;
            const int a = mesh.from(h), b = mesh.to(h);
            const int c = mesh.to(mesh.next(h)), d = mesh.to(mesh.next(o));
            const int va = mesh.valence(a), vb = mesh.valence(b), vc = mesh.valence(c),
                      vd = mesh.valence(d);
            auto dev = [](int v) { return (v - 6) * (v - 6); };
            const int before = dev(va) + dev(vb) + dev(vc) + dev(vd);
            const int after = dev(va - 1) + dev(vb - 1) + dev(vc + 1) + dev(vd + 1);
            if (after >= before) continue;
            if (!mesh.is_flip_ok(e) || !flip_geometry_ok(e)) {
                ++stats.skipped;
                continue;
            }
            mesh.flip(e);
            ++stats.flips;
        }
    }

    void smooth() {
        const int n = mesh.vertex_slots();
        std::vector<Vec3> updated(n);
        for (int v = 0; v < n; ++v) {
            if (mesh.vertex_deleted(v)) continue;
            const Vec3& x = mesh.position(v);
            Vec3 centroid = Vec3::Zero();
            int count = 0;
            mesh.for_each_outgoing(v, [&](int h) {
                centroid += x + mesh.edge_vector(h);
                ++count;
            });
            centroid /= count;
            const Vec3 nrm = vertex_normal(mesh, v);
            Vec3 delta = centroid - x;
            delta -= nrm * nrm.dot(delta);
            updated[v] = x + opt.smoothing_weight * delta;
            if (opt.reproject) updated[v] = opt.reproject(updated[v]);
        }
        for (int v = 0; v < n; ++v)
            if (!mesh.vertex_deleted(v)) {
                if (!smoothing_folds(v, updated[v])) mesh.set_position(v, updated[v]);
            }
    }

    // Rejects a move that would flip an incident face.
    bool smoothing_folds(int v, const Vec3& p) const {
        const Vec3 reference = vertex_normal(mesh, v);
        bool folds = false;
        mesh.for_each_outgoing(v, [&](int h) {
            const int f = mesh.face_of(h);
            const Vec3 q = p + torus::min_image(mesh.position(mesh.to(h)) - p);
            const Vec3 r = q + mesh.edge_vector(mesh.next(h));
            const Vec3 n_new = tri_normal(p, q, r), n_old = face_area_vector(mesh, f);
            if (n_new.dot(n_old) <= 0.1 * n_new.norm() * n_old.norm()) folds = true;
            if (n_new.dot(reference) <= 0.1 * n_new.norm()) folds = true;
        });
        return folds;
    }
};

}  // namespace

RemeshStats dynamic_remesh(PeriodicMesh& mesh, const RemeshOptions& options) {
    if (!(options.target_edge_length > 0.0) || options.target_edge_length >= 0.3)
        throw Error(ErrorKind::InvalidArgument, "target edge length must lie in (0, 0.3)");
    Remesher r{mesh, options, {}, 0.0, 0.0};
    r.high = std::min(options.split_ratio * options.target_edge_length, options.max_edge_length);
    r.low = options.collapse_ratio * options.target_edge_length;
    for (int it = 0; it < options.iterations; ++it) {
        r.split_long_edges();
        r.collapse_short_edges();
        mesh.garbage_collection();
        r.flip_edges();
        r.smooth();
    }
    // Smoothing can stretch edges slightly; restore the split bound.
    r.split_long_edges();
    mesh.garbage_collection();
    return r.stats;
}

}  // namespace ads
