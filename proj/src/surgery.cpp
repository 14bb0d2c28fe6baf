#include "ads/surgery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include <Eigen/SparseCholesky>

#include "ads/geometry.hpp"

namespace ads {

std::vector<Face> fill_polygon(std::span<const Vec3> polygon, const std::function<bool(int, int)>& forbidden) {
    const int n = static_cast<int>(polygon.size());
    if (n < 3 || n > 1500) return {};
    const double inf = std::numeric_limits<double>::infinity();
    auto allowed = [&](int i, int j) {
        if (j - i == 1 || (i == 0 && j == n - 1)) return true;
        return !forbidden || !forbidden(i, j);
    };
    std::vector<double> cost(static_cast<size_t>(n) * n, inf);
    std::vector<int> split(static_cast<size_t>(n) * n, -1);
    auto at = [n](int i, int j) { return static_cast<size_t>(i) * n + j; };
    for (int i = 0; i + 1 < n; ++i) cost[at(i, i + 1)] = 0.0;
    for (int len = 2; len < n; ++len) {
        for (int i = 0; i + len < n; ++i) {
            const int j = i + len;
            if (!allowed(i, j)) continue;
            double best = inf;
            int arg = -1;
            for (int k = i + 1; k < j; ++k) {
                const double c = cost[at(i, k)] + cost[at(k, j)];
                if (!(c < best)) continue;
                const double area = 0.5 * (polygon[k] - polygon[i]).cross(polygon[j] - polygon[i]).norm();
                if (c + area < best) {
                    best = c + area;
                    arg = k;
                }
            }
            cost[at(i, j)] = best;
            split[at(i, j)] = arg;
        }
    }
    if (!std::isfinite(cost[at(0, n - 1)])) return {};
    std::vector<Face> out;
    std::vector<std::pair<int, int>> stack{{0, n - 1}};
    while (!stack.empty()) {
        const auto [i, j] = stack.back();
        stack.pop_back();
        if (j - i < 2) continue;
        const int k = split[at(i, j)];
        out.push_back({k, i, j});
        stack.emplace_back(i, k);
        stack.emplace_back(k, j);
    }
    return out;
}

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey undirected(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

class Surgeon {
public:
    Surgeon(const PeriodicMesh& mesh, const SurgeryOptions& opt) : opt_(opt) {
        const TriMesh t = mesh.tri_mesh();
        positions_ = t.vertices;
        faces_ = t.faces;
        alive_.assign(faces_.size(), 1);
        const SurfaceGeometry geom = compute_geometry(t);
        curvature_ = vertex_max_curvature(t, geom);
        double total = 0.0;
        for (int e = 0; e < mesh.edge_slots(); ++e) total += mesh.edge_length(e);
        mean_edge_ = total / std::max(1, mesh.num_edges());
    }

    SurgeryReport run(PeriodicMesh& mesh) {
        for (const std::vector<int>& region : marked_regions()) {
            if (try_remove(region))
                ++report_.regions_removed;
            else
                ++report_.fill_failed;
        }
        if (report_.regions_removed == 0) return report_;
        mesh = rebuild();
        refine_fill(mesh);
        fair(mesh);
        return report_;
    }

private:
    std::vector<std::vector<int>> marked_regions() const {
        const int nf = static_cast<int>(faces_.size());
        std::vector<char> marked(nf, 0);
        for (int f = 0; f < nf; ++f) {
            bool all = true;
            for (int v : faces_[f]) all = all && curvature_[v] > opt_.curvature_threshold;
            marked[f] = all;
        }
        std::map<EdgeKey, std::vector<int>> edge_faces;
        for (int f = 0; f < nf; ++f)
            if (marked[f])
                for (int c = 0; c < 3; ++c) edge_faces[undirected(faces_[f][c], faces_[f][(c + 1) % 3])].push_back(f);
        std::vector<int> parent(nf);
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> root = [&](int x) { return parent[x] == x ? x : parent[x] = root(parent[x]); };
        for (const auto& [key, fs] : edge_faces)
            for (size_t i = 1; i < fs.size(); ++i) parent[root(fs[i])] = root(fs[0]);
        std::map<int, std::vector<int>> groups;
        for (int f = 0; f < nf; ++f)
            if (marked[f]) groups[root(f)].push_back(f);
        std::vector<std::vector<int>> out;
        for (auto& [r, fs] : groups) out.push_back(std::move(fs));
        return out;
    }

    bool spans_half_period(const std::vector<int>& region) const {
        std::map<int, Vec3> unfolded;
        std::map<int, std::vector<int>> adj;
        for (int f : region)
            for (int c = 0; c < 3; ++c) adj[faces_[f][c]].push_back(faces_[f][(c + 1) % 3]);
        const int start = faces_[region.front()][0];
        unfolded[start] = positions_[start];
        std::vector<int> queue{start};
        Vec3 lo = positions_[start], hi = lo;
        while (!queue.empty()) {
            const int v = queue.back();
            queue.pop_back();
            for (int w : adj[v]) {
                if (unfolded.count(w)) continue;
                unfolded[w] = torus::unfold(positions_[w], unfolded[v]);
                lo = lo.cwiseMin(unfolded[w]);
                hi = hi.cwiseMax(unfolded[w]);
                queue.push_back(w);
            }
        }
        return (hi - lo).maxCoeff() > torus::kHalf;
    }

    bool try_remove(const std::vector<int>& region) {
        std::vector<char> removed(faces_.size(), 0);
        for (int f : region) removed[f] = 1;
        std::set<std::pair<int, int>> directed;
        std::set<EdgeKey> existing;
        for (size_t f = 0; f < faces_.size(); ++f) {
            if (!alive_[f] || removed[f]) continue;
            for (int c = 0; c < 3; ++c) {
                const int a = faces_[f][c], b = faces_[f][(c + 1) % 3];
                directed.emplace(a, b);
                existing.insert(undirected(a, b));
            }
        }
        std::map<int, int> next;
        for (int f : region)
            for (int c = 0; c < 3; ++c) {
                // Boundary edges of the remaining surface run opposite to the removed face.
                const int a = faces_[f][(c + 1) % 3], b = faces_[f][c];
                if (!directed.count({a, b})) continue;
                if (next.count(a)) return false;
                next[a] = b;
            }
        if (next.empty()) return false;

        std::vector<Face> fill;
        std::set<int> visited;
        int holes = 0;
        for (const auto& [first, unused] : next) {
            if (visited.count(first)) continue;
            std::vector<int> loop;
            int v = first;
            while (!visited.count(v)) {
                visited.insert(v);
                loop.push_back(v);
                const auto it = next.find(v);
                if (it == next.end()) return false;
                v = it->second;
            }
            if (v != first) return false;
            std::vector<Vec3> poly{positions_[loop[0]]};
            for (size_t i = 1; i <= loop.size(); ++i)
                poly.push_back(torus::unfold(positions_[loop[i % loop.size()]], poly.back()));
            if ((poly.back() - poly.front()).norm() > 1e-9) return false;  // wraps around the torus
            poly.pop_back();
            auto forbidden = [&](int i, int j) { return existing.count(undirected(loop[i], loop[j])) > 0; };
            const std::vector<Face> tris = fill_polygon(poly, forbidden);
            if (tris.empty()) return false;
            for (const Face& t : tris) fill.push_back({loop[t[0]], loop[t[1]], loop[t[2]]});
            ++holes;
        }
        if (spans_half_period(region)) ++report_.wide_regions;
        report_.holes_filled += holes;
        for (const auto& [v, unused] : next) boundary_.insert(v);
        for (int f : region) alive_[f] = 0;
        for (const Face& t : fill) {
            faces_.push_back(t);
            alive_.push_back(1);
        }
        return true;
    }

    PeriodicMesh rebuild() {
        std::vector<int> remap(positions_.size(), -1);
        std::vector<Vec3> pos;
        std::vector<Face> faces;
        for (size_t f = 0; f < faces_.size(); ++f) {
            if (!alive_[f]) continue;
            Face t;
            for (int c = 0; c < 3; ++c) {
                int& r = remap[faces_[f][c]];
                if (r < 0) {
                    r = static_cast<int>(pos.size());
                    pos.push_back(positions_[faces_[f][c]]);
                }
                t[c] = r;
            }
            faces.push_back(t);
        }
        std::set<int> mapped;
        for (int v : boundary_)
            if (remap[v] >= 0) mapped.insert(remap[v]);
        fill_vertices_.assign(mapped.begin(), mapped.end());
        return PeriodicMesh::from_faces(std::move(pos), faces);
    }

    // Splits long edges inside the fill and restores the Delaunay property there.
    void refine_fill(PeriodicMesh& mesh) {
        std::vector<char> in_fill(mesh.vertex_slots(), 0);
        for (int v : fill_vertices_) in_fill[v] = 1;
        const double target = opt_.fill_edge_length > 0.0 ? opt_.fill_edge_length : mean_edge_;
        const double limit = std::min(4.0 / 3.0 * target, 0.29);
        for (int pass = 0; pass < 30; ++pass) {
            bool any = false;
            const int ne = mesh.edge_slots();
            for (int e = 0; e < ne; ++e) {
                const int h = 2 * e;
                if (!in_fill[mesh.from(h)] || !in_fill[mesh.to(h)] || mesh.edge_length(e) <= limit) continue;
                const int v = mesh.split_edge(h, mesh.position(mesh.from(h)) + 0.5 * mesh.edge_vector(h));
                in_fill.push_back(1);
                in_fill[v] = 1;
                fill_vertices_.push_back(v);
                any = true;
            }
            if (!any) break;
        }
        for (int pass = 0; pass < 50; ++pass) {
            bool any = false;
            for (int e = 0; e < mesh.edge_slots(); ++e) {
                const int h = 2 * e, o = h + 1;
                if (!in_fill[mesh.from(h)] || !in_fill[mesh.to(h)]) continue;
                const Vec3 a = mesh.position(mesh.from(h));
                const Vec3 b = a + mesh.edge_vector(h);
                const Vec3 c = b + mesh.edge_vector(mesh.next(h));
                const Vec3 d = a + mesh.edge_vector(mesh.next(o));
                auto angle = [](const Vec3& at, const Vec3& p, const Vec3& q) {
                    const Vec3 u = p - at, w = q - at;
                    return std::atan2(u.cross(w).norm(), u.dot(w));
                };
                if (angle(c, a, b) + angle(d, b, a) <= M_PI + 1e-9 || !mesh.is_flip_ok(e)) continue;
                const Vec3 n_old = (b - a).cross(c - a) + (a - b).cross(d - b);
                if ((a - c).cross(d - c).dot(n_old) <= 0.0 || (b - d).cross(c - d).dot(n_old) <= 0.0) continue;
                mesh.flip(e);
                any = true;
            }
            if (!any) break;
        }
    }

    void fair(PeriodicMesh& mesh) {
        mesh.garbage_collection();
        const int nv = mesh.num_vertices();
        std::vector<int> ring(nv, -1);
        std::vector<int> frontier;
        for (int v : fill_vertices_) {
            ring[v] = 0;
            frontier.push_back(v);
        }
        for (int k = 1; k <= opt_.fairing_ring; ++k) {
            std::vector<int> grown;
            for (int v : frontier)
                mesh.for_each_outgoing(v, [&](int h) {
                    const int w = mesh.to(h);
                    if (ring[w] < 0) {
                        ring[w] = k;
                        grown.push_back(w);
                    }
                });
            frontier = std::move(grown);
        }
        std::vector<int> free_index(nv, -1);
        int nfree = 0;
        for (int v = 0; v < nv; ++v)
            if (ring[v] >= 0) free_index[v] = nfree++;
        if (nfree == 0 || nfree == nv) return;

        const TriMesh t = mesh.tri_mesh();
        const SparseMatrix lap = cotan_laplacian(t);
        Eigen::VectorXd mass = lumped_mass(t);
        const double floor = 1e-6 * mass.mean();
        mass = mass.cwiseMax(floor);
        SparseMatrix inv_mass(nv, nv);
        std::vector<Eigen::Triplet<double>> diag;
        for (int v = 0; v < nv; ++v) diag.emplace_back(v, v, 1.0 / mass[v]);
        inv_mass.setFromTriplets(diag.begin(), diag.end());
        const SparseMatrix bilap = lap * inv_mass * lap;

        // L x computed on unfolded differences, then the second Laplacian on plain vectors.
        Eigen::MatrixXd lx = Eigen::MatrixXd::Zero(nv, 3);
        for (int k = 0; k < lap.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(lap, k); it; ++it) {
                if (it.row() == it.col()) continue;
                lx.row(it.row()) += it.value() * torus::min_image(t.vertices[it.col()] - t.vertices[it.row()]).transpose();
            }
        const Eigen::MatrixXd rhs_full = -(lap * (inv_mass * lx));

        std::vector<Eigen::Triplet<double>> trip;
        for (int k = 0; k < bilap.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(bilap, k); it; ++it) {
                const int r = free_index[it.row()], c = free_index[it.col()];
                if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
            }
        SparseMatrix a(nfree, nfree);
        a.setFromTriplets(trip.begin(), trip.end());
        Eigen::MatrixXd rhs(nfree, 3);
        for (int v = 0; v < nv; ++v)
            if (free_index[v] >= 0) rhs.row(free_index[v]) = rhs_full.row(v);
        Eigen::SimplicialLDLT<SparseMatrix> solver(a);
        if (solver.info() != Eigen::Success) {
            ++report_.fairing_reverted;
            return;
        }
        const Eigen::MatrixXd delta = solver.solve(rhs);
        if (!delta.allFinite()) {
            ++report_.fairing_reverted;
            return;
        }

        std::vector<Vec3> before(nv);
        std::vector<Vec3> old_normals(mesh.num_faces());
        for (int f = 0; f < mesh.num_faces(); ++f) {
            const auto x = mesh.face_corners(f);
            old_normals[f] = (x[1] - x[0]).cross(x[2] - x[0]);
        }
        for (int v = 0; v < nv; ++v) {
            before[v] = mesh.position(v);
            if (free_index[v] >= 0) mesh.set_position(v, before[v] + delta.row(free_index[v]).transpose());
        }
        bool folded = mesh.max_edge_length() >= 0.3;
        for (int f = 0; f < mesh.num_faces() && !folded; ++f) {
            const auto x = mesh.face_corners(f);
            folded = (x[1] - x[0]).cross(x[2] - x[0]).dot(old_normals[f]) <= 0.0;
        }
        if (folded) {
            for (int v = 0; v < nv; ++v) mesh.set_position(v, before[v]);
            ++report_.fairing_reverted;
        }
    }

    const SurgeryOptions& opt_;
    std::vector<Vec3> positions_;
    std::vector<Face> faces_;
    std::vector<char> alive_;
    std::vector<double> curvature_;
    std::set<int> boundary_;
    std::vector<int> fill_vertices_;
    double mean_edge_ = 0.0;
    SurgeryReport report_;
};

}  // namespace

SurgeryReport numerical_surgery(PeriodicMesh& mesh, const SurgeryOptions& options) {
    if (!(options.curvature_threshold > 0.0) || options.fairing_ring < 0)
        throw Error(ErrorKind::InvalidArgument, "surgery needs a positive threshold and a non-negative ring");
    if (std::isinf(options.curvature_threshold)) return {};
    Surgeon s(mesh, options);
    return s.run(mesh);
}

}  // namespace ads
