#include "ads/periodic_mesh.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace ads {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::UnmatchedBoundaryVertex: return "UnmatchedBoundaryVertex";
        case ErrorKind::NonManifoldAfterMerge: return "NonManifoldAfterMerge";
        case ErrorKind::NonManifold: return "NonManifold";
        case ErrorKind::OpenMesh: return "OpenMesh";
        case ErrorKind::RemeshDegenerate: return "RemeshDegenerate";
        case ErrorKind::FillFailed: return "FillFailed";
        case ErrorKind::ZeroNormal: return "ZeroNormal";
        case ErrorKind::SingularEdgeSystem: return "SingularEdgeSystem";
        case ErrorKind::DegenerateFace: return "DegenerateFace";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::SingularTensor: return "SingularTensor";
        case ErrorKind::EmptyLevelSet: return "EmptyLevelSet";
        case ErrorKind::NonManifoldExtraction: return "NonManifoldExtraction";
        case ErrorKind::ProjectionDiverged: return "ProjectionDiverged";
        case ErrorKind::Io: return "Io";
        case ErrorKind::Config: return "Config";
    }
    return "Unknown";
}

std::array<Vec3, 3> TriMesh::corners(int f) const {
    const Face& t = faces[f];
    const Vec3& a = vertices[t[0]];
    return {a, relative(vertices[t[1]], a), relative(vertices[t[2]], a)};
}

namespace {

// Directed edge u->v where v is taken at the image offset `shift` (in periods).
struct EdgeKey {
    int lo, hi, shift;
    bool operator==(const EdgeKey&) const = default;
};

struct EdgeKeyHash {
    size_t operator()(const EdgeKey& k) const {
        size_t h = static_cast<size_t>(k.lo) * 0x9E3779B97F4A7C15ull;
        h ^= static_cast<size_t>(k.hi) + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
        h ^= static_cast<size_t>(k.shift) * 0x94D049BB133111EBull;
        return h;
    }
};

int shift_code(const Vec3& pu, const Vec3& pv, int sign) {
    int code = 0;
    for (int i = 0; i < 3; ++i) {
        const int k = -static_cast<int>(std::round((pv[i] - pu[i]) / torus::kPeriod)) * sign;
        code = code * 3 + (k + 1);
    }
    return code;
}

}  // namespace

PeriodicMesh PeriodicMesh::from_faces(std::vector<Vec3> positions, const std::vector<Face>& faces) {
    // Drop unreferenced vertices.
    std::vector<int> remap(positions.size(), -1);
    int nv = 0;
    for (const Face& f : faces) {
        for (int c : f) {
            if (c < 0 || c >= static_cast<int>(positions.size()))
                throw Error(ErrorKind::InvalidArgument, "face references missing vertex");
        }
        if (f[0] == f[1] || f[1] == f[2] || f[2] == f[0])
            throw Error(ErrorKind::NonManifold, "face with repeated vertex");
    }
    for (const Face& f : faces)
        for (int c : f)
            if (remap[c] < 0) remap[c] = nv++;

    PeriodicMesh m;
    m.pos_.resize(nv);
    for (size_t i = 0; i < positions.size(); ++i)
        if (remap[i] >= 0) m.pos_[remap[i]] = torus::wrap(positions[i]);
    m.vhe_.assign(nv, -1);
    m.vdel_.assign(nv, 0);

    const int nf = static_cast<int>(faces.size());
    m.fhe_.resize(nf);
    m.fdel_.assign(nf, 0);

    std::unordered_map<EdgeKey, int, EdgeKeyHash> edges;
    edges.reserve(faces.size() * 2);
    std::vector<char> used;  // per half-edge

    for (int f = 0; f < nf; ++f) {
        std::array<int, 3> hs{};
        for (int c = 0; c < 3; ++c) {
            const int u = remap[faces[f][c]];
            const int v = remap[faces[f][(c + 1) % 3]];
            EdgeKey key;
            int dir;
            if (u < v) {
                key = {u, v, shift_code(m.pos_[u], m.pos_[v], 1)};
                dir = 0;
            } else {
                key = {v, u, shift_code(m.pos_[v], m.pos_[u], 1)};
                dir = 1;
            }
            auto [it, inserted] = edges.try_emplace(key, static_cast<int>(m.to_.size() / 2));
            if (inserted) {
                m.to_.push_back(-1);
                m.to_.push_back(-1);
                m.next_.push_back(-1);
                m.next_.push_back(-1);
                m.hface_.push_back(-1);
                m.hface_.push_back(-1);
                used.push_back(0);
                used.push_back(0);
            }
            const int h = 2 * it->second + dir;
            if (used[h]) throw Error(ErrorKind::NonManifold, "directed edge used twice");
            used[h] = 1;
            m.to_[h] = v;
            m.hface_[h] = f;
            hs[c] = h;
        }
        for (int c = 0; c < 3; ++c) {
            m.next_[hs[c]] = hs[(c + 1) % 3];
            m.vhe_[remap[faces[f][c]]] = hs[c];
        }
        m.fhe_[f] = hs[0];
    }
    for (size_t h = 0; h < used.size(); ++h)
        if (!used[h]) throw Error(ErrorKind::OpenMesh, "mesh has boundary edges");

    const int ne = static_cast<int>(m.to_.size() / 2);
    m.edel_.assign(ne, 0);
    m.n_vertices_ = nv;
    m.n_edges_ = ne;
    m.n_faces_ = nf;

    // Vertex manifoldness: the fan from vhe must see every incident face.
    std::vector<int> incident(nv, 0);
    for (const Face& f : faces)
        for (int c : f) ++incident[remap[c]];
    for (int v = 0; v < nv; ++v) {
        int count = 0;
        m.for_each_outgoing(v, [&](int) { ++count; });
        if (count != incident[v]) throw Error(ErrorKind::NonManifold, "non-manifold vertex");
    }
    return m;
}

std::array<int, 3> PeriodicMesh::face_vertices(int f) const {
    const int h = fhe_[f];
    return {from(h), to(h), to(next(h))};
}

std::array<Vec3, 3> PeriodicMesh::face_corners(int f) const {
    const auto v = face_vertices(f);
    const Vec3& a = pos_[v[0]];
    return {a, torus::unfold(pos_[v[1]], a), torus::unfold(pos_[v[2]], a)};
}

int PeriodicMesh::valence(int v) const {
    int n = 0;
    for_each_outgoing(v, [&](int) { ++n; });
    return n;
}

double PeriodicMesh::max_edge_length() const {
    double m = 0.0;
    for (int e = 0; e < edge_slots(); ++e)
        if (!edel_[e]) m = std::max(m, edge_length(e));
    return m;
}

int PeriodicMesh::num_components() const {
    std::vector<int> label(pos_.size(), -1);
    int comps = 0;
    std::vector<int> stack;
    for (int s = 0; s < vertex_slots(); ++s) {
        if (vdel_[s] || label[s] >= 0) continue;
        label[s] = comps;
        stack.push_back(s);
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for_each_outgoing(v, [&](int h) {
                const int w = to(h);
                if (label[w] < 0) {
                    label[w] = comps;
                    stack.push_back(w);
                }
            });
        }
        ++comps;
    }
    return comps;
}

int PeriodicMesh::genus() const { return (2 * num_components() - euler_characteristic()) / 2; }

std::vector<Face> PeriodicMesh::faces() const {
    std::vector<Face> out;
    out.reserve(n_faces_);
    for (int f = 0; f < face_slots(); ++f)
        if (!fdel_[f]) {
            const auto v = face_vertices(f);
            out.push_back({v[0], v[1], v[2]});
        }
    return out;
}

TriMesh PeriodicMesh::tri_mesh() const {
    if (garbage_) throw Error(ErrorKind::InvalidArgument, "tri_mesh() requires garbage_collection()");
    TriMesh t;
    t.vertices = pos_;
    t.faces = faces();
    t.periodic = true;
    return t;
}

int PeriodicMesh::new_vertex(const Vec3& p) {
    pos_.push_back(torus::wrap(p));
    vhe_.push_back(-1);
    vdel_.push_back(0);
    ++n_vertices_;
    return static_cast<int>(pos_.size()) - 1;
}

int PeriodicMesh::new_edge(int from, int to) {
    const int h = static_cast<int>(to_.size());
    to_.push_back(to);
    to_.push_back(from);
    next_.push_back(-1);
    next_.push_back(-1);
    hface_.push_back(-1);
    hface_.push_back(-1);
    edel_.push_back(0);
    ++n_edges_;
    return h;
}

int PeriodicMesh::new_face(int h) {
    fhe_.push_back(h);
    fdel_.push_back(0);
    ++n_faces_;
    return static_cast<int>(fhe_.size()) - 1;
}

int PeriodicMesh::split_edge(int h, const Vec3& p) {
    const int o = opp(h);
    const int a = from(h), b = to(h);
    const int h1 = next(h), h2 = next(h1);
    const int o1 = next(o), o2 = next(o1);
    const int c = to(h1), d = to(o1);
    const int f0 = hface_[h], f1 = hface_[o];
    (void)a;

    const int m = new_vertex(p);
    const int hn = new_edge(m, b);  // m->b, hn^1: b->m
    const int t = new_edge(m, c);   // m->c, t^1: c->m
    const int s = new_edge(m, d);   // m->d, s^1: d->m
    const int f2 = new_face(hn);
    const int f3 = new_face(s);

    to_[h] = m;
    // f0: a -> m -> c
    next_[h] = t;
    next_[t] = h2;
    next_[h2] = h;
    hface_[t] = f0;
    fhe_[f0] = h;
    // f2: m -> b -> c
    next_[hn] = h1;
    next_[h1] = t ^ 1;
    next_[t ^ 1] = hn;
    hface_[hn] = hface_[h1] = hface_[t ^ 1] = f2;
    // f1: m -> a -> d
    next_[o] = o1;
    next_[o1] = s ^ 1;
    next_[s ^ 1] = o;
    hface_[s ^ 1] = f1;
    fhe_[f1] = o;
    // f3: b -> m -> d
    next_[hn ^ 1] = s;
    next_[s] = o2;
    next_[o2] = hn ^ 1;
    hface_[hn ^ 1] = hface_[s] = hface_[o2] = f3;

    vhe_[m] = hn;
    if (vhe_[b] == o) vhe_[b] = h1;
    return m;
}

bool PeriodicMesh::is_collapse_ok(int h) const {
    const int o = opp(h);
    const int a = from(h), b = to(h);
    const int c = to(next(h)), d = to(next(o));
    if (c == d || a == b) return false;
    if (valence(c) <= 3 || valence(d) <= 3) return false;

    std::vector<int> na, nb;
    for_each_outgoing(a, [&](int g) { na.push_back(to(g)); });
    for_each_outgoing(b, [&](int g) { nb.push_back(to(g)); });
    if (std::count(na.begin(), na.end(), b) != 1) return false;
    std::sort(na.begin(), na.end());
    std::sort(nb.begin(), nb.end());
    if (std::adjacent_find(na.begin(), na.end()) != na.end()) return false;
    if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) return false;
    std::vector<int> common;
    std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(), std::back_inserter(common));
    if (common.size() != 2) return false;
    return (common[0] == c && common[1] == d) || (common[0] == d && common[1] == c);
}

void PeriodicMesh::collapse(int h, const Vec3& p) {
    const int o = opp(h);
    const int a = from(h), b = to(h);
    const int h1 = next(h), h2 = next(h1);
    const int o1 = next(o), o2 = next(o1);
    const int c = to(h1), d = to(o1);
    const int f0 = hface_[h], f1 = hface_[o];
    const int x = opp(h2);  // a -> c
    const int y = opp(o1);  // d -> a

    std::vector<int> incoming;
    for_each_outgoing(a, [&](int g) { incoming.push_back(opp(g)); });
    for (int g : incoming) to_[g] = b;

    {
        const int xf = hface_[x], xn = next_[x], xp = next_[xn];
        next_[h1] = xn;
        next_[xp] = h1;
        hface_[h1] = xf;
        if (fhe_[xf] == x) fhe_[xf] = h1;
    }
    {
        const int yf = hface_[y], yn = next_[y], yp = next_[yn];
        next_[o2] = yn;
        next_[yp] = o2;
        hface_[o2] = yf;
        if (fhe_[yf] == y) fhe_[yf] = o2;
    }

    vdel_[a] = 1;
    edel_[edge_of(h)] = edel_[edge_of(h2)] = edel_[edge_of(o1)] = 1;
    fdel_[f0] = fdel_[f1] = 1;
    n_vertices_ -= 1;
    n_edges_ -= 3;
    n_faces_ -= 2;
    garbage_ = true;

    vhe_[b] = h1;
    vhe_[c] = opp(h1);
    vhe_[d] = o2;
    pos_[b] = torus::wrap(p);
}

bool PeriodicMesh::is_flip_ok(int e) const {
    const int h = 2 * e, o = h + 1;
    const int a = from(h), b = to(h);
    const int c = to(next(h)), d = to(next(o));
    if (c == d) return false;
    if (valence(a) <= 3 || valence(b) <= 3) return false;
    bool adjacent = false;
    for_each_outgoing(c, [&](int g) { adjacent = adjacent || to(g) == d; });
    return !adjacent;
}

void PeriodicMesh::flip(int e) {
    const int h = 2 * e, o = h + 1;
    const int a = from(h), b = to(h);
    const int h1 = next(h), h2 = next(h1);
    const int o1 = next(o), o2 = next(o1);
    const int c = to(h1), d = to(o1);
    const int f0 = hface_[h], f1 = hface_[o];

    to_[h] = c;
    to_[o] = d;
    // f0: c -> a -> d -> c
    next_[h2] = o1;
    next_[o1] = h;
    next_[h] = h2;
    hface_[h2] = hface_[o1] = hface_[h] = f0;
    fhe_[f0] = h;
    // f1: d -> b -> c -> d
    next_[o2] = h1;
    next_[h1] = o;
    next_[o] = o2;
    hface_[o2] = hface_[h1] = hface_[o] = f1;
    fhe_[f1] = o;

    if (vhe_[a] == h) vhe_[a] = o1;
    if (vhe_[b] == o) vhe_[b] = h1;
}

std::vector<int> PeriodicMesh::garbage_collection() {
    std::vector<int> vmap(pos_.size(), -1), emap(edge_slots(), -1), fmap(face_slots(), -1);
    int nv = 0, ne = 0, nf = 0;
    for (int v = 0; v < vertex_slots(); ++v)
        if (!vdel_[v]) vmap[v] = nv++;
    for (int e = 0; e < edge_slots(); ++e)
        if (!edel_[e]) emap[e] = ne++;
    for (int f = 0; f < face_slots(); ++f)
        if (!fdel_[f]) fmap[f] = nf++;
    if (!garbage_) return vmap;

    auto hmap = [&](int h) { return 2 * emap[h >> 1] + (h & 1); };

    std::vector<Vec3> pos(nv);
    std::vector<int> vhe(nv);
    for (int v = 0; v < vertex_slots(); ++v)
        if (vmap[v] >= 0) {
            pos[vmap[v]] = pos_[v];
            vhe[vmap[v]] = hmap(vhe_[v]);
        }
    std::vector<int> to(2 * ne), next(2 * ne), hface(2 * ne);
    for (int e = 0; e < edge_slots(); ++e) {
        if (emap[e] < 0) continue;
        for (int s = 0; s < 2; ++s) {
            const int h = 2 * e + s, g = 2 * emap[e] + s;
            to[g] = vmap[to_[h]];
            next[g] = hmap(next_[h]);
            hface[g] = fmap[hface_[h]];
        }
    }
    std::vector<int> fhe(nf);
    for (int f = 0; f < face_slots(); ++f)
        if (fmap[f] >= 0) fhe[fmap[f]] = hmap(fhe_[f]);

    pos_ = std::move(pos);
    vhe_ = std::move(vhe);
    to_ = std::move(to);
    next_ = std::move(next);
    hface_ = std::move(hface);
    fhe_ = std::move(fhe);
    vdel_.assign(nv, 0);
    edel_.assign(ne, 0);
    fdel_.assign(nf, 0);
    n_vertices_ = nv;
    n_edges_ = ne;
    n_faces_ = nf;
    garbage_ = false;
    return vmap;
}

std::string PeriodicMesh::validate() const {
    for (int e = 0; e < edge_slots(); ++e) {
        if (edel_[e]) continue;
        for (int s = 0; s < 2; ++s) {
            const int h = 2 * e + s;
            if (vdel_[to_[h]]) return "half-edge points to deleted vertex";
            if (edel_[edge_of(next_[h])]) return "next is deleted";
            if (next_[next_[next_[h]]] != h) return "face is not a triangle";
            if (hface_[h] < 0 || fdel_[hface_[h]]) return "half-edge without face";
            if (hface_[next_[h]] != hface_[h]) return "inconsistent face on cycle";
            if (from(next_[h]) != to_[h]) return "next does not start at target";
        }
        if (to_[2 * e] == to_[2 * e + 1]) return "self-loop edge";
    }
    std::vector<int> incident(pos_.size(), 0);
    for (int f = 0; f < face_slots(); ++f) {
        if (fdel_[f]) continue;
        if (hface_[fhe_[f]] != f) return "face half-edge mismatch";
        for (int v : face_vertices(f)) ++incident[v];
    }
    for (int v = 0; v < vertex_slots(); ++v) {
        if (vdel_[v]) continue;
        if (from(vhe_[v]) != v) return "vertex half-edge does not start at vertex";
        int count = 0;
        bool fine = true;
        for_each_outgoing(v, [&](int h) {
            ++count;
            fine = fine && from(h) == v;
        });
        if (!fine) return "fan walk leaves vertex";
        if (count != incident[v]) return "non-manifold vertex fan";
    }
    return {};
}

// ---------------------------------------------------------------------------

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

bool lex_less(const Vec3& a, const Vec3& b) {
    for (int i = 0; i < 3; ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return false;
}

}  // namespace

CanonicalizeResult canonicalize(const std::vector<Vec3>& raw, const std::vector<Face>& raw_faces,
                                double tol) {
    const int n = static_cast<int>(raw.size());
    UnionFind uf(n);

    // Bucket boundary vertices per axis and side; match +1 side against -1 side.
    for (int axis = 0; axis < 3; ++axis) {
        std::vector<int> lo, hi;
        for (int i = 0; i < n; ++i) {
            if (std::abs(raw[i][axis] + 1.0) <= tol) lo.push_back(i);
            if (std::abs(raw[i][axis] - 1.0) <= tol) hi.push_back(i);
        }
        auto match = [&](const std::vector<int>& from, const std::vector<int>& to, double shift) {
            for (int i : from) {
                Vec3 target = raw[i];
                target[axis] += shift;
                int best = -1;
                double best_d = tol;
                for (int j : to) {
                    const double d = (raw[j] - target).cwiseAbs().maxCoeff();
                    if (d <= best_d) {
                        best_d = d;
                        best = j;
                    }
                }
                if (best < 0) {
                    std::ostringstream msg;
                    msg << "vertex " << i << " at (" << raw[i].transpose() << ") has no partner";
                    throw Error(ErrorKind::UnmatchedBoundaryVertex, msg.str());
                }
                uf.unite(i, best);
            }
        };
        match(hi, lo, -2.0);
        match(lo, hi, 2.0);
    }

    std::vector<int> rep(n, -1);
    for (int i = 0; i < n; ++i) {
        const int r = uf.find(i);
        if (rep[r] < 0 || lex_less(raw[i], raw[rep[r]])) rep[r] = i;
    }
    std::vector<int> merged(n, -1), slot(n, -1);
    std::vector<Vec3> positions;
    for (int i = 0; i < n; ++i) {
        const int r = uf.find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(positions.size());
            positions.push_back(torus::wrap(raw[rep[r]]));
        }
        merged[i] = slot[r];
    }

    std::vector<Face> faces;
    faces.reserve(raw_faces.size());
    for (const Face& f : raw_faces) {
        Face g{merged[f[0]], merged[f[1]], merged[f[2]]};
        if (g[0] == g[1] || g[1] == g[2] || g[2] == g[0])
            throw Error(ErrorKind::NonManifoldAfterMerge, "face collapses after merging");
        for (int c = 0; c < 3; ++c) {
            const Vec3 raw_edge = raw[f[(c + 1) % 3]] - raw[f[c]];
            const Vec3 stored = torus::min_image(positions[g[(c + 1) % 3]] - positions[g[c]]);
            if ((raw_edge - stored).cwiseAbs().maxCoeff() > 10 * tol + 1e-12)
                throw Error(ErrorKind::NonManifoldAfterMerge, "edge longer than half a period");
        }
        faces.push_back(g);
    }

    CanonicalizeResult out;
    try {
        out.mesh = PeriodicMesh::from_faces(std::move(positions), faces);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NonManifold || e.kind() == ErrorKind::OpenMesh)
            throw Error(ErrorKind::NonManifoldAfterMerge, e.what());
        throw;
    }
    // from_faces keeps every merged vertex (all are referenced), so indices are stable.
    out.merge_map = std::move(merged);
    return out;
}

UnfoldedRing unfold_ring(const PeriodicMesh& mesh, int v) {
    UnfoldedRing ring;
    ring.center = v;
    ring.center_position = mesh.position(v);
    mesh.for_each_outgoing(v, [&](int h) {
        const int w = mesh.to(h);
        ring.neighbors.push_back(w);
        ring.positions.push_back(mesh.unfolded(w, ring.center_position));
    });
    return ring;
}

double circumradius(const Vec3& a, const Vec3& b, const Vec3& c, bool* degenerate) {
    const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
    const double area2 = (b - a).cross(c - a).norm();
    const double longest = std::max({la, lb, lc});
    const bool degen = area2 <= 1e-12 * longest * longest;
    if (degenerate) *degenerate = degen;
    if (degen) return 0.5 * longest;
    return la * lb * lc / (2.0 * area2);
}

ElementSize mean_element_size(const TriMesh& mesh) {
    ElementSize s;
    if (mesh.faces.empty()) return s;
    double sum = 0.0;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto x = mesh.corners(f);
        bool degen = false;
        sum += circumradius(x[0], x[1], x[2], &degen);
        s.degenerate_faces += degen ? 1 : 0;
    }
    s.mean = sum / mesh.num_faces();
    return s;
}

double surface_area(const TriMesh& mesh) {
    double a = 0.0;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto x = mesh.corners(f);
        a += 0.5 * (x[1] - x[0]).cross(x[2] - x[0]).norm();
    }
    return a;
}

// ---------------------------------------------------------------------------

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    if (s.size() < suffix.size()) return false;
    return std::equal(suffix.rbegin(), suffix.rend(), s.rbegin(),
                      [](char a, char b) { return std::tolower(a) == std::tolower(b); });
}

void add_polygon(RawMesh& m, const std::vector<int>& poly) {
    for (size_t i = 2; i < poly.size(); ++i) m.faces.push_back({poly[0], poly[i - 1], poly[i]});
}

RawMesh read_obj(std::istream& in) {
    RawMesh m;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            Vec3 p;
            ls >> p.x() >> p.y() >> p.z();
            m.vertices.push_back(p);
        } else if (tag == "f") {
            std::vector<int> poly;
            std::string tok;
            while (ls >> tok) {
                int idx = std::stoi(tok.substr(0, tok.find('/')));
                idx = idx < 0 ? static_cast<int>(m.vertices.size()) + idx : idx - 1;
                poly.push_back(idx);
            }
            add_polygon(m, poly);
        }
    }
    return m;
}

RawMesh read_off(std::istream& in) {
    RawMesh m;
    std::string header;
    in >> header;
    if (header != "OFF") throw Error(ErrorKind::Io, "missing OFF header");
    size_t nv = 0, nf = 0, ne = 0;
    in >> nv >> nf >> ne;
    m.vertices.resize(nv);
    for (auto& p : m.vertices) in >> p.x() >> p.y() >> p.z();
    for (size_t f = 0; f < nf; ++f) {
        int k = 0;
        in >> k;
        std::vector<int> poly(k);
        for (int& i : poly) in >> i;
        add_polygon(m, poly);
    }
    if (!in) throw Error(ErrorKind::Io, "truncated OFF file");
    return m;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
    out.precision(17);
    return out;
}

}  // namespace

RawMesh read_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
    RawMesh m = ends_with(path, ".off") ? read_off(in) : read_obj(in);
    for (const Face& f : m.faces)
        for (int c : f)
            if (c < 0 || c >= static_cast<int>(m.vertices.size()))
                throw Error(ErrorKind::Io, "face index out of range in " + path);
    return m;
}

void write_obj(const std::string& path, const TriMesh& mesh) {
    auto out = open_out(path);
    for (const Vec3& p : mesh.vertices) out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    for (const Face& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

void write_off(const std::string& path, const TriMesh& mesh) {
    auto out = open_out(path);
    out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.faces.size() << " 0\n";
    for (const Vec3& p : mesh.vertices) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    for (const Face& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

void write_mesh(const std::string& path, const TriMesh& mesh) {
    if (ends_with(path, ".off"))
        write_off(path, mesh);
    else
        write_obj(path, mesh);
}

void write_exploded_obj(const std::string& path, const TriMesh& mesh) {
    auto out = open_out(path);
    for (int f = 0; f < mesh.num_faces(); ++f)
        for (const Vec3& p : mesh.corners(f)) out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    for (int f = 0; f < mesh.num_faces(); ++f)
        out << "f " << 3 * f + 1 << ' ' << 3 * f + 2 << ' ' << 3 * f + 3 << '\n';
}

void write_sidecar(const std::string& path, const std::vector<int>& merge_map) {
    nlohmann::json j;
    j["cell"] = {{"min", {-1.0, -1.0, -1.0}}, {"max", {1.0, 1.0, 1.0}}, {"period", torus::kPeriod}};
    if (!merge_map.empty()) j["merge_map"] = merge_map;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

PeriodicMesh load_periodic_mesh(const std::string& path, double tol) {
    RawMesh raw = read_mesh(path);
    try {
        return PeriodicMesh::from_faces(raw.vertices, raw.faces);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::OpenMesh) throw;
    }
    return canonicalize(raw.vertices, raw.faces, tol).mesh;
}

}  // namespace ads
