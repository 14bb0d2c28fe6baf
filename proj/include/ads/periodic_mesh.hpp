#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "ads/core.hpp"

namespace ads {

/// Compact face-vertex surface used by the numerical modules.
///
/// When `periodic` is set, vertex coordinates live on the torus and every
/// per-face computation works on corners unfolded relative to the first
/// corner. Non-periodic meshes (test harnesses, analytic patches) use raw
/// coordinates.
struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    bool periodic = true;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_faces() const { return static_cast<int>(faces.size()); }

    Vec3 relative(const Vec3& p, const Vec3& ref) const {
        return periodic ? torus::unfold(p, ref) : p;
    }
    std::array<Vec3, 3> corners(int f) const;
};

struct UnfoldedRing {
    int center = -1;
    Vec3 center_position;
    std::vector<int> neighbors;
    std::vector<Vec3> positions;  // translated next to the center
};

/// Closed, consistently oriented triangle mesh embedded in the flat torus.
///
/// Connectivity is a half-edge structure where the two half-edges of edge e
/// are 2e and 2e+1. Periodic copies are never stored: a neighbor belongs to
/// the image nearest to the vertex that accesses it, so edges must stay
/// shorter than half a period.
class PeriodicMesh {
public:
    PeriodicMesh() = default;

    /// Builds connectivity from a closed face list. Unreferenced vertices are
    /// dropped. Throws OpenMesh or NonManifold.
    static PeriodicMesh from_faces(std::vector<Vec3> positions, const std::vector<Face>& faces);

    int num_vertices() const { return n_vertices_; }
    int num_faces() const { return n_faces_; }
    int num_edges() const { return n_edges_; }
    int euler_characteristic() const { return n_vertices_ - n_edges_ + n_faces_; }
    int num_components() const;
    /// Total genus over all components, (2C - chi)/2.
    int genus() const;

    // Raw slot counts (include deleted elements until garbage_collection()).
    int vertex_slots() const { return static_cast<int>(pos_.size()); }
    int face_slots() const { return static_cast<int>(fhe_.size()); }
    int edge_slots() const { return static_cast<int>(to_.size() / 2); }
    bool has_garbage() const { return garbage_; }

    bool vertex_deleted(int v) const { return vdel_[v] != 0; }
    bool face_deleted(int f) const { return fdel_[f] != 0; }
    bool edge_deleted(int e) const { return edel_[e] != 0; }

    const Vec3& position(int v) const { return pos_[v]; }
    /// Stores the wrapped position.
    void set_position(int v, const Vec3& p) { pos_[v] = torus::wrap(p); }
    std::span<const Vec3> positions() const { return pos_; }

    /// Position of `v` translated to the image nearest `ref`.
    Vec3 unfolded(int v, const Vec3& ref) const { return torus::unfold(pos_[v], ref); }

    // Half-edge navigation.
    int to(int h) const { return to_[h]; }
    int from(int h) const { return to_[h ^ 1]; }
    int next(int h) const { return next_[h]; }
    int prev(int h) const { return next_[next_[h]]; }
    static int opp(int h) { return h ^ 1; }
    static int edge_of(int h) { return h >> 1; }
    int face_of(int h) const { return hface_[h]; }
    int vertex_halfedge(int v) const { return vhe_[v]; }
    int face_halfedge(int f) const { return fhe_[f]; }

    std::array<int, 3> face_vertices(int f) const;
    /// Corners of f unfolded relative to the first corner.
    std::array<Vec3, 3> face_corners(int f) const;
    int valence(int v) const;
    Vec3 edge_vector(int h) const { return torus::min_image(pos_[to(h)] - pos_[from(h)]); }
    double edge_length(int e) const { return edge_vector(2 * e).norm(); }
    double max_edge_length() const;

    template <class Fn>
    void for_each_outgoing(int v, Fn&& fn) const {
        const int start = vhe_[v];
        int h = start;
        do {
            fn(h);
            h = next_[opp(h)];
        } while (h != start);
    }

    std::vector<Face> faces() const;
    TriMesh tri_mesh() const;

    // Local operations for remeshing. Callers check the matching predicate.
    int split_edge(int h, const Vec3& p);
    bool is_collapse_ok(int h) const;
    void collapse(int h, const Vec3& p);
    bool is_flip_ok(int e) const;
    void flip(int e);

    /// Removes deleted elements and renumbers; returns old->new vertex map (-1 if removed).
    std::vector<int> garbage_collection();

    /// Checks pairing, next-cycles and vertex fans. Returns an empty string when valid.
    std::string validate() const;

private:
    int new_vertex(const Vec3& p);
    int new_edge(int from, int to);
    int new_face(int h);

    std::vector<Vec3> pos_;
    std::vector<int> vhe_;
    std::vector<int> to_, next_, hface_;
    std::vector<int> fhe_;
    std::vector<char> vdel_, edel_, fdel_;
    int n_vertices_ = 0, n_edges_ = 0, n_faces_ = 0;
    bool garbage_ = false;
};

struct CanonicalizeResult {
    PeriodicMesh mesh;
    /// Raw vertex index -> merged vertex index.
    std::vector<int> merge_map;
};

/// Merges periodic partner vertices of a mesh whose boundary lies on the
/// cube faces x_i = +-1. The merged vertex keeps the lexicographically
/// smaller partner position. Throws UnmatchedBoundaryVertex or
/// NonManifoldAfterMerge.
CanonicalizeResult canonicalize(const std::vector<Vec3>& raw_positions,
                                const std::vector<Face>& raw_faces, double tol = 1e-6);

UnfoldedRing unfold_ring(const PeriodicMesh& mesh, int v);

struct ElementSize {
    double mean = 0.0;
    int degenerate_faces = 0;
};

double circumradius(const Vec3& a, const Vec3& b, const Vec3& c, bool* degenerate = nullptr);
ElementSize mean_element_size(const TriMesh& mesh);
inline ElementSize mean_element_size(const PeriodicMesh& mesh) {
    return mean_element_size(mesh.tri_mesh());
}

double surface_area(const TriMesh& mesh);

// ---------------------------------------------------------------------------
// File formats

struct RawMesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
};

/// Reads OBJ or OFF (by extension); polygons are fan-triangulated.
RawMesh read_mesh(const std::string& path);
void write_obj(const std::string& path, const TriMesh& mesh);
void write_off(const std::string& path, const TriMesh& mesh);
void write_mesh(const std::string& path, const TriMesh& mesh);
/// Triangle soup where every face is written with its unfolded corners so
/// faces crossing the cell boundary stay intact.
void write_exploded_obj(const std::string& path, const TriMesh& mesh);
/// JSON sidecar with cell bounds and, when non-empty, the merge map.
void write_sidecar(const std::string& path, const std::vector<int>& merge_map);

/// Loads a mesh file: if it has boundary it is canonicalized first.
PeriodicMesh load_periodic_mesh(const std::string& path, double tol = 1e-6);

}  // namespace ads
