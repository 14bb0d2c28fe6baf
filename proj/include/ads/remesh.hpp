#pragma once

#include <functional>

#include "ads/periodic_mesh.hpp"

namespace ads {

struct RemeshOptions {
    double target_edge_length = 0.05;
    double split_ratio = 4.0 / 3.0;
    double collapse_ratio = 4.0 / 5.0;
    int iterations = 5;
    double smoothing_weight = 0.5;
    /// Hard cap on edge lengths; the unfolding needs every edge well below half a period.
    double max_edge_length = 0.29;
    /// Optional per-vertex correction applied after smoothing (e.g. level-set projection).
    std::function<Vec3(const Vec3&)> reproject;
};

struct RemeshStats {
    int splits = 0;
    int collapses = 0;
    int flips = 0;
    int skipped = 0;  // local operations rejected as degenerate
};

/// Incremental isotropic remeshing: split, collapse, valence flips and
/// tangential smoothing, acting on unfolded local coordinates. Topology is
/// preserved. Throws InvalidArgument for targets >= 0.3.
RemeshStats dynamic_remesh(PeriodicMesh& mesh, const RemeshOptions& options);

/// Area-weighted normal of a face (length equals twice the area).
Vec3 face_area_vector(const PeriodicMesh& mesh, int f);
/// Unit angle-weighted vertex normal from the one-ring.
Vec3 vertex_normal(const PeriodicMesh& mesh, int v);

}  // namespace ads
