#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ads/periodic_mesh.hpp"

namespace ads {

struct SurgeryOptions {
    double curvature_threshold = 25.0;
    int fairing_ring = 4;
    /// Fill edges longer than this are split before fairing; <= 0 uses the mean edge length.
    double fill_edge_length = 0.0;
};

struct SurgeryReport {
    int regions_removed = 0;
    int fill_failed = 0;     // regions left untouched because a hole was not a disk
    int wide_regions = 0;    // removed regions spanning more than half a period
    int fairing_reverted = 0;
    int holes_filled = 0;
};

/// Removes connected groups of faces whose three vertices all exceed the
/// curvature threshold, fills every resulting hole with a minimal-area
/// triangulation and fairs the fill plus a surrounding ring with a
/// bi-Laplacian solve. Never increases the genus.
SurgeryReport numerical_surgery(PeriodicMesh& mesh, const SurgeryOptions& options = {});

/// Minimal-area triangulation of a closed polygon given in unfolded
/// coordinates. Returns index triples into the polygon, oriented so that
/// each polygon edge (i, i+1) appears reversed. `forbidden(i, j)` rejects
/// chords. Returns an empty list when no admissible triangulation exists.
std::vector<Face> fill_polygon(std::span<const Vec3> polygon,
                               const std::function<bool(int, int)>& forbidden = {});

}  // namespace ads
