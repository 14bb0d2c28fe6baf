#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "ads/periodic_mesh.hpp"
#include "ads/remesh.hpp"

namespace ads {

/// Scalar field on the cell [-1,1)^3 with its gradient, both in cell coordinates.
struct LevelSetField {
    std::function<double(const Vec3&)> value;
    std::function<Vec3(const Vec3&)> gradient;
};

enum class TpmsKind { P, G, D, IWP };

TpmsKind parse_tpms(std::string_view name);
const char* to_string(TpmsKind kind);

/// Trigonometric TPMS approximation in the unit coordinate r = (x + 1) / 2,
/// so each field has period 2 in cell coordinates.
LevelSetField tpms_field(TpmsKind kind);

/// Evaluates a TPMS formula directly in unit coordinates r in [0,1)^3.
double tpms_value_unit(TpmsKind kind, const Vec3& r);

struct PerturbationSpec {
    TpmsKind base = TpmsKind::P;
    int frequency_cap = 1;
    double strength = 0.0;
    std::uint64_t seed = 0;
};

struct PerturbedField {
    LevelSetField field;
    std::vector<std::string> basis;  // human-readable basis names
    std::vector<double> coefficients;
};

/// Adds sum_i s_i b_i with s_i ~ U[-strength, strength] over the single
/// trigonometric modes and their unordered pairwise products.
PerturbedField perturbed_field(const PerturbationSpec& spec);

/// Wraps an arbitrary scalar function of cell coordinates with a central-difference gradient.
LevelSetField numeric_field(std::function<double(const Vec3&)> value, double step = 1e-6);

/// Marching tetrahedra on a periodic n^3 grid over the cell. Returns a closed
/// triangle mesh oriented along the field gradient. Throws EmptyLevelSet or
/// NonManifoldExtraction.
PeriodicMesh extract_raw(const LevelSetField& field, int grid_n);

struct ExtractOptions {
    int grid_n = 64;
    double target_edge_length = 0.06;
    int remesh_iterations = 10;
    bool project = true;
};

/// extract_raw followed by isotropic remeshing (and optional projection).
PeriodicMesh extract_mesh(const LevelSetField& field, const ExtractOptions& options);

struct ProjectionReport {
    int moved = 0;
    int diverged = 0;
    double max_abs_value = 0.0;
};

/// Moves each vertex along the gradient line to |phi| < tol by bracketing and
/// bisection. Vertices that cannot be bracketed stay in place and are counted.
ProjectionReport project_to_levelset(PeriodicMesh& mesh, const LevelSetField& field, double tol = 1e-8);
/// Single-point version; returns false when the root was not bracketed.
bool project_point(const LevelSetField& field, Vec3& x, double tol = 1e-8);

/// Flat periodic plane z = 0 with n x n vertices.
PeriodicMesh flat_plane(int n);

enum class PatchKind { Elliptic, Parabolic, Hyperbolic };

/// Graph patch z = f(x, y) over [-half, half]^2 with exact normals and second forms.
struct AnalyticPatch {
    PatchKind kind;
    TriMesh mesh;               // non-periodic
    std::vector<Vec3> normals;  // exact, per vertex (upward)

    double height(double x, double y) const;
    Vec3 point(double x, double y) const { return {x, y, height(x, y)}; }
    Vec3 normal_at(double x, double y) const;
    /// Exact second fundamental form as a world tensor (normal-annihilating).
    Mat3 second_form_at(double x, double y) const;
};

AnalyticPatch analytic_patch(PatchKind kind, int resolution, double half_width = 1.0);

}  // namespace ads
