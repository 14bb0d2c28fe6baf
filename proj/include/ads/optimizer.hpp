#pragma once

#include <deque>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ads/objective.hpp"
#include "ads/remesh.hpp"
#include "ads/sensitivity.hpp"
#include "ads/surgery.hpp"

namespace ads {

/// Solves (M - c L) d = -(c + 1) V for the descent field d. M is the lumped
/// mass and L the (negative semidefinite) cotangent Laplacian.
Eigen::VectorXd precondition(const Eigen::VectorXd& gradient, double c, const Eigen::VectorXd& mass,
                             const SparseMatrix& laplacian);

struct LineSearchOptions {
    double alpha = 0.1;
    double tau = 0.7;
    int max_backtracks = 20;
};

struct LineSearchResult {
    double step = 0.0;
    double value = 0.0;  // loss at the returned step
    int backtracks = 0;
    bool accepted = false;    // the sufficient-decrease test passed
    bool stationary = false;  // zero slope: nothing to decrease
};

/// Backtracking on loss(dt) from dt0 until loss(dt) < loss(0) + alpha dt slope,
/// where slope = d . g is the directional derivative of the loss. Loss
/// evaluations may return +inf for inadmissible steps. When the backtracks
/// run out the last tried step is returned with accepted = false.
LineSearchResult armijo_search(const std::function<double(double)>& loss, double loss0, double slope, double dt0,
                               const LineSearchOptions& options = {});

/// Field form: loss over a flat parameter vector x, moved along d.
LineSearchResult armijo_search(const std::function<double(const Eigen::VectorXd&)>& loss, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& d, const Eigen::VectorXd& g, double dt0,
                               const LineSearchOptions& options = {});

inline constexpr double kColdStartStep = 1e-2;

/// Twice the mean of the given accepted steps, or the cold-start step when empty.
double adaptive_initial_step(std::span<const double> last_steps, double factor = 2.0,
                             double cold_start = kColdStartStep);

/// Slope of the least-squares line through (k, values[k]).
double regression_slope(std::span<const double> values);

/// Slope of the least-squares line through (times[k], values[k]).
double regression_slope(std::span<const double> times, std::span<const double> values);

struct OptimizerOptions {
    LameSet lame = lame_from_engineering(1.0, 0.3);
    StrainScheme scheme = StrainScheme::Corrected;
    SolverOptions solver;
    SensitivityMethod sensitivity = SensitivityMethod::Discrete;

    double precondition_c = 1.0;
    LineSearchOptions line_search;
    double step_factor = 2.0;
    int step_memory = 5;
    double cold_start_step = kColdStartStep;

    int max_iter = 500;
    double min_step = 1e-4;
    int min_step_count = 5;
    double slope_tol = 1e-3;
    int slope_window = 50;

    bool surgery = true;
    int surgery_every = 4;
    SurgeryOptions surgery_options;

    bool remesh = true;
    /// Target edge length, replaced from the listed iteration onwards.
    /// A non-positive target keeps the mean edge length of the input mesh.
    double remesh_target = 0.0;
    std::vector<std::pair<int, double>> remesh_schedule;
    int remesh_sweeps = 2;
};

struct IterationRecord {
    int iteration = 0;
    double objective = 0.0;             // after surgery and remeshing
    double objective_after_step = 0.0;  // at the accepted step
    double step = 0.0;
    double gradient_norm = 0.0;  // L2 norm of the shape gradient
    int genus = 0;
    int surgery_count = 0;  // regions removed so far
    int vertices = 0;
    bool surgery_event = false;
    int remesh_ops = 0;  // splits + collapses + flips this iteration
    bool remeshed = false;
    bool line_search_accepted = false;
    int backtracks = 0;
    double slope = 0.0;  // directional derivative of the minimized loss along d
    double bulk = 0.0;
};

struct OptimizationResult {
    PeriodicMesh best_mesh;
    PeriodicMesh final_mesh;
    double best_objective = 0.0;
    Tensor4Voigt best_tensor;
    std::vector<IterationRecord> history;
    bool converged = false;
    std::string stop_reason;
};

/// Objective history and step memory of a running optimization.
struct OptimizationState {
    int iteration = 0;
    std::deque<double> objective_history;  // most recent slope_window values
    std::deque<double> flow_time_history;  // accumulated step at each of them
    double flow_time = 0.0;
    std::deque<double> accepted_steps;     // most recent step_memory steps
    int small_steps = 0;
    bool converged = false;
};

/// Surgery, remeshing and a preconditioned, line-searched normal step per
/// iteration until convergence or max_iter. Returns the best mesh seen.
OptimizationResult optimize(const PeriodicMesh& input, const ObjectiveSpec& objective,
                            const OptimizerOptions& options = {},
                            const std::function<void(const IterationRecord&)>& on_iteration = {});

/// Writes the history with a header row.
void write_history_csv(const std::string& path, const std::vector<IterationRecord>& history);

}  // namespace ads
