#include "ads/optimizer.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <Eigen/SparseCholesky>

namespace ads {

Eigen::VectorXd precondition(const Eigen::VectorXd& gradient, double c, const Eigen::VectorXd& mass,
                             const SparseMatrix& laplacian) {
    if (!(c >= 0.0)) throw Error(ErrorKind::InvalidArgument, "precondition coefficient must be >= 0");
    const int n = static_cast<int>(gradient.size());
    if (mass.size() != n || laplacian.rows() != n)
        throw Error(ErrorKind::InvalidArgument, "precondition size mismatch");
    SparseMatrix a = -c * laplacian;
    for (int i = 0; i < n; ++i) a.coeffRef(i, i) += mass[i];
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(a);
    if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::NoConvergence, "M - cL factorization failed");
    return ldlt.solve(-(c + 1.0) * gradient);
}

LineSearchResult armijo_search(const std::function<double(double)>& loss, double loss0, double slope, double dt0,
                               const LineSearchOptions& options) {
    LineSearchResult r;
    r.step = dt0;
    if (slope == 0.0) {
        r.value = loss0;
        r.accepted = r.stationary = true;
        return r;
    }
    for (int k = 0; k < options.max_backtracks; ++k) {
        r.value = loss(r.step);
        if (r.value < loss0 + options.alpha * r.step * slope) {
            r.accepted = true;
            return r;
        }
        r.step *= options.tau;
        ++r.backtracks;
    }
    r.value = loss(r.step);
    return r;
}

LineSearchResult armijo_search(const std::function<double(const Eigen::VectorXd&)>& loss, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& d, const Eigen::VectorXd& g, double dt0,
                               const LineSearchOptions& options) {
    return armijo_search([&](double t) { return loss(x + t * d); }, loss(x), d.dot(g), dt0, options);
}

double adaptive_initial_step(std::span<const double> last_steps, double factor, double cold_start) {
    if (last_steps.empty()) return cold_start;
    return factor * std::accumulate(last_steps.begin(), last_steps.end(), 0.0) / static_cast<double>(last_steps.size());
}

double regression_slope(std::span<const double> values) {
    std::vector<double> k(values.size());
    std::iota(k.begin(), k.end(), 0.0);
    return regression_slope(k, values);
}

double regression_slope(std::span<const double> times, std::span<const double> values) {
    const int n = static_cast<int>(values.size());
    if (static_cast<int>(times.size()) != n) throw Error(ErrorKind::InvalidArgument, "regression size mismatch");
    if (n < 2) return 0.0;
    const double xm = std::accumulate(times.begin(), times.end(), 0.0) / n;
    const double ym = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (int k = 0; k < n; ++k) {
        sxy += (times[k] - xm) * (values[k] - ym);
        sxx += (times[k] - xm) * (times[k] - xm);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

namespace {

double mean_edge_length(const PeriodicMesh& mesh) {
    double total = 0.0;
    for (int e = 0; e < mesh.edge_slots(); ++e)
        if (!mesh.edge_deleted(e)) total += mesh.edge_length(e);
    return total / std::max(1, mesh.num_edges());
}

double scheduled_target(const OptimizerOptions& opt, int iteration, double fallback) {
    double target = opt.remesh_target > 0.0 ? opt.remesh_target : fallback;
    for (const auto& [from, value] : opt.remesh_schedule)
        if (iteration >= from) target = value;
    return target;
}

// True when a face normal turns by more than 90 degrees against the reference geometry.
bool inverts_faces(const TriMesh& mesh, const SurfaceGeometry& reference) {
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto x = mesh.corners(f);
        if ((x[1] - x[0]).cross(x[2] - x[0]).dot(reference.faces[f].normal) <= 0.0) return true;
    }
    return false;
}

}  // namespace

OptimizationResult optimize(const PeriodicMesh& input, const ObjectiveSpec& objective,
                            const OptimizerOptions& options,
                            const std::function<void(const IterationRecord&)>& on_iteration) {
    objective.validate();
    const double sign = objective.maximize() ? -1.0 : 1.0;  // loss = sign * objective
    auto better = [&](double a, double b) { return sign * a < sign * b; };

    OptimizationResult result;
    PeriodicMesh mesh = input;
    const double input_edge = std::min(mean_edge_length(input), 0.2);
    OptimizationState state;
    int regions = 0;
    bool have_best = false;
    auto offer_best = [&](const PeriodicMesh& m, double f, const Tensor4Voigt& c) {
        if (have_best && !better(f, result.best_objective)) return;
        have_best = true;
        result.best_mesh = m;
        result.best_objective = f;
        result.best_tensor = c;
    };

    try {
        for (state.iteration = 0; state.iteration < options.max_iter; ++state.iteration) {
            IterationRecord rec;
            rec.iteration = state.iteration;
            if (options.surgery && options.surgery_every > 0 && state.iteration % options.surgery_every == 0) {
                const SurgeryReport s = numerical_surgery(mesh, options.surgery_options);
                regions += s.regions_removed;
                rec.surgery_event = s.regions_removed > 0;
            }
            rec.surgery_count = regions;
            if (options.remesh) {
                RemeshOptions ro;
                ro.target_edge_length = scheduled_target(options, state.iteration, input_edge);
                ro.iterations = options.remesh_sweeps;
                const RemeshStats st = dynamic_remesh(mesh, ro);
                rec.remesh_ops = st.splits + st.collapses + st.flips;
                rec.remeshed = true;
            }
            rec.genus = mesh.genus();
            rec.vertices = mesh.num_vertices();

            const TriMesh tm = mesh.tri_mesh();
            const CellAnalysis a = analyze(tm, options.lame, options.scheme, options.solver);
            const double f = evaluate_objective(objective, a.asymptotic);
            rec.objective = f;
            rec.bulk = bulk_modulus(a.asymptotic);
            offer_best(mesh, f, a.asymptotic);

            const ShapeSensitivity sens(tm, a, options.sensitivity);
            const Eigen::VectorXd grad = sign * sens.gradient(objective_derivative(objective, a.asymptotic));
            rec.gradient_norm = std::sqrt(grad.dot(grad.cwiseQuotient(a.system.mass)));
            const Eigen::VectorXd d = precondition(grad, options.precondition_c, a.system.mass, cotan_laplacian(tm));

            const std::vector<double> steps(state.accepted_steps.begin(), state.accepted_steps.end());
            const double dt0 = adaptive_initial_step(steps, options.step_factor, options.cold_start_step);
            const std::vector<Vec3>& normals = a.geometry.vertex_normals;
            Tensor4Voigt probe_tensor;
            auto moved = [&](double t) {
                TriMesh m = tm;
                for (int v = 0; v < m.num_vertices(); ++v) m.vertices[v] = torus::wrap(tm.vertices[v] + t * d[v] * normals[v]);
                return m;
            };
            auto loss = [&](double t) {
                try {
                    const TriMesh m = moved(t);
                    if (inverts_faces(m, a.geometry)) return std::numeric_limits<double>::infinity();
                    const CellAnalysis p = analyze(m, options.lame, options.scheme, options.solver);
                    probe_tensor = p.asymptotic;
                    return sign * evaluate_objective(objective, p.asymptotic);
                } catch (const Error&) {
                    return std::numeric_limits<double>::infinity();
                }
            };
            rec.slope = d.dot(grad);
            const LineSearchResult ls = armijo_search(loss, sign * f, rec.slope, dt0, options.line_search);
            rec.backtracks = ls.backtracks;
            rec.line_search_accepted = ls.accepted;
            rec.objective_after_step = f;
            if (std::isfinite(ls.value) && !ls.stationary) {
                const TriMesh next = moved(ls.step);
                for (int v = 0; v < next.num_vertices(); ++v) mesh.set_position(v, next.vertices[v]);
                rec.step = ls.step;
                rec.objective_after_step = sign * ls.value;
                state.accepted_steps.push_back(ls.step);
                while (static_cast<int>(state.accepted_steps.size()) > options.step_memory)
                    state.accepted_steps.pop_front();
                offer_best(mesh, rec.objective_after_step, probe_tensor);
            }

            state.small_steps = rec.step < options.min_step ? state.small_steps + 1 : 0;
            state.objective_history.push_back(f);
            state.flow_time_history.push_back(state.flow_time);
            state.flow_time += rec.step;
            while (static_cast<int>(state.objective_history.size()) > options.slope_window) {
                state.objective_history.pop_front();
                state.flow_time_history.pop_front();
            }
            result.history.push_back(rec);
            if (on_iteration) on_iteration(rec);

            if (ls.stationary) {
                state.converged = true;
                result.stop_reason = "zero descent direction";
            } else if (state.small_steps >= options.min_step_count) {
                state.converged = true;
                result.stop_reason = "time step below threshold";
            } else if (static_cast<int>(state.objective_history.size()) >= options.slope_window) {
                const std::vector<double> h(state.objective_history.begin(), state.objective_history.end());
                const std::vector<double> t(state.flow_time_history.begin(), state.flow_time_history.end());
                const double rate = -sign * regression_slope(t, h) / (std::abs(f) + 1e-12);
                if (rate < options.slope_tol) {
                    state.converged = true;
                    result.stop_reason = "objective slope below threshold";
                }
            }
            if (state.converged) break;
        }
        if (!state.converged) result.stop_reason = "iteration limit";
    } catch (const Error& e) {
        if (!have_best) throw;
        result.stop_reason = std::string("stopped on error: ") + e.what();
    }
    result.converged = state.converged;
    result.final_mesh = std::move(mesh);
    return result;
}

void write_history_csv(const std::string& path, const std::vector<IterationRecord>& history) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
    out.precision(10);
    out << "iteration,objective,dt,gradient_norm,genus,surgery_count,objective_after_step,vertices,"
           "surgery_event,remesh_ops,line_search_accepted,backtracks,slope,bulk\n";
    for (const IterationRecord& r : history)
        out << r.iteration << ',' << r.objective << ',' << r.step << ',' << r.gradient_norm << ',' << r.genus << ','
            << r.surgery_count << ',' << r.objective_after_step << ',' << r.vertices << ',' << r.surgery_event << ','
            << r.remesh_ops << ',' << r.line_search_accepted << ',' << r.backtracks << ',' << r.slope << ','
            << r.bulk << '\n';
}

}  // namespace ads
