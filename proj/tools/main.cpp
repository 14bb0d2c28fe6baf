#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ads/benchmarks.hpp"
#include "ads/config.hpp"
#include "ads/optimizer.hpp"
#include "ads/surface_gen.hpp"

using namespace ads;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument:
        case ErrorKind::UnmatchedBoundaryVertex:
        case ErrorKind::NonManifoldAfterMerge:
        case ErrorKind::NonManifold:
        case ErrorKind::OpenMesh:
        case ErrorKind::EmptyLevelSet:
        case ErrorKind::NonManifoldExtraction:
        case ErrorKind::Io:
        case ErrorKind::Config: return kExitValidation;
        default: return kExitNumerical;
    }
}

json matrix_json(const Mat6& m) {
    json rows = json::array();
    for (int i = 0; i < 6; ++i) rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
    return rows;
}

void write_json(const std::string& path, const json& doc) {
    if (path.empty() || path == "-") {
        std::cout << doc.dump(2) << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
    out << doc.dump(2) << '\n';
}

fs::path metadata_path(const std::string& mesh_path) {
    fs::path p(mesh_path);
    return p.replace_extension(".meta.json");
}

struct MaterialArgs {
    double youngs = 1.0;
    double poisson = 0.3;
    std::string scheme = "corrected";
    std::string solver = "auto";

    void add(CLI::App& app) {
        app.add_option("--youngs", youngs, "Young's modulus of the shell material")->capture_default_str();
        app.add_option("--poisson", poisson, "Poisson ratio of the shell material")->capture_default_str();
        app.add_option("--scheme", scheme, "corrected, uncorrected or plane-stress")->capture_default_str();
        app.add_option("--solver", solver, "auto, cholesky or jacobi")->capture_default_str();
    }
    LameSet lame() const { return lame_from_engineering(youngs, poisson); }
    SolverOptions solver_options() const {
        SolverOptions s;
        s.preconditioner = parse_preconditioner(solver);
        return s;
    }
};

json mesh_summary(const PeriodicMesh& mesh) {
    const TriMesh t = mesh.tri_mesh();
    return {{"vertices", mesh.num_vertices()},
            {"faces", mesh.num_faces()},
            {"genus", mesh.genus()},
            {"components", mesh.num_components()},
            {"area", surface_area(t)},
            {"mesh_size", mean_element_size(t).mean}};
}

json tensor_summary(const Tensor4Voigt& c, const LameSet& lame) {
    const double bound = 4.0 / 9.0 * (lame.lambda0 + lame.mu);
    json young = json::object();
    const char* axes[3] = {"x", "y", "z"};
    for (int i = 0; i < 3; ++i) {
        ObjectiveSpec spec;
        spec.kind = ObjectiveKind::DirectionalYoung;
        spec.direction = Vec3::Unit(i);
        try {
            young[axes[i]] = evaluate_objective(spec, c);
        } catch (const Error&) {
            young[axes[i]] = nullptr;
        }
    }
    const IsotropicFit fit = isotropic_fit(c);
    return {{"voigt", matrix_json(c.matrix())},
            {"bulk", bulk_modulus(c)},
            {"bulk_ratio", bulk_modulus(c) / bound},
            {"youngs", young},
            {"isotropic_fit", {{"lambda", fit.lambda}, {"mu", fit.mu}, {"residual", fit.residual}}}};
}

int cmd_gen(const GeneratorConfig& g, const std::string& output) {
    const PerturbedField pf = perturbed_field(g.perturbation);
    const PeriodicMesh mesh = extract_mesh(pf.field, g.extract);
    write_mesh(output, mesh.tri_mesh());
    json meta = {{"kind", to_string(g.perturbation.base)},
                 {"nbar", g.perturbation.frequency_cap},
                 {"sbar", g.perturbation.strength},
                 {"seed", g.perturbation.seed},
                 {"grid", g.extract.grid_n},
                 {"target_edge_length", g.extract.target_edge_length},
                 {"remesh_iterations", g.extract.remesh_iterations},
                 {"project", g.extract.project},
                 {"basis", pf.basis},
                 {"coefficients", pf.coefficients},
                 {"mesh", mesh_summary(mesh)}};
    write_json(metadata_path(output).string(), meta);
    std::cerr << "wrote " << output << " (" << mesh.num_vertices() << " vertices, genus " << mesh.genus() << ")\n";
    return 0;
}

int cmd_eval(const std::string& input, const MaterialArgs& m, const std::string& output) {
    const PeriodicMesh mesh = load_periodic_mesh(input);
    const LameSet lame = m.lame();
    const CellAnalysis a = analyze(mesh.tri_mesh(), lame, parse_scheme(m.scheme), m.solver_options());
    json doc = {{"input", input},
                {"material", {{"youngs_modulus", m.youngs}, {"poisson_ratio", m.poisson}}},
                {"scheme", m.scheme},
                {"mesh", mesh_summary(mesh)},
                {"asymptotic", tensor_summary(a.asymptotic, lame)},
                {"homogeneous", tensor_summary(a.homogeneous, lame)},
                {"solver",
                 {{"iterations", a.cell.iterations}, {"relative_residual", a.cell.relative_residual}}}};
    write_json(output, doc);
    return 0;
}

int cmd_check(const std::string& input, const MaterialArgs& m, const std::string& output) {
    const PeriodicMesh mesh = load_periodic_mesh(input);
    if (const std::string problem = mesh.validate(); !problem.empty()) {
        std::cerr << "invalid mesh: " << problem << '\n';
        return kExitValidation;
    }
    const TriMesh t = mesh.tri_mesh();
    if (const VertexNormals vn = vertex_normals(t); !vn.orientation_consistent()) {
        std::cerr << "orientation error: " << vn.inconsistent_faces << " faces disagree with their corner normals\n";
        return kExitValidation;
    }
    const LameSet lame = m.lame();
    const CellAnalysis a = analyze(t, lame, parse_scheme(m.scheme), m.solver_options());
    const std::vector<IdentityCheck> checks = identity_checks(a);
    const OptimalityResidual r = optimality_residual(t, a.geometry, lame, Mat3::Identity() / 3.0);
    bool ok = true;
    json list = json::array();
    for (const IdentityCheck& c : checks) {
        ok = ok && c.passed;
        std::fprintf(stderr, "%-26s %s %.12g %s %.12g (tol %.0e)\n", c.name.c_str(), c.passed ? "PASS" : "FAIL",
                     c.value, c.is_bound ? "<=" : "==", c.reference, c.tolerance);
        list.push_back({{"name", c.name},
                        {"value", c.value},
                        {"reference", c.reference},
                        {"tolerance", c.tolerance},
                        {"bound", c.is_bound},
                        {"passed", c.passed}});
    }
    std::fprintf(stderr, "hydrostatic optimality residual: tangential %.3e, normal %.3e\n", r.tangential_l2,
                 r.normal_l2);
    write_json(output, {{"input", input},
                        {"mesh", mesh_summary(mesh)},
                        {"checks", list},
                        {"hydrostatic_residual", {{"tangential", r.tangential_l2}, {"normal", r.normal_l2}}},
                        {"passed", ok}});
    return ok ? 0 : kExitNumerical;
}

int cmd_convergence(const std::string& surface, int levels, const LadderOptions& options, const std::string& output) {
    const LevelSetField field = surface == "ladder" ? ladder_field() : tpms_field(parse_tpms(surface));
    const std::vector<LadderLevel> ladder = refinement_ladder(field, levels, options);
    std::ofstream file;
    if (!output.empty() && output != "-") {
        file.open(output);
        if (!file) throw Error(ErrorKind::Io, "cannot write " + output);
    }
    std::ostream& out = file.is_open() ? file : std::cout;
    out.precision(10);
    out << "level,target_edge,mesh_size,vertices,bulk,successive_error\n";
    bool monotone = true;
    for (std::size_t k = 0; k < ladder.size(); ++k) {
        const LadderLevel& l = ladder[k];
        out << l.level << ',' << l.target_edge << ',' << l.mesh_size << ',' << l.vertices << ','
            << bulk_modulus(l.asymptotic) << ',';
        if (k > 0) out << l.successive_error;
        out << '\n';
        if (k > 1) monotone = monotone && l.successive_error < ladder[k - 1].successive_error;
    }
    std::cerr << "successive error " << (monotone ? "strictly decreasing" : "NOT monotone") << '\n';
    return 0;
}

int cmd_optimize(RunConfig config, const std::string& out_dir) {
    std::cout << config_to_json(config) << '\n';
    if (config.objective.kind == ObjectiveKind::Poisson)
        std::cerr << "warning: the Poisson objective drives wrinkled surfaces where the membrane model is "
                     "inaccurate\n";
    const PeriodicMesh input = config.input.empty()
                                   ? extract_mesh(perturbed_field(config.generator.perturbation).field,
                                                  config.generator.extract)
                                   : load_periodic_mesh(config.input);
    fs::create_directories(out_dir);
    auto out_path = [&](const std::string& name) { return (fs::path(out_dir) / name).string(); };
    const auto start = std::chrono::steady_clock::now();
    const OptimizationResult r = optimize(input, config.objective, config.optimizer, [](const IterationRecord& rec) {
        std::fprintf(stderr, "%4d  f %.6f  dt %.3e  |V| %.3e  genus %d  surgeries %d  vertices %d\n",
                     rec.iteration, rec.objective, rec.step, rec.gradient_norm, rec.genus, rec.surgery_count,
                     rec.vertices);
    });
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    write_obj(out_path(config.output.mesh), r.best_mesh.tri_mesh());
    write_history_csv(out_path(config.output.history), r.history);
    json summary = {{"config", json::parse(config_to_json(config))},
                    {"objective", config.objective.describe()},
                    {"initial_objective", r.history.empty() ? 0.0 : r.history.front().objective},
                    {"best_objective", r.best_objective},
                    {"best_tensor", tensor_summary(r.best_tensor, config.optimizer.lame)},
                    {"iterations", r.history.size()},
                    {"converged", r.converged},
                    {"stop_reason", r.stop_reason},
                    {"slope_criterion", "regression of the objective against accumulated flow time, divided by "
                                        "|objective| + 1e-12"},
                    {"best_mesh", mesh_summary(r.best_mesh)},
                    {"final_mesh", mesh_summary(r.final_mesh)},
                    {"seconds", seconds}};
    write_json(out_path(config.output.summary), summary);
    std::cerr << "best " << r.best_objective << " after " << r.history.size() << " iterations (" << r.stop_reason
              << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Asymptotic directional stiffness of periodic shell-lattice surfaces"};
    app.require_subcommand(1);

    GeneratorConfig gen;
    std::string gen_kind = "P", gen_output, gen_config;
    bool no_project = false;
    int plane = 0;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a periodic TPMS or perturbed TPMS mesh");
    gen_cmd->add_option("--config", gen_config, "Take generator settings from a config file");
    gen_cmd->add_option("--kind", gen_kind, "P, G, D or IWP")->capture_default_str();
    gen_cmd->add_option("--nbar", gen.perturbation.frequency_cap, "Frequency cap of the perturbation")
        ->capture_default_str();
    gen_cmd->add_option("--sbar", gen.perturbation.strength, "Perturbation strength")->capture_default_str();
    gen_cmd->add_option("--seed", gen.perturbation.seed, "Perturbation seed")->capture_default_str();
    gen_cmd->add_option("--grid", gen.extract.grid_n, "Sampling grid per axis")->capture_default_str();
    gen_cmd->add_option("--target-edge", gen.extract.target_edge_length, "Remeshing target edge length")
        ->capture_default_str();
    gen_cmd->add_option("--remesh-iterations", gen.extract.remesh_iterations, "Isotropic remeshing sweeps")
        ->capture_default_str();
    gen_cmd->add_flag("--no-project", no_project, "Skip level-set projection after remeshing");
    gen_cmd->add_option("--plane", plane, "Write a flat periodic plane with this many vertices per side instead");
    gen_cmd->add_option("-o,--output", gen_output, "Output mesh (.obj or .off)")->required();

    MaterialArgs material;
    std::string mesh_path, json_out;
    auto* eval_cmd = app.add_subcommand("eval", "Compute the asymptotic and homogeneous tensors of a mesh");
    eval_cmd->add_option("mesh", mesh_path, "Input mesh")->required();
    material.add(*eval_cmd);
    eval_cmd->add_option("-o,--output", json_out, "JSON output (default stdout)");

    auto* check_cmd = app.add_subcommand("check", "Verify the analytic identities on a mesh");
    check_cmd->add_option("mesh", mesh_path, "Input mesh")->required();
    material.add(*check_cmd);
    check_cmd->add_option("-o,--output", json_out, "JSON output (default stdout)");

    std::string config_path, input_override, out_dir = ".";
    int max_iter = 0;
    auto* opt_cmd = app.add_subcommand("optimize", "Shape optimization of a periodic surface");
    opt_cmd->add_option("-c,--config", config_path, "TOML or JSON run configuration");
    opt_cmd->add_option("-i,--input", input_override, "Input mesh, overriding the config");
    opt_cmd->add_option("--max-iter", max_iter, "Iteration limit, overriding the config")
        ->check(CLI::PositiveNumber);
    opt_cmd->add_option("--out-dir", out_dir, "Directory for the mesh, history and summary")->capture_default_str();

    LadderOptions ladder;
    std::string surface = "ladder", table_out;
    int levels = 5;
    auto* conv_cmd = app.add_subcommand("convergence", "Refinement study of C_A on a level-set surface");
    conv_cmd->add_option("--surface", surface, "ladder, P, G, D or IWP")->capture_default_str();
    conv_cmd->add_option("--levels", levels, "Number of refinement levels")->capture_default_str();
    conv_cmd->add_option("--base-edge", ladder.base_edge, "Target edge length of the coarsest level")
        ->capture_default_str();
    conv_cmd->add_option("--ratio", ladder.ratio, "Edge length ratio between levels")->capture_default_str();
    conv_cmd->add_option("--grid", ladder.grid, "Sampling grid per axis")->capture_default_str();
    material.add(*conv_cmd);
    conv_cmd->add_option("-o,--output", table_out, "CSV output (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*gen_cmd) {
            if (plane > 0) {
                write_mesh(gen_output, flat_plane(plane).tri_mesh());
                return 0;
            }
            GeneratorConfig resolved = gen_config.empty() ? GeneratorConfig{} : load_config(gen_config).generator;
            auto given = [&](const char* name) { return gen_cmd->count(name) > 0; };
            if (given("--kind")) resolved.perturbation.base = parse_tpms(gen_kind);
            if (given("--nbar")) resolved.perturbation.frequency_cap = gen.perturbation.frequency_cap;
            if (given("--sbar")) resolved.perturbation.strength = gen.perturbation.strength;
            if (given("--seed")) resolved.perturbation.seed = gen.perturbation.seed;
            if (given("--grid")) resolved.extract.grid_n = gen.extract.grid_n;
            if (given("--target-edge")) resolved.extract.target_edge_length = gen.extract.target_edge_length;
            if (given("--remesh-iterations")) resolved.extract.remesh_iterations = gen.extract.remesh_iterations;
            if (no_project) resolved.extract.project = false;
            if (resolved.extract.grid_n < 16) throw Error(ErrorKind::InvalidArgument, "--grid must be >= 16");
            gen = resolved;
            return cmd_gen(gen, gen_output);
        }
        if (*eval_cmd) return cmd_eval(mesh_path, material, json_out);
        if (*check_cmd) return cmd_check(mesh_path, material, json_out);
        if (*opt_cmd) {
            RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
            if (!input_override.empty()) config.input = input_override;
            if (max_iter > 0) config.optimizer.max_iter = max_iter;
            return cmd_optimize(std::move(config), out_dir);
        }
        if (*conv_cmd) {
            ladder.lame = material.lame();
            ladder.scheme = parse_scheme(material.scheme);
            ladder.solver = material.solver_options();
            return cmd_convergence(surface, levels, ladder, table_out);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    }
    return 0;
}
