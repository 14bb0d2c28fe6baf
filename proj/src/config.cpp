#include "ads/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#define TOML_EXCEPTIONS 1
#include <tomlplusplus/toml.hpp>

namespace ads {

using nlohmann::json;

namespace {

using LineMap = std::map<std::string, int>;

// TOML documents are converted to JSON; key paths remember their source line.
json toml_to_json(const toml::node& node, const std::string& path, LineMap& lines) {
    lines[path] = static_cast<int>(node.source().begin.line);
    if (const auto* t = node.as_table()) {
        json out = json::object();
        for (const auto& [key, value] : *t) {
            const std::string k(key.str());
            out[k] = toml_to_json(value, path.empty() ? k : path + "." + k, lines);
        }
        return out;
    }
    if (const auto* a = node.as_array()) {
        json out = json::array();
        for (std::size_t i = 0; i < a->size(); ++i)
            out.push_back(toml_to_json(*a->get(i), path + "[" + std::to_string(i) + "]", lines));
        return out;
    }
    if (const auto* v = node.as_string()) return v->get();
    if (const auto* v = node.as_integer()) return v->get();
    if (const auto* v = node.as_floating_point()) return v->get();
    if (const auto* v = node.as_boolean()) return v->get();
    throw Error(ErrorKind::Config, path + ": dates and times are not supported");
}

class Section {
public:
    Section(const json& node, std::string path, const LineMap& lines, std::string source)
        : node_(node), path_(std::move(path)), lines_(lines), source_(std::move(source)) {
        if (!node_.is_object()) fail(path_, "expected a table");
    }

    [[noreturn]] void fail(const std::string& key_path, const std::string& message) const {
        std::string where = source_;
        if (auto it = lines_.find(key_path); it != lines_.end()) where += ":" + std::to_string(it->second);
        throw Error(ErrorKind::Config, where + ": " + (key_path.empty() ? "" : key_path + ": ") + message);
    }

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const { return node_.contains(key); }

    Section section(const std::string& key) {
        seen_.insert(key);
        static const json empty = json::object();
        return Section(has(key) ? node_.at(key) : empty, key_path(key), lines_, source_);
    }

    template <class T>
    void read(const std::string& key, T& out) {
        seen_.insert(key);
        if (!has(key)) return;
        const json& v = node_.at(key);
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw std::runtime_error("expected a boolean");
            } else if constexpr (std::is_integral_v<T>) {
                if (!v.is_number_integer()) throw std::runtime_error("expected an integer");
                if constexpr (std::is_unsigned_v<T>)
                    if (v.get<long long>() < 0) throw std::runtime_error("expected a non-negative integer");
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!v.is_number()) throw std::runtime_error("expected a number");
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) throw std::runtime_error("expected a string");
            }
            out = v.get<T>();
        } catch (const std::exception& e) {
            fail(key_path(key), e.what());
        }
    }

    template <class Parse>
    void read_enum(const std::string& key, Parse parse) {
        std::string name;
        read(key, name);
        if (!has(key)) return;
        try {
            parse(name);
        } catch (const Error& e) {
            fail(key_path(key), e.what());
        }
    }

    std::vector<double> numbers(const std::string& key, std::size_t count) {
        seen_.insert(key);
        const json& v = node_.at(key);
        std::vector<double> out;
        auto take = [&](const json& x) {
            if (!x.is_number()) fail(key_path(key), "expected numbers");
            out.push_back(x.get<double>());
        };
        if (!v.is_array()) fail(key_path(key), "expected an array");
        for (const json& x : v) {
            if (x.is_array())
                for (const json& y : x) take(y);
            else
                take(x);
        }
        if (out.size() != count)
            fail(key_path(key), "expected " + std::to_string(count) + " numbers, got " + std::to_string(out.size()));
        return out;
    }

    void mark(const std::string& key) { seen_.insert(key); }

    void read_vec3(const std::string& key, Vec3& out) {
        mark(key);
        if (!has(key)) return;
        const auto v = numbers(key, 3);
        out = Vec3(v[0], v[1], v[2]);
    }

    template <int N>
    void read_matrix(const std::string& key, Eigen::Matrix<double, N, N>& out) {
        mark(key);
        if (!has(key)) return;
        const auto v = numbers(key, N * N);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) out(i, j) = v[N * i + j];
        if (!out.isApprox(out.transpose(), 1e-12)) fail(key_path(key), "matrix must be symmetric");
    }

    void require(bool ok, const std::string& key, const std::string& message) const {
        if (!ok) fail(key_path(key), message);
    }

    void finish() const {
        for (const auto& [key, value] : node_.items())
            if (!seen_.count(key)) fail(key_path(key), "unknown key");
    }

    const json& at(const std::string& key) const { return node_.at(key); }

private:
    const json& node_;
    std::string path_;
    const LineMap& lines_;
    std::string source_;
    std::set<std::string> seen_;
};

std::array<int, 4> parse_indices(Section& s, const std::string& key) {
    std::array<int, 4> out{};
    const json& v = s.at(key);
    std::vector<int> digits;
    if (v.is_string()) {
        for (char c : v.get<std::string>()) digits.push_back(c - '0');
    } else if (v.is_array()) {
        for (const json& x : v) digits.push_back(x.is_number_integer() ? x.get<int>() : -1);
    } else {
        s.fail(s.key_path(key), "expected a string such as \"2323\" or an array of four indices");
    }
    s.require(digits.size() == 4, key, "expected four indices");
    for (int i = 0; i < 4; ++i) {
        s.require(digits[i] >= 1 && digits[i] <= 3, key, "indices must lie in 1..3");
        out[i] = digits[i] - 1;
    }
    return out;
}

void read_objective(Section s, ObjectiveSpec& o) {
    s.read_enum("kind", [&](const std::string& n) { o.kind = parse_objective_kind(n); });
    s.mark("component");
    if (s.has("component")) o.component = parse_indices(s, "component");
    s.read_vec3("direction", o.direction);
    s.read_matrix<3>("strain", o.strain);
    s.read_matrix<3>("deviator", o.deviator);
    s.read_matrix<6>("weights", o.weights);
    s.read("isotropy_penalty", o.isotropy_penalty);
    s.require(std::isfinite(o.isotropy_penalty) && o.isotropy_penalty >= 0.0, "isotropy_penalty",
              "must be finite and >= 0");
    s.require(o.kind != ObjectiveKind::DirectionalYoung || o.direction.norm() > 0.0, "direction", "must be nonzero");
    s.finish();
}

void read_optimizer(Section s, OptimizerOptions& o) {
    s.read("max_iter", o.max_iter);
    s.require(o.max_iter >= 1, "max_iter", "must be >= 1");
    s.read("precondition_c", o.precondition_c);
    s.require(o.precondition_c >= 0.0, "precondition_c", "must be >= 0");
    s.read("armijo_alpha", o.line_search.alpha);
    s.require(o.line_search.alpha > 0.0 && o.line_search.alpha < 1.0, "armijo_alpha", "must lie in (0, 1)");
    s.read("armijo_tau", o.line_search.tau);
    s.require(o.line_search.tau > 0.0 && o.line_search.tau < 1.0, "armijo_tau", "must lie in (0, 1)");
    s.read("max_backtracks", o.line_search.max_backtracks);
    s.require(o.line_search.max_backtracks >= 0, "max_backtracks", "must be >= 0");
    s.read("step_factor", o.step_factor);
    s.require(o.step_factor > 0.0, "step_factor", "must be > 0");
    s.read("step_memory", o.step_memory);
    s.require(o.step_memory >= 1, "step_memory", "must be >= 1");
    s.read("cold_start_step", o.cold_start_step);
    s.require(o.cold_start_step > 0.0, "cold_start_step", "must be > 0");
    s.read("min_step", o.min_step);
    s.read("min_step_count", o.min_step_count);
    s.require(o.min_step_count >= 1, "min_step_count", "must be >= 1");
    s.read("slope_tol", o.slope_tol);
    s.read("slope_window", o.slope_window);
    s.require(o.slope_window >= 2, "slope_window", "must be >= 2");
    s.finish();
}

void read_analysis(Section s, OptimizerOptions& o) {
    s.read_enum("scheme", [&](const std::string& n) { o.scheme = parse_scheme(n); });
    s.read_enum("solver", [&](const std::string& n) { o.solver.preconditioner = parse_preconditioner(n); });
    s.read_enum("sensitivity", [&](const std::string& n) { o.sensitivity = parse_sensitivity(n); });
    s.read("tolerance", o.solver.tol_rel);
    s.require(o.solver.tol_rel > 0.0, "tolerance", "must be > 0");
    s.read("max_cg_iterations", o.solver.max_iter);
    s.require(o.solver.max_iter >= 0, "max_cg_iterations", "must be >= 0");
    s.finish();
}

void read_surgery(Section s, OptimizerOptions& o) {
    s.read("enabled", o.surgery);
    s.read("every", o.surgery_every);
    s.require(o.surgery_every >= 1, "every", "must be >= 1");
    s.read("curvature_threshold", o.surgery_options.curvature_threshold);
    s.require(o.surgery_options.curvature_threshold > 0.0, "curvature_threshold", "must be > 0");
    s.read("fairing_ring", o.surgery_options.fairing_ring);
    s.require(o.surgery_options.fairing_ring >= 0, "fairing_ring", "must be >= 0");
    s.read("fill_edge_length", o.surgery_options.fill_edge_length);
    s.finish();
}

void read_remesh(Section s, OptimizerOptions& o) {
    s.read("enabled", o.remesh);
    s.read("target_edge_length", o.remesh_target);
    s.require(o.remesh_target < 0.3, "target_edge_length", "must be below 0.3");
    s.read("sweeps", o.remesh_sweeps);
    s.require(o.remesh_sweeps >= 1, "sweeps", "must be >= 1");
    if (s.has("schedule")) {
        const json& v = s.at("schedule");
        const std::string key = s.key_path("schedule");
        if (!v.is_array()) s.fail(key, "expected an array of [iteration, target] pairs");
        o.remesh_schedule.clear();
        for (const json& p : v) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number())
                s.fail(key, "expected [iteration, target] pairs");
            const double target = p[1].get<double>();
            if (!(target > 0.0 && target < 0.3)) s.fail(key, "targets must lie in (0, 0.3)");
            o.remesh_schedule.emplace_back(p[0].get<int>(), target);
        }
    }
    s.mark("schedule");
    s.finish();
}

void read_generator(Section s, GeneratorConfig& g) {
    s.read_enum("kind", [&](const std::string& n) { g.perturbation.base = parse_tpms(n); });
    s.read("nbar", g.perturbation.frequency_cap);
    s.require(g.perturbation.frequency_cap >= 1, "nbar", "must be >= 1");
    s.read("sbar", g.perturbation.strength);
    s.require(std::isfinite(g.perturbation.strength) && g.perturbation.strength >= 0.0, "sbar", "must be >= 0");
    s.read("seed", g.perturbation.seed);
    s.read("grid", g.extract.grid_n);
    s.require(g.extract.grid_n >= 16, "grid", "must be >= 16");
    s.read("target_edge_length", g.extract.target_edge_length);
    s.require(g.extract.target_edge_length > 0.0 && g.extract.target_edge_length < 0.3, "target_edge_length",
              "must lie in (0, 0.3)");
    s.read("remesh_iterations", g.extract.remesh_iterations);
    s.require(g.extract.remesh_iterations >= 0, "remesh_iterations", "must be >= 0");
    s.read("project", g.extract.project);
    s.finish();
}

RunConfig from_json(const json& doc, const LineMap& lines, const std::string& source) {
    RunConfig c;
    Section root(doc, "", lines, source);
    {
        Section m = root.section("material");
        m.read("youngs_modulus", c.material.youngs_modulus);
        m.require(c.material.youngs_modulus > 0.0, "youngs_modulus", "must be > 0");
        m.read("poisson_ratio", c.material.poisson_ratio);
        m.require(c.material.poisson_ratio > -1.0 && c.material.poisson_ratio < 0.5, "poisson_ratio",
                  "must lie in (-1, 0.5)");
        c.optimizer.lame = c.material.lame();
        m.finish();
    }
    read_analysis(root.section("analysis"), c.optimizer);
    read_objective(root.section("objective"), c.objective);
    read_optimizer(root.section("optimizer"), c.optimizer);
    read_surgery(root.section("surgery"), c.optimizer);
    read_remesh(root.section("remesh"), c.optimizer);
    read_generator(root.section("generator"), c.generator);
    root.read("input", c.input);
    {
        Section o = root.section("output");
        o.read("mesh", c.output.mesh);
        o.read("history", c.output.history);
        o.read("summary", c.output.summary);
        o.finish();
    }
    root.finish();
    return c;
}

json matrix_json(const auto& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

RunConfig parse_config(std::string_view text, ConfigFormat format, const std::string& source) {
    LineMap lines;
    json doc;
    if (format == ConfigFormat::Toml) {
        try {
            const toml::table table = toml::parse(text, source);
            doc = toml_to_json(table, "", lines);
        } catch (const toml::parse_error& e) {
            throw Error(ErrorKind::Config, source + ":" + std::to_string(e.source().begin.line) + ": " +
                                               std::string(e.description()));
        }
    } else {
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw Error(ErrorKind::Config, source + ": " + e.what());
        }
    }
    return from_json(doc, lines, source);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const bool is_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
    return parse_config(buffer.str(), is_json ? ConfigFormat::Json : ConfigFormat::Toml, path);
}

std::string config_to_json(const RunConfig& c) {
    const OptimizerOptions& o = c.optimizer;
    const ObjectiveSpec& obj = c.objective;
    json schedule = json::array();
    for (const auto& [from, target] : o.remesh_schedule) schedule.push_back({from, target});
    std::string component;
    for (int i : obj.component) component += static_cast<char>('1' + i);
    json doc = {
        {"material", {{"youngs_modulus", c.material.youngs_modulus}, {"poisson_ratio", c.material.poisson_ratio}}},
        {"analysis",
         {{"scheme", to_string(o.scheme)},
          {"solver", to_string(o.solver.preconditioner)},
          {"sensitivity", to_string(o.sensitivity)},
          {"tolerance", o.solver.tol_rel},
          {"max_cg_iterations", o.solver.max_iter}}},
        {"objective",
         {{"kind", to_string(obj.kind)},
          {"component", component},
          {"direction", {obj.direction.x(), obj.direction.y(), obj.direction.z()}},
          {"strain", matrix_json(obj.strain)},
          {"deviator", matrix_json(obj.deviator)},
          {"weights", matrix_json(obj.weights)},
          {"isotropy_penalty", obj.isotropy_penalty}}},
        {"optimizer",
         {{"max_iter", o.max_iter},
          {"precondition_c", o.precondition_c},
          {"armijo_alpha", o.line_search.alpha},
          {"armijo_tau", o.line_search.tau},
          {"max_backtracks", o.line_search.max_backtracks},
          {"step_factor", o.step_factor},
          {"step_memory", o.step_memory},
          {"cold_start_step", o.cold_start_step},
          {"min_step", o.min_step},
          {"min_step_count", o.min_step_count},
          {"slope_tol", o.slope_tol},
          {"slope_window", o.slope_window}}},
        {"surgery",
         {{"enabled", o.surgery},
          {"every", o.surgery_every},
          {"curvature_threshold", o.surgery_options.curvature_threshold},
          {"fairing_ring", o.surgery_options.fairing_ring},
          {"fill_edge_length", o.surgery_options.fill_edge_length}}},
        {"remesh",
         {{"enabled", o.remesh},
          {"target_edge_length", o.remesh_target},
          {"sweeps", o.remesh_sweeps},
          {"schedule", schedule}}},
        {"generator",
         {{"kind", to_string(c.generator.perturbation.base)},
          {"nbar", c.generator.perturbation.frequency_cap},
          {"sbar", c.generator.perturbation.strength},
          {"seed", c.generator.perturbation.seed},
          {"grid", c.generator.extract.grid_n},
          {"target_edge_length", c.generator.extract.target_edge_length},
          {"remesh_iterations", c.generator.extract.remesh_iterations},
          {"project", c.generator.extract.project}}},
        {"input", c.input},
        {"output", {{"mesh", c.output.mesh}, {"history", c.output.history}, {"summary", c.output.summary}}},
    };
    return doc.dump(2);
}

}  // namespace ads
