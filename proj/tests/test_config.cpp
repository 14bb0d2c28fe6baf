#include <gtest/gtest.h>

#include "ads/config.hpp"

using namespace ads;

namespace {

std::string error_of(std::string_view text, ConfigFormat format) {
    try {
        parse_config(text, format, "run.toml");
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Config);
        return e.what();
    }
    return "";
}

const char* kToml = R"(
input = "in.obj"

[material]
youngs_modulus = 2.0
poisson_ratio = 0.25

[objective]
kind = "component"
component = "2323"
isotropy_penalty = 0.5

[optimizer]
max_iter = 200
precondition_c = 4

[remesh]
target_edge_length = 0.08
schedule = [[0, 0.1], [50, 0.06]]

[generator]
kind = "G"
sbar = 0.3
seed = 7
)";

const char* kJson = R"({
  "input": "in.obj",
  "material": {"youngs_modulus": 2.0, "poisson_ratio": 0.25},
  "objective": {"kind": "component", "component": [2, 3, 2, 3], "isotropy_penalty": 0.5},
  "optimizer": {"max_iter": 200, "precondition_c": 4},
  "remesh": {"target_edge_length": 0.08, "schedule": [[0, 0.1], [50, 0.06]]},
  "generator": {"kind": "G", "sbar": 0.3, "seed": 7}
})";

}  // namespace

TEST(Config, DefaultsMatchReferenceConstants) {
    const RunConfig c = parse_config("", ConfigFormat::Toml);
    const OptimizerOptions& o = c.optimizer;
    EXPECT_EQ(o.line_search.alpha, 0.1);
    EXPECT_EQ(o.line_search.tau, 0.7);
    EXPECT_EQ(o.line_search.max_backtracks, 20);
    EXPECT_EQ(o.precondition_c, 1.0);
    EXPECT_EQ(o.surgery_options.curvature_threshold, 25.0);
    EXPECT_EQ(o.surgery_options.fairing_ring, 4);
    EXPECT_EQ(o.surgery_every, 4);
    EXPECT_EQ(o.min_step, 1e-4);
    EXPECT_EQ(o.min_step_count, 5);
    EXPECT_EQ(o.slope_tol, 1e-3);
    EXPECT_EQ(o.slope_window, 50);
    EXPECT_EQ(o.max_iter, 500);
    EXPECT_EQ(o.cold_start_step, 0.01);
    EXPECT_EQ(c.material.youngs_modulus, 1.0);
    EXPECT_EQ(c.material.poisson_ratio, 0.3);
    EXPECT_EQ(c.objective.kind, ObjectiveKind::Bulk);
}

TEST(Config, TomlAndJsonAgree) {
    const RunConfig t = parse_config(kToml, ConfigFormat::Toml);
    const RunConfig j = parse_config(kJson, ConfigFormat::Json);
    EXPECT_EQ(config_to_json(t), config_to_json(j));
    EXPECT_EQ(t.objective.kind, ObjectiveKind::Component);
    EXPECT_EQ(t.objective.component, (std::array<int, 4>{1, 2, 1, 2}));
    EXPECT_EQ(t.optimizer.max_iter, 200);
    EXPECT_EQ(t.optimizer.remesh_schedule.size(), 2u);
    EXPECT_EQ(t.optimizer.remesh_schedule[1], (std::pair<int, double>{50, 0.06}));
    EXPECT_EQ(t.generator.perturbation.base, TpmsKind::G);
    EXPECT_EQ(t.generator.perturbation.seed, 7u);
    EXPECT_NEAR(t.optimizer.lame.mu, 2.0 / 2.5, 1e-15);
    EXPECT_EQ(t.input, "in.obj");
}

TEST(Config, ResolvedJsonRoundTrips) {
    const RunConfig t = parse_config(kToml, ConfigFormat::Toml);
    const std::string echoed = config_to_json(t);
    EXPECT_EQ(config_to_json(parse_config(echoed, ConfigFormat::Json)), echoed);
    EXPECT_NE(echoed.find("\"armijo_tau\": 0.7"), std::string::npos);
}

TEST(Config, UnknownKeyNamesLine) {
    const std::string msg = error_of("[optimizer]\nmax_iter = 3\nmax_iters = 3\n", ConfigFormat::Toml);
    EXPECT_NE(msg.find("run.toml:3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("optimizer.max_iters"), std::string::npos) << msg;
}

TEST(Config, WrongTypeNamesLine) {
    const std::string msg = error_of("\n[surgery]\nevery = \"often\"\n", ConfigFormat::Toml);
    EXPECT_NE(msg.find("run.toml:3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("surgery.every"), std::string::npos) << msg;
}

TEST(Config, InvalidValuesRejected) {
    EXPECT_NE(error_of("[optimizer]\narmijo_tau = 1.5\n", ConfigFormat::Toml).find("armijo_tau"), std::string::npos);
    EXPECT_NE(error_of("[material]\npoisson_ratio = 0.7\n", ConfigFormat::Toml).find("run.toml:2"),
              std::string::npos);
    EXPECT_NE(error_of("[objective]\nkind = \"stiffest\"\n", ConfigFormat::Toml).find("objective.kind"),
              std::string::npos);
    EXPECT_NE(error_of("[objective]\ncomponent = \"2343\"\n", ConfigFormat::Toml).find("1..3"), std::string::npos);
    EXPECT_NE(error_of("[objective]\nstrain = [[1,2,0],[0,1,0],[0,0,1]]\n", ConfigFormat::Toml).find("symmetric"),
              std::string::npos);
    EXPECT_NE(error_of("[remesh]\ntarget_edge_length = 0.4\n", ConfigFormat::Toml).find("0.3"), std::string::npos);
    EXPECT_NE(error_of("[generator]\ngrid = 8\n", ConfigFormat::Toml).find("generator.grid"), std::string::npos);
}

TEST(Config, SyntaxErrorsNameLine) {
    const std::string toml = error_of("[optimizer]\nmax_iter = = 3\n", ConfigFormat::Toml);
    EXPECT_NE(toml.find("run.toml:2"), std::string::npos) << toml;
    const std::string json = error_of("{\n\"optimizer\": {,}\n}", ConfigFormat::Json);
    EXPECT_NE(json.find("line 2"), std::string::npos) << json;
}

TEST(Config, MissingFileIsIoError) {
    try {
        load_config("/nonexistent/run.toml");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
}

TEST(Config, ShippedExamplesLoad) {
    const RunConfig bulk = load_config(ADS_SOURCE_DIR "/configs/bulk_p.toml");
    EXPECT_EQ(bulk.objective.kind, ObjectiveKind::Bulk);
    EXPECT_EQ(bulk.optimizer.max_iter, 200);
    EXPECT_EQ(bulk.generator.perturbation.strength, 0.3);
    const RunConfig young = load_config(ADS_SOURCE_DIR "/configs/young_z.json");
    EXPECT_EQ(young.objective.kind, ObjectiveKind::DirectionalYoung);
    EXPECT_EQ(young.generator.perturbation.base, TpmsKind::G);
}
