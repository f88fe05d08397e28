#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace lpvet;
namespace fs = std::filesystem;

namespace {

const char* kScalarConfig = R"({
  "name": "scalar",
  "mode": "stabilize",
  "system": {"A": [[[0.9]], [[0.3]]], "B": [[[1.0]], [[0.2]]]},
  "scheduling_box": {"lower": [-1], "upper": [1]},
  "data": {"T": 12, "input_amplitude": 1000.0},
  "synthesis": {"sigma": 4, "beta": 0.2, "epsilon": 0.01},
  "trigger": {"mu": 40, "eps2": 0.001, "beta2": 0.1, "v": 0.01},
  "simulation": {"N": 100, "x0": [2.0], "delta": 0.01, "seed": 21, "trials": 20}
})";

std::string replace(std::string s, const std::string& from, const std::string& to)
{
    const auto pos = s.find(from);
    if (pos == std::string::npos) throw std::logic_error("pattern not found: " + from);
    return s.replace(pos, from.size(), to);
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name)
{
    const auto d = fs::temp_directory_path() / ("lpvet_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST(Config, ParsesExplicitSystem)
{
    const auto c = parse_config(kScalarConfig);
    EXPECT_EQ(c.system.n, 1);
    EXPECT_EQ(c.system.ell, 1);
    EXPECT_EQ(c.system.C.base(0, 0), 1.0);  // C defaults to identity
    EXPECT_EQ(c.seed, 21u);
    EXPECT_EQ(c.horizon(), 100);
}

TEST(Config, RoundTrip)
{
    for (const auto* id : {"1", "2a", "2b", "3a", "3b"}) {
        const auto c = bundled_config(id);
        const auto text = emit_config(c);
        EXPECT_EQ(emit_config(parse_config(text)), text) << id;
    }
    const auto text = emit_config(parse_config(kScalarConfig));
    EXPECT_EQ(emit_config(parse_config(text)), text);
}

TEST(Config, BundledFilesMatchBuiltIns)
{
    const std::pair<const char*, const char*> files[] = {{"1", "example1.json"},
                                                         {"2a", "example2_sine.json"},
                                                         {"2b", "example2_square.json"},
                                                         {"3a", "example3_circle.json"},
                                                         {"3b", "example3_figure8.json"}};
    for (const auto& [id, file] : files)
        EXPECT_EQ(emit_config(load_config(fs::path(LPVET_CONFIG_DIR) / file)), emit_config(bundled_config(id))) << file;
}

TEST(Config, MissingSeedIsNamed)
{
    const auto text = replace(kScalarConfig, R"(, "seed": 21)", "");
    try {
        parse_config(text, "cfg.json");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("simulation.seed"), std::string::npos) << e.what();
    }
}

TEST(Config, BetaOutOfRange)
{
    try {
        parse_config(replace(kScalarConfig, R"("beta": 0.2)", R"("beta": 1.5)"));
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("synthesis.beta"), std::string::npos) << e.what();
    }
}

TEST(Config, UnknownReference)
{
    auto c = emit_config(bundled_config("2a"));
    c = replace(c, R"("reference": "sinusoid")", R"("reference": "unknown")");
    try {
        parse_config(c);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("tracking.reference"), std::string::npos) << e.what();
    }
}

TEST(Config, MalformedJson)
{
    EXPECT_THROW(parse_config("{\"name\": ", "broken.json"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/file.json"), ConfigError);
}

TEST(Config, ShapeErrors)
{
    EXPECT_THROW(parse_config(replace(kScalarConfig, R"("x0": [2.0])", R"("x0": [2.0, 1.0])")), ConfigError);
    EXPECT_THROW(parse_config(replace(kScalarConfig, R"("lower": [-1])", R"("lower": [-1, -1])")), ConfigError);
    EXPECT_THROW(parse_config(replace(kScalarConfig, R"("A": [[[0.9]], [[0.3]]])", R"("A": [[[0.9]], [[0.3, 1]]])")),
                 ConfigError);
}

TEST(Trace, CsvHasNPlusOneRows)
{
    const auto sys = example_system(1);
    const FeedbackLaw fb = [](int, const Vec&, const Vec&) { return Vec::Zero(1); };
    auto tr = simulate(sys, fb, box_law(SchedulingBox::symmetric(2, 1), 1), ball_noise_law(2, 0.1, 2), Vec::Ones(2), 17);
    attach_lyapunov(tr, Mat::Identity(2, 2));
    const auto csv = trace_csv(tr);
    std::istringstream in(csv);
    std::string header, line;
    std::getline(in, header);
    EXPECT_EQ(header, "k,x1,x2,u1,p1,p2,w1,w2,triggered,V");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 18);

    const auto dir = scratch_dir("trace");
    emit_trace(tr, dir / "t.csv");
    EXPECT_EQ(slurp(dir / "t.csv"), csv);
}

TEST(OutDir, Resolution)
{
    EXPECT_EQ(resolve_out_dir(fs::path("/x/y"), "n"), fs::path("/x/y"));
    ::setenv("LPVET_OUT_DIR", "/tmp/envdir", 1);
    EXPECT_EQ(resolve_out_dir(std::nullopt, "n"), fs::path("/tmp/envdir/n"));
    ::unsetenv("LPVET_OUT_DIR");
    EXPECT_EQ(resolve_out_dir(std::nullopt, "n"), fs::path("out/n"));
}

TEST(Synthesize, ShortRecordStopsAtCollect)
{
    auto c = parse_config(replace(kScalarConfig, R"("T": 12)", R"("T": 3)"));
    const auto rep = cmd_synthesize(c);
    const auto* s = rep.find_stage("collect");
    ASSERT_NE(s, nullptr);
    EXPECT_EQ(s->status, StageStatus::Failed);
    EXPECT_NE(s->detail.find("insufficient data length"), std::string::npos);
    EXPECT_EQ(rep.find_stage("stabilization_synthesis")->status, StageStatus::Skipped);
    EXPECT_EQ(exit_code(rep), 1);
}

TEST(Synthesize, ScalarPipelineEndToEnd)
{
    const auto dir = scratch_dir("synth");
    RunOptions o;
    o.out_dir = dir;
    const auto rep = cmd_synthesize(parse_config(kScalarConfig), o);
    for (const auto& s : rep.stages) EXPECT_EQ(s.status, StageStatus::Ok) << s.name << ": " << s.detail;
    for (const auto& c : rep.checks) EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;
    EXPECT_EQ(exit_code(rep), 0);
    // every stage reported exactly once
    EXPECT_EQ(rep.stages.size(), 6u);
    for (const auto* f : {"report.json", "experiment.csv", "noise_free.csv", "event_triggered.csv"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    EXPECT_NE(slurp(dir / "report.json").find("\"stabilization_synthesis\""), std::string::npos);
}

TEST(Synthesize, SeedOverrideIsDeterministic)
{
    const auto a = scratch_dir("det_a"), b = scratch_dir("det_b");
    RunOptions o;
    o.seed = 5;
    o.out_dir = a;
    cmd_synthesize(parse_config(kScalarConfig), o);
    o.out_dir = b;
    cmd_synthesize(parse_config(kScalarConfig), o);
    for (const auto* f : {"experiment.csv", "event_triggered.csv"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(Synthesize, RejectsTrackingConfig)
{
    EXPECT_THROW(cmd_synthesize(bundled_config("2a")), ConfigError);
    EXPECT_THROW(cmd_track(bundled_config("1")), ConfigError);
}

TEST(Reproduce, UnknownId)
{
    EXPECT_THROW(bundled_config("4"), ConfigError);
}
