#pragma once
/**
 * @file harness.hpp
 * @brief Run configuration, stage-by-stage pipelines for stabilization and tracking, report and trace output.
 */

#include "lpvet/tracking.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>

namespace lpvet {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrackingBlock {
    ReferenceKind kind = ReferenceKind::Sinusoid;
    double amplitude = 1.0;
    double period = 0.0;  // samples; 0 means a quarter of the horizon
    std::optional<double> delta_hat;  // unset: derived from delta and the reference
    double sigma = 4.0;
    double beta = 0.2;
    double epsilon = 0.01;
    double mu = 9.0;
    double eps4 = 0.001;
    std::optional<double> beta4;  // unset: beta / 2
    double v = 20.0;
    std::optional<double> rms_ceiling;

    double beta4_value() const { return beta4 ? *beta4 : beta / 2.0; }
};

struct RunConfig {
    std::string name;
    std::string mode = "stabilize";  // or "track"
    std::string builtin;             // example1 | example2 | example3, empty for explicit matrices
    LpvSystem system;
    SchedulingBox box;

    std::optional<int> T;  // unset: minimum data length
    bool pe_check = true;
    double input_amplitude = 1.0;

    SynthesisConfig synth;
    double mu = 40.0, eps2 = 0.001, beta2 = 0.1, v = 0.01;
    std::optional<TrackingBlock> tracking;

    std::optional<int> N;
    std::optional<double> horizon_s;
    Vec x0;
    double delta = 0.1;
    std::uint64_t seed = 0;
    int trials = 100;
    int trial_steps = 50;
    int decay_steps = 500;
    double k_step = 0.01;

    double solver_tol = 1e-7;
    int solver_max_iters = 200000;
    double solver_time_limit_s = 600.0;

    int horizon() const;
    int data_length() const;
    void validate() const;
};

LpvSystem builtin_system(const std::string& name);

RunConfig parse_config(const std::string& text, const std::string& origin = "<string>");
RunConfig load_config(const std::filesystem::path& path);
std::string emit_config(const RunConfig& cfg);

enum class StageStatus { Ok, Failed, Skipped };
const char* to_string(StageStatus s);

struct StageRecord {
    std::string name;
    StageStatus status = StageStatus::Skipped;
    std::string detail;
};

struct CheckRecord {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct RunReport {
    std::string name, mode;
    std::vector<StageRecord> stages;
    std::vector<CheckRecord> checks;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::pair<std::string, Mat>> matrices;
    std::vector<std::string> trace_files;

    int rank = -1, rank_target = -1, data_length = 0;
    double pe_margin = 0.0;

    void stage(const std::string& name, StageStatus s, const std::string& detail = {});
    void check(const std::string& name, bool pass, const std::string& detail = {});
    void metric(const std::string& name, double value);
    std::optional<double> metric_value(const std::string& name) const;
    const StageRecord* find_stage(const std::string& name) const;
    const CheckRecord* find_check(const std::string& name) const;
    bool all_ok() const;
    std::string to_json() const;
};

/// CSV with header k,x1..xn,u1..um,p1..pl,w1..wn,triggered,V and N+1 rows; the last row
/// carries only k and the state (and V when attached).
void emit_trace(const SimulationTrace& tr, const std::filesystem::path& path);
std::string trace_csv(const SimulationTrace& tr);

struct RunOptions {
    std::filesystem::path out_dir;  // empty: no files written
    std::optional<std::uint64_t> seed;
    std::optional<double> solver_tol;
};

/// Output directory: explicit value, else $LPVET_OUT_DIR/<name>, else ./out/<name>.
std::filesystem::path resolve_out_dir(const std::optional<std::filesystem::path>& explicit_dir,
                                      const std::string& name);

RunReport cmd_synthesize(RunConfig cfg, const RunOptions& opts = {});
RunReport cmd_track(RunConfig cfg, const RunOptions& opts = {});

/// Ids 1, 2a, 2b, 3a, 3b.
RunConfig bundled_config(const std::string& id);
/// Runs the bundled configuration and appends the example's acceptance checks.
RunReport cmd_reproduce(const std::string& id, const RunOptions& opts = {});

/// 0 all checks pass, 1 infeasible stage or failed check.
int exit_code(const RunReport& r);

}  // namespace lpvet
