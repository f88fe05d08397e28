#include "lpvet/harness.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace lpvet {

using json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------- json helpers

[[noreturn]] void fail(const std::string& origin, const std::string& field, const std::string& msg)
{
    throw ConfigError(origin + ": field \"" + field + "\": " + msg);
}

struct Reader {
    const std::string& origin;

    const json& require(const json& obj, const char* key, const std::string& path) const
    {
        if (!obj.is_object() || !obj.contains(key)) fail(origin, path + key, "missing required field");
        return obj.at(key);
    }

    double number(const json& j, const std::string& path) const
    {
        if (!j.is_number()) fail(origin, path, "expected a number");
        return j.get<double>();
    }

    double number_or(const json& obj, const char* key, const std::string& path, double dflt) const
    {
        return obj.contains(key) ? number(obj.at(key), path + key) : dflt;
    }

    int integer(const json& j, const std::string& path) const
    {
        if (!j.is_number_integer()) fail(origin, path, "expected an integer");
        return j.get<int>();
    }

    Vec vec(const json& j, const std::string& path) const
    {
        if (!j.is_array()) fail(origin, path, "expected an array of numbers");
        Vec v(j.size());
        for (size_t i = 0; i < j.size(); ++i) v(i) = number(j[i], path + "[" + std::to_string(i) + "]");
        return v;
    }

    Mat mat(const json& j, const std::string& path) const
    {
        if (!j.is_array() || j.empty()) fail(origin, path, "expected a non-empty array of rows");
        const size_t cols = j[0].is_array() ? j[0].size() : 0;
        Mat M(j.size(), cols);
        for (size_t r = 0; r < j.size(); ++r) {
            const std::string rp = path + "[" + std::to_string(r) + "]";
            if (!j[r].is_array() || j[r].size() != cols) fail(origin, rp, "rows must be arrays of equal length");
            for (size_t c = 0; c < cols; ++c) M(r, c) = number(j[r][c], rp + "[" + std::to_string(c) + "]");
        }
        return M;
    }

    AffineMatrixFunction affine(const json& j, const std::string& path) const
    {
        if (!j.is_array() || j.empty()) fail(origin, path, "expected [M0, M1, ..., Ml]");
        Mat base = mat(j[0], path + "[0]");
        std::vector<Mat> coeffs;
        for (size_t i = 1; i < j.size(); ++i) {
            coeffs.push_back(mat(j[i], path + "[" + std::to_string(i) + "]"));
            if (coeffs.back().rows() != base.rows() || coeffs.back().cols() != base.cols())
                fail(origin, path + "[" + std::to_string(i) + "]", "shape differs from the constant term");
        }
        return {std::move(base), std::move(coeffs)};
    }
};

json to_json(const Vec& v)
{
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json to_json(const Mat& M)
{
    json a = json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        a.push_back(std::move(row));
    }
    return a;
}

json to_json(const AffineMatrixFunction& f)
{
    json a = json::array();
    a.push_back(to_json(f.base));
    for (const auto& c : f.coeffs) a.push_back(to_json(c));
    return a;
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_short(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- built-in systems

Mat m1(double a)
{
    return Mat::Constant(1, 1, a);
}

}  // namespace

LpvSystem builtin_system(const std::string& name)
{
    if (name == "example1") {
        Mat A0(2, 2), A1(2, 2), B0(2, 1), B1(2, 1);
        A0 << 0.2485, -1.0355, 0.8910, 0.4065;
        A1 << -0.0063, -0.0938, 0.0, 0.0188;
        B0 << 0.3190, -1.3080;
        B1 << 0.3000, 1.4000;
        return LpvSystem::state_output({A0, {A1, A1}}, {B0, {B1, Mat::Zero(2, 1)}});
    }
    if (name == "example2") {
        return LpvSystem({m1(0.3023), {m1(0.5469)}}, {m1(0.9902), {m1(0.6914)}}, {m1(0.1885), {m1(0.0997)}},
                         {m1(0.9672), {m1(0.0470)}});
    }
    if (name == "example3") {
        Mat C0(2, 1), C1(2, 1), B0(1, 2), B1(1, 2), D0(2, 2), D1(2, 2);
        C0 << 0.2466, 0.3765;
        C1 << 0.8401, 0.8190;
        B0 << 0.5450, 0.2260;
        B1 << 0.5289, 0.2227;
        D0 << 0.6290, 0.0160, 0.9022, 0.9636;
        D1 << 0.2676, 0.8512, 0.7303, 0.4969;
        return LpvSystem({m1(0.5387), {m1(0.8871)}}, {B0, {B1}}, {C0, {C1}}, {D0, {D1}});
    }
    throw ConfigError("unknown built-in system: " + name);
}

// ---------------------------------------------------------------- RunConfig

int RunConfig::horizon() const
{
    if (N) return *N;
    if (horizon_s) return static_cast<int>(std::lround(*horizon_s / k_step));
    return 0;
}

int RunConfig::data_length() const
{
    if (T) return *T;
    const int nn = mode == "track" ? system.n + system.r : system.n;
    return min_data_length(nn, system.m, system.ell);
}

void RunConfig::validate() const
{
    auto bad = [&](const std::string& field, const std::string& msg) { fail(name.empty() ? "config" : name, field, msg); };
    if (mode != "stabilize" && mode != "track") bad("mode", "expected \"stabilize\" or \"track\"");
    if (system.n < 1 || system.m < 1) bad("system", "empty system");
    if (box.ell() != system.ell) bad("scheduling_box", "dimension differs from the number of scheduling terms");
    for (int i = 0; i < box.ell(); ++i)
        if (!(box.lower(i) <= box.upper(i))) bad("scheduling_box", "lower bound above upper bound");
    if (T && *T < 1) bad("data.T", "must be positive");
    if (!(input_amplitude > 0.0)) bad("data.input_amplitude", "must be positive");
    if (!(synth.sigma > 1.0)) bad("synthesis.sigma", "must exceed 1");
    if (!(synth.beta > 0.0 && synth.beta < 1.0)) bad("synthesis.beta", "must lie in (0, 1)");
    if (!(synth.epsilon > 0.0)) bad("synthesis.epsilon", "must be positive");
    if (!(synth.trace_lo > 0.0 && synth.trace_lo <= synth.trace_hi)) bad("synthesis.trace_lo", "need 0 < trace_lo <= trace_hi");
    if (!(mu > 0.0)) bad("trigger.mu", "must be positive");
    if (!(eps2 > 0.0)) bad("trigger.eps2", "must be positive");
    if (!(beta2 > 0.0 && beta2 < 1.0)) bad("trigger.beta2", "must lie in (0, 1)");
    if (!(v > 0.0)) bad("trigger.v", "must be positive");
    if (!(delta >= 0.0)) bad("simulation.delta", "must be nonnegative");
    if (!(k_step > 0.0)) bad("k_step", "must be positive");
    if (horizon() < 1) bad("simulation.N", "horizon must be at least one step");
    if (trials < 0 || trial_steps < 1 || decay_steps < 1) bad("simulation", "trial counts must be positive");
    if (!(solver_tol > 0.0)) bad("solver.tol", "must be positive");
    if (solver_max_iters < 1) bad("solver.max_iters", "must be positive");
    if (mode == "track") {
        if (!tracking) bad("tracking", "required in track mode");
        const auto& t = *tracking;
        if (system.r < 1) bad("system", "tracking needs an output");
        const int want = (t.kind == ReferenceKind::Circle || t.kind == ReferenceKind::Figure8) ? 2 : 1;
        if (t.kind != ReferenceKind::Custom && system.r != want)
            bad("tracking.reference", std::string(to_string(t.kind)) + " needs " + std::to_string(want) + " outputs");
        if (!(t.sigma > 1.0)) bad("tracking.sigma", "must exceed 1");
        if (!(t.beta > 0.0 && t.beta < 1.0)) bad("tracking.beta", "must lie in (0, 1)");
        if (!(t.epsilon > 0.0)) bad("tracking.epsilon", "must be positive");
        if (!(t.mu > 0.0)) bad("tracking.mu", "must be positive");
        if (!(t.eps4 > 0.0)) bad("tracking.eps4", "must be positive");
        if (!(t.beta4_value() > 0.0 && t.beta4_value() < 1.0)) bad("tracking.beta4", "must lie in (0, 1)");
        if (!(t.v > 0.0)) bad("tracking.v", "must be positive");
        if (!(t.amplitude >= 0.0)) bad("tracking.amplitude", "must be nonnegative");
        if (!(t.period >= 0.0)) bad("tracking.period", "must be nonnegative");
        if (t.delta_hat && !(*t.delta_hat >= 0.0)) bad("tracking.delta_hat", "must be nonnegative");
        if (x0.size() != system.n + system.r) bad("simulation.x0", "length must be n + r in track mode");
    } else if (x0.size() != system.n) {
        bad("simulation.x0", "length must equal n");
    }
}

RunConfig parse_config(const std::string& text, const std::string& origin)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": malformed JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError(origin + ": top level must be an object");
    const Reader rd{origin};
    RunConfig c;
    if (j.contains("name")) c.name = j["name"].get<std::string>();
    if (j.contains("mode")) {
        if (!j["mode"].is_string()) fail(origin, "mode", "expected a string");
        c.mode = j["mode"].get<std::string>();
    }

    const json& sys = rd.require(j, "system", "");
    if (sys.contains("builtin")) {
        c.builtin = sys["builtin"].get<std::string>();
        try {
            c.system = builtin_system(c.builtin);
        } catch (const ConfigError& e) {
            fail(origin, "system.builtin", e.what());
        }
    } else {
        auto A = rd.affine(rd.require(sys, "A", "system."), "system.A");
        auto B = rd.affine(rd.require(sys, "B", "system."), "system.B");
        try {
            if (sys.contains("C") || sys.contains("D")) {
                auto C = rd.affine(rd.require(sys, "C", "system."), "system.C");
                auto D = rd.affine(rd.require(sys, "D", "system."), "system.D");
                c.system = LpvSystem(A, B, C, D);
            } else {
                c.system = LpvSystem::state_output(A, B);
            }
        } catch (const std::exception& e) {
            fail(origin, "system", e.what());
        }
    }

    const json& bx = rd.require(j, "scheduling_box", "");
    Vec lo = rd.vec(rd.require(bx, "lower", "scheduling_box."), "scheduling_box.lower");
    Vec hi = rd.vec(rd.require(bx, "upper", "scheduling_box."), "scheduling_box.upper");
    if (lo.size() != hi.size()) fail(origin, "scheduling_box", "lower and upper differ in length");
    c.box = SchedulingBox(lo, hi);

    if (j.contains("data")) {
        const json& d = j["data"];
        if (d.contains("T") && !(d["T"].is_string() && d["T"] == "auto")) c.T = rd.integer(d["T"], "data.T");
        if (d.contains("pe_check")) c.pe_check = d["pe_check"].get<bool>();
        c.input_amplitude = rd.number_or(d, "input_amplitude", "data.", c.input_amplitude);
    }
    if (j.contains("synthesis")) {
        const json& s = j["synthesis"];
        c.synth.sigma = rd.number_or(s, "sigma", "synthesis.", c.synth.sigma);
        c.synth.beta = rd.number_or(s, "beta", "synthesis.", c.synth.beta);
        c.synth.epsilon = rd.number_or(s, "epsilon", "synthesis.", c.synth.epsilon);
        c.synth.trace_lo = rd.number_or(s, "trace_lo", "synthesis.", c.synth.trace_lo);
        c.synth.trace_hi = rd.number_or(s, "trace_hi", "synthesis.", c.synth.trace_hi);
        c.synth.margin = rd.number_or(s, "margin", "synthesis.", c.synth.margin);
        if (s.contains("w_known")) c.synth.w_known = s["w_known"].get<bool>();
    }
    if (j.contains("trigger")) {
        const json& t = j["trigger"];
        c.mu = rd.number_or(t, "mu", "trigger.", c.mu);
        c.eps2 = rd.number_or(t, "eps2", "trigger.", c.eps2);
        c.beta2 = rd.number_or(t, "beta2", "trigger.", c.beta2);
        c.v = rd.number_or(t, "v", "trigger.", c.v);
    }
    if (j.contains("tracking")) {
        const json& t = j["tracking"];
        TrackingBlock tb;
        try {
            tb.kind = parse_reference_kind(rd.require(t, "reference", "tracking.").get<std::string>());
        } catch (const std::invalid_argument& e) {
            fail(origin, "tracking.reference", e.what());
        }
        if (tb.kind == ReferenceKind::Custom) fail(origin, "tracking.reference", "custom references are not configurable");
        tb.amplitude = rd.number_or(t, "amplitude", "tracking.", tb.amplitude);
        tb.period = rd.number_or(t, "period", "tracking.", tb.period);
        if (t.contains("delta_hat") && !(t["delta_hat"].is_string() && t["delta_hat"] == "auto"))
            tb.delta_hat = rd.number(t["delta_hat"], "tracking.delta_hat");
        tb.sigma = rd.number_or(t, "sigma", "tracking.", tb.sigma);
        tb.beta = rd.number_or(t, "beta", "tracking.", tb.beta);
        tb.epsilon = rd.number_or(t, "epsilon", "tracking.", tb.epsilon);
        tb.mu = rd.number_or(t, "mu", "tracking.", tb.mu);
        tb.eps4 = rd.number_or(t, "eps4", "tracking.", tb.eps4);
        if (t.contains("beta4")) tb.beta4 = rd.number(t["beta4"], "tracking.beta4");
        tb.v = rd.number_or(t, "v", "tracking.", tb.v);
        if (t.contains("rms_ceiling")) tb.rms_ceiling = rd.number(t["rms_ceiling"], "tracking.rms_ceiling");
        c.tracking = tb;
    }

    const json& sim = rd.require(j, "simulation", "");
    if (sim.contains("N")) c.N = rd.integer(sim["N"], "simulation.N");
    if (sim.contains("horizon_s")) c.horizon_s = rd.number(sim["horizon_s"], "simulation.horizon_s");
    c.x0 = rd.vec(rd.require(sim, "x0", "simulation."), "simulation.x0");
    c.delta = rd.number_or(sim, "delta", "simulation.", c.delta);
    const json& seed = rd.require(sim, "seed", "simulation.");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0))
        fail(origin, "simulation.seed", "expected a nonnegative integer");
    c.seed = seed.get<std::uint64_t>();
    if (sim.contains("trials")) c.trials = rd.integer(sim["trials"], "simulation.trials");
    if (sim.contains("trial_steps")) c.trial_steps = rd.integer(sim["trial_steps"], "simulation.trial_steps");
    if (sim.contains("decay_steps")) c.decay_steps = rd.integer(sim["decay_steps"], "simulation.decay_steps");

    c.k_step = rd.number_or(j, "k_step", "", c.k_step);
    if (j.contains("solver")) {
        const json& s = j["solver"];
        c.solver_tol = rd.number_or(s, "tol", "solver.", c.solver_tol);
        if (s.contains("max_iters")) c.solver_max_iters = rd.integer(s["max_iters"], "solver.max_iters");
        c.solver_time_limit_s = rd.number_or(s, "time_limit_s", "solver.", c.solver_time_limit_s);
    }
    c.synth.delta = c.delta;
    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

std::string emit_config(const RunConfig& c)
{
    json j;
    j["name"] = c.name;
    j["mode"] = c.mode;
    if (!c.builtin.empty()) {
        j["system"] = {{"builtin", c.builtin}};
    } else {
        j["system"] = {{"A", to_json(c.system.A)}, {"B", to_json(c.system.B)}, {"C", to_json(c.system.C)},
                       {"D", to_json(c.system.D)}};
    }
    j["scheduling_box"] = {{"lower", to_json(c.box.lower)}, {"upper", to_json(c.box.upper)}};
    json d;
    if (c.T) d["T"] = *c.T;
    else d["T"] = "auto";
    d["pe_check"] = c.pe_check;
    d["input_amplitude"] = c.input_amplitude;
    j["data"] = d;
    j["synthesis"] = {{"sigma", c.synth.sigma},       {"beta", c.synth.beta},         {"epsilon", c.synth.epsilon},
                      {"trace_lo", c.synth.trace_lo}, {"trace_hi", c.synth.trace_hi}, {"margin", c.synth.margin},
                      {"w_known", c.synth.w_known}};
    j["trigger"] = {{"mu", c.mu}, {"eps2", c.eps2}, {"beta2", c.beta2}, {"v", c.v}};
    if (c.tracking) {
        const auto& t = *c.tracking;
        json tj;
        tj["reference"] = to_string(t.kind);
        tj["amplitude"] = t.amplitude;
        tj["period"] = t.period;
        if (t.delta_hat) tj["delta_hat"] = *t.delta_hat;
        else tj["delta_hat"] = "auto";
        tj["sigma"] = t.sigma;
        tj["beta"] = t.beta;
        tj["epsilon"] = t.epsilon;
        tj["mu"] = t.mu;
        tj["eps4"] = t.eps4;
        if (t.beta4) tj["beta4"] = *t.beta4;
        tj["v"] = t.v;
        if (t.rms_ceiling) tj["rms_ceiling"] = *t.rms_ceiling;
        j["tracking"] = tj;
    }
    json s;
    if (c.N) s["N"] = *c.N;
    if (c.horizon_s) s["horizon_s"] = *c.horizon_s;
    s["x0"] = to_json(c.x0);
    s["delta"] = c.delta;
    s["seed"] = c.seed;
    s["trials"] = c.trials;
    s["trial_steps"] = c.trial_steps;
    s["decay_steps"] = c.decay_steps;
    j["simulation"] = s;
    j["k_step"] = c.k_step;
    j["solver"] = {{"tol", c.solver_tol}, {"max_iters", c.solver_max_iters}, {"time_limit_s", c.solver_time_limit_s}};
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------- report

const char* to_string(StageStatus s)
{
    switch (s) {
    case StageStatus::Ok: return "ok";
    case StageStatus::Failed: return "failed";
    case StageStatus::Skipped: return "skipped";
    }
    return "skipped";
}

void RunReport::stage(const std::string& n, StageStatus s, const std::string& detail)
{
    for (auto& st : stages)
        if (st.name == n) {
            st.status = s;
            st.detail = detail;
            return;
        }
    stages.push_back({n, s, detail});
}

void RunReport::check(const std::string& n, bool pass, const std::string& detail)
{
    checks.push_back({n, pass, detail});
}

void RunReport::metric(const std::string& n, double value)
{
    metrics.emplace_back(n, value);
}

std::optional<double> RunReport::metric_value(const std::string& n) const
{
    for (const auto& [k, v] : metrics)
        if (k == n) return v;
    return std::nullopt;
}

const StageRecord* RunReport::find_stage(const std::string& n) const
{
    for (const auto& s : stages)
        if (s.name == n) return &s;
    return nullptr;
}

const CheckRecord* RunReport::find_check(const std::string& n) const
{
    for (const auto& c : checks)
        if (c.name == n) return &c;
    return nullptr;
}

bool RunReport::all_ok() const
{
    for (const auto& s : stages)
        if (s.status != StageStatus::Ok) return false;
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string RunReport::to_json() const
{
    json j;
    j["name"] = name;
    j["mode"] = mode;
    j["data_length"] = data_length;
    j["rank"] = rank;
    j["rank_target"] = rank_target;
    j["pe_margin"] = pe_margin;
    json st = json::array();
    for (const auto& s : stages) st.push_back({{"stage", s.name}, {"status", lpvet::to_string(s.status)}, {"detail", s.detail}});
    j["stages"] = st;
    json ck = json::array();
    for (const auto& c : checks) ck.push_back({{"check", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["checks"] = ck;
    json mt = json::object();
    for (const auto& [k, v] : metrics) mt[k] = std::isfinite(v) ? json(v) : json(nullptr);
    j["metrics"] = mt;
    json mx = json::object();
    for (const auto& [k, M] : matrices) mx[k] = lpvet::to_json(M);
    j["matrices"] = mx;
    j["traces"] = trace_files;
    j["pass"] = all_ok();
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------- traces

std::string trace_csv(const SimulationTrace& tr)
{
    if (tr.x.size() != static_cast<size_t>(tr.N) + 1) throw std::invalid_argument("trace_csv: x must hold N+1 states");
    const int n = static_cast<int>(tr.x.front().size());
    const int m = tr.u.empty() ? 0 : static_cast<int>(tr.u.front().size());
    const int l = tr.p.empty() ? 0 : static_cast<int>(tr.p.front().size());
    const bool hasV = tr.V.size() == tr.x.size();
    std::string out = "k";
    for (int i = 1; i <= n; ++i) out += ",x" + std::to_string(i);
    for (int i = 1; i <= m; ++i) out += ",u" + std::to_string(i);
    for (int i = 1; i <= l; ++i) out += ",p" + std::to_string(i);
    for (int i = 1; i <= n; ++i) out += ",w" + std::to_string(i);
    out += ",triggered,V\n";
    for (int k = 0; k <= tr.N; ++k) {
        out += std::to_string(k);
        for (int i = 0; i < n; ++i) out += "," + fmt(tr.x[k](i));
        const bool last = k == tr.N;
        for (int i = 0; i < m; ++i) out += last ? "," : "," + fmt(tr.u[k](i));
        for (int i = 0; i < l; ++i) out += last ? "," : "," + fmt(tr.p[k](i));
        for (int i = 0; i < n; ++i) out += last ? "," : "," + fmt(tr.w[k](i));
        out += ",";
        if (!last && k < static_cast<int>(tr.triggered.size())) out += tr.triggered[k] ? "1" : "0";
        out += ",";
        if (hasV) out += fmt(tr.V[k]);
        out += "\n";
    }
    return out;
}

void emit_trace(const SimulationTrace& tr, const std::filesystem::path& path)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << trace_csv(tr);
}

std::filesystem::path resolve_out_dir(const std::optional<std::filesystem::path>& explicit_dir, const std::string& name)
{
    if (explicit_dir && !explicit_dir->empty()) return *explicit_dir;
    if (const char* env = std::getenv("LPVET_OUT_DIR"); env && *env) return std::filesystem::path(env) / name;
    return std::filesystem::path("out") / name;
}

int exit_code(const RunReport& r)
{
    return r.all_ok() ? 0 : 1;
}

// ---------------------------------------------------------------- pipelines

namespace {

constexpr std::uint64_t kInputSeed = 0, kScheduleSeed = 1, kNoiseSeed = 2, kStateSeed = 3, kSimScheduleSeed = 10,
                        kSimNoiseSeed = 11, kTrialSeed = 100;

void apply_options(RunConfig& cfg, const RunOptions& opts)
{
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.solver_tol) cfg.solver_tol = *opts.solver_tol;
    cfg.synth.delta = cfg.delta;
    cfg.validate();
}

sdp::SolverOptions solver_options(const RunConfig& cfg)
{
    sdp::SolverOptions o;
    o.tol = cfg.solver_tol;
    o.max_iters = cfg.solver_max_iters;
    o.time_limit_s = cfg.solver_time_limit_s;
    return o;
}

SimulationTrace experiment_trace(const ExperimentData& d)
{
    SimulationTrace tr;
    tr.N = d.T;
    for (int k = 0; k < d.T; ++k) {
        tr.x.push_back(d.X.col(k));
        tr.u.push_back(d.U.col(k));
        tr.p.push_back(d.p[k]);
        tr.w.push_back(d.W.col(k));
        tr.triggered.push_back(false);
    }
    tr.x.push_back(d.Xplus.col(d.T - 1));
    return tr;
}

void write_outputs(RunReport& rep, const RunOptions& opts, const std::vector<std::pair<std::string, SimulationTrace>>& traces)
{
    if (opts.out_dir.empty()) return;
    std::filesystem::create_directories(opts.out_dir);
    for (const auto& [file, tr] : traces) {
        emit_trace(tr, opts.out_dir / file);
        rep.trace_files.push_back((opts.out_dir / file).string());
    }
    std::ofstream f(opts.out_dir / "report.json", std::ios::binary);
    f << rep.to_json();
}

void add_gains(RunReport& rep, const AffineMatrixFunction& K)
{
    rep.matrices.emplace_back("K0", K.base);
    for (size_t i = 0; i < K.coeffs.size(); ++i) rep.matrices.emplace_back("K" + std::to_string(i + 1), K.coeffs[i]);
}

std::string solver_detail(const sdp::Solution& s, bool plug_ok, const std::string& plug_failure)
{
    std::string d = std::string(sdp::to_string(s.status)) + ", " + std::to_string(s.iterations) + " iterations, " +
                    fmt_short(s.seconds) + " s";
    if (!s.message.empty()) d += ", " + s.message;
    if (s.status == sdp::Status::Feasible) d += plug_ok ? ", plug-in check passed" : ", plug-in check failed: " + plug_failure;
    return d;
}

/// Collect, excitation check. Returns false when the pipeline cannot continue.
bool data_stage(RunReport& rep, const RunConfig& cfg, const ExperimentData& d, int nn)
{
    rep.data_length = d.T;
    const int minT = min_data_length(nn, cfg.system.m, cfg.system.ell);
    if (cfg.pe_check && d.T < minT) {
        rep.stage("collect", StageStatus::Failed,
                  "insufficient data length: T = " + std::to_string(d.T) + " < " + std::to_string(minT));
        return false;
    }
    rep.stage("collect", StageStatus::Ok, "T = " + std::to_string(d.T) + " (minimum " + std::to_string(minT) + ")");
    rep.rank = regressor_rank(d);
    rep.rank_target = (1 + cfg.system.ell) * (nn + cfg.system.m);
    std::vector<Vec> useq, pseq;
    for (int k = 0; k < d.T; ++k) {
        useq.push_back(d.U.col(k));
        pseq.push_back(d.p[k]);
    }
    const int L = (1 + cfg.system.ell) * nn + 1;
    rep.pe_margin = L <= d.T ? theta_pe_margin(useq, pseq, L) : 0.0;
    rep.metric("pe_margin", rep.pe_margin);
    const std::string detail = "rank " + std::to_string(rep.rank) + " of " + std::to_string(rep.rank_target);
    if (cfg.pe_check && rep.rank < rep.rank_target) {
        rep.stage("pe_check", StageStatus::Failed, "insufficient excitation: " + detail);
        return false;
    }
    rep.stage("pe_check", cfg.pe_check ? StageStatus::Ok : StageStatus::Skipped, detail);
    return true;
}

void skip_rest(RunReport& rep, const std::vector<std::string>& names)
{
    for (const auto& n : names)
        if (!rep.find_stage(n)) rep.stage(n, StageStatus::Skipped, "previous stage failed");
}

}  // namespace

RunReport cmd_synthesize(RunConfig cfg, const RunOptions& opts)
{
    apply_options(cfg, opts);
    if (cfg.mode != "stabilize") throw ConfigError(cfg.name + ": field \"mode\": synthesize needs \"stabilize\"");
    RunReport rep;
    rep.name = cfg.name;
    rep.mode = cfg.mode;
    const std::vector<std::string> order{"collect", "pe_check", "stabilization_synthesis", "closed_loop_verification",
                                         "trigger_synthesis", "event_triggered_simulation"};
    std::vector<std::pair<std::string, SimulationTrace>> traces;
    const auto& sys = cfg.system;
    const std::uint64_t s0 = cfg.seed;

    const int T = cfg.data_length();
    const Vec xe = uniform_law(sys.n, -1.0, 1.0, s0 + kStateSeed)(0);
    const ExperimentData d = collect(sys, T, uniform_law(sys.m, -cfg.input_amplitude, cfg.input_amplitude, s0 + kInputSeed),
                                     box_law(cfg.box, s0 + kScheduleSeed), ball_noise_law(sys.n, cfg.delta, s0 + kNoiseSeed),
                                     xe, cfg.delta);
    traces.emplace_back("experiment.csv", experiment_trace(d));
    if (!data_stage(rep, cfg, d, sys.n)) {
        skip_rest(rep, order);
        write_outputs(rep, opts, traces);
        return rep;
    }

    const auto opt = solver_options(cfg);
    auto t0 = std::chrono::steady_clock::now();
    const auto sp = build_synthesis_program(d, cfg.box, cfg.synth);
    const auto sol = solve_synthesis(sp, opt);
    rep.metric("synthesis_seconds", seconds_since(t0));
    const bool feasible = sol.status == sdp::Status::Feasible && sol.plug_in_ok;
    rep.stage("stabilization_synthesis", feasible ? StageStatus::Ok : StageStatus::Failed,
              solver_detail(sol.raw, sol.plug_in_ok, sol.plug_in_failure));
    if (!feasible) {
        skip_rest(rep, order);
        write_outputs(rep, opts, traces);
        return rep;
    }
    rep.matrices.emplace_back("P", sol.P);
    add_gains(rep, sol.K);

    const auto cl = verify_closed_loop(sys, sol.K, sol.P, cfg.box, cfg.synth.beta, cfg.synth.sigma, cfg.delta, cfg.trials,
                                       cfg.trial_steps, s0 + kTrialSeed);
    for (size_t i = 0; i < cl.vertex_radii.size(); ++i) rep.metric("vertex_radius_" + std::to_string(i), cl.vertex_radii[i]);
    rep.check("vertex_spectral_radius_below_one", cl.vertices_stable);
    rep.check("lyapunov_decrease", cl.decrease_ok,
              cl.decrease_ok ? "worst slack " + fmt_short(cl.worst_slack)
                             : "trial " + std::to_string(cl.first_violation_trial) + " step " +
                                   std::to_string(cl.first_violation_step));
    const FeedbackLaw fb = [&](int, const Vec& x, const Vec& p) { return Vec(eval_affine(sol.K, p) * x); };
    auto decay = simulate(sys, fb, box_law(cfg.box, s0 + kSimScheduleSeed), zero_law(sys.n), cfg.x0, cfg.decay_steps);
    const double ratio = decay.x.back().norm() / std::max(cfg.x0.norm(), 1e-300);
    rep.metric("noise_free_decay_ratio", ratio);
    rep.check("noise_free_decay", ratio <= 1e-3, "|x_N| / |x_0| = " + fmt_short(ratio));
    attach_lyapunov(decay, sol.P);
    traces.emplace_back("noise_free.csv", std::move(decay));
    rep.stage("closed_loop_verification", cl.vertices_stable && cl.decrease_ok && ratio <= 1e-3 ? StageStatus::Ok
                                                                                                  : StageStatus::Failed);

    TriggerDesign td;
    td.mu = cfg.mu;
    td.eps2 = cfg.eps2;
    td.beta2 = cfg.beta2;
    td.delta = cfg.delta;
    td.margin = cfg.synth.margin;
    td.w_known = cfg.synth.w_known;
    t0 = std::chrono::steady_clock::now();
    const auto ts = solve_trigger(build_trigger_program(sol.P, sol.FQ, d, cfg.box, td), opt);
    rep.metric("trigger_seconds", seconds_since(t0));
    const bool tfeas = ts.status == sdp::Status::Feasible && ts.plug_in_ok && lambda_min_sym(ts.Psi1) > 0.0 &&
                       lambda_min_sym(ts.Psi2) > 0.0;
    rep.stage("trigger_synthesis", tfeas ? StageStatus::Ok : StageStatus::Failed,
              solver_detail(ts.raw, ts.plug_in_ok, ts.plug_in_failure));
    if (!tfeas) {
        skip_rest(rep, order);
        write_outputs(rep, opts, traces);
        return rep;
    }
    rep.matrices.emplace_back("Psi1", ts.Psi1);
    rep.matrices.emplace_back("Psi2", ts.Psi2);

    const TriggerConfig tc{ts.Psi1, ts.Psi2, cfg.v, cfg.mu, cfg.eps2, cfg.beta2};
    auto tr = simulate_event_triggered(sys, sol.K, tc, extract_input_matrix(d), box_law(cfg.box, s0 + kSimScheduleSeed),
                                       ball_noise_law(sys.n, cfg.delta, s0 + kSimNoiseSeed), cfg.x0, cfg.horizon());
    attach_lyapunov(tr, sol.P);
    const auto ie = inter_event_stats(tr);
    rep.metric("transmissions", ie.count);
    rep.metric("mean_inter_event_interval", ie.mean_interval);
    rep.metric("max_inter_event_interval", ie.max_interval);
    rep.metric("practical_iss_constant", iss_practical_constant(sol.P, cfg.mu, cfg.beta2));
    const auto bad = detector_violations(tr, tc);
    const auto dec = practical_decrease_check(tr, sol.P, tc, cfg.synth.sigma);
    rep.check("mean_inter_event_interval_above_one", ie.mean_interval > 1.0, "mean " + fmt_short(ie.mean_interval));
    rep.check("detector_soundness", bad.empty(), bad.empty() ? "" : "first violation at k = " + std::to_string(bad.front()));
    rep.check("practical_decrease", dec.pass,
              dec.pass ? "worst slack " + fmt_short(dec.worst_slack) : "first violation at k = " + std::to_string(dec.first_violation));
    rep.stage("event_triggered_simulation", StageStatus::Ok, std::to_string(ie.count) + " transmissions in " +
                                                                std::to_string(tr.N) + " steps");
    traces.emplace_back("event_triggered.csv", std::move(tr));
    write_outputs(rep, opts, traces);
    return rep;
}

RunReport cmd_track(RunConfig cfg, const RunOptions& opts)
{
    apply_options(cfg, opts);
    if (cfg.mode != "track") throw ConfigError(cfg.name + ": field \"mode\": track needs \"track\"");
    const auto& tb = *cfg.tracking;
    RunReport rep;
    rep.name = cfg.name;
    rep.mode = cfg.mode;
    const std::vector<std::string> order{"augment", "collect", "pe_check", "tracking_synthesis", "trigger_synthesis",
                                         "event_triggered_simulation"};
    std::vector<std::pair<std::string, SimulationTrace>> traces;
    const std::uint64_t s0 = cfg.seed;

    const auto aug = augment_system(cfg.system);
    rep.stage("augment", StageStatus::Ok, "nbar = " + std::to_string(aug.nbar));
    const int N = cfg.horizon();
    const double period = tb.period > 0.0 ? tb.period : N / 4.0;
    const auto ref = make_reference(tb.kind, tb.amplitude, period, N);
    const double dh = tb.delta_hat ? *tb.delta_hat : default_delta_hat(cfg.delta, ref);
    rep.metric("delta_hat", dh);
    rep.metric("reference_max_norm", ref.max_norm());

    const int T = cfg.data_length();
    const Vec psie = uniform_law(aug.nbar, -1.0, 1.0, s0 + kStateSeed)(0);
    const auto d = collect_aug(aug, T, uniform_law(cfg.system.m, -cfg.input_amplitude, cfg.input_amplitude, s0 + kInputSeed),
                               box_law(cfg.box, s0 + kScheduleSeed), ball_noise_law(cfg.system.n, cfg.delta, s0 + kNoiseSeed),
                               ref, psie, dh);
    traces.emplace_back("experiment.csv", experiment_trace(d));
    if (!data_stage(rep, cfg, d, aug.nbar)) {
        skip_rest(rep, order);
        write_outputs(rep, opts, traces);
        return rep;
    }

    SynthesisConfig sc = cfg.synth;
    sc.sigma = tb.sigma;
    sc.beta = tb.beta;
    sc.epsilon = tb.epsilon;
    sc.delta = dh;
    const auto opt = solver_options(cfg);
    auto t0 = std::chrono::steady_clock::now();
    const auto sol = solve_synthesis(build_tracking_synthesis_program(d, cfg.box, sc), opt);
    rep.metric("synthesis_seconds", seconds_since(t0));
    const bool feasible = sol.status == sdp::Status::Feasible && sol.plug_in_ok;
    rep.stage("tracking_synthesis", feasible ? StageStatus::Ok : StageStatus::Failed,
              solver_detail(sol.raw, sol.plug_in_ok, sol.plug_in_failure));
    if (!feasible) {
        skip_rest(rep, order);
        write_outputs(rep, opts, traces);
        return rep;
    }
    rep.matrices.emplace_back("P", sol.P);
    add_gains(rep, sol.K);
    bool stable = true;
    int vi = 0;
    for (const auto& vx : vertices(cfg.box)) {
        const double rho = spectral_radius(eval_affine(aug.A(), vx) + eval_affine(aug.B(), vx) * eval_affine(sol.K, vx));
        rep.metric("vertex_radius_" + std::to_string(vi++), rho);
        stable = stable && rho < 1.0;
    }
    rep.check("vertex_spectral_radius_below_one", stable);

    TriggerDesign td;
    td.mu = tb.mu;
    td.eps2 = tb.eps4;
    td.beta2 = tb.beta4_value();
    td.delta = dh;
    td.margin = cfg.synth.margin;
    td.w_known = cfg.synth.w_known;
    t0 = std::chrono::steady_clock::now();
    const auto ts = solve_trigger(build_tracking_trigger_program(sol.P, sol.FQ, d, cfg.box, td), opt);
    rep.metric("trigger_seconds", seconds_since(t0));
    const bool tfeas = ts.status == sdp::Status::Feasible && ts.plug_in_ok && lambda_min_sym(ts.Psi1) > 0.0 &&
                       lambda_min_sym(ts.Psi2) > 0.0;
    rep.stage("trigger_synthesis", tfeas ? StageStatus::Ok : StageStatus::Failed,
              solver_detail(ts.raw, ts.plug_in_ok, ts.plug_in_failure));
    if (!tfeas) {
        skip_rest(rep, order);
        write_outputs(rep, opts, traces);
        return rep;
    }
    rep.matrices.emplace_back("Psi1", ts.Psi1);
    rep.matrices.emplace_back("Psi2", ts.Psi2);

    const TriggerConfig tc{ts.Psi1, ts.Psi2, tb.v, tb.mu, tb.eps4, tb.beta4_value()};
    auto tr = simulate_tracking_event_triggered(aug, sol.K, tc, extract_input_matrix(d), ref,
                                                box_law(cfg.box, s0 + kSimScheduleSeed),
                                                ball_noise_law(cfg.system.n, cfg.delta, s0 + kSimNoiseSeed), cfg.x0, N);
    attach_lyapunov(tr, sol.P);
    const auto ie = inter_event_stats(tr);
    const auto st = tracking_error_stats(tr, ref, cfg.system.n);
    rep.metric("transmissions", ie.count);
    rep.metric("mean_inter_event_interval", ie.mean_interval);
    rep.metric("max_inter_event_interval", ie.max_interval);
    rep.metric("max_tracking_error", st.max_error);
    rep.metric("final_quarter_rms", st.final_rms);
    rep.metric("chi_max", st.chi_max);
    rep.metric("chi_first_half_max", st.chi_mid);
    rep.metric("chi_final_quarter_max", st.chi_final_max);
    rep.metric("practical_iss_constant", iss_practical_constant(sol.P, tb.mu, tb.beta4_value()));

    const auto bad = detector_violations(tr, tc);
    const auto dec = practical_decrease_check(tr, sol.P, tc, tb.sigma);
    rep.check("detector_soundness", bad.empty(), bad.empty() ? "" : "first violation at k = " + std::to_string(bad.front()));
    rep.check("practical_decrease", dec.pass,
              dec.pass ? "worst slack " + fmt_short(dec.worst_slack) : "first violation at k = " + std::to_string(dec.first_violation));
    rep.check("transmissions_below_horizon", ie.count < N, std::to_string(ie.count) + " of " + std::to_string(N));
    rep.check("tracking_error_finite", std::isfinite(st.max_error), "max " + fmt_short(st.max_error));
    rep.check("integral_state_bounded", std::isfinite(st.chi_max) && st.chi_final_max <= 10.0 * st.chi_mid,
              "final-quarter max " + fmt_short(st.chi_final_max) + ", first-half max " + fmt_short(st.chi_mid));
    if (tb.rms_ceiling)
        rep.check("final_quarter_rms_below_ceiling", st.final_rms <= *tb.rms_ceiling,
                  fmt_short(st.final_rms) + " vs ceiling " + fmt_short(*tb.rms_ceiling));
    rep.stage("event_triggered_simulation", StageStatus::Ok, std::to_string(ie.count) + " transmissions in " +
                                                                std::to_string(N) + " steps");
    traces.emplace_back("tracking.csv", std::move(tr));
    write_outputs(rep, opts, traces);
    return rep;
}

// ---------------------------------------------------------------- bundled examples

RunConfig bundled_config(const std::string& id)
{
    RunConfig c;
    c.seed = 1;
    c.k_step = 0.01;
    if (id == "1") {
        c.name = "example1";
        c.mode = "stabilize";
        c.builtin = "example1";
        c.system = builtin_system(c.builtin);
        c.box = SchedulingBox::symmetric(2, 1.0);
        c.T = 23;
        c.x0 = (Vec(2) << 2.0, -2.0).finished();
        c.N = 200;
    } else if (id == "2a" || id == "2b") {
        c.name = id == "2a" ? "example2_sine" : "example2_square";
        c.mode = "track";
        c.builtin = "example2";
        c.system = builtin_system(c.builtin);
        c.box = SchedulingBox::symmetric(1, 1.0);
        c.T = 17;
        c.input_amplitude = 1000.0;
        c.x0 = (Vec(2) << 1.0, 1.0).finished();
        c.horizon_s = 6.0;
        TrackingBlock t;
        t.kind = id == "2a" ? ReferenceKind::Sinusoid : ReferenceKind::Square;
        t.amplitude = 1.0;
        t.period = 150.0;
        t.sigma = 4.0;
        t.beta = 0.2;
        t.epsilon = 0.01;
        t.mu = 9.0;
        t.eps4 = 0.001;
        t.beta4 = 0.1;
        t.v = 20.0;
        t.rms_ceiling = id == "2a" ? 0.25 : 0.45;  // measured 0.152 / 0.287 with seed 1
        c.tracking = t;
    } else if (id == "3a" || id == "3b") {
        c.name = id == "3a" ? "example3_circle" : "example3_figure8";
        c.mode = "track";
        c.builtin = "example3";
        c.system = builtin_system(c.builtin);
        c.box = SchedulingBox::symmetric(1, 1.0);
        c.T = 29;
        c.input_amplitude = 1000.0;
        c.x0 = id == "3a" ? (Vec(3) << 3.0, -2.0, 3.0).finished() : (Vec(3) << 1.0, 1.0, 1.0).finished();
        c.horizon_s = 30.0;
        TrackingBlock t;
        t.kind = id == "3a" ? ReferenceKind::Circle : ReferenceKind::Figure8;
        t.amplitude = 2.5;
        t.period = 1000.0;
        t.sigma = 4.0;
        t.beta = 0.5;
        t.epsilon = 1e-4;
        t.mu = 15.0;
        t.eps4 = 0.001;
        t.beta4 = 0.25;
        t.v = 500.0;
        t.rms_ceiling = id == "3a" ? 2.7 : 2.75;  // measured 1.790 / 1.834 with seed 1
        c.tracking = t;
    } else {
        throw ConfigError("unknown example id: " + id + " (expected 1, 2a, 2b, 3a or 3b)");
    }
    c.synth.delta = c.delta;
    c.validate();
    return c;
}

namespace {

bool stage_ok(const RunReport& r, const std::string& n)
{
    const auto* s = r.find_stage(n);
    return s && s->status == StageStatus::Ok;
}

/// Largest deviation between the augmented step and the separate plant/integrator update.
double augmentation_error(const LpvSystem& sys, std::uint64_t seed)
{
    const auto aug = augment_system(sys);
    auto xs = uniform_law(sys.n, -1, 1, seed);
    auto cs = uniform_law(sys.r, -1, 1, seed + 1);
    auto us = uniform_law(sys.m, -1, 1, seed + 2);
    auto ws = uniform_law(sys.n, -1, 1, seed + 3);
    auto rs = uniform_law(sys.r, -1, 1, seed + 4);
    auto ps = uniform_law(sys.ell, -1, 1, seed + 5);
    double err = 0.0;
    for (int k = 0; k < 20; ++k) {
        const Vec x = xs(k), chi = cs(k), u = us(k), w = ws(k), r = rs(k), p = ps(k);
        Vec psi(aug.nbar), varpi(sys.n + sys.r);
        psi << x, chi;
        varpi << w, r;
        const auto a = step(aug.plant, psi, u, p, aug.E * varpi);
        const auto b = step(sys, x, u, p, w);
        const Vec chin = chi + b.y - r;
        err = std::max({err, (a.x_next.head(sys.n) - b.x_next).cwiseAbs().maxCoeff(),
                        (a.x_next.tail(sys.r) - chin).cwiseAbs().maxCoeff(), (a.y - b.y).cwiseAbs().maxCoeff()});
    }
    return err;
}

}  // namespace

RunReport cmd_reproduce(const std::string& id, const RunOptions& opts)
{
    RunConfig cfg = bundled_config(id);
    RunOptions o = opts;
    if (o.out_dir.empty()) o.out_dir = resolve_out_dir(std::nullopt, "reproduce_" + id);
    RunReport rep = cfg.mode == "track" ? cmd_track(cfg, o) : cmd_synthesize(cfg, o);
    if (o.seed) cfg.seed = *o.seed;

    if (id == "1") {
        rep.check("example_data_length", rep.data_length == 23, std::to_string(rep.data_length));
        rep.check("example_rank", rep.rank == 9, std::to_string(rep.rank));
        rep.check("example_synthesis_feasible", stage_ok(rep, "stabilization_synthesis"));
        rep.check("example_trigger_feasible", stage_ok(rep, "trigger_synthesis"));
        Mat Psi1(2, 2), Psi2(2, 2);
        Psi1 << 166.7528, -14.2105, -14.2105, 36.4492;
        Psi2 << 0.0710, 0.0266, 0.0266, 0.0174;
        const double l1 = lambda_min_sym(Psi1), l2 = lambda_min_sym(Psi2);
        rep.check("printed_trigger_matrices_positive_definite", l1 > 0.0 && l2 > 0.0,
                  "lambda_min " + fmt_short(l1) + ", " + fmt_short(l2));
    } else {
        const int Texp = id[0] == '2' ? 17 : 29, rexp = id[0] == '2' ? 6 : 10;
        rep.check("example_data_length", rep.data_length == Texp, std::to_string(rep.data_length));
        rep.check("example_rank", rep.rank == rexp, std::to_string(rep.rank));
        rep.check("example_tracking_synthesis_feasible", stage_ok(rep, "tracking_synthesis"));
        rep.check("example_trigger_feasible", stage_ok(rep, "trigger_synthesis"));
        const double ae = augmentation_error(cfg.system, cfg.seed);
        rep.check("augmentation_consistency", ae <= 1e-12, "max deviation " + fmt_short(ae));
        const auto& tb = *cfg.tracking;
        const int N = cfg.horizon();
        const auto ref = make_reference(tb.kind, tb.amplitude, tb.period > 0 ? tb.period : N / 4.0, N);
        double dev = 0.0;
        for (const auto& s : ref.samples) {
            switch (tb.kind) {
            case ReferenceKind::Circle: dev = std::max(dev, std::abs(s.squaredNorm() - tb.amplitude * tb.amplitude)); break;
            case ReferenceKind::Square: dev = std::max(dev, std::abs(std::abs(s(0)) - tb.amplitude)); break;
            case ReferenceKind::Sinusoid: dev = std::max(dev, std::max(0.0, std::abs(s(0)) - tb.amplitude)); break;
            case ReferenceKind::Figure8: {
                const double q = s(0) / tb.amplitude;
                dev = std::max(dev, std::abs(std::abs(s(1)) - std::abs(2.0 * s(0) * std::sqrt(std::max(0.0, 1.0 - q * q)))));
                break;
            }
            case ReferenceKind::Custom: break;
            }
        }
        rep.check("reference_shape", dev <= 1e-12, "max deviation " + fmt_short(dev));
    }
    if (!o.out_dir.empty()) {
        std::ofstream f(o.out_dir / "report.json", std::ios::binary);
        f << rep.to_json();
    }
    return rep;
}

}  // namespace lpvet
