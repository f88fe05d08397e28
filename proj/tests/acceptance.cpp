// Acceptance run: one PASS/FAIL line per criterion.
//
//   lpvet_acceptance [--out DIR] [--expect-fail 4,5,6] [--only 1,2,...]
//
// Exit status is 0 when every criterion not listed in --expect-fail passes.

#include <lpvet/harness.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace lpvet;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::set<int> parse_list(const std::string& s)
{
    std::set<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.insert(std::stoi(tok));
    return out;
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

bool stage_ok(const RunReport& r, const std::string& name)
{
    const auto* s = r.find_stage(name);
    return s && s->status == StageStatus::Ok;
}

std::string stage_detail(const RunReport& r, const std::string& name)
{
    const auto* s = r.find_stage(name);
    return s ? std::string(to_string(s->status)) + ": " + s->detail : "missing";
}

bool check_ok(const RunReport& r, const std::string& name)
{
    const auto* c = r.find_check(name);
    return c && c->pass;
}

class Runner {
public:
    Runner(fs::path out) : out_(std::move(out)) {}

    const RunReport& example(const std::string& id)
    {
        auto it = cache_.find(id);
        if (it != cache_.end()) return it->second;
        RunOptions o;
        o.out_dir = out_ / ("reproduce_" + id);
        return cache_.emplace(id, cmd_reproduce(id, o)).first->second;
    }

    const fs::path& out() const { return out_; }

private:
    fs::path out_;
    std::map<std::string, RunReport> cache_;
};

Outcome c1_data_length(Runner&)
{
    const int a = min_data_length(2, 1, 2), b = min_data_length(2, 1, 1), c = min_data_length(3, 2, 1);
    return {a == 23 && b == 11 && c == 29, std::to_string(a) + ", " + std::to_string(b) + ", " + std::to_string(c)};
}

Outcome c2_rank(Runner&)
{
    struct Case {
        int example, T, target;
        ReferenceKind ref;
        double amp, period;
    };
    const Case cases[] = {{1, 23, 9, ReferenceKind::Custom, 0, 0},
                          {2, 17, 6, ReferenceKind::Sinusoid, 1.0, 150},
                          {3, 29, 10, ReferenceKind::Circle, 2.5, 1000}};
    bool pass = true;
    std::string detail;
    for (const auto& c : cases) {
        const auto sys = builtin_system("example" + std::to_string(c.example));
        const auto box = SchedulingBox::symmetric(sys.ell, 1.0);
        int hits = 0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            const auto u = uniform_law(sys.m, -1, 1, 4 * seed), p = box_law(box, 4 * seed + 1);
            const auto w = ball_noise_law(sys.n, 0.1, 4 * seed + 2);
            ExperimentData d;
            if (c.example == 1) {
                d = collect(sys, c.T, u, p, w, uniform_law(sys.n, -1, 1, 4 * seed + 3)(0), 0.1);
            } else {
                const auto aug = augment_system(sys);
                const auto ref = make_reference(c.ref, c.amp, c.period, c.T);
                d = collect_aug(aug, c.T, u, p, w, ref, uniform_law(aug.nbar, -1, 1, 4 * seed + 3)(0), 0.1);
            }
            if (regressor_rank(d) == c.target) ++hits;
        }
        pass = pass && hits >= 99;
        detail += (detail.empty() ? "" : ", ") + std::string("rank ") + std::to_string(c.target) + " in " +
                  std::to_string(hits) + "/100";
    }
    return {pass, detail};
}

Outcome c3_identification(Runner&)
{
    double worst = 0.0;
    for (int i = 1; i <= 3; ++i) {
        const auto sys = builtin_system("example" + std::to_string(i));
        const int T = min_data_length(sys.n, sys.m, sys.ell) + 10;
        const auto d = collect(sys, T, uniform_law(sys.m, -1, 1, 100 + i), box_law(SchedulingBox::symmetric(sys.ell, 1), 200 + i),
                               zero_law(sys.n), uniform_law(sys.n, -1, 1, 300 + i)(0), 0.0);
        const auto id = identify(d);
        worst = std::max({worst, (id.A_stack - sys.A.stacked()).cwiseAbs().maxCoeff(),
                          (id.B_stack - sys.B.stacked()).cwiseAbs().maxCoeff()});
    }
    return {worst < 1e-8, "max abs error " + num(worst)};
}

Outcome c4_stabilization(Runner& run)
{
    const auto& r = run.example("1");
    const bool pass = stage_ok(r, "stabilization_synthesis") && check_ok(r, "vertex_spectral_radius_below_one") &&
                      check_ok(r, "noise_free_decay");
    std::string d = "synthesis " + stage_detail(r, "stabilization_synthesis");
    if (const auto* c = r.find_check("noise_free_decay")) d += "; " + c->detail;
    return {pass, d};
}

Outcome c5_decrease(Runner& run)
{
    const auto& r = run.example("1");
    const auto* c = r.find_check("lyapunov_decrease");
    if (!c) return {false, "no controller to verify (" + stage_detail(r, "closed_loop_verification") + ")"};
    return {c->pass, c->detail};
}

Outcome c6_trigger(Runner& run)
{
    const auto& r = run.example("1");
    const auto* printed = r.find_check("printed_trigger_matrices_positive_definite");
    const std::string sanity =
        printed ? std::string("printed trigger matrices PD: ") + (printed->pass ? "yes" : "no") + " (" + printed->detail + ")"
                : "printed matrix check missing";
    const bool pass = stage_ok(r, "trigger_synthesis") && stage_ok(r, "event_triggered_simulation") &&
                      check_ok(r, "mean_inter_event_interval_above_one") && check_ok(r, "detector_soundness") &&
                      check_ok(r, "practical_decrease") && printed && printed->pass;
    return {pass, "trigger " + stage_detail(r, "trigger_synthesis") + "; " + sanity};
}

Outcome c7_tracking(Runner& run)
{
    bool pass = true;
    std::string detail;
    for (const auto* id : {"2a", "2b", "3a", "3b"}) {
        const auto& r = run.example(id);
        std::string failed;
        for (const auto& s : r.stages)
            if (s.status != StageStatus::Ok) failed += (failed.empty() ? "" : ",") + s.name;
        for (const auto& c : r.checks)
            if (!c.pass) failed += (failed.empty() ? "" : ",") + c.name;
        const auto rms = r.metric_value("final_quarter_rms");
        detail += std::string(detail.empty() ? "" : "; ") + id + " rms " + (rms ? num(*rms) : "n/a");
        if (!failed.empty()) {
            pass = false;
            detail += " failed [" + failed + "]";
        }
    }
    return {pass, detail};
}

Outcome c8_fq(Runner&)
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1, 1);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int n = 1 + t % 3, ell = 1 + t % 3, T = 4 + t % 5;
        Mat Fs(T, n * (1 + ell + ell * ell));
        for (int i = 0; i < Fs.size(); ++i) Fs.data()[i] = u(rng);
        Vec p(ell);
        for (int i = 0; i < ell; ++i) p(i) = u(rng);
        Mat L(T, T * (1 + ell)), R(n * (1 + ell), n);
        L << Mat::Identity(T, T), kron(p.transpose(), Mat::Identity(T, T));
        R << Mat::Identity(n, n), kron(p, Mat::Identity(n, n));
        worst = std::max(worst, (L * build_fq(Fs, n, ell) * R - eval_F(Fs, n, ell, p)).cwiseAbs().maxCoeff());
    }
    return {worst < 1e-10, "max error " + num(worst) + " over 100 pairs"};
}

Outcome c9_determinism(Runner& run)
{
    std::vector<fs::path> dirs;
    for (int rep = 0; rep < 2; ++rep) {
        RunOptions o;
        o.out_dir = run.out() / ("determinism_" + std::to_string(rep));
        fs::remove_all(o.out_dir);
        cmd_reproduce("2a", o);
        dirs.push_back(o.out_dir);
    }
    int files = 0;
    for (const auto& e : fs::directory_iterator(dirs[0])) {
        if (e.path().extension() != ".csv") continue;
        ++files;
        const auto other = dirs[1] / e.path().filename();
        if (!fs::exists(other) || slurp(e.path()) != slurp(other))
            return {false, e.path().filename().string() + " differs"};
    }
    return {files > 0, std::to_string(files) + " CSV files byte-identical (example 2a)"};
}

}  // namespace

int main(int argc, char** argv)
{
    std::set<int> expect_fail, only;
    fs::path out = fs::temp_directory_path() / "lpvet_acceptance";
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--expect-fail" && i + 1 < argc) expect_fail = parse_list(argv[++i]);
        else if (a == "--only" && i + 1 < argc) only = parse_list(argv[++i]);
        else if (a == "--out" && i + 1 < argc) out = argv[++i];
        else {
            std::cerr << "usage: lpvet_acceptance [--out DIR] [--expect-fail LIST] [--only LIST]\n";
            return 2;
        }
    }
    fs::create_directories(out);
    Runner run(out);

    const std::vector<std::pair<std::string, std::function<Outcome(Runner&)>>> criteria{
        {"data length formula", c1_data_length},
        {"excitation rank over 100 seeds", c2_rank},
        {"noise-free identification", c3_identification},
        {"example 1 stabilization synthesis", c4_stabilization},
        {"Lyapunov decrease along 100 trajectories", c5_decrease},
        {"example 1 event-triggered design", c6_trigger},
        {"tracking pipelines 2a/2b/3a/3b", c7_tracking},
        {"F_Q reconstruction identity", c8_fq},
        {"deterministic traces", c9_determinism},
    };

    int unexpected = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second(run);
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool expected = expect_fail.count(id) > 0;
        if (!o.pass && !expected) ++unexpected;
        std::printf("criterion %d: %s  %s (%s) [%.1f s]%s\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    o.detail.c_str(), secs, !o.pass && expected ? " [known limitation]" : "");
        std::fflush(stdout);
    }
    return unexpected == 0 ? 0 : 1;
}
