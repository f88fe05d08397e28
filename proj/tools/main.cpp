// lpvet command line: synthesize, track, reproduce.
#include "lpvet/harness.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

void print_summary(const lpvet::RunReport& r, const std::filesystem::path& out)
{
    std::cout << r.name << " (" << r.mode << ")\n";
    std::cout << "  data length " << r.data_length << ", rank " << r.rank << " of " << r.rank_target << "\n";
    for (const auto& s : r.stages) {
        std::cout << "  [" << lpvet::to_string(s.status) << "] " << s.name;
        if (!s.detail.empty()) std::cout << ": " << s.detail;
        std::cout << "\n";
    }
    for (const auto& c : r.checks) {
        std::cout << "  " << (c.pass ? "PASS " : "FAIL ") << c.name;
        if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
        std::cout << "\n";
    }
    if (!out.empty()) std::cout << "  report: " << (out / "report.json").string() << "\n";
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Data-driven event-triggered LPV control: synthesis, tracking and example reproduction"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    double tol = 0.0;
    auto* seed_opt = app.add_option("--seed", seed, "override the configuration seed");
    auto* tol_opt = app.add_option("--solver-tol", tol, "override the solver tolerance")->check(CLI::PositiveNumber);

    std::string config_path, out_dir, example;
    auto* syn = app.add_subcommand("synthesize", "stabilizing controller and trigger design, then simulation");
    syn->add_option("--config", config_path, "configuration file")->required();
    syn->add_option("--out", out_dir, "output directory");
    auto* trk = app.add_subcommand("track", "tracking controller and trigger design, then simulation");
    trk->add_option("--config", config_path, "configuration file")->required();
    trk->add_option("--out", out_dir, "output directory");
    auto* rep = app.add_subcommand("reproduce", "run a bundled example and assert its checks");
    rep->add_option("--example", example, "1, 2a, 2b, 3a or 3b")->required();
    rep->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    lpvet::RunOptions opts;
    if (*seed_opt) opts.seed = seed;
    if (*tol_opt) opts.solver_tol = tol;
    try {
        lpvet::RunReport r;
        if (*rep) {
            const auto cfg = lpvet::bundled_config(example);
            opts.out_dir = lpvet::resolve_out_dir(out_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(out_dir),
                                                  "reproduce_" + example);
            r = lpvet::cmd_reproduce(example, opts);
        } else {
            const auto cfg = lpvet::load_config(config_path);
            opts.out_dir = lpvet::resolve_out_dir(out_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(out_dir),
                                                  cfg.name.empty() ? "run" : cfg.name);
            r = *syn ? lpvet::cmd_synthesize(cfg, opts) : lpvet::cmd_track(cfg, opts);
        }
        print_summary(r, opts.out_dir);
        return lpvet::exit_code(r);
    } catch (const lpvet::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
