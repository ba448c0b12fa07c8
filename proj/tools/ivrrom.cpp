// Command line driver: snapshots, offline, run, report, verify.

#include "ivrrom/experiment.hpp"
#include "ivrrom/verify.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Partitioned FOM/ROM coupling of advection-diffusion subdomains"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "results";
    std::optional<std::string> profile;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    bool paper = false;

    const auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* opt = cmd->add_option("--config", config_path, "experiment configuration (JSON)");
        if (needs_config) opt->required()->check(CLI::ExistingFile);
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--profile", profile, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
        cmd->add_option("--seed", seed, "random seed");
        cmd->add_option("--jobs", jobs, "worker threads for sweep cells")->check(CLI::PositiveNumber);
    };
    auto* snapshots = app.add_subcommand("snapshots", "collect single-domain snapshot trajectories");
    auto* offline = app.add_subcommand("offline", "build POD bases from stored snapshots");
    auto* run = app.add_subcommand("run", "run the formulation / basis-size sweep");
    auto* report = app.add_subcommand("report", "summarize sweep results");
    auto* verify = app.add_subcommand("verify", "run the acceptance criteria and property suites");
    for (auto* cmd : {snapshots, offline, run, report}) add_common(cmd, true);
    add_common(verify, false);
    verify->add_flag("--paper", paper, "also run the paper-profile checks");

    CLI11_PARSE(app, argc, argv);

    ivrrom::Console con;
    try {
        if (verify->parsed()) {
            const std::uint64_t s = seed.value_or(20240607);
            bool ok = true;
            const auto print = [&](const ivrrom::verify::CriterionResult& r) {
                std::cout << ivrrom::verify::line(r) << std::endl;
                ok = ok && r.passed;
            };
            if (!profile || *profile == "desk" || !paper) ivrrom::verify::fast_suite(s, print);
            if (paper || (profile && *profile == "paper")) ivrrom::verify::paper_suite(print);
            return ok ? 0 : 1;
        }
        ivrrom::ExperimentConfig cfg = ivrrom::load_config(config_path, profile);
        if (seed) cfg.seed = *seed;
        const std::filesystem::path out(out_dir);
        if (snapshots->parsed()) ivrrom::cmd_snapshots(cfg, out, con);
        if (offline->parsed()) ivrrom::cmd_offline(cfg, out, con);
        if (run->parsed()) {
            const auto cells = ivrrom::cmd_run(cfg, out, con, jobs);
            for (const auto& c : cells)
                if (c.status != "ok") return 1;
        }
        if (report->parsed()) ivrrom::cmd_report(cfg, out, con);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
