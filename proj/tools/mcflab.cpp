// Scenario-driven front end: run flows, verify stored runs, redo blow-up
// analysis on a run directory, render plot SVGs.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcf/blowup.hpp"
#include "mcf/errors.hpp"
#include "mcf/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitVerification = 4;

int map_error(const mcf::FlowError& e) {
    switch (e.code()) {
        case mcf::ErrorCode::ConfigInvalid:
            return kExitConfig;
        case mcf::ErrorCode::MissingArtifacts:
            return kExitVerification;
        default:
            return kExitNumerical;
    }
}

int run_one(const std::string& config) {
    try {
        mcf::Scenario sc = mcf::load_scenario(config);
        mcf::RunSummary summary = mcf::run_scenario(sc);
        std::printf("[%s] %s after %d snapshots -> %s\n", sc.name.c_str(),
                    summary.status.kind == mcf::FlowStatusKind::SingularAt ? "singular"
                                                                           : "completed",
                    summary.snapshot_count, summary.run_dir.c_str());
        if (summary.singular_estimate) {
            const auto& [y, s] = *summary.singular_estimate;
            std::printf("  singular point estimate: y=(%.6g, %.6g, %.6g)  s=%.8g\n", y.x(), y.y(),
                        y.z(), s);
        }
        if (summary.blowup_written) std::printf("  blow-up report written\n");
        return kExitOk;
    } catch (const mcf::FlowError& e) {
        std::fprintf(stderr, "error [%s]: %s\n", config.c_str(), e.what());
        return map_error(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error [%s]: %s\n", config.c_str(), e.what());
        return kExitNumerical;
    }
}

int cmd_run(const std::vector<std::string>& configs, int jobs) {
    if (configs.size() <= 1 || jobs <= 1) {
        int rc = kExitOk;
        for (const auto& c : configs) rc = std::max(rc, run_one(c));
        return rc;
    }
    // Batch mode: one worker process per scenario, `jobs` at a time.
    int rc = kExitOk;
    size_t next = 0;
    int active = 0;
    while (next < configs.size() || active > 0) {
        while (active < jobs && next < configs.size()) {
            pid_t pid = fork();
            if (pid == 0) _exit(run_one(configs[next]));
            if (pid < 0) {
                std::fprintf(stderr, "fork failed\n");
                return kExitNumerical;
            }
            ++next;
            ++active;
        }
        int status = 0;
        if (wait(&status) > 0) {
            --active;
            if (WIFEXITED(status)) rc = std::max(rc, WEXITSTATUS(status));
        }
    }
    return rc;
}

int cmd_verify(const std::string& config) {
    try {
        mcf::Scenario sc = mcf::load_scenario(config);
        mcf::VerifyReport report = mcf::verify_suite(sc);
        std::printf("%-28s %14s %14s %9s  %s\n", "check", "lhs", "rhs", "margin", "verdict");
        for (const auto& row : report.rows)
            std::printf("%-28s %14.6g %14.6g %8.2f%%  %s\n", row.label.c_str(), row.lhs, row.rhs,
                        100 * row.margin, row.pass ? "PASS" : "FAIL");
        return report.all_pass() ? kExitOk : kExitVerification;
    } catch (const mcf::FlowError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return map_error(e);
    }
}

int cmd_blowup(const std::string& run_dir, const std::vector<double>& ladder, double eps0,
               double r_cover) {
    try {
        mcf::FlowTrajectory traj = mcf::load_trajectory(run_dir);
        std::ifstream min(fs::path(run_dir) / "manifest.json");
        json manifest;
        min >> manifest;
        mcf::ForceConfig fc;
        const auto& jf = manifest.at("scenario").at("force");
        fc.kind = jf.at("kind").get<std::string>();
        fc.vector = {jf.at("vector")[0].get<double>(), jf.at("vector")[1].get<double>(),
                     jf.at("vector")[2].get<double>()};
        fc.bound = jf.at("bound").get<double>();
        fc.bounding_radius = jf.at("bounding_radius").get<double>();

        mcf::BlowupParams params;
        if (!ladder.empty()) params.alpha_ladder = ladder;
        if (eps0 > 0) params.concentration.eps0 = eps0;
        if (r_cover > 0) params.concentration.r_cover = r_cover;
        mcf::BlowupReport rep = mcf::run_blowup_pipeline(traj, fc.make(), params);

        std::printf("singular point: y=(%.6g, %.6g, %.6g)  s=%.8g%s\n", rep.y.x(), rep.y.y(),
                    rep.y.z(), rep.s, rep.s_refined ? " (refined)" : "");
        for (const auto& e : rep.ladder)
            std::printf("  alpha=%.4g tau=%.3g t=%.4f eps_shrink=%.3e self_sim=%.3e%s%s\n",
                        e.alpha, e.tau, e.t_selected, e.eps_shrink, e.self_similarity,
                        e.low_resolution ? " [low-res]" : "",
                        e.pigeonhole_failed ? " [pigeonhole-miss]" : "");
        std::printf("  concentration points: %zu (bound %.3g)\n", rep.concentration.points.size(),
                    rep.concentration.count_bound);

        // Rewrite the report and slices in place.
        std::ofstream out(fs::path(run_dir) / "blowup_report.json");
        json j;
        j["y"] = json::array({rep.y.x(), rep.y.y(), rep.y.z()});
        j["s"] = rep.s;
        j["s_estimate"] = rep.s_estimate;
        j["s_refined"] = rep.s_refined;
        j["eps0"] = rep.eps0;
        j["r_cover"] = rep.r_cover;
        j["source_scaling_slope"] = rep.source_scaling_slope;
        j["ladder"] = json::array();
        for (const auto& e : rep.ladder)
            j["ladder"].push_back({{"alpha", e.alpha},
                                   {"tau", e.tau},
                                   {"t_selected", e.t_selected},
                                   {"eps_shrink", e.eps_shrink},
                                   {"self_similarity", e.self_similarity},
                                   {"source_integral", e.source_integral},
                                   {"low_resolution", e.low_resolution},
                                   {"pigeonhole_failed", e.pigeonhole_failed}});
        j["concentration"] = {{"count_bound", rep.concentration.count_bound},
                              {"count_ok", rep.concentration.count_ok},
                              {"points", json::array()}};
        for (const auto& q : rep.concentration.points)
            j["concentration"]["points"].push_back(
                {{"position", json::array({q.position.x(), q.position.y(), q.position.z()})},
                 {"mass", q.mass},
                 {"flags", q.flags}});
        out << j.dump(2) << '\n';

        fs::create_directories(fs::path(run_dir) / "slices");
        for (size_t k = 0; k < rep.slices.size(); ++k) {
            char name[64];
            std::snprintf(name, sizeof(name), "slices/slice_%02d.off", static_cast<int>(k));
            mcf::write_off(rep.slices[k].mesh, (fs::path(run_dir) / name).string());
        }
        return kExitOk;
    } catch (const mcf::FlowError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return map_error(e);
    }
}

int cmd_plot(const std::string& run_dir) {
    try {
        for (const auto& p : mcf::write_plots(run_dir)) std::printf("wrote %s\n", p.c_str());
        return kExitOk;
    } catch (const mcf::FlowError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return map_error(e);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mean curvature flow laboratory"};
    app.require_subcommand(1);

    std::vector<std::string> run_configs;
    int jobs = 1;
    auto* run = app.add_subcommand("run", "run one or more scenario configs");
    run->add_option("configs", run_configs, "scenario config files (.cfg or .json)")->required();
    run->add_option("--jobs", jobs, "parallel worker processes for batches");

    std::string verify_config;
    auto* verify = app.add_subcommand("verify", "re-check the inequalities of a stored run");
    verify->add_option("config", verify_config, "scenario config of the completed run")
        ->required();

    std::string blowup_dir;
    std::vector<double> ladder;
    double eps0 = 0, r_cover = 0;
    auto* blowup = app.add_subcommand("blowup", "redo blow-up analysis on a run directory");
    blowup->add_option("run-dir", blowup_dir, "run directory with manifest.json")->required();
    blowup->add_option("--alpha-ladder", ladder, "rescaling factors (descending)");
    blowup->add_option("--eps0", eps0, "concentration threshold");
    blowup->add_option("--r-cover", r_cover, "covering ball radius");

    std::string plot_dir;
    auto* plot = app.add_subcommand("plot", "render diagnostics SVG charts");
    plot->add_option("run-dir", plot_dir, "run directory")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(run_configs, jobs);
    if (verify->parsed()) return cmd_verify(verify_config);
    if (blowup->parsed()) return cmd_blowup(blowup_dir, ladder, eps0, r_cover);
    if (plot->parsed()) return cmd_plot(plot_dir);
    return kExitConfig;
}
