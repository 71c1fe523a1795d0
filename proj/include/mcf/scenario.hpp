#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcf/blowup.hpp"
#include "mcf/flow.hpp"
#include "mcf/forces.hpp"
#include "mcf/gaussian.hpp"
#include "mcf/trimesh.hpp"

namespace mcf {

struct SurfaceSpec {
    std::string kind = "sphere"; // sphere | torus | capsule | dumbbell | box | file
    double radius = 2.0;
    int level = 4;
    Vec3 center = Vec3::Zero();
    double major_radius = 2.0;
    double tube_radius = 0.7;
    int res_major = 96;
    int res_minor = 48;
    double length = 20.0;
    int res_axial = 64;
    int res_around = 48;
    double neck_radius = 0.18;
    double half = 1.0;
    int grid = 24;
    std::string path;
};

struct ForceConfig {
    std::string kind = "zero"; // zero | constant | volume_preserving | rescaled_mcf
    Vec3 vector = Vec3::Zero();
    double bound = 10.0;
    double bounding_radius = 8.0;

    ForceSpec make() const;
};

struct DiagnosticsPlan {
    bool ledger = true;
    bool auto_center = true;
    KernelCenter center;
    int entropy_stride = 8; // heavy columns every k-th snapshot (0 disables)
    int area_ratio_samples = 16;
};

struct BlowupPlan {
    bool enabled = false;
    bool auto_point = true;
    Vec3 y = Vec3::Zero();
    double s = 0;
    std::vector<double> alpha_ladder = {0.4, 0.2, 0.1, 0.05};
    double eps0 = 0.25;
    double r_cover = 0.2;
};

struct Scenario {
    std::string name = "scenario";
    std::uint64_t seed = 0;
    SurfaceSpec surface;
    ForceConfig force;
    StepPolicy policy;
    double t_end = 1.0;
    DiagnosticsPlan diagnostics;
    BlowupPlan blowup;
    std::string output_dir = "out/run";

    void validate() const; // throws ConfigInvalid with the field path
};

/// Parses `key = value` sections (.cfg) or the equivalent JSON document
/// (.json). Throws ConfigInvalid naming the offending field.
Scenario load_scenario(const std::string& path);

TriMesh build_initial_surface(const SurfaceSpec& spec);

struct RunSummary {
    std::string run_dir;
    FlowStatus status;
    int snapshot_count = 0;
    std::optional<std::pair<Vec3, double>> singular_estimate;
    bool blowup_written = false;
};

/// Executes evolve -> diagnostics -> (optional) blow-up analysis and writes
/// manifest.json, snapshots/, diagnostics.csv and blowup_report.json under
/// the scenario output directory (MCFLAB_OUT_ROOT prefixes it when set).
RunSummary run_scenario(const Scenario& scenario);

struct VerifyRow {
    std::string label;
    double lhs = 0;
    double rhs = 0;
    double margin = 0; // (rhs - lhs) / |rhs|
    bool pass = true;
};

struct VerifyReport {
    std::vector<VerifyRow> rows;
    bool all_pass() const;
};

/// Re-evaluates the inequality checks against the stored artifacts of a
/// completed run. Throws MissingArtifacts when files listed in the manifest
/// are absent or truncated.
VerifyReport verify_suite(const Scenario& scenario);

/// Renders diagnostics.csv (and the blow-up residual ladder when present)
/// as standalone SVG line charts under <run-dir>/plots/.
std::vector<std::string> write_plots(const std::string& run_dir);

/// Reconstructs the trajectory recorded in a run directory.
FlowTrajectory load_trajectory(const std::string& run_dir);

/// Resolved output directory (MCFLAB_OUT_ROOT aware).
std::string resolve_output_dir(const std::string& configured);

} // namespace mcf
