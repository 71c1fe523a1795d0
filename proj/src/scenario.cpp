#include "mcf/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mcf/curvature.hpp"
#include "mcf/errors.hpp"
#include "mcf/quadrature.hpp"
#include "mcf/shapes.hpp"
#include "mcf/topology.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace mcf {

ForceSpec ForceConfig::make() const {
    if (kind == "zero") return ForceSpec::zero();
    if (kind == "constant") return ForceSpec::constant(vector);
    if (kind == "volume_preserving") return ForceSpec::volume_preserving(bound);
    if (kind == "rescaled_mcf") return ForceSpec::rescaled_mcf(bounding_radius);
    fail(ErrorCode::ConfigInvalid, "force.kind: unknown value '" + kind + "'");
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    size_t b = s.find_last_not_of(" \t\r\n");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

/// Flat key -> value view of the config; keys are section.key paths.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_cfg(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ConfigInvalid, "cannot open config: " + path);
    ConfigMap map;
    std::string line, section;
    while (std::getline(in, line)) {
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::ConfigInvalid, "expected key = value, got: " + line);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        map[section.empty() ? key : section + "." + key] = value;
    }
    return map;
}

void flatten_json(const json& j, const std::string& prefix, ConfigMap& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            flatten_json(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    } else if (j.is_array()) {
        std::string joined;
        for (const auto& v : j) {
            if (!joined.empty()) joined += ' ';
            joined += v.is_string() ? v.get<std::string>() : v.dump();
        }
        out[prefix] = joined;
    } else if (j.is_string()) {
        out[prefix] = j.get<std::string>();
    } else {
        out[prefix] = j.dump();
    }
}

ConfigMap parse_json_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ConfigInvalid, "cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        fail(ErrorCode::ConfigInvalid, std::string("json parse error: ") + e.what());
    }
    ConfigMap map;
    flatten_json(j, "", map);
    return map;
}

struct Fields {
    ConfigMap map;
    std::set<std::string> consumed;

    bool has(const std::string& key) const { return map.count(key) > 0; }

    std::string str(const std::string& key, const std::string& fallback) {
        consumed.insert(key);
        auto it = map.find(key);
        return it == map.end() ? fallback : it->second;
    }
    double num(const std::string& key, double fallback) {
        consumed.insert(key);
        auto it = map.find(key);
        if (it == map.end()) return fallback;
        try {
            size_t pos = 0;
            double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (...) {
            fail(ErrorCode::ConfigInvalid, key + ": not a number: '" + it->second + "'");
        }
    }
    long integer(const std::string& key, long fallback) {
        double v = num(key, static_cast<double>(fallback));
        long r = static_cast<long>(std::llround(v));
        if (std::abs(v - r) > 1e-9) fail(ErrorCode::ConfigInvalid, key + ": expected an integer");
        return r;
    }
    bool boolean(const std::string& key, bool fallback) {
        std::string v = str(key, fallback ? "true" : "false");
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        fail(ErrorCode::ConfigInvalid, key + ": expected a boolean, got '" + v + "'");
    }
    std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) {
        consumed.insert(key);
        auto it = map.find(key);
        if (it == map.end()) return fallback;
        std::vector<double> out;
        std::istringstream ss(it->second);
        double v;
        while (ss >> v) out.push_back(v);
        if (out.empty()) fail(ErrorCode::ConfigInvalid, key + ": expected numbers");
        return out;
    }
    Vec3 vec3(const std::string& key, const Vec3& fallback) {
        std::vector<double> v =
            numbers(key, {fallback.x(), fallback.y(), fallback.z()});
        if (v.size() != 3) fail(ErrorCode::ConfigInvalid, key + ": expected 3 numbers");
        return {v[0], v[1], v[2]};
    }
};

} // namespace

void Scenario::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0)) fail(ErrorCode::ConfigInvalid, std::string(name) + " must be positive");
    };
    if (name.empty()) fail(ErrorCode::ConfigInvalid, "name must be nonempty");
    policy.validate();
    positive(t_end, "run.t_end");
    if (surface.kind == "sphere") {
        positive(surface.radius, "surface.radius");
        if (surface.level < 0 || surface.level > 7)
            fail(ErrorCode::ConfigInvalid, "surface.level must be in [0,7]");
    } else if (surface.kind == "torus") {
        positive(surface.major_radius, "surface.major_radius");
        positive(surface.tube_radius, "surface.tube_radius");
        if (surface.tube_radius >= surface.major_radius)
            fail(ErrorCode::ConfigInvalid, "surface.tube_radius must be below major_radius");
    } else if (surface.kind == "capsule") {
        positive(surface.radius, "surface.radius");
        positive(surface.length, "surface.length");
    } else if (surface.kind == "dumbbell") {
        if (!(surface.neck_radius > 0 && surface.neck_radius < 1))
            fail(ErrorCode::ConfigInvalid, "surface.neck_radius must be in (0,1)");
    } else if (surface.kind == "box") {
        positive(surface.half, "surface.half");
    } else if (surface.kind == "file") {
        if (!fs::exists(surface.path))
            fail(ErrorCode::ConfigInvalid, "surface.path does not exist: " + surface.path);
    } else {
        fail(ErrorCode::ConfigInvalid, "surface.kind: unknown value '" + surface.kind + "'");
    }
    force.make(); // validates force fields
    for (double a : blowup.alpha_ladder)
        if (!(a > 0)) fail(ErrorCode::ConfigInvalid, "blowup.alpha_ladder entries must be positive");
    positive(blowup.eps0, "blowup.eps0");
    positive(blowup.r_cover, "blowup.r_cover");
    if (diagnostics.entropy_stride < 0)
        fail(ErrorCode::ConfigInvalid, "diagnostics.entropy_stride must be >= 0");
    if (output_dir.empty()) fail(ErrorCode::ConfigInvalid, "output.dir must be nonempty");
}

Scenario load_scenario(const std::string& path) {
    Fields f;
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json")
        f.map = parse_json_config(path);
    else
        f.map = parse_cfg(path);

    Scenario sc;
    sc.name = f.str("name", "scenario");
    sc.seed = static_cast<std::uint64_t>(f.integer("seed", 0));

    sc.surface.kind = f.str("surface.kind", "sphere");
    sc.surface.radius = f.num("surface.radius", sc.surface.radius);
    sc.surface.level = static_cast<int>(f.integer("surface.level", sc.surface.level));
    sc.surface.center = f.vec3("surface.center", sc.surface.center);
    sc.surface.major_radius = f.num("surface.major_radius", sc.surface.major_radius);
    sc.surface.tube_radius = f.num("surface.tube_radius", sc.surface.tube_radius);
    sc.surface.res_major = static_cast<int>(f.integer("surface.res_major", sc.surface.res_major));
    sc.surface.res_minor = static_cast<int>(f.integer("surface.res_minor", sc.surface.res_minor));
    sc.surface.length = f.num("surface.length", sc.surface.length);
    sc.surface.res_axial = static_cast<int>(f.integer("surface.res_axial", sc.surface.res_axial));
    sc.surface.res_around =
        static_cast<int>(f.integer("surface.res_around", sc.surface.res_around));
    sc.surface.neck_radius = f.num("surface.neck_radius", sc.surface.neck_radius);
    sc.surface.half = f.num("surface.half", sc.surface.half);
    sc.surface.grid = static_cast<int>(f.integer("surface.grid", sc.surface.grid));
    sc.surface.path = f.str("surface.path", "");

    sc.force.kind = f.str("force.kind", "zero");
    sc.force.vector = f.vec3("force.vector", sc.force.vector);
    sc.force.bound = f.num("force.bound", sc.force.bound);
    sc.force.bounding_radius = f.num("force.bounding_radius", sc.force.bounding_radius);

    sc.policy.safety_factor = f.num("policy.safety_factor", sc.policy.safety_factor);
    sc.policy.dt_ceiling = f.num("policy.dt_ceiling", sc.policy.dt_ceiling);
    sc.policy.dt_floor = f.num("policy.dt_floor", sc.policy.dt_floor);
    sc.policy.max_displacement_frac =
        f.num("policy.max_displacement_frac", sc.policy.max_displacement_frac);
    sc.policy.blowup_threshold_coeff =
        f.num("policy.blowup_threshold_coeff", sc.policy.blowup_threshold_coeff);
    sc.policy.snapshot_cadence = f.num("policy.snapshot_cadence", sc.policy.snapshot_cadence);
    sc.policy.tail_ratio = f.num("policy.tail_ratio", sc.policy.tail_ratio);
    sc.policy.dense_ring_size =
        static_cast<int>(f.integer("policy.dense_ring_size", sc.policy.dense_ring_size));
    sc.policy.tangential_smoothing =
        f.num("policy.tangential_smoothing", sc.policy.tangential_smoothing);

    sc.t_end = f.num("run.t_end", sc.t_end);

    sc.diagnostics.ledger = f.boolean("diagnostics.ledger", sc.diagnostics.ledger);
    std::string center = f.str("diagnostics.center", "auto");
    if (center != "auto") {
        std::istringstream ss(center);
        Vec3 y;
        double s;
        if (!(ss >> y.x() >> y.y() >> y.z() >> s))
            fail(ErrorCode::ConfigInvalid, "diagnostics.center: expected 'auto' or 4 numbers");
        sc.diagnostics.auto_center = false;
        sc.diagnostics.center = {y, s};
    }
    sc.diagnostics.entropy_stride =
        static_cast<int>(f.integer("diagnostics.entropy_stride", sc.diagnostics.entropy_stride));
    sc.diagnostics.area_ratio_samples = static_cast<int>(
        f.integer("diagnostics.area_ratio_samples", sc.diagnostics.area_ratio_samples));

    sc.blowup.enabled = f.boolean("blowup.enabled", sc.blowup.enabled);
    std::string point = f.str("blowup.point", "auto");
    if (point != "auto") {
        std::istringstream ss(point);
        Vec3 y;
        double s;
        if (!(ss >> y.x() >> y.y() >> y.z() >> s))
            fail(ErrorCode::ConfigInvalid, "blowup.point: expected 'auto' or 4 numbers");
        sc.blowup.auto_point = false;
        sc.blowup.y = y;
        sc.blowup.s = s;
    }
    sc.blowup.alpha_ladder = f.numbers("blowup.alpha_ladder", sc.blowup.alpha_ladder);
    sc.blowup.eps0 = f.num("blowup.eps0", sc.blowup.eps0);
    sc.blowup.r_cover = f.num("blowup.r_cover", sc.blowup.r_cover);

    sc.output_dir = f.str("output.dir", "out/" + sc.name);

    for (const auto& [key, value] : f.map)
        if (!f.consumed.count(key))
            fail(ErrorCode::ConfigInvalid, "unknown config key: " + key);

    sc.validate();
    return sc;
}

TriMesh build_initial_surface(const SurfaceSpec& spec) {
    if (spec.kind == "sphere") return shapes::icosphere(spec.radius, spec.level, spec.center);
    if (spec.kind == "torus")
        return shapes::torus(spec.major_radius, spec.tube_radius, spec.res_major, spec.res_minor);
    if (spec.kind == "capsule")
        return shapes::capsule(spec.radius, spec.length, spec.res_axial, spec.res_around);
    if (spec.kind == "dumbbell")
        return shapes::dumbbell(spec.neck_radius, spec.res_axial, spec.res_around);
    if (spec.kind == "box") return shapes::box_grid(spec.half, spec.grid);
    if (spec.kind == "file") {
        if (spec.path.size() > 4 && spec.path.substr(spec.path.size() - 4) == ".obj")
            return read_obj(spec.path);
        return read_off(spec.path);
    }
    fail(ErrorCode::ConfigInvalid, "surface.kind: unknown value '" + spec.kind + "'");
}

std::string resolve_output_dir(const std::string& configured) {
    const char* root = std::getenv("MCFLAB_OUT_ROOT");
    fs::path p(configured);
    if (root != nullptr && p.is_relative()) return (fs::path(root) / p).string();
    return configured;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json scenario_json(const Scenario& sc) {
    json j;
    j["name"] = sc.name;
    j["seed"] = sc.seed;
    j["surface"] = {{"kind", sc.surface.kind},       {"radius", sc.surface.radius},
                    {"level", sc.surface.level},     {"center", vec_json(sc.surface.center)},
                    {"major_radius", sc.surface.major_radius},
                    {"tube_radius", sc.surface.tube_radius},
                    {"res_major", sc.surface.res_major},
                    {"res_minor", sc.surface.res_minor},
                    {"length", sc.surface.length},   {"res_axial", sc.surface.res_axial},
                    {"res_around", sc.surface.res_around},
                    {"neck_radius", sc.surface.neck_radius},
                    {"half", sc.surface.half},       {"grid", sc.surface.grid},
                    {"path", sc.surface.path}};
    j["force"] = {{"kind", sc.force.kind},
                  {"vector", vec_json(sc.force.vector)},
                  {"bound", sc.force.bound},
                  {"bounding_radius", sc.force.bounding_radius}};
    j["policy"] = {{"safety_factor", sc.policy.safety_factor},
                   {"dt_ceiling", sc.policy.dt_ceiling},
                   {"dt_floor", sc.policy.dt_floor},
                   {"max_displacement_frac", sc.policy.max_displacement_frac},
                   {"blowup_threshold_coeff", sc.policy.blowup_threshold_coeff},
                   {"snapshot_cadence", sc.policy.snapshot_cadence},
                   {"tail_ratio", sc.policy.tail_ratio},
                   {"dense_ring_size", sc.policy.dense_ring_size},
                   {"tangential_smoothing", sc.policy.tangential_smoothing}};
    j["run"] = {{"t_end", sc.t_end}};
    j["diagnostics"] = {{"ledger", sc.diagnostics.ledger},
                        {"entropy_stride", sc.diagnostics.entropy_stride},
                        {"area_ratio_samples", sc.diagnostics.area_ratio_samples}};
    j["blowup"] = {{"enabled", sc.blowup.enabled},
                   {"alpha_ladder", sc.blowup.alpha_ladder},
                   {"eps0", sc.blowup.eps0},
                   {"r_cover", sc.blowup.r_cover}};
    j["output"] = {{"dir", sc.output_dir}};
    return j;
}

json blowup_json(const BlowupReport& rep) {
    json j;
    j["y"] = vec_json(rep.y);
    j["s"] = rep.s;
    j["s_estimate"] = rep.s_estimate;
    j["s_refined"] = rep.s_refined;
    j["eps0"] = rep.eps0;
    j["r_cover"] = rep.r_cover;
    j["source_scaling_slope"] = rep.source_scaling_slope;
    j["ladder"] = json::array();
    for (const auto& e : rep.ladder) {
        j["ladder"].push_back({{"alpha", e.alpha},
                               {"tau", e.tau},
                               {"t_selected", e.t_selected},
                               {"eps_shrink", e.eps_shrink},
                               {"self_similarity", e.self_similarity},
                               {"source_integral", e.source_integral},
                               {"low_resolution", e.low_resolution},
                               {"pigeonhole_failed", e.pigeonhole_failed}});
    }
    j["concentration"] = json::object();
    j["concentration"]["count_bound"] = rep.concentration.count_bound;
    j["concentration"]["count_ok"] = rep.concentration.count_ok;
    j["concentration"]["points"] = json::array();
    for (const auto& q : rep.concentration.points)
        j["concentration"]["points"].push_back(
            {{"position", vec_json(q.position)}, {"mass", q.mass}, {"flags", q.flags}});
    return j;
}

} // namespace

RunSummary run_scenario(const Scenario& scenario) {
    scenario.validate();
    const std::string run_dir = resolve_output_dir(scenario.output_dir);
    fs::create_directories(fs::path(run_dir) / "snapshots");

    TriMesh initial = build_initial_surface(scenario.surface);
    ForceSpec force = scenario.force.make();
    FlowTrajectory traj = evolve(initial, force, scenario.policy, scenario.t_end);

    RunSummary summary;
    summary.run_dir = run_dir;
    summary.status = traj.status();
    summary.snapshot_count = traj.size();

    if (traj.status().kind == FlowStatusKind::SingularAt) {
        try {
            summary.singular_estimate = singular_point_estimate(traj);
        } catch (const FlowError&) {
            summary.singular_estimate = std::nullopt;
        }
    }

    // Kernel center for the ledger columns.
    KernelCenter center = scenario.diagnostics.center;
    if (scenario.diagnostics.auto_center) {
        if (summary.singular_estimate) {
            center = {summary.singular_estimate->first, summary.singular_estimate->second};
        } else {
            Vec3 c = Vec3::Zero();
            for (const auto& v : initial.vertices()) c += v;
            c /= initial.vertex_count();
            center = {c, traj.end_time() + (traj.end_time() - traj.start_time())};
        }
    }

    MonotonicityLedger ledger;
    if (scenario.diagnostics.ledger)
        ledger = monotonicity_ledger(traj, center, force);

    // Budgeted per-snapshot searches for the heavy columns.
    EntropySearchParams entropy_budget;
    entropy_budget.grid = 3;
    entropy_budget.tau_seeds = 5;
    entropy_budget.curvature_seeds = 5;
    entropy_budget.refine_starts = 2;

    std::ofstream csv(fs::path(run_dir) / "diagnostics.csv");
    csv << "index,t,dt,dense,area,volume,max_a2,mean_edge,G,D,S,intD,intS,entropy_lb,area_ratio_"
           "lb\n";
    size_t ledger_pos = 0;
    const int stride = scenario.diagnostics.entropy_stride;
    for (int i = 0; i < traj.size(); ++i) {
        const Snapshot& s = traj.snapshot(i);
        csv << i << ',' << fmt(s.t) << ',' << fmt(s.dt_used) << ',' << (s.dense ? 1 : 0) << ','
            << fmt(s.mesh.total_area()) << ',' << fmt(s.mesh.enclosed_volume()) << ','
            << fmt(s.max_a2) << ',' << fmt(s.mesh.mean_edge_length());
        while (ledger_pos < ledger.rows.size() && ledger.rows[ledger_pos].t < s.t - 1e-15)
            ++ledger_pos;
        if (ledger_pos < ledger.rows.size() &&
            std::abs(ledger.rows[ledger_pos].t - s.t) < 1e-12) {
            const LedgerRow& row = ledger.rows[ledger_pos];
            csv << ',' << fmt(row.gaussian_area) << ',' << fmt(row.dissipation) << ','
                << fmt(row.source) << ',' << fmt(row.int_dissipation) << ','
                << fmt(row.int_source);
        } else {
            csv << ",,,,,";
        }
        bool heavy = stride > 0 && (i % stride == 0 || i + 1 == traj.size());
        if (heavy) {
            EntropyResult e = entropy(s.mesh, entropy_budget);
            AreaRatioResult a =
                area_ratio_sup(s.mesh, scenario.diagnostics.area_ratio_samples, scenario.seed, 20);
            csv << ',' << fmt(e.value) << ',' << fmt(a.value);
        } else {
            csv << ",,";
        }
        csv << '\n';
    }
    csv.close();

    json manifest;
    manifest["name"] = scenario.name;
    manifest["seed"] = scenario.seed;
    manifest["scenario"] = scenario_json(scenario);
    manifest["status"] = {{"kind", traj.status().kind == FlowStatusKind::SingularAt
                                       ? "singular"
                                       : "completed"},
                          {"time", traj.status().time},
                          {"location", vec_json(traj.status().location)}};
    if (summary.singular_estimate)
        manifest["singular_estimate"] = {{"y", vec_json(summary.singular_estimate->first)},
                                         {"s", summary.singular_estimate->second}};
    manifest["kernel_center"] = {{"y", vec_json(center.y)}, {"s", center.s}};
    manifest["constants"] = {{"c_test", 32.0},
                             {"c_lemma_base", 1.0},
                             {"ledger_tolerance", 0.02},
                             {"entropy_growth_tolerance", 1.02}};

    manifest["snapshots"] = json::array();
    std::vector<std::string> files = {"diagnostics.csv"};
    for (int i = 0; i < traj.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "snapshots/snap_%06d.off", i);
        write_off(traj.snapshot(i).mesh, (fs::path(run_dir) / name).string());
        manifest["snapshots"].push_back({{"index", i},
                                         {"t", traj.snapshot(i).t},
                                         {"dt", traj.snapshot(i).dt_used},
                                         {"dense", traj.snapshot(i).dense},
                                         {"max_a2", traj.snapshot(i).max_a2},
                                         {"file", name}});
        files.push_back(name);
    }

    const bool want_blowup =
        scenario.blowup.enabled &&
        (!scenario.blowup.auto_point || traj.status().kind == FlowStatusKind::SingularAt);
    if (want_blowup) {
        BlowupParams bp;
        bp.alpha_ladder = scenario.blowup.alpha_ladder;
        bp.concentration.eps0 = scenario.blowup.eps0;
        bp.concentration.r_cover = scenario.blowup.r_cover;
        bp.concentration.entropy_bound = entropy(initial, entropy_budget).value;
        if (!scenario.blowup.auto_point) {
            bp.center_override = scenario.blowup.y;
            bp.time_override = scenario.blowup.s;
        }
        BlowupReport rep = run_blowup_pipeline(traj, force, bp);
        std::ofstream out(fs::path(run_dir) / "blowup_report.json");
        out << blowup_json(rep).dump(2) << '\n';
        files.push_back("blowup_report.json");
        fs::create_directories(fs::path(run_dir) / "slices");
        for (size_t k = 0; k < rep.slices.size(); ++k) {
            char name[64];
            std::snprintf(name, sizeof(name), "slices/slice_%02d.off", static_cast<int>(k));
            write_off(rep.slices[k].mesh, (fs::path(run_dir) / name).string());
            files.push_back(name);
        }
        summary.blowup_written = true;
    }

    files.push_back("manifest.json");
    std::sort(files.begin(), files.end());
    manifest["files"] = files;
    std::ofstream mout(fs::path(run_dir) / "manifest.json");
    mout << manifest.dump(2) << '\n';
    return summary;
}

FlowTrajectory load_trajectory(const std::string& run_dir) {
    fs::path dir(run_dir);
    std::ifstream min(dir / "manifest.json");
    if (!min) fail(ErrorCode::MissingArtifacts, "manifest.json not found in " + run_dir);
    json manifest;
    try {
        min >> manifest;
    } catch (const std::exception& e) {
        fail(ErrorCode::MissingArtifacts, std::string("manifest.json unreadable: ") + e.what());
    }

    FlowTrajectory traj;
    for (const auto& snap : manifest.at("snapshots")) {
        Snapshot s;
        s.t = snap.at("t").get<double>();
        s.dt_used = snap.at("dt").get<double>();
        s.dense = snap.at("dense").get<bool>();
        s.max_a2 = snap.at("max_a2").get<double>();
        fs::path file = dir / snap.at("file").get<std::string>();
        if (!fs::exists(file))
            fail(ErrorCode::MissingArtifacts, "missing snapshot file: " + file.string());
        s.mesh = read_off(file.string());
        traj.snapshots_.push_back(std::move(s));
    }
    if (traj.snapshots_.empty()) fail(ErrorCode::MissingArtifacts, "run has no snapshots");

    std::string kind = manifest.at("status").at("kind").get<std::string>();
    traj.status_.kind =
        kind == "singular" ? FlowStatusKind::SingularAt : FlowStatusKind::Completed;
    traj.status_.time = manifest.at("status").at("time").get<double>();
    auto loc = manifest.at("status").at("location");
    traj.status_.location = {loc[0].get<double>(), loc[1].get<double>(), loc[2].get<double>()};
    return traj;
}

bool VerifyReport::all_pass() const {
    for (const auto& r : rows)
        if (!r.pass) return false;
    return true;
}

VerifyReport verify_suite(const Scenario& scenario) {
    const std::string run_dir = resolve_output_dir(scenario.output_dir);
    fs::path dir(run_dir);
    std::ifstream min(dir / "manifest.json");
    if (!min) fail(ErrorCode::MissingArtifacts, "manifest.json not found in " + run_dir);
    json manifest;
    try {
        min >> manifest;
    } catch (const std::exception& e) {
        fail(ErrorCode::MissingArtifacts, std::string("manifest.json unreadable: ") + e.what());
    }
    for (const auto& f : manifest.at("files")) {
        if (!fs::exists(dir / f.get<std::string>()))
            fail(ErrorCode::MissingArtifacts, "missing artifact: " + f.get<std::string>());
    }

    // CSV integrity: one row per snapshot.
    {
        std::ifstream csv(dir / "diagnostics.csv");
        std::string line;
        long rows = -1; // header
        while (std::getline(csv, line))
            if (!trim(line).empty()) ++rows;
        if (rows != static_cast<long>(manifest.at("snapshots").size()))
            fail(ErrorCode::MissingArtifacts, "diagnostics.csv truncated: " +
                                                  std::to_string(rows) + " rows vs " +
                                                  std::to_string(manifest.at("snapshots").size()) +
                                                  " snapshots");
    }

    FlowTrajectory traj = load_trajectory(run_dir);
    ForceSpec force = scenario.force.make();
    VerifyReport report;

    auto add_row = [&](const std::string& label, double lhs, double rhs, bool pass) {
        VerifyRow row;
        row.label = label;
        row.lhs = lhs;
        row.rhs = rhs;
        row.margin = (rhs - lhs) / (std::abs(rhs) > 0 ? std::abs(rhs) : 1.0);
        row.pass = pass;
        report.rows.push_back(row);
    };

    // Gaussian-weighted monotonicity (both forms).
    {
        KernelCenter center;
        auto kc = manifest.at("kernel_center");
        center.y = {kc.at("y")[0].get<double>(), kc.at("y")[1].get<double>(),
                    kc.at("y")[2].get<double>()};
        center.s = kc.at("s").get<double>();
        MonotonicityLedger ledger = monotonicity_ledger(traj, center, force);
        double excess = ledger.worst_pair_excess();
        add_row("gaussian-monotonicity", excess, 0.02, excess <= 0.02);
        double excess1 = ledger.worst_pair_excess_one_sided();
        add_row("one-sided-monotonicity", excess1, 0.02, excess1 <= 0.02);
    }

    // Entropy growth from the recorded columns.
    {
        std::ifstream csv(dir / "diagnostics.csv");
        std::string line;
        std::getline(csv, line); // header
        std::vector<std::pair<double, double>> entropy_rows;
        while (std::getline(csv, line)) {
            std::vector<std::string> cells;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) cells.push_back(cell);
            if (cells.size() >= 14 && !cells[13].empty())
                entropy_rows.push_back({std::stod(cells[1]), std::stod(cells[13])});
        }
        if (entropy_rows.size() >= 2) {
            const double b2 = force.bound() * force.bound();
            double worst = 0;
            const auto& [t0, lam0] = entropy_rows.front();
            for (const auto& [t, lam] : entropy_rows)
                worst = std::max(worst, lam / (std::exp(b2 * (t - t0) / 4.0) * lam0));
            add_row("entropy-growth", worst, 1.02, worst <= 1.02);
        }
    }

    // Local area bound around a surface point of the initial slice.
    {
        const TriMesh& first = traj.snapshot(0).mesh;
        double span = traj.end_time() - traj.start_time();
        double r = std::min(0.25 * first.bounding_box().diameter(), std::sqrt(12.0 * span));
        Vec3 x0 = first.vertex(0);
        double t0 = traj.start_time() + r * r / 16.0;
        double c_lemma = 1.0 + force.bound() * force.bound();
        LocalAreaBoundReport rep = local_area_bound_check(traj, x0, r, t0, c_lemma);
        double worst_ratio = 0;
        for (const auto& row : rep.rows)
            if (row.rhs > 0) worst_ratio = std::max(worst_ratio, row.lhs / row.rhs);
        add_row("local-area-bound", worst_ratio, 1.0, rep.holds);
    }

    // Local Gauss-Bonnet on the first and last snapshots.
    for (int which : {0, traj.size() - 1}) {
        const TriMesh& mesh = traj.snapshot(which).mesh;
        double diam = mesh.bounding_box().diameter();
        GaussBonnetReport rep = local_gauss_bonnet_check(mesh, mesh.vertex(0), 0.25 * diam,
                                                         0.5 * diam, 0.5);
        add_row(which == 0 ? "gauss-bonnet-local[first]" : "gauss-bonnet-local[last]", rep.lhs,
                rep.rhs, rep.holds(0.05));
    }

    // Concentration count from the stored blow-up report.
    if (fs::exists(dir / "blowup_report.json")) {
        std::ifstream bin(dir / "blowup_report.json");
        json rep;
        bin >> rep;
        double count = rep.at("concentration").at("points").size();
        double bound = rep.at("concentration").at("count_bound").get<double>();
        add_row("concentration-count", count, bound, count <= bound);
    }

    // Area growth <-> entropy equivalence on the initial slice.
    {
        EquivalenceReport eq = check_area_entropy_equivalence(traj.snapshot(0).mesh);
        double worst = std::max(eq.ratio_area_over_entropy, eq.ratio_entropy_over_area);
        add_row("area-entropy-equivalence", worst, 32.0, eq.within(32.0));
    }
    return report;
}

namespace {

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::vector<Series>& series) {
    const int w = 720, h = 420, ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series) {
        for (auto [x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (xmin > xmax) {
        xmin = 0;
        xmax = 1;
        ymin = 0;
        ymax = 1;
    }
    if (ymax - ymin < 1e-12) {
        ymax += 1;
        ymin -= 1;
    }
    auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
    auto sy = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    std::ofstream out(path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << w / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
        << "</text>\n";
    out << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr << "' y2='" << h - mb
        << "' stroke='black'/>\n";
    out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << h - mb
        << "' stroke='black'/>\n";
    for (int k = 0; k <= 4; ++k) {
        double x = xmin + (xmax - xmin) * k / 4;
        double y = ymin + (ymax - ymin) * k / 4;
        out << "<text x='" << sx(x) << "' y='" << h - mb + 18
            << "' text-anchor='middle' font-size='11'>" << x << "</text>\n";
        out << "<text x='" << ml - 8 << "' y='" << sy(y) + 4
            << "' text-anchor='end' font-size='11'>" << y << "</text>\n";
    }
    int ci = 0;
    for (const auto& s : series) {
        const char* color = colors[ci % 5];
        out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (auto [x, y] : s.points) out << sx(x) << ',' << sy(y) << ' ';
        out << "'/>\n";
        out << "<text x='" << w - mr - 8 << "' y='" << mt + 16 * ci
            << "' text-anchor='end' font-size='12' fill='" << color << "'>" << s.name
            << "</text>\n";
        ++ci;
    }
    out << "</svg>\n";
}

} // namespace

std::vector<std::string> write_plots(const std::string& run_dir) {
    fs::path dir(run_dir);
    if (!fs::exists(dir / "diagnostics.csv"))
        fail(ErrorCode::MissingArtifacts, "diagnostics.csv not found in " + run_dir);
    fs::create_directories(dir / "plots");
    std::vector<std::string> written;

    Series g{"G", {}}, d{"D", {}}, s{"S", {}}, area{"area", {}};
    std::ifstream csv(dir / "diagnostics.csv");
    std::string line;
    std::getline(csv, line);
    while (std::getline(csv, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() < 13) continue;
        double t = std::stod(cells[1]);
        area.points.push_back({t, std::stod(cells[4])});
        if (!cells[8].empty()) {
            g.points.push_back({t, std::stod(cells[8])});
            d.points.push_back({t, std::stod(cells[9])});
            s.points.push_back({t, std::stod(cells[10])});
        }
    }
    std::string gds = (dir / "plots" / "monotonicity.svg").string();
    write_svg_chart(gds, "Gaussian-weighted area / dissipation / source", {g, d, s});
    written.push_back(gds);
    std::string area_path = (dir / "plots" / "area.svg").string();
    write_svg_chart(area_path, "total area", {area});
    written.push_back(area_path);

    if (fs::exists(dir / "blowup_report.json")) {
        std::ifstream bin(dir / "blowup_report.json");
        json rep;
        bin >> rep;
        Series eps{"eps_shrink", {}}, src{"source", {}};
        for (const auto& e : rep.at("ladder")) {
            eps.points.push_back(
                {std::log10(e.at("alpha").get<double>()), e.at("eps_shrink").get<double>()});
            double v = e.at("source_integral").get<double>();
            if (v > 0) src.points.push_back({std::log10(e.at("alpha").get<double>()), std::log10(v)});
        }
        std::string ladder = (dir / "plots" / "residual_ladder.svg").string();
        write_svg_chart(ladder, "shrinker residual vs log10 alpha", {eps});
        written.push_back(ladder);
        if (!src.points.empty()) {
            std::string srcp = (dir / "plots" / "source_scaling.svg").string();
            write_svg_chart(srcp, "log10 source vs log10 alpha", {src});
            written.push_back(srcp);
        }
    }
    return written;
}

} // namespace mcf
