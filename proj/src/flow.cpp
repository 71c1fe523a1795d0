#include "mcf/flow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "mcf/errors.hpp"

namespace mcf {

void StepPolicy::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0))
            fail(ErrorCode::ConfigInvalid, std::string("policy.") + name + " must be positive");
    };
    positive(safety_factor, "safety_factor");
    if (safety_factor >= 1)
        fail(ErrorCode::ConfigInvalid, "policy.safety_factor must be in (0,1)");
    positive(dt_ceiling, "dt_ceiling");
    positive(dt_floor, "dt_floor");
    if (dt_floor >= dt_ceiling)
        fail(ErrorCode::ConfigInvalid, "policy.dt_floor must be below dt_ceiling");
    positive(max_displacement_frac, "max_displacement_frac");
    positive(blowup_threshold_coeff, "blowup_threshold_coeff");
    positive(snapshot_cadence, "snapshot_cadence");
    positive(tail_ratio, "tail_ratio");
    if (dense_ring_size < 8)
        fail(ErrorCode::ConfigInvalid, "policy.dense_ring_size must be at least 8");
    if (tangential_smoothing < 0 || tangential_smoothing >= 1)
        fail(ErrorCode::ConfigInvalid, "policy.tangential_smoothing must be in [0,1)");
}

int FlowTrajectory::nearest_snapshot(double t) const {
    int best = 0;
    double dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < size(); ++i) {
        double d = std::abs(snapshots_[i].t - t);
        if (d < dist) {
            dist = d;
            best = i;
        }
    }
    return best;
}

TriMesh step(const TriMesh& mesh, const ForceSpec& force, double dt) {
    return step(mesh, compute_curvature(mesh), force, dt);
}

TriMesh step(const TriMesh& mesh, const CurvatureField& curvature, const ForceSpec& force,
             double dt) {
    if (!(dt > 0)) fail(ErrorCode::ConfigInvalid, "step dt must be positive");
    std::vector<Vec3> beta = eval_force(force, mesh, curvature);
    std::vector<Vec3> next = mesh.vertices();
    for (int i = 0; i < mesh.vertex_count(); ++i)
        next[i] += dt * (curvature.mean_curvature[i] + beta[i]);
    TriMesh out = mesh;
    out.set_vertices(std::move(next)); // throws MeshDegenerated on collapse
    return out;
}

namespace {

Vec3 max_curvature_location(const TriMesh& mesh, const CurvatureField& curvature) {
    int best = 0;
    for (int i = 1; i < mesh.vertex_count(); ++i)
        if (curvature.a_norm2[i] > curvature.a_norm2[best]) best = i;
    return mesh.vertex(best);
}

/// Largest stable/accurate step at the current state.
double choose_dt(const TriMesh& mesh, const CurvatureField& curvature,
                 const std::vector<Vec3>& beta, const StepPolicy& policy, double max_a2) {
    double dt = policy.dt_ceiling;
    if (max_a2 > 0) dt = std::min(dt, policy.safety_factor / max_a2);

    // Displacement cap: no vertex moves more than the configured fraction
    // of its local mean edge length.
    for (int i = 0; i < mesh.vertex_count(); ++i) {
        double speed = (curvature.mean_curvature[i] + beta[i]).norm();
        if (speed <= 0) continue;
        double h = mesh.vertex_mean_edge(i);
        if (h > 0) dt = std::min(dt, policy.max_displacement_frac * h / speed);
    }
    return dt;
}

struct RawStep {
    double t;
    std::vector<Vec3> positions;
    double max_a2;
    double dt;
};

/// Jacobi-style tangential redistribution: each interior vertex relaxes
/// toward its ring centroid with the normal component removed.
void smooth_tangentially(const TriMesh& mesh, double weight, std::vector<Vec3>& pos) {
    const std::vector<Vec3> before = pos;
    for (int i = 0; i < mesh.vertex_count(); ++i) {
        if (mesh.is_boundary_vertex(i)) continue;
        const auto& ring = mesh.vertex_ring(i);
        if (ring.empty()) continue;
        Vec3 centroid = Vec3::Zero();
        for (int j : ring) centroid += before[j];
        centroid /= static_cast<double>(ring.size());
        Vec3 d = centroid - before[i];
        const Vec3& n = mesh.vertex_normal(i);
        pos[i] += weight * (d - d.dot(n) * n);
    }
}

} // namespace

FlowTrajectory evolve(const TriMesh& initial, const ForceSpec& force, const StepPolicy& policy,
                      double t_end, double t_start) {
    policy.validate();
    if (!(t_end > t_start)) fail(ErrorCode::ConfigInvalid, "t_end must exceed start time");

    FlowTrajectory traj;
    TriMesh mesh = initial;
    CurvatureField curvature;
    compute_curvature(mesh, curvature);
    double t = t_start;

    std::deque<RawStep> ring;
    double max_a2 = curvature.max_a_norm2();
    traj.snapshots_.push_back({t, mesh, max_a2, 0.0, false});
    double u_last_record = max_a2 > 0 ? 1.0 / max_a2 : std::numeric_limits<double>::infinity();
    long cadence_index = 0;

    traj.status_.kind = FlowStatusKind::Running;
    std::vector<Vec3> pos;
    while (t < t_end) {
        const double threshold =
            policy.blowup_threshold_coeff / (mesh.mean_edge_length() * mesh.mean_edge_length());
        if (max_a2 > threshold) {
            traj.status_ = {FlowStatusKind::SingularAt, t, max_curvature_location(mesh, curvature)};
            break;
        }

        // SupNormViolation from the force is a configuration error and
        // propagates; only mesh collapse converts to singular status.
        std::vector<Vec3> beta = eval_force(force, mesh, curvature);

        double dt = choose_dt(mesh, curvature, beta, policy, max_a2);
        if (dt < policy.dt_floor) {
            traj.status_ = {FlowStatusKind::SingularAt, t, max_curvature_location(mesh, curvature)};
            break;
        }
        bool final_step = false;
        if (t + dt >= t_end) {
            dt = t_end - t;
            final_step = true;
        }

        pos = mesh.vertices();
        for (int i = 0; i < mesh.vertex_count(); ++i)
            pos[i] += dt * (curvature.mean_curvature[i] + beta[i]);
        if (policy.tangential_smoothing > 0)
            smooth_tangentially(mesh, policy.tangential_smoothing, pos);
        try {
            mesh.set_vertices(std::move(pos));
        } catch (const FlowError& e) {
            if (e.code() != ErrorCode::MeshDegenerated) throw;
            traj.status_ = {FlowStatusKind::SingularAt, t, max_curvature_location(mesh, curvature)};
            break;
        }

        t += dt;
        compute_curvature(mesh, curvature);
        max_a2 = curvature.max_a_norm2();

        ring.push_back({t, mesh.vertices(), max_a2, dt});
        if (static_cast<int>(ring.size()) > policy.dense_ring_size) ring.pop_front();

        const double u = max_a2 > 0 ? 1.0 / max_a2 : std::numeric_limits<double>::infinity();
        long new_cadence = static_cast<long>(std::floor((t - t_start) / policy.snapshot_cadence));
        bool record_cadence = new_cadence > cadence_index || final_step;
        bool record_tail = u < u_last_record * (1.0 - policy.tail_ratio);
        if (record_cadence || record_tail) {
            traj.snapshots_.push_back({t, mesh, max_a2, dt, !record_cadence});
            cadence_index = std::max(cadence_index, new_cadence);
            u_last_record = u;
        }
    }
    if (traj.status_.kind == FlowStatusKind::Running)
        traj.status_ = {FlowStatusKind::Completed, t, Vec3::Zero()};

    // Merge the raw dense ring so the final steps are always available.
    for (auto& s : ring) {
        bool present = false;
        for (const auto& existing : traj.snapshots_)
            if (existing.t == s.t) {
                present = true;
                break;
            }
        if (present) continue;
        TriMesh m = mesh; // shares topology; positions replaced below
        m.set_vertices(std::move(s.positions));
        traj.snapshots_.push_back({s.t, std::move(m), s.max_a2, s.dt, true});
    }
    std::sort(traj.snapshots_.begin(), traj.snapshots_.end(),
              [](const Snapshot& a, const Snapshot& b) { return a.t < b.t; });
    return traj;
}

std::pair<Vec3, double> singular_point_estimate(const FlowTrajectory& traj) {
    if (traj.status().kind != FlowStatusKind::SingularAt)
        fail(ErrorCode::InsufficientTail, "trajectory did not end in a singularity");

    std::vector<std::pair<double, double>> tail; // (t, 1/max|A|^2)
    for (const auto& s : traj.snapshots())
        if (s.dense && s.max_a2 > 0) tail.push_back({s.t, 1.0 / s.max_a2});
    if (tail.size() < 8)
        fail(ErrorCode::InsufficientTail,
             "need at least 8 dense snapshots, have " + std::to_string(tail.size()));
    const size_t use = std::min<size_t>(tail.size(), 40);
    tail.erase(tail.begin(), tail.end() - use);

    // Least-squares line u = a + b t; the singular time is the root.
    double st = 0, su = 0, stt = 0, stu = 0;
    const double n = static_cast<double>(tail.size());
    for (const auto& [tt, uu] : tail) {
        st += tt;
        su += uu;
        stt += tt * tt;
        stu += tt * uu;
    }
    const double denom = n * stt - st * st;
    const double b = (n * stu - st * su) / denom;
    const double a = (su - b * st) / n;
    double s_est = b < 0 ? -a / b : tail.back().first;

    // Location: |A|^2-weighted centroid of the top-decile vertices.
    const Snapshot& last = traj.snapshots().back();
    CurvatureField curvature = compute_curvature(last.mesh);
    std::vector<double> sorted = curvature.a_norm2;
    std::sort(sorted.begin(), sorted.end());
    const double cutoff = sorted[static_cast<size_t>(0.9 * (sorted.size() - 1))];
    Vec3 centroid = Vec3::Zero();
    double mass = 0;
    for (int i = 0; i < last.mesh.vertex_count(); ++i) {
        if (curvature.a_norm2[i] >= cutoff) {
            double w = curvature.a_norm2[i] * last.mesh.dual_area(i);
            centroid += w * last.mesh.vertex(i);
            mass += w;
        }
    }
    if (mass > 0) centroid /= mass;
    return {centroid, s_est};
}

} // namespace mcf
