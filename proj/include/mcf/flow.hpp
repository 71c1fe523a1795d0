#pragma once

#include <optional>
#include <vector>

#include "mcf/curvature.hpp"
#include "mcf/forces.hpp"
#include "mcf/trimesh.hpp"

namespace mcf {

/// Adaptive step control for the explicit integrator.
struct StepPolicy {
    double safety_factor = 1.5e-4;      // dt <= safety_factor / max |A|^2
    double dt_ceiling = 0.01;
    double dt_floor = 1e-9;
    double max_displacement_frac = 0.2; // per step, of the local mean edge length
    double blowup_threshold_coeff = 64; // singular when max|A|^2 > coeff / mean_edge^2
    double snapshot_cadence = 0.02;
    double tail_ratio = 0.03;           // extra snapshot when 1/max|A|^2 drops by this factor
    int dense_ring_size = 200;          // last raw steps always kept
    // Per-step tangential vertex redistribution weight (0 disables). Purely
    // tangential, so the normal motion and the tracked measures are
    // unchanged to first order; without it triangles shear until the
    // curvature field is meaningless well before the deep blow-up scales.
    double tangential_smoothing = 0.1;

    void validate() const; // throws ConfigInvalid naming the field
};

enum class FlowStatusKind { Running, SingularAt, Completed };

struct FlowStatus {
    FlowStatusKind kind = FlowStatusKind::Running;
    double time = 0;          // singular time estimate or completion time
    Vec3 location = Vec3::Zero(); // max-|A|^2 vertex at detection (SingularAt only)
};

struct Snapshot {
    double t = 0;
    TriMesh mesh;
    double max_a2 = 0;
    double dt_used = 0;
    bool dense = false; // recorded by the tail rule / dense ring, not cadence
};

class FlowTrajectory {
public:
    const std::vector<Snapshot>& snapshots() const { return snapshots_; }
    const Snapshot& snapshot(int i) const { return snapshots_[i]; }
    int size() const { return static_cast<int>(snapshots_.size()); }
    const FlowStatus& status() const { return status_; }
    double start_time() const { return snapshots_.front().t; }
    double end_time() const { return snapshots_.back().t; }

    /// Index of the snapshot closest in time to t.
    int nearest_snapshot(double t) const;

    std::vector<Snapshot> snapshots_;
    FlowStatus status_;
};

/// One forward Euler step x <- x + dt (H + beta). Throws MeshDegenerated
/// rather than returning an invalid mesh; SupNormViolation propagates from
/// the force evaluation.
TriMesh step(const TriMesh& mesh, const ForceSpec& force, double dt);

/// As step(), reusing an already computed curvature field.
TriMesh step(const TriMesh& mesh, const CurvatureField& curvature, const ForceSpec& force,
             double dt);

/// Integrate from `initial` until t_end or singularity detection, recording
/// snapshots at the cadence plus a geometrically refined tail as the
/// curvature scale collapses. The last dense_ring_size raw steps are always
/// retained so slice selection has material near the singular time.
FlowTrajectory evolve(const TriMesh& initial, const ForceSpec& force, const StepPolicy& policy,
                      double t_end, double t_start = 0);

/// Singular spacetime point estimate: the singular time extrapolates the
/// linear trend of 1/max|A|^2 over the dense tail; the location is the
/// |A|^2-weighted centroid of the top-decile vertices of the last snapshot.
/// Throws InsufficientTail with fewer than 8 dense snapshots.
std::pair<Vec3, double> singular_point_estimate(const FlowTrajectory& traj);

} // namespace mcf
