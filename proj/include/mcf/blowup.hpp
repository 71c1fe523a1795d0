#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mcf/curvature.hpp"
#include "mcf/flow.hpp"
#include "mcf/gaussian.hpp"

namespace mcf {

/// One time slice of the parabolic rescaling x -> (x - y)/alpha,
/// t -> (t - s)/alpha^2 about the singular spacetime point (y, s).
struct RescaledSlice {
    double alpha = 1;
    double t_target = -1;   // requested rescaled time
    double t_rescaled = -1; // rescaled time of the snapshot actually used
    TriMesh mesh;           // rescaled coordinates
    CurvatureField curvature;
    double eps_shrink = 0;  // int rho_{0,0} |H + x_perp/(-2t)|^2 dmu
    bool low_resolution = false;   // single-snapshot window
    bool pigeonhole_failed = false; // no slice met both pigeonhole bounds
};

/// Weighted deviation from the shrinker identity at rescaled time t < 0.
/// Throws NonNegativeTime for t >= 0.
double shrinker_residual(const TriMesh& rescaled_mesh, const CurvatureField& curvature,
                         double t_rescaled);
double shrinker_residual(const RescaledSlice& slice);

/// Nearest-snapshot rescaling. time_tol is in rescaled units; throws
/// NoSnapshotNearTarget when no snapshot lies within alpha^2 * time_tol *
/// max(1, |t_target|) of the requested time.
RescaledSlice rescale_slice(const FlowTrajectory& traj, const Vec3& y, double s, double alpha,
                            double t_target, double time_tol = 0.1);

struct SliceSelectParams {
    std::vector<double> r_ladder = {0.5, 1.0, 2.0}; // balls for the |A|^2 census
    double excess_factor = 1.5; // pigeonhole bound: value <= factor * window average
    double time_tol = 0.1;
};

/// Discrete pigeonhole over the rescaled window [-1 - tau, -1]: returns a
/// slice whose ball-restricted |A|^2 masses and shrinker residual are both
/// below excess_factor times the window average (the qualifying slice
/// nearest the window midpoint); falls back to the minimizer of the worst
/// normalized excess with pigeonhole_failed set. Throws WindowNotCovered
/// when no snapshot lies in the window.
RescaledSlice select_time_slice(const FlowTrajectory& traj, const Vec3& y, double s, double alpha,
                                double tau, const SliceSelectParams& params = {});

struct ImprovedH2Report {
    double lhs = 0; // int_{-1-tau}^{-1} int_{B_r(x)} |H|^2
    double rhs = 0; // C tau (r^2 + r R) + residual budget
    double residual_budget = 0;
    double constant = 0;
    bool holds = true;
};

/// Throws WindowNotCovered when fewer than 2 slices cover the window.
ImprovedH2Report improved_h2_check(const FlowTrajectory& traj, const Vec3& y, double s,
                                   double alpha, const Vec3& x, double r, double big_r, double tau,
                                   double constant);

struct ConcentrationPoint {
    Vec3 position = Vec3::Zero();
    double mass = 0; // |A|^2 mass of the merged flagged balls
    int flags = 0;   // lattice balls merged into this point
};

struct ConcentrationParams {
    double eps0 = 0.25;
    double r_cover = 0.2;
    double count_constant = 4.0; // C in |Q cap B_R| <= C (R^2 + 8 pi g + lambda) / eps0
    double genus = 0;
    double entropy_bound = 1.5;
    // Optional analysis region (ball); defaults to the slice bounding box.
    std::optional<Vec3> region_center;
    double region_radius = 0;
};

struct ConcentrationResult {
    std::vector<ConcentrationPoint> points;
    double count_bound = 0;
    bool count_ok = true;
};

/// Flags half-overlapping lattice balls whose |A|^2 mass on the finest
/// slice reaches eps0^2, merges adjacent flags, and returns mass-weighted
/// centroids of the |A|^2 measure restricted to each merged cluster.
ConcentrationResult detect_concentration(const std::vector<RescaledSlice>& slices,
                                         const ConcentrationParams& params = {});

struct SelfSimilarityError {
    double hausdorff_rel = 0; // symmetric Hausdorff / bounding radius
    double area_rel = 0;      // total-area mismatch after lambda^{-2} scaling

    double value() const { return std::max(hausdorff_rel, area_rel); }
};

/// Compares slice_b, spatially rescaled by sqrt(t_a / t_b), against
/// slice_a. Throws EmptySlice on empty vertex sets.
SelfSimilarityError self_similarity_error(const RescaledSlice& a, const RescaledSlice& b);

struct BlowupLadderEntry {
    double alpha = 0;
    double tau = 0;
    double t_selected = 0;
    double eps_shrink = 0;
    double self_similarity = 0; // error against the previous ladder entry
    double source_integral = 0; // rescaled source over the common window
    bool low_resolution = false;
    bool pigeonhole_failed = false;
};

struct BlowupParams {
    std::vector<double> alpha_ladder = {0.4, 0.2, 0.1, 0.05};
    double common_window = 0.2;  // rescaled window for the source-scaling fit
    ConcentrationParams concentration;
    double refine_span = 5e-4;   // singular-time refinement half-width
    bool refine_singular_time = true;
    // Explicit singular spacetime point; bypasses the tail-fit estimate.
    std::optional<Vec3> center_override;
    std::optional<double> time_override;
};

struct BlowupReport {
    Vec3 y = Vec3::Zero();
    double s = 0;          // singular time used (after refinement)
    double s_estimate = 0; // raw tail-fit estimate
    bool s_refined = false;
    std::vector<BlowupLadderEntry> ladder;
    std::vector<RescaledSlice> slices;
    ConcentrationResult concentration;
    double source_scaling_slope = 0; // d log source / d log alpha
    double eps0 = 0;
    double r_cover = 0;
};

/// Full pipeline: singular-point estimate (+ residual-based refinement of
/// s), ladder of selected slices, residual sequence, self-similarity
/// errors, source-term scaling and concentration detection.
BlowupReport run_blowup_pipeline(const FlowTrajectory& traj, const ForceSpec& force,
                                 const BlowupParams& params = {});

} // namespace mcf
