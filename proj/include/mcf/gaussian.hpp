#pragma once

#include <cstdint>
#include <vector>

#include "mcf/flow.hpp"
#include "mcf/trimesh.hpp"

namespace mcf {

/// Spacetime center (y, s) of the backward Gaussian weight.
struct KernelCenter {
    Vec3 y = Vec3::Zero();
    double s = 0;
};

/// Backward heat kernel (surface dimension 2):
///   rho_{y,s}(x,t) = (4 pi (s-t))^{-1} exp(-|x-y|^2 / (4 (s-t))).
/// Throws TimeAfterCenter when t >= s.
double heat_kernel(const KernelCenter& center, const Vec3& x, double t);

/// Gaussian-weighted area (4 pi tau)^{-1} int exp(-|x-y|^2/(4 tau)) dmu.
/// Integrals truncate where the kernel tail is below 1e-13 of the total
/// (|x-y| > 12 sqrt(tau)). Throws NonPositiveScale for tau <= 0.
double f_functional(const TriMesh& mesh, const Vec3& y, double tau);

/// int |field|^2 rho dmu and int field rho dmu with the same kernel and
/// truncation as f_functional; per-vertex fields interpolate linearly.
double gaussian_weighted_square(const TriMesh& mesh, const Vec3& y, double tau,
                                const std::vector<Vec3>& field);
double gaussian_weighted_scalar(const TriMesh& mesh, const Vec3& y, double tau,
                                const std::vector<double>& field);

struct EntropySearchParams {
    int grid = 5;           // y seeds per axis over the bounding box
    int tau_seeds = 8;      // log-uniform in [1e-3 d^2, 10 d^2]
    int curvature_seeds = 20; // |A|^2 local maxima added as y seeds
    int refine_starts = 4;  // best seeds refined by Nelder-Mead
    double rel_tol = 1e-4;
    int max_iter = 120;
};

struct EntropyResult {
    double value = 0; // certified lower bound of the supremum
    Vec3 y = Vec3::Zero();
    double tau = 1;
};

/// Entropy lower bound: sup over (y, tau) of the Gaussian-weighted area,
/// by seeded multistart plus simplex refinement. Deterministic.
EntropyResult entropy(const TriMesh& mesh, const EntropySearchParams& params = {});

struct AreaRatioResult {
    double value = 0; // lower bound of sup mu(B_R(x)) / R^2
    Vec3 center = Vec3::Zero();
    double radius = 1;
};

/// Area-ratio supremum lower bound: centers at every vertex_stride-th
/// vertex plus sample_count seeded-random points, radii on a geometric
/// ladder from the min edge length to the diameter.
AreaRatioResult area_ratio_sup(const TriMesh& mesh, int sample_count, std::uint64_t seed = 0,
                               int vertex_stride = 1);

struct EquivalenceReport {
    double entropy_lb = 0;
    double area_ratio_lb = 0;
    double ratio_area_over_entropy = 0;
    double ratio_entropy_over_area = 0;

    bool within(double c) const {
        return ratio_area_over_entropy <= c && ratio_entropy_over_area <= c;
    }
};

/// Both directions of the area-growth <-> entropy equivalence; the test
/// constant lives in the caller (default 32, recorded in reports).
EquivalenceReport check_area_entropy_equivalence(const TriMesh& mesh);

struct LedgerRow {
    double t = 0;
    double gaussian_area = 0; // G
    double dissipation = 0;   // D, force-corrected
    double source = 0;        // S = int |beta|^2/4 rho
    double int_dissipation = 0;
    double int_source = 0;
    double dissipation_one_sided = 0; // without the beta/2 correction
    double source_one_sided = 0;      // int |beta|^2/2 rho
    double int_dissipation_one_sided = 0;
    double int_source_one_sided = 0;
};

struct MonotonicityLedger {
    KernelCenter center;
    std::vector<LedgerRow> rows;

    /// Worst over ordered snapshot pairs of
    ///   [G(t2) + int_t1^t2 D] - [G(t1) + int_t1^t2 S], relative to G(t1).
    /// Nonpositive up to discretization tolerance.
    double worst_pair_excess() const;
    /// Same with the one-sided dissipation/source pair.
    double worst_pair_excess_one_sided() const;
};

/// Evaluates the Gaussian-weighted area, force-corrected dissipation and
/// source per snapshot with trapezoid running integrals. Snapshots with
/// s - t below the kernel-scale floor are skipped. Throws TimeAfterCenter
/// when every snapshot lies at or after s.
MonotonicityLedger monotonicity_ledger(const FlowTrajectory& traj, const KernelCenter& center,
                                       const ForceSpec& force, double kernel_floor = 1e-9);

struct LocalAreaBoundRow {
    double t = 0;
    double lhs = 0; // mu_t(B_{r/2}(x0))
    double rhs = 0; // 8 e^{(C + C/r)(t - t_lo)} mu_{t_lo}(B_r(x0))
};

struct LocalAreaBoundReport {
    double constant = 0; // C used
    double base_area = 0;
    std::vector<LocalAreaBoundRow> rows;
    bool holds = true;
};

/// Local area bound over the window [t0 - r^2/16, t0]. Throws
/// WindowOutOfRange when the window is not covered by the trajectory.
LocalAreaBoundReport local_area_bound_check(const FlowTrajectory& traj, const Vec3& x0, double r,
                                            double t0, double constant);

struct GronwallResult {
    std::vector<double> bound;  // e^{C (t - t0)} f(t0) at the sample times
    bool hypothesis_holds = true;
    bool bound_holds = true;
};

/// Comparison bound: if f(t) <= f(t0) + C int_{t0}^t f (checked by
/// trapezoid), then f(t) <= e^{C(t-t0)} f(t0). Samples must be sorted and
/// nonnegative (NegativeSample otherwise).
GronwallResult gronwall_bound(const std::vector<std::pair<double, double>>& samples, double c,
                              double t0);

} // namespace mcf
