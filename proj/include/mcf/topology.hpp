#pragma once

#include <optional>
#include <vector>

#include "mcf/curvature.hpp"
#include "mcf/trimesh.hpp"

namespace mcf {

struct ComponentInfo {
    int faces = 0;
    int vertices = 0;
    int edges = 0;
    int euler = 0;
    int boundary_loops = 0;
    int genus = 0;    // (2 - chi - b) / 2
    bool closed = true;
    bool meets_inner = false; // intersects the inner ball (c' census)
};

struct TopologyReport {
    std::vector<ComponentInfo> components;
    int component_count = 0;
    int total_genus = 0;
    int c_prime = 0; // components meeting the inner ball
};

/// Per-component Euler characteristic / genus / boundary-loop census.
/// With a region, faces whose centroid lies in the ball are kept (clipped
/// pieces may have boundary); inner_radius feeds the c' count.
TopologyReport genus_and_components(const TriMesh& mesh);
TopologyReport genus_and_components(const TriMesh& mesh, const Vec3& center, double radius,
                                    double inner_radius);

struct GaussBonnetReport {
    double lhs = 0;          // (1 - eps) int_{B_inner} |A|^2
    double h2_integral = 0;  // int_{B_outer} |H|^2
    double genus_term = 0;   // 8 pi g
    double c_prime_term = 0; // 8 pi c'
    double cutoff_term = 0;  // 24 pi R^2 / (eps (R-1)^2)
    double rhs = 0;
    int genus = 0;
    int c_prime = 0;
    double area_ratio_d_prime = 0; // sup_{[1,R]} area(B_r)/(pi r^2), report only

    bool holds(double tol_rel) const { return lhs <= rhs + tol_rel * std::abs(rhs); }
};

/// Local Gauss-Bonnet inequality on the normalized ball pair
/// (inner radius 1 after rescaling, R = r_outer / r_inner > 1).
/// Throws InnerBallEmpty when the inner ball misses the surface.
GaussBonnetReport local_gauss_bonnet_check(const TriMesh& mesh, const Vec3& center,
                                           double r_inner, double r_outer, double eps);

/// A time-stamped mesh view for window integrals over trajectories or
/// rescaled ladders.
struct TimedMesh {
    double t = 0;
    const TriMesh* mesh = nullptr;
    const CurvatureField* curvature = nullptr;
};

struct TimeIntegratedA2Report {
    double lhs = 0; // int_window int_{B_R} |A|^2 dmu dt
    double rhs = 0; // C tau (R^2 + 8 pi g0 + lambda0) + residual_budget
    double constant = 0;
    double window = 0;
    bool holds = true;
};

/// Throws WindowNotCovered when fewer than 2 slices fall in the window.
TimeIntegratedA2Report time_integrated_a2_check(const std::vector<TimedMesh>& slices,
                                                const Vec3& center, double radius, double t_lo,
                                                double t_hi, double constant, double genus_initial,
                                                double entropy_initial, double residual_budget);

struct AllardScanResult {
    std::vector<int> certified; // vertices passing both conditions at some r
    std::vector<int> flagged;   // the complement
};

/// Density/curvature screening: vertex x is certified when for some ladder
/// radius r, sup_{B_r(x)} |H| <= eps_a / r and mu(B_r(x)) <= (1+eps_a) pi r^2.
AllardScanResult allard_condition_scan(const TriMesh& mesh, const CurvatureField& curvature,
                                       const std::vector<double>& r_ladder, double eps_a);

struct AreaPinchingVerdict {
    double component_area = 0;
    double disk_area = 0; // pi r^2
    double lower = 0;     // pi r^2 (1 - C eps^{2 gamma})
    double upper = 0;     // pi r^2 (1 + C eps^gamma)
    double a2_mass = 0;   // int_{B_2r} |A|^2 (precondition)
    bool pass = false;
};

/// Area pinching of the connected component of mesh within B_r(x) through
/// the point nearest x. Throws PreconditionUnverified when the |A|^2 mass
/// in B_{2r}(x) exceeds eps^2.
AreaPinchingVerdict area_pinching_check(const TriMesh& mesh, const CurvatureField& curvature,
                                        const Vec3& x, double r, double eps, double c = 10.0,
                                        double gamma = 1.0 / 6.0);

} // namespace mcf
