// Scratch probe: systematic bias of the discrete mean curvature operator on
// the level-4 icosphere, and the effective radius law of the Euler flow.
#include <cmath>
#include <cstdio>
#include <vector>

#include "mcf/curvature.hpp"
#include "mcf/flow.hpp"
#include "mcf/shapes.hpp"

using namespace mcf;

int main() {
    for (int level : {3, 4, 5}) {
        TriMesh m = shapes::icosphere(2.0, level);
        CurvatureField c = compute_curvature(m);
        double mean = 0, mn = 1e9, mx = -1e9, wmean = 0, wsum = 0;
        for (int i = 0; i < m.vertex_count(); ++i) {
            double h = c.scalar_mean[i]; // exact value 1 for radius 2
            mean += h;
            wmean += h * m.dual_area(i);
            wsum += m.dual_area(i);
            mn = std::min(mn, h);
            mx = std::max(mx, h);
        }
        mean /= m.vertex_count();
        wmean /= wsum;
        std::printf("level %d: verts %d  H mean %.6f  area-weighted %.6f  min %.6f  max %.6f\n",
                    level, m.vertex_count(), mean, wmean, mn, mx);
        std::printf("  area %.6f (smooth 16pi=%.6f, ratio %.6f)\n", m.total_area(),
                    16 * M_PI, m.total_area() / (16 * M_PI));
    }

    // Effective collapse law: run the flow and compare r(t) to sqrt(4-4t).
    for (double c : {0.0002, 0.00015}) {
        TriMesh m = shapes::icosphere(2.0, 4);
        StepPolicy policy;
        policy.safety_factor = c;
        policy.snapshot_cadence = 0.05;
        policy.dt_floor = 1e-7;
        FlowTrajectory traj = evolve(m, ForceSpec::zero(), policy, 1.5);
        std::printf("safety=%g status: %d  end t=%.6f snapshots=%d\n", c,
                    (int)traj.status().kind, traj.status().time, traj.size());
        double worst = 0;
        for (const auto& s : traj.snapshots()) {
            double r = 0;
            for (const auto& v : s.mesh.vertices()) r += v.norm();
            r /= s.mesh.vertex_count();
            double exact2 = 4 - 4 * s.t;
            if (exact2 <= 0) break;
            double exact = std::sqrt(exact2);
            double rel = (r - exact) / exact;
            if (r >= 0.2) worst = std::max(worst, std::abs(rel));
            bool near_decade = std::abs(r - 0.2) < 0.02 || std::abs(r - 0.45) < 0.02 ||
                               std::abs(r - 1.0) < 0.02;
            if (near_decade)
                std::printf("  t=%.5f  r=%.6f  exact=%.6f  rel=%.3e\n", s.t, r, exact, rel);
            if (r < 0.18) break;
        }
        std::printf("  worst rel (r>=0.2): %.3e\n", worst);
        auto [y, s_est] = singular_point_estimate(traj);
        std::printf("  singular estimate: y=(%.5f, %.5f, %.5f)  s=%.6f\n", y.x(), y.y(), y.z(),
                    s_est);
    }
    return 0;
}
