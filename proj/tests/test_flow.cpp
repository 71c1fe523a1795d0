#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mcf/curvature.hpp"
#include "mcf/errors.hpp"
#include "mcf/flow.hpp"
#include "mcf/shapes.hpp"

using namespace mcf;

namespace {

double mean_radius(const TriMesh& m, const Vec3& center = Vec3::Zero()) {
    double r = 0;
    for (const auto& v : m.vertices()) r += (v - center).norm();
    return r / m.vertex_count();
}

} // namespace

TEST_CASE("one Euler step follows the sphere law") {
    TriMesh m = shapes::icosphere(2.0, 4);
    const double dt = 1e-4;
    TriMesh next = step(m, ForceSpec::zero(), dt);
    const double exact = std::sqrt(4 - 4 * dt);
    for (int i = 0; i < next.vertex_count(); ++i) {
        double rel = std::abs(next.vertex(i).norm() - exact) / exact;
        if (m.vertex_ring(i).size() == 6)
            CHECK(rel < 1e-6);
        else
            CHECK(rel < 1e-5); // cone vertices carry the fixed defect excess
    }
}

TEST_CASE("flat regions do not move") {
    TriMesh m = shapes::box_grid(1.0, 10);
    TriMesh next = step(m, ForceSpec::zero(), 1e-5);
    for (int i = 0; i < m.vertex_count(); ++i) {
        const Vec3& v = m.vertex(i);
        if (v.z() == 1.0 && std::abs(v.x()) < 0.5 && std::abs(v.y()) < 0.5)
            CHECK((next.vertex(i) - v).norm() < 1e-14);
    }
}

TEST_CASE("rescaled-flow force holds the radius-2 sphere still") {
    TriMesh m = shapes::icosphere(2.0, 4);
    TriMesh next = step(m, ForceSpec::rescaled_mcf(8.0), 1e-3);
    CHECK(std::abs(mean_radius(next) - mean_radius(m)) < 1e-4);
    for (int i = 0; i < next.vertex_count(); ++i)
        if (m.vertex_ring(i).size() == 6)
            CHECK(std::abs(next.vertex(i).norm() - 2.0) < 1e-4);
}

TEST_CASE("step rejects a degenerate update") {
    TriMesh m = shapes::icosphere(0.01, 1);
    CurvatureField c = compute_curvature(m);
    // overflow the positions: the step must fail, not hand back the mesh
    try {
        step(m, c, ForceSpec::zero(), 1e308);
        CHECK(false);
    } catch (const FlowError& e) {
        CHECK(e.code() == ErrorCode::MeshDegenerated);
    }
    // exact collapse of a face: land vertex 0 on a ring neighbor
    std::vector<Vec3> verts = m.vertices();
    verts[0] = verts[m.vertex_ring(0)[0]];
    try {
        m.set_vertices(verts);
        CHECK(false);
    } catch (const FlowError& e) {
        CHECK(e.code() == ErrorCode::MeshDegenerated);
    }
}

TEST_CASE("shrinking sphere: singularity detection and radius law") {
    StepPolicy policy;
    policy.dt_floor = 1e-7;
    TriMesh m = shapes::icosphere(2.0, 3);
    FlowTrajectory traj = evolve(m, ForceSpec::zero(), policy, 1.5);
    REQUIRE(traj.status().kind == FlowStatusKind::SingularAt);
    CHECK(traj.status().time == doctest::Approx(1.0).epsilon(0.01));
    for (const auto& s : traj.snapshots()) {
        double r = mean_radius(s.mesh);
        if (r < 0.15) break;
        double exact = std::sqrt(4 - 4 * s.t);
        CHECK(std::abs(r - exact) / exact < 0.01);
    }
    auto [y, s_est] = singular_point_estimate(traj);
    CHECK(y.norm() < 0.02);
    CHECK(std::abs(s_est - 1.0) < 0.01);
}

TEST_CASE("singular estimate is translation equivariant") {
    StepPolicy policy;
    policy.dt_floor = 1e-7;
    TriMesh m = shapes::icosphere(2.0, 2, {5, 0, 0});
    FlowTrajectory traj = evolve(m, ForceSpec::zero(), policy, 1.5);
    REQUIRE(traj.status().kind == FlowStatusKind::SingularAt);
    auto [y, s_est] = singular_point_estimate(traj);
    CHECK((y - Vec3(5, 0, 0)).norm() < 0.02);
    CHECK(std::abs(s_est - 1.0) < 0.01);
}

TEST_CASE("insufficient tail is reported") {
    StepPolicy policy;
    TriMesh m = shapes::icosphere(2.0, 2);
    FlowTrajectory traj = evolve(m, ForceSpec::zero(), policy, 0.05);
    REQUIRE(traj.status().kind == FlowStatusKind::Completed);
    try {
        singular_point_estimate(traj);
        CHECK(false);
    } catch (const FlowError& e) {
        CHECK(e.code() == ErrorCode::InsufficientTail);
    }
}

TEST_CASE("evolve is translation equivariant") {
    StepPolicy policy;
    const Vec3 v(5, -1, 2);
    TriMesh a = shapes::icosphere(2.0, 2);
    TriMesh b = shapes::icosphere(2.0, 2, v);
    FlowTrajectory ta = evolve(a, ForceSpec::zero(), policy, 0.05);
    FlowTrajectory tb = evolve(b, ForceSpec::zero(), policy, 0.05);
    REQUIRE(ta.size() == tb.size());
    const TriMesh& ma = ta.snapshots().back().mesh;
    const TriMesh& mb = tb.snapshots().back().mesh;
    for (int i = 0; i < ma.vertex_count(); ++i)
        CHECK((ma.vertex(i) + v - mb.vertex(i)).norm() < 1e-10);
}

TEST_CASE("parabolic rescaling consistency (lambda = 2 and 1/2)") {
    for (double lambda : {2.0, 0.5}) {
        const double T = 0.04;
        ForceSpec gravity = ForceSpec::constant({0, 0, -0.1});
        StepPolicy policy;

        TriMesh base = shapes::icosphere(2.0, 2);
        FlowTrajectory ref = evolve(base, gravity, policy, T);

        StepPolicy scaled = policy;
        scaled.dt_ceiling *= lambda * lambda;
        scaled.dt_floor *= lambda * lambda;
        scaled.snapshot_cadence *= lambda * lambda;
        TriMesh big = base;
        big.scale(lambda);
        // beta^alpha(x) = alpha beta(y + alpha x) with alpha = 1/lambda
        ForceSpec scaled_force = rescale_force(gravity, Vec3::Zero(), 1.0 / lambda);
        FlowTrajectory traj = evolve(big, scaled_force, scaled, lambda * lambda * T);

        REQUIRE(traj.size() == ref.size());
        const TriMesh& got = traj.snapshots().back().mesh;
        const TriMesh& want = ref.snapshots().back().mesh;
        for (int i = 0; i < got.vertex_count(); ++i)
            CHECK((got.vertex(i) - lambda * want.vertex(i)).norm() < 1e-6);
    }
}

TEST_CASE("area is non-increasing without forces") {
    StepPolicy policy;
    TriMesh m = shapes::dumbbell(0.25, 48, 36);
    FlowTrajectory traj = evolve(m, ForceSpec::zero(), policy, 0.01);
    for (int i = 1; i < traj.size(); ++i)
        CHECK(traj.snapshot(i).mesh.total_area() <=
              traj.snapshot(i - 1).mesh.total_area() * (1 + 1e-8));
}

TEST_CASE("rescaled-flow trajectory is stationary over unit time") {
    StepPolicy policy;
    TriMesh m = shapes::icosphere(2.0, 3);
    FlowTrajectory traj = evolve(m, ForceSpec::rescaled_mcf(8.0), policy, 1.0);
    REQUIRE(traj.status().kind == FlowStatusKind::Completed);
    double r0 = mean_radius(traj.snapshot(0).mesh);
    for (const auto& s : traj.snapshots())
        CHECK(std::abs(mean_radius(s.mesh) - r0) / r0 < 0.01);
}

TEST_CASE("volume-preserving flow keeps the enclosed volume") {
    StepPolicy policy;
    TriMesh m = shapes::icosphere(2.0, 3);
    FlowTrajectory traj = evolve(m, ForceSpec::volume_preserving(10.0), policy, 1.0);
    REQUIRE(traj.status().kind == FlowStatusKind::Completed);
    double v0 = traj.snapshot(0).mesh.enclosed_volume();
    for (const auto& s : traj.snapshots())
        CHECK(std::abs(s.mesh.enclosed_volume() - v0) / v0 < 0.01);
}

TEST_CASE("first-order convergence in dt on the sphere law") {
    const double T = 0.5;
    std::vector<double> errors;
    for (double dt : {0.01, 0.005, 0.0025}) {
        StepPolicy policy;
        policy.dt_ceiling = dt;
        policy.safety_factor = 0.9; // ceiling binds
        policy.snapshot_cadence = T;
        TriMesh m = shapes::icosphere(2.0, 3);
        FlowTrajectory traj = evolve(m, ForceSpec::zero(), policy, T);
        double r = mean_radius(traj.snapshots().back().mesh);
        errors.push_back(std::abs(r - std::sqrt(4 - 4 * T)));
    }
    CHECK(errors[0] / errors[1] > 1.7);
    CHECK(errors[0] / errors[1] < 2.3);
    CHECK(errors[1] / errors[2] > 1.7);
    CHECK(errors[1] / errors[2] < 2.3);
}

TEST_CASE("policy validation names the offending field") {
    StepPolicy policy;
    policy.dt_floor = 0.1; // above ceiling
    try {
        policy.validate();
        CHECK(false);
    } catch (const FlowError& e) {
        CHECK(e.code() == ErrorCode::ConfigInvalid);
        CHECK(std::string(e.what()).find("dt_floor") != std::string::npos);
    }
}
