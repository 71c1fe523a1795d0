#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mcf/errors.hpp"
#include "mcf/flow.hpp"
#include "mcf/gaussian.hpp"
#include "mcf/quadrature.hpp"
#include "mcf/shapes.hpp"

using namespace mcf;

namespace {

TriMesh disjoint_union(const TriMesh& a, const TriMesh& b) {
    std::vector<Vec3> verts = a.vertices();
    verts.insert(verts.end(), b.vertices().begin(), b.vertices().end());
    std::vector<std::array<int, 3>> faces = a.faces();
    const int off = a.vertex_count();
    for (const auto& [i, j, k] : b.faces()) faces.push_back({i + off, j + off, k + off});
    return TriMesh::build(std::move(verts), std::move(faces));
}

} // namespace

TEST_CASE("heat kernel closed-form values") {
    KernelCenter c{{0, 0, 0}, 1.0};
    CHECK(heat_kernel(c, Vec3::Zero(), 0.0) == doctest::Approx(1.0 / (4 * M_PI)).epsilon(1e-12));

    KernelCenter unit{{1, 2, 3}, 0.5 + 1.0 / (4 * M_PI)};
    CHECK(heat_kernel(unit, Vec3(1, 2, 3), 0.5) == doctest::Approx(1.0).epsilon(1e-12));

    // monotone decay in |x - y|
    double prev = 1e300;
    for (double d : {0.0, 0.5, 1.0, 2.0, 5.0}) {
        double v = heat_kernel(c, Vec3(d, 0, 0), 0.0);
        CHECK(v < prev + 1e-300);
        prev = v;
    }
    try {
        heat_kernel(c, Vec3::Zero(), 1.5);
        CHECK(false);
    } catch (const FlowError& e) {
        CHECK(e.code() == ErrorCode::TimeAfterCenter);
    }
}

TEST_CASE("gaussian-weighted area: plane, sphere, smooth point") {
    // plane density 1 (disk radius 13 sqrt(tau) covers the truncation radius)
    TriMesh disk = shapes::flat_disk(13.0, 60);
    CHECK(std::abs(f_functional(disk, Vec3::Zero(), 1.0) - 1.0) < 1e-6);

    // radius-2 sphere about the center: (4 pi)^{-1} e^{-1} 16 pi = 4/e
    TriMesh sphere = shapes::icosphere(2.0, 4);
    CHECK(f_functional(sphere, Vec3::Zero(), 1.0) ==
          doctest::Approx(4.0 / std::exp(1.0)).epsilon(0.01));

    // density of a smooth surface point is 1 as tau -> 0
    TriMesh fine = shapes::icosphere(2.0, 5);
    CHECK(f_functional(fine, fine.vertex(40), 1e-3) == doctest::Approx(1.0).epsilon(0.02));

    try {
        f_functional(sphere, Vec3::Zero(), 0.0);
        CHECK(false);
    } catch (const FlowError& e) {
        CHECK(e.code() == ErrorCode::NonPositiveScale);
    }
}

TEST_CASE("gaussian-weighted area is rotation and scale invariant") {
    TriMesh m = shapes::icosphere(1.3, 3, {0.5, -0.2, 0.8});
    Vec3 y(0.7, 0.1, 0.4);
    const double tau = 0.37;
    double base = f_functional(m, y, tau);

    Eigen::Matrix3d rot =
        Eigen::AngleAxisd(0.83, Vec3(1, 2, -1).normalized()).toRotationMatrix();
    std::vector<Vec3> verts = m.vertices();
    for (auto& v : verts) v = rot * v;
    TriMesh rotated = m;
    rotated.set_vertices(verts);
    CHECK(std::abs(f_functional(rotated, rot * y, tau) - base) < 1e-10 * base);

    for (double lambda : {2.0, 1.7}) {
        TriMesh scaled = m;
        scaled.scale(lambda);
        CHECK(std::abs(f_functional(scaled, lambda * y, lambda * lambda * tau) - base) <
              1e-10 * base);
    }
}

TEST_CASE("truncation changes nothing at the reported precision") {
    // against an untruncated direct sum over quadrature points
    TriMesh m = shapes::icosphere(2.0, 3);
    Vec3 y(0.3, 0.2, -0.1);
    double tau = 0.21;
    double full = 0;
    static const double kB[3][3] = {{0.5, 0.5, 0}, {0, 0.5, 0.5}, {0.5, 0, 0.5}};
    for (int f = 0; f < m.face_count(); ++f) {
        const auto& [i, j, k] = m.face(f);
        for (const auto& w : kB) {
            Vec3 p = w[0] * m.vertex(i) + w[1] * m.vertex(j) + w[2] * m.vertex(k);
            full += m.face_area(f) / 3 * std::exp(-(p - y).squaredNorm() / (4 * tau));
        }
    }
    full /= 4 * M_PI * tau;
    CHECK(f_functional(m, y, tau) == doctest::Approx(full).epsilon(1e-12));
}

TEST_CASE("entropy of the shrinker sphere and the smooth-point floor") {
    TriMesh sphere = shapes::icosphere(2.0, 4);
    EntropyResult e = entropy(sphere);
    CHECK(e.value == doctest::Approx(4.0 / std::exp(1.0)).epsilon(0.01));
    CHECK(e.y.norm() < 0.05);
    CHECK(e.tau == doctest::Approx(1.0).epsilon(0.05));

    // any closed surface has entropy >= 1 (smooth-point limit)
    for (const TriMesh& m :
         {shapes::torus(2.0, 0.7, 48, 24), shapes::capsule(0.5, 4.0, 48, 32)})
        CHECK(entropy(m).value > 1.0 - 0.02);
}

TEST_CASE("entropy of two distant spheres stays near a single sphere") {
    TriMesh a = shapes::icosphere(2.0, 3, {0, 0, 0});
    TriMesh b = shapes::icosphere(2.0, 3, {20, 0, 0});
    TriMesh both = disjoint_union(a, b);
    // the far sphere contributes e^{-sep^2/4 tau} at the argmax, negligible
    EntropyResult e = entropy(both);
    CHECK(e.value == doctest::Approx(4.0 / std::exp(1.0)).epsilon(0.015));
}

TEST_CASE("entropy is scale invariant under transported seeds") {
    TriMesh m = shapes::torus(2.0, 0.7, 32, 16);
    double base = entropy(m).value;
    TriMesh scaled = m;
    scaled.scale(2.0); // power of two: bbox and seeds transport exactly
    CHECK(std::abs(entropy(scaled).value - base) < 1e-8 * base);
}

TEST_CASE("area-ratio supremum: sphere, disk, two sheets") {
    // sup over all centers: attained at the sphere's center with R = 2,
    // ratio 16 pi / 4 = 4 pi (small balls at surface points only give pi)
    TriMesh sphere = shapes::icosphere(2.0, 4);
    AreaRatioResult r = area_ratio_sup(sphere, 64, 1);
    CHECK(r.value == doctest::Approx(4 * M_PI).epsilon(0.02));
    CHECK(r.center.norm() < 0.05);
    // brute-force cross-check at a surface point and small radius: plane density
    FaceGrid grid(sphere);
    double small = ball_area(grid, sphere.vertex(7), 0.3) / (0.3 * 0.3);
    CHECK(small == doctest::Approx(M_PI).epsilon(0.02));

    TriMesh disk = shapes::flat_disk(1.0, 16);
    CHECK(area_ratio_sup(disk, 64, 1).value == doctest::Approx(M_PI).epsilon(0.05));

    TriMesh sheets = shapes::two_sheets(2.0, 0.01, 40);
    CHECK(area_ratio_sup(sheets, 64, 1).value == doctest::Approx(2 * M_PI).epsilon(0.05));
}

TEST_CASE("area growth and entropy bound each other within the test constant") {
    for (const TriMesh& m : {shapes::icosphere(2.0, 3), shapes::capsule(0.1, 20.0, 96, 24)}) {
        EquivalenceReport rep = check_area_entropy_equivalence(m);
        CHECK(rep.within(32.0));
        CHECK(rep.ratio_area_over_entropy > 1.0 / 32.0);
    }
}

TEST_CASE("monotonicity ledger on the shrinking sphere") {
    StepPolicy policy;
    policy.snapshot_cadence = 0.04;
    TriMesh m = shapes::icosphere(2.0, 3);
    FlowTrajectory traj = evolve(m, ForceSpec::zero(), policy, 0.8);

    SUBCASE("center at the singular spacetime point: G constant, D vanishing") {
        MonotonicityLedger ledger = monotonicity_ledger(traj, {{0, 0, 0}, 1.0}, ForceSpec::zero());
        REQUIRE(!ledger.rows.empty());
        const double g0 = 4.0 / std::exp(1.0);
        for (const auto& row : ledger.rows) {
            CHECK(row.gaussian_area == doctest::Approx(g0).epsilon(0.01));
            CHECK(row.dissipation < 5e-3 * g0);
            CHECK(row.source == 0.0);
        }
        CHECK(ledger.worst_pair_excess() < 0.02);
    }

    SUBCASE("off-time center: G strictly non-increasing") {
        MonotonicityLedger ledger =
            monotonicity_ledger(traj, {{0, 0, 0}, 1.5}, ForceSpec::zero());
        for (size_t i = 1; i < ledger.rows.size(); ++i)
            CHECK(ledger.rows[i].gaussian_area <=
                  ledger.rows[i - 1].gaussian_area * (1 + 1e-8));
        CHECK(ledger.worst_pair_excess() < 0.02);
        CHECK(ledger.worst_pair_excess_one_sided() < 0.02);
    }

    SUBCASE("kernel center before every snapshot is rejected") {
        try {
            monotonicity_ledger(traj, {{0, 0, 0}, -0.5}, ForceSpec::zero());
            CHECK(false);
        } catch (const FlowError& e) {
            CHECK(e.code() == ErrorCode::TimeAfterCenter);
        }
    }
}

TEST_CASE("forced monotonicity: gravity source term and growth factor") {
    StepPolicy policy;
    policy.snapshot_cadence = 0.04;
    ForceSpec gravity = ForceSpec::constant({0, 0, -0.1});
    TriMesh m = shapes::icosphere(2.0, 3);
    FlowTrajectory traj = evolve(m, gravity, policy, 0.8);

    // center at the translated singular point of the exact solution
    MonotonicityLedger ledger = monotonicity_ledger(traj, {{0, 0, -0.1}, 1.0}, gravity);
    CHECK(ledger.worst_pair_excess() < 0.02);
    CHECK(ledger.worst_pair_excess_one_sided() < 0.02);
    // S = |beta|^2/4 G pointwise for a constant field
    for (const auto& row : ledger.rows)
        CHECK(row.source == doctest::Approx(0.0025 * row.gaussian_area).epsilon(1e-9));
    // growth bound e^{|beta|^2 (t2-t1)/4} between snapshot pairs
    for (size_t i = 0; i + 1 < ledger.rows.size(); i += 3) {
        for (size_t j = i + 1; j < ledger.rows.size(); j += 5) {
            double factor = std::exp(0.0025 * (ledger.rows[j].t - ledger.rows[i].t));
            CHECK(ledger.rows[j].gaussian_area <=
                  factor * ledger.rows[i].gaussian_area * 1.02);
        }
    }
}

TEST_CASE("local area bound: static plane, shrinking and forced spheres") {
    SUBCASE("static flat patch") {
        TriMesh box = shapes::box_grid(2.0, 16);
        FlowTrajectory traj;
        traj.snapshots_.push_back({0.0, box, 0.0, 0.0, false});
        traj.snapshots_.push_back({0.05, box, 0.0, 0.01, false});
        traj.status_ = {FlowStatusKind::Completed, 0.05, Vec3::Zero()};
        // window around a point of the +z face, far from the box edges
        LocalAreaBoundReport rep =
            local_area_bound_check(traj, Vec3(0, 0, 2), 0.8, 0.04, 1.0);
        CHECK(rep.holds);
        for (const auto& row : rep.rows)
            CHECK(row.lhs / row.rhs <= 0.26); // pi (r/2)^2 / (8 pi r^2) = 1/32 + slack
    }

    StepPolicy policy;
    policy.snapshot_cadence = 0.04;
    TriMesh m = shapes::icosphere(2.0, 3);
    SUBCASE("shrinking sphere") {
        FlowTrajectory traj = evolve(m, ForceSpec::zero(), policy, 0.6);
        LocalAreaBoundReport rep =
            local_area_bound_check(traj, Vec3(1.5, 0, 0), 1.0, 0.6, 1.0);
        CHECK(rep.holds);
        try {
            local_area_bound_check(traj, Vec3::Zero(), 4.0, 0.6, 1.0);
            CHECK(false);
        } catch (const FlowError& e) {
            CHECK(e.code() == ErrorCode::WindowOutOfRange);
        }
    }
    SUBCASE("gravity-forced sphere") {
        ForceSpec gravity = ForceSpec::constant({0, 0, -0.1});
        FlowTrajectory traj = evolve(m, gravity, policy, 0.6);
        LocalAreaBoundReport rep =
            local_area_bound_check(traj, Vec3(1.5, 0, 0), 1.0, 0.6, 1.0 + 0.01);
        CHECK(rep.holds);
    }
}

TEST_CASE("comparison bound: equality case, constants, random hypothesis functions") {
    const double c = 0.8, t0 = 0.0;
    SUBCASE("exponential equality case") {
        std::vector<std::pair<double, double>> samples;
        for (int k = 0; k <= 40; ++k) {
            double t = 0.05 * k;
            samples.push_back({t, 2.0 * std::exp(c * t)});
        }
        GronwallResult r = gronwall_bound(samples, c, t0);
        CHECK(r.hypothesis_holds);
        CHECK(r.bound_holds);
        for (size_t i = 0; i < samples.size(); ++i)
            CHECK(std::abs(samples[i].second - r.bound[i]) < 1e-9 * samples[i].second);
    }
    SUBCASE("constant function") {
        std::vector<std::pair<double, double>> samples;
        for (int k = 0; k <= 20; ++k) samples.push_back({0.1 * k, 3.0});
        GronwallResult r = gronwall_bound(samples, 0.5, 0.0);
        CHECK(r.hypothesis_holds);
        CHECK(r.bound_holds);
    }
    SUBCASE("500 random hypothesis-satisfying functions") {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> theta(-1.0, 1.0);
        std::uniform_real_distribution<double> dt(0.01, 0.1);
        for (int trial = 0; trial < 500; ++trial) {
            std::vector<std::pair<double, double>> samples{{0.0, 1.0 + theta(rng) + 1.0}};
            for (int k = 0; k < 30; ++k) {
                double step = dt(rng);
                double f = samples.back().second * std::exp(theta(rng) * c * step);
                samples.push_back({samples.back().first + step, f});
            }
            GronwallResult r = gronwall_bound(samples, c, 0.0);
            CHECK(r.hypothesis_holds);
            CHECK(r.bound_holds);
        }
    }
    SUBCASE("negative samples are rejected") {
        try {
            gronwall_bound({{0.0, 1.0}, {1.0, -0.5}}, c, 0.0);
            CHECK(false);
        } catch (const FlowError& e) {
            CHECK(e.code() == ErrorCode::NegativeSample);
        }
    }
}
