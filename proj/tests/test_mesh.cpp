#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "mcf/errors.hpp"
#include "mcf/shapes.hpp"
#include "mcf/trimesh.hpp"

using namespace mcf;

namespace {

std::vector<std::array<int, 3>> icosa_faces() {
    return {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
            {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
            {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
            {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
}

std::vector<Vec3> icosa_vertices() {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    return {{-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
            {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
            {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
}

} // namespace

TEST_CASE("icosahedron builds with Euler characteristic 2") {
    TriMesh m = TriMesh::build(icosa_vertices(), icosa_faces());
    CHECK(m.vertex_count() == 12);
    CHECK(m.face_count() == 20);
    CHECK(m.edge_count() == 30);
    CHECK(m.euler_characteristic() == 2);
    CHECK(!m.has_boundary());
    CHECK(m.enclosed_volume() > 0); // outward orientation
}

TEST_CASE("missing face is rejected as non-manifold") {
    auto faces = icosa_faces();
    faces.pop_back();
    CHECK_THROWS_WITH_AS(TriMesh::build(icosa_vertices(), faces), doctest::Contains("boundary"),
                         FlowError);
    try {
        TriMesh::build(icosa_vertices(), faces);
    } catch (const FlowError& e) {
        CHECK(e.code() == ErrorCode::NonManifold);
    }
}

TEST_CASE("flipped face is rejected as inconsistent orientation") {
    auto faces = icosa_faces();
    std::swap(faces[0][0], faces[0][1]);
    try {
        TriMesh::build(icosa_vertices(), faces);
        CHECK(false);
    } catch (const FlowError& e) {
        CHECK(e.code() == ErrorCode::InconsistentOrientation);
    }
}

TEST_CASE("degenerate face is rejected") {
    auto verts = icosa_vertices();
    verts.push_back(verts[0]); // duplicate of vertex 0 at distance 0
    auto faces = icosa_faces();
    // split face (0,11,5) through the duplicate -> zero-area sliver
    faces[0] = {0, 11, 12};
    faces.push_back({12, 11, 5});
    faces.push_back({0, 12, 5});
    try {
        TriMesh::build(verts, faces);
        CHECK(false);
    } catch (const FlowError& e) {
        CHECK(e.code() == ErrorCode::DegenerateFace);
    }
}

TEST_CASE("torus has genus-1 Euler characteristic") {
    TriMesh m = shapes::torus(2.0, 0.7, 48, 24);
    CHECK(m.euler_characteristic() == 0);
    CHECK(m.enclosed_volume() > 0);
    // exact torus volume 2 pi^2 R r^2, mesh slightly inscribed
    double exact = 2 * M_PI * M_PI * 2.0 * 0.49;
    CHECK(m.enclosed_volume() == doctest::Approx(exact).epsilon(0.02));
}

TEST_CASE("icosphere area and dual-area identity") {
    TriMesh m = shapes::icosphere(2.0, 4);
    CHECK(m.vertex_count() == 2562);
    CHECK(m.face_count() == 5120);
    CHECK(m.euler_characteristic() == 2);
    CHECK(m.total_area() == doctest::Approx(16 * M_PI).epsilon(0.005));
    double dual_sum = 0;
    for (int i = 0; i < m.vertex_count(); ++i) dual_sum += m.dual_area(i);
    CHECK(dual_sum == doctest::Approx(m.total_area()).epsilon(1e-12));
    double exact_vol = 4.0 / 3.0 * M_PI * 8;
    CHECK(m.enclosed_volume() == doctest::Approx(exact_vol).epsilon(0.01));
}

TEST_CASE("capsule and dumbbell build closed") {
    TriMesh cap = shapes::capsule(0.5, 3.0, 24, 24);
    CHECK(cap.euler_characteristic() == 2);
    CHECK(cap.enclosed_volume() > 0);
    TriMesh db = shapes::dumbbell(0.2, 64, 48);
    CHECK(db.euler_characteristic() == 2);
    CHECK(db.enclosed_volume() > 0);
}

TEST_CASE("box grid closed, flat disk open") {
    TriMesh box = shapes::box_grid(1.0, 8);
    CHECK(box.euler_characteristic() == 2);
    CHECK(box.enclosed_volume() == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(box.total_area() == doctest::Approx(24.0).epsilon(1e-12));

    TriMesh disk = shapes::flat_disk(1.0, 8);
    CHECK(disk.has_boundary());
    CHECK(disk.total_area() == doctest::Approx(M_PI).epsilon(0.02));
}

TEST_CASE("off round-trip is bit stable") {
    namespace fs = std::filesystem;
    TriMesh m = shapes::icosphere(1.37, 2);
    fs::path tmp = fs::temp_directory_path() / "mcf_roundtrip.off";
    write_off(m, tmp.string());
    TriMesh back = read_off(tmp.string());
    REQUIRE(back.vertex_count() == m.vertex_count());
    for (int i = 0; i < m.vertex_count(); ++i) {
        CHECK(back.vertex(i).x() == m.vertex(i).x());
        CHECK(back.vertex(i).y() == m.vertex(i).y());
        CHECK(back.vertex(i).z() == m.vertex(i).z());
    }
    fs::path tmp2 = fs::temp_directory_path() / "mcf_roundtrip.obj";
    write_obj(m, tmp2.string());
    TriMesh back2 = read_obj(tmp2.string());
    REQUIRE(back2.vertex_count() == m.vertex_count());
    for (int i = 0; i < m.vertex_count(); i += 97) {
        CHECK(back2.vertex(i).x() == m.vertex(i).x());
        CHECK(back2.vertex(i).z() == m.vertex(i).z());
    }
    fs::remove(tmp);
    fs::remove(tmp2);
}

TEST_CASE("set_vertices rejects collapsed faces") {
    TriMesh m = shapes::icosphere(1.0, 1);
    std::vector<Vec3> collapsed(m.vertex_count(), Vec3(0.5, 0.5, 0.5));
    try {
        m.set_vertices(collapsed);
        CHECK(false);
    } catch (const FlowError& e) {
        CHECK(e.code() == ErrorCode::MeshDegenerated);
    }
}

TEST_CASE("translate and scale update geometry caches") {
    TriMesh m = shapes::icosphere(1.0, 2);
    double area = m.total_area();
    m.translate({3, -2, 5});
    CHECK(m.total_area() == doctest::Approx(area).epsilon(1e-12));
    CHECK(m.bounding_box().center().x() == doctest::Approx(3.0).epsilon(1e-9));
    m.scale(2.0);
    CHECK(m.total_area() == doctest::Approx(4 * area).epsilon(1e-12));
    try {
        m.scale(-1.0);
        CHECK(false);
    } catch (const FlowError& e) {
        CHECK(e.code() == ErrorCode::NonPositiveScale);
    }
}
