#include "mcf/shapes.hpp"

#include <cmath>
#include <map>
#include <utility>

#include "mcf/errors.hpp"

namespace mcf::shapes {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct MeshSoup {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;

    int add(const Vec3& v) {
        vertices.push_back(v);
        return static_cast<int>(vertices.size()) - 1;
    }
    void tri(int a, int b, int c) { faces.push_back({a, b, c}); }
};

/// Revolve a profile (rho_k > 0, z_k) around the z axis with poles at
/// z_south / z_north. Rings are ordered south to north; orientation is
/// outward for profiles traversed with increasing z.
TriMesh revolve(const std::vector<std::pair<double, double>>& profile, double z_south,
                double z_north, int res_around) {
    MeshSoup m;
    const int rings = static_cast<int>(profile.size());
    const int south = m.add({0, 0, z_south});
    std::vector<int> base(rings);
    for (int k = 0; k < rings; ++k) {
        base[k] = static_cast<int>(m.vertices.size());
        for (int s = 0; s < res_around; ++s) {
            double th = 2 * kPi * s / res_around;
            m.add({profile[k].first * std::cos(th), profile[k].first * std::sin(th),
                   profile[k].second});
        }
    }
    const int north = m.add({0, 0, z_north});

    auto ring_vertex = [&](int k, int s) { return base[k] + (s % res_around); };
    for (int s = 0; s < res_around; ++s) m.tri(south, ring_vertex(0, s + 1), ring_vertex(0, s));
    for (int k = 0; k + 1 < rings; ++k) {
        for (int s = 0; s < res_around; ++s) {
            int a = ring_vertex(k, s), b = ring_vertex(k, s + 1);
            int c = ring_vertex(k + 1, s + 1), d = ring_vertex(k + 1, s);
            m.tri(a, b, c);
            m.tri(a, c, d);
        }
    }
    for (int s = 0; s < res_around; ++s)
        m.tri(north, ring_vertex(rings - 1, s), ring_vertex(rings - 1, s + 1));
    return TriMesh::build(std::move(m.vertices), std::move(m.faces));
}

} // namespace

TriMesh icosphere(double radius, int level, const Vec3& center) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> verts = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
    };
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
    };

    for (auto& v : verts) v.normalize();
    for (int l = 0; l < level; ++l) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            verts.push_back((0.5 * (verts[a] + verts[b])).normalized());
            int idx = static_cast<int>(verts.size()) - 1;
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& [a, b, c] : faces) {
            int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
            next.push_back({a, ab, ca});
            next.push_back({b, bc, ab});
            next.push_back({c, ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }

    for (auto& v : verts) v = center + radius * v;
    return TriMesh::build(std::move(verts), std::move(faces));
}

TriMesh torus(double major_radius, double tube_radius, int res_major, int res_minor) {
    MeshSoup m;
    for (int i = 0; i < res_major; ++i) {
        double th = 2 * kPi * i / res_major;
        for (int j = 0; j < res_minor; ++j) {
            double ph = 2 * kPi * j / res_minor;
            double rho = major_radius + tube_radius * std::cos(ph);
            m.add({rho * std::cos(th), rho * std::sin(th), tube_radius * std::sin(ph)});
        }
    }
    auto vid = [&](int i, int j) {
        return (i % res_major) * res_minor + (j % res_minor);
    };
    for (int i = 0; i < res_major; ++i) {
        for (int j = 0; j < res_minor; ++j) {
            int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
            m.tri(a, b, c);
            m.tri(a, c, d);
        }
    }
    return TriMesh::build(std::move(m.vertices), std::move(m.faces));
}

TriMesh capsule(double radius, double length, int res_axial, int res_around) {
    std::vector<std::pair<double, double>> profile;
    const double h = length / 2;
    const int cap = std::max(3, res_axial / 3);
    for (int k = 1; k <= cap; ++k) {
        double psi = -kPi / 2 + (kPi / 2) * k / (cap + 1);
        profile.push_back({radius * std::cos(psi), -h + radius * std::sin(psi)});
    }
    for (int k = 0; k <= res_axial; ++k)
        profile.push_back({radius, -h + length * k / res_axial});
    for (int k = 1; k <= cap; ++k) {
        double psi = (kPi / 2) * k / (cap + 1);
        profile.push_back({radius * std::cos(psi), h + radius * std::sin(psi)});
    }
    return revolve(profile, -h - radius, h + radius, res_around);
}

TriMesh dumbbell(double neck_radius, int res_axial, int res_around) {
    if (neck_radius <= 0 || neck_radius >= 1)
        fail(ErrorCode::ConfigInvalid, "dumbbell neck radius must be in (0,1)");
    // Quartic profile rho(u)^2 ~ (1-u^2)(u^2+b^2): two bulbs and a neck at
    // u = 0, sphere-like square-root behavior at the poles.
    const double b = (1.0 - std::sqrt(1.0 - neck_radius * neck_radius)) / neck_radius;
    const double bulb = (1.0 + b * b) / 2.0; // max of sqrt((1-u^2)(u^2+b^2))
    const double z_half = 2.4;               // prolate enough to keep bulbs round
    std::vector<std::pair<double, double>> profile;
    for (int k = 1; k <= res_axial; ++k) {
        double u = -std::cos(kPi * k / (res_axial + 1));
        double rho = std::sqrt((1 - u * u) * (u * u + b * b)) / bulb;
        profile.push_back({rho, z_half * u});
    }
    return revolve(profile, -z_half, z_half, res_around);
}

namespace {

/// Builds one n x n face grid of the cube, sharing vertices across face
/// seams through an integer-lattice key.
struct BoxBuilder {
    double half;
    int n;
    MeshSoup m;
    std::map<std::array<int, 3>, int> index;

    int vertex(std::array<int, 3> key) {
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        Vec3 p(-half + 2 * half * key[0] / n, -half + 2 * half * key[1] / n,
               -half + 2 * half * key[2] / n);
        int id = m.add(p);
        index.emplace(key, id);
        return id;
    }

    // u_axis x v_axis must equal the outward normal of the face.
    void face(int fixed_axis, bool positive, int u_axis, int v_axis) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                auto at = [&](int u, int v) {
                    std::array<int, 3> key{};
                    key[fixed_axis] = positive ? n : 0;
                    key[u_axis] = u;
                    key[v_axis] = v;
                    return vertex(key);
                };
                int a = at(i, j), bb = at(i + 1, j), c = at(i + 1, j + 1), d = at(i, j + 1);
                m.tri(a, bb, c);
                m.tri(a, c, d);
            }
        }
    }
};

} // namespace

TriMesh box_grid(double half, int n) {
    BoxBuilder b{half, n, {}, {}};
    b.face(0, true, 1, 2);  // +x: y cross z = x
    b.face(0, false, 2, 1); // -x
    b.face(1, true, 2, 0);  // +y: z cross x = y
    b.face(1, false, 0, 2); // -y
    b.face(2, true, 0, 1);  // +z: x cross y = z
    b.face(2, false, 1, 0); // -z
    return TriMesh::build(std::move(b.m.vertices), std::move(b.m.faces));
}

TriMesh flat_disk(double radius, int rings) {
    MeshSoup m;
    const int around = 6 * rings;
    const int center = m.add({0, 0, 0});
    std::vector<int> base(rings);
    for (int k = 1; k <= rings; ++k) {
        base[k - 1] = static_cast<int>(m.vertices.size());
        double r = radius * k / rings;
        for (int s = 0; s < around; ++s) {
            double th = 2 * kPi * s / around;
            m.add({r * std::cos(th), r * std::sin(th), 0});
        }
    }
    auto vid = [&](int k, int s) { return base[k] + (s % around); };
    for (int s = 0; s < around; ++s) m.tri(center, vid(0, s), vid(0, s + 1));
    for (int k = 0; k + 1 < rings; ++k) {
        for (int s = 0; s < around; ++s) {
            int a = vid(k, s), bb = vid(k, s + 1), c = vid(k + 1, s + 1), d = vid(k + 1, s);
            m.tri(a, d, c);
            m.tri(a, c, bb);
        }
    }
    return TriMesh::build_open(std::move(m.vertices), std::move(m.faces));
}

TriMesh two_sheets(double half, double gap, int n) {
    MeshSoup m;
    for (int sheet = 0; sheet < 2; ++sheet) {
        double z = (sheet == 0 ? -0.5 : 0.5) * gap;
        int base = static_cast<int>(m.vertices.size());
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j)
                m.add({-half + 2 * half * i / n, -half + 2 * half * j / n, z});
        auto vid = [&](int i, int j) { return base + i * (n + 1) + j; };
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                m.tri(vid(i, j), vid(i + 1, j), vid(i + 1, j + 1));
                m.tri(vid(i, j), vid(i + 1, j + 1), vid(i, j + 1));
            }
        }
    }
    return TriMesh::build_open(std::move(m.vertices), std::move(m.faces));
}

TriMesh bump_box(double half, int n, double height, double width) {
    TriMesh box = box_grid(half, n);
    std::vector<Vec3> verts = box.vertices();
    for (auto& v : verts) {
        if (v.z() == half) {
            double r2 = v.x() * v.x() + v.y() * v.y();
            v.z() += height * std::exp(-r2 / (2 * width * width));
        }
    }
    box.set_vertices(std::move(verts));
    return box;
}

} // namespace mcf::shapes
