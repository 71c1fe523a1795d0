#include "mcf/topology.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "mcf/errors.hpp"
#include "mcf/quadrature.hpp"

namespace mcf {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

TopologyReport census(const TriMesh& mesh, const std::vector<int>& face_subset,
                      const Vec3& inner_center, double inner_radius) {
    TopologyReport rep;
    if (face_subset.empty()) return rep;

    // Components via shared (undirected) edges of the face subset.
    std::map<std::pair<int, int>, std::vector<int>> edge_faces;
    for (int idx = 0; idx < static_cast<int>(face_subset.size()); ++idx) {
        const auto& [i, j, k] = mesh.face(face_subset[idx]);
        const int v[3] = {i, j, k};
        for (int c = 0; c < 3; ++c) {
            auto key = std::minmax(v[c], v[(c + 1) % 3]);
            edge_faces[{key.first, key.second}].push_back(idx);
        }
    }
    UnionFind uf(static_cast<int>(face_subset.size()));
    for (const auto& [key, faces] : edge_faces)
        for (size_t i = 1; i < faces.size(); ++i) uf.unite(faces[0], faces[i]);

    std::map<int, int> component_of_root;
    for (int idx = 0; idx < static_cast<int>(face_subset.size()); ++idx) {
        int root = uf.find(idx);
        if (!component_of_root.count(root)) {
            component_of_root[root] = static_cast<int>(rep.components.size());
            rep.components.push_back({});
        }
    }

    std::vector<std::set<int>> comp_vertices(rep.components.size());
    std::vector<int> comp_edges(rep.components.size(), 0);
    std::vector<std::vector<std::pair<int, int>>> comp_boundary(rep.components.size());
    for (const auto& [key, faces] : edge_faces) {
        int comp = component_of_root[uf.find(faces[0])];
        ++comp_edges[comp];
        if (faces.size() == 1) comp_boundary[comp].push_back(key);
    }
    for (int idx = 0; idx < static_cast<int>(face_subset.size()); ++idx) {
        int comp = component_of_root[uf.find(idx)];
        ComponentInfo& info = rep.components[comp];
        ++info.faces;
        const auto& [i, j, k] = mesh.face(face_subset[idx]);
        comp_vertices[comp].insert({i, j, k});
    }

    for (size_t c = 0; c < rep.components.size(); ++c) {
        ComponentInfo& info = rep.components[c];
        info.vertices = static_cast<int>(comp_vertices[c].size());
        info.edges = comp_edges[c];
        info.euler = info.vertices - info.edges + info.faces;
        info.closed = comp_boundary[c].empty();

        // Boundary loops: connected components of the boundary edge graph.
        if (!info.closed) {
            std::map<int, int> vid; // boundary vertex -> dense id
            for (const auto& [a, b] : comp_boundary[c]) {
                vid.emplace(a, static_cast<int>(vid.size()));
                vid.emplace(b, static_cast<int>(vid.size()));
            }
            UnionFind loops(static_cast<int>(vid.size()));
            for (const auto& [a, b] : comp_boundary[c]) loops.unite(vid[a], vid[b]);
            std::set<int> roots;
            for (const auto& [v, id] : vid) roots.insert(loops.find(id));
            info.boundary_loops = static_cast<int>(roots.size());
        }
        info.genus = std::max(0, (2 - info.euler - info.boundary_loops) / 2);

        for (int v : comp_vertices[c]) {
            if ((mesh.vertex(v) - inner_center).norm() <= inner_radius) {
                info.meets_inner = true;
                break;
            }
        }

        rep.total_genus += info.genus;
        if (info.meets_inner) ++rep.c_prime;
    }
    rep.component_count = static_cast<int>(rep.components.size());
    return rep;
}

} // namespace

TopologyReport genus_and_components(const TriMesh& mesh) {
    std::vector<int> all(mesh.face_count());
    std::iota(all.begin(), all.end(), 0);
    Bbox bb = mesh.bounding_box();
    // Whole mesh: every component "meets" the (degenerate) inner region.
    TopologyReport rep = census(mesh, all, bb.center(), bb.diameter() + 1);
    return rep;
}

TopologyReport genus_and_components(const TriMesh& mesh, const Vec3& center, double radius,
                                    double inner_radius) {
    std::vector<int> subset;
    for (int f = 0; f < mesh.face_count(); ++f)
        if ((mesh.face_centroid(f) - center).norm() <= radius) subset.push_back(f);
    return census(mesh, subset, center, inner_radius);
}

GaussBonnetReport local_gauss_bonnet_check(const TriMesh& mesh, const Vec3& center,
                                           double r_inner, double r_outer, double eps) {
    if (!(r_inner > 0) || !(r_outer > r_inner))
        fail(ErrorCode::ConfigInvalid, "need 0 < r_inner < r_outer");
    if (!(eps > 0) || eps >= 1) fail(ErrorCode::ConfigInvalid, "eps must be in (0,1)");

    FaceGrid grid(mesh);
    const CurvatureField curv = compute_curvature(mesh);
    std::vector<double> h2(mesh.vertex_count());
    for (int i = 0; i < mesh.vertex_count(); ++i)
        h2[i] = curv.mean_curvature[i].squaredNorm();

    GaussBonnetReport rep;
    const double inner_a2 = ball_integral_vertex(grid, curv.a_norm2, center, r_inner);
    const double inner_area = ball_area(grid, center, r_inner);
    if (inner_area <= 0) fail(ErrorCode::InnerBallEmpty, "inner ball misses the surface");

    const double ratio = r_outer / r_inner; // R in units of the inner radius
    rep.lhs = (1 - eps) * inner_a2;         // scale-invariant integral
    rep.h2_integral = ball_integral_vertex(grid, h2, center, r_outer);
    TopologyReport topo = genus_and_components(mesh, center, r_outer, r_inner);
    rep.genus = topo.total_genus;
    rep.c_prime = topo.c_prime;
    rep.genus_term = 8 * kPi * rep.genus;
    rep.c_prime_term = 8 * kPi * rep.c_prime;
    rep.cutoff_term = 24 * kPi * ratio * ratio / (eps * (ratio - 1) * (ratio - 1));
    rep.rhs = rep.h2_integral + rep.genus_term - rep.c_prime_term + rep.cutoff_term;

    for (int k = 0; k <= 8; ++k) {
        double r = r_inner + (r_outer - r_inner) * k / 8.0;
        double rn = r / r_inner;
        rep.area_ratio_d_prime =
            std::max(rep.area_ratio_d_prime, ball_area(grid, center, r) / (kPi * rn * rn * r_inner * r_inner));
    }
    return rep;
}

TimeIntegratedA2Report time_integrated_a2_check(const std::vector<TimedMesh>& slices,
                                                const Vec3& center, double radius, double t_lo,
                                                double t_hi, double constant, double genus_initial,
                                                double entropy_initial, double residual_budget) {
    std::vector<const TimedMesh*> window;
    for (const auto& s : slices)
        if (s.t >= t_lo - 1e-12 && s.t <= t_hi + 1e-12) window.push_back(&s);
    if (window.size() < 2) fail(ErrorCode::WindowNotCovered, "need at least 2 slices in window");
    std::sort(window.begin(), window.end(),
              [](const TimedMesh* a, const TimedMesh* b) { return a->t < b->t; });

    TimeIntegratedA2Report rep;
    rep.constant = constant;
    rep.window = t_hi - t_lo;
    double prev_val = 0, prev_t = 0;
    bool first = true;
    for (const TimedMesh* s : window) {
        FaceGrid grid(*s->mesh);
        double val = ball_integral_vertex(grid, s->curvature->a_norm2, center, radius);
        if (!first) rep.lhs += 0.5 * (val + prev_val) * (s->t - prev_t);
        prev_val = val;
        prev_t = s->t;
        first = false;
    }
    rep.rhs = constant * rep.window *
                  (radius * radius + 8 * kPi * genus_initial + entropy_initial) +
              residual_budget;
    rep.holds = rep.lhs <= rep.rhs;
    return rep;
}

AllardScanResult allard_condition_scan(const TriMesh& mesh, const CurvatureField& curvature,
                                       const std::vector<double>& r_ladder, double eps_a) {
    FaceGrid grid(mesh);
    AllardScanResult out;
    for (int i = 0; i < mesh.vertex_count(); ++i) {
        bool ok = false;
        for (double r : r_ladder) {
            // sup of |H| over the vertices in the ball
            double sup_h = 0;
            for (int f : grid.faces_near(mesh.vertex(i), r)) {
                const auto& [a, b, c] = mesh.face(f);
                for (int v : {a, b, c})
                    if ((mesh.vertex(v) - mesh.vertex(i)).norm() <= r)
                        sup_h = std::max(sup_h, curvature.mean_curvature[v].norm());
            }
            if (sup_h > eps_a / r) continue;
            double density = ball_area(grid, mesh.vertex(i), r);
            if (density <= (1 + eps_a) * kPi * r * r) {
                ok = true;
                break;
            }
        }
        (ok ? out.certified : out.flagged).push_back(i);
    }
    return out;
}

AreaPinchingVerdict area_pinching_check(const TriMesh& mesh, const CurvatureField& curvature,
                                        const Vec3& x, double r, double eps, double c,
                                        double gamma) {
    FaceGrid grid(mesh);
    AreaPinchingVerdict v;
    v.a2_mass = ball_integral_vertex(grid, curvature.a_norm2, x, 2 * r);
    if (v.a2_mass > eps * eps)
        fail(ErrorCode::PreconditionUnverified,
             "|A|^2 mass in B_2r exceeds eps^2: " + std::to_string(v.a2_mass));

    // Connected component of the faces meeting B_r(x) through the face
    // nearest x, grown across shared edges.
    std::vector<int> near = grid.faces_near(x, r);
    std::vector<int> inside;
    for (int f : near)
        if (face_ball_area(mesh, f, x, r) > 0 ||
            (mesh.face_centroid(f) - x).norm() + mesh.face_circumradius(f) <= r)
        inside.push_back(f);
    if (inside.empty()) fail(ErrorCode::InnerBallEmpty, "ball misses the surface");

    int seed_face = inside[0];
    double best = std::numeric_limits<double>::infinity();
    for (int f : inside) {
        double d = (mesh.face_centroid(f) - x).norm();
        if (d < best) {
            best = d;
            seed_face = f;
        }
    }

    std::map<std::pair<int, int>, std::vector<int>> edge_faces;
    for (int f : inside) {
        const auto& [i, j, k] = mesh.face(f);
        const int vv[3] = {i, j, k};
        for (int e = 0; e < 3; ++e) {
            auto key = std::minmax(vv[e], vv[(e + 1) % 3]);
            edge_faces[{key.first, key.second}].push_back(f);
        }
    }
    std::set<int> component;
    std::vector<int> stack = {seed_face};
    std::map<int, std::vector<std::pair<int, int>>> face_edges;
    for (const auto& [key, faces] : edge_faces)
        for (int f : faces) face_edges[f].push_back(key);
    while (!stack.empty()) {
        int f = stack.back();
        stack.pop_back();
        if (!component.insert(f).second) continue;
        for (const auto& key : face_edges[f])
            for (int g : edge_faces[key])
                if (!component.count(g)) stack.push_back(g);
    }

    for (int f : component) v.component_area += face_ball_area(mesh, f, x, r);
    v.disk_area = kPi * r * r;
    v.lower = v.disk_area * (1 - c * std::pow(eps, 2 * gamma));
    v.upper = v.disk_area * (1 + c * std::pow(eps, gamma));
    v.pass = v.component_area >= v.lower && v.component_area <= v.upper;
    return v;
}

} // namespace mcf
