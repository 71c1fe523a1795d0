#include "mcf/trimesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "mcf/errors.hpp"

namespace mcf {

const char* to_string(ErrorCode c) {
    switch (c) {
        case ErrorCode::NonManifold: return "NonManifold";
        case ErrorCode::DegenerateFace: return "DegenerateFace";
        case ErrorCode::InconsistentOrientation: return "InconsistentOrientation";
        case ErrorCode::NumericalDegeneracy: return "NumericalDegeneracy";
        case ErrorCode::NonFiniteInput: return "NonFiniteInput";
        case ErrorCode::SupNormViolation: return "SupNormViolation";
        case ErrorCode::NonPositiveScale: return "NonPositiveScale";
        case ErrorCode::MeshDegenerated: return "MeshDegenerated";
        case ErrorCode::InsufficientTail: return "InsufficientTail";
        case ErrorCode::TimeAfterCenter: return "TimeAfterCenter";
        case ErrorCode::WindowOutOfRange: return "WindowOutOfRange";
        case ErrorCode::NegativeSample: return "NegativeSample";
        case ErrorCode::NoSnapshotNearTarget: return "NoSnapshotNearTarget";
        case ErrorCode::WindowNotCovered: return "WindowNotCovered";
        case ErrorCode::NonNegativeTime: return "NonNegativeTime";
        case ErrorCode::EmptySlice: return "EmptySlice";
        case ErrorCode::InnerBallEmpty: return "InnerBallEmpty";
        case ErrorCode::PreconditionUnverified: return "PreconditionUnverified";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::MissingArtifacts: return "MissingArtifacts";
    }
    return "UnknownError";
}

TriMesh TriMesh::build(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces) {
    return build_impl(std::move(vertices), std::move(faces), false);
}

TriMesh TriMesh::build_open(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces) {
    return build_impl(std::move(vertices), std::move(faces), true);
}

TriMesh TriMesh::build_impl(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces,
                            bool allow_boundary) {
    auto topo = std::make_shared<MeshTopology>();
    topo->faces = std::move(faces);
    topo->vertex_count = static_cast<int>(vertices.size());
    const int nv = topo->vertex_count;

    for (const auto& f : topo->faces) {
        for (int c = 0; c < 3; ++c) {
            if (f[c] < 0 || f[c] >= nv)
                fail(ErrorCode::NonManifold, "face references vertex " + std::to_string(f[c]));
        }
        if (f[0] == f[1] || f[1] == f[2] || f[2] == f[0])
            fail(ErrorCode::DegenerateFace, "face with repeated vertex");
    }
    for (const auto& v : vertices) {
        if (!v.allFinite()) fail(ErrorCode::NonFiniteInput, "non-finite vertex position");
    }

    // Directed-edge census. A consistently oriented closed manifold has each
    // directed edge exactly once and each undirected edge exactly twice.
    std::map<std::pair<int, int>, int> directed;
    for (const auto& f : topo->faces) {
        for (int c = 0; c < 3; ++c) {
            auto key = std::make_pair(f[c], f[(c + 1) % 3]);
            if (++directed[key] > 1)
                fail(ErrorCode::InconsistentOrientation,
                     "directed edge repeated: " + std::to_string(key.first) + "->" +
                         std::to_string(key.second));
        }
    }
    std::map<std::pair<int, int>, int> undirected;
    for (const auto& [key, cnt] : directed)
        undirected[{std::min(key.first, key.second), std::max(key.first, key.second)}] += cnt;

    topo->boundary_vertex.assign(nv, false);
    for (const auto& [key, total] : undirected) {
        auto [a, b] = key;
        topo->edges.push_back(key);
        if (total == 1) {
            if (!allow_boundary)
                fail(ErrorCode::NonManifold,
                     "boundary edge " + std::to_string(a) + "-" + std::to_string(b));
            topo->has_boundary = true;
            topo->boundary_vertex[a] = topo->boundary_vertex[b] = true;
        } else if (total != 2) {
            fail(ErrorCode::NonManifold, "edge shared by " + std::to_string(total) + " faces");
        }
    }

    topo->vertex_faces.assign(nv, {});
    for (int f = 0; f < static_cast<int>(topo->faces.size()); ++f)
        for (int c = 0; c < 3; ++c) topo->vertex_faces[topo->faces[f][c]].push_back(f);

    topo->vertex_ring.assign(nv, {});
    for (const auto& [a, b] : topo->edges) {
        topo->vertex_ring[a].push_back(b);
        topo->vertex_ring[b].push_back(a);
    }
    for (auto& ring : topo->vertex_ring) std::sort(ring.begin(), ring.end());

    TriMesh m;
    m.topo_ = std::move(topo);
    m.vertices_ = std::move(vertices);
    m.refresh_geometry(true);
    return m;
}

void TriMesh::refresh_geometry(bool validating_build) {
    const int nf = face_count();
    const int nv = vertex_count();
    face_area_.resize(nf);
    face_normal_.resize(nf);
    dual_area_.assign(nv, 0.0);
    vertex_normal_.assign(nv, Vec3::Zero());
    vertex_mean_edge_.assign(nv, 0.0);

    double area_sum = 0;
    double min_area = std::numeric_limits<double>::infinity();
    for (int f = 0; f < nf; ++f) {
        const auto& [i, j, k] = topo_->faces[f];
        Vec3 n = (vertices_[j] - vertices_[i]).cross(vertices_[k] - vertices_[i]);
        double a2 = n.norm();
        face_area_[f] = 0.5 * a2;
        face_normal_[f] = a2 > 0 ? Vec3(n / a2) : Vec3::Zero();
        area_sum += face_area_[f];
        min_area = std::min(min_area, face_area_[f]);
    }
    total_area_ = area_sum;

    const double mean_area = nf > 0 ? area_sum / nf : 0.0;
    if (nf > 0 && min_area <= 1e-14 * mean_area) {
        if (validating_build)
            fail(ErrorCode::DegenerateFace, "face area below 1e-14 of mean");
        fail(ErrorCode::MeshDegenerated, "face area collapsed below 1e-14 of mean");
    }

    for (int f = 0; f < nf; ++f) {
        for (int c = 0; c < 3; ++c) {
            dual_area_[topo_->faces[f][c]] += face_area_[f] / 3.0;
            vertex_normal_[topo_->faces[f][c]] += face_area_[f] * face_normal_[f];
        }
    }
    for (int i = 0; i < nv; ++i) {
        double n = vertex_normal_[i].norm();
        if (n > 0) vertex_normal_[i] /= n;
    }

    double esum = 0;
    double emin = std::numeric_limits<double>::infinity();
    std::vector<int> degree(nv, 0);
    for (const auto& [a, b] : topo_->edges) {
        double len = (vertices_[a] - vertices_[b]).norm();
        esum += len;
        emin = std::min(emin, len);
        vertex_mean_edge_[a] += len;
        vertex_mean_edge_[b] += len;
        ++degree[a];
        ++degree[b];
    }
    for (int i = 0; i < nv; ++i)
        if (degree[i] > 0) vertex_mean_edge_[i] /= degree[i];
    const auto ne = static_cast<double>(topo_->edges.size());
    mean_edge_ = ne > 0 ? esum / ne : 0.0;
    min_edge_ = ne > 0 ? emin : 0.0;
}

Vec3 TriMesh::face_centroid(int f) const {
    const auto& [i, j, k] = topo_->faces[f];
    return (vertices_[i] + vertices_[j] + vertices_[k]) / 3.0;
}

double TriMesh::face_circumradius(int f) const {
    Vec3 c = face_centroid(f);
    const auto& [i, j, k] = topo_->faces[f];
    return std::sqrt(std::max({(vertices_[i] - c).squaredNorm(), (vertices_[j] - c).squaredNorm(),
                               (vertices_[k] - c).squaredNorm()}));
}

double TriMesh::enclosed_volume() const {
    double v6 = 0;
    for (const auto& [i, j, k] : topo_->faces)
        v6 += vertices_[i].dot(vertices_[j].cross(vertices_[k]));
    return v6 / 6.0;
}

Bbox TriMesh::bounding_box() const {
    Bbox bb;
    if (vertices_.empty()) return bb;
    bb.lo = bb.hi = vertices_[0];
    for (const auto& v : vertices_) {
        bb.lo = bb.lo.cwiseMin(v);
        bb.hi = bb.hi.cwiseMax(v);
    }
    return bb;
}

void TriMesh::set_vertices(std::vector<Vec3> vertices) {
    if (static_cast<int>(vertices.size()) != vertex_count())
        fail(ErrorCode::MeshDegenerated, "vertex count changed");
    for (const auto& v : vertices)
        if (!v.allFinite()) fail(ErrorCode::MeshDegenerated, "non-finite vertex after update");
    vertices_ = std::move(vertices);
    refresh_geometry(false);
}

void TriMesh::translate(const Vec3& v) {
    for (auto& x : vertices_) x += v;
    refresh_geometry(false);
}

void TriMesh::scale(double s, const Vec3& origin) {
    if (s <= 0) fail(ErrorCode::NonPositiveScale, "scale factor must be positive");
    for (auto& x : vertices_) x = origin + s * (x - origin);
    refresh_geometry(false);
}

namespace {

std::string format_position(const Vec3& v) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g", v.x(), v.y(), v.z());
    return buf;
}

} // namespace

void write_off(const TriMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::MissingArtifacts, "cannot open for writing: " + path);
    out << "OFF\n" << mesh.vertex_count() << ' ' << mesh.face_count() << ' ' << mesh.edge_count()
        << '\n';
    for (const auto& v : mesh.vertices()) out << format_position(v) << '\n';
    for (const auto& [i, j, k] : mesh.faces()) out << "3 " << i << ' ' << j << ' ' << k << '\n';
}

void write_obj(const TriMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::MissingArtifacts, "cannot open for writing: " + path);
    for (const auto& v : mesh.vertices()) out << "v " << format_position(v) << '\n';
    for (const auto& [i, j, k] : mesh.faces())
        out << "f " << i + 1 << ' ' << j + 1 << ' ' << k + 1 << '\n';
}

TriMesh read_off(const std::string& path, bool allow_boundary) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::MissingArtifacts, "cannot open: " + path);
    std::string header;
    in >> header;
    if (header != "OFF") fail(ErrorCode::MissingArtifacts, "not an OFF file: " + path);
    int nv = 0, nf = 0, ne = 0;
    in >> nv >> nf >> ne;
    std::vector<Vec3> vertices(nv);
    for (auto& v : vertices) in >> v.x() >> v.y() >> v.z();
    std::vector<std::array<int, 3>> faces(nf);
    for (auto& f : faces) {
        int arity = 0;
        in >> arity >> f[0] >> f[1] >> f[2];
        if (arity != 3) fail(ErrorCode::MissingArtifacts, "non-triangular face in " + path);
    }
    if (!in) fail(ErrorCode::MissingArtifacts, "truncated OFF file: " + path);
    return allow_boundary ? TriMesh::build_open(std::move(vertices), std::move(faces))
                          : TriMesh::build(std::move(vertices), std::move(faces));
}

TriMesh read_obj(const std::string& path, bool allow_boundary) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::MissingArtifacts, "cannot open: " + path);
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "v") {
            Vec3 v;
            ss >> v.x() >> v.y() >> v.z();
            vertices.push_back(v);
        } else if (tag == "f") {
            std::array<int, 3> f{};
            for (int c = 0; c < 3; ++c) {
                std::string tok;
                ss >> tok;
                f[c] = std::stoi(tok.substr(0, tok.find('/'))) - 1;
            }
            faces.push_back(f);
        }
    }
    return allow_boundary ? TriMesh::build_open(std::move(vertices), std::move(faces))
                          : TriMesh::build(std::move(vertices), std::move(faces));
}

} // namespace mcf
