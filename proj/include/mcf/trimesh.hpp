#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mcf {

using Vec3 = Eigen::Vector3d;

struct Bbox {
    Vec3 lo{0, 0, 0};
    Vec3 hi{0, 0, 0};

    Vec3 extent() const { return hi - lo; }
    double diameter() const { return extent().norm(); }
    Vec3 center() const { return 0.5 * (lo + hi); }
};

/// Immutable connectivity shared between snapshots of a flowing mesh.
struct MeshTopology {
    std::vector<std::array<int, 3>> faces;
    std::vector<std::vector<int>> vertex_faces;
    std::vector<std::vector<int>> vertex_ring;
    std::vector<std::pair<int, int>> edges;
    std::vector<bool> boundary_vertex;
    int vertex_count = 0;
    bool has_boundary = false;
};

/// Closed oriented triangulated surface with precomputed per-vertex data.
/// Copies share connectivity; positions and derived geometry are per
/// instance and rebuilt whenever positions change.
class TriMesh {
public:
    TriMesh() = default;

    /// Validates manifoldness, orientation and non-degeneracy; throws
    /// FlowError(NonManifold | InconsistentOrientation | DegenerateFace).
    static TriMesh build(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces);

    /// Same checks except boundary edges are allowed. Used for clipped
    /// submeshes and open test fixtures (flat disks, sheets).
    static TriMesh build_open(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces);

    int vertex_count() const { return topo_->vertex_count; }
    int face_count() const { return static_cast<int>(topo_->faces.size()); }
    int edge_count() const { return static_cast<int>(topo_->edges.size()); }

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& faces() const { return topo_->faces; }
    const Vec3& vertex(int i) const { return vertices_[i]; }
    const std::array<int, 3>& face(int f) const { return topo_->faces[f]; }

    double face_area(int f) const { return face_area_[f]; }
    const Vec3& face_normal(int f) const { return face_normal_[f]; }
    Vec3 face_centroid(int f) const;
    double face_circumradius(int f) const;

    /// Barycentric dual area (one third of incident face areas).
    double dual_area(int i) const { return dual_area_[i]; }
    /// Area-weighted average of incident face normals, unit length.
    const Vec3& vertex_normal(int i) const { return vertex_normal_[i]; }
    /// Mean length of the edges incident to vertex i.
    double vertex_mean_edge(int i) const { return vertex_mean_edge_[i]; }

    const std::vector<int>& vertex_faces(int i) const { return topo_->vertex_faces[i]; }
    const std::vector<int>& vertex_ring(int i) const { return topo_->vertex_ring[i]; }
    const std::vector<std::pair<int, int>>& edges() const { return topo_->edges; }

    bool has_boundary() const { return topo_->has_boundary; }
    bool is_boundary_vertex(int i) const { return topo_->boundary_vertex[i]; }

    double total_area() const { return total_area_; }
    /// Signed volume by the divergence theorem; positive for outward
    /// orientation. Meaningful only for closed meshes.
    double enclosed_volume() const;
    double mean_edge_length() const { return mean_edge_; }
    double min_edge_length() const { return min_edge_; }
    Bbox bounding_box() const;
    int euler_characteristic() const { return vertex_count() - edge_count() + face_count(); }

    /// Replace positions (same connectivity) and rebuild geometry caches.
    /// Throws FlowError(MeshDegenerated) on non-finite positions or a face
    /// area below 1e-14 of the mean face area.
    void set_vertices(std::vector<Vec3> vertices);

    /// In-place rigid/affine convenience used by rescaling and tests.
    void translate(const Vec3& v);
    void scale(double s, const Vec3& origin = Vec3::Zero());

private:
    static TriMesh build_impl(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces,
                              bool allow_boundary);
    void refresh_geometry(bool validating_build);

    std::shared_ptr<const MeshTopology> topo_;
    std::vector<Vec3> vertices_;

    std::vector<double> face_area_;
    std::vector<Vec3> face_normal_;
    std::vector<double> dual_area_;
    std::vector<Vec3> vertex_normal_;
    std::vector<double> vertex_mean_edge_;

    double total_area_ = 0;
    double mean_edge_ = 0;
    double min_edge_ = 0;
};

/// ASCII mesh I/O. Positions are written with 17 significant digits so
/// write/read round-trips are bit-stable.
void write_off(const TriMesh& mesh, const std::string& path);
void write_obj(const TriMesh& mesh, const std::string& path);
TriMesh read_off(const std::string& path, bool allow_boundary = false);
TriMesh read_obj(const std::string& path, bool allow_boundary = false);

} // namespace mcf
