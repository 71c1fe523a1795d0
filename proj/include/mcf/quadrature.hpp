#pragma once

#include <functional>
#include <vector>

#include "mcf/trimesh.hpp"

namespace mcf {

/// Surface integral of a per-vertex scalar field (linearly interpolated)
/// using the degree-2 edge-midpoint rule per triangle. Throws
/// NonFiniteInput if the field contains non-finite entries.
double integrate_vertex_scalar(const TriMesh& mesh, const std::vector<double>& f);

/// Surface integral of a per-face scalar field.
double integrate_face_scalar(const TriMesh& mesh, const std::vector<double>& f);

/// Surface integral of a position-dependent integrand, evaluated at the
/// three edge midpoints of each face (degree-2 exact in position).
double integrate_position(const TriMesh& mesh, const std::function<double(const Vec3&)>& f);

/// As integrate_position, but the integrand also receives the face index
/// and the barycentric weights of the quadrature point, so per-vertex
/// fields can be interpolated alongside the position.
double integrate_position_bary(
    const TriMesh& mesh,
    const std::function<double(int face, const Vec3& point, const double bary[3])>& f);

/// Exact area of the intersection of a triangle with a disk in 2D
/// (circle centered at the origin).
double circle_triangle_area(double radius, const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                            const Eigen::Vector2d& c);

/// Exact area of triangle `f` of the mesh clipped to the ball B_r(center)
/// (per-face planar clipping against the sliced disk).
double face_ball_area(const TriMesh& mesh, int f, const Vec3& center, double r);

/// Uniform spatial hash over face bounding boxes for ball queries.
class FaceGrid {
public:
    explicit FaceGrid(const TriMesh& mesh);

    /// Indices of faces whose bounding sphere intersects B_r(center).
    std::vector<int> faces_near(const Vec3& center, double r) const;

    const TriMesh& mesh() const { return *mesh_; }

private:
    const TriMesh* mesh_;
    Bbox box_;
    double cell_ = 1;
    int nx_ = 1, ny_ = 1, nz_ = 1;
    std::vector<std::vector<int>> cells_;
    std::vector<Vec3> face_center_;
    std::vector<double> face_radius_;

    int cell_index(int ix, int iy, int iz) const { return (ix * ny_ + iy) * nz_ + iz; }
};

/// Area of mesh inside B_r(center), with exact treatment of boundary-
/// crossing triangles.
double ball_area(const FaceGrid& grid, const Vec3& center, double r);

/// Integral over mesh inside B_r(center) of a per-vertex field, using the
/// face mean on clipped triangles.
double ball_integral_vertex(const FaceGrid& grid, const std::vector<double>& f,
                            const Vec3& center, double r);

} // namespace mcf
