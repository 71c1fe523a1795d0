#pragma once

#include <vector>

#include "mcf/trimesh.hpp"

namespace mcf {

/// Per-vertex curvature data. Sign convention: scalar mean curvature is
/// positive for a sphere with outward normals, so the mean curvature
/// vector of a convex surface points inward and opposes the normal.
struct CurvatureField {
    std::vector<Vec3> mean_curvature;    // H vector, 1/length
    std::vector<double> scalar_mean;     // -H.n, 1/length
    std::vector<double> gaussian;        // angle defect / dual area, 1/length^2
    std::vector<double> a_norm2;         // |A|^2 = max(H^2 - 2K, 0), 1/length^2
    std::vector<Vec3> normal;            // copy of the vertex normals used

    double max_a_norm2() const;
};

/// Cotangent area-gradient mean curvature over barycentric dual areas,
/// Gaussian curvature from angle defects. Throws NumericalDegeneracy when a
/// cotangent weight exceeds 1e8.
CurvatureField compute_curvature(const TriMesh& mesh);

/// In-place variant reusing the field's buffers (hot path of the flow loop).
void compute_curvature(const TriMesh& mesh, CurvatureField& out);

} // namespace mcf
