#include "mcf/curvature.hpp"

#include <algorithm>
#include <cmath>

#include "mcf/errors.hpp"

namespace mcf {

double CurvatureField::max_a_norm2() const {
    double m = 0;
    for (double v : a_norm2) m = std::max(m, v);
    return m;
}

CurvatureField compute_curvature(const TriMesh& mesh) {
    CurvatureField out;
    compute_curvature(mesh, out);
    return out;
}

void compute_curvature(const TriMesh& mesh, CurvatureField& out) {
    const int nv = mesh.vertex_count();
    out.mean_curvature.assign(nv, Vec3::Zero());
    out.scalar_mean.assign(nv, 0.0);
    out.gaussian.assign(nv, 0.0);
    out.a_norm2.assign(nv, 0.0);
    out.normal.resize(nv);

    std::vector<Vec3>& area_gradient = out.mean_curvature; // accumulated in place
    std::vector<double>& angle_sum = out.gaussian;

    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto& [i, j, k] = mesh.face(f);
        const int idx[3] = {i, j, k};
        const Vec3* pos[3] = {&mesh.vertex(i), &mesh.vertex(j), &mesh.vertex(k)};

        // cot of the angle at each corner; corner c is opposite edge (c+1, c+2)
        double cot[3];
        for (int c = 0; c < 3; ++c) {
            Vec3 e1 = *pos[(c + 1) % 3] - *pos[c];
            Vec3 e2 = *pos[(c + 2) % 3] - *pos[c];
            double cross = e1.cross(e2).norm();
            double dot = e1.dot(e2);
            if (cross <= 0 || std::abs(dot / cross) > 1e8)
                fail(ErrorCode::NumericalDegeneracy, "cotangent weight beyond 1e8");
            cot[c] = dot / cross;
            angle_sum[idx[c]] += std::atan2(cross, dot);
        }
        // Gradient of the face area wrt corner a (opposite corners b, c):
        //   dA/dx_a = (cot(b) (x_a - x_c) + cot(c) (x_a - x_b)) / 2
        for (int c = 0; c < 3; ++c) {
            const Vec3& xa = *pos[c];
            const Vec3& xb = *pos[(c + 1) % 3];
            const Vec3& xc = *pos[(c + 2) % 3];
            area_gradient[idx[c]] +=
                0.5 * (cot[(c + 1) % 3] * (xa - xc) + cot[(c + 2) % 3] * (xa - xb));
        }
    }

    for (int i = 0; i < nv; ++i) {
        const double a = mesh.dual_area(i);
        out.normal[i] = mesh.vertex_normal(i);
        out.mean_curvature[i] = -area_gradient[i] / a;
        out.scalar_mean[i] = -out.mean_curvature[i].dot(out.normal[i]);
        const double defect = (mesh.is_boundary_vertex(i) ? M_PI : 2 * M_PI) - angle_sum[i];
        out.gaussian[i] = defect / a;
        out.a_norm2[i] =
            std::max(0.0, out.scalar_mean[i] * out.scalar_mean[i] - 2 * out.gaussian[i]);
    }
}

} // namespace mcf
