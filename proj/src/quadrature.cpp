#include "mcf/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "mcf/errors.hpp"

namespace mcf {

namespace {

using Vec2 = Eigen::Vector2d;

double cross2(const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); }

double sector_area(double radius, const Vec2& u, const Vec2& v) {
    return 0.5 * radius * radius * std::atan2(cross2(u, v), u.dot(v));
}

} // namespace

double integrate_vertex_scalar(const TriMesh& mesh, const std::vector<double>& f) {
    if (static_cast<int>(f.size()) != mesh.vertex_count())
        fail(ErrorCode::NonFiniteInput, "field size does not match vertex count");
    for (double v : f)
        if (!std::isfinite(v)) fail(ErrorCode::NonFiniteInput, "non-finite field value");
    // Edge-midpoint rule on the linear interpolant reduces to the vertex
    // mean per face; written out so the quadrature matches the documented
    // rule exactly.
    double total = 0;
    for (int fi = 0; fi < mesh.face_count(); ++fi) {
        const auto& [i, j, k] = mesh.face(fi);
        total += mesh.face_area(fi) / 3.0 *
                 (0.5 * (f[i] + f[j]) + 0.5 * (f[j] + f[k]) + 0.5 * (f[k] + f[i]));
    }
    return total;
}

double integrate_face_scalar(const TriMesh& mesh, const std::vector<double>& f) {
    if (static_cast<int>(f.size()) != mesh.face_count())
        fail(ErrorCode::NonFiniteInput, "field size does not match face count");
    double total = 0;
    for (int fi = 0; fi < mesh.face_count(); ++fi) {
        if (!std::isfinite(f[fi])) fail(ErrorCode::NonFiniteInput, "non-finite field value");
        total += mesh.face_area(fi) * f[fi];
    }
    return total;
}

double integrate_position(const TriMesh& mesh, const std::function<double(const Vec3&)>& f) {
    double total = 0;
    for (int fi = 0; fi < mesh.face_count(); ++fi) {
        const auto& [i, j, k] = mesh.face(fi);
        const Vec3& a = mesh.vertex(i);
        const Vec3& b = mesh.vertex(j);
        const Vec3& c = mesh.vertex(k);
        total += mesh.face_area(fi) / 3.0 *
                 (f(0.5 * (a + b)) + f(0.5 * (b + c)) + f(0.5 * (c + a)));
    }
    return total;
}

double integrate_position_bary(
    const TriMesh& mesh,
    const std::function<double(int, const Vec3&, const double[3])>& f) {
    static const double kBary[3][3] = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
    double total = 0;
    for (int fi = 0; fi < mesh.face_count(); ++fi) {
        const auto& [i, j, k] = mesh.face(fi);
        const Vec3& a = mesh.vertex(i);
        const Vec3& b = mesh.vertex(j);
        const Vec3& c = mesh.vertex(k);
        double acc = 0;
        for (const auto& w : kBary) {
            Vec3 p = w[0] * a + w[1] * b + w[2] * c;
            acc += f(fi, p, w);
        }
        total += mesh.face_area(fi) / 3.0 * acc;
    }
    return total;
}

double circle_triangle_area(double radius, const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                            const Eigen::Vector2d& c) {
    const Vec2* p[3] = {&a, &b, &c};
    double total = 0;
    for (int e = 0; e < 3; ++e) {
        Vec2 p1 = *p[e];
        Vec2 p2 = *p[(e + 1) % 3];
        Vec2 d = p2 - p1;
        double qa = d.squaredNorm();
        if (qa == 0) continue;
        double qb = 2 * p1.dot(d);
        double qc = p1.squaredNorm() - radius * radius;
        double disc = qb * qb - 4 * qa * qc;
        bool crossed = false;
        if (disc > 0) {
            double sq = std::sqrt(disc);
            double tin = std::max((-qb - sq) / (2 * qa), 0.0);
            double tout = std::min((-qb + sq) / (2 * qa), 1.0);
            if (tin < tout) {
                Vec2 q1 = p1 + tin * d;
                Vec2 q2 = p1 + tout * d;
                // sectors only at genuine circle crossings: endpoints inside
                // the circle may sit near the center, where their direction
                // (and hence a sector angle) is numerically meaningless
                if (tin > 0) total += sector_area(radius, p1, q1);
                total += 0.5 * cross2(q1, q2);
                if (tout < 1) total += sector_area(radius, q2, p2);
                crossed = true;
            }
        }
        if (!crossed) total += sector_area(radius, p1, p2);
    }
    return std::abs(total);
}

double face_ball_area(const TriMesh& mesh, int f, const Vec3& center, double r) {
    const Vec3& n = mesh.face_normal(f);
    if (n.squaredNorm() == 0) return 0;
    const auto& [i, j, k] = mesh.face(f);
    const Vec3& a = mesh.vertex(i);
    double dist = (center - a).dot(n);
    if (std::abs(dist) >= r) return 0;
    double rho = std::sqrt(r * r - dist * dist);
    Vec3 disk_center = center - dist * n;

    Vec3 e1 = (mesh.vertex(j) - a).normalized();
    Vec3 e2 = n.cross(e1);
    auto project = [&](const Vec3& x) {
        Vec3 rel = x - disk_center;
        return Vec2(rel.dot(e1), rel.dot(e2));
    };
    return circle_triangle_area(rho, project(a), project(mesh.vertex(j)), project(mesh.vertex(k)));
}

FaceGrid::FaceGrid(const TriMesh& mesh) : mesh_(&mesh) {
    box_ = mesh.bounding_box();
    const int nf = mesh.face_count();
    face_center_.resize(nf);
    face_radius_.resize(nf);
    for (int f = 0; f < nf; ++f) {
        face_center_[f] = mesh.face_centroid(f);
        face_radius_[f] = mesh.face_circumradius(f);
    }

    double extent = std::max(box_.extent().maxCoeff(), 1e-12);
    cell_ = std::max(extent / 48.0, 2.0 * std::max(mesh.mean_edge_length(), 1e-12));
    nx_ = std::max(1, static_cast<int>(box_.extent().x() / cell_) + 1);
    ny_ = std::max(1, static_cast<int>(box_.extent().y() / cell_) + 1);
    nz_ = std::max(1, static_cast<int>(box_.extent().z() / cell_) + 1);
    cells_.assign(static_cast<size_t>(nx_) * ny_ * nz_, {});

    auto clampi = [](int v, int lo, int hi) { return std::max(lo, std::min(hi, v)); };
    for (int f = 0; f < nf; ++f) {
        Vec3 lo = face_center_[f] - Vec3::Constant(face_radius_[f]) - box_.lo;
        Vec3 hi = face_center_[f] + Vec3::Constant(face_radius_[f]) - box_.lo;
        int x0 = clampi(static_cast<int>(lo.x() / cell_), 0, nx_ - 1);
        int x1 = clampi(static_cast<int>(hi.x() / cell_), 0, nx_ - 1);
        int y0 = clampi(static_cast<int>(lo.y() / cell_), 0, ny_ - 1);
        int y1 = clampi(static_cast<int>(hi.y() / cell_), 0, ny_ - 1);
        int z0 = clampi(static_cast<int>(lo.z() / cell_), 0, nz_ - 1);
        int z1 = clampi(static_cast<int>(hi.z() / cell_), 0, nz_ - 1);
        for (int ix = x0; ix <= x1; ++ix)
            for (int iy = y0; iy <= y1; ++iy)
                for (int iz = z0; iz <= z1; ++iz) cells_[cell_index(ix, iy, iz)].push_back(f);
    }
}

std::vector<int> FaceGrid::faces_near(const Vec3& center, double r) const {
    auto clampi = [](int v, int lo, int hi) { return std::max(lo, std::min(hi, v)); };
    Vec3 lo = center - Vec3::Constant(r) - box_.lo;
    Vec3 hi = center + Vec3::Constant(r) - box_.lo;
    int x0 = clampi(static_cast<int>(lo.x() / cell_), 0, nx_ - 1);
    int x1 = clampi(static_cast<int>(hi.x() / cell_), 0, nx_ - 1);
    int y0 = clampi(static_cast<int>(lo.y() / cell_), 0, ny_ - 1);
    int y1 = clampi(static_cast<int>(hi.y() / cell_), 0, ny_ - 1);
    int z0 = clampi(static_cast<int>(lo.z() / cell_), 0, nz_ - 1);
    int z1 = clampi(static_cast<int>(hi.z() / cell_), 0, nz_ - 1);

    std::vector<int> out;
    for (int ix = x0; ix <= x1; ++ix)
        for (int iy = y0; iy <= y1; ++iy)
            for (int iz = z0; iz <= z1; ++iz)
                for (int f : cells_[cell_index(ix, iy, iz)])
                    if ((face_center_[f] - center).norm() <= r + face_radius_[f])
                        out.push_back(f);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double ball_area(const FaceGrid& grid, const Vec3& center, double r) {
    const TriMesh& mesh = grid.mesh();
    double total = 0;
    for (int f : grid.faces_near(center, r)) {
        Vec3 fc = mesh.face_centroid(f);
        double frad = mesh.face_circumradius(f);
        double d = (fc - center).norm();
        if (d + frad <= r)
            total += mesh.face_area(f);
        else
            total += face_ball_area(mesh, f, center, r);
    }
    return total;
}

double ball_integral_vertex(const FaceGrid& grid, const std::vector<double>& f,
                            const Vec3& center, double r) {
    const TriMesh& mesh = grid.mesh();
    double total = 0;
    for (int fi : grid.faces_near(center, r)) {
        const auto& [i, j, k] = mesh.face(fi);
        double mean = (f[i] + f[j] + f[k]) / 3.0;
        Vec3 fc = mesh.face_centroid(fi);
        double frad = mesh.face_circumradius(fi);
        double d = (fc - center).norm();
        if (d + frad <= r)
            total += mesh.face_area(fi) * mean;
        else
            total += face_ball_area(mesh, fi, center, r) * mean;
    }
    return total;
}

} // namespace mcf
