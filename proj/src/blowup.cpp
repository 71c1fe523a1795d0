#include "mcf/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "mcf/errors.hpp"
#include "mcf/quadrature.hpp"
#include "mcf/topology.hpp"

namespace mcf {

namespace {

std::vector<Vec3> shrinker_residual_field(const TriMesh& mesh, const CurvatureField& curvature,
                                          double t) {
    std::vector<Vec3> field(mesh.vertex_count());
    for (int i = 0; i < mesh.vertex_count(); ++i) {
        const Vec3& n = curvature.normal[i];
        field[i] = curvature.mean_curvature[i] + mesh.vertex(i).dot(n) / (-2 * t) * n;
    }
    return field;
}

/// Evenly thin a snapshot index list to at most cap entries.
std::vector<int> thin_indices(const std::vector<int>& in, size_t cap) {
    if (in.size() <= cap) return in;
    std::vector<int> out;
    for (size_t k = 0; k < cap; ++k) out.push_back(in[k * (in.size() - 1) / (cap - 1)]);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<int> window_snapshots(const FlowTrajectory& traj, double s, double alpha, double t_lo,
                                  double t_hi) {
    std::vector<int> idx;
    for (int i = 0; i < traj.size(); ++i) {
        double t_resc = (traj.snapshot(i).t - s) / (alpha * alpha);
        if (t_resc >= t_lo - 1e-12 && t_resc <= t_hi + 1e-12) idx.push_back(i);
    }
    return idx;
}

RescaledSlice make_slice(const Snapshot& snap, const Vec3& y, double s, double alpha,
                         double t_target) {
    RescaledSlice slice;
    slice.alpha = alpha;
    slice.t_target = t_target;
    slice.t_rescaled = (snap.t - s) / (alpha * alpha);
    slice.mesh = snap.mesh;
    slice.mesh.translate(-y);
    slice.mesh.scale(1.0 / alpha);
    slice.curvature = compute_curvature(slice.mesh);
    if (slice.t_rescaled < 0)
        slice.eps_shrink = shrinker_residual(slice.mesh, slice.curvature, slice.t_rescaled);
    return slice;
}

} // namespace

double shrinker_residual(const TriMesh& rescaled_mesh, const CurvatureField& curvature,
                         double t_rescaled) {
    if (!(t_rescaled < 0))
        fail(ErrorCode::NonNegativeTime, "shrinker residual needs rescaled time < 0");
    std::vector<Vec3> field = shrinker_residual_field(rescaled_mesh, curvature, t_rescaled);
    return gaussian_weighted_square(rescaled_mesh, Vec3::Zero(), -t_rescaled, field);
}

double shrinker_residual(const RescaledSlice& slice) {
    return shrinker_residual(slice.mesh, slice.curvature, slice.t_rescaled);
}

RescaledSlice rescale_slice(const FlowTrajectory& traj, const Vec3& y, double s, double alpha,
                            double t_target, double time_tol) {
    if (!(alpha > 0)) fail(ErrorCode::NonPositiveScale, "alpha must be positive");
    const double t_orig = s + alpha * alpha * t_target;
    if (t_orig < traj.start_time() - 1e-12 || t_orig > traj.end_time() + 1e-12)
        fail(ErrorCode::NoSnapshotNearTarget, "target time outside trajectory span");
    int idx = traj.nearest_snapshot(t_orig);
    const Snapshot& snap = traj.snapshot(idx);
    const double tol = alpha * alpha * time_tol * std::max(1.0, std::abs(t_target));
    if (std::abs(snap.t - t_orig) > tol)
        fail(ErrorCode::NoSnapshotNearTarget,
             "nearest snapshot is " + std::to_string(std::abs(snap.t - t_orig)) +
                 " away in original time");
    return make_slice(snap, y, s, alpha, t_target);
}

RescaledSlice select_time_slice(const FlowTrajectory& traj, const Vec3& y, double s, double alpha,
                                double tau, const SliceSelectParams& params) {
    std::vector<int> idx = window_snapshots(traj, s, alpha, -1 - tau, -1);
    if (idx.empty()) fail(ErrorCode::WindowNotCovered, "no snapshot in the rescaled window");
    idx = thin_indices(idx, 80);

    if (idx.size() == 1) {
        RescaledSlice slice = make_slice(traj.snapshot(idx[0]), y, s, alpha, -1 - tau / 2);
        slice.low_resolution = true;
        return slice;
    }

    struct Candidate {
        RescaledSlice slice;
        std::vector<double> a2_mass;
    };
    std::vector<Candidate> cands;
    cands.reserve(idx.size());
    for (int i : idx) {
        Candidate c;
        c.slice = make_slice(traj.snapshot(i), y, s, alpha, -1 - tau / 2);
        FaceGrid grid(c.slice.mesh);
        for (double r : params.r_ladder)
            c.a2_mass.push_back(
                ball_integral_vertex(grid, c.slice.curvature.a_norm2, Vec3::Zero(), r));
        cands.push_back(std::move(c));
    }

    const size_t nr = params.r_ladder.size();
    std::vector<double> avg_mass(nr, 0.0);
    double avg_eps = 0;
    for (const auto& c : cands) {
        for (size_t r = 0; r < nr; ++r) avg_mass[r] += c.a2_mass[r];
        avg_eps += c.slice.eps_shrink;
    }
    for (auto& v : avg_mass) v /= static_cast<double>(cands.size());
    avg_eps /= static_cast<double>(cands.size());

    const double f = params.excess_factor;
    const double tiny = 1e-300;
    auto worst_excess = [&](const Candidate& c) {
        double w = c.slice.eps_shrink / (avg_eps + tiny);
        for (size_t r = 0; r < nr; ++r) w = std::max(w, c.a2_mass[r] / (avg_mass[r] + tiny));
        return w;
    };

    const double midpoint = -1 - tau / 2;
    int best_qualifying = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    int best_overall = 0;
    double best_excess = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < cands.size(); ++k) {
        double w = worst_excess(cands[k]);
        if (w < best_excess) {
            best_excess = w;
            best_overall = static_cast<int>(k);
        }
        if (w <= f) {
            double d = std::abs(cands[k].slice.t_rescaled - midpoint);
            if (d < best_dist) {
                best_dist = d;
                best_qualifying = static_cast<int>(k);
            }
        }
    }
    if (best_qualifying >= 0) return std::move(cands[best_qualifying].slice);
    RescaledSlice fallback = std::move(cands[best_overall].slice);
    fallback.pigeonhole_failed = true;
    return fallback;
}

ImprovedH2Report improved_h2_check(const FlowTrajectory& traj, const Vec3& y, double s,
                                   double alpha, const Vec3& x, double r, double big_r, double tau,
                                   double constant) {
    std::vector<int> idx = window_snapshots(traj, s, alpha, -1 - tau, -1);
    if (idx.size() < 2) fail(ErrorCode::WindowNotCovered, "need >= 2 snapshots in window");
    idx = thin_indices(idx, 40);

    ImprovedH2Report rep;
    rep.constant = constant;
    double prev_h2 = 0, prev_eps = 0, prev_t = 0;
    bool first = true;
    for (int i : idx) {
        RescaledSlice slice = make_slice(traj.snapshot(i), y, s, alpha, -1);
        FaceGrid grid(slice.mesh);
        std::vector<double> h2(slice.mesh.vertex_count());
        for (int v = 0; v < slice.mesh.vertex_count(); ++v)
            h2[v] = slice.curvature.mean_curvature[v].squaredNorm();
        double h2_ball = ball_integral_vertex(grid, h2, x, r);
        if (!first) {
            double dt = slice.t_rescaled - prev_t;
            rep.lhs += 0.5 * (h2_ball + prev_h2) * dt;
            rep.residual_budget += 0.5 * (slice.eps_shrink + prev_eps) * dt;
        }
        prev_h2 = h2_ball;
        prev_eps = slice.eps_shrink;
        prev_t = slice.t_rescaled;
        first = false;
    }
    rep.rhs = constant * tau * (r * r + r * big_r) + rep.residual_budget;
    rep.holds = rep.lhs <= rep.rhs;
    return rep;
}

ConcentrationResult detect_concentration(const std::vector<RescaledSlice>& slices,
                                         const ConcentrationParams& params) {
    ConcentrationResult out;
    if (slices.empty()) return out;
    const RescaledSlice* finest = &slices.front();
    for (const auto& s : slices)
        if (s.alpha < finest->alpha) finest = &s;

    const TriMesh& mesh = finest->mesh;
    Vec3 center;
    double radius;
    if (params.region_center) {
        center = *params.region_center;
        radius = params.region_radius;
    } else {
        Bbox bb = mesh.bounding_box();
        center = bb.center();
        radius = 0.5 * bb.diameter();
    }

    FaceGrid grid(mesh);
    const double rc = params.r_cover;
    const int reach = static_cast<int>(std::ceil(radius / rc));

    struct Flag {
        Vec3 pos;
        double mass;
    };
    std::vector<Flag> flags;
    for (int ix = -reach; ix <= reach; ++ix) {
        for (int iy = -reach; iy <= reach; ++iy) {
            for (int iz = -reach; iz <= reach; ++iz) {
                Vec3 p = center + rc * Vec3(ix, iy, iz);
                if ((p - center).norm() > radius) continue;
                double mass =
                    ball_integral_vertex(grid, finest->curvature.a_norm2, p, rc);
                if (mass >= params.eps0 * params.eps0) flags.push_back({p, mass});
            }
        }
    }

    // Merge lattice-adjacent flags (axis and face-diagonal neighbors).
    std::vector<int> parent(flags.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (size_t i = 0; i < flags.size(); ++i)
        for (size_t j = i + 1; j < flags.size(); ++j)
            if ((flags[i].pos - flags[j].pos).norm() <= 1.5 * rc)
                parent[find(static_cast<int>(i))] = find(static_cast<int>(j));

    std::map<int, std::vector<int>> clusters;
    for (size_t i = 0; i < flags.size(); ++i)
        clusters[find(static_cast<int>(i))].push_back(static_cast<int>(i));

    for (const auto& [root, members] : clusters) {
        // |A|^2-weighted centroid over the faces covered by the cluster.
        std::set<int> faces;
        for (int m : members)
            for (int f : grid.faces_near(flags[m].pos, rc))
                if ((mesh.face_centroid(f) - flags[m].pos).norm() <= rc) faces.insert(f);
        ConcentrationPoint q;
        q.flags = static_cast<int>(members.size());
        double mass = 0;
        Vec3 moment = Vec3::Zero();
        for (int f : faces) {
            const auto& [i, j, k] = mesh.face(f);
            double a2 = (finest->curvature.a_norm2[i] + finest->curvature.a_norm2[j] +
                         finest->curvature.a_norm2[k]) /
                        3.0;
            double w = mesh.face_area(f) * a2;
            mass += w;
            moment += w * mesh.face_centroid(f);
        }
        q.mass = mass;
        q.position = mass > 0 ? Vec3(moment / mass) : flags[members.front()].pos;
        out.points.push_back(q);
    }
    std::sort(out.points.begin(), out.points.end(),
              [](const ConcentrationPoint& a, const ConcentrationPoint& b) {
                  return a.mass > b.mass;
              });

    out.count_bound = params.count_constant *
                      (radius * radius + 8 * 3.14159265358979323846 * params.genus +
                       params.entropy_bound) /
                      params.eps0;
    out.count_ok = static_cast<double>(out.points.size()) <= out.count_bound;
    return out;
}

SelfSimilarityError self_similarity_error(const RescaledSlice& a, const RescaledSlice& b) {
    if (a.mesh.vertex_count() == 0 || b.mesh.vertex_count() == 0)
        fail(ErrorCode::EmptySlice, "empty slice");
    if (!(a.t_rescaled < 0) || !(b.t_rescaled < 0))
        fail(ErrorCode::NonNegativeTime, "slices must be at negative rescaled time");

    const double lambda = std::sqrt(a.t_rescaled / b.t_rescaled);
    std::vector<Vec3> bs = b.mesh.vertices();
    for (auto& v : bs) v *= lambda;

    auto directed = [](const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
        double worst = 0;
        for (const auto& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to) best = std::min(best, (p - q).squaredNorm());
            worst = std::max(worst, best);
        }
        return std::sqrt(worst);
    };
    const std::vector<Vec3>& as = a.mesh.vertices();
    double hausdorff = std::max(directed(as, bs), directed(bs, as));

    double bounding = 0;
    for (const auto& v : as) bounding = std::max(bounding, v.norm());

    SelfSimilarityError err;
    err.hausdorff_rel = bounding > 0 ? hausdorff / bounding : 0;
    err.area_rel = std::abs(a.mesh.total_area() - b.mesh.total_area() * lambda * lambda) /
                   a.mesh.total_area();
    return err;
}

namespace {

/// Residual-based refinement: the tail fit locates s to ~1e-4, which is
/// coarse relative to alpha_min^2; one smooth 1D minimization over the
/// rescaled time of a fixed near-singular snapshot recovers it to ~1e-6.
double refine_singular_time(const FlowTrajectory& traj, const Vec3& y, double s0, double alpha,
                            double span) {
    const double t_orig = s0 - alpha * alpha;
    int idx = traj.nearest_snapshot(t_orig);
    const Snapshot& snap = traj.snapshot(idx);

    TriMesh mesh = snap.mesh;
    mesh.translate(-y);
    mesh.scale(1.0 / alpha);
    CurvatureField curv = compute_curvature(mesh);

    auto objective = [&](double t_resc) {
        return shrinker_residual(mesh, curv, t_resc);
    };
    // Golden-section over the rescaled time of this snapshot.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = (snap.t - (s0 + span)) / (alpha * alpha);
    double hi = (snap.t - (s0 - span)) / (alpha * alpha);
    hi = std::min(hi, -1e-6);
    double c = hi - gr * (hi - lo);
    double d = lo + gr * (hi - lo);
    double fc = objective(c), fd = objective(d);
    for (int it = 0; it < 48; ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = objective(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = objective(d);
        }
    }
    double t_opt = 0.5 * (lo + hi);
    return snap.t - alpha * alpha * t_opt;
}

} // namespace

BlowupReport run_blowup_pipeline(const FlowTrajectory& traj, const ForceSpec& force,
                                 const BlowupParams& params) {
    BlowupReport report;
    Vec3 y;
    double s_fit;
    if (params.center_override && params.time_override) {
        y = *params.center_override;
        s_fit = *params.time_override;
    } else {
        std::tie(y, s_fit) = singular_point_estimate(traj);
    }
    report.y = y;
    report.s_estimate = s_fit;
    report.s = s_fit;
    report.eps0 = params.concentration.eps0;
    report.r_cover = params.concentration.r_cover;

    std::vector<double> ladder = params.alpha_ladder;
    std::sort(ladder.begin(), ladder.end(), std::greater<double>());
    if (ladder.empty()) fail(ErrorCode::ConfigInvalid, "alpha ladder is empty");

    if (params.refine_singular_time) {
        report.s = refine_singular_time(traj, y, s_fit, ladder.back(), params.refine_span);
        report.s_refined = true;
    }

    for (double alpha : ladder) {
        BlowupLadderEntry entry;
        entry.alpha = alpha;
        entry.tau = std::sqrt(alpha);
        RescaledSlice slice = select_time_slice(traj, y, report.s, alpha, entry.tau);
        entry.t_selected = slice.t_rescaled;
        entry.eps_shrink = slice.eps_shrink;
        entry.low_resolution = slice.low_resolution;
        entry.pigeonhole_failed = slice.pigeonhole_failed;
        if (!report.slices.empty())
            entry.self_similarity = self_similarity_error(report.slices.back(), slice).value();

        // Rescaled source over a common window for the scaling fit.
        ForceSpec rescaled = rescale_force(force, y, alpha);
        std::vector<int> idx =
            thin_indices(window_snapshots(traj, report.s, alpha, -1 - params.common_window, -1), 16);
        double prev_s = 0, prev_t = 0;
        bool first = true;
        for (int i : idx) {
            RescaledSlice ws = make_slice(traj.snapshot(i), y, report.s, alpha, -1);
            std::vector<Vec3> beta = eval_force(rescaled, ws.mesh, ws.curvature);
            std::vector<double> density(ws.mesh.vertex_count());
            for (int v = 0; v < ws.mesh.vertex_count(); ++v)
                density[v] = 0.25 * beta[v].squaredNorm();
            double src =
                gaussian_weighted_scalar(ws.mesh, Vec3::Zero(), -ws.t_rescaled, density);
            if (!first) entry.source_integral += 0.5 * (src + prev_s) * (ws.t_rescaled - prev_t);
            prev_s = src;
            prev_t = ws.t_rescaled;
            first = false;
        }

        report.ladder.push_back(entry);
        report.slices.push_back(std::move(slice));
    }

    // Slope of log source vs log alpha (only meaningful with a force).
    {
        std::vector<std::pair<double, double>> pts;
        for (const auto& e : report.ladder)
            if (e.source_integral > 0) pts.push_back({std::log(e.alpha), std::log(e.source_integral)});
        if (pts.size() >= 2) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (auto& [x1, y1] : pts) {
                sx += x1;
                sy += y1;
                sxx += x1 * x1;
                sxy += x1 * y1;
            }
            double n = static_cast<double>(pts.size());
            report.source_scaling_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        }
    }

    ConcentrationParams cp = params.concentration;
    if (cp.genus == 0) {
        TopologyReport topo = genus_and_components(traj.snapshot(0).mesh);
        cp.genus = topo.total_genus;
    }
    report.concentration = detect_concentration(report.slices, cp);
    return report;
}

} // namespace mcf
