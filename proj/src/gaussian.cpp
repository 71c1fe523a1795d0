#include "mcf/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "mcf/curvature.hpp"
#include "mcf/errors.hpp"
#include "mcf/quadrature.hpp"

namespace mcf {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Kernel support cut: tail mass below 1e-13 of the total for plane-like
// surfaces, and far inside the 1e-10 invariance tolerances.
constexpr double kTruncSigmas = 12.0;

/// int w(p) rho_{y,tau}(p) dmu with the truncation prefilter; w is given
/// per quadrature point.
double gaussian_integral(const TriMesh& mesh, const Vec3& y, double tau,
                         const std::function<double(int, const Vec3&, const double[3])>& w) {
    const double cut = kTruncSigmas * std::sqrt(tau);
    const double norm = 1.0 / (4 * kPi * tau);
    static const double kBary[3][3] = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
    double total = 0;
    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto& [i, j, k] = mesh.face(f);
        const Vec3& a = mesh.vertex(i);
        const Vec3& b = mesh.vertex(j);
        const Vec3& c = mesh.vertex(k);
        Vec3 centroid = (a + b + c) / 3.0;
        double reach = (centroid - y).norm() - mesh.face_circumradius(f);
        if (reach > cut) continue;
        double acc = 0;
        for (const auto& wts : kBary) {
            Vec3 p = wts[0] * a + wts[1] * b + wts[2] * c;
            double d2 = (p - y).squaredNorm();
            acc += std::exp(-d2 / (4 * tau)) * w(f, p, wts);
        }
        total += mesh.face_area(f) / 3.0 * acc;
    }
    return norm * total;
}

double gaussian_area(const TriMesh& mesh, const Vec3& y, double tau) {
    const double cut = kTruncSigmas * std::sqrt(tau);
    const double norm = 1.0 / (4 * kPi * tau);
    double total = 0;
    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto& [i, j, k] = mesh.face(f);
        const Vec3& a = mesh.vertex(i);
        const Vec3& b = mesh.vertex(j);
        const Vec3& c = mesh.vertex(k);
        Vec3 centroid = (a + b + c) / 3.0;
        double reach = (centroid - y).norm() - mesh.face_circumradius(f);
        if (reach > cut) continue;
        double acc = std::exp(-(0.5 * (a + b) - y).squaredNorm() / (4 * tau)) +
                     std::exp(-(0.5 * (b + c) - y).squaredNorm() / (4 * tau)) +
                     std::exp(-(0.5 * (c + a) - y).squaredNorm() / (4 * tau));
        total += mesh.face_area(f) / 3.0 * acc;
    }
    return norm * total;
}

} // namespace

double heat_kernel(const KernelCenter& center, const Vec3& x, double t) {
    if (t >= center.s) fail(ErrorCode::TimeAfterCenter, "kernel evaluated at t >= s");
    const double tau = center.s - t;
    return std::exp(-(x - center.y).squaredNorm() / (4 * tau)) / (4 * kPi * tau);
}

double f_functional(const TriMesh& mesh, const Vec3& y, double tau) {
    if (!(tau > 0)) fail(ErrorCode::NonPositiveScale, "kernel scale tau must be positive");
    return gaussian_area(mesh, y, tau);
}

double gaussian_weighted_square(const TriMesh& mesh, const Vec3& y, double tau,
                                const std::vector<Vec3>& field) {
    if (!(tau > 0)) fail(ErrorCode::NonPositiveScale, "kernel scale tau must be positive");
    return gaussian_integral(mesh, y, tau, [&](int f, const Vec3&, const double b[3]) {
        const auto& [i, j, k] = mesh.face(f);
        Vec3 v = b[0] * field[i] + b[1] * field[j] + b[2] * field[k];
        return v.squaredNorm();
    });
}

double gaussian_weighted_scalar(const TriMesh& mesh, const Vec3& y, double tau,
                                const std::vector<double>& field) {
    if (!(tau > 0)) fail(ErrorCode::NonPositiveScale, "kernel scale tau must be positive");
    return gaussian_integral(mesh, y, tau, [&](int f, const Vec3&, const double b[3]) {
        const auto& [i, j, k] = mesh.face(f);
        return b[0] * field[i] + b[1] * field[j] + b[2] * field[k];
    });
}

namespace {

/// Nelder-Mead maximization over R^d, deterministic.
struct Simplex {
    int dim;
    double rel_tol;
    int max_iter;

    std::pair<std::vector<double>, double> maximize(
        std::vector<double> start, double step,
        const std::function<double(const std::vector<double>&)>& fn) const {
        auto value = [&](const std::vector<double>& x) { return -fn(x); };
        std::vector<std::vector<double>> pts(dim + 1, start);
        for (int i = 0; i < dim; ++i) pts[i + 1][i] += step;
        std::vector<double> f(dim + 1);
        for (int i = 0; i <= dim; ++i) f[i] = value(pts[i]);

        for (int iter = 0; iter < max_iter; ++iter) {
            std::vector<int> order(dim + 1);
            for (int i = 0; i <= dim; ++i) order[i] = i;
            std::sort(order.begin(), order.end(), [&](int a, int b) { return f[a] < f[b]; });
            int best = order[0], worst = order[dim], second = order[dim - 1];

            double spread = std::abs(f[worst] - f[best]);
            if (spread <= rel_tol * (std::abs(f[best]) + 1e-300)) break;

            std::vector<double> centroid(dim, 0.0);
            for (int i = 0; i <= dim; ++i)
                if (i != worst)
                    for (int d = 0; d < dim; ++d) centroid[d] += pts[i][d] / dim;

            auto blend = [&](double coeff) {
                std::vector<double> x(dim);
                for (int d = 0; d < dim; ++d)
                    x[d] = centroid[d] + coeff * (pts[worst][d] - centroid[d]);
                return x;
            };
            std::vector<double> reflected = blend(-1.0);
            double fr = value(reflected);
            if (fr < f[best]) {
                std::vector<double> expanded = blend(-2.0);
                double fe = value(expanded);
                if (fe < fr) {
                    pts[worst] = expanded;
                    f[worst] = fe;
                } else {
                    pts[worst] = reflected;
                    f[worst] = fr;
                }
            } else if (fr < f[second]) {
                pts[worst] = reflected;
                f[worst] = fr;
            } else {
                std::vector<double> contracted = blend(0.5);
                double fc = value(contracted);
                if (fc < f[worst]) {
                    pts[worst] = contracted;
                    f[worst] = fc;
                } else {
                    for (int i = 0; i <= dim; ++i) {
                        if (i == best) continue;
                        for (int d = 0; d < dim; ++d)
                            pts[i][d] = 0.5 * (pts[i][d] + pts[best][d]);
                        f[i] = value(pts[i]);
                    }
                }
            }
        }
        int best = 0;
        for (int i = 1; i <= dim; ++i)
            if (f[i] < f[best]) best = i;
        return {pts[best], -f[best]};
    }
};

} // namespace

EntropyResult entropy(const TriMesh& mesh, const EntropySearchParams& params) {
    const Bbox bb = mesh.bounding_box();
    const double d = std::max(bb.diameter(), mesh.mean_edge_length());
    const Vec3 lo = bb.lo;
    const double d2 = d * d;

    // Normalized search coordinates: y = lo + (u0,u1,u2) d, tau = d^2 e^{u3},
    // so the search path is covariant under rigid motion and scaling.
    auto eval = [&](const std::vector<double>& u) {
        Vec3 y = lo + Vec3(u[0], u[1], u[2]) * d;
        double tau = d2 * std::exp(u[3]);
        return f_functional(mesh, y, tau);
    };

    std::vector<std::vector<double>> seeds;
    const int g = std::max(2, params.grid);
    const double lt_min = std::log(1e-3), lt_max = std::log(10.0);
    std::vector<double> taus(params.tau_seeds);
    for (int i = 0; i < params.tau_seeds; ++i)
        taus[i] = lt_min + (lt_max - lt_min) * i / std::max(1, params.tau_seeds - 1);

    for (int ix = 0; ix < g; ++ix)
        for (int iy = 0; iy < g; ++iy)
            for (int iz = 0; iz < g; ++iz)
                for (double lt : taus)
                    seeds.push_back({static_cast<double>(ix) / (g - 1),
                                     static_cast<double>(iy) / (g - 1),
                                     static_cast<double>(iz) / (g - 1), lt});

    // Local maxima of |A|^2 as extra centers (blow-up hot spots).
    if (params.curvature_seeds > 0) {
        CurvatureField curv = compute_curvature(mesh);
        std::vector<std::pair<double, int>> maxima;
        for (int i = 0; i < mesh.vertex_count(); ++i) {
            bool is_max = true;
            for (int j : mesh.vertex_ring(i))
                if (curv.a_norm2[j] > curv.a_norm2[i]) {
                    is_max = false;
                    break;
                }
            if (is_max) maxima.push_back({-curv.a_norm2[i], i});
        }
        std::sort(maxima.begin(), maxima.end());
        const int take = std::min<int>(params.curvature_seeds, maxima.size());
        for (int k = 0; k < take; ++k) {
            Vec3 u = (mesh.vertex(maxima[k].second) - lo) / d;
            for (double lt : taus) seeds.push_back({u.x(), u.y(), u.z(), lt});
        }
    }

    std::vector<std::pair<double, size_t>> ranked;
    ranked.reserve(seeds.size());
    for (size_t i = 0; i < seeds.size(); ++i) ranked.push_back({-eval(seeds[i]), i});
    std::sort(ranked.begin(), ranked.end());

    Simplex nm{4, params.rel_tol, params.max_iter};
    double best_value = -ranked.front().first;
    std::vector<double> best_u = seeds[ranked.front().second];
    const int starts = std::min<int>(params.refine_starts, ranked.size());
    for (int k = 0; k < starts; ++k) {
        auto [u, v] = nm.maximize(seeds[ranked[k].second], 0.08, eval);
        if (v > best_value) {
            best_value = v;
            best_u = u;
        }
    }

    EntropyResult out;
    out.value = best_value;
    out.y = lo + Vec3(best_u[0], best_u[1], best_u[2]) * d;
    out.tau = d2 * std::exp(best_u[3]);
    return out;
}

AreaRatioResult area_ratio_sup(const TriMesh& mesh, int sample_count, std::uint64_t seed,
                               int vertex_stride) {
    FaceGrid grid(mesh);
    const Bbox bb = mesh.bounding_box();
    const double diam = std::max(bb.diameter(), mesh.mean_edge_length());

    std::vector<Vec3> centers;
    const int stride = std::max(1, vertex_stride);
    for (int i = 0; i < mesh.vertex_count(); i += stride) centers.push_back(mesh.vertex(i));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int i = 0; i < sample_count; ++i) {
        double ux = uni(rng), uy = uni(rng), uz = uni(rng);
        centers.push_back(bb.lo + Vec3(ux * (bb.hi - bb.lo).x(), uy * (bb.hi - bb.lo).y(),
                                       uz * (bb.hi - bb.lo).z()));
    }
    // Interior hot spots: the supremum of a round component sits at its
    // center with R its circumradius, not on the surface.
    centers.push_back(bb.center());
    {
        Vec3 centroid = Vec3::Zero();
        double mass = 0;
        for (int i = 0; i < mesh.vertex_count(); ++i) {
            centroid += mesh.dual_area(i) * mesh.vertex(i);
            mass += mesh.dual_area(i);
        }
        if (mass > 0) centers.push_back(centroid / mass);
    }

    std::vector<double> ladder;
    const double r_min = std::max(mesh.min_edge_length(), 1e-9 * diam);
    for (double r = r_min; r < diam * 1.3; r *= 1.3) ladder.push_back(std::min(r, diam));

    AreaRatioResult out;
    for (const auto& c : centers) {
        double far = 0;
        for (const auto& v : mesh.vertices()) far = std::max(far, (v - c).norm());
        std::vector<double> radii = ladder;
        radii.push_back(far); // smallest ball containing everything
        for (double r : radii) {
            if (r <= 0) continue;
            double ratio = ball_area(grid, c, r) / (r * r);
            if (ratio > out.value) {
                out.value = ratio;
                out.center = c;
                out.radius = r;
            }
        }
    }
    return out;
}

EquivalenceReport check_area_entropy_equivalence(const TriMesh& mesh) {
    EquivalenceReport rep;
    rep.entropy_lb = entropy(mesh).value;
    rep.area_ratio_lb = area_ratio_sup(mesh, 64).value;
    rep.ratio_area_over_entropy = rep.area_ratio_lb / rep.entropy_lb;
    rep.ratio_entropy_over_area = rep.entropy_lb / rep.area_ratio_lb;
    return rep;
}

MonotonicityLedger monotonicity_ledger(const FlowTrajectory& traj, const KernelCenter& center,
                                       const ForceSpec& force, double kernel_floor) {
    MonotonicityLedger ledger;
    ledger.center = center;

    for (const auto& snap : traj.snapshots()) {
        const double tau = center.s - snap.t;
        if (tau <= kernel_floor) continue;
        const TriMesh& mesh = snap.mesh;
        CurvatureField curv = compute_curvature(mesh);
        std::vector<Vec3> beta = eval_force(force, mesh, curv);

        const int nv = mesh.vertex_count();
        std::vector<Vec3> residual(nv), residual_one(nv);
        std::vector<double> source_density(nv);
        for (int i = 0; i < nv; ++i) {
            const Vec3& n = curv.normal[i];
            Vec3 perp = (mesh.vertex(i) - center.y).dot(n) / (2 * tau) * n;
            residual_one[i] = curv.mean_curvature[i] + perp;
            residual[i] = residual_one[i] - 0.5 * beta[i];
            source_density[i] = 0.25 * beta[i].squaredNorm();
        }

        auto vec_sq = [&mesh](const std::vector<Vec3>& field) {
            return [&field, &mesh](int f, const Vec3&, const double b[3]) {
                const auto& [i, j, k] = mesh.face(f);
                Vec3 v = b[0] * field[i] + b[1] * field[j] + b[2] * field[k];
                return v.squaredNorm();
            };
        };
        auto lin = [&mesh](const std::vector<double>& field) {
            return [&field, &mesh](int f, const Vec3&, const double b[3]) {
                const auto& [i, j, k] = mesh.face(f);
                return b[0] * field[i] + b[1] * field[j] + b[2] * field[k];
            };
        };

        LedgerRow row;
        row.t = snap.t;
        row.gaussian_area = gaussian_area(mesh, center.y, tau);
        row.dissipation = gaussian_integral(mesh, center.y, tau, vec_sq(residual));
        row.dissipation_one_sided =
            gaussian_integral(mesh, center.y, tau, vec_sq(residual_one));
        row.source = gaussian_integral(mesh, center.y, tau, lin(source_density));
        row.source_one_sided = 2 * row.source;

        if (!ledger.rows.empty()) {
            const LedgerRow& prev = ledger.rows.back();
            const double dt = row.t - prev.t;
            row.int_dissipation =
                prev.int_dissipation + 0.5 * (row.dissipation + prev.dissipation) * dt;
            row.int_source = prev.int_source + 0.5 * (row.source + prev.source) * dt;
            row.int_dissipation_one_sided =
                prev.int_dissipation_one_sided +
                0.5 * (row.dissipation_one_sided + prev.dissipation_one_sided) * dt;
            row.int_source_one_sided = prev.int_source_one_sided +
                                       0.5 * (row.source_one_sided + prev.source_one_sided) * dt;
        }
        ledger.rows.push_back(row);
    }
    if (ledger.rows.empty())
        fail(ErrorCode::TimeAfterCenter, "no snapshot lies before the kernel center time");
    return ledger;
}

namespace {

double worst_excess(const std::vector<LedgerRow>& rows, bool one_sided) {
    double worst = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < rows.size(); ++i) {
        for (size_t j = i + 1; j < rows.size(); ++j) {
            double d_int =
                one_sided ? rows[j].int_dissipation_one_sided - rows[i].int_dissipation_one_sided
                          : rows[j].int_dissipation - rows[i].int_dissipation;
            double s_int = one_sided ? rows[j].int_source_one_sided - rows[i].int_source_one_sided
                                     : rows[j].int_source - rows[i].int_source;
            double excess = rows[j].gaussian_area + d_int - rows[i].gaussian_area - s_int;
            worst = std::max(worst, excess / rows[i].gaussian_area);
        }
    }
    return worst;
}

} // namespace

double MonotonicityLedger::worst_pair_excess() const { return worst_excess(rows, false); }

double MonotonicityLedger::worst_pair_excess_one_sided() const { return worst_excess(rows, true); }

LocalAreaBoundReport local_area_bound_check(const FlowTrajectory& traj, const Vec3& x0, double r,
                                            double t0, double constant) {
    const double t_lo = t0 - r * r / 16.0; // m = 2: r^2 / (8 m)
    if (t_lo < traj.start_time() - 1e-12 || t0 > traj.end_time() + 1e-12)
        fail(ErrorCode::WindowOutOfRange, "window [t0 - r^2/16, t0] not covered");

    LocalAreaBoundReport rep;
    rep.constant = constant;
    {
        const Snapshot& base = traj.snapshot(traj.nearest_snapshot(t_lo));
        FaceGrid grid(base.mesh);
        rep.base_area = ball_area(grid, x0, r);
    }

    std::vector<int> window;
    for (int i = 0; i < traj.size(); ++i) {
        double t = traj.snapshot(i).t;
        if (t >= t_lo - 1e-12 && t <= t0 + 1e-12) window.push_back(i);
    }
    const size_t cap = 64;
    std::vector<int> chosen;
    if (window.size() <= cap)
        chosen = window;
    else
        for (size_t k = 0; k < cap; ++k)
            chosen.push_back(window[k * (window.size() - 1) / (cap - 1)]);

    for (int i : chosen) {
        const Snapshot& s = traj.snapshot(i);
        FaceGrid grid(s.mesh);
        LocalAreaBoundRow row;
        row.t = s.t;
        row.lhs = ball_area(grid, x0, r / 2);
        row.rhs = 8.0 * std::exp((constant + constant / r) * (s.t - t_lo)) * rep.base_area;
        if (row.lhs > row.rhs) rep.holds = false;
        rep.rows.push_back(row);
    }
    return rep;
}

GronwallResult gronwall_bound(const std::vector<std::pair<double, double>>& samples, double c,
                              double t0) {
    if (samples.empty()) fail(ErrorCode::NegativeSample, "no samples");
    for (size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].second < 0) fail(ErrorCode::NegativeSample, "f must be nonnegative");
        if (i > 0 && samples[i].first < samples[i - 1].first)
            fail(ErrorCode::NegativeSample, "samples must be sorted by time");
    }
    if (t0 < samples.front().first - 1e-12 || t0 > samples.back().first + 1e-12)
        fail(ErrorCode::NegativeSample, "t0 outside the sample range");

    size_t anchor = 0;
    double dist = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < samples.size(); ++i) {
        double d = std::abs(samples[i].first - t0);
        if (d < dist) {
            dist = d;
            anchor = i;
        }
    }
    const double f0 = samples[anchor].second;
    const double ta = samples[anchor].first;

    GronwallResult out;
    out.bound.resize(samples.size());
    for (size_t i = 0; i < samples.size(); ++i)
        out.bound[i] = std::exp(c * (samples[i].first - ta)) * f0;

    // Verdict applies from the anchor forward; trapezoid is exact for the
    // piecewise-linear interpretation of the samples.
    const double slack = 1e-9 * (1 + std::abs(f0));
    double running = 0;
    for (size_t i = anchor + 1; i < samples.size(); ++i) {
        running += 0.5 * (samples[i].second + samples[i - 1].second) *
                   (samples[i].first - samples[i - 1].first);
        if (samples[i].second > f0 + c * running + slack) out.hypothesis_holds = false;
        if (samples[i].second > out.bound[i] + slack) out.bound_holds = false;
    }
    return out;
}

} // namespace mcf
