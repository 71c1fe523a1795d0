#pragma once

#include <memory>
#include <vector>

#include "mcf/curvature.hpp"
#include "mcf/trimesh.hpp"

namespace mcf {

enum class ForceKind { Zero, ConstantField, VolumePreserving, RescaledMcf, ScaledComposite };

/// A force field evaluated per vertex from position and normal frame, with
/// a declared sup-norm bound used by the growth diagnostics. Evaluation
/// enforces the bound and throws SupNormViolation past 1e-9 relative slack.
class ForceSpec {
public:
    static ForceSpec zero();
    static ForceSpec constant(const Vec3& v);
    /// bound must dominate the mean scalar curvature along the run.
    static ForceSpec volume_preserving(double bound);
    /// x-perp / 2 force; unbounded on all of space, so the declared bound
    /// comes from a user-supplied bounding ball radius: B = radius / 2.
    static ForceSpec rescaled_mcf(double bounding_radius);

    ForceKind kind() const { return kind_; }
    double bound() const { return bound_; }
    const Vec3& constant_vector() const { return vector_; }
    double composite_scale() const { return scale_; }
    const Vec3& composite_center() const { return center_; }
    const ForceSpec& inner() const { return *inner_; }

private:
    ForceKind kind_ = ForceKind::Zero;
    double bound_ = 0;
    Vec3 vector_ = Vec3::Zero();             // ConstantField
    double scale_ = 1;                        // ScaledComposite
    Vec3 center_ = Vec3::Zero();              // ScaledComposite
    std::shared_ptr<const ForceSpec> inner_;  // ScaledComposite

    friend ForceSpec rescale_force(const ForceSpec& spec, const Vec3& center, double alpha);
};

/// Per-vertex force values for the given mesh snapshot.
std::vector<Vec3> eval_force(const ForceSpec& spec, const TriMesh& mesh,
                             const CurvatureField& curvature);

/// Parabolic rescaling of the force: the returned spec evaluates to
/// alpha * beta(center + alpha * x); the bound becomes alpha * B.
/// Throws NonPositiveScale for alpha <= 0.
ForceSpec rescale_force(const ForceSpec& spec, const Vec3& center, double alpha);

} // namespace mcf
