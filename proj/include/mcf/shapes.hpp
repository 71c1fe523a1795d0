#pragma once

#include "mcf/trimesh.hpp"

namespace mcf::shapes {

/// Subdivided icosahedron projected to the sphere of the given radius.
/// Level 0 is the icosahedron (12 vertices, 20 faces); each level splits
/// every face in four.
TriMesh icosphere(double radius, int level, const Vec3& center = Vec3::Zero());

/// Torus with major radius R, tube radius r, res_major x res_minor grid.
TriMesh torus(double major_radius, double tube_radius, int res_major, int res_minor);

/// Capsule: cylinder of the given radius and length (between cap centers)
/// with hemispherical caps, axis along z.
TriMesh capsule(double radius, double length, int res_axial, int res_around);

/// Two unit-radius bulbs joined by a thin neck, axis along z; the canonical
/// neck-pinch initial surface. neck_radius controls the pinch time.
TriMesh dumbbell(double neck_radius, int res_axial, int res_around);

/// Axis-aligned cube of half-width `half` centered at the origin, each face
/// an n x n grid. Used as a closed carrier for flat-patch fixtures.
TriMesh box_grid(double half, int n);

/// Open flat disk of the given radius in the z=0 plane (boundary allowed);
/// rings controls radial resolution.
TriMesh flat_disk(double radius, int rings);

/// Open pair of parallel square sheets z = +/- gap/2 of the given half-width.
TriMesh two_sheets(double half, double gap, int n);

/// Closed box with a gaussian bump of height `height` and width `width`
/// centered on the top face. Bump apex is at (0, 0, half + height).
TriMesh bump_box(double half, int n, double height, double width);

} // namespace mcf::shapes
