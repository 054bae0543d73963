#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace ncv {

/// Lower convex chain of points already sorted by strictly increasing x
/// (monotone chain). Collinear middle points are dropped. Returns indices.
std::vector<std::size_t> lower_chain(std::span<const Eigen::Vector2d> sorted);

/// Convex hull of planar points, counter-clockwise, without collinear points.
std::vector<std::size_t> convex_hull_2d(std::span<const Eigen::Vector2d> pts);

/// Downward-facing facets of the convex hull of lifted points (x, y, z), each
/// listed counter-clockwise in the (x, y) projection. Throws DegenerateInput
/// when the (x, y) projections are collinear.
std::vector<std::array<std::size_t, 3>> lower_hull_3d(std::span<const Eigen::Vector3d> pts);

}  // namespace ncv
