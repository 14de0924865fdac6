#pragma once

#include <array>
#include <vector>

#include "egw/errors.hpp"

namespace egw {

using Vec3 = std::array<double, 3>;

// Convex hull of a finite 3-D point set with explicit handling of flat
// (affinely degenerate) inputs. The affine dimension is detected first with a
// spectral test (tolerance below); points are then quantized onto an integer
// grid inside the detected subspace and the hull is built with exact integer
// predicates, so facet structure is deterministic and never self-contradicts.
struct Hull3 {
  int dim = -1;                     // affine dimension 0..3 (-1: empty input)
  std::vector<Vec3> points;         // deduplicated input points
  std::vector<int> original_index;  // representative input index per point
  std::vector<int> vertices;        // extreme points (indices into points)

  // dim == 3: oriented facets (outward), plus halfspace form n.v <= off.
  std::vector<std::array<int, 3>> facets;
  std::vector<Vec3> facet_normals;  // unit normals
  std::vector<double> facet_offsets;

  // dim <= 2: affine subspace through origin_ spanned by axes (dim of them),
  // and for dim == 2 the boundary ring in order.
  Vec3 origin{0, 0, 0};
  std::array<Vec3, 3> axes{};  // orthonormal basis, first `dim` span the hull
  std::vector<int> ring;       // dim == 2 boundary walk

  double volume = 0.0;  // 0 whenever dim < 3

  // max over constraints of signed distance; <= 0 means inside/on. For flat
  // hulls this includes the out-of-subspace distance.
  double signed_distance(const Vec3& v) const;

  // Convex combination of hull points reproducing v (best effort; residual is
  // the max-norm reconstruction error). Pairs are (point index, weight).
  struct Combination {
    std::vector<std::pair<int, double>> weights;
    double residual = 0.0;
  };
  Combination combination(const Vec3& v) const;
};

// Dimension-collapse tolerance: spreads below this count as flat.
constexpr double k_hull_flat_tol = 1e-9;

Hull3 convex_hull(const std::vector<Vec3>& pts);

}  // namespace egw
