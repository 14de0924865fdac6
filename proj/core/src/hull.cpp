#include "egw/hull.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>

namespace egw {

namespace {

using I128 = __int128;

struct IPoint {
  std::int64_t c[3];
};

constexpr double k_quant_scale = 1073741824.0;  // 2^30

std::int64_t quantize(double v) {
  return static_cast<std::int64_t>(std::llround(v * k_quant_scale));
}

// Sign of det[b-a, c-a, d-a] on integer points; exact in __int128 for
// coordinates up to ~2^38.
int orient3d(const IPoint& a, const IPoint& b, const IPoint& c, const IPoint& d) {
  I128 m[3][3];
  for (int i = 0; i < 3; ++i) {
    m[0][i] = I128(b.c[i]) - a.c[i];
    m[1][i] = I128(c.c[i]) - a.c[i];
    m[2][i] = I128(d.c[i]) - a.c[i];
  }
  const I128 det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                   m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                   m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  return det > 0 ? 1 : (det < 0 ? -1 : 0);
}

int orient2d(const std::array<std::int64_t, 2>& a, const std::array<std::int64_t, 2>& b,
             const std::array<std::int64_t, 2>& c) {
  const I128 det = I128(b[0] - a[0]) * (c[1] - a[1]) - I128(b[1] - a[1]) * (c[0] - a[0]);
  return det > 0 ? 1 : (det < 0 ? -1 : 0);
}

// Jacobi eigensolver for a symmetric 3x3 matrix.
void eigen_sym3(double m[3][3], double eval[3], double evec[3][3]) {
  double a[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      a[i][j] = m[i][j];
      evec[i][j] = (i == j) ? 1.0 : 0.0;
    }
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = std::fabs(a[0][1]) + std::fabs(a[0][2]) + std::fabs(a[1][2]);
    if (off < 1e-30) break;
    for (int p = 0; p < 2; ++p)
      for (int q = p + 1; q < 3; ++q) {
        if (std::fabs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 3; ++k) {
          const double vkp = evec[k][p], vkq = evec[k][q];
          evec[k][p] = c * vkp - s * vkq;
          evec[k][q] = s * vkp + c * vkq;
        }
      }
  }
  for (int i = 0; i < 3; ++i) eval[i] = a[i][i];
  // Sort descending, keeping eigenvector columns aligned.
  int order[3] = {0, 1, 2};
  std::sort(order, order + 3, [&](int i, int j) { return eval[i] > eval[j]; });
  double ev[3], evv[3][3];
  for (int i = 0; i < 3; ++i) {
    ev[i] = eval[order[i]];
    for (int k = 0; k < 3; ++k) evv[k][i] = evec[k][order[i]];
  }
  for (int i = 0; i < 3; ++i) {
    eval[i] = ev[i];
    for (int k = 0; k < 3; ++k) evec[k][i] = evv[k][i];
  }
}

double dot3(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

Vec3 sub3(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

Vec3 cross3(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

double norm3(const Vec3& a) { return std::sqrt(dot3(a, a)); }

// Incremental 3-D hull over integer points; requires affine rank 3.
struct IncrementalHull {
  const std::vector<IPoint>& pts;
  struct Facet {
    int a, b, c;
    bool alive = true;
  };
  std::vector<Facet> facets;
  IPoint interior4;  // 4x the interior reference point (integer)

  explicit IncrementalHull(const std::vector<IPoint>& points) : pts(points) {}

  int orient_ref(int a, int b, int c) const {
    // orient3d against interior4/4; scale-invariant trick: compare against
    // the point 4*ref by scaling the facet delta rows.
    IPoint a4{4 * pts[a].c[0], 4 * pts[a].c[1], 4 * pts[a].c[2]};
    IPoint b4{4 * pts[b].c[0], 4 * pts[b].c[1], 4 * pts[b].c[2]};
    IPoint c4{4 * pts[c].c[0], 4 * pts[c].c[1], 4 * pts[c].c[2]};
    return orient3d(a4, b4, c4, interior4);
  }

  void add_facet(int a, int b, int c) {
    if (orient_ref(a, b, c) > 0) std::swap(b, c);  // interior below facet
    facets.push_back({a, b, c});
  }

  bool visible(const Facet& f, int p) const {
    return orient3d(pts[f.a], pts[f.b], pts[f.c], pts[p]) > 0;
  }

  void build(const std::array<int, 4>& seed, const std::vector<int>& rest) {
    interior4 = IPoint{0, 0, 0};
    for (int i : seed)
      for (int k = 0; k < 3; ++k) interior4.c[k] += pts[i].c[k];
    add_facet(seed[0], seed[1], seed[2]);
    add_facet(seed[0], seed[1], seed[3]);
    add_facet(seed[0], seed[2], seed[3]);
    add_facet(seed[1], seed[2], seed[3]);
    for (int p : rest) insert(p);
    facets.erase(std::remove_if(facets.begin(), facets.end(),
                                [](const Facet& f) { return !f.alive; }),
                 facets.end());
  }

  void insert(int p) {
    std::vector<int> vis;
    for (int i = 0; i < static_cast<int>(facets.size()); ++i)
      if (facets[i].alive && visible(facets[i], p)) vis.push_back(i);
    if (vis.empty()) return;
    // Horizon: directed edges of visible facets whose twin is not visible.
    std::map<std::pair<int, int>, int> edge_count;
    for (int i : vis) {
      const auto& f = facets[i];
      const int e[3][2] = {{f.a, f.b}, {f.b, f.c}, {f.c, f.a}};
      for (auto& ed : e) {
        auto key = std::minmax(ed[0], ed[1]);
        edge_count[{key.first, key.second}]++;
      }
    }
    std::vector<std::pair<int, int>> horizon;
    for (int i : vis) {
      const auto& f = facets[i];
      const int e[3][2] = {{f.a, f.b}, {f.b, f.c}, {f.c, f.a}};
      for (auto& ed : e) {
        auto key = std::minmax(ed[0], ed[1]);
        if (edge_count[{key.first, key.second}] == 1)
          horizon.push_back({ed[0], ed[1]});
      }
    }
    for (int i : vis) facets[i].alive = false;
    for (auto& ed : horizon) add_facet(ed.first, ed.second, p);
  }
};

}  // namespace

Hull3 convex_hull(const std::vector<Vec3>& input) {
  Hull3 h;
  if (input.empty()) return h;

  // Deduplicate on the quantized grid.
  std::map<std::array<std::int64_t, 3>, int> seen;
  for (size_t i = 0; i < input.size(); ++i) {
    std::array<std::int64_t, 3> key = {quantize(input[i][0]), quantize(input[i][1]),
                                       quantize(input[i][2])};
    if (seen.emplace(key, static_cast<int>(h.points.size())).second) {
      h.points.push_back(input[i]);
      h.original_index.push_back(static_cast<int>(i));
    }
  }
  const int n = static_cast<int>(h.points.size());

  // Detect the affine dimension spectrally.
  Vec3 mean{0, 0, 0};
  for (const auto& p : h.points)
    for (int k = 0; k < 3; ++k) mean[k] += p[k] / n;
  double gram[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  for (const auto& p : h.points) {
    const Vec3 d = sub3(p, mean);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) gram[i][j] += d[i] * d[j];
  }
  double eval[3], evec[3][3];
  eigen_sym3(gram, eval, evec);
  h.origin = mean;
  for (int i = 0; i < 3; ++i)
    h.axes[i] = {evec[0][i], evec[1][i], evec[2][i]};
  int dim = 0;
  for (int i = 0; i < 3; ++i) {
    const double spread = std::sqrt(std::max(eval[i], 0.0) / n);
    if (spread > k_hull_flat_tol) ++dim;
  }

  // If the spectral test says 3-D but the quantized points are coplanar
  // (possible only for spreads right at the grid scale), fall back to 2-D.
  if (dim == 3) {
    std::vector<IPoint> probe(n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < 3; ++k) probe[i].c[k] = quantize(h.points[i][k]);
    bool full_rank = false;
    int s1 = -1, s2 = -1;
    for (int i = 1; i < n && s1 < 0; ++i)
      if (probe[i].c[0] != probe[0].c[0] || probe[i].c[1] != probe[0].c[1] ||
          probe[i].c[2] != probe[0].c[2])
        s1 = i;
    for (int i = 1; i < n && s1 >= 0 && s2 < 0; ++i) {
      if (i == s1) continue;
      const I128 dx1 = probe[s1].c[0] - probe[0].c[0],
                 dy1 = probe[s1].c[1] - probe[0].c[1],
                 dz1 = probe[s1].c[2] - probe[0].c[2];
      const I128 dx2 = probe[i].c[0] - probe[0].c[0],
                 dy2 = probe[i].c[1] - probe[0].c[1],
                 dz2 = probe[i].c[2] - probe[0].c[2];
      if (dy1 * dz2 - dz1 * dy2 != 0 || dz1 * dx2 - dx1 * dz2 != 0 ||
          dx1 * dy2 - dy1 * dx2 != 0)
        s2 = i;
    }
    if (s1 >= 0 && s2 >= 0)
      for (int i = 1; i < n && !full_rank; ++i)
        if (i != s1 && i != s2 &&
            orient3d(probe[0], probe[s1], probe[s2], probe[i]) != 0)
          full_rank = true;
    if (!full_rank) dim = 2;
  }
  h.dim = dim;

  if (dim == 0) {
    h.vertices = {0};
    return h;
  }

  if (dim == 1) {
    int lo = 0, hi = 0;
    double tlo = 0, thi = 0;
    for (int i = 0; i < n; ++i) {
      const double t = dot3(sub3(h.points[i], h.origin), h.axes[0]);
      if (t < tlo || i == 0) tlo = t, lo = i;
      if (t > thi || i == 0) thi = t, hi = i;
    }
    h.vertices = {lo};
    if (hi != lo) h.vertices.push_back(hi);
    return h;
  }

  if (dim == 2) {
    // Exact 2-D hull on quantized in-plane coordinates.
    std::vector<std::array<std::int64_t, 2>> q(n);
    for (int i = 0; i < n; ++i) {
      const Vec3 d = sub3(h.points[i], h.origin);
      q[i] = {quantize(dot3(d, h.axes[0])), quantize(dot3(d, h.axes[1]))};
    }
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      return q[a] < q[b] || (q[a] == q[b] && a < b);
    });
    idx.erase(std::unique(idx.begin(), idx.end(),
                          [&](int a, int b) { return q[a] == q[b]; }),
              idx.end());
    std::vector<int> hull_pts;
    auto build_chain = [&](bool upper) {
      std::vector<int> chain;
      for (int ii : idx) {
        const int i = ii;
        while (chain.size() >= 2) {
          const int a = chain[chain.size() - 2], b = chain[chain.size() - 1];
          const int o = orient2d(q[a], q[b], q[i]);
          if (upper ? o >= 0 : o <= 0)
            chain.pop_back();
          else
            break;
        }
        chain.push_back(i);
      }
      return chain;
    };
    auto lower = build_chain(false);
    auto upper = build_chain(true);
    hull_pts = lower;
    for (int i = static_cast<int>(upper.size()) - 2; i >= 1; --i)
      hull_pts.push_back(upper[i]);
    h.ring = hull_pts;
    h.vertices = hull_pts;
    std::sort(h.vertices.begin(), h.vertices.end());
    return h;
  }

  // dim == 3: exact incremental hull.
  std::vector<IPoint> ip(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < 3; ++k) ip[i].c[k] = quantize(h.points[i][k]);

  // Seed with four affinely independent points.
  std::array<int, 4> seed = {-1, -1, -1, -1};
  seed[0] = 0;
  for (int i = 1; i < n && seed[1] < 0; ++i)
    if (ip[i].c[0] != ip[0].c[0] || ip[i].c[1] != ip[0].c[1] ||
        ip[i].c[2] != ip[0].c[2])
      seed[1] = i;
  for (int i = 1; i < n && seed[2] < 0; ++i) {
    if (i == seed[1]) continue;
    // Non-collinear: cross product of deltas nonzero.
    const I128 dx1 = ip[seed[1]].c[0] - ip[0].c[0], dy1 = ip[seed[1]].c[1] - ip[0].c[1],
               dz1 = ip[seed[1]].c[2] - ip[0].c[2];
    const I128 dx2 = ip[i].c[0] - ip[0].c[0], dy2 = ip[i].c[1] - ip[0].c[1],
               dz2 = ip[i].c[2] - ip[0].c[2];
    if (dy1 * dz2 - dz1 * dy2 != 0 || dz1 * dx2 - dx1 * dz2 != 0 ||
        dx1 * dy2 - dy1 * dx2 != 0)
      seed[2] = i;
  }
  for (int i = 1; i < n && seed[3] < 0; ++i) {
    if (i == seed[1] || i == seed[2]) continue;
    if (orient3d(ip[0], ip[seed[1]], ip[seed[2]], ip[i]) != 0) seed[3] = i;
  }
  if (seed[1] < 0 || seed[2] < 0 || seed[3] < 0)
    fail(errc::invalid_argument, "hull rank detection failed");  // unreachable

  IncrementalHull inc(ip);
  std::vector<int> rest;
  for (int i = 0; i < n; ++i)
    if (i != seed[0] && i != seed[1] && i != seed[2] && i != seed[3])
      rest.push_back(i);
  inc.build(seed, rest);

  std::vector<bool> used(n, false);
  for (const auto& f : inc.facets) {
    h.facets.push_back({f.a, f.b, f.c});
    used[f.a] = used[f.b] = used[f.c] = true;
  }
  for (int i = 0; i < n; ++i)
    if (used[i]) h.vertices.push_back(i);

  // Halfspace form and volume from the exact facet structure.
  Vec3 centroid{0, 0, 0};
  for (int v : h.vertices)
    for (int k = 0; k < 3; ++k) centroid[k] += h.points[v][k] / h.vertices.size();
  h.volume = 0.0;
  for (const auto& f : h.facets) {
    const Vec3& a = h.points[f[0]];
    const Vec3& b = h.points[f[1]];
    const Vec3& c = h.points[f[2]];
    Vec3 nrm = cross3(sub3(b, a), sub3(c, a));
    const double len = norm3(nrm);
    if (len < 1e-300) continue;
    for (auto& t : nrm) t /= len;
    if (dot3(nrm, sub3(centroid, a)) > 0)
      for (auto& t : nrm) t = -t;
    h.facet_normals.push_back(nrm);
    h.facet_offsets.push_back(dot3(nrm, a));
    h.volume += dot3(sub3(a, centroid), cross3(sub3(b, centroid), sub3(c, centroid)));
  }
  h.volume = std::fabs(h.volume) / 6.0;
  return h;
}

double Hull3::signed_distance(const Vec3& v) const {
  if (dim < 0) return 1e300;
  if (dim == 0) {
    const Vec3 d = sub3(v, points[vertices[0]]);
    return norm3(d);
  }
  const Vec3 dv = sub3(v, origin);
  if (dim == 1) {
    // Distance off the line plus beyond-endpoint excess along it.
    const double t = dot3(dv, axes[0]);
    double off = 0.0;
    for (int k = 1; k < 3; ++k) off = std::max(off, std::fabs(dot3(dv, axes[k])));
    double tlo = 1e300, thi = -1e300;
    for (int i : vertices) {
      const double ti = dot3(sub3(points[i], origin), axes[0]);
      tlo = std::min(tlo, ti);
      thi = std::max(thi, ti);
    }
    return std::max({off, tlo - t, t - thi});
  }
  if (dim == 2) {
    const double off = std::fabs(dot3(dv, axes[2]));
    const double u = dot3(dv, axes[0]);
    const double w = dot3(dv, axes[1]);
    double inplane = -1e300;
    const int m = static_cast<int>(ring.size());
    if (m == 0) return 1e300;
    if (m == 1) {
      const Vec3 d = sub3(v, points[ring[0]]);
      return norm3(d);
    }
    if (m == 2) {
      // Degenerate ring (segment) in the plane.
      const Vec3 a = points[ring[0]], b = points[ring[1]];
      const Vec3 ab = sub3(b, a);
      const double len2 = dot3(ab, ab);
      double t = len2 > 0 ? dot3(sub3(v, a), ab) / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      Vec3 proj = {a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]};
      return norm3(sub3(v, proj));
    }
    for (int i = 0; i < m; ++i) {
      const Vec3 da = sub3(points[ring[i]], origin);
      const Vec3 db = sub3(points[ring[(i + 1) % m]], origin);
      const double ax = dot3(da, axes[0]), ay = dot3(da, axes[1]);
      const double bx = dot3(db, axes[0]), by = dot3(db, axes[1]);
      // Outward normal of edge (a->b) for a counter-clockwise ring.
      double ex = by - ay, ey = -(bx - ax);
      const double elen = std::hypot(ex, ey);
      if (elen < 1e-300) continue;
      ex /= elen;
      ey /= elen;
      inplane = std::max(inplane, (u - ax) * ex + (w - ay) * ey);
    }
    return std::max(off, inplane);
  }
  double best = -1e300;
  for (size_t i = 0; i < facet_normals.size(); ++i)
    best = std::max(best, dot3(facet_normals[i], v) - facet_offsets[i]);
  return best;
}

Hull3::Combination Hull3::combination(const Vec3& v) const {
  Combination out;
  auto finish = [&](std::vector<std::pair<int, double>> w) {
    Vec3 rec{0, 0, 0};
    double total = 0.0;
    for (auto& [i, wi] : w) total += wi;
    if (total > 0)
      for (auto& [i, wi] : w) wi /= total;
    for (auto& [i, wi] : w)
      for (int k = 0; k < 3; ++k) rec[k] += wi * points[i][k];
    out.weights = std::move(w);
    out.residual = std::max({std::fabs(rec[0] - v[0]), std::fabs(rec[1] - v[1]),
                             std::fabs(rec[2] - v[2])});
    return out;
  };

  if (dim <= 0) return finish({{vertices.empty() ? 0 : vertices[0], 1.0}});
  if (dim == 1 || (dim == 2 && ring.size() == 2)) {
    const int a = vertices.front();
    const int b = vertices.back();
    const Vec3 ab = sub3(points[b], points[a]);
    const double len2 = dot3(ab, ab);
    double t = len2 > 0 ? dot3(sub3(v, points[a]), ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return finish({{a, 1.0 - t}, {b, t}});
  }
  if (dim == 2) {
    // Fan triangulation around ring[0]; pick the triangle whose barycentric
    // coordinates are least negative.
    const int m = static_cast<int>(ring.size());
    double best_min = -1e300;
    std::vector<std::pair<int, double>> best;
    const Vec3 dv = sub3(v, origin);
    const double u = dot3(dv, axes[0]), w = dot3(dv, axes[1]);
    auto plane_xy = [&](int i) {
      const Vec3 d = sub3(points[i], origin);
      return std::array<double, 2>{dot3(d, axes[0]), dot3(d, axes[1])};
    };
    for (int i = 1; i + 1 < m; ++i) {
      const auto A = plane_xy(ring[0]), B = plane_xy(ring[i]), C = plane_xy(ring[i + 1]);
      const double det = (B[0] - A[0]) * (C[1] - A[1]) - (C[0] - A[0]) * (B[1] - A[1]);
      if (std::fabs(det) < 1e-300) continue;
      const double l1 = ((u - A[0]) * (C[1] - A[1]) - (C[0] - A[0]) * (w - A[1])) / det;
      const double l2 = ((B[0] - A[0]) * (w - A[1]) - (u - A[0]) * (B[1] - A[1])) / det;
      const double l0 = 1.0 - l1 - l2;
      const double mn = std::min({l0, l1, l2});
      if (mn > best_min) {
        best_min = mn;
        best = {{ring[0], std::max(l0, 0.0)},
                {ring[i], std::max(l1, 0.0)},
                {ring[i + 1], std::max(l2, 0.0)}};
      }
    }
    if (best.empty()) best = {{ring[0], 1.0}};
    return finish(std::move(best));
  }
  // dim == 3: tetrahedra fanned from vertices[0] over all facets.
  const int apex = vertices[0];
  double best_min = -1e300;
  std::vector<std::pair<int, double>> best;
  for (const auto& f : facets) {
    const Vec3& A = points[apex];
    const Vec3& B = points[f[0]];
    const Vec3& C = points[f[1]];
    const Vec3& D = points[f[2]];
    // Solve v = A + l1(B-A) + l2(C-A) + l3(D-A).
    const Vec3 e1 = sub3(B, A), e2 = sub3(C, A), e3 = sub3(D, A), r = sub3(v, A);
    const double det = dot3(e1, cross3(e2, e3));
    if (std::fabs(det) < 1e-300) continue;
    const double l1 = dot3(r, cross3(e2, e3)) / det;
    const double l2 = dot3(e1, cross3(r, e3)) / det;
    const double l3 = dot3(e1, cross3(e2, r)) / det;
    const double l0 = 1.0 - l1 - l2 - l3;
    const double mn = std::min({l0, l1, l2, l3});
    if (mn > best_min) {
      best_min = mn;
      best = {{apex, std::max(l0, 0.0)},
              {f[0], std::max(l1, 0.0)},
              {f[1], std::max(l2, 0.0)},
              {f[2], std::max(l3, 0.0)}};
    }
  }
  if (best.empty()) best = {{apex, 1.0}};
  return finish(std::move(best));
}

}  // namespace egw
