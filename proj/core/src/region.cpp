#include "egw/region.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <utility>

#include "egw/errors.hpp"
#include "egw/lp.hpp"

namespace egw {

namespace {

double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

Vec3 to_vec(const MiPoint& v) { return {v.vx, v.vy, v.vxy}; }

std::string fmt_vec(const Vec3& b) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "(%.6g, %.6g, %.6g)", b[0], b[1], b[2]);
  return buf;
}

// One half-space of the outer polytope, written as a.v <= b.
struct OuterRow {
  const char* name;
  Vec3 a;
  double b;
};

std::vector<OuterRow> outer_rows(const JointPmf& p) {
  const double ixy = p.mutual_information();
  const double hxgy = p.hx_given_y();
  const double hygx = p.hy_given_x();
  return {
      {"v_x >= 0", {-1, 0, 0}, 0.0},
      {"v_y >= 0", {0, -1, 0}, 0.0},
      {"v_x + v_y - v_xy <= I(X;Y)", {1, 1, -1}, ixy},
      {"v_xy - v_y >= 0", {0, 1, -1}, 0.0},
      {"v_xy - v_y <= H(X|Y)", {0, -1, 1}, hxgy},
      {"v_xy - v_x >= 0", {1, 0, -1}, 0.0},
      {"v_xy - v_x <= H(Y|X)", {-1, 0, 1}, hygx},
  };
}

double outer_min_slack(const std::vector<OuterRow>& rows, const Vec3& q) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) m = std::min(m, r.b - dot(r.a, q));
  return m;
}

// Time-shared channel realizing the convex combination sum_i w_i . channel_i;
// the mi-point of the result is the matching combination of the points.
Channel fold_mixture(const std::vector<std::pair<const Channel*, double>>& parts) {
  Channel cur = *parts[0].first;
  double acc = parts[0].second;
  for (size_t i = 1; i < parts.size(); ++i) {
    const double w = parts[i].second;
    if (w <= 0) continue;
    cur = mixture_channel(cur, *parts[i].first, w / (acc + w));
    acc += w;
  }
  return cur;
}

// Deterministic sample channels for the structural checks: a few canonical
// deterministic maps first, then random soft rows.
Channel trial_channel(const JointPmf& p, Rng& rng, int t) {
  const int nx = p.nx(), ny = p.ny();
  const int cells = nx * ny;
  std::vector<int> m(static_cast<size_t>(cells));
  switch (t) {
    case 0:
      return constant_channel(nx, ny);
    case 1:
      for (int c = 0; c < cells; ++c) m[static_cast<size_t>(c)] = c / ny;
      return deterministic_channel(nx, ny, m, nx);
    case 2:
      for (int c = 0; c < cells; ++c) m[static_cast<size_t>(c)] = c % ny;
      return deterministic_channel(nx, ny, m, ny);
    case 3:
      for (int c = 0; c < cells; ++c) m[static_cast<size_t>(c)] = c;
      return deterministic_channel(nx, ny, m, cells);
    default: {
      const int u = 2 + static_cast<int>(rng.next_u64() % 3);
      std::vector<double> q(static_cast<size_t>(cells) * u);
      for (int c = 0; c < cells; ++c) {
        std::vector<double> row = rng.dirichlet(u);
        for (int k = 0; k < u; ++k) q[static_cast<size_t>(c) * u + k] = row[static_cast<size_t>(k)];
      }
      return validate_channel(nx, ny, u, std::move(q));
    }
  }
}

}  // namespace

// ============================================================
// Point maps and exact bounds
// ============================================================

MiPoint mi_point(const JointPmf& p, const Channel& c) { return mi_point_of(p, c); }

OuterBoundReport outer_bound_check(const JointPmf& p, const MiPoint& v, double tol) {
  const Vec3 q = to_vec(v);
  OuterBoundReport rep;
  rep.min_slack = std::numeric_limits<double>::infinity();
  for (const auto& r : outer_rows(p)) {
    const double slack = r.b - dot(r.a, q);
    rep.terms.push_back({r.name, slack});
    rep.min_slack = std::min(rep.min_slack, slack);
    if (slack < -tol) rep.violated.push_back({r.name, slack});
  }
  rep.inside = rep.violated.empty();
  return rep;
}

RateTuple rate_tuple_of(const JointPmf& p, const MiPoint& v) {
  const OuterBoundReport ob = outer_bound_check(p, v, 1e-9);
  if (!ob.inside)
    fail(errc::outer_bound_violated,
         "mi-point violates " + ob.violated.front().name + " by " +
             std::to_string(-ob.violated.front().slack));
  RateTuple r;
  r[0] = v.vxy;
  r[1] = p.hx() - v.vx;
  r[2] = p.hy() - v.vy;
  r[3] = p.hx_given_y() - v.vxy + v.vy;
  r[4] = p.hy_given_x() - v.vxy + v.vx;
  for (int k = 0; k < 5; ++k) r[k] = std::max(r[k], 0.0);
  return r;
}

std::vector<Vec3> io_corners(const JointPmf& p) {
  const auto rows = outer_rows(p);
  const int n = static_cast<int>(rows.size());
  std::vector<Vec3> out;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const Vec3 &a = rows[static_cast<size_t>(i)].a, &b = rows[static_cast<size_t>(j)].a,
                   &c = rows[static_cast<size_t>(k)].a;
        const double det = a[0] * (b[1] * c[2] - b[2] * c[1]) -
                           a[1] * (b[0] * c[2] - b[2] * c[0]) +
                           a[2] * (b[0] * c[1] - b[1] * c[0]);
        if (std::fabs(det) < 1e-10) continue;
        const double r0 = rows[static_cast<size_t>(i)].b, r1 = rows[static_cast<size_t>(j)].b,
                     r2 = rows[static_cast<size_t>(k)].b;
        Vec3 v;
        v[0] = (r0 * (b[1] * c[2] - b[2] * c[1]) - a[1] * (r1 * c[2] - b[2] * r2) +
                a[2] * (r1 * c[1] - b[1] * r2)) /
               det;
        v[1] = (a[0] * (r1 * c[2] - b[2] * r2) - r0 * (b[0] * c[2] - b[2] * c[0]) +
                a[2] * (b[0] * r2 - r1 * c[0])) /
               det;
        v[2] = (a[0] * (b[1] * r2 - r1 * c[1]) - a[1] * (b[0] * r2 - r1 * c[0]) +
                r0 * (b[0] * c[1] - b[1] * c[0])) /
               det;
        if (outer_min_slack(rows, v) < -1e-9) continue;
        bool dup = false;
        for (const auto& w : out)
          if (std::fabs(w[0] - v[0]) < 1e-7 && std::fabs(w[1] - v[1]) < 1e-7 &&
              std::fabs(w[2] - v[2]) < 1e-7) {
            dup = true;
            break;
          }
        if (!dup) out.push_back(v);
      }
  std::sort(out.begin(), out.end());
  return out;
}

// ============================================================
// Functional-representation channels
// ============================================================

namespace {

struct FrlBuild {
  std::vector<double> q;  // indexed ((input*no + output) * u + k)
  int u_size = 0;
};

// Cuts [0,1) at the union of the conditional-CDF breakpoints of all input
// rows. Every cut value is a partial sum reused bit-for-bit, so each interval
// maps to exactly one output per input and the row masses telescope exactly.
FrlBuild frl_from_conditionals(const std::vector<std::vector<double>>& cond) {
  const int ni = static_cast<int>(cond.size());
  const int no = static_cast<int>(cond[0].size());
  std::vector<std::vector<double>> s(static_cast<size_t>(ni),
                                     std::vector<double>(static_cast<size_t>(no) + 1, 0.0));
  std::vector<double> cuts = {0.0, 1.0};
  for (int i = 0; i < ni; ++i) {
    for (int k = 1; k <= no; ++k) {
      s[static_cast<size_t>(i)][static_cast<size_t>(k)] =
          std::min(1.0, s[static_cast<size_t>(i)][static_cast<size_t>(k - 1)] +
                            cond[static_cast<size_t>(i)][static_cast<size_t>(k - 1)]);
      // the final partial sum is 1.0 up to rounding; pushing its float value
      // would add a sliver interval and break the cardinality bound
      if (k < no) cuts.push_back(s[static_cast<size_t>(i)][static_cast<size_t>(k)]);
    }
    s[static_cast<size_t>(i)][static_cast<size_t>(no)] = 1.0;
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const int nu = static_cast<int>(cuts.size()) - 1;
  std::vector<double> len(static_cast<size_t>(nu));
  for (int k = 0; k < nu; ++k)
    len[static_cast<size_t>(k)] = cuts[static_cast<size_t>(k) + 1] - cuts[static_cast<size_t>(k)];

  FrlBuild fb;
  fb.u_size = nu;
  fb.q.assign(static_cast<size_t>(ni) * no * nu, 0.0);
  std::vector<int> j(static_cast<size_t>(no) + 1);
  for (int i = 0; i < ni; ++i) {
    for (int k = 0; k <= no; ++k)
      j[static_cast<size_t>(k)] = static_cast<int>(
          std::lower_bound(cuts.begin(), cuts.end(), s[static_cast<size_t>(i)][static_cast<size_t>(k)]) -
          cuts.begin());
    for (int y = 0; y < no; ++y) {
      double* row = &fb.q[(static_cast<size_t>(i) * no + y) * nu];
      const double m = cuts[static_cast<size_t>(j[static_cast<size_t>(y) + 1])] -
                       cuts[static_cast<size_t>(j[static_cast<size_t>(y)])];
      if (m > 0) {
        for (int k = j[static_cast<size_t>(y)]; k < j[static_cast<size_t>(y) + 1]; ++k)
          row[k] = len[static_cast<size_t>(k)] / m;
      } else {
        // zero-mass output: any normalized row works; use the cut lengths
        for (int k = 0; k < nu; ++k) row[k] = len[static_cast<size_t>(k)];
      }
    }
  }
  return fb;
}

}  // namespace

Channel frl_channel(const JointPmf& p, FrlDirection dir) {
  const int nx = p.nx(), ny = p.ny();
  if (dir == FrlDirection::x_to_y) {
    std::vector<std::vector<double>> cond(static_cast<size_t>(nx));
    for (int x = 0; x < nx; ++x) cond[static_cast<size_t>(x)] = p.cond_y_given_x(x);
    FrlBuild fb = frl_from_conditionals(cond);
    return validate_channel(nx, ny, fb.u_size, std::move(fb.q), fb.u_size > nx * ny + 2);
  }
  const std::vector<double> py = p.marginal_y();
  std::vector<std::vector<double>> cond(static_cast<size_t>(ny),
                                        std::vector<double>(static_cast<size_t>(nx)));
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x)
      cond[static_cast<size_t>(y)][static_cast<size_t>(x)] =
          py[static_cast<size_t>(y)] > 0 ? p.at(x, y) / py[static_cast<size_t>(y)] : 1.0 / nx;
  FrlBuild fb = frl_from_conditionals(cond);  // indexed ((y*nx + x) * u + k)
  std::vector<double> q(static_cast<size_t>(nx) * ny * fb.u_size);
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y)
      for (int k = 0; k < fb.u_size; ++k)
        q[(static_cast<size_t>(x) * ny + y) * fb.u_size + k] =
            fb.q[(static_cast<size_t>(y) * nx + x) * fb.u_size + k];
  return validate_channel(nx, ny, fb.u_size, std::move(q), fb.u_size > nx * ny + 2);
}

// ============================================================
// Achievable points
// ============================================================

namespace {

// Conditional-entropy point: compose V with V _|_ X, H(Y|X,V)=0 and then
// W _|_ (Y,V), H(X|Y,V,W)=0; the pair U=(V,W) lands on the ray where
// v_xy - v_x = H(Y|X) and v_xy - v_y = H(X|Y) hold with equality, and time
// sharing with U=(X,Y) reaches (H(X|Y), H(Y|X), H(X|Y)+H(Y|X)).
InnerPoint frl_mix_point(const JointPmf& p) {
  const int nx = p.nx(), ny = p.ny();
  const int cells = nx * ny;
  const Channel cv = frl_channel(p, FrlDirection::x_to_y);
  const int nv = cv.u_size;

  std::vector<std::vector<double>> cond(static_cast<size_t>(ny) * nv,
                                        std::vector<double>(static_cast<size_t>(nx)));
  for (int y = 0; y < ny; ++y)
    for (int v = 0; v < nv; ++v) {
      auto& row = cond[static_cast<size_t>(y) * nv + v];
      double tot = 0.0;
      for (int x = 0; x < nx; ++x) {
        row[static_cast<size_t>(x)] = p.at(x, y) * cv.at(x, y, v);
        tot += row[static_cast<size_t>(x)];
      }
      if (tot > 0)
        for (int x = 0; x < nx; ++x) row[static_cast<size_t>(x)] /= tot;
      else
        for (int x = 0; x < nx; ++x) row[static_cast<size_t>(x)] = 1.0 / nx;
    }
  const FrlBuild fw = frl_from_conditionals(cond);  // (((y*nv+v)*nx + x) * nw + w)
  const int nw = fw.u_size;

  // Compose U=(V,W), allocating labels only for pairs that actually occur.
  std::map<std::pair<int, int>, int> id;
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y)
      for (int v = 0; v < nv; ++v) {
        if (cv.at(x, y, v) <= 0) continue;
        const double* wrow = &fw.q[((static_cast<size_t>(y) * nv + v) * nx + x) * nw];
        for (int w = 0; w < nw; ++w)
          if (wrow[w] > 0) id.emplace(std::make_pair(v, w), static_cast<int>(id.size()));
      }
  const int numu = std::max<int>(1, static_cast<int>(id.size()));
  if (static_cast<double>(numu) * cells > 4e6)
    fail(errc::alphabet_too_large, "composed representation channel is too large");
  std::vector<double> q(static_cast<size_t>(cells) * numu, 0.0);
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y) {
      double* out = &q[static_cast<size_t>(x * ny + y) * numu];
      for (int v = 0; v < nv; ++v) {
        const double a = cv.at(x, y, v);
        if (a <= 0) continue;
        const double* wrow = &fw.q[((static_cast<size_t>(y) * nv + v) * nx + x) * nw];
        for (int w = 0; w < nw; ++w)
          if (wrow[w] > 0) out[id[{v, w}]] += a * wrow[w];
      }
      double tot = 0.0;
      for (int k = 0; k < numu; ++k) tot += out[k];
      if (tot <= 0) out[0] = 1.0;
    }
  Channel comp = validate_channel(nx, ny, numu, std::move(q), true);
  comp = prune_channel(p, comp);

  std::vector<int> m(static_cast<size_t>(cells));
  std::iota(m.begin(), m.end(), 0);
  const Channel ident = deterministic_channel(nx, ny, m, cells);

  const double t = mi_point_of(p, comp).vxy;
  const double denom = p.hxy() - t;
  const double ixy = p.mutual_information();
  const double mu =
      denom > 1e-12 ? std::clamp(ixy / denom, 0.0, 1.0) : (ixy > 1e-12 ? 1.0 : 0.0);
  Channel mixed = prune_channel(p, mixture_channel(ident, comp, mu));
  return {mi_point_of(p, mixed), std::move(mixed), "frl-mix"};
}

}  // namespace

std::vector<InnerPoint> inner_bound_points(const JointPmf& p) {
  const int nx = p.nx(), ny = p.ny();
  const int cells = nx * ny;
  std::vector<InnerPoint> out;
  auto add = [&](Channel c, const char* tag) {
    out.push_back({mi_point_of(p, c), std::move(c), tag});
  };
  add(constant_channel(nx, ny), "empty");
  std::vector<int> m(static_cast<size_t>(cells));
  for (int c = 0; c < cells; ++c) m[static_cast<size_t>(c)] = c / ny;
  add(deterministic_channel(nx, ny, m, nx), "u=x");
  for (int c = 0; c < cells; ++c) m[static_cast<size_t>(c)] = c % ny;
  add(deterministic_channel(nx, ny, m, ny), "u=y");
  std::iota(m.begin(), m.end(), 0);
  add(deterministic_channel(nx, ny, m, cells), "u=(x,y)");
  out.push_back(frl_mix_point(p));
  return out;
}

// ============================================================
// Direction sets
// ============================================================

const char* const k_direction_set_version = "icosa2+forms-v1";

namespace {

Vec3 normalized(const Vec3& v) {
  const double n = std::sqrt(dot(v, v));
  return {v[0] / n, v[1] / n, v[2] / n};
}

}  // namespace

std::vector<Vec3> default_directions() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts;
  for (double s1 : {-1.0, 1.0})
    for (double s2 : {-1.0, 1.0}) {
      verts.push_back(normalized({0.0, s1, s2 * phi}));
      verts.push_back(normalized({s1, s2 * phi, 0.0}));
      verts.push_back(normalized({s2 * phi, 0.0, s1}));
    }
  // faces = vertex triples at minimal pairwise distance
  double edge = 1e300;
  auto dist = [&](int i, int j) {
    const Vec3 d = {verts[static_cast<size_t>(i)][0] - verts[static_cast<size_t>(j)][0],
                    verts[static_cast<size_t>(i)][1] - verts[static_cast<size_t>(j)][1],
                    verts[static_cast<size_t>(i)][2] - verts[static_cast<size_t>(j)][2]};
    return std::sqrt(dot(d, d));
  };
  for (int i = 0; i < 12; ++i)
    for (int j = i + 1; j < 12; ++j) edge = std::min(edge, dist(i, j));
  std::vector<std::array<int, 3>> faces;
  for (int i = 0; i < 12; ++i)
    for (int j = i + 1; j < 12; ++j)
      for (int k = j + 1; k < 12; ++k)
        if (dist(i, j) < edge + 1e-9 && dist(i, k) < edge + 1e-9 && dist(j, k) < edge + 1e-9)
          faces.push_back({i, j, k});

  for (int level = 0; level < 2; ++level) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find({key.first, key.second});
      if (it != mid.end()) return it->second;
      const Vec3 m2 = normalized({verts[static_cast<size_t>(a)][0] + verts[static_cast<size_t>(b)][0],
                                  verts[static_cast<size_t>(a)][1] + verts[static_cast<size_t>(b)][1],
                                  verts[static_cast<size_t>(a)][2] + verts[static_cast<size_t>(b)][2]});
      const int idx = static_cast<int>(verts.size());
      verts.push_back(m2);
      mid.emplace(std::make_pair(key.first, key.second), idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int ab = midpoint(f[0], f[1]);
      const int bc = midpoint(f[1], f[2]);
      const int ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  const std::vector<Vec3> forms = {
      {1, 1, -1}, {1, 1, -2},  {1, -1, 0},  {1, 2, -2},  {-2, 0, 1},
      {-1, 1, -1}, {-1, -1, 1}, {-1, 0, 0}, {-1, -1, 0}, {0, 0, 1},
  };
  for (const auto& f : forms) verts.push_back(normalized(f));

  std::vector<Vec3> out;
  std::set<std::array<long long, 3>> seen;
  for (const auto& v : verts) {
    const std::array<long long, 3> key = {llround(v[0] * 1e9), llround(v[1] * 1e9),
                                          llround(v[2] * 1e9)};
    if (seen.insert(key).second) out.push_back(v);
  }
  return out;
}

// ============================================================
// Sampled region approximation
// ============================================================

RegionApprox sample_region(const JointPmf& p, const std::vector<Vec3>& directions,
                           const OptimizerConfig& cfg) {
  RegionApprox R;
  R.p = p;
  R.cfg = cfg;
  R.direction_version = k_direction_set_version;

  std::vector<InnerPoint> pool = inner_bound_points(p);
  const int cells = p.nx() * p.ny();
  if (cells <= 9) {
    for (auto& [c, v] : enumerate_deterministic(p, cells, 1e9))
      pool.push_back({v, std::move(c), "det"});
  } else if (cells <= 16) {
    for (auto& [c, v] : enumerate_deterministic(p, 2, 1e7))
      pool.push_back({v, std::move(c), "det2"});
  }

  // Support solves, warm-started with recent witnesses.
  std::vector<Channel> base_seeds = cfg.extra_seeds;
  for (size_t i = 0; i < 5 && i < pool.size(); ++i) base_seeds.push_back(pool[i].witness);
  std::vector<Channel> recent;
  std::vector<double> raw(directions.size(), 0.0);
  for (size_t d0 = 0; d0 < directions.size(); d0 += 8) {
    std::vector<Channel> batch;
    for (size_t d = d0; d < std::min(d0 + 8, directions.size()); ++d) {
      OptimizerConfig c2 = cfg;
      c2.extra_seeds = base_seeds;
      c2.extra_seeds.insert(c2.extra_seeds.end(), recent.begin(), recent.end());
      SolveResult res = support_function(p, directions[d], c2);
      raw[d] = res.value;
      pool.push_back({res.v, res.witness, "support"});
      batch.push_back(std::move(res.witness));
    }
    for (auto& w : batch) recent.push_back(std::move(w));
    if (recent.size() > 8) recent.erase(recent.begin(), recent.end() - 8);
  }

  // Pool the support estimate with the achieved points so that every inner
  // point satisfies every stored half-space.
  for (size_t d = 0; d < directions.size(); ++d) {
    double h = raw[d];
    for (const auto& ip : pool) h = std::max(h, dot(directions[d], to_vec(ip.v)));
    R.outer.push_back({directions[d], h});
  }

  // Prune to hull vertices, always keeping the five named points.
  std::vector<Vec3> pts;
  pts.reserve(pool.size());
  for (const auto& ip : pool) pts.push_back(to_vec(ip.v));
  Hull3 h0 = convex_hull(pts);
  std::set<int> keep;
  for (int vi : h0.vertices) keep.insert(h0.original_index[static_cast<size_t>(vi)]);
  for (int i = 0; i < 5 && i < static_cast<int>(pool.size()); ++i) keep.insert(i);
  for (int idx : keep) R.inner.push_back(std::move(pool[static_cast<size_t>(idx)]));
  pts.clear();
  for (const auto& ip : R.inner) pts.push_back(to_vec(ip.v));
  R.hull = convex_hull(pts);
  R.degenerate = R.hull.dim < 3;

  // Sandwich gap: support of (outer polytope ∩ nearby half-spaces) minus the
  // support of the achieved hull, per direction.
  const auto orows = outer_rows(p);
  R.sandwich_gap.assign(directions.size(), 0.0);
  for (size_t d = 0; d < directions.size(); ++d) {
    const Vec3& b = directions[d];
    std::vector<std::pair<double, size_t>> near;
    for (size_t j = 0; j < R.outer.size(); ++j) {
      const double c = dot(b, R.outer[j].b);
      if (c > 0.5) near.push_back({-c, j});
    }
    std::sort(near.begin(), near.end());
    if (near.size() > 24) near.resize(24);

    std::vector<LpRow> rows;
    auto push_le = [&](const Vec3& a, double rhs) {
      LpRow r;
      r.a = {a[0], a[1], a[2], -a[0], -a[1], -a[2]};
      r.rel = -1;
      r.b = rhs;
      rows.push_back(std::move(r));
    };
    for (const auto& orow : orows) push_le(orow.a, orow.b);
    for (const auto& [negc, j] : near) push_le(R.outer[j].b, R.outer[j].psi_hat);
    const LpResult res =
        solve_lp(6, {b[0], b[1], b[2], -b[0], -b[1], -b[2]}, rows);
    double hin = -1e300;
    for (const auto& ip : R.inner) hin = std::max(hin, dot(b, to_vec(ip.v)));
    if (res.status == LpStatus::optimal)
      R.sandwich_gap[d] = std::max(0.0, res.value - hin);
  }
  return R;
}

// ============================================================
// Membership
// ============================================================

MembershipVerdict membership(const JointPmf& p, const MiPoint& v,
                             const RegionApprox& approx) {
  MembershipVerdict out;
  const Vec3 q = to_vec(v);
  const auto orows = outer_rows(p);

  double worst = 0.0;
  const char* worst_name = nullptr;
  for (const auto& r : orows) {
    const double viol = dot(r.a, q) - r.b;
    if (viol > worst) {
      worst = viol;
      worst_name = r.name;
    }
  }
  if (worst > 1e-7) {
    out.verdict = Verdict::outside;
    out.violated = worst_name;
    out.violation = worst;
    return out;
  }

  double hviol = -1e300;
  size_t hidx = 0;
  for (size_t j = 0; j < approx.outer.size(); ++j) {
    const double viol = dot(approx.outer[j].b, q) - approx.outer[j].psi_hat;
    if (viol > hviol) {
      hviol = viol;
      hidx = j;
    }
  }
  if (!approx.outer.empty() && hviol > 1e-7) {
    out.verdict = Verdict::outside;
    out.violated = "sampled half-space b=" + fmt_vec(approx.outer[hidx].b);
    out.violation = hviol;
    return out;
  }

  const Hull3::Combination comb = approx.hull.combination(q);
  if (comb.residual <= 1e-7) {
    out.verdict = Verdict::inside;
    std::vector<std::pair<const Channel*, double>> parts;
    for (const auto& [hi, w] : comb.weights) {
      if (w <= 1e-12) continue;
      const int inner_idx = approx.hull.original_index[static_cast<size_t>(hi)];
      out.combination.push_back({inner_idx, w});
      parts.push_back({&approx.inner[static_cast<size_t>(inner_idx)].witness, w});
    }
    double tot = 0.0;
    for (auto& [i, w] : out.combination) tot += w;
    if (tot > 0)
      for (auto& [i, w] : out.combination) w /= tot;
    if (!parts.empty()) out.witness = prune_channel(p, fold_mixture(parts));
    return out;
  }

  out.verdict = Verdict::unknown;
  out.inner_gap = comb.residual;
  double og = outer_min_slack(orows, q);
  for (const auto& hs : approx.outer) og = std::min(og, hs.psi_hat - dot(hs.b, q));
  out.outer_gap = og;
  return out;
}

MembershipVerdict membership(const JointPmf& p, const MiPoint& v,
                             const OptimizerConfig& cfg) {
  return membership(p, v, sample_region(p, default_directions(), cfg));
}

// ============================================================
// Rate regions
// ============================================================

namespace {

struct RateRow {
  Vec3 a;
  double c;
  std::string name;
};  // constraint: a.v + c <= 0

// Shared decision engine: static certificates, then an achievable-hull LP,
// then an outer-polytope LP (rigorous exclusion), then a penalized solve.
RateVerdict rate_system_solve(const JointPmf& p, const RegionApprox& approx,
                              const OptimizerConfig& cfg,
                              const std::vector<std::pair<double, std::string>>& statics,
                              const std::vector<RateRow>& rows) {
  RateVerdict out;
  const double tol = 1e-7;

  double worst = 0.0;
  std::string worst_name;
  for (const auto& [slack, nm] : statics)
    if (slack < worst) {
      worst = slack;
      worst_name = nm;
    }
  if (worst < -tol) {
    out.verdict = Verdict::outside;
    out.violated = worst_name;
    out.violation = -worst;
    return out;
  }

  auto max_violation = [&](const Vec3& v) {
    double m = -1e300;
    for (const auto& r : rows) m = std::max(m, dot(r.a, v) + r.c);
    return m;
  };

  const int n = static_cast<int>(approx.inner.size());
  double best_gap = 1e300;
  std::optional<Channel> hull_witness;

  // Single-point screen: an inner point satisfying every row certifies the
  // tuple without the LP (degenerate hulls can stall the simplex).
  for (const auto& ip : approx.inner) {
    const double mv = max_violation(to_vec(ip.v));
    if (mv <= 1e-9) {
      out.verdict = Verdict::inside;
      out.witness = ip.witness;
      out.witness_point = ip.v;
      out.witness_violation = std::max(0.0, mv);
      return out;
    }
  }

  // Achievable-hull stage: maximize the uniform slack delta.
  {
    std::vector<LpRow> lrows;
    LpRow sum;
    sum.a.assign(static_cast<size_t>(n) + 2, 0.0);
    for (int i = 0; i < n; ++i) sum.a[static_cast<size_t>(i)] = 1.0;
    sum.rel = 0;
    sum.b = 1.0;
    lrows.push_back(std::move(sum));
    for (const auto& r : rows) {
      LpRow lr;
      lr.a.assign(static_cast<size_t>(n) + 2, 0.0);
      for (int i = 0; i < n; ++i)
        lr.a[static_cast<size_t>(i)] = dot(r.a, to_vec(approx.inner[static_cast<size_t>(i)].v));
      lr.a[static_cast<size_t>(n)] = 1.0;       // delta+
      lr.a[static_cast<size_t>(n) + 1] = -1.0;  // delta-
      lr.rel = -1;
      lr.b = -r.c;
      lrows.push_back(std::move(lr));
    }
    std::vector<double> obj(static_cast<size_t>(n) + 2, 0.0);
    obj[static_cast<size_t>(n)] = 1.0;
    obj[static_cast<size_t>(n) + 1] = -1.0;
    const LpResult res = solve_lp(n + 2, obj, lrows);
    if (res.status == LpStatus::optimal) {
      Vec3 vbar = {0, 0, 0};
      std::vector<std::pair<int, double>> wts;
      for (int i = 0; i < n; ++i)
        if (res.x[static_cast<size_t>(i)] > 1e-12)
          wts.push_back({i, res.x[static_cast<size_t>(i)]});
      double wtot = 0.0;
      for (auto& [i, w] : wts) wtot += w;
      if (wtot > 0) {
        for (auto& [i, w] : wts) w /= wtot;
        for (const auto& [i, w] : wts) {
          const Vec3 vi = to_vec(approx.inner[static_cast<size_t>(i)].v);
          vbar[0] += w * vi[0];
          vbar[1] += w * vi[1];
          vbar[2] += w * vi[2];
        }
        std::vector<std::pair<const Channel*, double>> fold;
        for (const auto& [i, w] : wts)
          fold.push_back({&approx.inner[static_cast<size_t>(i)].witness, w});
        Channel wit = prune_channel(p, fold_mixture(fold));
        const double mv = max_violation(vbar);
        if (res.value >= -1e-9) {
          out.verdict = Verdict::inside;
          out.witness = std::move(wit);
          out.witness_point = {vbar[0], vbar[1], vbar[2]};
          out.witness_violation = std::max(0.0, mv);
          return out;
        }
        best_gap = std::max(mv, 0.0);
        hull_witness = std::move(wit);
        out.witness_point = {vbar[0], vbar[1], vbar[2]};
      }
    }
  }

  // Outer-polytope stage: if the system is infeasible even over the outer
  // bound, the tuple is certainly excluded.
  {
    const auto orows = outer_rows(p);
    std::vector<LpRow> lrows;
    auto push = [&](const Vec3& a, double tcoef, double rhs) {
      LpRow r;
      r.a = {a[0], a[1], a[2], -a[0], -a[1], -a[2], tcoef, -tcoef};
      r.rel = -1;
      r.b = rhs;
      lrows.push_back(std::move(r));
    };
    for (const auto& orow : orows) push(orow.a, 0.0, orow.b);
    for (const auto& r : rows) push(r.a, -1.0, -r.c);
    const LpResult res = solve_lp(8, {0, 0, 0, 0, 0, 0, -1, 1}, lrows);
    if (res.status == LpStatus::optimal) {
      const double tstar = -res.value;
      if (tstar > tol) {
        const Vec3 vstar = {res.x[0] - res.x[3], res.x[1] - res.x[4], res.x[2] - res.x[5]};
        double bv = -1e300;
        std::string bn;
        for (const auto& r : rows) {
          const double g = dot(r.a, vstar) + r.c;
          if (g > bv) {
            bv = g;
            bn = r.name;
          }
        }
        out.verdict = Verdict::outside;
        out.violated = bn;
        out.violation = tstar;
        return out;
      }
    }
  }

  // Penalized solve over channels, seeded with the hull's best mixture.
  {
    std::vector<RateRow> rcopy = rows;
    GeneralObjective gob;
    gob.value = [rcopy](const MiPoint& v) {
      double s = 0.0;
      const Vec3 q = {v.vx, v.vy, v.vxy};
      for (const auto& r : rcopy) {
        const double g = dot(r.a, q) + r.c;
        if (g > 0) s += g * g;
      }
      return -s;
    };
    gob.grad = [rcopy](const MiPoint& v) {
      std::array<double, 3> g = {0, 0, 0};
      const Vec3 q = {v.vx, v.vy, v.vxy};
      for (const auto& r : rcopy) {
        const double gg = dot(r.a, q) + r.c;
        if (gg > 0)
          for (int k = 0; k < 3; ++k) g[static_cast<size_t>(k)] -= 2.0 * gg * r.a[static_cast<size_t>(k)];
      }
      return g;
    };
    OptimizerConfig c2 = cfg;
    if (hull_witness) c2.extra_seeds.push_back(*hull_witness);
    const SolveResult res = solve_general(p, gob, ConstraintSpec{}, c2);
    const double mv = std::max(0.0, max_violation(to_vec(res.v)));
    if (mv <= tol) {
      out.verdict = Verdict::inside;
      out.witness = res.witness;
      out.witness_point = res.v;
      out.witness_violation = mv;
      return out;
    }
    if (mv < best_gap) {
      best_gap = mv;
      out.witness_point = res.v;
      out.witness = res.witness;
    } else if (hull_witness) {
      out.witness = std::move(hull_witness);
    }
  }

  out.verdict = Verdict::unknown;
  out.gap = best_gap;
  return out;
}

std::vector<std::pair<double, std::string>> causal_statics(const JointPmf& p,
                                                           const RateTuple& r) {
  std::vector<std::pair<double, std::string>> s;
  for (int k = 0; k < 5; ++k)
    s.push_back({r[k], "r" + std::to_string(k) + " >= 0"});
  s.push_back({r[0] + r[1] + r[4] - p.hxy(), "r0 + r1 + r4 >= H(X,Y)"});
  s.push_back({r[0] + r[2] + r[3] - p.hxy(), "r0 + r2 + r3 >= H(X,Y)"});
  return s;
}

std::vector<RateRow> causal_rows(const JointPmf& p, const RateTuple& r) {
  return {
      {{0, 0, 1}, -r[0], "r0 >= v_xy"},
      {{-1, 0, 0}, p.hx() - r[1], "r1 >= H(X) - v_x"},
      {{0, -1, 0}, p.hy() - r[2], "r2 >= H(Y) - v_y"},
      {{0, 1, -1}, p.hx_given_y() - r[3], "r3 >= H(X|Y) - v_xy + v_y"},
      {{1, 0, -1}, p.hy_given_x() - r[4], "r4 >= H(Y|X) - v_xy + v_x"},
  };
}

std::vector<std::pair<double, std::string>> noncausal_statics(const JointPmf& p,
                                                              const RateTuple& r) {
  std::vector<std::pair<double, std::string>> s;
  for (int k = 0; k < 5; ++k)
    s.push_back({r[k], "r" + std::to_string(k) + " >= 0"});
  s.push_back({r[0] + r[3] - p.hx_given_y(), "r0 + r3 >= H(X|Y)"});
  s.push_back({r[0] + r[4] - p.hy_given_x(), "r0 + r4 >= H(Y|X)"});
  s.push_back({r[0] + r[2] + r[3] - p.hxy(), "r0 + r2 + r3 >= H(X,Y)"});
  s.push_back({r[0] + r[1] + r[4] - p.hxy(), "r0 + r1 + r4 >= H(X,Y)"});
  return s;
}

std::vector<RateRow> noncausal_rows(const JointPmf& p, const RateTuple& r) {
  return {
      {{0, 0, 1}, -r[0], "r0 >= v_xy"},
      {{-1, 0, 0}, p.hx() - r[1], "r1 >= H(X) - v_x"},
      {{0, -1, 0}, p.hy() - r[2], "r2 >= H(Y) - v_y"},
      {{-1, 0, 0}, p.hx() - p.hy() - r[3], "r3 >= H(X) - v_x - H(Y)"},
      {{0, -1, 0}, p.hy() - p.hx() - r[4], "r4 >= H(Y) - v_y - H(X)"},
      {{-1, 0, 0}, p.hx() - r[2] - r[3], "r2 + r3 >= H(X) - v_x"},
      {{0, -1, 0}, p.hy() - r[1] - r[4], "r1 + r4 >= H(Y) - v_y"},
  };
}

}  // namespace

RateVerdict rate_membership(const JointPmf& p, const RateTuple& r,
                            const RegionApprox& approx, const OptimizerConfig& cfg) {
  return rate_system_solve(p, approx, cfg, causal_statics(p, r), causal_rows(p, r));
}

RateVerdict rate_membership(const JointPmf& p, const RateTuple& r,
                            const OptimizerConfig& cfg) {
  return rate_membership(p, r, sample_region(p, default_directions(), cfg), cfg);
}

RateVerdict noncausal_rate_membership(const JointPmf& p, const RateTuple& r,
                                      const RegionApprox& approx,
                                      const OptimizerConfig& cfg) {
  return rate_system_solve(p, approx, cfg, noncausal_statics(p, r), noncausal_rows(p, r));
}

RateVerdict noncausal_rate_membership(const JointPmf& p, const RateTuple& r,
                                      const OptimizerConfig& cfg) {
  return noncausal_rate_membership(p, r, sample_region(p, default_directions(), cfg), cfg);
}

// ============================================================
// Projections
// ============================================================

ProjectedRegion gray_wyner_projection(const RegionApprox& approx, const JointPmf& p) {
  ProjectedRegion g;
  g.name = "gray-wyner";
  const double hx = p.hx(), hy = p.hy();
  for (const auto& ip : approx.inner) {
    g.points.push_back({ip.v.vxy, hx - ip.v.vx, hy - ip.v.vy});
    g.tags.push_back(ip.tag);
  }
  return g;
}

ProjectedRegion tension_projection(const RegionApprox& approx, const JointPmf& p) {
  ProjectedRegion g;
  g.name = "tension";
  const double ixy = p.mutual_information();
  for (const auto& ip : approx.inner) {
    g.points.push_back({ip.v.vxy - ip.v.vx, ip.v.vxy - ip.v.vy,
                        ixy - ip.v.vx - ip.v.vy + ip.v.vxy});
    g.tags.push_back(ip.tag);
  }
  return g;
}

bool projected_contains(const ProjectedRegion& reg, const Vec3& q, double tol) {
  const int n = static_cast<int>(reg.points.size());
  if (n == 0) return false;
  // Single-point screen (the region is increasing: q need only dominate some
  // hull point); robust when the LP stalls on a degenerate vertex.
  for (const auto& pt : reg.points) {
    double t = 0.0;
    for (int k = 0; k < 3; ++k)
      t = std::max(t, pt[static_cast<size_t>(k)] - q[static_cast<size_t>(k)]);
    if (t <= tol) return true;
  }
  std::vector<LpRow> rows;
  LpRow sum;
  sum.a.assign(static_cast<size_t>(n) + 2, 0.0);
  for (int i = 0; i < n; ++i) sum.a[static_cast<size_t>(i)] = 1.0;
  sum.rel = 0;
  sum.b = 1.0;
  rows.push_back(std::move(sum));
  for (int k = 0; k < 3; ++k) {
    LpRow r;
    r.a.assign(static_cast<size_t>(n) + 2, 0.0);
    for (int i = 0; i < n; ++i)
      r.a[static_cast<size_t>(i)] = reg.points[static_cast<size_t>(i)][static_cast<size_t>(k)];
    r.a[static_cast<size_t>(n)] = -1.0;
    r.a[static_cast<size_t>(n) + 1] = 1.0;
    r.rel = -1;
    r.b = q[static_cast<size_t>(k)];
    rows.push_back(std::move(r));
  }
  std::vector<double> obj(static_cast<size_t>(n) + 2, 0.0);
  obj[static_cast<size_t>(n)] = -1.0;
  obj[static_cast<size_t>(n) + 1] = 1.0;
  const LpResult res = solve_lp(n + 2, obj, rows);
  return res.status == LpStatus::optimal && -res.value <= tol;
}

// ============================================================
// Multi-letter closure
// ============================================================

ClInftyRegion cl_infty_region(const RegionApprox& approx, const JointPmf& p) {
  ClInftyRegion reg;
  reg.p = p;
  for (const auto& ip : approx.inner) {
    reg.generators.push_back(to_vec(ip.v));
    reg.generator_tags.push_back(ip.tag);
  }
  reg.corners = io_corners(p);
  for (const auto& c : reg.corners) {
    reg.corner_in_form1.push_back(cl_member(reg, c, ClRoute::form1, 1e-7));
    reg.corner_in_form2.push_back(cl_member(reg, c, ClRoute::form2, 1e-7));
  }
  return reg;
}

namespace {

// LP: min over the generator hull of the worst violation of a linear system
// rows a.g + c <= 0 evaluated at the combination g = sum lambda_i g_i.
// Single generators are screened in closed form first: a vertex the simplex
// cannot pin down exactly (degenerate hulls stall it near the optimum) is
// still certified when one generator alone satisfies the system.
double hull_system_min_max_violation(const std::vector<Vec3>& gens,
                                     const std::vector<std::pair<Vec3, double>>& sys) {
  double best_single = 1e300;
  for (const auto& gi : gens) {
    double worst = -1e300;
    for (const auto& [a, c] : sys) worst = std::max(worst, dot(a, gi) + c);
    best_single = std::min(best_single, worst);
  }
  const int n = static_cast<int>(gens.size());
  std::vector<LpRow> rows;
  LpRow sum;
  sum.a.assign(static_cast<size_t>(n) + 2, 0.0);
  for (int i = 0; i < n; ++i) sum.a[static_cast<size_t>(i)] = 1.0;
  sum.rel = 0;
  sum.b = 1.0;
  rows.push_back(std::move(sum));
  for (const auto& [a, c] : sys) {
    LpRow r;
    r.a.assign(static_cast<size_t>(n) + 2, 0.0);
    for (int i = 0; i < n; ++i) r.a[static_cast<size_t>(i)] = dot(a, gens[static_cast<size_t>(i)]);
    r.a[static_cast<size_t>(n)] = -1.0;
    r.a[static_cast<size_t>(n) + 1] = 1.0;
    r.rel = -1;
    r.b = -c;
    rows.push_back(std::move(r));
  }
  std::vector<double> obj(static_cast<size_t>(n) + 2, 0.0);
  obj[static_cast<size_t>(n)] = -1.0;
  obj[static_cast<size_t>(n) + 1] = 1.0;
  const LpResult res = solve_lp(n + 2, obj, rows);
  if (res.status != LpStatus::optimal) return best_single;
  return std::min(best_single, -res.value);
}

}  // namespace

bool cl_member(const ClInftyRegion& reg, const Vec3& q, ClRoute route, double tol) {
  const JointPmf& p = reg.p;
  const auto orows = outer_rows(p);
  const auto& g = reg.generators;
  switch (route) {
    case ClRoute::form1: {
      if (outer_min_slack(orows, q) < -tol) return false;
      // exists a in hull with a_x >= q_x, a_y >= q_y, a_xy <= q_xy
      const double t = hull_system_min_max_violation(
          g, {{{-1, 0, 0}, q[0]}, {{0, -1, 0}, q[1]}, {{0, 0, 1}, -q[2]}});
      return t <= tol;
    }
    case ClRoute::form2: {
      if (q[0] < -tol || q[1] < -tol) return false;
      // exists a in hull, s >= 0 with a - s*(1,1,1) = q
      // Closed-form screen: per generator the best shift is the midpoint of
      // the coordinate differences, clamped at zero.
      for (const auto& gi : g) {
        double lo = 1e300, hi = -1e300;
        for (int k = 0; k < 3; ++k) {
          lo = std::min(lo, gi[static_cast<size_t>(k)] - q[static_cast<size_t>(k)]);
          hi = std::max(hi, gi[static_cast<size_t>(k)] - q[static_cast<size_t>(k)]);
        }
        const double s = std::max(0.0, 0.5 * (lo + hi));
        double t = 0.0;
        for (int k = 0; k < 3; ++k)
          t = std::max(t, std::fabs(gi[static_cast<size_t>(k)] - s -
                                    q[static_cast<size_t>(k)]));
        if (t <= std::max(tol, 1e-9)) return true;
      }
      const int n = static_cast<int>(g.size());
      std::vector<LpRow> rows;
      LpRow sum;
      sum.a.assign(static_cast<size_t>(n) + 3, 0.0);
      for (int i = 0; i < n; ++i) sum.a[static_cast<size_t>(i)] = 1.0;
      sum.rel = 0;
      sum.b = 1.0;
      rows.push_back(std::move(sum));
      for (int k = 0; k < 3; ++k) {
        for (double sign : {1.0, -1.0}) {
          LpRow r;
          r.a.assign(static_cast<size_t>(n) + 3, 0.0);
          for (int i = 0; i < n; ++i)
            r.a[static_cast<size_t>(i)] = sign * g[static_cast<size_t>(i)][static_cast<size_t>(k)];
          r.a[static_cast<size_t>(n)] = -sign;      // s
          r.a[static_cast<size_t>(n) + 1] = -1.0;   // t
          r.a[static_cast<size_t>(n) + 2] = 0.0;
          r.rel = -1;
          r.b = sign * q[static_cast<size_t>(k)];
          rows.push_back(std::move(r));
        }
      }
      std::vector<double> obj(static_cast<size_t>(n) + 3, 0.0);
      obj[static_cast<size_t>(n) + 1] = -1.0;
      const LpResult res = solve_lp(n + 3, obj, rows);
      return res.status == LpStatus::optimal && -res.value <= std::max(tol, 1e-9);
    }
    case ClRoute::noncausal_rates: {
      const double hx = p.hx(), hy = p.hy(), hxy = p.hxy();
      const double hxgy = p.hx_given_y(), hygx = p.hy_given_x();
      const std::array<double, 5> r = {q[2], hx - q[0], hy - q[1], hxgy - q[2] + q[1],
                                       hygx - q[2] + q[0]};
      for (double rk : r)
        if (rk < -tol) return false;
      if (r[0] + r[3] < hxgy - tol) return false;
      if (r[0] + r[4] < hygx - tol) return false;
      if (r[0] + r[2] + r[3] < hxy - tol) return false;
      if (r[0] + r[1] + r[4] < hxy - tol) return false;
      const double t = hull_system_min_max_violation(
          g, {{{0, 0, 1}, -r[0]},
              {{-1, 0, 0}, hx - r[1]},
              {{0, -1, 0}, hy - r[2]},
              {{-1, 0, 0}, hx - hy - r[3]},
              {{0, -1, 0}, hy - hx - r[4]},
              {{-1, 0, 0}, hx - r[2] - r[3]},
              {{0, -1, 0}, hy - r[1] - r[4]}});
      return t <= tol;
    }
    case ClRoute::gray_wyner: {
      if (outer_min_slack(orows, q) < -tol) return false;
      ProjectedRegion gw;
      gw.name = "gray-wyner";
      const double hx = p.hx(), hy = p.hy();
      for (const auto& gi : g) gw.points.push_back({gi[2], hx - gi[0], hy - gi[1]});
      return projected_contains(gw, {q[2], hx - q[0], hy - q[1]}, tol);
    }
  }
  return false;
}

double cl_form1_margin(const ClInftyRegion& reg, const Vec3& q) {
  const auto orows = outer_rows(reg.p);
  const int n = static_cast<int>(reg.generators.size());
  std::vector<LpRow> rows;
  LpRow sum;
  sum.a.assign(static_cast<size_t>(n) + 2, 0.0);
  for (int i = 0; i < n; ++i) sum.a[static_cast<size_t>(i)] = 1.0;
  sum.rel = 0;
  sum.b = 1.0;
  rows.push_back(std::move(sum));
  const std::array<std::pair<Vec3, double>, 3> sys = {
      std::make_pair(Vec3{-1, 0, 0}, -q[0]),  // -a_x + d <= -q_x
      std::make_pair(Vec3{0, -1, 0}, -q[1]),
      std::make_pair(Vec3{0, 0, 1}, q[2]),  // a_xy + d <= q_xy
  };
  for (const auto& [a, rhs] : sys) {
    LpRow r;
    r.a.assign(static_cast<size_t>(n) + 2, 0.0);
    for (int i = 0; i < n; ++i)
      r.a[static_cast<size_t>(i)] = dot(a, reg.generators[static_cast<size_t>(i)]);
    r.a[static_cast<size_t>(n)] = 1.0;
    r.a[static_cast<size_t>(n) + 1] = -1.0;
    r.rel = -1;
    r.b = rhs;
    rows.push_back(std::move(r));
  }
  std::vector<double> obj(static_cast<size_t>(n) + 2, 0.0);
  obj[static_cast<size_t>(n)] = 1.0;
  obj[static_cast<size_t>(n) + 1] = -1.0;
  const LpResult res = solve_lp(n + 2, obj, rows);
  const double dstar = res.status == LpStatus::optimal ? res.value : -1e300;
  return std::min(dstar, outer_min_slack(orows, q));
}

ClConsistencyReport cl_infty_consistency(const RegionApprox& approx, const JointPmf& p,
                                         int samples, std::uint64_t seed, double band) {
  const ClInftyRegion reg = cl_infty_region(approx, p);
  ClConsistencyReport rep;
  rep.band = band;
  rep.queries = samples;
  Rng rng{seed};

  Vec3 lo = {0, 0, 0}, hi = {0, 0, 0};
  bool first = true;
  auto extend_box = [&](const Vec3& v) {
    if (first) {
      lo = hi = v;
      first = false;
      return;
    }
    for (int k = 0; k < 3; ++k) {
      lo[static_cast<size_t>(k)] = std::min(lo[static_cast<size_t>(k)], v[static_cast<size_t>(k)]);
      hi[static_cast<size_t>(k)] = std::max(hi[static_cast<size_t>(k)], v[static_cast<size_t>(k)]);
    }
  };
  for (const auto& c : reg.corners) extend_box(c);
  for (const auto& gv : reg.generators) extend_box(gv);
  Vec3 pad;
  for (int k = 0; k < 3; ++k)
    pad[static_cast<size_t>(k)] =
        0.15 * (hi[static_cast<size_t>(k)] - lo[static_cast<size_t>(k)]) + 0.02;

  const int ngen = static_cast<int>(reg.generators.size());
  for (int i = 0; i < samples; ++i) {
    Vec3 q;
    const int mode = i % 3;
    if (mode == 0 || ngen == 0) {
      for (int k = 0; k < 3; ++k) {
        const double a = lo[static_cast<size_t>(k)] - pad[static_cast<size_t>(k)];
        const double b = hi[static_cast<size_t>(k)] + pad[static_cast<size_t>(k)];
        q[static_cast<size_t>(k)] = a + (b - a) * rng.uniform();
      }
    } else {
      const int kk = 1 + static_cast<int>(rng.next_u64() % std::min(ngen, 4));
      std::vector<double> w = rng.dirichlet(kk);
      q = {0, 0, 0};
      for (int j = 0; j < kk; ++j) {
        const Vec3& gv = reg.generators[static_cast<size_t>(rng.next_u64() % ngen)];
        for (int k = 0; k < 3; ++k) q[static_cast<size_t>(k)] += w[static_cast<size_t>(j)] * gv[static_cast<size_t>(k)];
      }
      const double amp = mode == 1 ? 0.05 : 0.15;
      for (int k = 0; k < 3; ++k)
        q[static_cast<size_t>(k)] += amp * (2.0 * rng.uniform() - 1.0);
    }

    const double margin = cl_form1_margin(reg, q);
    if (std::fabs(margin) <= band) {
      ++rep.band_excluded;
      continue;
    }
    const std::array<bool, 4> verdicts = {
        cl_member(reg, q, ClRoute::form1, 1e-9), cl_member(reg, q, ClRoute::form2, 1e-9),
        cl_member(reg, q, ClRoute::noncausal_rates, 1e-9),
        cl_member(reg, q, ClRoute::gray_wyner, 1e-9)};
    const bool agree = verdicts[0] == verdicts[1] && verdicts[1] == verdicts[2] &&
                       verdicts[2] == verdicts[3];
    if (agree) {
      ++rep.agreements;
    } else {
      ++rep.disagreements;
      if (rep.disagreement_cases.size() < 16)
        rep.disagreement_cases.push_back({q, verdicts, margin});
    }
  }
  return rep;
}

// ============================================================
// Structural checks
// ============================================================

SuperadditivityReport superadditivity_check(const JointPmf& p1, const JointPmf& p2,
                                            const OptimizerConfig& cfg, int trials) {
  SuperadditivityReport rep;
  rep.trials = trials;
  const JointPmf p12 = product_joint(p1, p2, k_alphabet_cap);
  Rng rng{cfg.seed ^ 0x9e3779b97f4a7c15ULL};
  for (int t = 0; t < trials; ++t) {
    const Channel c1 = trial_channel(p1, rng, t);
    const Channel c2 = trial_channel(p2, rng, t < 4 ? 3 - t : t);
    const MiPoint v1 = mi_point_of(p1, c1);
    const MiPoint v2 = mi_point_of(p2, c2);
    const Channel c12 = product_channel(c1, c2);
    const MiPoint v12 = mi_point_of(p12, c12);
    const double dev =
        std::max({std::fabs(v12.vx - v1.vx - v2.vx), std::fabs(v12.vy - v1.vy - v2.vy),
                  std::fabs(v12.vxy - v1.vxy - v2.vxy)});
    rep.max_deviation = std::max(rep.max_deviation, dev);
    if (dev <= 1e-9)
      ++rep.inside;
    else
      rep.all_inside = false;
  }
  return rep;
}

DataProcessingReport data_processing_check(const ChainSpec& chain,
                                           const OptimizerConfig& cfg, int trials) {
  const JointPmf& p1 = chain.p1;
  const int nx1 = p1.nx(), ny1 = p1.ny();
  const int nx2 = chain.nx2, ny2 = chain.ny2;
  if (nx2 < 1 || ny2 < 1 ||
      chain.px2_given_x1.size() != static_cast<size_t>(nx1) * nx2 ||
      chain.py2_given_y1.size() != static_cast<size_t>(ny1) * ny2)
    fail(errc::dimension_mismatch, "degradation conditionals have wrong shape");
  auto check_rows = [](const std::vector<double>& m, int rows, int cols, const char* what) {
    for (int i = 0; i < rows; ++i) {
      double s = 0.0;
      for (int j = 0; j < cols; ++j) {
        const double v = m[static_cast<size_t>(i) * cols + j];
        if (v < 0) fail(errc::invalid_argument, std::string(what) + " has a negative entry");
        s += v;
      }
      if (std::fabs(s - 1.0) > 1e-6)
        fail(errc::invalid_argument, std::string(what) + " rows must sum to 1");
    }
  };
  check_rows(chain.px2_given_x1, nx1, nx2, "x-degradation");
  check_rows(chain.py2_given_y1, ny1, ny2, "y-degradation");

  std::vector<double> e(static_cast<size_t>(nx2) * ny2, 0.0);
  for (int x1 = 0; x1 < nx1; ++x1)
    for (int y1 = 0; y1 < ny1; ++y1) {
      const double w = p1.at(x1, y1);
      if (w <= 0) continue;
      for (int x2 = 0; x2 < nx2; ++x2) {
        const double a = chain.px2_given_x1[static_cast<size_t>(x1) * nx2 + x2];
        if (a <= 0) continue;
        for (int y2 = 0; y2 < ny2; ++y2)
          e[static_cast<size_t>(x2) * ny2 + y2] +=
              w * a * chain.py2_given_y1[static_cast<size_t>(y1) * ny2 + y2];
      }
    }
  std::vector<std::string> xl(static_cast<size_t>(nx2)), yl(static_cast<size_t>(ny2));
  for (int i = 0; i < nx2; ++i) xl[static_cast<size_t>(i)] = "x" + std::to_string(i);
  for (int j = 0; j < ny2; ++j) yl[static_cast<size_t>(j)] = "y" + std::to_string(j);
  const JointPmf p2 = validate_pmf(xl, yl, e, k_alphabet_cap);
  const double i1 = p1.mutual_information(), i2 = p2.mutual_information();

  DataProcessingReport rep;
  rep.trials = trials;
  rep.min_slack = {1e300, 1e300, 1e300, 1e300};
  Rng rng{cfg.seed ^ 0xa5a5a5a5ULL};
  for (int t = 0; t < trials; ++t) {
    const Channel c = trial_channel(p1, rng, t);
    const int nu = c.u_size;
    const MiPoint v1 = mi_point_of(p1, c);
    std::vector<double> q(static_cast<size_t>(nx2) * ny2 * nu, 0.0);
    for (int x1 = 0; x1 < nx1; ++x1)
      for (int y1 = 0; y1 < ny1; ++y1) {
        const double w = p1.at(x1, y1);
        if (w <= 0) continue;
        for (int x2 = 0; x2 < nx2; ++x2) {
          const double a = chain.px2_given_x1[static_cast<size_t>(x1) * nx2 + x2];
          if (a <= 0) continue;
          for (int y2 = 0; y2 < ny2; ++y2) {
            const double b = chain.py2_given_y1[static_cast<size_t>(y1) * ny2 + y2];
            if (b <= 0) continue;
            const double mass = w * a * b;
            for (int u = 0; u < nu; ++u)
              q[(static_cast<size_t>(x2) * ny2 + y2) * nu + u] += mass * c.at(x1, y1, u);
          }
        }
      }
    for (int x2 = 0; x2 < nx2; ++x2)
      for (int y2 = 0; y2 < ny2; ++y2) {
        double* row = &q[(static_cast<size_t>(x2) * ny2 + y2) * nu];
        const double den = p2.at(x2, y2);
        if (den > 0) {
          for (int u = 0; u < nu; ++u) row[u] /= den;
        } else {
          for (int u = 0; u < nu; ++u) row[u] = 1.0 / nu;
        }
      }
    const Channel c2 = validate_channel(nx2, ny2, nu, std::move(q), nu > nx2 * ny2 + 2);
    const MiPoint v2 = mi_point_of(p2, c2);
    const std::array<double, 4> slack = {
        v1.vx - v2.vx, v1.vy - v2.vy, v1.vxy - v2.vxy,
        (i1 - v1.vx - v1.vy + v1.vxy) - (i2 - v2.vx - v2.vy + v2.vxy)};
    for (int k = 0; k < 4; ++k) {
      rep.min_slack[static_cast<size_t>(k)] =
          std::min(rep.min_slack[static_cast<size_t>(k)], slack[static_cast<size_t>(k)]);
      if (slack[static_cast<size_t>(k)] < -1e-9) rep.holds = false;
    }
  }
  return rep;
}

}  // namespace egw
