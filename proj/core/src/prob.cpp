#include "egw/prob.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace egw {

const char* errc_name(errc c) {
  switch (c) {
    case errc::none: return "Ok";
    case errc::parse_error: return "ParseError";
    case errc::negative_entry: return "NegativeEntry";
    case errc::mass_deviation: return "MassDeviationTooLarge";
    case errc::empty_matrix: return "EmptyMatrix";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::alphabet_too_large: return "AlphabetTooLarge";
    case errc::graph_too_large: return "GraphTooLarge";
    case errc::enumeration_too_large: return "EnumerationTooLarge";
    case errc::oracle_too_large: return "OracleTooLarge";
    case errc::invalid_argument: return "InvalidArgument";
    case errc::outer_bound_violated: return "OuterBoundViolated";
    case errc::infeasible: return "Infeasible";
    case errc::infeasible_t: return "InfeasibleT";
    case errc::degenerate_ratio: return "DegenerateRatio";
    case errc::epsilon_too_large: return "EpsilonTooLarge";
    case errc::invalid_path: return "InvalidPath";
    case errc::invalid_cycle: return "InvalidCycle";
    case errc::condition_not_met: return "ConditionNotMet";
    case errc::not_independent: return "NotIndependent";
  }
  return "Unknown";
}

double nlog2n(double t) {
  if (t <= 0.0) return 0.0;
  return -t * std::log2(t);
}

double entropy_bits(const std::vector<double>& p) {
  double h = 0.0;
  for (double t : p) h += nlog2n(t);
  return h;
}

double binary_entropy(double t) { return nlog2n(t) + nlog2n(1.0 - t); }

// ---------------------------------------------------------------------------
// JointPmf
// ---------------------------------------------------------------------------

std::vector<double> JointPmf::marginal_x() const {
  std::vector<double> m(nx(), 0.0);
  for (int x = 0; x < nx(); ++x)
    for (int y = 0; y < ny(); ++y) m[x] += at(x, y);
  return m;
}

std::vector<double> JointPmf::marginal_y() const {
  std::vector<double> m(ny(), 0.0);
  for (int x = 0; x < nx(); ++x)
    for (int y = 0; y < ny(); ++y) m[y] += at(x, y);
  return m;
}

std::vector<double> JointPmf::cond_y_given_x(int x) const {
  std::vector<double> r(ny(), 0.0);
  double px = 0.0;
  for (int y = 0; y < ny(); ++y) px += at(x, y);
  if (px <= k_support_eps) {
    std::fill(r.begin(), r.end(), 1.0 / ny());
    return r;
  }
  for (int y = 0; y < ny(); ++y) r[y] = at(x, y) / px;
  return r;
}

std::vector<double> JointPmf::cond_x_given_y(int y) const {
  std::vector<double> r(nx(), 0.0);
  double py = 0.0;
  for (int x = 0; x < nx(); ++x) py += at(x, y);
  if (py <= k_support_eps) {
    std::fill(r.begin(), r.end(), 1.0 / nx());
    return r;
  }
  for (int x = 0; x < nx(); ++x) r[x] = at(x, y) / py;
  return r;
}

double JointPmf::hx() const { return entropy_bits(marginal_x()); }
double JointPmf::hy() const { return entropy_bits(marginal_y()); }
double JointPmf::hxy() const { return entropy_bits(p); }
double JointPmf::hx_given_y() const { return hxy() - hy(); }
double JointPmf::hy_given_x() const { return hxy() - hx(); }
double JointPmf::mutual_information() const { return hx() + hy() - hxy(); }

bool JointPmf::is_independent(double tol) const {
  const auto mx = marginal_x();
  const auto my = marginal_y();
  for (int x = 0; x < nx(); ++x)
    for (int y = 0; y < ny(); ++y)
      if (std::fabs(at(x, y) - mx[x] * my[y]) > tol) return false;
  return true;
}

JointPmf validate_pmf(std::vector<std::string> x_labels,
                      std::vector<std::string> y_labels,
                      std::vector<double> entries, int alphabet_cap) {
  const int nx = static_cast<int>(x_labels.size());
  const int ny = static_cast<int>(y_labels.size());
  if (nx == 0 || ny == 0 || entries.empty())
    fail(errc::empty_matrix, "pmf has no rows or columns");
  if (nx > alphabet_cap || ny > alphabet_cap)
    fail(errc::alphabet_too_large,
         "alphabet exceeds bound " + std::to_string(alphabet_cap));
  if (entries.size() != static_cast<size_t>(nx) * ny)
    fail(errc::dimension_mismatch,
         "pmf matrix has " + std::to_string(entries.size()) + " entries, expected " +
             std::to_string(static_cast<size_t>(nx) * ny));
  double mass = 0.0;
  for (double e : entries) {
    if (e < -k_support_eps)
      fail(errc::negative_entry, "pmf entry " + std::to_string(e) + " is negative");
    mass += std::max(e, 0.0);
  }
  const double dev = mass - 1.0;
  if (std::fabs(dev) > k_mass_tol)
    fail(errc::mass_deviation,
         "pmf mass deviates from 1 by " + std::to_string(dev));
  JointPmf out;
  out.x_labels = std::move(x_labels);
  out.y_labels = std::move(y_labels);
  out.p.resize(entries.size());
  for (size_t i = 0; i < entries.size(); ++i)
    out.p[i] = std::max(entries[i], 0.0) / mass;
  out.mass_deviation = dev;
  return out;
}

// ---------------------------------------------------------------------------
// Channel
// ---------------------------------------------------------------------------

Channel validate_channel(int nx, int ny, int u_size, std::vector<double> entries,
                         bool allow_large) {
  if (nx <= 0 || ny <= 0 || u_size <= 0)
    fail(errc::empty_matrix, "channel has empty dimensions");
  if (!allow_large && u_size > nx * ny + 2)
    fail(errc::alphabet_too_large,
         "u_size " + std::to_string(u_size) + " exceeds cardinality bound " +
             std::to_string(nx * ny + 2));
  if (entries.size() != static_cast<size_t>(nx) * ny * u_size)
    fail(errc::dimension_mismatch, "channel table size mismatch");
  Channel c;
  c.nx = nx;
  c.ny = ny;
  c.u_size = u_size;
  c.q = std::move(entries);
  for (int cell = 0; cell < nx * ny; ++cell) {
    double* row = &c.q[static_cast<size_t>(cell) * u_size];
    double mass = 0.0;
    for (int u = 0; u < u_size; ++u) {
      if (row[u] < -k_support_eps)
        fail(errc::negative_entry, "channel entry is negative");
      row[u] = std::max(row[u], 0.0);
      mass += row[u];
    }
    if (std::fabs(mass - 1.0) > k_mass_tol)
      fail(errc::mass_deviation, "channel row mass deviates from 1 by " +
                                     std::to_string(mass - 1.0));
    for (int u = 0; u < u_size; ++u) row[u] /= mass;
  }
  return c;
}

Channel constant_channel(int nx, int ny) {
  std::vector<double> q(static_cast<size_t>(nx) * ny, 1.0);
  return validate_channel(nx, ny, 1, std::move(q));
}

Channel deterministic_channel(int nx, int ny, const std::vector<int>& cell_to_u,
                              int u_size) {
  if (cell_to_u.size() != static_cast<size_t>(nx) * ny)
    fail(errc::dimension_mismatch, "cell_to_u size mismatch");
  std::vector<double> q(static_cast<size_t>(nx) * ny * u_size, 0.0);
  for (int cell = 0; cell < nx * ny; ++cell) {
    const int u = cell_to_u[cell];
    if (u < 0 || u >= u_size) fail(errc::invalid_argument, "u index out of range");
    q[static_cast<size_t>(cell) * u_size + u] = 1.0;
  }
  return validate_channel(nx, ny, u_size, std::move(q), u_size > nx * ny + 2);
}

Channel prune_channel(const JointPmf& p, const Channel& c, double mass_floor) {
  if (p.nx() != c.nx || p.ny() != c.ny)
    fail(errc::dimension_mismatch, "pmf/channel dimensions differ");
  std::vector<double> mass(c.u_size, 0.0);
  for (int x = 0; x < c.nx; ++x)
    for (int y = 0; y < c.ny; ++y)
      for (int u = 0; u < c.u_size; ++u) mass[u] += p.at(x, y) * c.at(x, y, u);
  std::vector<int> keep;
  for (int u = 0; u < c.u_size; ++u)
    if (mass[u] >= mass_floor) keep.push_back(u);
  if (keep.empty() || static_cast<int>(keep.size()) == c.u_size) {
    if (keep.empty()) return c;  // degenerate; keep as-is
    return c;
  }
  Channel out;
  out.nx = c.nx;
  out.ny = c.ny;
  out.u_size = static_cast<int>(keep.size());
  out.q.resize(static_cast<size_t>(c.nx) * c.ny * keep.size());
  for (int cell = 0; cell < c.nx * c.ny; ++cell) {
    double row_mass = 0.0;
    for (size_t k = 0; k < keep.size(); ++k) {
      const double v = c.q[static_cast<size_t>(cell) * c.u_size + keep[k]];
      out.q[static_cast<size_t>(cell) * keep.size() + k] = v;
      row_mass += v;
    }
    if (row_mass <= k_support_eps) {
      // Row lived entirely on pruned symbols (zero-mass cell): make uniform.
      for (size_t k = 0; k < keep.size(); ++k)
        out.q[static_cast<size_t>(cell) * keep.size() + k] = 1.0 / keep.size();
    } else {
      for (size_t k = 0; k < keep.size(); ++k)
        out.q[static_cast<size_t>(cell) * keep.size() + k] /= row_mass;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// TriplePmf
// ---------------------------------------------------------------------------

TriplePmf extend(const JointPmf& p, const Channel& c) {
  if (p.nx() != c.nx || p.ny() != c.ny)
    fail(errc::dimension_mismatch, "pmf/channel dimensions differ");
  TriplePmf t;
  t.nx = p.nx();
  t.ny = p.ny();
  t.nu = c.u_size;
  t.pxyu.assign(static_cast<size_t>(t.nx) * t.ny * t.nu, 0.0);
  t.pu.assign(t.nu, 0.0);
  t.pxu.assign(static_cast<size_t>(t.nx) * t.nu, 0.0);
  t.pyu.assign(static_cast<size_t>(t.ny) * t.nu, 0.0);
  t.px = p.marginal_x();
  t.py = p.marginal_y();
  t.pxy = p.p;
  for (int x = 0; x < t.nx; ++x)
    for (int y = 0; y < t.ny; ++y) {
      const double pxy = p.at(x, y);
      if (pxy <= 0.0) continue;
      for (int u = 0; u < t.nu; ++u) {
        const double m = pxy * c.at(x, y, u);
        t.pxyu[(static_cast<size_t>(x) * t.ny + y) * t.nu + u] = m;
        t.pu[u] += m;
        t.pxu[static_cast<size_t>(x) * t.nu + u] += m;
        t.pyu[static_cast<size_t>(y) * t.nu + u] += m;
      }
    }
  return t;
}

double TriplePmf::hu() const { return entropy_bits(pu); }

double TriplePmf::ixu() const {
  return entropy_bits(px) + hu() - entropy_bits(pxu);
}

double TriplePmf::iyu() const {
  return entropy_bits(py) + hu() - entropy_bits(pyu);
}

double TriplePmf::ixyu() const {
  return entropy_bits(pxy) + hu() - entropy_bits(pxyu);
}

double TriplePmf::ixy() const {
  return entropy_bits(px) + entropy_bits(py) - entropy_bits(pxy);
}

MiPoint TriplePmf::mi_point() const {
  const double h_u = hu();
  MiPoint v;
  v.vx = entropy_bits(px) + h_u - entropy_bits(pxu);
  v.vy = entropy_bits(py) + h_u - entropy_bits(pyu);
  v.vxy = entropy_bits(pxy) + h_u - entropy_bits(pxyu);
  return v;
}

double TriplePmf::ix_u_given_y() const { return ixyu() - iyu(); }
double TriplePmf::iy_u_given_x() const { return ixyu() - ixu(); }
double TriplePmf::ixy_given_u() const { return ixy() - ixu() - iyu() + ixyu(); }

double TriplePmf::hx_given_yu() const {
  return entropy_bits(pxyu) - entropy_bits(pyu);
}

double TriplePmf::hy_given_xu() const {
  return entropy_bits(pxyu) - entropy_bits(pxu);
}

double TriplePmf::hu_given_x() const { return entropy_bits(pxu) - entropy_bits(px); }
double TriplePmf::hu_given_y() const { return entropy_bits(pyu) - entropy_bits(py); }

MiPoint mi_point_of(const JointPmf& p, const Channel& c) {
  return extend(p, c).mi_point();
}

// ---------------------------------------------------------------------------
// Channel combinators
// ---------------------------------------------------------------------------

Channel mixture_channel(const Channel& c0, const Channel& c1, double lambda) {
  if (c0.nx != c1.nx || c0.ny != c1.ny)
    fail(errc::dimension_mismatch, "mixture components have different dimensions");
  if (lambda < 0.0 || lambda > 1.0)
    fail(errc::invalid_argument, "lambda must lie in [0,1]");
  Channel out;
  out.nx = c0.nx;
  out.ny = c0.ny;
  out.u_size = c0.u_size + c1.u_size;
  out.q.resize(static_cast<size_t>(out.nx) * out.ny * out.u_size);
  for (int cell = 0; cell < out.nx * out.ny; ++cell) {
    double* row = &out.q[static_cast<size_t>(cell) * out.u_size];
    for (int u = 0; u < c0.u_size; ++u)
      row[u] = (1.0 - lambda) * c0.q[static_cast<size_t>(cell) * c0.u_size + u];
    for (int u = 0; u < c1.u_size; ++u)
      row[c0.u_size + u] = lambda * c1.q[static_cast<size_t>(cell) * c1.u_size + u];
  }
  return out;
}

static std::string pair_label(const std::string& a, const std::string& b) {
  return "(" + a + "," + b + ")";
}

JointPmf product_joint(const JointPmf& a, const JointPmf& b, int alphabet_cap) {
  const int nx = a.nx() * b.nx();
  const int ny = a.ny() * b.ny();
  if (nx > alphabet_cap || ny > alphabet_cap)
    fail(errc::alphabet_too_large, "product alphabet exceeds bound " +
                                       std::to_string(alphabet_cap));
  std::vector<std::string> xl, yl;
  xl.reserve(nx);
  yl.reserve(ny);
  for (const auto& l1 : a.x_labels)
    for (const auto& l2 : b.x_labels) xl.push_back(pair_label(l1, l2));
  for (const auto& l1 : a.y_labels)
    for (const auto& l2 : b.y_labels) yl.push_back(pair_label(l1, l2));
  std::vector<double> cells(static_cast<size_t>(nx) * ny);
  for (int x1 = 0; x1 < a.nx(); ++x1)
    for (int x2 = 0; x2 < b.nx(); ++x2)
      for (int y1 = 0; y1 < a.ny(); ++y1)
        for (int y2 = 0; y2 < b.ny(); ++y2) {
          const int x = x1 * b.nx() + x2;
          const int y = y1 * b.ny() + y2;
          cells[static_cast<size_t>(x) * ny + y] = a.at(x1, y1) * b.at(x2, y2);
        }
  return validate_pmf(std::move(xl), std::move(yl), std::move(cells), alphabet_cap);
}

JointPmf tensor_power(const JointPmf& p, int n, int alphabet_cap) {
  if (n <= 0) fail(errc::invalid_argument, "tensor power requires n >= 1");
  JointPmf out = p;
  for (int i = 1; i < n; ++i) out = product_joint(out, p, alphabet_cap);
  return out;
}

Channel product_channel(const Channel& a, const Channel& b) {
  Channel out;
  out.nx = a.nx * b.nx;
  out.ny = a.ny * b.ny;
  out.u_size = a.u_size * b.u_size;
  out.q.resize(static_cast<size_t>(out.nx) * out.ny * out.u_size);
  for (int x1 = 0; x1 < a.nx; ++x1)
    for (int x2 = 0; x2 < b.nx; ++x2)
      for (int y1 = 0; y1 < a.ny; ++y1)
        for (int y2 = 0; y2 < b.ny; ++y2) {
          const int x = x1 * b.nx + x2;
          const int y = y1 * b.ny + y2;
          double* row = &out.q[(static_cast<size_t>(x) * out.ny + y) * out.u_size];
          for (int u1 = 0; u1 < a.u_size; ++u1)
            for (int u2 = 0; u2 < b.u_size; ++u2)
              row[u1 * b.u_size + u2] = a.at(x1, y1, u1) * b.at(x2, y2, u2);
        }
  return out;
}

// ---------------------------------------------------------------------------
// Rng: xoshiro256** seeded with splitmix64. Fully specified so that runs are
// byte-identical regardless of the standard library.
// ---------------------------------------------------------------------------

static std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& s : s_) s = splitmix64(sm);
}

static inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl64(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl64(s_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::exponential() {
  double u;
  do {
    u = uniform();
  } while (u <= 0.0);
  return -std::log(u);
}

std::vector<double> Rng::dirichlet(int n) {
  std::vector<double> v(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    v[i] = exponential();
    sum += v[i];
  }
  for (int i = 0; i < n; ++i) v[i] /= sum;
  return v;
}

}  // namespace egw
