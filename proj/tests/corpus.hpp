#pragma once

// Shared fixture pmfs and deterministic random generators for the test and
// acceptance suites. Everything is seeded; no test depends on wall clock.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "egw/prob.hpp"

namespace corpus {

inline std::vector<std::string> labels(int n, const char* prefix = "") {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

inline egw::JointPmf make_pmf(int nx, int ny, std::vector<double> cells) {
  return egw::validate_pmf(labels(nx), labels(ny), cells);
}

// ============================================================
// Canonical fixtures
// ============================================================

// Perfectly correlated uniform bits.
inline egw::JointPmf p_eq() { return make_pmf(2, 2, {0.5, 0.0, 0.0, 0.5}); }

// Independent uniform bits.
inline egw::JointPmf p_ind() { return make_pmf(2, 2, {0.25, 0.25, 0.25, 0.25}); }

// Uniform on the L-shaped support {(0,0), (0,1), (1,0)}.
inline egw::JointPmf p_l() {
  return make_pmf(2, 2, {1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0});
}

// Doubly symmetric binary source with crossover 0.1.
inline egw::JointPmf dsbs01() { return make_pmf(2, 2, {0.45, 0.05, 0.05, 0.45}); }

// Uniform typewriter on 5 symbols: y = x or x+1 (mod 5).
inline egw::JointPmf pentagon() {
  std::vector<double> cells(25, 0.0);
  for (int x = 0; x < 5; ++x) {
    cells[static_cast<std::size_t>(x) * 5 + x] = 0.1;
    cells[static_cast<std::size_t>(x) * 5 + (x + 1) % 5] = 0.1;
  }
  return make_pmf(5, 5, cells);
}

// Independent uniform 3x3 pair.
inline egw::JointPmf uniform33() {
  return make_pmf(3, 3, std::vector<double>(9, 1.0 / 9));
}

// Two uniform 2x2 blocks of mass 1/2 each: common part is one fair bit.
inline egw::JointPmf two_block44() {
  std::vector<double> cells(16, 0.0);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      cells[static_cast<std::size_t>(x) * 4 + y] = 0.125;
      cells[static_cast<std::size_t>(x + 2) * 4 + y + 2] = 0.125;
    }
  return make_pmf(4, 4, cells);
}

// Full-support asymmetric pmf with H(X) > H(Y).
inline egw::JointPmf asym22() { return make_pmf(2, 2, {0.4, 0.1, 0.2, 0.3}); }

// ============================================================
// Seeded random generators
// ============================================================

// Dirichlet(1) pmf with optional zeroed cells; positive cells are floored at
// min_cell (after renormalization the floor shrinks by at most ~20%), so the
// witness constructions keep measurable perturbation room.
inline egw::JointPmf random_pmf(std::uint64_t seed, int nx, int ny,
                                double zero_prob = 0.0, double min_cell = 0.02) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> exp1(1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> cells(static_cast<std::size_t>(nx) * ny);
  for (;;) {
    int live = 0;
    for (double& c : cells) {
      c = (zero_prob > 0.0 && unif(rng) < zero_prob) ? 0.0 : exp1(rng) + min_cell;
      if (c > 0.0) ++live;
    }
    if (live < 2) continue;  // need at least two support cells
    double z = 0.0;
    for (double c : cells) z += c;
    for (double& c : cells) c /= z;
    return make_pmf(nx, ny, cells);
  }
}

// Random channel with Dirichlet(1) rows.
inline egw::Channel random_channel(std::uint64_t seed, int nx, int ny, int u_size) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> exp1(1.0);
  egw::Channel c;
  c.nx = nx;
  c.ny = ny;
  c.u_size = u_size;
  c.q.resize(static_cast<std::size_t>(nx) * ny * u_size);
  for (int cell = 0; cell < nx * ny; ++cell) {
    double z = 0.0;
    for (int u = 0; u < u_size; ++u) {
      double w = exp1(rng) + 1e-3;
      c.q[static_cast<std::size_t>(cell) * u_size + u] = w;
      z += w;
    }
    for (int u = 0; u < u_size; ++u)
      c.q[static_cast<std::size_t>(cell) * u_size + u] /= z;
  }
  return c;
}

// Product of independent random marginals, each floored at min_mass.
inline egw::JointPmf random_independent_pmf(std::uint64_t seed, int nx, int ny,
                                            double min_mass = 0.05) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> exp1(1.0);
  auto marginal = [&](int n) {
    std::vector<double> m(static_cast<std::size_t>(n));
    double z = 0.0;
    for (double& v : m) {
      v = exp1(rng) + min_mass * n;
      z += v;
    }
    for (double& v : m) v /= z;
    return m;
  };
  std::vector<double> px = marginal(nx), py = marginal(ny);
  std::vector<double> cells(static_cast<std::size_t>(nx) * ny);
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y)
      cells[static_cast<std::size_t>(x) * ny + y] =
          px[static_cast<std::size_t>(x)] * py[static_cast<std::size_t>(y)];
  return make_pmf(nx, ny, cells);
}

// Block-diagonal pmf with k full uniform blocks: the common part is exactly
// the block index, whose entropy is returned through *block_entropy.
inline egw::JointPmf planted_blocks(std::uint64_t seed, int k,
                                    double* block_entropy) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size_dist(1, 2);
  std::exponential_distribution<double> exp1(1.0);
  std::vector<int> bx(static_cast<std::size_t>(k)), by(static_cast<std::size_t>(k));
  std::vector<double> w(static_cast<std::size_t>(k));
  double z = 0.0;
  for (int c = 0; c < k; ++c) {
    bx[static_cast<std::size_t>(c)] = size_dist(rng);
    by[static_cast<std::size_t>(c)] = size_dist(rng);
    w[static_cast<std::size_t>(c)] = exp1(rng) + 0.2;
    z += w[static_cast<std::size_t>(c)];
  }
  int nx = 0, ny = 0;
  for (int c = 0; c < k; ++c) {
    nx += bx[static_cast<std::size_t>(c)];
    ny += by[static_cast<std::size_t>(c)];
  }
  std::vector<double> cells(static_cast<std::size_t>(nx) * ny, 0.0);
  int ox = 0, oy = 0;
  double h = 0.0;
  for (int c = 0; c < k; ++c) {
    const double wc = w[static_cast<std::size_t>(c)] / z;
    h += egw::nlog2n(wc);
    const int sx = bx[static_cast<std::size_t>(c)], sy = by[static_cast<std::size_t>(c)];
    for (int x = 0; x < sx; ++x)
      for (int y = 0; y < sy; ++y)
        cells[static_cast<std::size_t>(ox + x) * ny + oy + y] = wc / (sx * sy);
    ox += sx;
    oy += sy;
  }
  if (block_entropy) *block_entropy = h;
  return make_pmf(nx, ny, cells);
}

}  // namespace corpus
