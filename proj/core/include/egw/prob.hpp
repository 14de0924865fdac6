#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "egw/errors.hpp"

namespace egw {

// Shared numeric conventions. All information quantities are in bits.
constexpr double k_support_eps = 1e-12;  // entries below this count as zero support
constexpr double k_mass_tol = 1e-9;      // accepted deviation of total mass from 1
constexpr int k_alphabet_cap = 64;       // default per-axis alphabet bound

// -t*log2(t) with the continuity convention l(0) = 0.
double nlog2n(double t);
// Shannon entropy in bits of an (unnormalized-tolerant) nonnegative vector.
double entropy_bits(const std::vector<double>& p);
// Binary entropy h(t) in bits.
double binary_entropy(double t);

struct MiPoint {
  double vx = 0;   // I(X;U)
  double vy = 0;   // I(Y;U)
  double vxy = 0;  // I(X,Y;U)
};

// Joint pmf of a pair (X, Y) over finite alphabets, row-major in x.
// Construction validates and renormalizes; the original deviation of the
// total mass from 1 is kept in mass_deviation.
struct JointPmf {
  std::vector<std::string> x_labels;
  std::vector<std::string> y_labels;
  std::vector<double> p;  // nx*ny, row-major
  double mass_deviation = 0.0;

  int nx() const { return static_cast<int>(x_labels.size()); }
  int ny() const { return static_cast<int>(y_labels.size()); }
  double at(int x, int y) const { return p[static_cast<size_t>(x) * ny() + y]; }

  std::vector<double> marginal_x() const;
  std::vector<double> marginal_y() const;
  // p(y|x) for fixed x; rows with p(x)=0 return the uniform distribution.
  std::vector<double> cond_y_given_x(int x) const;
  std::vector<double> cond_x_given_y(int y) const;

  double hx() const;
  double hy() const;
  double hxy() const;
  double hx_given_y() const;
  double hy_given_x() const;
  double mutual_information() const;

  bool is_independent(double tol = k_mass_tol) const;
};

// Validates alphabet sizes, rejects negative entries and mass deviations
// beyond k_mass_tol, renormalizes, and records the original deviation.
JointPmf validate_pmf(std::vector<std::string> x_labels,
                      std::vector<std::string> y_labels,
                      std::vector<double> entries,
                      int alphabet_cap = k_alphabet_cap);

// Conditional pmf p(u|x,y): one row per (x,y) cell, row-major in (x,y).
// Rows are validated and renormalized like pmfs. u_size is capped at
// nx*ny + 2 (the cardinality bound sufficient for the whole region) unless
// allow_large is set.
struct Channel {
  int nx = 0;
  int ny = 0;
  int u_size = 0;
  std::vector<double> q;  // (nx*ny) * u_size

  double at(int x, int y, int u) const {
    return q[(static_cast<size_t>(x) * ny + y) * u_size + u];
  }
  double* row(int x, int y) { return &q[(static_cast<size_t>(x) * ny + y) * u_size]; }
  const double* row(int x, int y) const {
    return &q[(static_cast<size_t>(x) * ny + y) * u_size];
  }
};

Channel validate_channel(int nx, int ny, int u_size, std::vector<double> entries,
                         bool allow_large = false);
// Constant channel q(u|x,y) = 1{u=0}; the U = (trivial) witness.
Channel constant_channel(int nx, int ny);
// Deterministic channel u = cell_to_u[x*ny+y].
Channel deterministic_channel(int nx, int ny, const std::vector<int>& cell_to_u,
                              int u_size);
// Drops u symbols whose total mass under p is below mass_floor and
// renormalizes rows. Returns the pruned channel (possibly identical).
Channel prune_channel(const JointPmf& p, const Channel& c, double mass_floor = 1e-10);

// Joint pmf of (X, Y, U) produced by extend(); exposes every information
// measure used by the optimizer and the region machinery.
struct TriplePmf {
  int nx = 0, ny = 0, nu = 0;
  std::vector<double> pxyu;  // ((x*ny)+y)*nu + u
  std::vector<double> pu, pxu, pyu, px, py, pxy;

  double at(int x, int y, int u) const {
    return pxyu[(static_cast<size_t>(x) * ny + y) * nu + u];
  }

  double hu() const;
  double ixu() const;   // I(X;U) = v_X
  double iyu() const;   // I(Y;U) = v_Y
  double ixyu() const;  // I(X,Y;U) = v_XY
  double ixy() const;   // I(X;Y)
  MiPoint mi_point() const;

  double ix_u_given_y() const;  // I(X;U|Y) = v_XY - v_Y
  double iy_u_given_x() const;  // I(Y;U|X) = v_XY - v_X
  double ixy_given_u() const;   // I(X;Y|U)
  double hx_given_yu() const;
  double hy_given_xu() const;
  double hu_given_x() const;
  double hu_given_y() const;
};

TriplePmf extend(const JointPmf& p, const Channel& c);
MiPoint mi_point_of(const JointPmf& p, const Channel& c);

// U = (Q, U_Q) with Q ~ Bern(lambda): block 0 carries c0 with weight
// (1-lambda), block 1 carries c1 with weight lambda. The mi_point of the
// mixture is the lambda-mixture of the component mi_points.
Channel mixture_channel(const Channel& c0, const Channel& c1, double lambda);

// Independent product (X1,X2),(Y1,Y2) and n-fold power. Product labels are
// "(a,b)". Guarded by alphabet_cap per axis.
JointPmf product_joint(const JointPmf& a, const JointPmf& b,
                       int alphabet_cap = k_alphabet_cap);
JointPmf tensor_power(const JointPmf& p, int n, int alphabet_cap = k_alphabet_cap);
// Product channel u = (u1,u2) acting on product_joint(a,b) cells.
Channel product_channel(const Channel& a, const Channel& b);

// Deterministic RNG helpers: fully specified mapping from mt19937_64 draws so
// outputs are reproducible across standard libraries.
struct Rng {
  explicit Rng(std::uint64_t seed);
  double uniform();                      // [0,1)
  double exponential();                  // rate 1
  std::vector<double> dirichlet(int n);  // flat Dirichlet(1,...,1)
  std::uint64_t next_u64();

 private:
  std::uint64_t s_[4];
};

}  // namespace egw
