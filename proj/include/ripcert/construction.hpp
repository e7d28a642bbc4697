#pragma once

// Exactly-one instances -> spectral gap matrices.
//
// For an instance with n variables and m <= n clauses, the (4n+m) x 3n matrix
// stacks five row blocks over column groups (w+, w-, v):
//
//   [ I      0      0        ]   identity-top
//   [ 0      I      0        ]   identity-second
//   [ 0      0      xi^-1 P  ]   projector      (P = I - (1/n) 1 1^T)
//   [ xi^-1I xi^-1I -xi^-1 I ]   coupling
//   [ eps*Phi  0    -eps I'  ]   clause         (I' = first m rows of I_n)
//
// Phi is the 0/1 clause-variable incidence matrix. Every entry is an exact
// rational; the scaled variant divides by c1 = 3/xi, which caps the operator
// norm at 1. Assignment vectors u (one of u_i, u_{n+i} set per variable, last
// block all ones) satisfy ||X u||^2 = n + eps^2 ||Phi u+ - 1||^2 exactly.

#include <string>
#include <vector>

#include "ripcert/errors.hpp"
#include "ripcert/matrix.hpp"
#include "ripcert/rational.hpp"
#include "ripcert/sat.hpp"

namespace ripcert {

// Scalar ledger tying the instance gap alpha to the spectral separation.
struct ReductionParams {
  Rat eps;
  Rat xi;
  Rat alpha;
  // derived
  Rat c1;       // 3/xi, operator norm bound of the unscaled matrix
  Rat c2;       // 1 + xi^2, sparsity slack factor
  Rat rho;      // relative spectral margin of far-from-satisfiable instances
  Rat delta;    // 1 - (1+rho)/(18 xi^-2)
  Rat lambda1;  // = c2
  Rat lambda2;  // 18 xi^-2 / (18 xi^-2 - rho)
};

// The analysis regime additionally assumes xi < eps; construction itself only
// needs both scales in (0,1), and the analysis checks gate on their own
// preconditions.
inline ReductionParams make_params(const Rat& eps, const Rat& xi, const Rat& alpha = 0) {
  if (!(0 < xi && xi < 1) || !(0 < eps && eps < 1))
    throw input_error("scale parameters must lie in (0,1) (xi=" + rat_str(xi) +
                      ", eps=" + rat_str(eps) + ")");
  if (alpha < 0 || alpha > 1) throw input_error("alpha must lie in [0,1]");
  ReductionParams p;
  p.eps = eps;
  p.xi = xi;
  p.alpha = alpha;
  p.c1 = Rat(3) / xi;
  p.c2 = 1 + xi * xi;
  p.rho = (eps * eps / 36) * (Rat(9) * alpha / 13 - Rat(1284) * xi * xi) - Rat(25) * xi;
  const Rat two_c1_sq = Rat(18) / (xi * xi);
  p.delta = 1 - (1 + p.rho) / two_c1_sq;
  p.lambda1 = p.c2;
  p.lambda2 = two_c1_sq / (two_c1_sq - p.rho);
  return p;
}

// The xi that makes rho positive for a given gap: 1/ceil(1e5/alpha).
inline Rat tight_xi_for_gap(const Rat& alpha) {
  if (alpha <= 0) throw input_error("gap must be positive");
  return Rat(1) / Rat(rat_ceil(Rat(100000) / alpha));
}

inline RatMatrix build_clause_matrix(const E13Instance& inst) {
  const int n = inst.num_vars;
  const int m = static_cast<int>(inst.clauses.size());
  RatMatrix phi(m, n);
  for (int j = 0; j < m; ++j)
    for (int v : inst.clauses[static_cast<std::size_t>(j)]) {
      if (v < 1 || v > n) throw input_error("clause variable out of range");
      phi.at(j, v - 1) = 1;
    }
  return phi;
}

// P = I - (1/n) 1 1^T: symmetric, idempotent, kills the all-ones direction.
inline RatMatrix build_projector(int n) {
  if (n <= 0) throw input_error("projector needs a positive dimension");
  RatMatrix p(n, n);
  const Rat inv(1, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p.at(i, j) = (i == j ? Rat(1) : Rat(0)) - inv;
  return p;
}

inline RatMatrix build_reduction_matrix(const E13Instance& inst, const ReductionParams& params) {
  const int n = inst.num_vars;
  const int m = static_cast<int>(inst.clauses.size());
  if (n <= 0) throw input_error("instance has no variables");
  if (m > n)
    throw construction_error("construction needs clause count <= variable count, got " +
                             std::to_string(m) + " > " + std::to_string(n));
  const Rat xinv = Rat(1) / params.xi;
  const RatMatrix phi = build_clause_matrix(inst);
  const RatMatrix proj = build_projector(n);

  RatMatrix x(4 * n + m, 3 * n);
  for (int i = 0; i < n; ++i) x.at(i, i) = 1;
  for (int i = 0; i < n; ++i) x.at(n + i, n + i) = 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) x.at(2 * n + i, 2 * n + j) = xinv * proj.at(i, j);
  for (int i = 0; i < n; ++i) {
    x.at(3 * n + i, i) = xinv;
    x.at(3 * n + i, n + i) = xinv;
    x.at(3 * n + i, 2 * n + i) = -xinv;
  }
  for (int j = 0; j < m; ++j) {
    for (int c = 0; c < n; ++c)
      if (phi.at(j, c) != 0) x.at(4 * n + j, c) = params.eps;
    x.at(4 * n + j, 2 * n + j) = -params.eps;
  }
  x.blocks = {{"identity-top", 0, n},
              {"identity-second", n, 2 * n},
              {"projector", 2 * n, 3 * n},
              {"coupling", 3 * n, 4 * n},
              {"clause", 4 * n, 4 * n + m}};
  return x;
}

inline RatMatrix scaled_reduction_matrix(const RatMatrix& x_tilde, const ReductionParams& params) {
  RatMatrix s = scalar_mul(Rat(1) / params.c1, x_tilde);
  s.blocks = x_tilde.blocks;
  return s;
}

// u in {0,1}^{3n}: variable block one-hot per truth value, last block all ones.
inline std::vector<Rat> assignment_vector(int n, const Assignment& a) {
  if (a.size() != n) throw input_error("assignment length mismatch");
  std::vector<Rat> u(static_cast<std::size_t>(3 * n));
  for (int i = 1; i <= n; ++i) {
    u[static_cast<std::size_t>(i - 1)] = a.get(i) ? 1 : 0;
    u[static_cast<std::size_t>(n + i - 1)] = a.get(i) ? 0 : 1;
    u[static_cast<std::size_t>(2 * n + i - 1)] = 1;
  }
  return u;
}

struct AssignmentValue {
  Rat value;                        // ||X u||^2 = n + eps^2 ||Phi u+ - 1||^2
  Rat clause_deviation_sq;          // ||Phi u+ - 1||^2
  long unsat_count = 0;             // clauses with true-count != 1
  bool lower_bound_equality = false;  // no clause has three true variables
};

inline AssignmentValue assignment_value_exact(const E13Instance& inst,
                                              const ReductionParams& params,
                                              const Assignment& a) {
  if (a.size() != inst.num_vars) throw input_error("assignment length mismatch");
  AssignmentValue out;
  bool any_triple = false;
  for (const auto& cl : inst.clauses) {
    long trues = 0;
    for (int v : cl) trues += a.get(v) ? 1 : 0;
    const long dev = trues - 1;
    out.clause_deviation_sq += Rat(dev * dev);
    if (dev != 0) ++out.unsat_count;
    any_triple = any_triple || trues == 3;
  }
  out.value = Rat(inst.num_vars) + params.eps * params.eps * out.clause_deviation_sq;
  out.lower_bound_equality = !any_triple;
  return out;
}

}  // namespace ripcert
