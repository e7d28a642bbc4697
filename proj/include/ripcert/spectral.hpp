#pragma once

// Small dense spectral kernels.
//
// Desk-scale matrices (tens of columns) only, so everything here favors
// accuracy and determinism over asymptotics:
//  - cyclic Jacobi eigensolver for symmetric matrices in long double with a
//    relative off-diagonal stopping criterion (keeps small eigenvalues of
//    graded positive semidefinite Grams honest);
//  - exact-rational inverse-iteration refinement of a minimum eigenvalue,
//    reporting an exact Rayleigh quotient (used where 1e-9 absolute claims
//    must survive Gram norms of order xi^-2);
//  - an independent inverse-power oracle on a plain LU path, sharing no code
//    with the Jacobi route, for cross-checks;
//  - Householder QR returning the square upper factor with nonnegative diagonal.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "ripcert/errors.hpp"
#include "ripcert/matrix.hpp"
#include "ripcert/rational.hpp"

namespace ripcert {

struct EigResult {
  std::vector<double> values;               // ascending
  std::vector<std::vector<double>> vectors; // vectors[i] pairs with values[i], unit norm
};

namespace detail {

using LMatrix = std::vector<std::vector<long double>>;

inline LMatrix submatrix_ld(const LMatrix& g, const std::vector<int>& idx) {
  const std::size_t k = idx.size();
  LMatrix s(k, std::vector<long double>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      s[i][j] = g[static_cast<std::size_t>(idx[i])][static_cast<std::size_t>(idx[j])];
  return s;
}

inline LMatrix to_ldouble_full(const RatMatrix& g) {
  LMatrix out(static_cast<std::size_t>(g.rows),
              std::vector<long double>(static_cast<std::size_t>(g.cols)));
  for (int r = 0; r < g.rows; ++r)
    for (int c = 0; c < g.cols; ++c)
      out[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = rat_to_ldouble(g.at(r, c));
  return out;
}

}  // namespace detail

// Cyclic Jacobi on a symmetric matrix. Stops when every off-diagonal entry is
// negligible relative to the geometric mean of its diagonal neighbors.
inline EigResult jacobi_eigensolve(detail::LMatrix a) {
  const std::size_t n = a.size();
  EigResult res;
  if (n == 0) return res;
  std::vector<std::vector<long double>> v(n, std::vector<long double>(n, 0.0L));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0L;

  constexpr long double kRelTol = 1e-18L;
  for (int sweep = 0; sweep < 64; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const long double apq = a[p][q];
        const long double scale = std::sqrt(std::fabs(a[p][p] * a[q][q])) + 1e-320L;
        if (std::fabs(apq) <= kRelTol * scale || apq == 0.0L) continue;
        rotated = true;
        const long double theta = (a[q][q] - a[p][p]) / (2.0L * apq);
        const long double t =
            (theta >= 0 ? 1.0L : -1.0L) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0L));
        const long double c = 1.0L / std::sqrt(t * t + 1.0L);
        const long double s = t * c;
        const long double tau = s / (1.0L + c);
        const long double app = a[p][p], aqq = a[q][q];
        a[p][p] = app - t * apq;
        a[q][q] = aqq + t * apq;
        a[p][q] = a[q][p] = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
          if (i != p && i != q) {
            const long double aip = a[i][p], aiq = a[i][q];
            a[i][p] = a[p][i] = aip - s * (aiq + tau * aip);
            a[i][q] = a[q][i] = aiq + s * (aip - tau * aiq);
          }
          const long double vip = v[i][p], viq = v[i][q];
          v[i][p] = vip - s * (viq + tau * vip);
          v[i][q] = viq + s * (vip - tau * viq);
        }
      }
    if (!rotated) break;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a[i][i] < a[j][j]; });
  res.values.resize(n);
  res.vectors.assign(n, std::vector<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    res.values[k] = static_cast<double>(a[order[k]][order[k]]);
    for (std::size_t i = 0; i < n; ++i)
      res.vectors[k][i] = static_cast<double>(v[i][order[k]]);
  }
  return res;
}

inline EigResult jacobi_eigensolve(const RatMatrix& sym) {
  if (sym.rows != sym.cols) throw input_error("eigensolve needs a square matrix");
  return jacobi_eigensolve(detail::to_ldouble_full(sym));
}

// Exact solve of A x = b by Gaussian elimination with partial pivoting.
// Returns nullopt when A is singular.
inline std::optional<std::vector<Rat>> solve_linear_exact(RatMatrix a, std::vector<Rat> b) {
  const int n = a.rows;
  if (a.cols != n || static_cast<int>(b.size()) != n)
    throw input_error("linear solve dimension mismatch");
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    Rat best = 0;
    for (int r = col; r < n; ++r) {
      const Rat mag = rat_abs(a.at(r, col));
      if (mag > best) {
        best = mag;
        pivot = r;
      }
    }
    if (pivot < 0) return std::nullopt;
    if (pivot != col) {
      for (int c = col; c < n; ++c) std::swap(a.at(pivot, c), a.at(col, c));
      std::swap(b[static_cast<std::size_t>(pivot)], b[static_cast<std::size_t>(col)]);
    }
    const Rat inv = Rat(1) / a.at(col, col);
    for (int r = col + 1; r < n; ++r) {
      if (a.at(r, col) == 0) continue;
      const Rat f = a.at(r, col) * inv;
      a.at(r, col) = 0;
      for (int c = col + 1; c < n; ++c) a.at(r, c) -= f * a.at(col, c);
      b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
    }
  }
  std::vector<Rat> x(static_cast<std::size_t>(n));
  for (int r = n - 1; r >= 0; --r) {
    Rat s = b[static_cast<std::size_t>(r)];
    for (int c = r + 1; c < n; ++c) s -= a.at(r, c) * x[static_cast<std::size_t>(c)];
    x[static_cast<std::size_t>(r)] = s / a.at(r, r);
  }
  return x;
}

inline Rat rayleigh_exact(const RatMatrix& g, const std::vector<Rat>& x) {
  const Rat den = norm_sq(x);
  if (den == 0) throw input_error("Rayleigh quotient of the zero vector");
  std::vector<Rat> gx = matvec(g, x);
  Rat num = 0;
  for (std::size_t i = 0; i < x.size(); ++i) num += x[i] * gx[i];
  return num / den;
}

// Refines the minimum eigenvalue of an exact PSD Gram submatrix: shifted
// inverse iteration with exact rational solves, seeded by an approximate
// eigenvector. Iterates are rounded to doubles between steps to keep fraction
// sizes bounded; the returned value is an exact Rayleigh quotient, hence an
// upper bound on the true minimum that converges quadratically in practice.
inline Rat min_eig_refine(const RatMatrix& g, const std::vector<double>& x0, int max_iters = 8) {
  const int n = g.rows;
  if (n == 0) throw input_error("empty matrix");
  std::vector<Rat> x(static_cast<std::size_t>(n));
  bool nonzero = false;
  for (int i = 0; i < n; ++i) {
    x[static_cast<std::size_t>(i)] = rat_from_double(x0[static_cast<std::size_t>(i)]);
    nonzero = nonzero || x0[static_cast<std::size_t>(i)] != 0.0;
  }
  if (!nonzero) x[0] = 1;

  Rat best = rayleigh_exact(g, x);
  Rat margin = rat_abs(best) / 1048576;  // 2^-20 relative
  if (margin == 0) margin = Rat(1, std::int64_t{1} << 40);
  Rat sigma = best - margin;

  RatMatrix shifted = g;
  for (int i = 0; i < n; ++i) shifted.at(i, i) -= sigma;
  for (int iter = 0; iter < max_iters; ++iter) {
    auto solved = solve_linear_exact(shifted, x);
    if (!solved) {
      // sigma collided with an eigenvalue; nudge it down and retry once per step
      sigma -= margin * Rat(7, 13) + Rat(1, std::int64_t{1} << 50);
      shifted = g;
      for (int i = 0; i < n; ++i) shifted.at(i, i) -= sigma;
      continue;
    }
    // normalize in doubles to keep entries small and exactly reproducible
    double biggest = 0;
    for (const Rat& v : *solved) biggest = std::max(biggest, std::fabs(rat_to_double(v)));
    if (biggest == 0) break;
    for (std::size_t i = 0; i < solved->size(); ++i)
      x[i] = rat_from_double(rat_to_double((*solved)[i] / rat_from_double(biggest)));
    const Rat r = rayleigh_exact(g, x);
    if (r < best) {
      const Rat gain = best - r;
      best = r;
      const Rat tiny_rel(1, mpz_class("1000000000000000000000"));  // 1e-21
      const Rat tiny_abs(1, mpz_class("4611686018427387904"));     // 2^-62
      if (gain < rat_abs(best) * tiny_rel + tiny_abs) break;
    } else {
      break;  // converged (or stalled inside a cluster); best is already tight
    }
  }
  return best;
}

// Independent minimum-eigenvalue estimate: inverse power iteration with a
// plain long double LU factorization. Shares no code with the Jacobi path.
inline double min_eig_power_oracle(const detail::LMatrix& g, int iters = 120) {
  const std::size_t n = g.size();
  if (n == 0) throw input_error("empty matrix");
  long double norm = 0;
  for (std::size_t i = 0; i < n; ++i) {
    long double row = 0;
    for (std::size_t j = 0; j < n; ++j) row += std::fabs(g[i][j]);
    norm = std::max(norm, row);
  }
  if (norm == 0) return 0.0;

  auto factor = [&](long double shift, detail::LMatrix& lu, std::vector<int>& perm) {
    lu = g;
    for (std::size_t i = 0; i < n; ++i) lu[i][i] -= shift;
    perm.resize(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < n; ++r)
        if (std::fabs(lu[r][c]) > std::fabs(lu[piv][c])) piv = r;
      if (lu[piv][c] == 0.0L) return false;
      std::swap(lu[piv], lu[c]);
      std::swap(perm[piv], perm[c]);
      for (std::size_t r = c + 1; r < n; ++r) {
        const long double f = lu[r][c] / lu[c][c];
        lu[r][c] = f;
        for (std::size_t k = c + 1; k < n; ++k) lu[r][k] -= f * lu[c][k];
      }
    }
    return true;
  };

  detail::LMatrix lu;
  std::vector<int> perm;
  long double shift = -norm * 1e-18L;
  for (int attempt = 0; attempt < 6 && !factor(shift, lu, perm); ++attempt)
    shift = shift == 0.0L ? -norm * 1e-18L : shift * 1024.0L;

  std::vector<long double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0L + 0.25L * static_cast<long double>(i % 3);
  long double rayleigh = 0;
  for (int it = 0; it < iters; ++it) {
    std::vector<long double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[static_cast<std::size_t>(perm[i])];
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < r; ++c) y[r] -= lu[r][c] * y[c];
    for (std::size_t r = n; r-- > 0;) {
      for (std::size_t c = r + 1; c < n; ++c) y[r] -= lu[r][c] * y[c];
      y[r] /= lu[r][r];
    }
    long double nrm = 0;
    for (long double v : y) nrm += v * v;
    nrm = std::sqrt(nrm);
    if (nrm == 0.0L) break;
    for (long double& v : y) v /= nrm;
    long double num = 0;
    for (std::size_t i = 0; i < n; ++i) {
      long double row = 0;
      for (std::size_t j = 0; j < n; ++j) row += g[i][j] * y[j];
      num += y[i] * row;
    }
    const long double prev = rayleigh;
    rayleigh = num;
    x = y;
    if (it > 2 && std::fabs(rayleigh - prev) <= 1e-17L * (std::fabs(rayleigh) + norm * 1e-12L))
      break;
  }
  return static_cast<double>(rayleigh);
}

// Largest singular value via an exact Gram of the smaller side.
inline double operator_norm(const RatMatrix& x) {
  if (x.rows == 0 || x.cols == 0) return 0.0;
  const RatMatrix g = x.rows >= x.cols ? gram(x) : gram(transpose(x));
  EigResult eig = jacobi_eigensolve(g);
  const double top = eig.values.empty() ? 0.0 : eig.values.back();
  return std::sqrt(std::max(top, 0.0));
}

struct QrResult {
  DMatrix q;  // n x p, orthonormal columns
  DMatrix r;  // p x p upper triangular, nonnegative diagonal
};

// Householder QR of an n x p matrix (n >= p). Columns whose below-diagonal
// mass is exactly zero are left untouched, so upper-triangular input with
// nonnegative diagonal reproduces itself bit-exactly in the R factor.
inline QrResult householder_qr(const DMatrix& input) {
  const int n = input.rows, p = input.cols;
  if (n < p) throw construction_error("QR squarification needs rows >= cols");
  detail::LMatrix a(static_cast<std::size_t>(n), std::vector<long double>(static_cast<std::size_t>(p)));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < p; ++c)
      a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = input.at(r, c);

  struct Reflector {
    int k;
    std::vector<long double> v;  // entries k..n-1
    long double vnorm_sq;
  };
  std::vector<Reflector> refl;
  std::vector<long double> v(static_cast<std::size_t>(n));
  for (int k = 0; k < p; ++k) {
    long double below = 0;
    for (int r = k + 1; r < n; ++r)
      below += a[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] *
               a[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
    if (below == 0.0L) continue;  // column already reduced
    const long double akk = a[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
    const long double alpha = (akk >= 0 ? -1.0L : 1.0L) * std::sqrt(akk * akk + below);
    long double vnorm_sq = 0;
    for (int r = k; r < n; ++r) {
      v[static_cast<std::size_t>(r)] =
          a[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] - (r == k ? alpha : 0.0L);
      vnorm_sq += v[static_cast<std::size_t>(r)] * v[static_cast<std::size_t>(r)];
    }
    if (vnorm_sq == 0.0L) continue;
    for (int c = k; c < p; ++c) {
      long double dot = 0;
      for (int r = k; r < n; ++r)
        dot += v[static_cast<std::size_t>(r)] * a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      const long double f = 2.0L * dot / vnorm_sq;
      for (int r = k; r < n; ++r)
        a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -= f * v[static_cast<std::size_t>(r)];
    }
    Reflector rec;
    rec.k = k;
    rec.v.assign(v.begin() + k, v.begin() + n);
    rec.vnorm_sq = vnorm_sq;
    refl.push_back(std::move(rec));
  }

  // Backward accumulation of the thin Q = H_1 ... H_p restricted to the first
  // p columns of the identity.
  detail::LMatrix q(static_cast<std::size_t>(n), std::vector<long double>(static_cast<std::size_t>(p), 0.0L));
  for (int i = 0; i < p; ++i) q[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0L;
  for (auto it = refl.rbegin(); it != refl.rend(); ++it) {
    const int k = it->k;
    for (int c = 0; c < p; ++c) {
      long double dot = 0;
      for (int r = k; r < n; ++r)
        dot += it->v[static_cast<std::size_t>(r - k)] * q[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      const long double f = 2.0L * dot / it->vnorm_sq;
      for (int r = k; r < n; ++r)
        q[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -= f * it->v[static_cast<std::size_t>(r - k)];
    }
  }

  QrResult out{DMatrix(n, p), DMatrix(p, p)};
  out.q.mode = MatrixMode::floating;
  out.r.mode = MatrixMode::floating;
  for (int i = 0; i < p; ++i) {
    const bool flip = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] < 0.0L;
    for (int j = i; j < p; ++j) {
      const long double val = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      out.r.at(i, j) = static_cast<double>(flip ? -val : val);
    }
    for (int rr = 0; rr < n; ++rr) {
      const long double val = q[static_cast<std::size_t>(rr)][static_cast<std::size_t>(i)];
      out.q.at(rr, i) = static_cast<double>(flip ? -val : val);
    }
  }
  return out;
}

inline DMatrix householder_upper_factor(const DMatrix& input) {
  return householder_qr(input).r;
}

}  // namespace ripcert
