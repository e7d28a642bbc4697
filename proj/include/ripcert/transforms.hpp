#pragma once

// Shape and defect-parameter transforms: moving the RIP defect target down
// (stack a scaled identity under a scaled copy) or up (uniform shrink),
// squarification through a Householder triangular factor, block-diagonal
// composition, and certified widening.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ripcert/errors.hpp"
#include "ripcert/matrix.hpp"
#include "ripcert/prng.hpp"
#include "ripcert/rational.hpp"
#include "ripcert/rip.hpp"
#include "ripcert/spectral.hpp"

namespace ripcert {

constexpr long kDenominatorCap = 1'000'000;

struct ShiftParams {
  Rat mu;
  Rat nu;   // zero for the upward shift (no rows are added)
  Rat tau;  // zero for the upward shift
  Rat lambda2_prime;
};

struct ShiftResult {
  RatMatrix x;
  ShiftParams params;
};

namespace detail {

// Smallest-denominator nonnegative rational r with r^2 in [lo, hi] (or
// [lo, hi) when half_open). Within a denominator the largest admissible
// numerator is taken. Denominators run up to kDenominatorCap.
inline std::optional<Rat> rational_sqrt_in(const Rat& lo, const Rat& hi, bool half_open) {
  if (hi < lo || hi < 0) return std::nullopt;
  const Rat lo_eff = std::max(lo, Rat(0));
  for (long q = 1; q <= kDenominatorCap; ++q) {
    const mpz_class qq = mpz_class(q) * q;
    // floor(hi * q^2) bounds the numerator from above.
    mpz_class cap_int = rat_floor(hi * Rat(qq));
    if (cap_int < 0) continue;
    mpz_class p = sqrt(cap_int);
    Rat r(p, qq / q);
    r.canonicalize();
    if (half_open && r * r == hi) {
      if (p == 0) continue;
      --p;
      r = Rat(p, mpz_class(q));
      r.canonicalize();
    }
    if (r * r >= lo_eff && r * r <= hi && (!half_open || r * r < hi)) return r;
  }
  return std::nullopt;
}

}  // namespace detail

// Stacks mu*X over nu*I so every restricted eigenvalue moves from lambda to
// mu^2*lambda + nu^2, carrying the defect from delta down to delta_prime. The
// gap verdict transfers with lambda2' = (lambda2 + 1)/2.
inline ShiftResult shift_delta_down(const RatMatrix& x, const Rat& delta, const Rat& delta_prime,
                                    const Rat& lambda2, std::optional<Rat> tau_opt = std::nullopt) {
  if (!(0 < delta_prime && delta_prime < delta && delta < 1))
    throw input_error("downward shift needs 0 < delta' < delta < 1");
  if (lambda2 <= 1) throw input_error("downward shift needs lambda2 > 1");
  const Rat tau_cap = (lambda2 - 1) * delta_prime / (2 + 4 * lambda2);
  const Rat tau = tau_opt.value_or(tau_cap);
  if (tau <= 0) throw input_error("tau must be positive to admit rational scalings");
  if (tau > tau_cap)
    throw input_error("tau exceeds (lambda2-1)*delta'/(2+4*lambda2) = " + rat_str(tau_cap));

  const auto mu = detail::rational_sqrt_in((delta_prime - 2 * tau) / delta,
                                           (delta_prime - tau) / delta, false);
  if (!mu)
    throw construction_error("no rational mu with denominator up to " +
                             std::to_string(kDenominatorCap) + " fits the shift bracket");
  const Rat mu_sq = *mu * *mu;
  const auto nu = detail::rational_sqrt_in(1 - tau - mu_sq, 1 - mu_sq, false);
  if (!nu)
    throw construction_error("no rational nu with denominator up to " +
                             std::to_string(kDenominatorCap) + " fits the shift bracket");

  RatMatrix tail = scalar_mul(*nu, rat_identity(x.cols));
  tail.blocks.push_back({"shift-identity", 0, x.cols});
  ShiftResult out{vstack(scalar_mul(*mu, x), tail), {}};
  out.params.mu = *mu;
  out.params.nu = *nu;
  out.params.tau = tau;
  out.params.lambda2_prime = (lambda2 + 1) / 2;
  return out;
}

// Shrinks X uniformly so the defect moves up from delta to delta_prime.
// Requires the restricted spectrum to fit below 1 + delta, certified here by
// the operator norm.
inline ShiftResult shift_delta_up(const RatMatrix& x, const Rat& delta, const Rat& delta_prime,
                                  const Rat& lambda2, double tolerance = kEigTolerance) {
  if (!(0 < delta && delta < delta_prime && delta_prime < 1))
    throw input_error("upward shift needs 0 < delta < delta' < 1");
  if (lambda2 <= 0) throw input_error("upward shift needs lambda2 > 0");
  const double opnorm = operator_norm(x);
  const double allowed = std::sqrt(1.0 + rat_to_double(delta));
  if (opnorm > allowed + tolerance)
    throw input_error("operator norm " + std::to_string(opnorm) + " exceeds sqrt(1+delta) = " +
                      std::to_string(allowed));
  if (lambda2 * delta >= 1)
    throw construction_error("lambda2*delta >= 1 leaves no room for an upward shift");

  const Rat lo = (1 - delta_prime) / (1 - delta);
  const Rat hi = (1 - delta_prime) / (1 - lambda2 * delta);
  std::optional<Rat> mu;
  if (hi > 1) {
    mu = detail::rational_sqrt_in(lo, Rat(1), false);  // mu <= 1 caps the bracket
  } else {
    mu = detail::rational_sqrt_in(lo, hi, true);
  }
  if (!mu)
    throw construction_error("no rational mu with denominator up to " +
                             std::to_string(kDenominatorCap) + " fits the shift bracket");
  const Rat mu_sq = *mu * *mu;

  ShiftResult out{scalar_mul(*mu, x), {}};
  out.params.mu = *mu;
  out.params.nu = 0;
  out.params.tau = 0;
  out.params.lambda2_prime = (1 - mu_sq * (1 - lambda2 * delta)) / delta_prime;
  return out;
}

// Replaces a tall matrix by the square triangular factor of its QR
// decomposition; ||X u||^2 is preserved to tau per unit vector. The result is
// validated on 64 deterministic unit vectors before being returned.
inline RatMatrix squarify(const RatMatrix& x, double tau = 1e-9, double tolerance = kEigTolerance) {
  if (x.rows < x.cols)
    throw input_error("squarify needs at least as many rows as columns, got " +
                      std::to_string(x.rows) + "x" + std::to_string(x.cols));
  if (tau <= 0) throw input_error("squarify tolerance must be positive");
  const double opnorm = operator_norm(x);
  if (opnorm > 2.0 + tolerance)
    throw input_error("operator norm " + std::to_string(opnorm) + " exceeds the bound 2");

  const DMatrix xd = to_double_matrix(x);
  const DMatrix r = householder_qr(xd).r;

  Prng rng(0x5157u);
  const int p = x.cols;
  for (int trial = 0; trial < 64; ++trial) {
    std::vector<double> u(static_cast<std::size_t>(p));
    double nrm = 0;
    for (double& c : u) {
      c = 2.0 * rng.unit_real() - 1.0;
      nrm += c * c;
    }
    if (nrm == 0) continue;
    nrm = std::sqrt(nrm);
    for (double& c : u) c /= nrm;
    double xu = 0, ru = 0;
    for (int i = 0; i < x.rows; ++i) {
      double s = 0;
      for (int j = 0; j < p; ++j) s += xd.at(i, j) * u[static_cast<std::size_t>(j)];
      xu += s * s;
    }
    for (int i = 0; i < p; ++i) {
      double s = 0;
      for (int j = i; j < p; ++j) s += r.at(i, j) * u[static_cast<std::size_t>(j)];
      ru += s * s;
    }
    if (std::fabs(xu - ru) > tau)
      throw construction_error("triangular factor missed the per-vector guarantee: |" +
                               std::to_string(xu) + " - " + std::to_string(ru) + "| > " +
                               std::to_string(tau));
  }
  return to_rational_matrix(r);
}

// Block-diagonal assembly [[A, 0], [0, B]].
inline RatMatrix block_diag(const RatMatrix& a, const RatMatrix& b) {
  RatMatrix out(a.rows + b.rows, a.cols + b.cols);
  out.mode = (a.mode == MatrixMode::rational && b.mode == MatrixMode::rational)
                 ? MatrixMode::rational
                 : MatrixMode::floating;
  for (int r = 0; r < a.rows; ++r)
    for (int c = 0; c < a.cols; ++c) out.at(r, c) = a.at(r, c);
  for (int r = 0; r < b.rows; ++r)
    for (int c = 0; c < b.cols; ++c) out.at(a.rows + r, a.cols + c) = b.at(r, c);
  for (BlockSpan s : a.blocks) out.blocks.push_back(std::move(s));
  for (BlockSpan s : b.blocks) {
    s.row_begin += a.rows;
    s.row_end += a.rows;
    out.blocks.push_back(std::move(s));
  }
  return out;
}

struct WidenResult {
  RatMatrix x;
  Rat aspect_ratio;    // cols(X) / rows(X)
  double b_delta_star;  // certified defect of the widening block
};

// Widens A by pairing it with a pre-certified block B: the RIP status of the
// result at sparsity k is A's, while the column count grows by cols(B). The
// certificate must be a defect report for B at sparsity >= k.
inline WidenResult widen_rectangular(const RatMatrix& a, const RatMatrix& b,
                                     const RipReport& b_cert, int k) {
  if (k < 1) throw input_error("sparsity level must be positive");
  if (a.cols < k || b.cols < k)
    throw input_error("both blocks need at least k = " + std::to_string(k) + " columns");
  if (b_cert.k < k)
    throw input_error("certificate covers sparsity " + std::to_string(b_cert.k) +
                      ", but the query needs " + std::to_string(k));
  if (!b_cert.witness_vector.empty() &&
      static_cast<int>(b_cert.witness_vector.size()) != b.cols)
    throw input_error("certificate witness length " +
                      std::to_string(b_cert.witness_vector.size()) +
                      " does not match the widening block's " + std::to_string(b.cols) +
                      " columns");
  WidenResult out{block_diag(a, b), Rat(0), b_cert.delta_star};
  if (out.x.rows == 0) throw input_error("widened matrix has no rows");
  out.aspect_ratio = rat_of(out.x.cols, out.x.rows);
  return out;
}

}  // namespace ripcert
