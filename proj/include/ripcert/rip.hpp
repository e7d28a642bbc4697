#pragma once

// Brute-force restricted-isometry oracle.
//
// All k-column supports are enumerated in lexicographic order under an explicit
// subset budget; per support the extreme eigenvalues of the exact Gram
// submatrix are computed (Jacobi in long double). delta*(k) is the smallest
// admissible isometry defect: max(max_eig - 1, 1 - min_eig), clipped at zero.
// Enumeration may be split across workers; chunks are contiguous rank ranges
// and the merge prefers strictly better values, then earlier (lexicographically
// smaller) supports, so results are identical for every worker count.
//
// The sparse minimizer solves: minimize ||X u||^2 over ||u||^2 = 2n and
// ||u||_0 <= floor(2(1+xi^2) n), reporting the minimizing direction scaled to
// norm sqrt(2n), sign-normalized so the mean of the last n entries is
// nonnegative. Its objective is refined through exact rational inverse
// iteration so that 1e-9-level claims survive Gram norms of order xi^-2.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "ripcert/construction.hpp"
#include "ripcert/errors.hpp"
#include "ripcert/matrix.hpp"
#include "ripcert/rational.hpp"
#include "ripcert/sat.hpp"
#include "ripcert/spectral.hpp"
#include "ripcert/subsets.hpp"

namespace ripcert {

constexpr double kEigTolerance = 1e-9;
constexpr std::uint64_t kDefaultSubsetBudget = 10'000'000;

struct RipReport {
  int k = 0;
  double min_restricted_eig = 0;
  double max_restricted_eig = 0;
  double delta_star = 0;
  double tolerance = kEigTolerance;
  std::vector<int> witness_support_min;  // 0-based column indices
  std::vector<int> witness_support_max;
  std::vector<double> witness_vector;  // unit vector achieving delta_star
};

struct MinimizerReport {
  int n = 0;
  int support_budget = 0;
  std::vector<double> w;        // length 3n, ||w||^2 = 2n
  std::vector<double> w_plus;   // first n entries
  std::vector<double> w_minus;  // middle n entries
  std::vector<double> v;        // last n entries
  double v_bar = 0;
  double objective = 0;  // ||X w||^2 at the minimizer
  Rat objective_exact;
  std::vector<int> support;  // 0-based column indices
};

namespace detail {

inline std::uint64_t checked_support_count(int p, int k, std::uint64_t budget,
                                           const char* what) {
  const std::uint64_t cap = std::uint64_t{1} << 62;
  const std::uint64_t total = binom_capped(p, k, cap);
  if (total > budget) {
    const std::string count =
        total > cap ? "more than 2^62" : std::to_string(total);
    throw capacity_error(std::string(what) + " needs " + count + " supports of size " +
                         std::to_string(k) + " out of " + std::to_string(p) +
                         " columns, over the budget of " + std::to_string(budget));
  }
  return total;
}

// Runs fn(worker_id, rank_begin, rank_end) on contiguous chunks of the
// lexicographic rank space, possibly on separate threads.
template <class Fn>
void run_partitioned(std::uint64_t total, int workers, Fn&& fn) {
  const int w = std::max(1, std::min<int>(workers, static_cast<int>(
                                              std::min<std::uint64_t>(total, 64))));
  if (w == 1) {
    fn(0, 0, total);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(w));
  for (int i = 0; i < w; ++i) {
    const std::uint64_t lo = total / static_cast<std::uint64_t>(w) * static_cast<std::uint64_t>(i) +
                             std::min<std::uint64_t>(total % w, static_cast<std::uint64_t>(i));
    const std::uint64_t hi = total / static_cast<std::uint64_t>(w) * static_cast<std::uint64_t>(i + 1) +
                             std::min<std::uint64_t>(total % w, static_cast<std::uint64_t>(i + 1));
    threads.emplace_back([&fn, i, lo, hi] { fn(i, lo, hi); });
  }
  for (auto& t : threads) t.join();
}

inline bool support_less(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

inline void sign_normalize_first_positive(std::vector<double>& v) {
  for (double x : v) {
    if (std::fabs(x) > 1e-12) {
      if (x < 0)
        for (double& y : v) y = -y;
      return;
    }
  }
}

}  // namespace detail

// Extreme eigenvalues over all supports of size exactly k (smaller supports are
// dominated by padding, so this also covers ||u||_0 <= k).
inline RipReport restricted_extremes(const RatMatrix& x, int k,
                                     std::uint64_t budget = kDefaultSubsetBudget,
                                     int workers = 1, double tolerance = kEigTolerance) {
  if (k < 1 || k > x.cols)
    throw input_error("sparsity level must lie in [1, " + std::to_string(x.cols) + "], got " +
                      std::to_string(k));
  const std::uint64_t total =
      detail::checked_support_count(x.cols, k, budget, "restricted eigenvalue enumeration");

  const RatMatrix g = gram(x);
  const detail::LMatrix gl = detail::to_ldouble_full(g);

  struct Extreme {
    double min_val = std::numeric_limits<double>::infinity();
    std::vector<int> min_supp;
    double max_val = -std::numeric_limits<double>::infinity();
    std::vector<int> max_supp;
  };
  std::vector<Extreme> acc(64);

  detail::run_partitioned(total, workers, [&](int id, std::uint64_t lo, std::uint64_t hi) {
    if (lo >= hi) return;
    Extreme& e = acc[static_cast<std::size_t>(id)];
    std::vector<int> comb = unrank_combination(x.cols, k, lo);
    for (std::uint64_t r = lo; r < hi; ++r) {
      const EigResult eig = jacobi_eigensolve(detail::submatrix_ld(gl, comb));
      if (eig.values.front() < e.min_val) {
        e.min_val = eig.values.front();
        e.min_supp = comb;
      }
      if (eig.values.back() > e.max_val) {
        e.max_val = eig.values.back();
        e.max_supp = comb;
      }
      if (r + 1 < hi) next_combination(comb, x.cols);
    }
  });

  RipReport rep;
  rep.k = k;
  rep.tolerance = tolerance;
  bool first = true;
  for (const auto& e : acc) {
    if (e.min_supp.empty()) continue;
    if (first) {
      rep.min_restricted_eig = e.min_val;
      rep.witness_support_min = e.min_supp;
      rep.max_restricted_eig = e.max_val;
      rep.witness_support_max = e.max_supp;
      first = false;
      continue;
    }
    if (e.min_val < rep.min_restricted_eig) {
      rep.min_restricted_eig = e.min_val;
      rep.witness_support_min = e.min_supp;
    }
    if (e.max_val > rep.max_restricted_eig) {
      rep.max_restricted_eig = e.max_val;
      rep.witness_support_max = e.max_supp;
    }
  }
  rep.delta_star =
      std::max({rep.max_restricted_eig - 1.0, 1.0 - rep.min_restricted_eig, 0.0});

  // Witness vector for whichever side determines delta*; ties go to the lower
  // (minimum-eigenvalue) side, matching the clipped value 0 case.
  const bool min_side = 1.0 - rep.min_restricted_eig >= rep.max_restricted_eig - 1.0;
  const std::vector<int>& supp = min_side ? rep.witness_support_min : rep.witness_support_max;
  const EigResult eig = jacobi_eigensolve(detail::submatrix_ld(gl, supp));
  const std::vector<double>& dense = min_side ? eig.vectors.front() : eig.vectors.back();
  rep.witness_vector.assign(static_cast<std::size_t>(x.cols), 0.0);
  for (std::size_t i = 0; i < supp.size(); ++i)
    rep.witness_vector[static_cast<std::size_t>(supp[i])] = dense[i];
  detail::sign_normalize_first_positive(rep.witness_vector);
  return rep;
}

inline double rip_delta(const RatMatrix& x, int k, std::uint64_t budget = kDefaultSubsetBudget,
                        int workers = 1) {
  return restricted_extremes(x, k, budget, workers).delta_star;
}

inline bool is_rip(const RatMatrix& x, int k, const Rat& delta,
                   std::uint64_t budget = kDefaultSubsetBudget, int workers = 1,
                   double tolerance = kEigTolerance) {
  return rip_delta(x, k, budget, workers) <= rat_to_double(delta) + tolerance;
}

// Largest k whose defect stays within delta; 0 when even k = 1 fails.
inline int rip_max_k(const RatMatrix& x, const Rat& delta,
                     std::uint64_t budget = kDefaultSubsetBudget, int workers = 1,
                     double tolerance = kEigTolerance) {
  for (int k = 1; k <= x.cols; ++k)
    if (!is_rip(x, k, delta, budget, workers, tolerance)) return k - 1;
  return x.cols;
}

enum class GapVerdict { IsRip, FarFromRip, Indeterminate };

inline const char* to_string(GapVerdict v) {
  switch (v) {
    case GapVerdict::IsRip: return "is-rip";
    case GapVerdict::FarFromRip: return "far-from-rip";
    default: return "indeterminate";
  }
}

// Distinguishes delta*(k) <= delta from delta*(floor(k/lambda1)) > lambda2*delta.
// Tolerance collisions resolve toward IsRip.
inline GapVerdict gap_decide(const RatMatrix& x, int k, const Rat& delta, const Rat& lambda1,
                             const Rat& lambda2, std::uint64_t budget = kDefaultSubsetBudget,
                             int workers = 1, double tolerance = kEigTolerance) {
  if (delta <= 0 || delta >= 1) throw input_error("gap threshold must lie in (0,1)");
  if (lambda1 < 1) throw input_error("sparsity shrink factor must be >= 1");
  if (lambda2 <= 0) throw input_error("defect inflation factor must be positive");
  if (is_rip(x, k, delta, budget, workers, tolerance)) return GapVerdict::IsRip;
  const long k_small = std::max<long>(1, rat_floor_long(Rat(k) / lambda1));
  const double far_threshold = rat_to_double(lambda2 * delta);
  if (rip_delta(x, static_cast<int>(k_small), budget, workers) > far_threshold + tolerance)
    return GapVerdict::FarFromRip;
  return GapVerdict::Indeterminate;
}

// Minimize ||X u||^2 over ||u||^2 = 2n, ||u||_0 <= floor(2(1+xi^2)n).
inline MinimizerReport sparse_minimizer(const RatMatrix& x_tilde, int n, const Rat& xi,
                                        std::uint64_t budget = kDefaultSubsetBudget,
                                        int workers = 1) {
  if (x_tilde.cols != 3 * n)
    throw input_error("minimizer expects a 3n-column matrix, got " +
                      std::to_string(x_tilde.cols) + " columns for n=" + std::to_string(n));
  if (xi <= 0 || xi >= 1) throw input_error("xi must lie in (0,1)");
  const long kbud_raw = rat_floor_long(Rat(2 * n) * (1 + xi * xi));
  const int kbud = static_cast<int>(std::min<long>(kbud_raw, 3 * n));
  const std::uint64_t total =
      detail::checked_support_count(3 * n, kbud, budget, "sparse minimizer enumeration");

  const RatMatrix g = gram(x_tilde);
  const detail::LMatrix gl = detail::to_ldouble_full(g);
  long double frob = 0;
  for (const auto& row : gl)
    for (long double v : row) frob += v * v;
  frob = std::sqrt(frob);
  const double refine_margin =
      1e-9 + static_cast<double>(64.0L * 1e-19L * frob);

  struct Candidate {
    double value;
    std::vector<int> supp;
  };
  struct Local {
    double best = std::numeric_limits<double>::infinity();
    std::vector<Candidate> cands;
  };
  std::vector<Local> acc(64);

  detail::run_partitioned(total, workers, [&](int id, std::uint64_t lo, std::uint64_t hi) {
    if (lo >= hi) return;
    Local& L = acc[static_cast<std::size_t>(id)];
    std::vector<int> comb = unrank_combination(3 * n, kbud, lo);
    for (std::uint64_t r = lo; r < hi; ++r) {
      const EigResult eig = jacobi_eigensolve(detail::submatrix_ld(gl, comb));
      const double lam = eig.values.front();
      if (lam < L.best) L.best = lam;
      if (lam <= L.best + refine_margin) {
        L.cands.push_back({lam, comb});
        if (L.cands.size() > 4096) {  // prune against the improved local best
          std::vector<Candidate> keep;
          for (auto& c : L.cands)
            if (c.value <= L.best + refine_margin) keep.push_back(std::move(c));
          L.cands.swap(keep);
        }
      }
      if (r + 1 < hi) next_combination(comb, x_tilde.cols);
    }
  });

  double global_best = std::numeric_limits<double>::infinity();
  for (const auto& L : acc) global_best = std::min(global_best, L.best);
  std::vector<Candidate> cands;
  for (const auto& L : acc)
    for (const auto& c : L.cands)
      if (c.value <= global_best + refine_margin) cands.push_back(c);
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    return detail::support_less(a.supp, b.supp);
  });

  // Exact refinement of every near-tied support; the winner is decided on
  // exact Rayleigh quotients, ties on lexicographic support order.
  bool have = false;
  Rat best_lam;
  std::vector<int> best_supp;
  std::vector<double> best_vec;
  for (const auto& c : cands) {
    RatMatrix gs(static_cast<int>(c.supp.size()), static_cast<int>(c.supp.size()));
    for (std::size_t i = 0; i < c.supp.size(); ++i)
      for (std::size_t j = 0; j < c.supp.size(); ++j)
        gs.at(static_cast<int>(i), static_cast<int>(j)) = g.at(c.supp[i], c.supp[j]);
    const EigResult eig = jacobi_eigensolve(detail::submatrix_ld(gl, c.supp));
    const Rat lam = min_eig_refine(gs, eig.vectors.front());
    if (!have || lam < best_lam) {
      have = true;
      best_lam = lam;
      best_supp = c.supp;
      best_vec = eig.vectors.front();
    }
  }

  MinimizerReport rep;
  rep.n = n;
  rep.support_budget = kbud;
  rep.support = best_supp;
  rep.objective_exact = Rat(2 * n) * best_lam;
  rep.objective = rat_to_double(rep.objective_exact);

  // Scale the (unit) eigenvector to squared norm 2n and fix the sign.
  std::vector<double> w(static_cast<std::size_t>(3 * n), 0.0);
  double nrm = 0;
  for (double v : best_vec) nrm += v * v;
  const double scale = std::sqrt(2.0 * n / (nrm > 0 ? nrm : 1.0));
  for (std::size_t i = 0; i < best_supp.size(); ++i)
    w[static_cast<std::size_t>(best_supp[i])] = best_vec[i] * scale;
  double vmean = 0;
  for (int i = 2 * n; i < 3 * n; ++i) vmean += w[static_cast<std::size_t>(i)];
  vmean /= n;
  if (vmean < 0) {
    for (double& y : w) y = -y;
  } else if (vmean == 0) {
    detail::sign_normalize_first_positive(w);
  }
  rep.w = w;
  rep.w_plus.assign(w.begin(), w.begin() + n);
  rep.w_minus.assign(w.begin() + n, w.begin() + 2 * n);
  rep.v.assign(w.begin() + 2 * n, w.end());
  rep.v_bar = 0;
  for (double y : rep.v) rep.v_bar += y;
  rep.v_bar /= n;
  return rep;
}

constexpr double kZeroTolerance = 1e-7;

struct GoodBadReport {
  std::vector<bool> variable_good;  // size n
  std::vector<bool> clause_good;    // size m
  int bad_clause_count = 0;
  int both_nonzero_vars = 0;  // variables with w+ and w- both nonzero
  int both_zero_vars = 0;     // variables with w+ and w- both zero
};

// A variable is good when exactly one of its two coordinates vanishes (at the
// zero tolerance) and the surviving one lies in (2/3, 4/3); clause j is good
// when all its variables are good and the j-th tail coordinate lies in
// (5/6, 7/6).
inline GoodBadReport classify_good_bad(const MinimizerReport& rep, const E13Instance& inst) {
  const int n = rep.n;
  if (inst.num_vars != n) throw input_error("minimizer and instance sizes differ");
  GoodBadReport out;
  out.variable_good.assign(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    const double wp = rep.w_plus[static_cast<std::size_t>(i)];
    const double wm = rep.w_minus[static_cast<std::size_t>(i)];
    const bool zp = std::fabs(wp) <= kZeroTolerance;
    const bool zm = std::fabs(wm) <= kZeroTolerance;
    if (!zp && !zm) ++out.both_nonzero_vars;
    if (zp && zm) ++out.both_zero_vars;
    if (zp == zm) continue;
    const double live = std::fabs(zp ? wm : wp);
    out.variable_good[static_cast<std::size_t>(i)] = live > 2.0 / 3.0 && live < 4.0 / 3.0;
  }
  out.clause_good.assign(inst.clauses.size(), false);
  for (std::size_t j = 0; j < inst.clauses.size(); ++j) {
    bool good = true;
    for (int v : inst.clauses[j]) good = good && out.variable_good[static_cast<std::size_t>(v - 1)];
    const double vj = rep.v[j];
    good = good && vj > 5.0 / 6.0 && vj < 7.0 / 6.0;
    out.clause_good[j] = good;
    if (!good) ++out.bad_clause_count;
  }
  return out;
}

// Row/column L1 bound on the squared operator norm, exact.
inline Rat schur_bound_sq_exact(const RatMatrix& x) {
  Rat rmax = 0, cmax = 0;
  for (int r = 0; r < x.rows; ++r) {
    Rat s = 0;
    for (int c = 0; c < x.cols; ++c) s += rat_abs(x.at(r, c));
    rmax = std::max(rmax, s);
  }
  for (int c = 0; c < x.cols; ++c) {
    Rat s = 0;
    for (int r = 0; r < x.rows; ++r) s += rat_abs(x.at(r, c));
    cmax = std::max(cmax, s);
  }
  return rmax * cmax;
}

inline double schur_bound(const RatMatrix& x) {
  return std::sqrt(rat_to_double(schur_bound_sq_exact(x)));
}

// ---- report serialization ----------------------------------------------------

inline nlohmann::ordered_json rip_report_to_json(const RipReport& r) {
  nlohmann::ordered_json j;
  j["k"] = r.k;
  j["min_restricted_eig"] = r.min_restricted_eig;
  j["max_restricted_eig"] = r.max_restricted_eig;
  j["delta_star"] = r.delta_star;
  j["tolerance"] = r.tolerance;
  j["witness_support_min"] = r.witness_support_min;
  j["witness_support_max"] = r.witness_support_max;
  j["witness_vector"] = r.witness_vector;
  return j;
}

inline RipReport rip_report_from_json(const nlohmann::json& j) {
  RipReport r;
  try {
    r.k = j.at("k").get<int>();
    r.min_restricted_eig = j.at("min_restricted_eig").get<double>();
    r.max_restricted_eig = j.at("max_restricted_eig").get<double>();
    r.delta_star = j.at("delta_star").get<double>();
    r.tolerance = j.at("tolerance").get<double>();
    r.witness_support_min = j.at("witness_support_min").get<std::vector<int>>();
    r.witness_support_max = j.at("witness_support_max").get<std::vector<int>>();
    r.witness_vector = j.at("witness_vector").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("bad restricted-isometry report: ") + e.what());
  }
  return r;
}

inline nlohmann::ordered_json minimizer_report_to_json(const MinimizerReport& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["support_budget"] = r.support_budget;
  j["objective"] = r.objective;
  j["objective_exact"] = rat_str(r.objective_exact);
  j["support"] = r.support;
  j["w"] = r.w;
  j["w_plus"] = r.w_plus;
  j["w_minus"] = r.w_minus;
  j["v"] = r.v;
  j["v_bar"] = r.v_bar;
  return j;
}

}  // namespace ripcert
