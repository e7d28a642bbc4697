// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its own tolerances; "exact" means equality of
// arbitrary-precision rationals.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "ripcert/construction.hpp"
#include "ripcert/generate.hpp"
#include "ripcert/prng.hpp"
#include "ripcert/reduction.hpp"
#include "ripcert/rip.hpp"
#include "ripcert/sat.hpp"
#include "ripcert/spectral.hpp"
#include "ripcert/transforms.hpp"

namespace {

using namespace ripcert;

std::vector<std::string> details;

void note(std::string line) { details.push_back(std::move(line)); }

bool expect(bool cond, const std::string& what) {
  if (!cond) note(what);
  return cond;
}

RatMatrix random_matrix(int rows, int cols, Prng& rng, long denom, long spread) {
  RatMatrix m(rows, cols);
  for (auto& e : m.data)
    e = rat_of(static_cast<long>(rng.bounded(static_cast<std::uint64_t>(2 * spread + 1))) - spread,
               denom);
  return m;
}

E13Instance random_satisfiable_e13(int n, std::uint64_t& seed) {
  for (;;) {
    const E13Instance inst = gen_e13(n, seed++);
    if (max_val(inst).value == 1) return inst;
  }
}

// 1. Exact assignment-value identity and bounds over all assignments.
bool criterion1() {
  const ReductionParams params = make_params(Rat(1, 5), Rat(1, 200));
  const Rat eps_sq = params.eps * params.eps;
  bool ok = true;
  for (int n = 1; n <= 8 && ok; ++n) {
    for (std::uint64_t trial = 0; trial < 3 && ok; ++trial) {
      const E13Instance inst = gen_e13(n, 977 * trial + static_cast<std::uint64_t>(n));
      const RatMatrix x_tilde = build_reduction_matrix(inst, params);
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n) && ok; ++mask) {
        const Assignment a = detail::assignment_from_mask(mask, n);
        const std::vector<Rat> u = assignment_vector(n, a);
        const Rat direct = norm_sq(matvec(x_tilde, u));
        const AssignmentValue av = assignment_value_exact(inst, params, a);
        const Rat lo = Rat(n) + eps_sq * av.unsat_count;
        const Rat hi = Rat(n) + 4 * eps_sq * av.unsat_count;
        const std::string at = "n=" + std::to_string(n) + " trial=" + std::to_string(trial) +
                               " mask=" + std::to_string(mask);
        ok = expect(direct == av.value, "identity mismatch at " + at) &&
             expect(av.value >= lo && av.value <= hi, "bounds violated at " + at) &&
             expect((av.value == lo) == av.lower_bound_equality,
                    "lower-bound equality flag wrong at " + at);
      }
    }
  }
  return ok;
}

// 2. Satisfiable instances: sparse minimum n within 1e-9*n, scaled restricted
//    minimum eigenvalue xi^2/18 within 1e-9 at sparsity 2n.
bool criterion2() {
  const ReductionParams params = make_params(Rat(1, 5), Rat(1, 32000));
  const double target = rat_to_double(params.xi * params.xi / 18);
  std::uint64_t seed = 1;
  bool ok = true;
  for (int found = 0; found < 20 && ok; ++found) {
    const int n = 2 + static_cast<int>(found % 4);
    const E13Instance inst = random_satisfiable_e13(n, seed);
    const RatMatrix x_tilde = build_reduction_matrix(inst, params);
    const MinimizerReport mini = sparse_minimizer(x_tilde, n, params.xi);
    const std::string at = "instance " + std::to_string(found) + " (n=" + std::to_string(n) + ")";
    ok = expect(std::fabs(mini.objective - n) <= 1e-9 * n,
                "sparse minimum " + std::to_string(mini.objective) + " misses " +
                    std::to_string(n) + " at " + at);
    if (!ok) break;
    const RatMatrix x = scaled_reduction_matrix(x_tilde, params);
    const RipReport rep = restricted_extremes(x, 2 * n);
    ok = expect(std::fabs(rep.min_restricted_eig - target) <= 1e-9,
                "restricted minimum " + std::to_string(rep.min_restricted_eig) +
                    " misses xi^2/18 at " + at);
  }
  return ok;
}

// 3. Operator-norm bound: exact rational Schur bound <= 3/xi for every
//    constructed matrix; Schur dominates the true norm on random matrices.
bool criterion3() {
  bool ok = true;
  const Rat xis[] = {Rat(1, 5), Rat(1, 200), Rat(1, 32000)};
  for (int n = 1; n <= 6 && ok; ++n) {
    const E13Instance inst = gen_e13(n, 31 + static_cast<std::uint64_t>(n));
    for (const Rat& xi : xis) {
      const ReductionParams params = make_params(Rat(1, 5), xi);
      const RatMatrix x_tilde = build_reduction_matrix(inst, params);
      ok = ok && expect(schur_bound_sq_exact(x_tilde) <= Rat(9) / (xi * xi),
                        "Schur bound exceeded 9/xi^2 at n=" + std::to_string(n) +
                            " xi=" + rat_str(xi));
    }
  }
  Prng rng(107);
  for (int trial = 0; trial < 100 && ok; ++trial) {
    const RatMatrix m = random_matrix(6, 6, rng, 8, 8);
    ok = expect(schur_bound(m) >= operator_norm(m) - 1e-6,
                "Schur bound fell below the operator norm at trial " + std::to_string(trial));
  }
  return ok;
}

// 4. Minimizer lemma suite at eps = 1/5, xi = 1/200, 1e-9 slack.
bool criterion4() {
  const ReductionParams params = make_params(Rat(1, 5), Rat(1, 200));
  const double xi = rat_to_double(params.xi);
  const double eps = rat_to_double(params.eps);
  const double slack = 1e-9;
  bool ok = true;
  for (std::uint64_t trial = 0; trial < 20 && ok; ++trial) {
    const int n = 2 + static_cast<int>(trial % 4);
    const E13Instance inst = gen_e13(n, 4242 + trial);
    const RatMatrix x_tilde = build_reduction_matrix(inst, params);
    const MinimizerReport mini = sparse_minimizer(x_tilde, n, params.xi);
    const GoodBadReport gb = classify_good_bad(mini, inst);
    const std::string at = "trial " + std::to_string(trial) + " (n=" + std::to_string(n) + ")";

    double var_v = 0;
    for (double v : mini.v) var_v += (v - mini.v_bar) * (v - mini.v_bar);
    double var_c = 0;
    for (int i = 0; i < n; ++i) {
      const double c = mini.w_plus[static_cast<std::size_t>(i)] +
                       mini.w_minus[static_cast<std::size_t>(i)] - mini.v_bar;
      var_c += c * c;
    }
    double mass = 0;
    for (double w : mini.w_plus) mass += w * w;
    for (double w : mini.w_minus) mass += w * w;
    const int ij = gb.both_nonzero_vars + gb.both_zero_vars;
    const long bad_cap = static_cast<long>(std::floor(1284.0 * xi * xi * n));

    ok = expect(var_v < 2 * xi * xi * n + slack, "tail variance bound failed at " + at) &&
         expect(var_c < 8 * xi * xi * n + slack, "coupling variance bound failed at " + at) &&
         expect(mini.v_bar * mini.v_bar > 1 - 3 * eps * eps - slack,
                "mean lower bound failed at " + at) &&
         expect(ij < 38 * xi * xi * n + slack, "degenerate-support bound failed at " + at) &&
         expect(mass > (1 - 25 * xi) * n - slack, "mass lower bound failed at " + at) &&
         expect(gb.bad_clause_count <= bad_cap, "bad-clause cap failed at " + at);
  }
  return ok;
}

// 5. Gadget reduction: counts, 6-boundedness, satisfiability preservation, and
//    the per-assignment factor-5 blame bound, exhaustively over all
//    2^(2n+4m) assignments of the reduced instance.
bool criterion5() {
  Prng pick(555);
  bool ok = true;
  for (int trial = 0; trial < 50 && ok; ++trial) {
    const int n = 3 + static_cast<int>(pick.bounded(2));
    const int m = 1 + static_cast<int>(pick.bounded(3));
    const Cnf3Instance src = gen_3cnf(n, m, 9000 + static_cast<std::uint64_t>(trial));
    const ReductionResult red = reduce(src);
    const std::string at = "trial " + std::to_string(trial) + " (n=" + std::to_string(n) +
                           ", m=" + std::to_string(m) + ")";

    ok = expect(red.target.num_vars == 2 * n + 4 * m, "variable count wrong at " + at) &&
         expect(static_cast<int>(red.target.clauses.size()) == 3 * m + n,
                "clause count wrong at " + at) &&
         expect(check_bounded(red.target, 6).ok, "6-occurrence bound broken at " + at);
    if (!ok) break;

    // bit i-1 of a mask holds reduced variable i
    const int nv = red.target.num_vars;
    std::vector<std::uint32_t> clause_masks;
    clause_masks.reserve(red.target.clauses.size());
    for (const auto& cl : red.target.clauses) {
      std::uint32_t cm = 0;
      for (int v : cl) cm |= std::uint32_t{1} << (v - 1);
      clause_masks.push_back(cm);
    }
    struct SrcLit {
      int wbit, ybit;
      bool neg;
    };
    std::vector<std::array<SrcLit, 3>> src_lits;
    src_lits.reserve(src.clauses.size());
    for (const auto& cl : src.clauses) {
      std::array<SrcLit, 3> row;
      for (int t = 0; t < 3; ++t)
        row[static_cast<std::size_t>(t)] = {red.map.w[static_cast<std::size_t>(cl[static_cast<std::size_t>(t)].var - 1)] - 1,
                                            red.map.y[static_cast<std::size_t>(cl[static_cast<std::size_t>(t)].var - 1)] - 1,
                                            cl[static_cast<std::size_t>(t)].neg};
      src_lits.push_back(row);
    }

    int best_satisfied = 0;
    bool blame_ok = true;
    const int mt = static_cast<int>(clause_masks.size());
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << nv); ++mask) {
      int sat_t = 0;
      for (const std::uint32_t cm : clause_masks)
        sat_t += __builtin_popcount(mask & cm) == 1;
      if (sat_t > best_satisfied) best_satisfied = sat_t;
      int unsat_s = 0;
      for (const auto& row : src_lits) {
        bool any = false;
        for (const SrcLit& l : row) {
          const bool lifted = ((mask >> l.wbit) & 1u) != 0 && ((mask >> l.ybit) & 1u) == 0;
          any = any || (lifted != l.neg);
        }
        unsat_s += !any;
      }
      if (unsat_s > 5 * (mt - sat_t)) {
        blame_ok = false;
        note("factor-5 blame bound broken at " + at + ", mask " + std::to_string(mask));
        break;
      }
    }
    ok = expect(blame_ok, "per-assignment blame bound failed at " + at);
    if (ok && max_val_cnf(src).value == 1)
      ok = expect(best_satisfied == mt, "satisfiability not preserved at " + at);
  }
  return ok;
}

// 6. Transforms: exact stacking identity, QR per-vector guarantee on 1000 unit
//    vectors per matrix, block-diagonal max rule at 1e-9.
bool criterion6() {
  Prng rng(606);
  bool ok = true;
  for (int trial = 0; trial < 20 && ok; ++trial) {
    const RatMatrix x = random_matrix(3, 3, rng, 8, 8);
    const ShiftResult down = shift_delta_down(x, Rat(1, 2), Rat(1, 4), Rat(3, 2));
    const Rat mu_sq = down.params.mu * down.params.mu;
    const Rat nu_sq = down.params.nu * down.params.nu;
    for (int rep = 0; rep < 5 && ok; ++rep) {
      std::vector<Rat> u(3);
      for (auto& e : u) e = rat_of(static_cast<long>(rng.bounded(17)) - 8, 8);
      ok = expect(norm_sq(matvec(down.x, u)) ==
                      mu_sq * norm_sq(matvec(x, u)) + nu_sq * norm_sq(u),
                  "stacking identity broke at trial " + std::to_string(trial));
    }
  }

  const double tau = 1e-9;
  for (int trial = 0; trial < 20 && ok; ++trial) {
    const RatMatrix x = random_matrix(6, 4, rng, 16, 4);  // entries within 1/4
    const RatMatrix r = squarify(x, tau);
    const DMatrix xd = to_double_matrix(x);
    const DMatrix rd = to_double_matrix(r);
    for (int vec = 0; vec < 1000 && ok; ++vec) {
      double u[4], nrm = 0;
      for (double& c : u) {
        c = 2.0 * rng.unit_real() - 1.0;
        nrm += c * c;
      }
      if (nrm == 0) continue;
      nrm = std::sqrt(nrm);
      for (double& c : u) c /= nrm;
      double xu = 0, ru = 0;
      for (int i = 0; i < 6; ++i) {
        double s = 0;
        for (int j = 0; j < 4; ++j) s += xd.at(i, j) * u[j];
        xu += s * s;
      }
      for (int i = 0; i < 4; ++i) {
        double s = 0;
        for (int j = 0; j < 4; ++j) s += rd.at(i, j) * u[j];
        ru += s * s;
      }
      ok = expect(std::fabs(xu - ru) <= tau, "QR guarantee missed tau at trial " +
                                                 std::to_string(trial) + ", vector " +
                                                 std::to_string(vec));
    }
  }

  for (int trial = 0; trial < 20 && ok; ++trial) {
    const RatMatrix a = random_matrix(5, 4, rng, 10, 10);
    const RatMatrix b = random_matrix(4, 3, rng, 10, 10);
    const RatMatrix x = block_diag(a, b);
    for (int k = 1; k <= 3 && ok; ++k) {
      const double expected = std::max(rip_delta(a, k), rip_delta(b, k));
      ok = expect(std::fabs(rip_delta(x, k) - expected) <= 1e-9,
                  "block-diagonal max rule failed at trial " + std::to_string(trial) +
                      ", k=" + std::to_string(k));
    }
  }
  return ok;
}

// 7. Oracle self-consistency: monotone defect, threshold equivalence, and
//    worker-count independence (byte-identical serialized reports).
bool criterion7() {
  Prng rng(707);
  bool ok = true;
  for (int trial = 0; trial < 20 && ok; ++trial) {
    const RatMatrix x = random_matrix(4, 6, rng, 10, 10);
    double prev = 0.0;
    for (int k = 1; k <= 6 && ok; ++k) {
      const double d = rip_delta(x, k);
      ok = expect(d >= prev - 1e-12, "defect decreased in k at trial " + std::to_string(trial));
      prev = d;
    }
    if (!ok) break;
    const int k = 1 + static_cast<int>(rng.bounded(4));
    const double d = rip_delta(x, k);
    for (const Rat& delta : {Rat(1, 10), Rat(1, 2), Rat(9, 10)}) {
      ok = ok && expect(is_rip(x, k, delta) == (d <= rat_to_double(delta) + kEigTolerance),
                        "membership disagreed with the defect threshold at trial " +
                            std::to_string(trial));
    }
    if (!ok) break;
    const auto solo = rip_report_to_json(restricted_extremes(x, 3, kDefaultSubsetBudget, 1));
    const auto quad = rip_report_to_json(restricted_extremes(x, 3, kDefaultSubsetBudget, 4));
    ok = expect(solo.dump() == quad.dump(),
                "worker count changed the report at trial " + std::to_string(trial));
  }
  return ok;
}

struct Criterion {
  const char* label;
  bool (*fn)();
};

}  // namespace

int main() {
  const Criterion table[] = {
      {"criterion 1: exact assignment-value identity and bounds (n <= 8, all assignments)",
       criterion1},
      {"criterion 2: satisfiable minimum n +/- 1e-9*n and scaled eigenvalue xi^2/18 +/- 1e-9",
       criterion2},
      {"criterion 3: exact Schur bound <= 3/xi and Schur >= operator norm - 1e-6", criterion3},
      {"criterion 4: minimizer lemma suite at eps=1/5, xi=1/200 with 1e-9 slack", criterion4},
      {"criterion 5: gadget reduction counts, bound, preservation, factor-5 blame (exhaustive)",
       criterion5},
      {"criterion 6: stacking identity exact, QR guarantee 1e-9, block max rule 1e-9",
       criterion6},
      {"criterion 7: monotone defect, threshold equivalence, worker independence", criterion7},
  };
  int failures = 0;
  for (const Criterion& c : table) {
    details.clear();
    bool ok = false;
    try {
      ok = c.fn();
    } catch (const std::exception& e) {
      note(std::string("unhandled exception: ") + e.what());
    }
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", c.label);
    if (!ok) {
      ++failures;
      for (const std::string& line : details) std::printf("       %s\n", line.c_str());
    }
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
