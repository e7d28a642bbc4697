// Spectral kernels (Jacobi, exact refinement, QR) and the brute-force
// restricted-isometry oracle built on them.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "ripcert/construction.hpp"
#include "ripcert/prng.hpp"
#include "ripcert/rip.hpp"
#include "ripcert/spectral.hpp"
#include "ripcert/subsets.hpp"

using namespace ripcert;

namespace {

RatMatrix random_matrix(int rows, int cols, Prng& rng, long denom = 8) {
  RatMatrix m(rows, cols);
  for (auto& e : m.data)
    e = rat_of(static_cast<long>(rng.bounded(2 * denom + 1)) - denom, denom);
  return m;
}

RatMatrix diag(std::vector<Rat> d) {
  RatMatrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i)
    m.at(static_cast<int>(i), static_cast<int>(i)) = d[i];
  return m;
}

RatMatrix one_one_zero_zero() {
  RatMatrix x(2, 2);
  x.at(0, 0) = 1;
  x.at(0, 1) = 1;
  return x;
}

E13Instance satisfiable_pair() {
  E13Instance inst;
  inst.num_vars = 2;
  inst.clauses = {{1}, {2}};
  return inst;
}

}  // namespace

TEST_CASE("Jacobi matches closed forms up to 3x3", "[spectral]") {
  RatMatrix a1(1, 1);
  a1.at(0, 0) = 5;
  const EigResult e1 = jacobi_eigensolve(a1);
  CHECK(e1.values == std::vector<double>{5.0});

  RatMatrix a2(2, 2);
  a2.at(0, 0) = 2; a2.at(0, 1) = 1;
  a2.at(1, 0) = 1; a2.at(1, 1) = 3;
  const EigResult e2 = jacobi_eigensolve(a2);
  const double root = std::sqrt(5.0);
  CHECK(e2.values[0] == Catch::Approx((5.0 - root) / 2).margin(1e-13));
  CHECK(e2.values[1] == Catch::Approx((5.0 + root) / 2).margin(1e-13));

  // 3I - ones: eigenvalues 0 (ones direction) and 3 (twice)
  RatMatrix a3(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a3.at(i, j) = (i == j ? Rat(3) : Rat(0)) - 1;
  const EigResult e3 = jacobi_eigensolve(a3);
  CHECK(e3.values[0] == Catch::Approx(0.0).margin(1e-13));
  CHECK(e3.values[1] == Catch::Approx(3.0).margin(1e-13));
  CHECK(e3.values[2] == Catch::Approx(3.0).margin(1e-13));

  CHECK_THROWS_AS(jacobi_eigensolve(RatMatrix(2, 3)), input_error);
}

TEST_CASE("Jacobi eigenpairs satisfy the defining identity", "[spectral]") {
  Prng rng(55);
  const RatMatrix g = gram(random_matrix(5, 4, rng));
  const detail::LMatrix gl = detail::to_ldouble_full(g);
  const EigResult eig = jacobi_eigensolve(g);
  for (std::size_t k = 0; k < eig.values.size(); ++k) {
    double resid = 0, nrm = 0;
    for (std::size_t i = 0; i < gl.size(); ++i) {
      double row = 0;
      for (std::size_t j = 0; j < gl.size(); ++j)
        row += static_cast<double>(gl[i][j]) * eig.vectors[k][j];
      const double r = row - eig.values[k] * eig.vectors[k][i];
      resid += r * r;
      nrm += eig.vectors[k][i] * eig.vectors[k][i];
    }
    CHECK(std::sqrt(resid) <= 1e-10 * (1.0 + std::fabs(eig.values[k])));
    CHECK(std::sqrt(nrm) == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("exact linear solve and Rayleigh quotients", "[spectral]") {
  RatMatrix a(2, 2);
  a.at(0, 0) = 2; a.at(0, 1) = 1;
  a.at(1, 0) = 1; a.at(1, 1) = 3;
  const auto x = solve_linear_exact(a, {Rat(1), Rat(2)});
  REQUIRE(x.has_value());
  CHECK((*x)[0] == Rat(1, 5));
  CHECK((*x)[1] == Rat(3, 5));

  RatMatrix sing(2, 2);
  sing.at(0, 0) = 1; sing.at(0, 1) = 2;
  sing.at(1, 0) = 2; sing.at(1, 1) = 4;
  CHECK_FALSE(solve_linear_exact(sing, {Rat(1), Rat(1)}).has_value());

  CHECK(rayleigh_exact(a, {Rat(1), Rat(0)}) == 2);
  CHECK_THROWS_AS(rayleigh_exact(a, {Rat(0), Rat(0)}), input_error);
}

TEST_CASE("exact minimum-eigenvalue refinement", "[spectral]") {
  // diagonal case: the seed is already the eigenvector, result exact
  const RatMatrix d = diag({Rat(2), Rat(3)});
  CHECK(min_eig_refine(d, {1.0, 0.0}) == 2);

  // rank-one Gram: true minimum is exactly zero; the refined Rayleigh
  // quotient is a tight upper bound and never goes negative on a PSD matrix
  const RatMatrix g = gram(one_one_zero_zero());
  const Rat lam = min_eig_refine(g, {0.70710678, -0.70710678});
  CHECK(lam >= 0);
  CHECK(lam < Rat(1, 1000000000000L));
}

TEST_CASE("independent power oracle agrees with Jacobi on construction Grams", "[spectral]") {
  const ReductionParams params = make_params(Rat(1, 5), Rat(1, 20));
  const RatMatrix x_tilde = build_reduction_matrix(satisfiable_pair(), params);
  const RatMatrix g = gram(x_tilde);
  const detail::LMatrix gl = detail::to_ldouble_full(g);

  std::vector<int> supp = {0, 1, 2, 3};
  for (int last = 4; last < 6; ++last) {
    supp[3] = last;
    const detail::LMatrix sub = detail::submatrix_ld(gl, supp);
    const double jac = jacobi_eigensolve(sub).values.front();
    const double pow = min_eig_power_oracle(sub);
    CHECK(jac == Catch::Approx(pow).margin(1e-9));
  }
}

TEST_CASE("operator norm closed forms", "[spectral]") {
  CHECK(operator_norm(rat_identity(3)) == Catch::Approx(1.0).margin(1e-12));
  CHECK(operator_norm(diag({Rat(3)})) == Catch::Approx(3.0).margin(1e-12));
  RatMatrix shear(2, 2);
  shear.at(0, 0) = 1; shear.at(0, 1) = 2;
  shear.at(1, 1) = 1;
  CHECK(operator_norm(shear) == Catch::Approx(1.0 + std::sqrt(2.0)).margin(1e-9));
}

TEST_CASE("Schur bound closed forms and domination", "[spectral][rip]") {
  CHECK(schur_bound_sq_exact(rat_identity(4)) == 1);
  RatMatrix shear(2, 2);
  shear.at(0, 0) = 1; shear.at(0, 1) = 2;
  shear.at(1, 1) = 1;
  CHECK(schur_bound_sq_exact(shear) == 9);  // rows (3,1), cols (1,3)
  CHECK(schur_bound(shear) == Catch::Approx(3.0).margin(1e-12));

  Prng rng(60);
  for (int trial = 0; trial < 20; ++trial) {
    const RatMatrix m = random_matrix(6, 6, rng);
    CHECK(schur_bound(m) >= operator_norm(m) - 1e-6);
  }
}

TEST_CASE("Householder QR: fixed point, single column, reconstruction", "[spectral]") {
  DMatrix upper(3, 3);
  upper.mode = MatrixMode::floating;
  upper.at(0, 0) = 1.5; upper.at(0, 1) = -2.0; upper.at(0, 2) = 0.25;
  upper.at(1, 1) = 0.75; upper.at(1, 2) = 3.0;
  upper.at(2, 2) = 0.0;
  const DMatrix r = householder_upper_factor(upper);
  CHECK(r.data == upper.data);  // bit-exact reproduction

  DMatrix col(2, 1);
  col.at(0, 0) = 0.6;
  col.at(1, 0) = 0.8;
  const QrResult qr1 = householder_qr(col);
  CHECK(qr1.r.at(0, 0) == Catch::Approx(1.0).margin(1e-14));
  CHECK(qr1.q.at(0, 0) == Catch::Approx(0.6).margin(1e-14));
  CHECK(qr1.q.at(1, 0) == Catch::Approx(0.8).margin(1e-14));

  Prng rng(71);
  for (int trial = 0; trial < 5; ++trial) {
    const DMatrix x = to_double_matrix(random_matrix(6, 4, rng));
    const QrResult qr = householder_qr(x);
    for (int i = 0; i < 4; ++i) {
      CHECK(qr.r.at(i, i) >= 0.0);
      for (int j = 0; j < i; ++j) CHECK(qr.r.at(i, j) == 0.0);
    }
    // Q^T Q = I and Q R = X
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double dot = 0;
        for (int rr = 0; rr < 6; ++rr) dot += qr.q.at(rr, i) * qr.q.at(rr, j);
        CHECK(dot == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-12));
      }
    for (int rr = 0; rr < 6; ++rr)
      for (int c = 0; c < 4; ++c) {
        double dot = 0;
        for (int k = 0; k <= c; ++k) dot += qr.q.at(rr, k) * qr.r.at(k, c);
        CHECK(dot == Catch::Approx(x.at(rr, c)).margin(1e-12));
      }
  }

  CHECK_THROWS_AS(householder_qr(DMatrix(2, 3)), construction_error);
}

TEST_CASE("restricted extremes on canonical matrices", "[rip]") {
  for (int k = 1; k <= 3; ++k) {
    const RipReport rep = restricted_extremes(rat_identity(3), k);
    CHECK(rep.min_restricted_eig == 1.0);
    CHECK(rep.max_restricted_eig == 1.0);
    CHECK(rep.delta_star == 0.0);
    CHECK(static_cast<int>(rep.witness_support_min.size()) == k);
  }

  const RipReport two = restricted_extremes(one_one_zero_zero(), 2);
  CHECK(two.min_restricted_eig == 0.0);
  CHECK(two.max_restricted_eig == 2.0);
  CHECK(two.delta_star == 1.0);
  CHECK(two.witness_support_min == std::vector<int>{0, 1});
  // witness lives on the support, has unit norm, first nonzero positive
  CHECK(two.witness_vector[0] == Catch::Approx(std::sqrt(0.5)).margin(1e-12));
  CHECK(two.witness_vector[0] + two.witness_vector[1] == Catch::Approx(0.0).margin(1e-12));

  RatMatrix tall(3, 2);
  tall.at(0, 0) = 1;
  tall.at(1, 1) = 1;
  CHECK(restricted_extremes(tall, 1).delta_star == 0.0);

  CHECK_THROWS_AS(restricted_extremes(rat_identity(3), 0), input_error);
  CHECK_THROWS_AS(restricted_extremes(rat_identity(3), 4), input_error);
}

TEST_CASE("defect of a stretched diagonal", "[rip]") {
  CHECK(rip_delta(diag({Rat(1, 2), Rat(2)}), 1) == 3.0);  // eigs 1/4 and 4
}

TEST_CASE("defect is nondecreasing in sparsity", "[rip]") {
  Prng rng(81);
  for (int trial = 0; trial < 5; ++trial) {
    const RatMatrix x = random_matrix(4, 6, rng, 10);
    double prev = 0.0;
    for (int k = 1; k <= 6; ++k) {
      const double d = rip_delta(x, k);
      CHECK(d >= prev - 1e-12);
      prev = d;
    }
  }
}

TEST_CASE("largest admissible sparsity", "[rip]") {
  CHECK(rip_max_k(rat_identity(4), Rat(1, 10)) == 4);
  CHECK(rip_max_k(one_one_zero_zero(), Rat(1, 2)) == 1);

  Prng rng(82);
  const RatMatrix x = random_matrix(4, 5, rng, 10);
  CHECK(rip_max_k(x, Rat(1, 10)) <= rip_max_k(x, Rat(9, 10)));
}

TEST_CASE("membership matches the defect threshold", "[rip]") {
  CHECK(is_rip(rat_identity(2), 1, Rat(1, 10)));
  CHECK_FALSE(is_rip(one_one_zero_zero(), 2, Rat(1, 2)));

  Prng rng(83);
  for (int trial = 0; trial < 10; ++trial) {
    const RatMatrix x = random_matrix(4, 5, rng, 10);
    const int k = 1 + static_cast<int>(rng.bounded(3));
    const double d = rip_delta(x, k);
    for (const Rat& delta : {Rat(1, 10), Rat(1, 2), Rat(9, 10), Rat(3, 2)}) {
      CHECK(is_rip(x, k, delta) == (d <= rat_to_double(delta) + kEigTolerance));
    }
  }
}

TEST_CASE("gap decisions on canonical inputs", "[rip]") {
  CHECK(gap_decide(rat_identity(3), 2, Rat(1, 10), Rat(1), Rat(2)) == GapVerdict::IsRip);
  CHECK(gap_decide(one_one_zero_zero(), 2, Rat(1, 5), Rat(1), Rat(2)) ==
        GapVerdict::FarFromRip);  // delta*(2) = 1 > 2/5

  // defect 0.3111 at k=1: above delta = 1/4, below lambda2*delta = 3/8
  const RatMatrix mid = diag({Rat(83, 100), Rat(1)});
  CHECK(gap_decide(mid, 1, Rat(1, 4), Rat(1), Rat(3, 2)) == GapVerdict::Indeterminate);
  CHECK(gap_decide(mid, 1, Rat(1, 4), Rat(1), Rat(6, 5)) == GapVerdict::FarFromRip);

  // lambda1 shrinks the far-side sparsity: delta*(1) = 0 kills the far test
  CHECK(gap_decide(one_one_zero_zero(), 2, Rat(1, 5), Rat(2), Rat(2)) ==
        GapVerdict::Indeterminate);

  CHECK(std::string(to_string(GapVerdict::IsRip)) == "is-rip");
  CHECK(std::string(to_string(GapVerdict::FarFromRip)) == "far-from-rip");
  CHECK(std::string(to_string(GapVerdict::Indeterminate)) == "indeterminate");

  CHECK_THROWS_AS(gap_decide(mid, 1, Rat(0), Rat(1), Rat(2)), input_error);
  CHECK_THROWS_AS(gap_decide(mid, 1, Rat(1), Rat(1), Rat(2)), input_error);
  CHECK_THROWS_AS(gap_decide(mid, 1, Rat(1, 4), Rat(1, 2), Rat(2)), input_error);
  CHECK_THROWS_AS(gap_decide(mid, 1, Rat(1, 4), Rat(1), Rat(0)), input_error);
}

TEST_CASE("enumeration budgets produce capacity errors naming the count", "[rip]") {
  Prng rng(84);
  const RatMatrix x = random_matrix(4, 10, rng);
  CHECK_THROWS_MATCHES(restricted_extremes(x, 5, 10), capacity_error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("252") &&
                           Catch::Matchers::ContainsSubstring("budget of 10")));
}

TEST_CASE("sparse minimizer on the identity stand-in", "[rip]") {
  const MinimizerReport rep = sparse_minimizer(rat_identity(3), 1, Rat(1, 10));
  CHECK(rep.support_budget == 2);
  CHECK(rep.objective_exact == 2);  // 2n times the unit eigenvalue
  CHECK(rep.objective == 2.0);
  CHECK(rep.support == std::vector<int>{0, 1});  // lexicographically smallest tie
  CHECK(rep.w[0] == Catch::Approx(std::sqrt(2.0)).margin(1e-12));
  CHECK(rep.v_bar == 0.0);

  CHECK_THROWS_AS(sparse_minimizer(rat_identity(4), 1, Rat(1, 10)), input_error);
  CHECK_THROWS_AS(sparse_minimizer(rat_identity(3), 1, Rat(2)), input_error);
}

TEST_CASE("sparse minimizer finds the assignment direction of satisfiable instances",
          "[rip]") {
  const ReductionParams params = make_params(Rat(1, 5), Rat(1, 200));
  const E13Instance inst = satisfiable_pair();
  const int n = inst.num_vars;
  const RatMatrix x_tilde = build_reduction_matrix(inst, params);
  const MinimizerReport rep = sparse_minimizer(x_tilde, n, params.xi);

  // the minimum hugs n from below (the v-block tilts slightly to shed
  // projector mass), and can never beat the all-false assignment bound
  CHECK(std::fabs(rep.objective - n) <= 1e-4 * n);
  CHECK(rep.objective_exact < n);
  CHECK(rep.objective_exact >= Rat(n) * (1 - params.xi * params.xi));
  CHECK(rep.objective_exact <= Rat(n) * (1 + params.eps * params.eps));
  CHECK(rep.v_bar >= 0.0);
  for (double vi : rep.v) CHECK(vi == Catch::Approx(1.0).margin(0.01));
  for (int i = 0; i < n; ++i) {
    const double live = std::max(std::fabs(rep.w_plus[i]), std::fabs(rep.w_minus[i]));
    const double dead = std::min(std::fabs(rep.w_plus[i]), std::fabs(rep.w_minus[i]));
    CHECK(live == Catch::Approx(1.0).margin(0.01));
    CHECK(dead <= 1e-7);
  }

  const GoodBadReport gb = classify_good_bad(rep, inst);
  CHECK(gb.bad_clause_count == 0);
  CHECK(gb.both_nonzero_vars == 0);
  CHECK(gb.both_zero_vars == 0);

  // membership at sparsity 2n fails for thresholds below the near-one defect
  const RatMatrix x = scaled_reduction_matrix(x_tilde, params);
  CHECK_FALSE(is_rip(x, 2 * n, Rat(1, 2)));
}

TEST_CASE("sparse minimizer agrees with a support-by-support power oracle", "[rip]") {
  const ReductionParams params = make_params(Rat(1, 5), Rat(1, 20));
  const E13Instance inst = satisfiable_pair();
  const RatMatrix x_tilde = build_reduction_matrix(inst, params);
  const RatMatrix g = gram(x_tilde);
  const detail::LMatrix gl = detail::to_ldouble_full(g);

  const int kbud = 4;  // floor(2*2*(1+1/400)) = 4 out of 6 columns
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> comb = {0, 1, 2, 3};
  do {
    best = std::min(best, min_eig_power_oracle(detail::submatrix_ld(gl, comb)));
  } while (next_combination(comb, 6));

  const MinimizerReport rep = sparse_minimizer(x_tilde, 2, params.xi);
  CHECK(rep.support_budget == kbud);
  CHECK(rep.objective == Catch::Approx(4.0 * best).margin(1e-7));
}

TEST_CASE("good/bad classification on a fabricated minimizer", "[rip]") {
  MinimizerReport rep;
  rep.n = 3;
  rep.w_plus = {0.5, 1.0, 0.0};
  rep.w_minus = {0.5, 0.0, 0.0};
  rep.v = {1.0, 0.5, 1.0};
  E13Instance inst;
  inst.num_vars = 3;
  inst.clauses = {{1}, {2}, {3}};
  const GoodBadReport gb = classify_good_bad(rep, inst);
  CHECK(gb.variable_good == std::vector<bool>{false, true, false});
  CHECK(gb.both_nonzero_vars == 1);
  CHECK(gb.both_zero_vars == 1);
  // clause 1: bad variable; clause 2: good variable but v = 0.5; clause 3: bad variable
  CHECK(gb.clause_good == std::vector<bool>{false, false, false});
  CHECK(gb.bad_clause_count == 3);

  E13Instance mismatched;
  mismatched.num_vars = 2;
  CHECK_THROWS_AS(classify_good_bad(rep, mismatched), input_error);
}

TEST_CASE("worker count never changes the serialized reports", "[rip]") {
  Prng rng(90);
  for (int trial = 0; trial < 20; ++trial) {
    const RatMatrix x = random_matrix(4, 6, rng, 10);
    const int k = 2 + static_cast<int>(rng.bounded(2));
    const auto solo = rip_report_to_json(restricted_extremes(x, k, kDefaultSubsetBudget, 1));
    const auto quad = rip_report_to_json(restricted_extremes(x, k, kDefaultSubsetBudget, 4));
    REQUIRE(solo.dump() == quad.dump());
  }

  const ReductionParams params = make_params(Rat(1, 5), Rat(1, 200));
  const RatMatrix x_tilde = build_reduction_matrix(satisfiable_pair(), params);
  const auto solo = minimizer_report_to_json(sparse_minimizer(x_tilde, 2, params.xi, kDefaultSubsetBudget, 1));
  const auto trio = minimizer_report_to_json(sparse_minimizer(x_tilde, 2, params.xi, kDefaultSubsetBudget, 3));
  CHECK(solo.dump() == trio.dump());
}

TEST_CASE("restricted-isometry reports round-trip through JSON", "[rip]") {
  const RipReport rep = restricted_extremes(one_one_zero_zero(), 2);
  const auto j = rip_report_to_json(rep);
  const RipReport back = rip_report_from_json(j);
  CHECK(rip_report_to_json(back).dump() == j.dump());
  nlohmann::json broken = j;
  broken.erase("delta_star");
  CHECK_THROWS_AS(rip_report_from_json(broken), input_error);
}
