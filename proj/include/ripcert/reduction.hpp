#pragma once

// 3-CNF -> exactly-one reduction.
//
// Every source clause (a ∨ b ∨ c) becomes three exactly-one clauses over the
// positivized literals and four fresh padding variables:
//   E1(pos(a), z1, z2)   E1(pos(¬b), z1, z3)   E1(pos(¬c), z2, z4)
// where pos maps x_i to w_i and ¬x_i to y_i, plus one clause E1(w_i, y_i) per
// source variable. Output numbering is fixed: w_1..w_n, then y_1..y_n, then the
// four z's of each clause in source order; gadget clauses come first (three per
// source clause, in source order), then the per-variable clauses.

#include <array>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ripcert/errors.hpp"
#include "ripcert/rational.hpp"
#include "ripcert/sat.hpp"

namespace ripcert {

struct ReductionWitnessMap {
  int src_vars = 0;
  int src_clauses = 0;
  int out_vars = 0;     // 2n + 4m
  int out_clauses = 0;  // 3m + n
  std::vector<int> w;   // w[i-1]: output variable standing for x_i
  std::vector<int> y;   // y[i-1]: output variable standing for ¬x_i
  std::vector<std::array<int, 4>> z;               // per source clause
  std::vector<std::array<int, 3>> gadget_clauses;  // 1-based output clause indices
  std::vector<int> variable_clauses;               // 1-based, one per source variable
};

// The promise-gap bookkeeping: a source-side gap alpha' shrinks by the factor
// 18 across the reduction.
struct GapLedger {
  Rat alpha_prime;
  Rat alpha;
};

inline GapLedger make_gap_ledger(const Rat& alpha_prime) {
  if (alpha_prime < 0 || alpha_prime > 1)
    throw input_error("gap must lie in [0,1], got " + rat_str(alpha_prime));
  return {alpha_prime, Rat(alpha_prime / 18)};
}

struct ReductionResult {
  E13Instance target;
  ReductionWitnessMap map;
};

inline ReductionResult reduce(const Cnf3Instance& src) {
  const int n = src.num_vars;
  const int m = static_cast<int>(src.clauses.size());
  for (const auto& cl : src.clauses)
    for (const Lit& l : cl)
      if (l.var < 1 || l.var > n) throw input_error("literal out of range in source clause");

  ReductionResult out;
  ReductionWitnessMap& map = out.map;
  map.src_vars = n;
  map.src_clauses = m;
  map.out_vars = 2 * n + 4 * m;
  map.out_clauses = 3 * m + n;
  out.target.num_vars = map.out_vars;

  map.w.resize(n);
  map.y.resize(n);
  for (int i = 1; i <= n; ++i) {
    map.w[i - 1] = i;
    map.y[i - 1] = n + i;
  }
  const auto pos = [&](const Lit& l) { return l.neg ? map.y[l.var - 1] : map.w[l.var - 1]; };
  const auto sorted3 = [](int a, int b, int c) {
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    return std::vector<int>{a, b, c};
  };

  for (int j = 0; j < m; ++j) {
    const auto& cl = src.clauses[static_cast<std::size_t>(j)];
    const int zbase = 2 * n + 4 * j;
    map.z.push_back({zbase + 1, zbase + 2, zbase + 3, zbase + 4});
    out.target.clauses.push_back(sorted3(pos(cl[0]), zbase + 1, zbase + 2));
    out.target.clauses.push_back(sorted3(pos(negate(cl[1])), zbase + 1, zbase + 3));
    out.target.clauses.push_back(sorted3(pos(negate(cl[2])), zbase + 2, zbase + 4));
    map.gadget_clauses.push_back({3 * j + 1, 3 * j + 2, 3 * j + 3});
  }
  for (int i = 1; i <= n; ++i) {
    out.target.clauses.push_back({map.w[i - 1], map.y[i - 1]});
    map.variable_clauses.push_back(3 * m + i);
  }
  return out;
}

// Extends a source assignment over the w/y/z variables: w_i = x_i, y_i = ¬x_i,
// and per clause the lexicographically smallest (z1,z2,z3,z4) maximizing the
// number of satisfied gadget clauses (all three whenever the source clause is
// satisfied).
inline Assignment complete_assignment(const ReductionWitnessMap& map, const Cnf3Instance& src,
                                      const Assignment& a) {
  if (a.size() != map.src_vars) throw input_error("assignment length mismatch");
  if (static_cast<int>(src.clauses.size()) != map.src_clauses ||
      src.num_vars != map.src_vars)
    throw input_error("witness map does not match the source instance");
  Assignment full(map.out_vars);
  for (int i = 1; i <= map.src_vars; ++i) {
    full.set(map.w[i - 1], a.get(i));
    full.set(map.y[i - 1], !a.get(i));
  }
  for (int j = 0; j < map.src_clauses; ++j) {
    const auto& cl = src.clauses[static_cast<std::size_t>(j)];
    const bool lit[3] = {eval_lit(cl[0], a), !eval_lit(cl[1], a), !eval_lit(cl[2], a)};
    int best_mask = 0, best_sat = -1;
    for (int mask = 0; mask < 16; ++mask) {
      const bool z1 = (mask >> 3) & 1, z2 = (mask >> 2) & 1;
      const bool z3 = (mask >> 1) & 1, z4 = mask & 1;
      const int sat = ((lit[0] + z1 + z2) == 1) + ((lit[1] + z1 + z3) == 1) +
                      ((lit[2] + z2 + z4) == 1);
      if (sat > best_sat) {
        best_sat = sat;
        best_mask = mask;
      }
    }
    for (int t = 0; t < 4; ++t)
      full.set(map.z[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)],
               (best_mask >> (3 - t)) & 1);
  }
  return full;
}

// Projects a target assignment back: x_i is true exactly when w_i is true and
// y_i is false.
inline Assignment lift_assignment(const ReductionWitnessMap& map, const Assignment& full) {
  if (full.size() != map.out_vars) throw input_error("assignment length mismatch");
  Assignment a(map.src_vars);
  for (int i = 1; i <= map.src_vars; ++i)
    a.set(i, full.get(map.w[i - 1]) && !full.get(map.y[i - 1]));
  return a;
}

inline nlohmann::ordered_json witness_to_json(const ReductionWitnessMap& map) {
  nlohmann::ordered_json j;
  j["source"] = {{"num_vars", map.src_vars}, {"num_clauses", map.src_clauses}};
  j["target"] = {{"num_vars", map.out_vars}, {"num_clauses", map.out_clauses}};
  j["w_vars"] = map.w;
  j["y_vars"] = map.y;
  j["z_vars"] = map.z;
  j["gadget_clauses"] = map.gadget_clauses;
  j["variable_clauses"] = map.variable_clauses;
  return j;
}

inline ReductionWitnessMap witness_from_json(const nlohmann::json& j) {
  ReductionWitnessMap map;
  try {
    map.src_vars = j.at("source").at("num_vars").get<int>();
    map.src_clauses = j.at("source").at("num_clauses").get<int>();
    map.out_vars = j.at("target").at("num_vars").get<int>();
    map.out_clauses = j.at("target").at("num_clauses").get<int>();
    map.w = j.at("w_vars").get<std::vector<int>>();
    map.y = j.at("y_vars").get<std::vector<int>>();
    map.z = j.at("z_vars").get<std::vector<std::array<int, 4>>>();
    map.gadget_clauses = j.at("gadget_clauses").get<std::vector<std::array<int, 3>>>();
    map.variable_clauses = j.at("variable_clauses").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("bad witness map: ") + e.what());
  }
  if (map.out_vars != 2 * map.src_vars + 4 * map.src_clauses ||
      map.out_clauses != 3 * map.src_clauses + map.src_vars)
    throw input_error("witness map counts are inconsistent");
  return map;
}

}  // namespace ripcert
