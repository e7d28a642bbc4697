#pragma once

// Deterministic pseudo-random instance generators for the pipeline: exact
// 5-occurrence 3-CNF (slot shuffling), 6-bounded 1-in-3 instances, and plain
// random 3-CNF with optional satisfiability rejection sampling.

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ripcert/errors.hpp"
#include "ripcert/prng.hpp"
#include "ripcert/sat.hpp"

namespace ripcert {

constexpr int kGeneratorRetries = 1000;

// Every variable occurs in exactly five clauses, by construction: 5n literal
// slots are shuffled and grouped into triples; a grouping that repeats a
// variable inside a clause is rediscarded wholesale.
inline Cnf3Instance gen_3sat5(int n, std::uint64_t seed) {
  if (n <= 0) throw input_error("variable count must be positive");
  if (n % 3 != 0)
    throw input_error("exact-5-occurrence generation needs 5n/3 integral; n=" +
                      std::to_string(n) + " is not divisible by 3");
  const int m = 5 * n / 3;
  Prng rng(seed);
  std::vector<int> slots;
  slots.reserve(static_cast<std::size_t>(5 * n));
  for (int trial = 0; trial < kGeneratorRetries; ++trial) {
    slots.clear();
    for (int v = 1; v <= n; ++v)
      for (int c = 0; c < 5; ++c) slots.push_back(v);
    rng.shuffle(slots);
    bool ok = true;
    for (int j = 0; j < m && ok; ++j)
      ok = slots[static_cast<std::size_t>(3 * j)] != slots[static_cast<std::size_t>(3 * j + 1)] &&
           slots[static_cast<std::size_t>(3 * j)] != slots[static_cast<std::size_t>(3 * j + 2)] &&
           slots[static_cast<std::size_t>(3 * j + 1)] != slots[static_cast<std::size_t>(3 * j + 2)];
    if (!ok) continue;
    Cnf3Instance out;
    out.num_vars = n;
    out.clauses.reserve(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
      std::array<Lit, 3> cl;
      for (int t = 0; t < 3; ++t)
        cl[static_cast<std::size_t>(t)] = {slots[static_cast<std::size_t>(3 * j + t)], rng.coin()};
      out.clauses.push_back(cl);
    }
    return out;
  }
  throw construction_error("could not group 5-occurrence slots into repeat-free clauses after " +
                           std::to_string(kGeneratorRetries) + " shuffles");
}

// Random 1-in-3 instance with n variables and n clauses of size 1..3; every
// variable is kept within six clause memberships by rejection.
inline E13Instance gen_e13(int n, std::uint64_t seed) {
  if (n <= 0) throw input_error("variable count must be positive");
  Prng rng(seed);
  E13Instance out;
  out.num_vars = n;
  std::vector<int> occ(static_cast<std::size_t>(n + 1), 0);
  for (int j = 0; j < n; ++j) {
    bool placed = false;
    for (int trial = 0; trial < kGeneratorRetries && !placed; ++trial) {
      const int size = 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(std::min(3, n))));
      std::vector<int> vars;
      while (static_cast<int>(vars.size()) < size) {
        const int v = 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)));
        if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
      }
      bool ok = true;
      for (int v : vars) ok = ok && occ[static_cast<std::size_t>(v)] < 6;
      if (!ok) continue;
      std::sort(vars.begin(), vars.end());
      for (int v : vars) ++occ[static_cast<std::size_t>(v)];
      out.clauses.push_back(std::move(vars));
      placed = true;
    }
    if (!placed)
      throw construction_error("could not place clause " + std::to_string(j + 1) +
                               " within the 6-occurrence bound");
  }
  return out;
}

// Plain random 3-CNF: m clauses over n variables, distinct variables within a
// clause, uniform polarities.
inline Cnf3Instance gen_3cnf(int n, int m, std::uint64_t seed) {
  if (n < 3) throw input_error("random 3-CNF needs at least 3 variables");
  if (m < 1) throw input_error("clause count must be positive");
  Prng rng(seed);
  Cnf3Instance out;
  out.num_vars = n;
  out.clauses.reserve(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    std::array<int, 3> vars{};
    int got = 0;
    while (got < 3) {
      const int v = 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)));
      bool fresh = true;
      for (int t = 0; t < got; ++t) fresh = fresh && vars[static_cast<std::size_t>(t)] != v;
      if (fresh) vars[static_cast<std::size_t>(got++)] = v;
    }
    std::array<Lit, 3> cl;
    for (int t = 0; t < 3; ++t) cl[static_cast<std::size_t>(t)] = {vars[static_cast<std::size_t>(t)], rng.coin()};
    out.clauses.push_back(cl);
  }
  return out;
}

// Rejection-samples gen_3cnf until the instance is satisfiable (verified by
// brute force, so n must stay desk-scale).
inline Cnf3Instance gen_satisfiable_3cnf(int n, int m, std::uint64_t seed) {
  for (int trial = 0; trial < kGeneratorRetries; ++trial) {
    Cnf3Instance cand = gen_3cnf(n, m, seed + static_cast<std::uint64_t>(trial) * 0x9e3779b97f4a7c15ull);
    if (max_val_cnf(cand).value == 1) return cand;
  }
  throw construction_error("no satisfiable instance found after " +
                           std::to_string(kGeneratorRetries) + " draws");
}

}  // namespace ripcert
