#pragma once

// SAT instance types and exact evaluation.
//
// Two instance kinds: plain 3-CNF (clauses of exactly three signed literals,
// repeats allowed) and exactly-one instances (clauses are sets of 1..3 distinct
// positive variables, satisfied when exactly one member is true). Values are
// exact rationals; brute-force optimization enumerates assignments in
// lexicographic order (false < true, variable 1 most significant) and reports
// the first maximizer, guarded by an explicit variable-count cap.

#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ripcert/errors.hpp"
#include "ripcert/rational.hpp"

namespace ripcert {

struct Lit {
  int var = 0;  // 1-based
  bool neg = false;
  friend bool operator==(const Lit&, const Lit&) = default;
};

inline Lit negate(Lit l) { return {l.var, !l.neg}; }

struct Cnf3Instance {
  int num_vars = 0;
  std::vector<std::array<Lit, 3>> clauses;
};

struct E13Instance {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;  // each sorted ascending, distinct, size 1..3
};

struct Assignment {
  std::vector<std::uint8_t> vals;  // vals[i-1] is the value of variable i

  Assignment() = default;
  explicit Assignment(int n) : vals(static_cast<std::size_t>(n), 0) {}
  bool get(int var) const { return vals[static_cast<std::size_t>(var) - 1] != 0; }
  void set(int var, bool v) { vals[static_cast<std::size_t>(var) - 1] = v ? 1 : 0; }
  int size() const { return static_cast<int>(vals.size()); }
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

inline bool eval_lit(const Lit& l, const Assignment& a) { return a.get(l.var) != l.neg; }

inline bool eval_cnf_clause(const std::array<Lit, 3>& cl, const Assignment& a) {
  return eval_lit(cl[0], a) || eval_lit(cl[1], a) || eval_lit(cl[2], a);
}

inline bool eval_e1_clause(const std::vector<int>& clause, const Assignment& a) {
  int trues = 0;
  for (int v : clause) trues += a.get(v) ? 1 : 0;
  return trues == 1;
}

inline long count_satisfied(const E13Instance& inst, const Assignment& a) {
  long s = 0;
  for (const auto& cl : inst.clauses) s += eval_e1_clause(cl, a) ? 1 : 0;
  return s;
}

inline long count_satisfied(const Cnf3Instance& inst, const Assignment& a) {
  long s = 0;
  for (const auto& cl : inst.clauses) s += eval_cnf_clause(cl, a) ? 1 : 0;
  return s;
}

// Fraction of satisfied clauses, exact.
template <class Inst>
Rat val(const Inst& inst, const Assignment& a) {
  if (inst.clauses.empty()) throw input_error("value of an instance with no clauses");
  if (a.size() != inst.num_vars) throw input_error("assignment length mismatch");
  return rat_of(count_satisfied(inst, a), static_cast<long>(inst.clauses.size()));
}

struct MaxValResult {
  Rat value;
  Assignment argmax;  // lexicographically smallest maximizer
  long satisfied = 0;
};

namespace detail {

// Assignment from a mask with variable 1 at the most significant position, so
// ascending masks enumerate assignments in lexicographic order.
inline Assignment assignment_from_mask(std::uint64_t mask, int n) {
  Assignment a(n);
  for (int i = 1; i <= n; ++i) a.set(i, (mask >> (n - i)) & 1u);
  return a;
}

template <class CountFn>
MaxValResult max_val_enumerate(int num_vars, long num_clauses, int max_n, CountFn&& count) {
  if (num_clauses == 0) throw input_error("value of an instance with no clauses");
  if (num_vars > max_n)
    throw capacity_error("assignment enumeration over " + std::to_string(num_vars) +
                         " variables exceeds the cap of " + std::to_string(max_n));
  MaxValResult best;
  best.satisfied = -1;
  const std::uint64_t total = std::uint64_t{1} << num_vars;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    const long sat = count(mask);
    if (sat > best.satisfied) {
      best.satisfied = sat;
      best.argmax = assignment_from_mask(mask, num_vars);
      if (sat == num_clauses) break;  // cannot improve; earliest mask is lex-smallest
    }
  }
  best.value = rat_of(best.satisfied, num_clauses);
  return best;
}

}  // namespace detail

inline MaxValResult max_val(const E13Instance& inst, int max_n = 24) {
  const int n = inst.num_vars;
  std::vector<std::uint64_t> masks;
  masks.reserve(inst.clauses.size());
  for (const auto& cl : inst.clauses) {
    std::uint64_t m = 0;
    for (int v : cl) m |= std::uint64_t{1} << (n - v);
    masks.push_back(m);
  }
  return detail::max_val_enumerate(n, static_cast<long>(inst.clauses.size()), max_n,
                                   [&](std::uint64_t am) {
                                     long s = 0;
                                     for (std::uint64_t m : masks)
                                       s += __builtin_popcountll(am & m) == 1 ? 1 : 0;
                                     return s;
                                   });
}

inline MaxValResult max_val_cnf(const Cnf3Instance& inst, int max_n = 24) {
  const int n = inst.num_vars;
  std::vector<std::uint64_t> pos, neg;
  for (const auto& cl : inst.clauses) {
    std::uint64_t p = 0, q = 0;
    for (const Lit& l : cl)
      (l.neg ? q : p) |= std::uint64_t{1} << (n - l.var);
    pos.push_back(p);
    neg.push_back(q);
  }
  return detail::max_val_enumerate(n, static_cast<long>(inst.clauses.size()), max_n,
                                   [&](std::uint64_t am) {
                                     long s = 0;
                                     for (std::size_t i = 0; i < pos.size(); ++i)
                                       s += ((am & pos[i]) != 0 || (~am & neg[i]) != 0) ? 1 : 0;
                                     return s;
                                   });
}

struct BoundedCheck {
  bool ok = true;
  std::vector<long> counts;  // counts[i-1] = number of clauses containing variable i
};

// Per-variable clause occurrence counts against a cap (a clause counts once
// even if it mentions the variable twice, which only 3-CNF clauses can).
inline BoundedCheck check_bounded(const E13Instance& inst, long bound = 6) {
  BoundedCheck r;
  r.counts.assign(static_cast<std::size_t>(inst.num_vars), 0);
  for (const auto& cl : inst.clauses)
    for (int v : cl) ++r.counts[static_cast<std::size_t>(v) - 1];
  for (long c : r.counts)
    if (c > bound) r.ok = false;
  return r;
}

inline std::vector<long> clause_occurrence_counts(const Cnf3Instance& inst) {
  std::vector<long> counts(static_cast<std::size_t>(inst.num_vars), 0);
  for (const auto& cl : inst.clauses) {
    int seen[3] = {0, 0, 0};
    for (int i = 0; i < 3; ++i) {
      bool dup = false;
      for (int j = 0; j < i; ++j) dup = dup || seen[j] == cl[i].var;
      seen[i] = cl[i].var;
      if (!dup) ++counts[static_cast<std::size_t>(cl[i].var) - 1];
    }
  }
  return counts;
}

// ---- DIMACS 3-CNF ----------------------------------------------------------

inline Cnf3Instance parse_dimacs(std::istream& is) {
  std::string line;
  long lineno = 0;
  long nvars = -1, nclauses = -1;
  Cnf3Instance inst;
  std::vector<Lit> current;
  long current_line = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "c") continue;
    if (tok == "p") {
      if (nvars >= 0) throw parse_error("duplicate problem line", lineno);
      std::string fmt;
      if (!(ls >> fmt >> nvars >> nclauses) || fmt != "cnf")
        throw parse_error("expected 'p cnf <vars> <clauses>'", lineno);
      if (nvars < 0 || nclauses < 0) throw parse_error("negative counts in problem line", lineno);
      if (ls >> tok) throw parse_error("unexpected token after problem line", lineno);
      inst.num_vars = static_cast<int>(nvars);
      continue;
    }
    if (nvars < 0) throw parse_error("clause before problem line", lineno);
    ls.clear();
    ls.str(line);
    long v;
    while (ls >> v) {
      if (v == 0) {
        if (current.size() != 3)
          throw parse_error("clause with " + std::to_string(current.size()) +
                                " literals; exactly 3 required",
                            lineno);
        if (static_cast<long>(inst.clauses.size()) == nclauses)
          throw parse_error("more clauses than the header declares", lineno);
        inst.clauses.push_back({current[0], current[1], current[2]});
        current.clear();
      } else {
        if (current.empty()) current_line = lineno;
        const long var = v < 0 ? -v : v;
        if (var > nvars)
          throw parse_error("literal " + std::to_string(v) + " out of range", lineno);
        current.push_back({static_cast<int>(var), v < 0});
      }
    }
    if (!ls.eof()) throw parse_error("bad literal token", lineno);
  }
  if (nvars < 0) throw parse_error("missing problem line", lineno ? lineno : 1);
  if (!current.empty()) throw parse_error("unterminated clause", current_line);
  if (static_cast<long>(inst.clauses.size()) != nclauses)
    throw parse_error("header declares " + std::to_string(nclauses) + " clauses but " +
                          std::to_string(inst.clauses.size()) + " present",
                      lineno ? lineno : 1);
  return inst;
}

inline void serialize_dimacs(std::ostream& os, const Cnf3Instance& inst) {
  os << "p cnf " << inst.num_vars << ' ' << inst.clauses.size() << '\n';
  for (const auto& cl : inst.clauses) {
    for (const Lit& l : cl) os << (l.neg ? -l.var : l.var) << ' ';
    os << "0\n";
  }
}

// ---- exactly-one instances -------------------------------------------------

inline E13Instance parse_e13(std::istream& is) {
  std::string line;
  long lineno = 0;
  long nvars = -1, nclauses = -1;
  E13Instance inst;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "c") continue;
    if (tok == "p") {
      if (nvars >= 0) throw parse_error("duplicate problem line", lineno);
      std::string fmt;
      if (!(ls >> fmt >> nvars >> nclauses) || fmt != "e13")
        throw parse_error("expected 'p e13 <vars> <clauses>'", lineno);
      if (nvars < 0 || nclauses < 0) throw parse_error("negative counts in problem line", lineno);
      if (ls >> tok) throw parse_error("unexpected token after problem line", lineno);
      inst.num_vars = static_cast<int>(nvars);
      continue;
    }
    if (nvars < 0) throw parse_error("clause before problem line", lineno);
    ls.clear();
    ls.str(line);
    std::vector<int> clause;
    long v;
    bool terminated = false;
    while (ls >> v) {
      if (terminated) throw parse_error("tokens after clause terminator", lineno);
      if (v == 0) {
        terminated = true;
        continue;
      }
      if (v < 0) throw parse_error("negative variable in exactly-one clause", lineno);
      if (v > nvars) throw parse_error("variable " + std::to_string(v) + " out of range", lineno);
      if (!clause.empty()) {
        if (v == clause.back()) throw parse_error("duplicate variable in clause", lineno);
        if (v < clause.back()) throw parse_error("clause variables not ascending", lineno);
      }
      clause.push_back(static_cast<int>(v));
    }
    if (!ls.eof()) throw parse_error("bad variable token", lineno);
    if (!terminated) throw parse_error("unterminated clause", lineno);
    if (clause.empty() || clause.size() > 3)
      throw parse_error("clause must list 1..3 variables", lineno);
    if (static_cast<long>(inst.clauses.size()) == nclauses)
      throw parse_error("more clauses than the header declares", lineno);
    inst.clauses.push_back(std::move(clause));
  }
  if (nvars < 0) throw parse_error("missing problem line", lineno ? lineno : 1);
  if (static_cast<long>(inst.clauses.size()) != nclauses)
    throw parse_error("header declares " + std::to_string(nclauses) + " clauses but " +
                          std::to_string(inst.clauses.size()) + " present",
                      lineno ? lineno : 1);
  return inst;
}

inline void serialize_e13(std::ostream& os, const E13Instance& inst) {
  os << "p e13 " << inst.num_vars << ' ' << inst.clauses.size() << '\n';
  for (const auto& cl : inst.clauses) {
    for (int v : cl) os << v << ' ';
    os << "0\n";
  }
}

template <class Inst, class Fn>
std::string serialize_str(const Inst& inst, Fn&& fn) {
  std::ostringstream os;
  fn(os, inst);
  return os.str();
}

inline std::string dimacs_str(const Cnf3Instance& inst) {
  return serialize_str(inst, [](std::ostream& os, const Cnf3Instance& i) { serialize_dimacs(os, i); });
}

inline std::string e13_str(const E13Instance& inst) {
  return serialize_str(inst, [](std::ostream& os, const E13Instance& i) { serialize_e13(os, i); });
}

inline Cnf3Instance dimacs_from_str(const std::string& text) {
  std::istringstream is(text);
  return parse_dimacs(is);
}

inline E13Instance e13_from_str(const std::string& text) {
  std::istringstream is(text);
  return parse_e13(is);
}

}  // namespace ripcert
