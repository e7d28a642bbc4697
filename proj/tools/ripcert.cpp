// Command-line driver: instance generation, gadget reduction, matrix
// construction, restricted-isometry queries, gap decisions, matrix transforms,
// instance valuation, and the end-to-end verification pipeline.
//
// Exit codes: 0 success, 1 verification-check failure, 2 input error,
// 3 capacity (budget) error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ripcert/ripcert.hpp"

namespace {

using namespace ripcert;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write '" + path + "'");
  out << text;
}

void emit(const std::optional<std::string>& out_path, const std::string& text) {
  if (out_path)
    spill(*out_path, text);
  else
    std::cout << text;
}

enum class InstanceKind { cnf3, e13 };

// Decides the instance dialect from its header line.
InstanceKind sniff_instance(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok == "c") continue;
    if (tok == "p") {
      std::string kind;
      ls >> kind;
      if (kind == "cnf") return InstanceKind::cnf3;
      if (kind == "e13") return InstanceKind::e13;
      throw input_error("unknown instance dialect 'p " + kind + "'");
    }
    break;
  }
  throw input_error("no 'p cnf' or 'p e13' header found");
}

RatMatrix load_matrix(const std::string& path) { return matrix_from_str(slurp(path)); }

Assignment parse_assignment_bits(const std::string& bits, int n) {
  if (static_cast<int>(bits.size()) != n)
    throw input_error("assignment has " + std::to_string(bits.size()) + " bits, expected " +
                      std::to_string(n));
  Assignment a(n);
  for (int i = 0; i < n; ++i) {
    const char c = bits[static_cast<std::size_t>(i)];
    if (c != '0' && c != '1') throw input_error("assignment bits must be 0 or 1");
    a.set(i + 1, c == '1');
  }
  return a;
}

std::string assignment_bits(const Assignment& a) {
  std::string s;
  for (int i = 1; i <= a.size(); ++i) s += a.get(i) ? '1' : '0';
  return s;
}

std::string dump_json(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

// ---- subcommand handlers ------------------------------------------------------

struct GenArgs {
  std::string kind;
  int n = 3;
  std::uint64_t seed = 1;
  std::optional<std::string> out;
};

int run_gen(const GenArgs& a) {
  std::string text;
  if (a.kind == "3sat5")
    text = dimacs_str(gen_3sat5(a.n, a.seed));
  else if (a.kind == "e13")
    text = e13_str(gen_e13(a.n, a.seed));
  else
    throw input_error("unknown kind '" + a.kind + "' (expected 3sat5 or e13)");
  emit(a.out, text);
  return 0;
}

struct ReduceArgs {
  std::string instance;
  std::string out;
  std::optional<std::string> alpha_prime;
};

int run_reduce(const ReduceArgs& a) {
  const Cnf3Instance src = dimacs_from_str(slurp(a.instance));
  const ReductionResult red = reduce(src);
  spill(a.out, e13_str(red.target));
  nlohmann::ordered_json w = witness_to_json(red.map);
  if (a.alpha_prime) {
    const GapLedger ledger = make_gap_ledger(parse_rat(*a.alpha_prime));
    w["gap"] = {{"alpha_prime", rat_str(ledger.alpha_prime)}, {"alpha", rat_str(ledger.alpha)}};
  }
  spill(a.out + ".witness.json", dump_json(w));
  return 0;
}

struct BuildArgs {
  std::string instance;
  std::string epsilon = "1/5";
  std::string xi = "1/200";
  std::string alpha = "0";
  bool scaled = false;
  std::optional<std::string> out;
};

int run_build(const BuildArgs& a) {
  const std::string text = slurp(a.instance);
  if (sniff_instance(text) != InstanceKind::e13)
    throw input_error("build expects a 1-in-3 instance; reduce 3-CNF sources first");
  const E13Instance inst = e13_from_str(text);
  const ReductionParams params =
      make_params(parse_rat(a.epsilon), parse_rat(a.xi), parse_rat(a.alpha));
  RatMatrix x = build_reduction_matrix(inst, params);
  if (a.scaled) x = scaled_reduction_matrix(x, params);
  emit(a.out, matrix_str(x));
  return 0;
}

struct RipArgs {
  std::string matrix;
  int k = 1;
  std::optional<std::string> delta;
  std::uint64_t budget = kDefaultSubsetBudget;
  int workers = 1;
  bool find_max_k = false;
  std::string format = "json";
  std::optional<std::string> out;
};

int run_rip(const RipArgs& a) {
  const RatMatrix x = load_matrix(a.matrix);
  const RipReport rep = restricted_extremes(x, a.k, a.budget, a.workers);
  std::optional<bool> rip_ok;
  std::optional<int> max_k;
  if (a.delta) {
    const Rat delta = parse_rat(*a.delta);
    rip_ok = rep.delta_star <= rat_to_double(delta) + rep.tolerance;
    if (a.find_max_k) max_k = rip_max_k(x, delta, a.budget, a.workers);
  } else if (a.find_max_k) {
    throw input_error("--find-max-k needs --delta");
  }
  if (a.format == "json") {
    nlohmann::ordered_json j = rip_report_to_json(rep);
    if (rip_ok) j["is_rip"] = *rip_ok;
    if (max_k) j["max_k"] = *max_k;
    emit(a.out, dump_json(j));
  } else {
    std::string t;
    t += "k: " + std::to_string(rep.k) + "\n";
    t += "min_restricted_eig: " + double_str_roundtrip(rep.min_restricted_eig) + "\n";
    t += "max_restricted_eig: " + double_str_roundtrip(rep.max_restricted_eig) + "\n";
    t += "delta_star: " + double_str_roundtrip(rep.delta_star) + "\n";
    if (rip_ok) t += std::string("is_rip: ") + (*rip_ok ? "true" : "false") + "\n";
    if (max_k) t += "max_k: " + std::to_string(*max_k) + "\n";
    emit(a.out, t);
  }
  return 0;
}

struct GapArgs {
  std::string matrix;
  int k = 1;
  std::string delta;
  std::string lambda1 = "1";
  std::string lambda2 = "2";
  std::uint64_t budget = kDefaultSubsetBudget;
  int workers = 1;
  std::string format = "json";
  std::optional<std::string> out;
};

int run_gap(const GapArgs& a) {
  const RatMatrix x = load_matrix(a.matrix);
  const GapVerdict v = gap_decide(x, a.k, parse_rat(a.delta), parse_rat(a.lambda1),
                                  parse_rat(a.lambda2), a.budget, a.workers);
  if (a.format == "json")
    emit(a.out, dump_json({{"k", a.k}, {"verdict", to_string(v)}}));
  else
    emit(a.out, std::string("verdict: ") + to_string(v) + "\n");
  return 0;
}

struct TransformArgs {
  std::string op;
  std::string matrix;
  std::optional<std::string> matrix2;
  std::optional<std::string> delta, delta_prime, lambda2, tau;
  std::optional<std::string> cert;
  int k = 1;
  std::string out;
  std::string format = "json";
};

nlohmann::ordered_json shift_params_json(const ShiftParams& p) {
  return {{"mu", rat_str(p.mu)},
          {"nu", rat_str(p.nu)},
          {"tau", rat_str(p.tau)},
          {"lambda2_prime", rat_str(p.lambda2_prime)}};
}

int run_transform(const TransformArgs& a) {
  const RatMatrix x = load_matrix(a.matrix);
  nlohmann::ordered_json meta;
  RatMatrix result(0, 0);
  if (a.op == "shift-down") {
    if (!a.delta || !a.delta_prime || !a.lambda2)
      throw input_error("shift-down needs --delta, --delta-prime, and --lambda2");
    std::optional<Rat> tau;
    if (a.tau) tau = parse_rat(*a.tau);
    ShiftResult r = shift_delta_down(x, parse_rat(*a.delta), parse_rat(*a.delta_prime),
                                     parse_rat(*a.lambda2), tau);
    result = std::move(r.x);
    meta = shift_params_json(r.params);
  } else if (a.op == "shift-up") {
    if (!a.delta || !a.delta_prime || !a.lambda2)
      throw input_error("shift-up needs --delta, --delta-prime, and --lambda2");
    ShiftResult r = shift_delta_up(x, parse_rat(*a.delta), parse_rat(*a.delta_prime),
                                   parse_rat(*a.lambda2));
    result = std::move(r.x);
    meta = shift_params_json(r.params);
  } else if (a.op == "square") {
    const double tau = a.tau ? rat_to_double(parse_rat(*a.tau)) : 1e-9;
    result = squarify(x, tau);
    meta = {{"rows", result.rows}, {"cols", result.cols}};
  } else if (a.op == "blockdiag") {
    if (!a.matrix2) throw input_error("blockdiag needs --matrix2");
    result = block_diag(x, load_matrix(*a.matrix2));
    meta = {{"rows", result.rows}, {"cols", result.cols}};
  } else if (a.op == "widen") {
    if (!a.matrix2) throw input_error("widen needs --matrix2");
    if (!a.cert) throw input_error("widen needs --cert (a stored defect report for --matrix2)");
    const RipReport cert = rip_report_from_json(nlohmann::json::parse(slurp(*a.cert)));
    WidenResult r = widen_rectangular(x, load_matrix(*a.matrix2), cert, a.k);
    result = std::move(r.x);
    meta = {{"aspect_ratio", rat_str(r.aspect_ratio)},
            {"certified_defect", r.b_delta_star},
            {"k", a.k}};
  } else {
    throw input_error("unknown op '" + a.op +
                      "' (expected shift-down, shift-up, square, blockdiag, or widen)");
  }
  spill(a.out, matrix_str(result));
  if (a.format == "json") {
    std::cout << dump_json(meta);
  } else {
    for (const auto& [key, val] : meta.items())
      std::cout << key << ": " << (val.is_string() ? val.get<std::string>() : val.dump()) << "\n";
  }
  return 0;
}

struct ValArgs {
  std::string instance;
  std::optional<std::string> assignment;
  int max_n = 24;
  std::string format = "json";
  std::optional<std::string> out;
};

int run_val(const ValArgs& a) {
  const std::string text = slurp(a.instance);
  const InstanceKind kind = sniff_instance(text);
  nlohmann::ordered_json j;
  if (a.assignment) {
    Rat value;
    long satisfied = 0;
    long clauses = 0;
    if (kind == InstanceKind::cnf3) {
      const Cnf3Instance inst = dimacs_from_str(text);
      const Assignment assn = parse_assignment_bits(*a.assignment, inst.num_vars);
      value = val(inst, assn);
      satisfied = count_satisfied(inst, assn);
      clauses = static_cast<long>(inst.clauses.size());
    } else {
      const E13Instance inst = e13_from_str(text);
      const Assignment assn = parse_assignment_bits(*a.assignment, inst.num_vars);
      value = val(inst, assn);
      satisfied = count_satisfied(inst, assn);
      clauses = static_cast<long>(inst.clauses.size());
    }
    j = {{"value", rat_str(value)}, {"satisfied", satisfied}, {"clauses", clauses}};
  } else {
    const MaxValResult mv = kind == InstanceKind::cnf3 ? max_val_cnf(dimacs_from_str(text), a.max_n)
                                                       : max_val(e13_from_str(text), a.max_n);
    j = {{"max_value", rat_str(mv.value)},
         {"satisfied", mv.satisfied},
         {"argmax", assignment_bits(mv.argmax)}};
  }
  if (a.format == "json") {
    emit(a.out, dump_json(j));
  } else {
    std::string t;
    for (const auto& [key, val2] : j.items())
      t += key + ": " + (val2.is_string() ? val2.get<std::string>() : val2.dump()) + "\n";
    emit(a.out, t);
  }
  return 0;
}

struct VerifyArgs {
  std::string instance;
  std::string epsilon = "1/5";
  std::string xi = "1/200";
  std::string alpha = "0";
  std::optional<std::string> alpha_prime;
  std::uint64_t budget = kDefaultSubsetBudget;
  int workers = 1;
  std::uint64_t seed = 1;
  std::string format = "json";
  std::optional<std::string> out;
};

int run_verify(const VerifyArgs& a) {
  const std::string text = slurp(a.instance);
  const InstanceKind kind = sniff_instance(text);
  Rat alpha = parse_rat(a.alpha);
  if (a.alpha_prime) {
    if (kind != InstanceKind::cnf3)
      throw input_error("--alpha-prime applies to 3-CNF sources; use --alpha for direct instances");
    alpha = make_gap_ledger(parse_rat(*a.alpha_prime)).alpha;
  }
  const ReductionParams params = make_params(parse_rat(a.epsilon), parse_rat(a.xi), alpha);
  PipelineOptions opts;
  opts.budget = a.budget;
  opts.workers = a.workers;
  opts.sample_seed = a.seed;

  VerificationReport rep = kind == InstanceKind::cnf3
                               ? run_pipeline(dimacs_from_str(text), params, opts)
                               : run_pipeline(e13_from_str(text), params, opts);

  if (a.out) {
    const E13Instance inst =
        kind == InstanceKind::cnf3 ? reduce(dimacs_from_str(text)).target : e13_from_str(text);
    const RatMatrix xt = build_reduction_matrix(inst, params);
    spill(*a.out + ".xtilde.mat", matrix_str(xt));
    spill(*a.out + ".x.mat", matrix_str(scaled_reduction_matrix(xt, params)));
    rep.artifact_files = {*a.out + ".xtilde.mat", *a.out + ".x.mat"};
  }
  const std::string body = a.format == "json" ? dump_json(report_to_json(rep)) : emit_text(rep);
  emit(a.out, body);
  if (a.out && a.format == "json") std::cout << emit_text(rep);
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact restricted-isometry toolkit: gadget reductions, matrix "
               "construction, brute-force defect oracles, and verification"};
  app.require_subcommand(1);

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "generate a pseudo-random instance");
  gen->add_option("--kind", gen_args.kind, "3sat5 or e13")->required();
  gen->add_option("--n", gen_args.n, "variable count")->required();
  gen->add_option("--seed", gen_args.seed, "PRNG seed");
  gen->add_option("--out", gen_args.out, "output path (default stdout)");

  ReduceArgs reduce_args;
  auto* red = app.add_subcommand("reduce", "reduce 3-CNF to a 6-bounded 1-in-3 instance");
  red->add_option("--instance", reduce_args.instance, "DIMACS 3-CNF input")->required();
  red->add_option("--out", reduce_args.out, "output instance path (witness JSON is written "
                                            "alongside as <out>.witness.json)")->required();
  red->add_option("--alpha-prime", reduce_args.alpha_prime,
                  "source promise gap; records the carried gap alpha'/18 in the witness");

  BuildArgs build_args;
  auto* bld = app.add_subcommand("build", "build the reduction matrix for an instance");
  bld->add_option("--instance", build_args.instance, "1-in-3 instance file")->required();
  bld->add_option("--epsilon", build_args.epsilon, "clause-row scale (default 1/5)");
  bld->add_option("--xi", build_args.xi, "coupling scale (default 1/200)");
  bld->add_option("--alpha", build_args.alpha, "promise gap used for derived constants");
  bld->add_flag("--scaled", build_args.scaled, "emit X = X~/c1 instead of X~");
  bld->add_option("--out", build_args.out, "output path (default stdout)");

  RipArgs rip_args;
  auto* rip = app.add_subcommand("rip", "restricted extreme eigenvalues and defect delta*");
  rip->add_option("--matrix", rip_args.matrix, "matrix file")->required();
  rip->add_option("--k", rip_args.k, "sparsity level")->required();
  rip->add_option("--delta", rip_args.delta, "defect threshold for the membership verdict");
  rip->add_option("--budget", rip_args.budget, "maximum enumerated supports");
  rip->add_option("--workers", rip_args.workers, "worker threads");
  rip->add_flag("--find-max-k", rip_args.find_max_k, "largest k passing --delta");
  rip->add_option("--format", rip_args.format, "json or text");
  rip->add_option("--out", rip_args.out, "output path (default stdout)");

  GapArgs gap_args;
  auto* gap = app.add_subcommand("gap", "decide the promise gap at (k, delta, lambda1, lambda2)");
  gap->add_option("--matrix", gap_args.matrix, "matrix file")->required();
  gap->add_option("--k", gap_args.k, "sparsity level")->required();
  gap->add_option("--delta", gap_args.delta, "defect threshold")->required();
  gap->add_option("--lambda1", gap_args.lambda1, "sparsity shrink factor (>= 1)");
  gap->add_option("--lambda2", gap_args.lambda2, "defect inflation factor (> 0)");
  gap->add_option("--budget", gap_args.budget, "maximum enumerated supports");
  gap->add_option("--workers", gap_args.workers, "worker threads");
  gap->add_option("--format", gap_args.format, "json or text");
  gap->add_option("--out", gap_args.out, "output path (default stdout)");

  TransformArgs tr_args;
  auto* tr = app.add_subcommand("transform", "shape and defect-parameter transforms");
  tr->add_option("--op", tr_args.op, "shift-down | shift-up | square | blockdiag | widen")
      ->required();
  tr->add_option("--matrix", tr_args.matrix, "matrix file")->required();
  tr->add_option("--matrix2", tr_args.matrix2, "second matrix (blockdiag, widen)");
  tr->add_option("--delta", tr_args.delta, "current defect");
  tr->add_option("--delta-prime", tr_args.delta_prime, "target defect");
  tr->add_option("--lambda2", tr_args.lambda2, "defect inflation factor");
  tr->add_option("--tau", tr_args.tau, "transform tolerance");
  tr->add_option("--cert", tr_args.cert, "stored defect report certifying --matrix2 (widen)");
  tr->add_option("--k", tr_args.k, "sparsity the widen certificate must cover");
  tr->add_option("--out", tr_args.out, "output matrix path")->required();
  tr->add_option("--format", tr_args.format, "json or text");

  ValArgs val_args;
  auto* vl = app.add_subcommand("val", "evaluate an instance (one assignment or brute force)");
  vl->add_option("--instance", val_args.instance, "instance file")->required();
  vl->add_option("--assignment", val_args.assignment, "bit string, variable 1 first");
  vl->add_option("--max-n", val_args.max_n, "enumeration cap (default 24 variables)");
  vl->add_option("--format", val_args.format, "json or text");
  vl->add_option("--out", val_args.out, "output path (default stdout)");

  VerifyArgs ver_args;
  auto* ver = app.add_subcommand("verify", "run the full verification pipeline");
  ver->add_option("--instance", ver_args.instance, "3-CNF or 1-in-3 instance file")->required();
  ver->add_option("--epsilon", ver_args.epsilon, "clause-row scale (default 1/5)");
  ver->add_option("--xi", ver_args.xi, "coupling scale (default 1/200)");
  ver->add_option("--alpha", ver_args.alpha, "promise gap for derived constants");
  ver->add_option("--alpha-prime", ver_args.alpha_prime,
                  "source gap for 3-CNF inputs; the carried gap becomes alpha'/18");
  ver->add_option("--budget", ver_args.budget, "maximum enumerated supports");
  ver->add_option("--workers", ver_args.workers, "worker threads");
  ver->add_option("--seed", ver_args.seed, "seed for sampled-assignment checks");
  ver->add_option("--format", ver_args.format, "json or text");
  ver->add_option("--out", ver_args.out, "report path; matrices are written alongside");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gen) return run_gen(gen_args);
    if (*red) return run_reduce(reduce_args);
    if (*bld) return run_build(build_args);
    if (*rip) return run_rip(rip_args);
    if (*gap) return run_gap(gap_args);
    if (*tr) return run_transform(tr_args);
    if (*vl) return run_val(val_args);
    if (*ver) return run_verify(ver_args);
  } catch (const capacity_error& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 3;
  } catch (const parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const construction_error& e) {
    std::cerr << "construction error: " << e.what() << "\n";
    return 2;
  } catch (const input_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
