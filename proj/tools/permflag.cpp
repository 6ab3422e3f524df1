// permflag: packing-density bounds for permutation patterns.
//
// upper-bound  assemble -> emit -> solve -> round -> exact bound -> certificate
// verify       independent re-check of a certificate file
// lower-bound  construction values (exact evaluator, optional Monte Carlo)
// enumerate    admissible permutations / types / flags
// sample       Monte Carlo density of a pattern in a permuton

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "permflag/certify.hpp"
#include "permflag/layered.hpp"
#include "permflag/permuton.hpp"
#include "permflag/presets.hpp"
#include "permflag/sdp.hpp"
#include "permflag/solver.hpp"

using namespace permflag;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitComputation = 1;
constexpr int kExitUsage = 2;

ForbiddenSet parse_forbidden(const std::vector<std::string>& pats) {
  std::vector<Permutation> ps;
  for (const auto& s : pats) ps.push_back(Permutation::parse(s));
  return ForbiddenSet(std::move(ps));
}

std::string default_cert_path(const Permutation& s, int n, const ForbiddenSet& f, bool layered) {
  std::string name = s.to_string() + "_n" + std::to_string(n);
  for (const auto& p : f.patterns()) name += "_forb" + p.to_string();
  if (layered) name += "_layered";
  return "certs/" + name + ".json";
}

Permuton load_permuton(const std::string& preset, const std::string& file, Permutation* pattern) {
  if (!preset.empty()) {
    auto p = lookup_preset(preset);
    if (!p) throw CLI::ValidationError("--preset", "unknown preset: " + preset);
    if (pattern && pattern->size() == 0) *pattern = p->pattern;
    return p->permuton;
  }
  std::ifstream in(file);
  if (!in) throw CLI::ValidationError("--permuton", "cannot open " + file);
  std::stringstream buf;
  buf << in.rdbuf();
  return Permuton::from_json(buf.str());
}

int cmd_upper_bound(const std::string& pattern_s, int n, const std::vector<std::string>& forbid,
                    bool layered, const std::string& solver, double timeout, int k,
                    std::string output, const std::string& cache_dir, bool crude_only) {
  Permutation s = Permutation::parse(pattern_s);
  ForbiddenSet f = parse_forbidden(forbid);
  if (n < s.size()) {
    std::cerr << "error: --n must be at least the pattern length\n";
    return kExitUsage;
  }

  if (crude_only) {
    Rational b = crude_bound(s, n, f, layered);
    std::printf("crude bound: %s (~%.9f)\n", rational_to_string(b).c_str(), b.get_d());
    return kExitOk;
  }

  if (output.empty()) output = default_cert_path(s, n, f, layered);
  std::filesystem::path outp(output);
  if (outp.has_parent_path()) std::filesystem::create_directories(outp.parent_path());

  SdpProblem prob;
  try {
    prob = assemble(s, n, f, layered, cache_dir);
  } catch (const std::exception& e) {
    std::cerr << "error [assemble]: " << e.what() << "\n";
    return kExitComputation;
  }
  std::cerr << "assembled: " << prob.admissible.size() << " admissible permutations, "
            << prob.tables.size() << " type blocks\n";

  std::string sdpa_file = (outp.parent_path() / outp.stem()).string() + ".dat-s";
  NumericSolution sol;
  try {
    emit_sdpa(prob, sdpa_file);
    sol = run_solver(prob, sdpa_file, solver, timeout);
  } catch (const SolverError& e) {
    std::cerr << "error [solve]: " << e.what() << "\n";
    if (!e.solver_log.empty()) std::cerr << e.solver_log << "\n";
    return kExitComputation;
  } catch (const std::exception& e) {
    std::cerr << "error [emit]: " << e.what() << "\n";
    return kExitComputation;
  }
  std::printf("numeric objective: %.8f\n", sol.objective);

  try {
    RoundedSolution rounded = round_solution(sol, k);
    ExactBound exact = exact_bound(prob, rounded.l_matrices);
    Certificate cert = make_certificate(prob, rounded, exact, k);
    write_certificate(cert, output);
    std::printf("certified bound: %s (~%.10f)\n", rational_to_string(exact.bound).c_str(),
                exact.bound.get_d());
    std::printf("witness: %s\n", exact.witness.to_string().c_str());
    std::printf("certificate: %s\n", output.c_str());
  } catch (const std::exception& e) {
    std::cerr << "error [certify]: " << e.what() << "\n";
    return kExitComputation;
  }
  return kExitOk;
}

int cmd_verify(const std::string& cert_file) {
  Certificate cert;
  std::vector<std::string> warnings;
  try {
    cert = read_certificate(cert_file, &warnings);
  } catch (const CertifyError& e) {
    std::cerr << "malformed certificate: " << e.what() << "\n";
    return kExitUsage;
  }
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

  VerificationReport rep = verify(cert);
  for (const auto& c : rep.checks) {
    std::printf("%-32s %s%s%s\n", c.name.c_str(), c.pass ? "pass" : "FAIL",
                c.detail.empty() ? "" : "  ", c.detail.c_str());
  }
  if (rep.ok()) {
    std::printf("certificate OK: bound %s (~%.10f)\n", rational_to_string(cert.bound).c_str(),
                cert.bound.get_d());
    return kExitOk;
  }
  return kExitComputation;
}

int cmd_lower_bound(const std::string& preset, const std::string& permuton_file,
                    const std::string& pattern_s, bool optimize, bool price, int max_layers,
                    long mc_samples, std::uint64_t seed) {
  if (price) {
    if (pattern_s.empty()) {
      std::cerr << "error: --price needs --pattern\n";
      return kExitUsage;
    }
    Permutation s = Permutation::parse(pattern_s);
    auto res = price_optimize(s, max_layers);
    std::printf("price lower bound for %s: %.9f with %d layers\n", s.to_string().c_str(),
                res.value, res.layers_used);
    std::printf("weights:");
    for (double w : res.weights) std::printf(" %.6f", w);
    std::printf("\n");
    return kExitOk;
  }

  if (preset.empty() && permuton_file.empty()) {
    std::cerr << "error: need --preset or --permuton\n";
    return kExitUsage;
  }

  if (optimize && preset == "gamma1324") {
    auto opt = optimize_gamma_1324();
    std::printf("gamma1324 optimized: %.9f at a=%.6f c=%.6f\n", opt.value, opt.a, opt.c);
    if (mc_samples > 0) {
      auto est = density_mc(Permutation::parse("1324"), gamma_permuton(opt.a, opt.c), mc_samples,
                            seed);
      std::printf("monte carlo: %.7f +/- %.7f\n", est.estimate, est.stderr_);
    }
    return kExitOk;
  }

  Permutation pattern = pattern_s.empty() ? Permutation() : Permutation::parse(pattern_s);
  Permuton mu = [&] {
    try {
      return load_permuton(preset, permuton_file, &pattern);
    } catch (const CLI::ValidationError&) {
      throw;
    }
  }();
  if (pattern.size() == 0) {
    std::cerr << "error: need --pattern for a permuton file\n";
    return kExitUsage;
  }

  if (!preset.empty()) {
    auto p = lookup_preset(preset);
    std::printf("%s: construction value %.9f (%s)\n", preset.c_str(), p->value,
                p->closed_form ? "closed form" : "numeric");
    double exact = density_exact(pattern, mu);
    std::printf("exact evaluator: %.9f for pattern %s\n", exact, pattern.to_string().c_str());
  } else {
    double exact = density_exact(pattern, mu);
    std::printf("exact evaluator: %.9f for pattern %s\n", exact, pattern.to_string().c_str());
  }
  if (mc_samples > 0) {
    auto est = density_mc(pattern, mu, mc_samples, seed);
    std::printf("monte carlo: %.7f +/- %.7f (%ld samples, seed %llu)\n", est.estimate, est.stderr_,
                mc_samples, static_cast<unsigned long long>(seed));
  }
  return kExitOk;
}

int cmd_enumerate(int n, const std::vector<std::string>& forbid, bool layered,
                  const std::string& type_s, bool count_only) {
  ForbiddenSet f = parse_forbidden(forbid);
  if (!type_s.empty()) {
    TypePerm type{type_s == "e" ? Permutation() : Permutation::parse(type_s)};
    auto flags = enumerate_flags(n, type, f, layered);
    if (!count_only)
      for (const auto& fl : flags) {
        std::printf("%s @", fl.base.to_string().c_str());
        for (int s : fl.support) std::printf(" %d", s);
        std::printf("\n");
      }
    std::printf("%zu flags of length %d with type %s\n", flags.size(), n,
                type_s == "e" ? "(empty)" : type_s.c_str());
    return kExitOk;
  }
  auto perms = enumerate(n, f, layered);
  if (!count_only)
    for (const auto& p : perms)
      std::printf("%s\n", p.size() == 0 ? "()" : p.to_string().c_str());
  std::printf("%zu permutations of length %d\n", perms.size(), n);
  return kExitOk;
}

int cmd_sample(const std::string& preset, const std::string& permuton_file,
               const std::string& pattern_s, long samples, std::uint64_t seed) {
  Permutation pattern = pattern_s.empty() ? Permutation() : Permutation::parse(pattern_s);
  Permuton mu = load_permuton(preset, permuton_file, &pattern);
  if (pattern.size() == 0) {
    std::cerr << "error: need --pattern\n";
    return kExitUsage;
  }
  auto est = density_mc(pattern, mu, samples, seed);
  std::printf("estimate %.7f +/- %.7f (%ld hits / %ld samples)\n", est.estimate, est.stderr_,
              est.hits, est.samples);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"packing-density bounds for permutation patterns"};
  app.require_subcommand(1);

  // upper-bound
  std::string ub_pattern, ub_solver, ub_output, ub_cache = ".permflag-cache";
  std::vector<std::string> ub_forbid;
  int ub_n = 0, ub_k = 30;
  double ub_timeout = 3600;
  bool ub_layered = false, ub_crude = false;
  auto* ub = app.add_subcommand("upper-bound", "certified flag-algebra upper bound");
  ub->add_option("pattern", ub_pattern, "density pattern, e.g. 132")->required();
  ub->add_option("--n", ub_n, "length of the admissible permutations")->required();
  ub->add_option("--forbid", ub_forbid, "forbidden pattern (repeatable)");
  ub->add_flag("--layered", ub_layered, "restrict to layered permutations");
  ub->add_option("--solver", ub_solver, "solver executable (default: $PERMFLAG_SOLVER, csdp, bundled)");
  ub->add_option("--timeout", ub_timeout, "solver timeout in seconds");
  ub->add_option("--k", ub_k, "rounding denominator exponent (L entries in 2^-k Z)");
  ub->add_option("--output", ub_output, "certificate path (default certs/<pattern>_n<N>.json)");
  ub->add_option("--cache-dir", ub_cache, "product table cache directory ('' disables)");
  ub->add_flag("--crude", ub_crude, "print the exact crude bound and exit");

  // verify
  std::string vf_file;
  auto* vf = app.add_subcommand("verify", "verify a certificate file");
  vf->add_option("certificate", vf_file, "certificate JSON file")->required();

  // lower-bound
  std::string lb_preset, lb_file, lb_pattern;
  bool lb_optimize = false, lb_price = false;
  int lb_max_layers = 40;
  long lb_mc = 0;
  std::uint64_t lb_seed = 1;
  auto* lb = app.add_subcommand("lower-bound", "construction lower bounds");
  lb->add_option("--preset", lb_preset, "named construction (gamma1324, pi1342, batkeyev, 23154, ...)");
  lb->add_option("--permuton", lb_file, "permuton JSON file");
  lb->add_option("--pattern", lb_pattern, "pattern (defaults to the preset's)");
  lb->add_flag("--optimize", lb_optimize, "optimize free parameters (gamma1324)");
  lb->add_flag("--price", lb_price, "layered optimization for --pattern");
  lb->add_option("--max-layers", lb_max_layers, "layer cap for --price");
  lb->add_option("--mc", lb_mc, "Monte Carlo cross-check with this many samples");
  lb->add_option("--seed", lb_seed, "Monte Carlo seed");

  // enumerate
  int en_n = 0;
  std::vector<std::string> en_forbid;
  bool en_layered = false, en_count = false;
  std::string en_type;
  auto* en = app.add_subcommand("enumerate", "admissible permutations / flags");
  en->add_option("--n", en_n, "length")->required();
  en->add_option("--forbid", en_forbid, "forbidden pattern (repeatable)");
  en->add_flag("--layered", en_layered, "layered permutations only");
  en->add_option("--type", en_type, "list flags of this type instead ('e' for the empty type)");
  en->add_flag("--count", en_count, "print counts only");

  // sample
  std::string sm_preset, sm_file, sm_pattern;
  long sm_samples = 1000000;
  std::uint64_t sm_seed = 1;
  auto* sm = app.add_subcommand("sample", "Monte Carlo pattern density in a permuton");
  sm->add_option("--preset", sm_preset, "named construction");
  sm->add_option("--permuton", sm_file, "permuton JSON file");
  sm->add_option("--pattern", sm_pattern, "pattern to estimate");
  sm->add_option("--samples", sm_samples, "sample count");
  sm->add_option("--seed", sm_seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (ub->parsed())
      return cmd_upper_bound(ub_pattern, ub_n, ub_forbid, ub_layered, ub_solver, ub_timeout, ub_k,
                             ub_output, ub_cache, ub_crude);
    if (vf->parsed()) return cmd_verify(vf_file);
    if (lb->parsed())
      return cmd_lower_bound(lb_preset, lb_file, lb_pattern, lb_optimize, lb_price, lb_max_layers,
                             lb_mc, lb_seed);
    if (en->parsed()) return cmd_enumerate(en_n, en_forbid, en_layered, en_type, en_count);
    if (sm->parsed()) return cmd_sample(sm_preset, sm_file, sm_pattern, sm_samples, sm_seed);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputation;
  }
  return kExitUsage;
}
