#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "permflag/flags.hpp"
#include "permflag/perm.hpp"
#include "permflag/rational.hpp"

namespace permflag {

// The bound problem: minimize b subject to
//   p(S, P') + sum_types <Q_type, C_type(P')> <= b   for every admissible P',
//   Q_type PSD,
// with C_type(P') the product-table coefficient matrices.
struct SdpProblem {
  Permutation pattern;
  int n_target = 0;
  ForbiddenSet forbidden;
  bool layered_only = false;
  std::vector<Permutation> admissible;   // P_N, canonical order
  std::vector<Rational> objective;       // p(pattern, P') per admissible entry
  std::vector<FlagProductTable> tables;  // one PSD block per type

  std::vector<int> block_sizes() const;  // flag counts, per table
};

SdpProblem assemble(const Permutation& s, int N, const ForbiddenSet& f, bool layered_only,
                    const std::string& cache_dir = "");

// Exact max of p(s, P') over admissible P' of length N.
Rational crude_bound(const Permutation& s, int N, const ForbiddenSet& f,
                     bool layered_only = false);

// Sparse SDPA interchange format. The file encodes the dual pair whose
// solver-reported primal objective equals -b: one constraint matrix per
// admissible permutation, one PSD block per type, and a diagonal slack
// block with one slot per permutation plus a final normalization slot.
// Deterministic: identical problems emit byte-identical files.
void emit_sdpa(const SdpProblem& problem, std::ostream& os);
void emit_sdpa(const SdpProblem& problem, const std::string& path);

}  // namespace permflag
