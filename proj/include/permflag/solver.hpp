#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "permflag/sdp.hpp"

namespace permflag {

struct NumericSolution {
  // Bound value, sign-normalized: the solver reports -b, this is b.
  double objective = 0;
  // One dense symmetric matrix (row major) per type block, same order as
  // SdpProblem::tables.
  std::vector<std::vector<double>> q_matrices;
  std::string solver_log;
};

class SolverError : public std::runtime_error {
 public:
  enum class Kind { NotFound, Timeout, NonzeroExit, ParseFailure };
  SolverError(Kind kind, const std::string& what, std::string log = {})
      : std::runtime_error(what), kind(kind), solver_log(std::move(log)) {}
  Kind kind;
  std::string solver_log;
};

// Resolution order: explicit argument, PERMFLAG_SOLVER, csdp on PATH, the
// bundled reference solver. Empty result means nothing was found.
std::string resolve_solver(const std::string& cli_choice);

// Runs `solver <sdpa_file> <sdpa_file>.sol` as a subprocess, then parses a
// csdp-style solution file and, failing that, sdpa-style output.
NumericSolution run_solver(const SdpProblem& problem, const std::string& sdpa_file,
                           const std::string& solver, double timeout_seconds = 3600);

// Exposed for tests: parse solver outputs without running anything.
// csdp-style: y vector line, then "matno blk i j value" entries where
// matno 2 carries the PSD solution blocks.
NumericSolution parse_csdp_solution(const std::string& sol_text, const std::string& stdout_text,
                                    const std::vector<int>& block_sizes);
// sdpa-style: objValPrimal plus a yMat block list.
NumericSolution parse_sdpa_output(const std::string& out_text, const std::vector<int>& block_sizes);

}  // namespace permflag
