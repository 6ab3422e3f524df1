#pragma once

#include <optional>
#include <string>
#include <vector>

#include "permflag/rational.hpp"
#include "permflag/sdp.hpp"
#include "permflag/solver.hpp"

namespace permflag {

// Rounds the numeric PSD blocks to exact lower-triangular factors with
// entries in (1/2^k)Z and nonnegative diagonals, so Q = L L^T is PSD by
// construction. Blocks failing a Cholesky even after the 1e-8 shift raise
// CertifyError.
struct RoundedSolution {
  std::vector<RationalMatrix> l_matrices;
  Rational epsilon_shift;  // identity shift applied before factoring, 0 if none
};

class CertifyError : public std::runtime_error {
 public:
  explicit CertifyError(const std::string& what) : std::runtime_error(what) {}
};

RoundedSolution round_solution(const NumericSolution& sol, int denominator_exponent);

struct ExactBound {
  Rational bound;
  Permutation witness;
};

// Evaluates max over admissible P' of p(S, P') + sum <L L^T, C(P')> in
// exact arithmetic.
ExactBound exact_bound(const SdpProblem& problem, const std::vector<RationalMatrix>& l_matrices);

struct Certificate {
  Permutation pattern;
  ForbiddenSet forbidden;
  int n = 0;
  bool layered_only = false;
  std::vector<std::string> admissible;
  struct TypeBlock {
    std::string type;  // "" for the empty type
    int m = 0;
    std::vector<std::pair<std::string, std::vector<int>>> flags;  // (base, support)
  };
  std::vector<TypeBlock> types;
  std::vector<RationalMatrix> l_matrices;
  Rational bound;
  std::string witness;
  int k = 30;
  Rational epsilon_shift;
  std::string tool_version;
};

Certificate make_certificate(const SdpProblem& problem, const RoundedSolution& rounded,
                             const ExactBound& exact, int k);

std::string certificate_to_json(const Certificate& cert);
// Throws CertifyError naming the offending field; unknown extra fields are
// collected as warnings rather than errors.
Certificate certificate_from_json(const std::string& text, std::vector<std::string>* warnings = nullptr);

void write_certificate(const Certificate& cert, const std::string& path);
Certificate read_certificate(const std::string& path, std::vector<std::string>* warnings = nullptr);

struct VerificationReport {
  struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
  };
  std::vector<Check> checks;
  Rational recomputed_bound;
  bool ok() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Independent re-check of a certificate: re-enumerates permutations,
// types and flags, rebuilds the product tables from scratch (never from
// cache), validates the L factors structurally and recomputes the exact
// bound.
VerificationReport verify(const Certificate& cert);

}  // namespace permflag
