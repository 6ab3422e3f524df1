#include "permflag/certify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "permflag/util.hpp"

namespace permflag {

namespace {

constexpr const char* kToolVersion = "permflag 0.1.0";

// Cholesky with zero-skipping of tiny pivots (rank-deficient numeric
// blocks are routine). Returns false when a pivot is genuinely negative.
bool cholesky(std::vector<double>& a, int n) {
  double max_diag = 0;
  for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a[i * n + i]));
  double drop = std::max(1e-300, max_diag * 1e-14);
  std::vector<double> l(static_cast<std::size_t>(n) * n, 0.0);
  for (int j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (int k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (d < -drop) return false;
    if (d <= drop) {
      // a PSD matrix with a vanishing pivot must vanish below it too;
      // anything else is genuinely indefinite
      for (int i = j + 1; i < n; ++i) {
        double v = a[i * n + j];
        for (int k = 0; k < j; ++k) v -= l[i * n + k] * l[j * n + k];
        if (std::abs(v) > 1e5 * drop + 1e-12) return false;
      }
      for (int i = j; i < n; ++i) l[i * n + j] = 0;
      continue;
    }
    double root = std::sqrt(d);
    l[j * n + j] = root;
    for (int i = j + 1; i < n; ++i) {
      double v = a[i * n + j];
      for (int k = 0; k < j; ++k) v -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = v / root;
    }
  }
  a = std::move(l);
  return true;
}

using nlohmann::json;

json matrix_to_json(const RationalMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.dim(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.dim(); ++j) row.push_back(rational_to_string(m.at(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

RationalMatrix matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array()) throw CertifyError(field + ": expected a matrix (array of rows)");
  int dim = static_cast<int>(j.size());
  RationalMatrix m(dim);
  for (int i = 0; i < dim; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != dim)
      throw CertifyError(field + ": row " + std::to_string(i) + " has wrong length");
    for (int jj = 0; jj < dim; ++jj) {
      if (!j[i][jj].is_string())
        throw CertifyError(field + ": entry (" + std::to_string(i) + "," + std::to_string(jj) +
                           ") must be a \"p/q\" string");
      try {
        m.at(i, jj) = parse_rational(j[i][jj].get<std::string>());
      } catch (const std::exception& e) {
        throw CertifyError(field + ": entry (" + std::to_string(i) + "," + std::to_string(jj) +
                           "): " + e.what());
      }
    }
  }
  return m;
}

}  // namespace

RoundedSolution round_solution(const NumericSolution& sol, int k) {
  if (k < 1 || k > 62) throw CertifyError("denominator exponent out of range");
  RoundedSolution out;
  out.epsilon_shift = Rational(0);
  for (const auto& qm : sol.q_matrices) {
    int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(qm.size()))));
    std::vector<double> a(qm.size());
    // symmetrize against solver noise
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a[i * n + j] = 0.5 * (qm[i * n + j] + qm[j * n + i]);

    std::vector<double> work = a;
    bool ok = cholesky(work, n);
    if (!ok) {
      work = a;
      for (int i = 0; i < n; ++i) work[i * n + i] += 1e-8;
      if (!cholesky(work, n))
        throw CertifyError("numeric block is not PSD even after the 1e-8 shift");
      out.epsilon_shift = round_to_dyadic(1e-8, 40);
    }

    RationalMatrix L(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) {
        Rational r = round_to_dyadic(work[i * n + j], k);
        if (i == j && r < 0) r = 0;  // keep the PSD witness readable
        L.at(i, j) = r;
      }
    }
    out.l_matrices.push_back(std::move(L));
  }
  return out;
}

ExactBound exact_bound(const SdpProblem& problem, const std::vector<RationalMatrix>& l_matrices) {
  if (l_matrices.size() != problem.tables.size())
    throw CertifyError("L matrix count does not match the problem's type blocks");
  for (std::size_t b = 0; b < l_matrices.size(); ++b)
    if (l_matrices[b].dim() != static_cast<int>(problem.tables[b].flag_count()))
      throw CertifyError("L matrix dimension mismatch in block " + std::to_string(b));

  std::vector<RationalMatrix> q;
  q.reserve(l_matrices.size());
  for (const auto& l : l_matrices) q.push_back(l.gram());

  const std::size_t n = problem.admissible.size();
  std::vector<Rational> totals(n);
  parallel_for(n, [&](std::size_t pi) {
    Rational s = problem.objective[pi];
    for (std::size_t b = 0; b < problem.tables.size(); ++b) {
      const auto& row = problem.tables[b].rows[pi];
      for (const auto& e : row) {
        if (e.i == e.j)
          s += q[b].at(e.i, e.j) * e.value;
        else
          s += 2 * q[b].at(e.i, e.j) * e.value;
      }
    }
    totals[pi] = std::move(s);
  });

  std::size_t arg = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (totals[i] > totals[arg]) arg = i;
  return {totals[arg], problem.admissible[arg]};
}

Certificate make_certificate(const SdpProblem& problem, const RoundedSolution& rounded,
                             const ExactBound& exact, int k) {
  Certificate cert;
  cert.pattern = problem.pattern;
  cert.forbidden = problem.forbidden;
  cert.n = problem.n_target;
  cert.layered_only = problem.layered_only;
  for (const auto& p : problem.admissible) cert.admissible.push_back(p.to_string());
  for (const auto& tbl : problem.tables) {
    Certificate::TypeBlock blk;
    blk.type = tbl.type.tau.to_string();
    blk.m = tbl.m;
    for (const auto& f : tbl.flags) blk.flags.push_back({f.base.to_string(), f.support});
    cert.types.push_back(std::move(blk));
  }
  cert.l_matrices = rounded.l_matrices;
  cert.bound = exact.bound;
  cert.witness = exact.witness.to_string();
  cert.k = k;
  cert.epsilon_shift = rounded.epsilon_shift;
  cert.tool_version = kToolVersion;
  return cert;
}

std::string certificate_to_json(const Certificate& cert) {
  json j;
  j["pattern"] = cert.pattern.to_string();
  json forb = json::array();
  for (const auto& p : cert.forbidden.patterns()) forb.push_back(p.to_string());
  j["forbidden"] = forb;
  j["n"] = cert.n;
  j["layered_only"] = cert.layered_only;
  j["admissible"] = cert.admissible;
  json types = json::array();
  for (const auto& blk : cert.types) {
    json flags = json::array();
    for (const auto& [base, support] : blk.flags)
      flags.push_back({{"base", base}, {"support", support}});
    types.push_back({{"type", blk.type}, {"m", blk.m}, {"flags", flags}});
  }
  j["types"] = types;
  json mats = json::array();
  for (const auto& m : cert.l_matrices) mats.push_back(matrix_to_json(m));
  j["l_matrices"] = mats;
  j["bound"] = rational_to_string(cert.bound);
  j["witness"] = cert.witness;
  j["meta"] = {{"k", cert.k},
               {"epsilon_shift", rational_to_string(cert.epsilon_shift)},
               {"tool_version", cert.tool_version}};
  return j.dump(1);
}

Certificate certificate_from_json(const std::string& text, std::vector<std::string>* warnings) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CertifyError(std::string("JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw CertifyError("certificate must be a JSON object");

  static const std::vector<std::string> known = {"pattern", "forbidden",  "n",     "layered_only",
                                                 "admissible", "types", "l_matrices", "bound",
                                                 "witness", "meta"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end() && warnings)
      warnings->push_back("ignoring unknown field: " + it.key());
  }

  auto need = [&](const char* key) -> const json& {
    if (!j.contains(key)) throw CertifyError(std::string("missing field: ") + key);
    return j.at(key);
  };

  Certificate cert;
  try {
    cert.pattern = Permutation::parse(need("pattern").get<std::string>());
  } catch (const std::exception& e) {
    throw CertifyError(std::string("pattern: ") + e.what());
  }
  try {
    std::vector<Permutation> pats;
    for (const auto& s : need("forbidden")) pats.push_back(Permutation::parse(s.get<std::string>()));
    cert.forbidden = ForbiddenSet(std::move(pats));
  } catch (const CertifyError&) {
    throw;
  } catch (const std::exception& e) {
    throw CertifyError(std::string("forbidden: ") + e.what());
  }
  if (!need("n").is_number_integer()) throw CertifyError("n: expected an integer");
  cert.n = need("n").get<int>();
  if (!need("layered_only").is_boolean()) throw CertifyError("layered_only: expected a boolean");
  cert.layered_only = need("layered_only").get<bool>();
  if (!need("admissible").is_array()) throw CertifyError("admissible: expected an array");
  for (const auto& s : need("admissible")) {
    if (!s.is_string()) throw CertifyError("admissible: entries must be strings");
    cert.admissible.push_back(s.get<std::string>());
  }
  if (!need("types").is_array()) throw CertifyError("types: expected an array");
  for (std::size_t ti = 0; ti < need("types").size(); ++ti) {
    const auto& tj = need("types")[ti];
    std::string fld = "types[" + std::to_string(ti) + "]";
    if (!tj.is_object() || !tj.contains("type") || !tj.contains("m") || !tj.contains("flags"))
      throw CertifyError(fld + ": needs type, m and flags");
    Certificate::TypeBlock blk;
    blk.type = tj.at("type").get<std::string>();
    blk.m = tj.at("m").get<int>();
    for (const auto& fj : tj.at("flags")) {
      if (!fj.is_object() || !fj.contains("base") || !fj.contains("support"))
        throw CertifyError(fld + ": flags need base and support");
      blk.flags.push_back({fj.at("base").get<std::string>(),
                           fj.at("support").get<std::vector<int>>()});
    }
    cert.types.push_back(std::move(blk));
  }
  if (!need("l_matrices").is_array()) throw CertifyError("l_matrices: expected an array");
  for (std::size_t i = 0; i < need("l_matrices").size(); ++i)
    cert.l_matrices.push_back(
        matrix_from_json(need("l_matrices")[i], "l_matrices[" + std::to_string(i) + "]"));
  try {
    cert.bound = parse_rational(need("bound").get<std::string>());
  } catch (const CertifyError&) {
    throw;
  } catch (const std::exception& e) {
    throw CertifyError(std::string("bound: ") + e.what());
  }
  cert.witness = need("witness").get<std::string>();
  const auto& meta = need("meta");
  if (!meta.is_object()) throw CertifyError("meta: expected an object");
  cert.k = meta.value("k", 30);
  try {
    cert.epsilon_shift = parse_rational(meta.value("epsilon_shift", std::string("0")));
  } catch (const std::exception& e) {
    throw CertifyError(std::string("meta.epsilon_shift: ") + e.what());
  }
  cert.tool_version = meta.value("tool_version", std::string());
  return cert;
}

void write_certificate(const Certificate& cert, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << certificate_to_json(cert) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

Certificate read_certificate(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw CertifyError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return certificate_from_json(buf.str(), warnings);
}

VerificationReport verify(const Certificate& cert) {
  VerificationReport rep;
  auto check = [&](const std::string& name, bool pass, std::string detail = "") {
    rep.checks.push_back({name, pass, std::move(detail)});
    return pass;
  };

  const Permutation& pattern = cert.pattern;
  const ForbiddenSet& forbidden = cert.forbidden;
  bool fits = check("pattern-fits", pattern.size() <= cert.n,
                    "pattern length vs n = " + std::to_string(cert.n));
  if (cert.layered_only) fits = check("pattern-layered", pattern.is_layered()) && fits;
  if (!fits) return rep;

  // Independent enumeration; the cached tables used when producing the
  // certificate are deliberately not consulted.
  auto admissible = enumerate(cert.n, forbidden, cert.layered_only);
  {
    bool same = admissible.size() == cert.admissible.size();
    if (same)
      for (std::size_t i = 0; i < admissible.size(); ++i)
        if (admissible[i].to_string() != cert.admissible[i]) {
          same = false;
          break;
        }
    check("admissible-list", same,
          "expected " + std::to_string(admissible.size()) + " canonical admissible permutations");
    if (!same) return rep;
  }

  SdpProblem prob;
  prob.pattern = pattern;
  prob.n_target = cert.n;
  prob.forbidden = forbidden;
  prob.layered_only = cert.layered_only;
  prob.admissible = admissible;
  for (const auto& p : admissible) prob.objective.push_back(density(pattern, p));

  {
    std::vector<Certificate::TypeBlock> expected;
    for (auto [t, m] : admissible_pairs(cert.n)) {
      for (const auto& type : enumerate_types(t, forbidden, cert.layered_only)) {
        auto flags = enumerate_flags(m, type, forbidden, cert.layered_only);
        if (flags.empty()) continue;
        Certificate::TypeBlock blk;
        blk.type = type.tau.to_string();
        blk.m = m;
        for (const auto& f : flags) blk.flags.push_back({f.base.to_string(), f.support});
        expected.push_back(std::move(blk));
      }
    }
    bool same = expected.size() == cert.types.size();
    if (same)
      for (std::size_t i = 0; i < expected.size(); ++i)
        if (expected[i].type != cert.types[i].type || expected[i].m != cert.types[i].m ||
            expected[i].flags != cert.types[i].flags) {
          same = false;
          break;
        }
    check("types-and-flags", same, "canonical type/flag enumeration must match");
    if (!same) return rep;
  }

  bool dims_ok = cert.l_matrices.size() == cert.types.size();
  for (std::size_t i = 0; dims_ok && i < cert.types.size(); ++i)
    dims_ok = cert.l_matrices[i].dim() == static_cast<int>(cert.types[i].flags.size());
  if (!check("l-dimensions", dims_ok)) return rep;

  bool tri = true, diag = true;
  for (const auto& l : cert.l_matrices) {
    tri = tri && l.is_lower_triangular();
    diag = diag && l.diagonal_nonnegative();
  }
  check("l-lower-triangular", tri);
  check("l-diagonal-nonnegative", diag);
  if (!tri || !diag) return rep;

  for (auto [t, m] : admissible_pairs(cert.n))
    for (const auto& type : enumerate_types(t, forbidden, cert.layered_only)) {
      auto tbl = build_product_table(cert.n, type, m, forbidden, cert.layered_only, "");
      if (tbl.flag_count() > 0) prob.tables.push_back(std::move(tbl));
    }

  auto exact = exact_bound(prob, cert.l_matrices);
  rep.recomputed_bound = exact.bound;
  check("bound-dominates-recomputation", exact.bound <= cert.bound,
        "recomputed " + rational_to_string(exact.bound) + " vs stated " +
            rational_to_string(cert.bound));
  check("witness-admissible",
        std::find(cert.admissible.begin(), cert.admissible.end(), cert.witness) !=
            cert.admissible.end(),
        cert.witness);
  return rep;
}

}  // namespace permflag
