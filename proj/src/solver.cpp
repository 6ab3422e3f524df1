#include "permflag/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace permflag {

namespace {

bool executable(const std::string& path) {
  return ::access(path.c_str(), X_OK) == 0 && !std::filesystem::is_directory(path);
}

std::string find_on_path(const std::string& name) {
  const char* path = std::getenv("PATH");
  if (!path) return {};
  std::stringstream ss(path);
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    if (dir.empty()) continue;
    std::string cand = dir + "/" + name;
    if (executable(cand)) return cand;
  }
  return {};
}

struct RunResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string output;  // stdout and stderr merged
};

RunResult run_subprocess(const std::vector<std::string>& argv, double timeout_seconds) {
  int fds[2];
  if (::pipe(fds) != 0) throw std::runtime_error("pipe() failed");

  pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    throw std::runtime_error("fork() failed");
  }
  if (pid == 0) {
    ::dup2(fds[1], STDOUT_FILENO);
    ::dup2(fds[1], STDERR_FILENO);
    ::close(fds[0]);
    ::close(fds[1]);
    std::vector<char*> cargv;
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    ::execvp(cargv[0], cargv.data());
    ::_exit(127);
  }
  ::close(fds[1]);

  RunResult res;
  auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_seconds);
  char buf[4096];
  bool open = true;
  while (open) {
    struct pollfd pfd = {fds[0], POLLIN, 0};
    int ms = static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                  deadline - std::chrono::steady_clock::now())
                                  .count());
    if (ms <= 0) {
      ::kill(pid, SIGKILL);
      res.timed_out = true;
      break;
    }
    int pr = ::poll(&pfd, 1, std::min(ms, 1000));
    if (pr > 0) {
      ssize_t n = ::read(fds[0], buf, sizeof(buf));
      if (n > 0)
        res.output.append(buf, static_cast<std::size_t>(n));
      else
        open = false;  // EOF
    }
  }
  ::close(fds[0]);
  int status = 0;
  ::waitpid(pid, &status, 0);
  if (WIFEXITED(status)) res.exit_code = WEXITSTATUS(status);
  return res;
}

double parse_objective_line(const std::string& text, const char* key) {
  auto pos = text.find(key);
  if (pos == std::string::npos) throw SolverError(SolverError::Kind::ParseFailure,
                                                  std::string("missing '") + key + "' in solver output");
  pos += std::strlen(key);
  while (pos < text.size() && (text[pos] == ':' || text[pos] == '=' || std::isspace(
                                                                           static_cast<unsigned char>(text[pos]))))
    ++pos;
  return std::stod(text.substr(pos));
}

}  // namespace

std::string resolve_solver(const std::string& cli_choice) {
  auto check = [](const std::string& cand) -> std::string {
    if (cand.empty()) return {};
    if (cand.find('/') != std::string::npos) return executable(cand) ? cand : std::string();
    return find_on_path(cand);
  };
  if (!cli_choice.empty()) return check(cli_choice);
  if (const char* env = std::getenv("PERMFLAG_SOLVER")) {
    auto r = check(env);
    if (!r.empty()) return r;
  }
  if (auto r = check("csdp"); !r.empty()) return r;
#ifdef PERMFLAG_BUNDLED_SOLVER
  if (auto r = check(PERMFLAG_BUNDLED_SOLVER); !r.empty()) return r;
#endif
  return {};
}

NumericSolution parse_csdp_solution(const std::string& sol_text, const std::string& stdout_text,
                                    const std::vector<int>& block_sizes) {
  std::stringstream ss(sol_text);
  std::string yline;
  if (!std::getline(ss, yline))
    throw SolverError(SolverError::Kind::ParseFailure, "empty solution file", stdout_text);

  NumericSolution sol;
  sol.q_matrices.reserve(block_sizes.size());
  for (int s : block_sizes)
    sol.q_matrices.emplace_back(static_cast<std::size_t>(s) * s, 0.0);

  std::string line;
  while (std::getline(ss, line)) {
    std::stringstream ls(line);
    int matno, blk, i, j;
    double v;
    if (!(ls >> matno >> blk >> i >> j >> v)) continue;
    if (matno != 2) continue;  // 1 = dual slack, 2 = the PSD solution
    if (blk < 1 || blk > static_cast<int>(block_sizes.size())) continue;  // slack block
    int dim = block_sizes[blk - 1];
    if (i < 1 || j < 1 || i > dim || j > dim)
      throw SolverError(SolverError::Kind::ParseFailure, "solution entry outside block", stdout_text);
    auto& q = sol.q_matrices[blk - 1];
    q[static_cast<std::size_t>(i - 1) * dim + (j - 1)] = v;
    q[static_cast<std::size_t>(j - 1) * dim + (i - 1)] = v;
  }

  sol.objective = -parse_objective_line(stdout_text, "Primal objective value");
  sol.solver_log = stdout_text;
  return sol;
}

NumericSolution parse_sdpa_output(const std::string& out_text, const std::vector<int>& block_sizes) {
  NumericSolution sol;
  sol.objective = -parse_objective_line(out_text, "objValPrimal");

  auto pos = out_text.find("yMat");
  if (pos == std::string::npos)
    throw SolverError(SolverError::Kind::ParseFailure, "missing yMat in sdpa output");
  pos = out_text.find('{', pos);
  if (pos == std::string::npos)
    throw SolverError(SolverError::Kind::ParseFailure, "missing yMat body in sdpa output");

  // The yMat section is a brace-nested list of blocks; read numbers in
  // order and fill the type blocks row by row.
  std::vector<double> nums;
  std::size_t i = pos;
  int depth = 0;
  for (; i < out_text.size(); ++i) {
    char ch = out_text[i];
    if (ch == '{') {
      ++depth;
      continue;
    }
    if (ch == '}') {
      --depth;
      if (depth == 0) break;
      continue;
    }
    if ((ch >= '0' && ch <= '9') || ch == '-' || ch == '+' || ch == '.') {
      std::size_t end = i;
      while (end < out_text.size() && std::string("0123456789.+-eE").find(out_text[end]) !=
                                          std::string::npos)
        ++end;
      nums.push_back(std::stod(out_text.substr(i, end - i)));
      i = end - 1;
    }
  }

  std::size_t need = 0;
  for (int s : block_sizes) need += static_cast<std::size_t>(s) * s;
  if (nums.size() < need)
    throw SolverError(SolverError::Kind::ParseFailure, "yMat shorter than the type blocks");
  std::size_t k = 0;
  for (int s : block_sizes) {
    sol.q_matrices.emplace_back(nums.begin() + k, nums.begin() + k + static_cast<std::size_t>(s) * s);
    k += static_cast<std::size_t>(s) * s;
  }
  sol.solver_log = out_text;
  return sol;
}

NumericSolution run_solver(const SdpProblem& problem, const std::string& sdpa_file,
                           const std::string& solver, double timeout_seconds) {
  std::string exe = resolve_solver(solver);
  if (exe.empty())
    throw SolverError(SolverError::Kind::NotFound,
                      "no usable SDP solver (checked --solver, PERMFLAG_SOLVER, csdp, bundled)");

  std::string sol_file = sdpa_file + ".sol";
  std::error_code ec;
  std::filesystem::remove(sol_file, ec);

  auto res = run_subprocess({exe, sdpa_file, sol_file}, timeout_seconds);
  if (res.timed_out)
    throw SolverError(SolverError::Kind::Timeout, "solver timed out after " +
                                                      std::to_string(timeout_seconds) + "s",
                      res.output);
  if (res.exit_code != 0)
    throw SolverError(SolverError::Kind::NonzeroExit,
                      "solver exited with code " + std::to_string(res.exit_code), res.output);

  const auto sizes = problem.block_sizes();
  std::ifstream in(sol_file);
  if (in) {
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      return parse_csdp_solution(buf.str(), res.output, sizes);
    } catch (const SolverError&) {
      try {
        return parse_sdpa_output(buf.str(), sizes);
      } catch (const SolverError&) {
      }
    }
  }
  // no solution file or unusable: last chance, sdpa-style stdout
  try {
    return parse_sdpa_output(res.output, sizes);
  } catch (const SolverError& e) {
    throw SolverError(SolverError::Kind::ParseFailure,
                      std::string("could not parse solver output: ") + e.what(), res.output);
  }
}

}  // namespace permflag
