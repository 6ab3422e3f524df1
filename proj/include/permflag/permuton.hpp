#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "permflag/perm.hpp"

namespace permflag {

// Constants used by the named extremal constructions.
namespace constants {
double lambda();       // 2*sqrt(3) - 3, the 132 packing density
double rho132();       // contraction ratio of the 132 maximiser, 1/(1+sqrt(3))
double kappa();        // root of 3x^4 - 4x + 1 in (0,1)
double beta_layered(); // 1432 packing density, 6*cbrt(sqrt(2)-1) - 6/cbrt(sqrt(2)-1) + 4
double gamma_1342();   // lambda * beta
}  // namespace constants

// A block permuton: a measure on the unit square with uniform marginals,
// described by a grid of square cells with leaf measures, optionally
// recursing into itself. Immutable and cheap to share.
class Permuton {
 public:
  enum class Kind { Decreasing, Increasing, Maximiser, Grid, Recurse };

  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  struct Cell {
    int row = 0, col = 0;
    NodePtr child;
  };

  struct Node {
    Kind kind = Kind::Decreasing;
    Permutation max_pattern;             // Maximiser
    std::vector<double> row_masses;      // Grid
    std::vector<double> col_masses;      // Grid
    std::vector<Cell> cells;             // Grid, occupied cells only
  };

  static Permuton decreasing();
  static Permuton increasing();
  // Supported patterns: 132, 213, 231, 312 and 1432. Anything else throws.
  static Permuton maximiser(const Permutation& pattern);
  // rows/cols are masses; cells must occupy distinct rows and distinct
  // columns, each cell square (row mass == col mass). At most one child
  // per grid may be recurse().
  static Permuton grid(std::vector<double> rows, std::vector<double> cols,
                       std::vector<std::pair<std::pair<int, int>, Permuton>> cells);
  static Permuton recurse();

  // Stacked diagonal blocks, bottom-left to top-right.
  static Permuton diagonal_sum(std::vector<std::pair<double, Permuton>> parts);

  const NodePtr& root() const { return root_; }

  std::string to_json() const;
  static Permuton from_json(const std::string& text);

 private:
  explicit Permuton(NodePtr root) : root_(std::move(root)) {}
  NodePtr root_;
};

// Exact pattern density of s in mu. Grid nodes are evaluated by summing
// over all order-compatible assignments of the points of s to cells;
// self-referencing cells are resolved by iterating the resulting
// geometric fixed point until increments fall below recursion_tol.
double density_exact(const Permutation& s, const Permuton& mu, double recursion_tol = 1e-12);

struct McEstimate {
  double estimate = 0;
  double stderr_ = 0;
  long hits = 0;
  long samples = 0;
};

// Monte Carlo estimate: samples m-point sets from mu and counts the
// fraction inducing s. Deterministic for a fixed seed regardless of
// thread count.
McEstimate density_mc(const Permutation& s, const Permuton& mu, long samples, std::uint64_t seed);

}  // namespace permflag
