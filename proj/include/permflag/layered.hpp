#pragma once

#include <functional>
#include <vector>

#include "permflag/perm.hpp"

namespace permflag {

// Density of a layered pattern with layer profile s_layers in the layered
// permuton with layer weights x (left to right, summing to 1).
double layered_density(const std::vector<int>& s_layers, const std::vector<double>& x);

struct SimplexOptimum {
  double value = 0;
  std::vector<double> point;
};

// Multi-start derivative-free maximization over the probability simplex.
// extra_starts are used before the built-in uniform/geometric/random ones.
SimplexOptimum maximize_on_simplex(int dim, const std::function<double(const std::vector<double>&)>& f,
                                   int restarts = 21, double tol = 1e-12,
                                   const std::vector<std::vector<double>>& extra_starts = {});

struct PriceResult {
  double value = 0;
  std::vector<double> weights;
  int layers_used = 0;
};

// Iterative layered optimization: maximize layered_density over m-layer
// weight vectors for m = |layers(s)| .. max_layers, stopping early once an
// extra layer improves the optimum by less than 1e-9. Every iterate is a
// valid lower bound on the packing density of s.
PriceResult price_optimize(const Permutation& s, int max_layers);

}  // namespace permflag
