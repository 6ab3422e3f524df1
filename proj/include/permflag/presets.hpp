#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "permflag/perm.hpp"
#include "permflag/permuton.hpp"

namespace permflag {

// Five stacked blocks: a 132 maximiser, two decreasing layers around a
// large central layer, and a 213 maximiser on top; masses a, b, c, b, a
// with b = (1 - c - 2a)/2.
Permuton gamma_permuton(double a, double c);

// Closed-form 1324 density of gamma_permuton(a, c).
// Domain: 0 < c <= 1/2, 0 < a <= 1/4.
double eval_gamma_1324(double a, double c);

struct GammaOptimum {
  double value = 0;
  double a = 0, c = 0;
};
GammaOptimum optimize_gamma_1324();

// Seven-part construction for 1342: a self-iterated square, increasing
// segments, and a 231 maximiser, in height order 1,3,5,7,6,4,2.
Permuton pi_permuton(const std::array<double, 7>& weights);
std::array<double, 7> pi_reference_weights();
double eval_pi_1342(const std::array<double, 7>& weights);

// Geometric stack of 231 maximisers with ratio kappa.
Permuton batkeyev_permuton();
// Closed form lambda * beta; equals the geometric-series form used by the
// construction to high precision.
double eval_batkeyev();

struct Preset {
  std::string name;
  Permutation pattern;        // the pattern the construction packs
  Permuton permuton;
  double value = 0;           // exact construction density
  bool closed_form = false;   // false when the value is numerically optimized
  std::string description;
};

// Named 5/6-point constructions: 23154, 14523, 21354, 231654, 231564,
// 231645, 215634. Throws on unknown names.
Preset table3_preset(const std::string& name);

const std::vector<std::string>& table3_names();

// Lower-bound presets addressable from the command line: the table3 names
// plus gamma1324, pi1342 and batkeyev.
std::optional<Preset> lookup_preset(const std::string& name);

}  // namespace permflag
