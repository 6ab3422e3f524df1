#include "permflag/presets.hpp"

#include <cmath>
#include <stdexcept>

#include "permflag/layered.hpp"

namespace permflag {

namespace {

Permutation P(const char* s) { return Permutation::parse(s); }

// Real root of 40x^3 - 32x^2 + 9x - 1 (outer layer size of the 21354
// construction).
double root_21354() {
  double x = 0.4;
  for (int i = 0; i < 64; ++i) {
    double f = ((40 * x - 32) * x + 9) * x - 1;
    double df = (120 * x - 64) * x + 9;
    double nx = x - f / df;
    if (std::abs(nx - x) < 1e-16) return nx;
    x = nx;
  }
  return x;
}

// 14523: the top part of size alpha is a skew sum of two balanced
// increasing segments; the construction iterates in the bottom part.
Permuton perm_14523(double alpha) {
  Permuton skew = Permuton::grid({0.5, 0.5}, {0.5, 0.5},
                                 {{{1, 0}, Permuton::increasing()}, {{0, 1}, Permuton::increasing()}});
  return Permuton::grid({1 - alpha, alpha}, {1 - alpha, alpha},
                        {{{0, 0}, Permuton::recurse()}, {{1, 1}, skew}});
}

double density_14523(double alpha) {
  // 15/8 * alpha^4 (1-alpha) / (1 - (1-alpha)^5), the exact density of
  // perm_14523(alpha).
  double r = 1 - alpha;
  return 15.0 / 8.0 * std::pow(alpha, 4) * r / (1 - std::pow(r, 5));
}

double golden_max(const std::function<double(double)>& f, double lo, double hi, double& argmax) {
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < 200; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  argmax = (a + b) / 2;
  return f(argmax);
}

}  // namespace

Permuton gamma_permuton(double a, double c) {
  double b = (1 - c - 2 * a) / 2;
  if (!(a > 0 && a <= 0.25) || !(c > 0 && c <= 0.5) || b < -1e-12)
    throw std::invalid_argument("gamma parameters outside 0 < a <= 1/4, 0 < c <= 1/2");
  b = std::max(b, 0.0);
  return Permuton::diagonal_sum({{a, Permuton::maximiser(P("132"))},
                                 {b, Permuton::decreasing()},
                                 {c, Permuton::decreasing()},
                                 {b, Permuton::decreasing()},
                                 {a, Permuton::maximiser(P("213"))}});
}

double eval_gamma_1324(double a, double c) {
  double b = (1 - c - 2 * a) / 2;
  if (!(a > 0 && a <= 0.25) || !(c > 0 && c <= 0.5) || b < -1e-12)
    throw std::invalid_argument("gamma parameters outside 0 < a <= 1/4, 0 < c <= 1/2");
  b = std::max(b, 0.0);
  double lam = constants::lambda();
  double rho = constants::rho132();
  double n1 = c * c / 2 * (a + b) * (a + b);
  double n2 = b * b / 2 * a * (a + b + c);
  double n3 = lam * a * a * a / 6 * (a + 2 * b + c);
  // tail copies inside a maximiser: geometric sum with ratio rho^4
  double n4 = std::sqrt(3.0) * lam / 6 * std::pow(rho, 4) / (1 - std::pow(rho, 4)) *
              std::pow(a, 4);
  return 24 * (n1 + 2 * n2 + 2 * n3 + 2 * n4);
}

GammaOptimum optimize_gamma_1324() {
  // Nested golden-section search; the objective is smooth and unimodal on
  // the box once c is near its ridge.
  GammaOptimum best;
  for (double c0 = 0.05; c0 < 0.5; c0 += 0.05) {
    for (double a0 = 0.02; a0 <= 0.24; a0 += 0.04) {
      double a = a0, c = c0;
      double step = 0.02;
      double v = eval_gamma_1324(a, c);
      while (step > 1e-10) {
        bool moved = false;
        for (auto [da, dc] : {std::pair{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step},
                              {step, step}, {step, -step}, {-step, step}, {-step, -step}}) {
          double na = a + da, nc = c + dc;
          if (!(na > 0 && na <= 0.25 && nc > 0 && nc <= 0.5 && 1 - nc - 2 * na >= 0)) continue;
          double nv = eval_gamma_1324(na, nc);
          if (nv > v) {
            a = na;
            c = nc;
            v = nv;
            moved = true;
          }
        }
        if (!moved) step /= 2;
      }
      if (v > best.value) best = {v, a, c};
    }
  }
  return best;
}

std::array<double, 7> pi_reference_weights() {
  return {0.2174127723536347, 0.0170598057899243, 0.0516101402487892, 0.4340722809873865,
          0.1479895625950390, 0.0764457255805657, 0.0554097124446606};
}

Permuton pi_permuton(const std::array<double, 7>& w) {
  double sum = 0;
  for (double v : w) {
    if (v <= 0) throw std::invalid_argument("pi weights must be positive");
    sum += v;
  }
  if (std::abs(sum - 1) > 1e-9) throw std::invalid_argument("pi weights must sum to 1");
  // Column order 1..7; height order (bottom to top) 1,7,2,6,3,5,4.
  std::vector<double> rows = {w[0], w[6], w[1], w[5], w[2], w[4], w[3]};
  std::vector<double> cols(w.begin(), w.end());
  std::vector<std::pair<std::pair<int, int>, Permuton>> cells;
  cells.push_back({{0, 0}, Permuton::recurse()});
  cells.push_back({{2, 1}, Permuton::increasing()});
  cells.push_back({{4, 2}, Permuton::increasing()});
  cells.push_back({{6, 3}, Permuton::increasing()});
  cells.push_back({{5, 4}, Permuton::increasing()});
  cells.push_back({{3, 5}, Permuton::increasing()});
  cells.push_back({{1, 6}, Permuton::maximiser(P("231"))});
  return Permuton::grid(std::move(rows), std::move(cols), std::move(cells));
}

double eval_pi_1342(const std::array<double, 7>& weights) {
  return density_exact(P("1342"), pi_permuton(weights), 1e-14);
}

Permuton batkeyev_permuton() {
  double kap = constants::kappa();
  return Permuton::grid({kap, 1 - kap}, {kap, 1 - kap},
                        {{{0, 0}, Permuton::recurse()}, {{1, 1}, Permuton::maximiser(P("231"))}});
}

double eval_batkeyev() {
  double lam = constants::lambda();
  double c = std::cbrt(std::sqrt(2.0) - 1.0);
  return 2 * lam * (3 * c - 3 / c + 2);
}

Preset table3_preset(const std::string& name) {
  double lam = constants::lambda();
  if (name == "23154") {
    // 231 maximiser of mass 3/5 below a decreasing layer of mass 2/5
    Permuton mu = Permuton::diagonal_sum(
        {{0.6, Permuton::maximiser(P("231"))}, {0.4, Permuton::decreasing()}});
    double v = 120.0 * (0.4 * 0.4 / 2) * (0.6 * 0.6 * 0.6 / 6) * lam;
    return {name, P("23154"), mu, v, true, "231-maximiser (3/5) + decreasing layer (2/5)"};
  }
  if (name == "14523") {
    double alpha;
    double v = golden_max(density_14523, 0.5, 0.999, alpha);
    return {name, P("14523"), perm_14523(alpha), v, false,
            "skew sum of balanced increasing segments over an iterated part"};
  }
  if (name == "21354") {
    double b = root_21354();
    std::vector<double> x = {b, 0.5 - b, 0.5 - b, b};
    double v = layered_density({2, 1, 2}, x);
    Permuton mu = Permuton::diagonal_sum({{x[0], Permuton::decreasing()},
                                          {x[1], Permuton::decreasing()},
                                          {x[2], Permuton::decreasing()},
                                          {x[3], Permuton::decreasing()}});
    return {name, P("21354"), mu, v, false, "4 layers with outer size the root of 40x^3-32x^2+9x-1"};
  }
  if (name == "231654") {
    Permuton mu = Permuton::diagonal_sum(
        {{0.5, Permuton::maximiser(P("231"))}, {0.5, Permuton::decreasing()}});
    double v = 720.0 * std::pow(0.5, 6) / 36.0 * lam;
    return {name, P("231654"), mu, v, true, "231-maximiser (1/2) + decreasing layer (1/2)"};
  }
  if (name == "231564") {
    Permuton mu = Permuton::diagonal_sum(
        {{0.5, Permuton::maximiser(P("231"))}, {0.5, Permuton::maximiser(P("231"))}});
    double v = lam * lam * 720.0 / (48.0 * 48.0);
    return {name, P("231564"), mu, v, true, "sum of two equal 231-maximisers"};
  }
  if (name == "231645") {
    Permuton mu = Permuton::diagonal_sum(
        {{0.5, Permuton::maximiser(P("231"))}, {0.5, Permuton::maximiser(P("312"))}});
    double v = lam * lam * 720.0 / (48.0 * 48.0);
    return {name, P("231645"), mu, v, true, "231-maximiser below a flipped (312) maximiser"};
  }
  if (name == "215634") {
    // decreasing, then increasing two bands up, then increasing in between
    Permuton mu = Permuton::grid({1.0 / 3, 1.0 / 3, 1.0 / 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3},
                                 {{{0, 0}, Permuton::decreasing()},
                                  {{2, 1}, Permuton::increasing()},
                                  {{1, 2}, Permuton::increasing()}});
    double v = 720.0 / (729.0 * 8.0);
    return {name, P("215634"), mu, v, true, "three equal segments in height order 1,3,2"};
  }
  throw std::invalid_argument("unknown preset: " + name);
}

const std::vector<std::string>& table3_names() {
  static const std::vector<std::string> names = {"23154",  "14523",  "21354", "231654",
                                                 "231564", "231645", "215634"};
  return names;
}

std::optional<Preset> lookup_preset(const std::string& name) {
  for (const auto& n : table3_names())
    if (n == name) return table3_preset(name);
  if (name == "gamma1324") {
    auto opt = optimize_gamma_1324();
    return Preset{name, P("1324"), gamma_permuton(opt.a, opt.c), opt.value, false,
                  "five-block construction, tails are 132/213 maximisers"};
  }
  if (name == "pi1342") {
    auto w = pi_reference_weights();
    return Preset{name, P("1342"), pi_permuton(w), eval_pi_1342(w), false,
                  "seven-part construction with an iterated square and a 231-maximiser"};
  }
  if (name == "batkeyev") {
    return Preset{name, P("1342"), batkeyev_permuton(), eval_batkeyev(), true,
                  "geometric stack of 231-maximisers with ratio kappa"};
  }
  return std::nullopt;
}

}  // namespace permflag
