#include "permflag/layered.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace permflag {

namespace {

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// x = softmax(0, y1, ..., y_{d-1}); pinning the first coordinate removes
// the flat direction of the parametrization.
std::vector<double> to_simplex(const std::vector<double>& y) {
  std::vector<double> x(y.size() + 1);
  double mx = 0;
  for (double v : y) mx = std::max(mx, v);
  double s = std::exp(-mx);
  x[0] = s;
  for (std::size_t i = 0; i < y.size(); ++i) {
    x[i + 1] = std::exp(y[i] - mx);
    s += x[i + 1];
  }
  for (double& v : x) v /= s;
  return x;
}

std::vector<double> from_simplex(const std::vector<double>& x) {
  std::vector<double> y(x.size() - 1);
  double base = std::log(std::max(x[0], 1e-12));
  for (std::size_t i = 1; i < x.size(); ++i) y[i - 1] = std::log(std::max(x[i], 1e-12)) - base;
  return y;
}

// Nelder-Mead maximization; y is updated in place to the best point found.
double nelder_mead(std::vector<double>& y, const std::function<double(const std::vector<double>&)>& f,
                   double tol, int max_iter) {
  int n = static_cast<int>(y.size());
  if (n == 0) return f(y);
  std::vector<std::vector<double>> simplex(n + 1, y);
  std::vector<double> val(n + 1);
  for (int i = 0; i < n; ++i) simplex[i + 1][i] += 0.5;
  for (int i = 0; i <= n; ++i) val[i] = f(simplex[i]);

  for (int iter = 0; iter < max_iter; ++iter) {
    std::vector<int> ord(n + 1);
    for (int i = 0; i <= n; ++i) ord[i] = i;
    std::sort(ord.begin(), ord.end(), [&](int a, int b) { return val[a] > val[b]; });
    int best = ord[0], worst = ord[n], second_worst = ord[n - 1];
    if (val[best] - val[worst] < tol) break;

    std::vector<double> centroid(n, 0);
    for (int i = 0; i <= n; ++i)
      if (i != worst)
        for (int d = 0; d < n; ++d) centroid[d] += simplex[i][d] / n;

    auto blend = [&](double alpha) {
      std::vector<double> p(n);
      for (int d = 0; d < n; ++d) p[d] = centroid[d] + alpha * (simplex[worst][d] - centroid[d]);
      return p;
    };

    auto refl = blend(-1.0);
    double fr = f(refl);
    if (fr > val[best]) {
      auto expand = blend(-2.0);
      double fe = f(expand);
      if (fe > fr) {
        simplex[worst] = expand;
        val[worst] = fe;
      } else {
        simplex[worst] = refl;
        val[worst] = fr;
      }
    } else if (fr > val[second_worst]) {
      simplex[worst] = refl;
      val[worst] = fr;
    } else {
      auto contract = blend(0.5);
      double fc = f(contract);
      if (fc > val[worst]) {
        simplex[worst] = contract;
        val[worst] = fc;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (int d = 0; d < n; ++d)
            simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
          val[i] = f(simplex[i]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (val[i] > val[best]) best = i;
  y = simplex[best];
  return val[best];
}

}  // namespace

double layered_density(const std::vector<int>& s_layers, const std::vector<double>& x) {
  int L = static_cast<int>(s_layers.size());
  int T = static_cast<int>(x.size());
  int m = 0;
  for (int k : s_layers) {
    if (k <= 0) throw std::invalid_argument("layer sizes must be positive");
    m += k;
  }
  if (L == 0) return 1.0;
  if (T < L) return 0.0;
  // dp[i]: density mass of the first i pattern layers assigned to layers
  // seen so far, strictly left to right.
  std::vector<double> dp(L + 1, 0.0);
  dp[0] = 1.0;
  for (int t = 0; t < T; ++t) {
    for (int i = L; i >= 1; --i) {
      double term = std::pow(x[t], s_layers[i - 1]) / factorial(s_layers[i - 1]);
      dp[i] += dp[i - 1] * term;
    }
  }
  return dp[L] * factorial(m);
}

SimplexOptimum maximize_on_simplex(int dim, const std::function<double(const std::vector<double>&)>& f,
                                   int restarts, double tol,
                                   const std::vector<std::vector<double>>& extra_starts) {
  if (dim < 1) throw std::invalid_argument("dimension must be positive");
  if (dim == 1) return {f({1.0}), {1.0}};

  auto eval_y = [&](const std::vector<double>& y) { return f(to_simplex(y)); };

  std::vector<std::vector<double>> starts;
  for (const auto& x : extra_starts)
    if (static_cast<int>(x.size()) == dim) starts.push_back(from_simplex(x));
  starts.push_back(std::vector<double>(dim - 1, 0.0));  // uniform
  for (double q : {0.15, 0.25, 0.35, 0.5, 0.65, 0.8}) {
    std::vector<double> x(dim);
    double s = 0;
    for (int i = 0; i < dim; ++i) s += std::pow(q, i);
    for (int i = 0; i < dim; ++i) x[i] = std::pow(q, i) / s;
    starts.push_back(from_simplex(x));
    std::reverse(x.begin(), x.end());
    starts.push_back(from_simplex(x));
  }
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  while (static_cast<int>(starts.size()) < restarts) {
    std::vector<double> y(dim - 1);
    for (double& v : y) v = unif(rng);
    starts.push_back(std::move(y));
  }

  SimplexOptimum best;
  best.value = -std::numeric_limits<double>::infinity();
  for (auto& y : starts) {
    double v = nelder_mead(y, eval_y, tol, 2000 * dim);
    if (v > best.value) {
      best.value = v;
      best.point = to_simplex(y);
    }
  }
  return best;
}

PriceResult price_optimize(const Permutation& s, int max_layers) {
  if (!s.is_layered()) throw std::invalid_argument("pattern must be layered");
  const std::vector<int> profile = s.layer_profile();
  int L = static_cast<int>(profile.size());
  if (max_layers < L) throw std::invalid_argument("max_layers below the pattern's layer count");

  PriceResult best;
  best.value = -1;
  std::vector<double> prev;
  for (int m = L; m <= max_layers; ++m) {
    std::vector<std::vector<double>> seeds;
    if (!prev.empty()) {
      // warm starts: previous optimum with a small fresh layer on each end
      for (bool front : {true, false}) {
        std::vector<double> w = prev;
        w.insert(front ? w.begin() : w.end(), 0.02);
        double sum = 0;
        for (double v : w) sum += v;
        for (double& v : w) v /= sum;
        seeds.push_back(std::move(w));
      }
    }
    auto opt = maximize_on_simplex(
        m, [&](const std::vector<double>& x) { return layered_density(profile, x); }, 21, 1e-12,
        seeds);
    bool improved = opt.value > best.value + 1e-9;
    if (opt.value > best.value) {
      best.value = opt.value;
      best.weights = opt.point;
      best.layers_used = m;
    }
    prev = opt.point;
    if (m > L && !improved) break;
  }
  return best;
}

}  // namespace permflag
