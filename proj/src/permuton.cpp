#include "permflag/permuton.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "permflag/util.hpp"

namespace permflag {

namespace constants {

double lambda() { return 2.0 * std::sqrt(3.0) - 3.0; }

double rho132() { return 1.0 / (1.0 + std::sqrt(3.0)); }

double kappa() {
  // Root of 3x^4 - 4x + 1 in (0,1); x = 1 is the other nonnegative root.
  double x = 0.25;
  for (int i = 0; i < 64; ++i) {
    double f = ((3 * x * x * x * x) - 4 * x + 1);
    double df = 12 * x * x * x - 4;
    double nx = x - f / df;
    if (std::abs(nx - x) < 1e-16) return nx;
    x = nx;
  }
  return x;
}

double beta_layered() {
  double c = std::cbrt(std::sqrt(2.0) - 1.0);
  return 6.0 * c - 6.0 / c + 4.0;
}

double gamma_1342() { return lambda() * beta_layered(); }

}  // namespace constants

namespace {

constexpr double kMassTol = 1e-9;

using Node = Permuton::Node;
using NodePtr = Permuton::NodePtr;
using Kind = Permuton::Kind;

NodePtr leaf(Kind k) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  return n;
}

NodePtr make_grid_node(std::vector<double> rows, std::vector<double> cols,
                       std::vector<Permuton::Cell> cells) {
  auto sum = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s;
  };
  if (std::abs(sum(rows) - 1.0) > kMassTol || std::abs(sum(cols) - 1.0) > kMassTol)
    throw std::invalid_argument("grid masses must sum to 1");
  for (double x : rows)
    if (x < 0) throw std::invalid_argument("negative row mass");
  for (double x : cols)
    if (x < 0) throw std::invalid_argument("negative column mass");

  std::vector<char> row_used(rows.size(), 0), col_used(cols.size(), 0);
  int recurse_cells = 0;
  for (const auto& c : cells) {
    if (c.row < 0 || c.row >= static_cast<int>(rows.size()) || c.col < 0 ||
        c.col >= static_cast<int>(cols.size()))
      throw std::invalid_argument("cell outside grid");
    if (row_used[c.row] || col_used[c.col])
      throw std::invalid_argument("cells must occupy distinct rows and columns");
    row_used[c.row] = col_used[c.col] = 1;
    if (std::abs(rows[c.row] - cols[c.col]) > kMassTol)
      throw std::invalid_argument("occupied cell must be square (row mass == column mass)");
    if (!c.child) throw std::invalid_argument("missing cell child");
    if (c.child->kind == Kind::Recurse) {
      ++recurse_cells;
      if (rows[c.row] >= 1.0 - 1e-12)
        throw std::invalid_argument("recursion contraction factor must be < 1");
    }
  }
  if (recurse_cells > 1) throw std::invalid_argument("at most one recurse cell per grid");
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (rows[r] > kMassTol && !row_used[r])
      throw std::invalid_argument("row with positive mass has no cell");
  for (std::size_t c = 0; c < cols.size(); ++c)
    if (cols[c] > kMassTol && !col_used[c])
      throw std::invalid_argument("column with positive mass has no cell");

  // Drop degenerate rows/columns and their cells so evaluation never sees
  // zero-mass blocks.
  std::vector<Permuton::Cell> kept;
  for (const auto& c : cells)
    if (rows[c.row] > kMassTol) kept.push_back(c);
  std::sort(kept.begin(), kept.end(),
            [](const Permuton::Cell& a, const Permuton::Cell& b) { return a.col < b.col; });

  auto n = std::make_shared<Node>();
  n->kind = Kind::Grid;
  n->row_masses = std::move(rows);
  n->col_masses = std::move(cols);
  n->cells = std::move(kept);
  return n;
}

// Self-similar layered maximisers as recursive grids. The 132 maximiser
// stacks a decreasing block of mass 1-rho on top of a shrunken copy of
// itself; the other three orientations are its reflections, and the 1432
// maximiser uses ratio kappa instead.
NodePtr maximiser_node(const Permutation& pattern) {
  static const std::map<std::string, NodePtr> table = [] {
    std::map<std::string, NodePtr> t;
    double rho = constants::rho132();
    double kap = constants::kappa();
    auto corner = [](double lo_mass, double hi_mass, int rec_corner, Kind leaf_kind) {
      // rec_corner: 0 = bottom-left, 1 = top-right, 2 = bottom-right, 3 = top-left
      auto rec = leaf(Kind::Recurse);
      auto lf = leaf(leaf_kind);
      std::vector<Permuton::Cell> cells;
      std::vector<double> rows, cols;
      switch (rec_corner) {
        case 0:
          rows = {lo_mass, hi_mass};
          cols = {lo_mass, hi_mass};
          cells = {{0, 0, rec}, {1, 1, lf}};
          break;
        case 1:
          rows = {hi_mass, lo_mass};
          cols = {hi_mass, lo_mass};
          cells = {{1, 1, rec}, {0, 0, lf}};
          break;
        case 2:
          rows = {lo_mass, hi_mass};
          cols = {hi_mass, lo_mass};
          cells = {{0, 1, rec}, {1, 0, lf}};
          break;
        default:
          rows = {hi_mass, lo_mass};
          cols = {lo_mass, hi_mass};
          cells = {{1, 0, rec}, {0, 1, lf}};
          break;
      }
      return make_grid_node(std::move(rows), std::move(cols), std::move(cells));
    };
    t["132"] = corner(rho, 1 - rho, 0, Kind::Decreasing);
    t["213"] = corner(rho, 1 - rho, 1, Kind::Decreasing);
    t["231"] = corner(rho, 1 - rho, 2, Kind::Increasing);
    t["312"] = corner(rho, 1 - rho, 3, Kind::Increasing);
    t["1432"] = corner(kap, 1 - kap, 0, Kind::Decreasing);
    return t;
  }();
  auto it = table.find(pattern.to_string());
  if (it == table.end())
    throw std::invalid_argument("no stored maximiser for pattern " + pattern.to_string());
  return it->second;
}

bool is_monotone(const Permutation& s, bool increasing) {
  for (int i = 0; i + 1 < s.size(); ++i)
    if ((s[i] < s[i + 1]) != increasing) return false;
  return true;
}

class Evaluator {
 public:
  explicit Evaluator(double tol) : tol_(tol) {}

  double eval(const Permutation& s, const NodePtr& node) {
    if (s.size() <= 1) return 1.0;
    switch (node->kind) {
      case Kind::Decreasing:
        return is_monotone(s, false) ? 1.0 : 0.0;
      case Kind::Increasing:
        return is_monotone(s, true) ? 1.0 : 0.0;
      case Kind::Maximiser:
        return eval(s, maximiser_node(node->max_pattern));
      case Kind::Recurse:
        throw std::invalid_argument("recurse node outside a grid");
      case Kind::Grid:
        break;
    }
    auto key = std::make_pair(node.get(), s.to_string());
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    double self_mass = 0;  // mass of the recurse cell, if any
    for (const auto& c : node->cells)
      if (c.child->kind == Kind::Recurse) self_mass = node->row_masses[c.row];

    double base = assignments(s, node);
    double wm = std::pow(self_mass, s.size());
    double d = base;
    // Geometric fixed point d = base + wm * d.
    for (int iter = 0; iter < 1000000; ++iter) {
      double nd = base + wm * d;
      double step = std::abs(nd - d);
      d = nd;
      if (step < tol_) break;
    }
    memo_[key] = d;
    return d;
  }

 private:
  // Sum over all assignments of the points of s to cells, excluding the
  // one sending every point into the recurse cell.
  double assignments(const Permutation& s, const NodePtr& grid) {
    int m = s.size();
    const auto& cells = grid->cells;  // sorted by column
    int K = static_cast<int>(cells.size());
    std::vector<int> counts(K, 0);
    double total = 0;

    // Row order of the cells, for the value-interval check.
    std::vector<int> by_row(K);
    for (int i = 0; i < K; ++i) by_row[i] = i;
    std::sort(by_row.begin(), by_row.end(),
              [&](int a, int b) { return cells[a].row < cells[b].row; });

    double mfact = 1;
    for (int i = 2; i <= m; ++i) mfact *= i;

    std::function<void(int, int)> rec = [&](int ci, int assigned) {
      if (ci == K) {
        if (assigned != m) return;
        evaluate_assignment(s, grid, counts, by_row, mfact, total);
        return;
      }
      for (int k = 0; k + assigned <= m; ++k) {
        counts[ci] = k;
        rec(ci + 1, assigned + k);
      }
      counts[ci] = 0;
    };
    rec(0, 0);
    return total;
  }

  void evaluate_assignment(const Permutation& s, const NodePtr& grid,
                           const std::vector<int>& counts, const std::vector<int>& by_row,
                           double mfact, double& total) {
    const auto& cells = grid->cells;
    int K = static_cast<int>(cells.size());
    int m = s.size();

    // Points are assigned to cells in column order as consecutive
    // position blocks; compute each block's value range.
    std::vector<int> start(K, 0);
    int pos = 0;
    for (int i = 0; i < K; ++i) {
      start[i] = pos;
      pos += counts[i];
    }

    // Value sets must stack as intervals in row order.
    int lo = 1;
    for (int idx : by_row) {
      int k = counts[idx];
      if (k == 0) continue;
      int mn = m + 1, mx = 0;
      for (int p = start[idx]; p < start[idx] + k; ++p) {
        mn = std::min(mn, s[p]);
        mx = std::max(mx, s[p]);
      }
      if (mn != lo || mx != lo + k - 1) return;
      lo += k;
    }

    bool all_in_recurse = false;
    double w = mfact;
    for (int i = 0; i < K && w != 0; ++i) {
      int k = counts[i];
      if (k == 0) continue;
      double mass = grid->row_masses[cells[i].row];
      double fact = 1;
      for (int j = 2; j <= k; ++j) fact *= j;
      w *= std::pow(mass, k) / fact;
      if (w == 0) break;
      std::vector<int> vals(s.values().begin() + start[i], s.values().begin() + start[i] + k);
      Permutation sub = Permutation::standardize(vals);
      const NodePtr& child = cells[i].child;
      if (child->kind == Kind::Recurse) {
        if (k == m) {
          all_in_recurse = true;  // the self term, handled by the fixed point
          break;
        }
        w *= eval(sub, grid);
      } else {
        w *= eval(sub, child);
      }
    }
    if (!all_in_recurse) total += w;
  }

  double tol_;
  std::map<std::pair<const Node*, std::string>, double> memo_;
};

struct Point {
  double x, y;
};

Point sample_point(const NodePtr& root, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Node* node = root.get();
  double x0 = 0, y0 = 0, sx = 1, sy = 1;
  while (true) {
    switch (node->kind) {
      case Kind::Decreasing: {
        double u = unif(rng);
        return {x0 + u * sx, y0 + (1 - u) * sy};
      }
      case Kind::Increasing: {
        double u = unif(rng);
        return {x0 + u * sx, y0 + u * sy};
      }
      case Kind::Maximiser:
        node = maximiser_node(node->max_pattern).get();
        break;
      case Kind::Recurse:
        throw std::invalid_argument("recurse node outside a grid");
      case Kind::Grid: {
        double u = unif(rng);
        const Permuton::Cell* chosen = &node->cells.back();
        double acc = 0;
        for (const auto& c : node->cells) {
          acc += node->row_masses[c.row];
          if (u < acc) {
            chosen = &c;
            break;
          }
        }
        double xoff = 0, yoff = 0;
        for (int c = 0; c < chosen->col; ++c) xoff += node->col_masses[c];
        for (int r = 0; r < chosen->row; ++r) yoff += node->row_masses[r];
        double w = node->row_masses[chosen->row];
        x0 += xoff * sx;
        y0 += yoff * sy;
        sx *= w;
        sy *= w;
        if (chosen->child->kind != Kind::Recurse) node = chosen->child.get();
        // on recurse: stay on this grid with the composed affine map
        break;
      }
    }
  }
}

bool sample_matches(const Permutation& s, const std::vector<Point>& pts, std::vector<int>& order) {
  int m = s.size();
  order.resize(m);
  for (int i = 0; i < m; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return pts[a].x < pts[b].x; });
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if ((pts[order[i]].y < pts[order[j]].y) != (s[i] < s[j])) return false;
  return true;
}

using nlohmann::json;

json node_to_json(const NodePtr& n) {
  json j;
  switch (n->kind) {
    case Kind::Decreasing:
      j["kind"] = "dec";
      break;
    case Kind::Increasing:
      j["kind"] = "inc";
      break;
    case Kind::Recurse:
      j["kind"] = "recurse";
      break;
    case Kind::Maximiser:
      j["kind"] = "max";
      j["pattern"] = n->max_pattern.to_string();
      break;
    case Kind::Grid: {
      j["kind"] = "grid";
      j["rows"] = n->row_masses;
      j["cols"] = n->col_masses;
      json cells = json::array();
      for (const auto& c : n->cells)
        cells.push_back({{"r", c.row}, {"c", c.col}, {"node", node_to_json(c.child)}});
      j["cells"] = cells;
      break;
    }
  }
  return j;
}

NodePtr node_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw std::invalid_argument("permuton node needs a kind");
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "dec") return leaf(Kind::Decreasing);
  if (kind == "inc") return leaf(Kind::Increasing);
  if (kind == "recurse") return leaf(Kind::Recurse);
  if (kind == "max") {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Maximiser;
    n->max_pattern = Permutation::parse(j.at("pattern").get<std::string>());
    maximiser_node(n->max_pattern);  // reject unsupported patterns now
    return n;
  }
  if (kind == "grid") {
    std::vector<double> rows = j.at("rows").get<std::vector<double>>();
    std::vector<double> cols = j.at("cols").get<std::vector<double>>();
    std::vector<Permuton::Cell> cells;
    for (const auto& c : j.at("cells")) {
      Permuton::Cell cell;
      cell.row = c.at("r").get<int>();
      cell.col = c.at("c").get<int>();
      cell.child = node_from_json(c.at("node"));
      cells.push_back(std::move(cell));
    }
    return make_grid_node(std::move(rows), std::move(cols), std::move(cells));
  }
  throw std::invalid_argument("unknown permuton node kind: " + kind);
}

}  // namespace

Permuton Permuton::decreasing() { return Permuton(leaf(Kind::Decreasing)); }
Permuton Permuton::increasing() { return Permuton(leaf(Kind::Increasing)); }
Permuton Permuton::recurse() { return Permuton(leaf(Kind::Recurse)); }

Permuton Permuton::maximiser(const Permutation& pattern) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Maximiser;
  n->max_pattern = pattern;
  maximiser_node(pattern);  // validate support
  return Permuton(n);
}

Permuton Permuton::grid(std::vector<double> rows, std::vector<double> cols,
                        std::vector<std::pair<std::pair<int, int>, Permuton>> cells) {
  std::vector<Cell> cs;
  cs.reserve(cells.size());
  for (auto& [rc, child] : cells) cs.push_back({rc.first, rc.second, child.root()});
  return Permuton(make_grid_node(std::move(rows), std::move(cols), std::move(cs)));
}

Permuton Permuton::diagonal_sum(std::vector<std::pair<double, Permuton>> parts) {
  std::vector<double> masses;
  std::vector<std::pair<std::pair<int, int>, Permuton>> cells;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    masses.push_back(parts[i].first);
    cells.push_back({{static_cast<int>(i), static_cast<int>(i)}, parts[i].second});
  }
  return grid(masses, masses, std::move(cells));
}

std::string Permuton::to_json() const { return node_to_json(root_).dump(2); }

Permuton Permuton::from_json(const std::string& text) {
  json j = json::parse(text);
  return Permuton(node_from_json(j));
}

double density_exact(const Permutation& s, const Permuton& mu, double recursion_tol) {
  if (recursion_tol <= 0) throw std::invalid_argument("recursion tolerance must be positive");
  Evaluator ev(recursion_tol);
  return ev.eval(s, mu.root());
}

McEstimate density_mc(const Permutation& s, const Permuton& mu, long samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("need at least one sample");
  int m = s.size();
  constexpr long kChunk = 1 << 16;
  long nchunks = (samples + kChunk - 1) / kChunk;
  std::vector<long> hits(static_cast<std::size_t>(nchunks), 0);

  parallel_for(static_cast<std::size_t>(nchunks), [&](std::size_t c) {
    std::mt19937_64 rng(mix_seed(seed + 0x100000001ULL * (c + 1)));
    long lo = static_cast<long>(c) * kChunk;
    long hi = std::min(samples, lo + kChunk);
    std::vector<Point> pts(m);
    std::vector<int> order;
    long h = 0;
    for (long i = lo; i < hi; ++i) {
      for (int p = 0; p < m; ++p) pts[p] = sample_point(mu.root(), rng);
      if (sample_matches(s, pts, order)) ++h;
    }
    hits[c] = h;
  });

  long total = 0;
  for (long h : hits) total += h;
  McEstimate est;
  est.hits = total;
  est.samples = samples;
  est.estimate = static_cast<double>(total) / static_cast<double>(samples);
  est.stderr_ = std::sqrt(std::max(0.0, est.estimate * (1.0 - est.estimate)) /
                          static_cast<double>(samples));
  return est;
}

}  // namespace permflag
