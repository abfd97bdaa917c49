#include "swlab/pathswitch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "swlab/errors.hpp"
#include "swlab/matching.hpp"

namespace swlab {

TrafficMatrix TrafficMatrix::make(RealMatrix lambda, const ClosSpec& spec) {
  const auto k = static_cast<std::size_t>(spec.k);
  if (lambda.rows() != k || lambda.cols() != k) {
    throw PreconditionError("traffic matrix must be k x k");
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (!(lambda(i, j) >= 0.0)) throw PreconditionError("negative arrival rate");
    }
    if (!(lambda.row_sum(i) < spec.n)) {
      throw PreconditionError("row " + std::to_string(i) + " load not below n");
    }
    if (!(lambda.col_sum(i) < spec.n)) {
      throw PreconditionError("column " + std::to_string(i) + " load not below n");
    }
  }
  if (spec.m < spec.n) throw PreconditionError("path switching needs m >= n");
  return {std::move(lambda), spec};
}

CapacityMatrix CapacityMatrix::from_counts(const IntMatrix& counts, std::int64_t frame,
                                           int modules) {
  if (!counts.square()) throw PreconditionError("capacity matrix must be square");
  if (frame < 1 || modules < 1) throw PreconditionError("frame and modules must be positive");
  const std::int64_t target = modules * frame;
  for (std::size_t i = 0; i < counts.rows(); ++i) {
    if (counts.row_sum(i) != target || counts.col_sum(i) != target) {
      throw PreconditionError("row/column " + std::to_string(i) + " does not sum to m F = " +
                              std::to_string(target));
    }
    for (std::size_t j = 0; j < counts.cols(); ++j)
      if (counts(i, j) < 0) throw PreconditionError("negative capacity");
  }
  CapacityMatrix c;
  c.frame = frame;
  c.modules = modules;
  c.c = RationalMatrix(counts.rows(), counts.cols());
  for (std::size_t i = 0; i < counts.rows(); ++i)
    for (std::size_t j = 0; j < counts.cols(); ++j) c.c(i, j) = Rational(counts(i, j), frame);
  return c;
}

CapacityMatrix CapacityMatrix::from_rationals(const RationalMatrix& c, int modules) {
  std::int64_t frame = 1;
  for (const auto& v : c.data()) frame = std::lcm(frame, v.denominator());
  IntMatrix counts(c.rows(), c.cols());
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) {
      const Rational scaled = c(i, j) * frame;
      counts(i, j) = scaled.numerator();
    }
  return from_counts(counts, frame, modules);
}

IntMatrix CapacityMatrix::counts() const {
  IntMatrix out(c.rows(), c.cols());
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) {
      const Rational scaled = c(i, j) * frame;
      if (scaled.denominator() != 1) throw PreconditionError("F c is not an integer matrix");
      out(i, j) = scaled.numerator();
    }
  return out;
}

AllocationResult allocate_capacity(const TrafficMatrix& t, const AllocationOptions& opt) {
  const std::size_t k = t.lambda.rows();
  const double m = t.spec.m;
  RealMatrix lambda = t.lambda;
  const double eps = 1.0 / (static_cast<double>(k) * static_cast<double>(opt.frame_hint));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      if (lambda(i, j) > 0.0) continue;
      if (opt.zero_policy == ZeroRatePolicy::kReject) {
        throw PreconditionError("zero arrival rate on path (" + std::to_string(i) + ", " +
                                std::to_string(j) + ")");
      }
      lambda(i, j) = eps;
    }

  RealMatrix root(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) root(i, j) = std::sqrt(lambda(i, j));

  AllocationResult r;
  r.c = lambda;
  const double saturated = 1e-13 * m;
  const double stop = 1e-12 * m * static_cast<double>(k);
  std::vector<double> a(k), b(k);
  std::vector<bool> row_on(k), col_on(k);

  while (true) {
    double slack = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      a[i] = m - r.c.row_sum(i);
      b[i] = m - r.c.col_sum(i);
      slack += std::max(0.0, a[i]);
    }
    r.residual_slack = slack;
    if (slack < stop) break;
    if (r.iterations >= opt.max_iterations) {
      throw ConvergenceError("capacity allocation did not converge; residual slack " +
                             std::to_string(slack));
    }
    for (std::size_t i = 0; i < k; ++i) {
      row_on[i] = a[i] > saturated;
      col_on[i] = b[i] > saturated;
    }
    std::vector<double> row_root(k, 0.0), col_root(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        if (row_on[i] && col_on[j]) {
          row_root[i] += root(i, j);
          col_root[j] += root(i, j);
        }
    bool moved = false;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        if (!row_on[i] || !col_on[j]) continue;
        const double inc = std::min(a[i] * root(i, j) / row_root[i],
                                    b[j] * root(i, j) / col_root[j]);
        const double before = r.c(i, j);
        r.c(i, j) += inc;
        if (r.c(i, j) > before) {
          moved = true;
        } else {
          r.monotone = false;
        }
      }
    ++r.iterations;
    if (!moved) {
      throw ConvergenceError("capacity allocation stalled; residual slack " +
                             std::to_string(slack));
    }
  }
  return r;
}

double weighted_delay(const RealMatrix& c, const RealMatrix& lambda) {
  if (c.rows() != lambda.rows() || c.cols() != lambda.cols()) {
    throw PreconditionError("capacity and traffic shapes differ");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) {
      if (!(c(i, j) > lambda(i, j))) {
        throw DomainError("capacity must exceed arrival rate on every path");
      }
      d += lambda(i, j) / (c(i, j) - lambda(i, j));
    }
  return d;
}

GridOptimum grid_search_delay_2x2(const RealMatrix& lambda, double m, int steps) {
  if (lambda.rows() != 2 || lambda.cols() != 2) throw PreconditionError("2 x 2 traffic required");
  if (steps < 2) throw PreconditionError("grid needs at least 2 steps");
  const double lo = std::max(lambda(0, 0), lambda(1, 1));
  const double hi = m - std::max(lambda(0, 1), lambda(1, 0));
  if (!(hi > lo)) throw DomainError("no feasible capacity assignment");
  GridOptimum best{0.0, std::numeric_limits<double>::infinity()};
  RealMatrix c(2, 2);
  for (int s = 1; s < steps; ++s) {
    const double x = lo + (hi - lo) * s / steps;
    c(0, 0) = c(1, 1) = x;
    c(0, 1) = c(1, 0) = m - x;
    const double d = weighted_delay(c, lambda);
    if (d < best.delay) best = {x, d};
  }
  return best;
}

bool is_permutation_matrix(const IntMatrix& p) {
  if (!p.square()) return false;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    if (p.row_sum(i) != 1 || p.col_sum(i) != 1) return false;
    for (std::size_t j = 0; j < p.cols(); ++j)
      if (p(i, j) != 0 && p(i, j) != 1) return false;
  }
  return true;
}

RationalMatrix Decomposition::reconstruct() const {
  const std::size_t n = states.empty() ? 0 : states.front().pattern.rows();
  RationalMatrix out(n, n, Rational(0));
  for (const auto& s : states)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) += s.weight * s.pattern(i, j);
  return out;
}

Rational Decomposition::total_weight() const {
  Rational w(0);
  for (const auto& s : states) w += s.weight;
  return w;
}

Decomposition bvn_decompose(const CapacityMatrix& cap) {
  IntMatrix residual = cap.counts();
  const std::size_t n = residual.rows();
  const int m = cap.modules;
  Decomposition d;
  d.modules = m;
  d.frame = cap.frame;
  for (std::size_t i = 0; i < n; ++i) {
    if (residual.row_sum(i) != m * cap.frame || residual.col_sum(i) != m * cap.frame) {
      throw PreconditionError("F c rows and columns must sum to m F");
    }
  }

  while (true) {
    BipartiteGraph support(static_cast<int>(n), static_cast<int>(n));
    std::vector<std::pair<int, int>> cell;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (residual(i, j) > 0) {
          support.add_edge(static_cast<int>(i), static_cast<int>(j));
          cell.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
    if (cell.empty()) break;
    const auto match = complete_matching(support);
    if (!match.complete) throw std::logic_error("residual lost its perfect matching");
    std::int64_t mult = std::numeric_limits<std::int64_t>::max();
    IntMatrix perm(n, n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const int j = match.mate_of_left[i];
      perm(i, j) = 1;
      mult = std::min(mult, residual(i, j));
    }
    for (std::size_t i = 0; i < n; ++i) residual(i, match.mate_of_left[i]) -= mult;
    for (std::int64_t r = 0; r < mult; ++r) d.permutations.push_back(perm);
  }

  std::map<IntMatrix, int> index;
  for (std::size_t t = 0; t * m < d.permutations.size(); ++t) {
    IntMatrix g(n, n, 0);
    for (int r = 0; r < m; ++r) g += d.permutations[t * m + r];
    auto [it, fresh] = index.emplace(g, static_cast<int>(d.states.size()));
    if (fresh) d.states.push_back({g, 0, Rational(0)});
    ++d.states[it->second].multiplicity;
    d.slot_state.push_back(it->second);
    d.slots.push_back(std::move(g));
  }
  for (auto& s : d.states) s.weight = Rational(s.multiplicity, cap.frame);
  return d;
}

namespace {

// Successive shortest paths with Bellman-Ford; graphs here are tiny.
struct MinCostFlow {
  struct Arc {
    int to, rev;
    int cap;
    double cost;
  };
  std::vector<std::vector<Arc>> g;
  explicit MinCostFlow(int n) : g(n) {}
  void add(int u, int v, int cap, double cost) {
    g[u].push_back({v, static_cast<int>(g[v].size()), cap, cost});
    g[v].push_back({u, static_cast<int>(g[u].size()) - 1, 0, -cost});
  }
  int run(int s, int t, int want) {
    int flow = 0;
    const int n = static_cast<int>(g.size());
    while (flow < want) {
      std::vector<double> dist(n, std::numeric_limits<double>::infinity());
      std::vector<int> pv(n, -1), pe(n, -1);
      dist[s] = 0.0;
      for (int round = 0; round < n; ++round) {
        bool changed = false;
        for (int u = 0; u < n; ++u) {
          if (dist[u] == std::numeric_limits<double>::infinity()) continue;
          for (int e = 0; e < static_cast<int>(g[u].size()); ++e) {
            const auto& a = g[u][e];
            if (a.cap > 0 && dist[u] + a.cost < dist[a.to] - 1e-15) {
              dist[a.to] = dist[u] + a.cost;
              pv[a.to] = u;
              pe[a.to] = e;
              changed = true;
            }
          }
        }
        if (!changed) break;
      }
      if (pv[t] < 0) break;
      int push = want - flow;
      for (int v = t; v != s; v = pv[v]) push = std::min(push, g[pv[v]][pe[v]].cap);
      for (int v = t; v != s; v = pv[v]) {
        auto& a = g[pv[v]][pe[v]];
        a.cap -= push;
        g[v][a.rev].cap += push;
      }
      flow += push;
    }
    return flow;
  }
};

}  // namespace

RoundingResult bandlimit_and_round(const RealMatrix& c, int modules, std::int64_t frame_target) {
  if (frame_target < 1) throw PreconditionError("frame size must be at least 1");
  if (!c.square()) throw PreconditionError("capacity matrix must be square");
  const std::size_t n = c.rows();
  const std::int64_t target = modules * frame_target;
  const double scale = static_cast<double>(frame_target);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(c.row_sum(i) - modules) > 1e-6 || std::abs(c.col_sum(i) - modules) > 1e-6) {
      throw PreconditionError("row/column " + std::to_string(i) + " does not sum to m");
    }
  }

  IntMatrix base(n, n);
  RealMatrix frac(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double x = c(i, j) * scale;
      if (x < -1e-9) throw PreconditionError("negative capacity");
      double fl = std::floor(x);
      if (x - fl > 1.0 - 1e-9) fl += 1.0;
      base(i, j) = static_cast<std::int64_t>(fl);
      frac(i, j) = std::max(0.0, x - fl);
    }

  // rows shortfall -> columns shortfall, one unit per fractional entry,
  // preferring the largest remainders
  const int src = static_cast<int>(2 * n), dst = src + 1;
  MinCostFlow flow(static_cast<int>(2 * n + 2));
  int need = 0, col_need = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = target - base.row_sum(i);
    const auto q = target - base.col_sum(i);
    if (r < 0 || q < 0) throw std::logic_error("floored matrix exceeds its sums");
    flow.add(src, static_cast<int>(i), static_cast<int>(r), 0.0);
    flow.add(static_cast<int>(n + i), dst, static_cast<int>(q), 0.0);
    need += static_cast<int>(r);
    col_need += static_cast<int>(q);
    for (std::size_t j = 0; j < n; ++j)
      if (frac(i, j) > 1e-9) flow.add(static_cast<int>(i), static_cast<int>(n + j), 1, -frac(i, j));
  }
  if (need != col_need || flow.run(src, dst, need) != need) {
    throw PreconditionError("rounding cannot preserve row and column sums at frame " +
                            std::to_string(frame_target));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& a : flow.g[i])
      if (a.to >= static_cast<int>(n) && a.to < src && a.cap == 0 && a.cost < 0.0) {
        ++base(i, a.to - n);
      }

  RoundingResult r;
  r.c = CapacityMatrix::from_counts(base, frame_target, modules);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      r.max_error = std::max(r.max_error, std::abs(c(i, j) - static_cast<double>(base(i, j)) / scale));
  return r;
}

RoundingResult bandlimit_and_round(const CapacityMatrix& c, std::int64_t frame_target) {
  return bandlimit_and_round(to_real(c.c), c.modules, frame_target);
}

}  // namespace swlab
