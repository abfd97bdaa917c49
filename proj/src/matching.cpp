#include "swlab/matching.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <queue>
#include <string>

#include "swlab/errors.hpp"

namespace swlab {

BipartiteGraph::BipartiteGraph(int left_count, int right_count)
    : left_count_(left_count), right_count_(right_count), left_adj_(left_count) {
  if (left_count < 0 || right_count < 0) throw PreconditionError("negative vertex count");
}

int BipartiteGraph::add_edge(int left, int right) {
  if (left < 0 || left >= left_count_ || right < 0 || right >= right_count_) {
    throw PreconditionError("edge endpoint out of range");
  }
  edges_.push_back({left, right});
  const int id = static_cast<int>(edges_.size()) - 1;
  left_adj_[left].push_back(id);
  return id;
}

int BipartiteGraph::right_degree(int v) const {
  return static_cast<int>(std::count_if(edges_.begin(), edges_.end(),
                                        [v](const Edge& e) { return e.right == v; }));
}

int BipartiteGraph::regular_degree() const {
  if (left_count_ == 0 && right_count_ == 0) return 0;
  std::vector<int> rdeg(right_count_, 0);
  for (const auto& e : edges_) ++rdeg[e.right];
  const int d = left_count_ > 0 ? left_degree(0) : rdeg[0];
  for (int v = 0; v < left_count_; ++v)
    if (left_degree(v) != d) return -1;
  for (int v = 0; v < right_count_; ++v)
    if (rdeg[v] != d) return -1;
  return d;
}

Matching complete_matching(const BipartiteGraph& g, const std::vector<bool>& usable) {
  const int nl = g.left_count();
  const int nr = g.right_count();
  auto ok = [&](int e) { return usable.empty() || usable[e]; };
  constexpr int kInf = std::numeric_limits<int>::max();

  std::vector<int> edge_of_left(nl, -1);
  std::vector<int> left_of_right(nr, -1);
  std::vector<int> dist(nl);

  auto bfs = [&]() {
    std::queue<int> q;
    bool found = false;
    for (int u = 0; u < nl; ++u) {
      if (edge_of_left[u] < 0) {
        dist[u] = 0;
        q.push(u);
      } else {
        dist[u] = kInf;
      }
    }
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int e : g.left_edges(u)) {
        if (!ok(e)) continue;
        const int w = left_of_right[g.edge(e).right];
        if (w < 0) {
          found = true;
        } else if (dist[w] == kInf) {
          dist[w] = dist[u] + 1;
          q.push(w);
        }
      }
    }
    return found;
  };

  std::vector<std::size_t> cursor(nl);
  auto dfs = [&](auto&& self, int u) -> bool {
    const auto& adj = g.left_edges(u);
    for (; cursor[u] < adj.size(); ++cursor[u]) {
      const int e = adj[cursor[u]];
      if (!ok(e)) continue;
      const int v = g.edge(e).right;
      const int w = left_of_right[v];
      if (w < 0 || (dist[w] == dist[u] + 1 && self(self, w))) {
        edge_of_left[u] = e;
        left_of_right[v] = u;
        return true;
      }
    }
    dist[u] = kInf;
    return false;
  };

  Matching m;
  while (bfs()) {
    std::fill(cursor.begin(), cursor.end(), 0);
    for (int u = 0; u < nl; ++u) {
      if (edge_of_left[u] < 0 && dfs(dfs, u)) ++m.size;
    }
  }
  m.edge_of_left = edge_of_left;
  m.mate_of_left.assign(nl, -1);
  for (int u = 0; u < nl; ++u)
    if (edge_of_left[u] >= 0) m.mate_of_left[u] = g.edge(edge_of_left[u]).right;
  m.complete = m.size == nl;

  if (!m.complete) {
    // Koenig: alternating reach from free left vertices gives a deficient set.
    std::vector<bool> seen_l(nl, false), seen_r(nr, false);
    std::queue<int> q;
    for (int u = 0; u < nl; ++u) {
      if (edge_of_left[u] < 0) {
        seen_l[u] = true;
        q.push(u);
      }
    }
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int e : g.left_edges(u)) {
        if (!ok(e)) continue;
        const int v = g.edge(e).right;
        if (seen_r[v]) continue;
        seen_r[v] = true;
        const int w = left_of_right[v];
        if (w >= 0 && !seen_l[w]) {
          seen_l[w] = true;
          q.push(w);
        }
      }
    }
    for (int u = 0; u < nl; ++u)
      if (seen_l[u]) m.hall_violator.push_back(u);
  }
  return m;
}

namespace {

std::vector<int> neighborhood(const BipartiteGraph& g, const std::vector<int>& set) {
  std::vector<bool> hit(g.right_count(), false);
  for (int u : set)
    for (int e : g.left_edges(u)) hit[g.edge(e).right] = true;
  std::vector<int> out;
  for (int v = 0; v < g.right_count(); ++v)
    if (hit[v]) out.push_back(v);
  return out;
}

}  // namespace

HallVerdict hall_check(const BipartiteGraph& g) {
  HallVerdict verdict;
  const int nl = g.left_count();
  if (nl <= 20 && g.right_count() <= 64) {
    std::vector<std::uint64_t> nbr(std::size_t{1} << nl, 0);
    std::uint32_t best = 0;
    for (std::uint32_t mask = 1; mask < (1u << nl); ++mask) {
      const int low = std::countr_zero(mask);
      std::uint64_t own = 0;
      for (int e : g.left_edges(low)) own |= std::uint64_t{1} << g.edge(e).right;
      nbr[mask] = nbr[mask & (mask - 1)] | own;
      if (std::popcount(nbr[mask]) < std::popcount(mask)) {
        if (best == 0 || std::popcount(mask) < std::popcount(best)) best = mask;
      }
    }
    if (best != 0) {
      verdict.satisfied = false;
      for (int u = 0; u < nl; ++u)
        if (best >> u & 1u) verdict.violating_set.push_back(u);
    }
  } else {
    const auto m = complete_matching(g);
    if (!m.complete) {
      verdict.satisfied = false;
      verdict.violating_set = m.hall_violator;
    }
  }
  if (!verdict.satisfied) verdict.neighborhood = neighborhood(g, verdict.violating_set);
  return verdict;
}

EdgeColoring edge_color(const BipartiteGraph& g, int colors) {
  const int d = g.regular_degree();
  if (d < 0) throw PreconditionError("edge coloring needs a regular bipartite graph");
  if (colors < d) {
    throw PreconditionError("need at least " + std::to_string(d) + " colors, got " +
                            std::to_string(colors));
  }
  EdgeColoring c;
  c.color_of.assign(g.edge_count(), -1);
  std::vector<bool> left_over(g.edge_count(), true);
  for (int color = 0; color < d; ++color) {
    const auto m = complete_matching(g, left_over);
    if (!m.complete) throw std::logic_error("regular graph without a perfect matching");
    for (int e : m.edge_of_left) {
      c.color_of[e] = color;
      left_over[e] = false;
    }
  }
  c.colors_used = d;
  return c;
}

bool is_proper_coloring(const BipartiteGraph& g, const EdgeColoring& c) {
  if (static_cast<int>(c.color_of.size()) != g.edge_count()) return false;
  std::vector<std::vector<bool>> used_l(g.left_count()), used_r(g.right_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const int col = c.color_of[e];
    if (col < 0) return false;
    auto& ul = used_l[g.edge(e).left];
    auto& ur = used_r[g.edge(e).right];
    if (static_cast<int>(ul.size()) <= col) ul.resize(col + 1, false);
    if (static_cast<int>(ur.size()) <= col) ur.resize(col + 1, false);
    if (ul[col] || ur[col]) return false;
    ul[col] = ur[col] = true;
  }
  return true;
}

std::vector<CallRequest> requests_from_permutation(std::span<const int> perm) {
  std::vector<CallRequest> out;
  for (int s = 0; s < static_cast<int>(perm.size()); ++s) out.push_back({s, perm[s]});
  return out;
}

namespace {

void check_requests(const ClosSpec& spec, std::span<const CallRequest> requests) {
  std::vector<bool> src(spec.ports(), false), dst(spec.ports(), false);
  for (const auto& r : requests) {
    if (r.source < 0 || r.source >= spec.ports() || r.destination < 0 ||
        r.destination >= spec.ports()) {
      throw DomainError("request endpoint outside the port range");
    }
    if (src[r.source]) throw PreconditionError("duplicate source " + std::to_string(r.source));
    if (dst[r.destination]) {
      throw PreconditionError("duplicate destination " + std::to_string(r.destination));
    }
    src[r.source] = dst[r.destination] = true;
  }
}

}  // namespace

std::vector<RoutingTag> clos_route_assignment(const ClosSpec& spec,
                                              std::span<const CallRequest> requests) {
  if (spec.m < spec.n) {
    throw PreconditionError("m < n: rearrangeable route assignment unsupported");
  }
  check_requests(spec, requests);

  std::vector<CallRequest> all(requests.begin(), requests.end());
  std::vector<bool> src(spec.ports(), false), dst(spec.ports(), false);
  for (const auto& r : requests) src[r.source] = dst[r.destination] = true;
  int d = 0;
  for (int s = 0; s < spec.ports(); ++s) {
    if (src[s]) continue;
    while (dst[d]) ++d;
    all.push_back({s, d});
    dst[d] = true;
  }

  BipartiteGraph g(spec.k, spec.k);
  for (const auto& r : all) g.add_edge(r.source / spec.n, r.destination / spec.n);
  const auto coloring = edge_color(g, spec.m);

  std::vector<RoutingTag> tags;
  tags.reserve(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto split = address_split(requests[i].destination, spec);
    tags.push_back({coloring.color_of[i], split.quotient, split.remainder});
  }
  return tags;
}

bool is_nonblocking_assignment(const ClosSpec& spec, std::span<const CallRequest> requests,
                               std::span<const RoutingTag> tags, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (requests.size() != tags.size()) return fail("tag count differs from request count");
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const auto& t = tags[i];
    if (t.central < 0 || t.central >= spec.m) return fail("central module out of range");
    if (t.out_module < 0 || t.out_module >= spec.k || t.out_port < 0 || t.out_port >= spec.n) {
      return fail("output digits out of range");
    }
    if (t.destination(spec.n) != requests[i].destination) {
      return fail("tag does not reach destination " + std::to_string(requests[i].destination));
    }
  }
  // a central module can carry one call per input module and one per output module
  std::vector<int> in_use(spec.k * spec.m, -1), out_use(spec.k * spec.m, -1);
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const int g = tags[i].central;
    const int qs = requests[i].source / spec.n;
    const int qd = requests[i].destination / spec.n;
    int& a = in_use[qs * spec.m + g];
    int& b = out_use[qd * spec.m + g];
    if (a >= 0) {
      return fail("sources " + std::to_string(requests[a].source) + " and " +
                  std::to_string(requests[i].source) + " share input module and central module");
    }
    if (b >= 0) {
      return fail("destinations " + std::to_string(requests[b].destination) + " and " +
                  std::to_string(requests[i].destination) +
                  " share output module and central module");
    }
    a = b = static_cast<int>(i);
  }
  return true;
}

namespace {

void check_permutation(std::span<const int> perm) {
  std::vector<bool> seen(perm.size(), false);
  for (int v : perm) {
    if (v < 0 || v >= static_cast<int>(perm.size()) || seen[v]) {
      throw PreconditionError("not a permutation");
    }
    seen[v] = true;
  }
}

}  // namespace

BenesConstraintSystem benes_constraints(std::span<const int> perm) {
  const int n = static_cast<int>(perm.size());
  if (n == 0 || n % 2 != 0) throw DomainError("Benes constraints need an even size");
  check_permutation(perm);
  BenesConstraintSystem sys;
  sys.size = n;
  std::vector<int> inverse(n);
  for (int i = 0; i < n; ++i) inverse[perm[i]] = i;
  for (int t = 0; t < n / 2; ++t) {
    sys.input_pairs.emplace_back(2 * t, 2 * t + 1);
    sys.output_pairs.emplace_back(inverse[2 * t], inverse[2 * t + 1]);
  }
  return sys;
}

int unsatisfied_constraints(const BenesConstraintSystem& sys, std::span<const int> x) {
  int bad = 0;
  for (const auto& [i, j] : sys.input_pairs) bad += (x[i] + x[j] != 1);
  for (const auto& [i, j] : sys.output_pairs) bad += (x[i] + x[j] != 1);
  return bad;
}

FlipResult benes_flip_assign(std::span<const int> perm) {
  const auto sys = benes_constraints(perm);
  const int n = sys.size;
  std::vector<int> in_mate(n), out_mate(n);
  for (const auto& [i, j] : sys.input_pairs) in_mate[i] = j, in_mate[j] = i;
  for (const auto& [i, j] : sys.output_pairs) out_mate[i] = j, out_mate[j] = i;

  FlipResult r;
  r.x.resize(n);
  for (int i = 0; i < n; ++i) r.x[i] = i % 2;
  auto unsat = [&](int i) { return r.x[i] == r.x[out_mate[i]]; };
  for (const auto& [i, j] : sys.output_pairs) r.initially_unsatisfied += (r.x[i] == r.x[j]);

  std::vector<bool> visited(n, false);
  for (int start = 0; start < n; ++start) {
    if (visited[start]) continue;
    ++r.cycles;
    // collect the cycle: alternate input-side and output-side neighbours
    std::vector<int> cycle;
    int v = start;
    do {
      cycle.push_back(v);
      cycle.push_back(in_mate[v]);
      v = out_mate[in_mate[v]];
    } while (v != start);
    int lowest = -1;
    int bad_vertices = 0;
    for (int u : cycle) {
      visited[u] = true;
      if (unsat(u)) {
        ++bad_vertices;
        if (lowest < 0 || u < lowest) lowest = u;
      }
    }
    if ((bad_vertices / 2) % 2 != 0) r.even_unsatisfied_per_cycle = false;
    if (lowest < 0) continue;

    // walk from the lowest unsatisfied vertex away from its broken edge;
    // crossing a broken output edge switches between alpha and beta
    std::vector<int> alpha;
    bool in_alpha = true;
    int u = lowest;
    for (std::size_t steps = 0; steps < cycle.size(); steps += 2) {
      const int w = in_mate[u];
      if (in_alpha) {
        alpha.push_back(u);
        alpha.push_back(w);
      }
      const int next = out_mate[w];
      if (r.x[w] == r.x[next]) in_alpha = !in_alpha;
      u = next;
    }
    for (int a : alpha) r.x[a] ^= 1;
    r.flips += static_cast<int>(alpha.size());
  }
  return r;
}

ComponentCount count_components(const BenesConstraintSystem& sys) {
  std::vector<std::vector<int>> adj(sys.size);
  for (const auto& [i, j] : sys.input_pairs) adj[i].push_back(j), adj[j].push_back(i);
  for (const auto& [i, j] : sys.output_pairs) adj[i].push_back(j), adj[j].push_back(i);
  std::vector<bool> seen(sys.size, false);
  ComponentCount c;
  for (int s = 0; s < sys.size; ++s) {
    if (seen[s]) continue;
    ++c.components;
    std::vector<int> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int w : adj[u]) {
        if (!seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
  }
  if (c.components >= 64) throw ResourceError("solution count exceeds 64 bits");
  c.solutions = std::uint64_t{1} << c.components;
  return c;
}

std::uint64_t count_solutions_exhaustive(const BenesConstraintSystem& sys) {
  if (sys.size > 24) throw ResourceError("exhaustive count limited to 24 variables");
  std::uint64_t count = 0;
  std::vector<int> x(sys.size);
  for (std::uint32_t mask = 0; mask < (1u << sys.size); ++mask) {
    for (int i = 0; i < sys.size; ++i) x[i] = mask >> i & 1u;
    if (unsatisfied_constraints(sys, x) == 0) ++count;
  }
  return count;
}

namespace {

int log2_exact(int n) {
  if (n < 2 || !std::has_single_bit(static_cast<unsigned>(n))) {
    throw DomainError("Benes network size must be a power of two, got " + std::to_string(n));
  }
  return std::countr_zero(static_cast<unsigned>(n));
}

void assign_level(BenesSettings& out, int t, int level, int block, const std::vector<int>& perm) {
  const int s = static_cast<int>(perm.size());
  if (s == 2) {
    out.settings[t - 1][block] = perm[0] == 1;
    return;
  }
  const auto flip = benes_flip_assign(perm);
  const int half = s / 2;
  std::vector<int> upper(half), lower(half);
  const int last = 2 * t - 2 - level;
  for (int u = 0; u < half; ++u) {
    const bool cross = flip.x[2 * u] == 1;
    const int up = cross ? 2 * u + 1 : 2 * u;
    const int down = cross ? 2 * u : 2 * u + 1;
    out.settings[level][block * half + u] = cross;
    upper[u] = perm[up] / 2;
    lower[u] = perm[down] / 2;
    out.settings[last][block * half + perm[up] / 2] = perm[up] % 2 == 1;
  }
  assign_level(out, t, level + 1, 2 * block, upper);
  assign_level(out, t, level + 1, 2 * block + 1, lower);
}

}  // namespace

BenesSettings benes_full_assign(std::span<const int> perm) {
  const int n = static_cast<int>(perm.size());
  const int t = log2_exact(n);
  check_permutation(perm);
  BenesSettings s;
  s.size = n;
  s.settings.assign(2 * t - 1, std::vector<bool>(n / 2, false));
  assign_level(s, t, 0, 0, std::vector<int>(perm.begin(), perm.end()));
  return s;
}

BenesWalk walk_benes(const BenesSettings& s) {
  const int n = s.size;
  const int t = log2_exact(n);
  const int stages = 2 * t - 1;
  if (static_cast<int>(s.settings.size()) != stages) throw PreconditionError("stage count mismatch");
  BenesWalk walk;
  walk.realized.assign(n, -1);
  std::vector<std::vector<int>> used(stages, std::vector<int>(n, 0));

  for (int input = 0; input < n; ++input) {
    int st = 0, w = input / 2, port = input % 2;
    while (true) {
      const int out = port ^ static_cast<int>(s.settings[st][w]);
      if (++used[st][2 * w + out] > 1) walk.link_conflict = true;
      if (st == stages - 1) {
        walk.realized[input] = 2 * w + out;
        break;
      }
      if (st < t - 1) {
        // into the upper (out = 0) or lower child network
        const int size = n >> st;
        const int per = size / 2;
        const int block = w / per, local = w % per;
        w = (2 * block + out) * (size / 4) + local / 2;
        port = local % 2;
      } else {
        // out of a child network into its parent's output column
        const int level = st == t - 1 ? t - 1 : stages - 1 - st;
        const int size = n >> level;
        const int per = size / 2;
        const int child = w / per;
        const int local = 2 * (w % per) + out;
        w = (child / 2) * size + local;
        port = child % 2;
      }
      ++st;
    }
  }
  return walk;
}

}  // namespace swlab
