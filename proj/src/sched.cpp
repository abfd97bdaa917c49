#include "swlab/sched.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "swlab/errors.hpp"

namespace swlab {

WeightSet WeightSet::from_counts(std::vector<std::int64_t> counts) {
  if (counts.empty()) throw PreconditionError("weight set is empty");
  for (auto n : counts)
    if (n <= 0) throw PreconditionError("every weight must be positive");
  WeightSet w;
  w.frame_ = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  w.counts_ = std::move(counts);
  return w;
}

WeightSet WeightSet::from_rationals(const std::vector<Rational>& weights) {
  std::int64_t frame = 1;
  Rational total(0);
  for (const auto& r : weights) {
    frame = std::lcm(frame, r.denominator());
    total += r;
  }
  if (total != Rational(1)) throw PreconditionError("weights must sum to 1");
  std::vector<std::int64_t> counts;
  for (const auto& r : weights) counts.push_back((r * frame).numerator());
  return from_counts(std::move(counts));
}

WeightSet WeightSet::from_decimals(const std::vector<double>& weights, std::int64_t frame) {
  std::vector<std::int64_t> counts;
  for (double x : weights) {
    const double scaled = x * static_cast<double>(frame);
    const auto n = std::llround(scaled);
    if (std::abs(scaled - static_cast<double>(n)) > 1e-9) {
      throw PreconditionError("weight does not lie on the frame grid");
    }
    counts.push_back(n);
  }
  auto w = from_counts(std::move(counts));
  if (w.frame() != frame) throw PreconditionError("weights must sum to 1");
  return w;
}

namespace {

// Finish time of state i after `served` selections, up to the common
// factor F: (served + 1) / n_i. Compared by cross multiplication.
struct Fair {
  std::vector<std::int64_t> counts;
  std::vector<std::int64_t> served;
  TieBreak tie;

  bool before(int a, int b) const {
    const auto lhs = static_cast<__int128>(served[a] + 1) * counts[b];
    const auto rhs = static_cast<__int128>(served[b] + 1) * counts[a];
    if (lhs != rhs) return lhs < rhs;
    switch (tie) {
      case TieBreak::kMostRemaining: {
        const auto ra = counts[a] - served[a], rb = counts[b] - served[b];
        if (ra != rb) return ra > rb;
        break;
      }
      case TieBreak::kLargerWeight:
        if (counts[a] != counts[b]) return counts[a] > counts[b];
        break;
      case TieBreak::kLowerIndex:
        break;
    }
    return a < b;
  }
};

std::vector<int> wfq_counts(const std::vector<std::int64_t>& counts, TieBreak tie,
                            std::vector<std::vector<Rational>>* trace) {
  Fair f{counts, std::vector<std::int64_t>(counts.size(), 0), tie};
  const std::int64_t length = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  std::vector<int> seq;
  seq.reserve(length);
  for (std::int64_t slot = 0; slot < length; ++slot) {
    if (trace) {
      std::vector<Rational> row;
      for (std::size_t i = 0; i < counts.size(); ++i)
        row.emplace_back((f.served[i] + 1) * length, counts[i]);
      trace->push_back(std::move(row));
    }
    int pick = -1;
    for (int i = 0; i < static_cast<int>(counts.size()); ++i) {
      if (f.served[i] >= counts[i]) continue;
      if (pick < 0 || f.before(i, pick)) pick = i;
    }
    ++f.served[pick];
    seq.push_back(pick);
  }
  return seq;
}

}  // namespace

FrameSequence schedule_wfq(const WeightSet& w, TieBreak tie,
                           std::vector<std::vector<Rational>>* finish_trace) {
  return wfq_counts(w.counts(), tie, finish_trace);
}

FrameSequence schedule_wf2q(const WeightSet& w, const Wf2qOptions& opt, Wf2qTrace* trace) {
  Fair f{w.counts(), std::vector<std::int64_t>(w.size(), 0), opt.tie};
  const std::int64_t frame = w.frame();
  FrameSequence seq;
  for (std::int64_t tau = 1; tau <= frame; ++tau) {
    std::vector<int> qualified;
    for (int i = 0; i < w.size(); ++i) {
      const auto t = static_cast<__int128>(f.served[i]) * frame;
      const bool ok = opt.eligibility == Eligibility::kStartTime
                          ? t <= static_cast<__int128>(tau - 1) * w.count(i)
                          : t < static_cast<__int128>(tau) * w.count(i);
      if (ok && f.served[i] < w.count(i)) qualified.push_back(i);
    }
    if (qualified.empty()) throw std::logic_error("no qualified state in a valid frame");
    if (trace) {
      std::vector<Rational> row;
      for (int i = 0; i < w.size(); ++i) row.emplace_back((f.served[i] + 1) * frame, w.count(i));
      trace->finish.push_back(std::move(row));
      trace->qualified.push_back(qualified);
    }
    int pick = qualified.front();
    for (int i : qualified)
      if (f.before(i, pick)) pick = i;
    ++f.served[pick];
    seq.push_back(pick);
  }
  return seq;
}

std::vector<HuffmanNode> huffman_tree(const WeightSet& w) {
  std::vector<HuffmanNode> nodes;
  std::vector<int> open;
  for (int i = 0; i < w.size(); ++i) {
    nodes.push_back({w.count(i), i, -1, -1, i});
    open.push_back(i);
  }
  auto smaller = [&](int a, int b) {
    if (nodes[a].count != nodes[b].count) return nodes[a].count < nodes[b].count;
    return nodes[a].min_leaf < nodes[b].min_leaf;
  };
  while (open.size() > 1) {
    std::sort(open.begin(), open.end(), smaller);
    int a = open[0], b = open[1];
    if (nodes[b].min_leaf < nodes[a].min_leaf) std::swap(a, b);
    nodes.push_back({nodes[a].count + nodes[b].count, nodes[a].min_leaf, a, b, -1});
    open.erase(open.begin(), open.begin() + 2);
    open.push_back(static_cast<int>(nodes.size()) - 1);
  }
  return nodes;
}

FrameSequence schedule_hurr(const WeightSet& w, TieBreak tie) {
  const auto nodes = huffman_tree(w);
  FrameSequence seq(w.frame(), -1);
  std::vector<std::int64_t> all(w.frame());
  std::iota(all.begin(), all.end(), std::int64_t{0});

  // each internal node spreads its slots over its two children by WFQ
  std::function<void(int, const std::vector<std::int64_t>&)> expand =
      [&](int id, const std::vector<std::int64_t>& slots) {
        const auto& node = nodes[id];
        if (node.leaf >= 0) {
          for (auto s : slots) seq[s] = node.leaf;
          return;
        }
        const auto order = wfq_counts({nodes[node.left].count, nodes[node.right].count}, tie, nullptr);
        std::vector<std::int64_t> left, right;
        for (std::size_t k = 0; k < order.size(); ++k) (order[k] == 0 ? left : right).push_back(slots[k]);
        expand(node.left, left);
        expand(node.right, right);
      };
  expand(static_cast<int>(nodes.size()) - 1, all);
  return seq;
}

std::vector<int> schedule_random(const WeightSet& w, std::uint64_t slots, std::uint64_t seed) {
  if (slots < 1) throw PreconditionError("slots must be positive");
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> pick(w.counts().begin(), w.counts().end());
  std::vector<int> seq(slots);
  for (auto& s : seq) s = pick(rng);
  return seq;
}

void check_frame(const FrameSequence& seq, const WeightSet& w) {
  if (static_cast<std::int64_t>(seq.size()) != w.frame()) {
    throw DomainError("sequence length differs from the frame size");
  }
  std::vector<std::int64_t> seen(w.size(), 0);
  for (int s : seq) {
    if (s < 0 || s >= w.size()) throw DomainError("state index out of range");
    ++seen[s];
  }
  for (int i = 0; i < w.size(); ++i)
    if (seen[i] != w.count(i)) {
      throw DomainError("state " + std::to_string(i + 1) + " occurs " + std::to_string(seen[i]) +
                        " times, expected " + std::to_string(w.count(i)));
    }
}

namespace {

std::vector<std::int64_t> circular_gaps(std::vector<std::int64_t> slots, std::int64_t frame) {
  std::sort(slots.begin(), slots.end());
  std::vector<std::int64_t> gaps;
  for (std::size_t k = 0; k + 1 < slots.size(); ++k) gaps.push_back(slots[k + 1] - slots[k]);
  if (!slots.empty()) gaps.push_back(slots.front() + frame - slots.back());
  return gaps;
}

double log_rms(const std::vector<std::int64_t>& gaps) {
  double sq = 0.0;
  for (auto y : gaps) sq += static_cast<double>(y) * static_cast<double>(y);
  return 0.5 * std::log2(sq / static_cast<double>(gaps.size()));
}

}  // namespace

std::vector<std::int64_t> interstate_times(const FrameSequence& seq, int state, std::int64_t frame) {
  std::vector<std::int64_t> slots;
  for (std::size_t t = 0; t < seq.size(); ++t)
    if (seq[t] == state) slots.push_back(static_cast<std::int64_t>(t));
  return circular_gaps(slots, frame);
}

double entropy(const WeightSet& w) {
  double h = 0.0;
  for (int i = 0; i < w.size(); ++i) h -= w.phi(i) * std::log2(w.phi(i));
  return h;
}

double random_schedule_excess(const WeightSet& w) {
  double e = 0.0;
  for (int i = 0; i < w.size(); ++i) e += w.phi(i) * std::log2(2.0 - w.phi(i));
  return e / 2.0;
}

SmoothnessReport smoothness(const FrameSequence& seq, const WeightSet& w) {
  check_frame(seq, w);
  SmoothnessReport r;
  r.entropy = entropy(w);
  for (int i = 0; i < w.size(); ++i) {
    const double li = log_rms(interstate_times(seq, i, w.frame()));
    r.per_state.push_back(li);
    r.average += w.phi(i) * li;
    r.kraft_sum += std::exp2(-li);
  }
  return r;
}

SmoothnessReport sequence_smoothness(std::span<const int> seq, const WeightSet& w) {
  SmoothnessReport r;
  r.entropy = entropy(w);
  std::vector<std::int64_t> last(w.size(), -1);
  std::vector<double> sq(w.size(), 0.0);
  std::vector<std::int64_t> gaps(w.size(), 0);
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const int s = seq[t];
    if (s < 0 || s >= w.size()) throw DomainError("state index out of range");
    if (last[s] >= 0) {
      const double y = static_cast<double>(static_cast<std::int64_t>(t) - last[s]);
      sq[s] += y * y;
      ++gaps[s];
    }
    last[s] = static_cast<std::int64_t>(t);
  }
  for (int i = 0; i < w.size(); ++i) {
    const double li = gaps[i] > 0 ? 0.5 * std::log2(sq[i] / static_cast<double>(gaps[i])) : 0.0;
    r.per_state.push_back(li);
    r.average += w.phi(i) * li;
    r.kraft_sum += std::exp2(-li);
  }
  return r;
}

std::string format_sequence(const FrameSequence& seq) {
  std::string out;
  for (int s : seq) out += "P" + std::to_string(s + 1);
  return out;
}

FrameSequence parse_sequence(const std::string& text) {
  FrameSequence seq;
  std::size_t k = 0;
  while (k < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[k])) || text[k] == ',') {
      ++k;
      continue;
    }
    if (text[k] != 'P' && text[k] != 'p') throw PreconditionError("state labels look like P1P2...");
    std::size_t end = k + 1;
    while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
    if (end == k + 1) throw PreconditionError("missing state number");
    seq.push_back(std::stoi(text.substr(k + 1, end - k - 1)) - 1);
    k = end;
  }
  return seq;
}

std::vector<std::int64_t> TokenGrid::token_slots(int input, int output) const {
  std::vector<std::int64_t> slots;
  for (int t = 0; t < frame; ++t)
    for (int i : cells[output][t])
      if (i == input) slots.push_back(t);
  return slots;
}

IntMatrix TokenGrid::token_counts() const {
  IntMatrix n(inputs, outputs, 0);
  for (int j = 0; j < outputs; ++j)
    for (int t = 0; t < frame; ++t)
      for (int i : cells[j][t]) ++n(i, j);
  return n;
}

TokenGrid grid_from_schedule(std::span<const IntMatrix> slot_patterns) {
  if (slot_patterns.empty()) throw DomainError("empty frame");
  TokenGrid g;
  g.inputs = static_cast<int>(slot_patterns.front().rows());
  g.outputs = static_cast<int>(slot_patterns.front().cols());
  g.frame = static_cast<int>(slot_patterns.size());
  g.cells.assign(g.outputs, std::vector<std::vector<int>>(g.frame));
  const auto degree = slot_patterns.front().row_sum(0);
  for (int t = 0; t < g.frame; ++t) {
    const auto& p = slot_patterns[t];
    if (static_cast<int>(p.rows()) != g.inputs || static_cast<int>(p.cols()) != g.outputs) {
      throw DomainError("slot patterns differ in shape");
    }
    for (int i = 0; i < g.inputs; ++i)
      if (p.row_sum(i) != degree) throw DomainError("slot pattern is not regular");
    for (int j = 0; j < g.outputs; ++j) {
      if (p.col_sum(j) != degree) throw DomainError("slot pattern is not regular");
      for (int i = 0; i < g.inputs; ++i) {
        if (p(i, j) < 0) throw DomainError("negative pattern entry");
        for (std::int64_t r = 0; r < p(i, j); ++r) g.cells[j][t].push_back(i);
      }
    }
  }
  return g;
}

TokenGrid parse_token_grid(const std::string& text, int inputs) {
  TokenGrid g;
  std::istringstream in(text);
  std::string line;
  int max_symbol = -1;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    line = line.substr(first, line.find_last_not_of(" \t") - first + 1);
    std::vector<std::vector<int>> row;
    auto symbol = [&](char ch) {
      if (ch < 'a' || ch > 'z') throw PreconditionError(std::string("bad grid symbol: ") + ch);
      max_symbol = std::max(max_symbol, ch - 'a');
      return ch - 'a';
    };
    if (line.find_first_of(" \t") == std::string::npos) {
      for (char ch : line) row.push_back({symbol(ch)});
    } else {
      std::istringstream cells(line);
      std::string cell;
      while (cells >> cell) {
        std::vector<int> c;
        if (cell != "-") for (char ch : cell) c.push_back(symbol(ch));
        row.push_back(std::move(c));
      }
    }
    if (!g.cells.empty() && row.size() != g.cells.front().size()) {
      throw PreconditionError("grid rows differ in length");
    }
    g.cells.push_back(std::move(row));
  }
  if (g.cells.empty()) throw PreconditionError("empty token grid");
  g.outputs = static_cast<int>(g.cells.size());
  g.frame = static_cast<int>(g.cells.front().size());
  g.inputs = inputs > 0 ? inputs : std::max(g.outputs, max_symbol + 1);
  if (max_symbol >= g.inputs) throw PreconditionError("grid symbol beyond the input count");
  return g;
}

std::string format_token_grid(const TokenGrid& grid) {
  bool single = true;
  for (const auto& row : grid.cells)
    for (const auto& cell : row)
      if (cell.size() != 1) single = false;
  std::string out;
  for (const auto& row : grid.cells) {
    for (std::size_t t = 0; t < row.size(); ++t) {
      if (!single && t > 0) out += ' ';
      if (row[t].empty()) out += '-';
      for (int i : row[t]) out += static_cast<char>('a' + i);
    }
    out += '\n';
  }
  return out;
}

Smoothness2d smoothness_2d(const TokenGrid& grid, const RationalMatrix& c) {
  if (static_cast<int>(c.rows()) != grid.inputs || static_cast<int>(c.cols()) != grid.outputs) {
    throw DomainError("capacity matrix shape differs from the grid");
  }
  Smoothness2d r;
  r.d = RealMatrix(grid.inputs, grid.outputs, 0.0);
  r.kraft = RealMatrix(grid.inputs, grid.outputs, 0.0);
  r.input.assign(grid.inputs, 0.0);
  r.output.assign(grid.outputs, 0.0);
  r.kraft_row_sums.assign(grid.inputs, 0.0);
  r.kraft_col_sums.assign(grid.outputs, 0.0);
  for (int i = 0; i < grid.inputs; ++i)
    for (int j = 0; j < grid.outputs; ++j) {
      const auto slots = grid.token_slots(i, j);
      const Rational expected = c(i, j) * grid.frame;
      if (expected.denominator() != 1 ||
          expected.numerator() != static_cast<std::int64_t>(slots.size())) {
        throw DomainError("path (" + std::to_string(i) + ", " + std::to_string(j) + ") has " +
                          std::to_string(slots.size()) + " tokens, capacity asks for " +
                          to_string(expected));
      }
      if (slots.empty()) continue;
      const double dij = log_rms(circular_gaps(slots, grid.frame));
      const double cij = to_double(c(i, j));
      r.d(i, j) = dij;
      r.input[i] += cij * dij;
      r.output[j] += cij * dij;
      r.total += cij * dij;
      r.kraft(i, j) = std::exp2(-dij);
      r.kraft_row_sums[i] += r.kraft(i, j);
      r.kraft_col_sums[j] += r.kraft(i, j);
    }
  return r;
}

Entropy2d entropy_2d(const RealMatrix& c) {
  if (!c.square()) throw DomainError("capacity matrix must be square");
  Entropy2d e;
  e.input.assign(c.rows(), 0.0);
  e.output.assign(c.cols(), 0.0);
  for (std::size_t i = 0; i < c.rows(); ++i) {
    if (std::abs(c.row_sum(i) - 1.0) > 1e-9 || std::abs(c.col_sum(i) - 1.0) > 1e-9) {
      throw DomainError("matrix is not doubly stochastic; divide by m first");
    }
    for (std::size_t j = 0; j < c.cols(); ++j) {
      const double x = c(i, j);
      if (x < 0.0) throw DomainError("negative entry");
      if (x == 0.0) continue;
      const double h = -x * std::log2(x);
      e.input[i] += h;
      e.output[j] += h;
      e.total += h;
    }
  }
  return e;
}

Entropy2d entropy_2d(const RationalMatrix& c) { return entropy_2d(to_real(c)); }

}  // namespace swlab
