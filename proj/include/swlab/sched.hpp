#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "swlab/matrix.hpp"
#include "swlab/rational.hpp"

namespace swlab {

// Frame weights phi_i = n_i / F with integer counts n_i > 0. Logs are base 2.
class WeightSet {
 public:
  static WeightSet from_counts(std::vector<std::int64_t> counts);
  static WeightSet from_rationals(const std::vector<Rational>& weights);
  // Decimal weights rounded onto an explicit frame; counts must sum to F.
  static WeightSet from_decimals(const std::vector<double>& weights, std::int64_t frame);

  int size() const { return static_cast<int>(counts_.size()); }
  std::int64_t frame() const { return frame_; }
  std::int64_t count(int i) const { return counts_[i]; }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  double phi(int i) const { return static_cast<double>(counts_[i]) / frame_; }
  Rational weight(int i) const { return Rational(counts_[i], frame_); }

 private:
  std::vector<std::int64_t> counts_;
  std::int64_t frame_ = 0;
};

using FrameSequence = std::vector<int>;  // one state index per slot

enum class TieBreak {
  kLowerIndex,     // equal finish times: lower state index
  kMostRemaining,  // equal finish times: most unserved slots, then lower index
  kLargerWeight,   // equal finish times: larger weight, then lower index
};

// Eligibility for the worst-case fair variant at slot tau (1-based) after
// T_i earlier selections.
enum class Eligibility {
  kStartTime,  // T_i F <= (tau - 1) n_i: the fluid reference has started the next packet
  kStrict,     // T_i F < tau n_i
};

struct Wf2qOptions {
  Eligibility eligibility = Eligibility::kStartTime;
  TieBreak tie = TieBreak::kMostRemaining;
};

struct Wf2qTrace {
  std::vector<std::vector<int>> qualified;      // per slot
  std::vector<std::vector<Rational>> finish;    // finish times seen at each slot
};

FrameSequence schedule_wfq(const WeightSet& w, TieBreak tie = TieBreak::kLowerIndex,
                           std::vector<std::vector<Rational>>* finish_trace = nullptr);
FrameSequence schedule_wf2q(const WeightSet& w, const Wf2qOptions& opt = {},
                            Wf2qTrace* trace = nullptr);

struct HuffmanNode {
  std::int64_t count = 0;
  int min_leaf = 0;
  int left = -1;   // child with the lower min leaf; -1 for leaves
  int right = -1;
  int leaf = -1;   // state index when a leaf
};

// Nodes 0..K-1 are the leaves; the last node is the root.
std::vector<HuffmanNode> huffman_tree(const WeightSet& w);
FrameSequence schedule_hurr(const WeightSet& w, TieBreak tie = TieBreak::kMostRemaining);

std::vector<int> schedule_random(const WeightSet& w, std::uint64_t slots, std::uint64_t seed);

struct SmoothnessReport {
  std::vector<double> per_state;  // L_i
  double average = 0.0;           // L
  double entropy = 0.0;           // H
  double kraft_sum = 0.0;
};

void check_frame(const FrameSequence& seq, const WeightSet& w);
// Circular gaps: last gap wraps to the first occurrence of the next frame.
std::vector<std::int64_t> interstate_times(const FrameSequence& seq, int state, std::int64_t frame);
SmoothnessReport smoothness(const FrameSequence& seq, const WeightSet& w);
// Open-ended sequence: gaps between successive occurrences, no wraparound.
SmoothnessReport sequence_smoothness(std::span<const int> seq, const WeightSet& w);

double entropy(const WeightSet& w);
double random_schedule_excess(const WeightSet& w);  // expected L - H of i.i.d. slots

std::string format_sequence(const FrameSequence& seq);  // "P1P2..."
FrameSequence parse_sequence(const std::string& text);

// Rows are output modules, columns are slots; each cell holds the input
// modules granted a token (one per cell when m = 1).
struct TokenGrid {
  int inputs = 0;
  int outputs = 0;
  int frame = 0;
  std::vector<std::vector<std::vector<int>>> cells;  // [output][slot] -> inputs

  std::vector<std::int64_t> token_slots(int input, int output) const;
  IntMatrix token_counts() const;  // [input][output]
};

TokenGrid grid_from_schedule(std::span<const IntMatrix> slot_patterns);
// Letters 'a'.. name input modules. A line without spaces is one cell per
// letter; otherwise cells are whitespace separated.
TokenGrid parse_token_grid(const std::string& text, int inputs);
std::string format_token_grid(const TokenGrid& grid);

struct Smoothness2d {
  RealMatrix d;                  // per path, 0 where no tokens
  std::vector<double> input;     // D bar
  std::vector<double> output;    // D underbar
  double total = 0.0;
  RealMatrix kraft;              // 2^-d on used paths
  std::vector<double> kraft_row_sums;
  std::vector<double> kraft_col_sums;
};

Smoothness2d smoothness_2d(const TokenGrid& grid, const RationalMatrix& c);

struct Entropy2d {
  std::vector<double> input;   // H bar
  std::vector<double> output;  // H underbar
  double total = 0.0;
};

Entropy2d entropy_2d(const RealMatrix& c);
Entropy2d entropy_2d(const RationalMatrix& c);

}  // namespace swlab
