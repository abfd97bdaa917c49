#pragma once

#include <cstdint>
#include <vector>

#include "swlab/closmodel.hpp"
#include "swlab/matrix.hpp"
#include "swlab/rational.hpp"

namespace swlab {

// Virtual path arrival rates between input module i and output module j.
struct TrafficMatrix {
  RealMatrix lambda;
  ClosSpec spec;

  // Checks shape k x k and row/column sums below n.
  static TrafficMatrix make(RealMatrix lambda, const ClosSpec& spec);
};

// Exact capacities c = counts / F with every row and column of counts
// summing to m F.
struct CapacityMatrix {
  RationalMatrix c;
  std::int64_t frame = 1;
  int modules = 1;

  static CapacityMatrix from_counts(const IntMatrix& counts, std::int64_t frame, int modules);
  static CapacityMatrix from_rationals(const RationalMatrix& c, int modules);
  IntMatrix counts() const;  // F c
  std::size_t size() const { return c.rows(); }
};

enum class ZeroRatePolicy { kEpsilonFloor, kReject };

struct AllocationOptions {
  ZeroRatePolicy zero_policy = ZeroRatePolicy::kEpsilonFloor;
  std::int64_t frame_hint = 64;  // epsilon floor is 1 / (k F)
  int max_iterations = 1'000'000;
};

struct AllocationResult {
  RealMatrix c;
  int iterations = 0;
  double residual_slack = 0.0;
  bool monotone = true;  // every unsaturated entry grew in every iteration
};

AllocationResult allocate_capacity(const TrafficMatrix& t, const AllocationOptions& opt = {});

double weighted_delay(const RealMatrix& c, const RealMatrix& lambda);

// Exhaustive one-parameter search for 2 x 2 instances: doubly stochastic
// with sums m forces c11 = c22 = x, c12 = c21 = m - x.
struct GridOptimum {
  double x = 0.0;
  double delay = 0.0;
};
GridOptimum grid_search_delay_2x2(const RealMatrix& lambda, double m, int steps);

struct DecompositionState {
  IntMatrix pattern;  // sum of m permutation matrices
  std::int64_t multiplicity = 0;
  Rational weight;    // multiplicity / F
};

struct Decomposition {
  int modules = 1;
  std::int64_t frame = 1;
  std::vector<IntMatrix> permutations;  // m F matrices in extraction order
  std::vector<IntMatrix> slots;         // F patterns, consecutive m permutations each
  std::vector<int> slot_state;          // slot -> state index
  std::vector<DecompositionState> states;

  RationalMatrix reconstruct() const;
  Rational total_weight() const;
};

Decomposition bvn_decompose(const CapacityMatrix& c);

bool is_permutation_matrix(const IntMatrix& p);

struct RoundingResult {
  CapacityMatrix c;
  double max_error = 0.0;
};

// Nearest integer matrix of F c keeping every row and column at m F.
RoundingResult bandlimit_and_round(const RealMatrix& c, int modules, std::int64_t frame_target);
RoundingResult bandlimit_and_round(const CapacityMatrix& c, std::int64_t frame_target);

}  // namespace swlab
