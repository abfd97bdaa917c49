#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "swlab/matching.hpp"

namespace swlab {

using BitVector = std::vector<std::uint8_t>;

// Parity-check code on a Tanner graph: variables on the left, constraints
// on the right.
class TannerCode {
 public:
  explicit TannerCode(std::vector<BitVector> parity);

  // Plain text: one row per line, 0/1 characters, whitespace ignored.
  static TannerCode parse(std::istream& in);
  static TannerCode load(const std::string& path);

  int variables() const { return variables_; }
  int constraints() const { return static_cast<int>(parity_.size()); }
  const std::vector<BitVector>& parity() const { return parity_; }
  const BipartiteGraph& graph() const { return graph_; }
  const std::vector<int>& variable_checks(int v) const { return var_checks_[v]; }
  const std::vector<int>& check_variables(int c) const { return check_vars_[c]; }

  // Uniform left degree, or -1.
  int variable_degree() const;

 private:
  std::vector<BitVector> parity_;
  int variables_ = 0;
  BipartiteGraph graph_;
  std::vector<std::vector<int>> var_checks_;
  std::vector<std::vector<int>> check_vars_;
};

bool is_codeword(const TannerCode& code, const BitVector& x);
int unsatisfied_count(const TannerCode& code, const BitVector& x);

// All codewords by exhaustive enumeration (n <= 24).
std::vector<BitVector> enumerate_codewords(const TannerCode& code);

struct DecodeResult {
  BitVector word;
  bool success = false;
  int flips = 0;
  std::vector<int> flipped;             // variable index per flip
  std::vector<int> unsatisfied_trace;   // before the first flip and after each flip
};

DecodeResult flip_decode(const TannerCode& code, const BitVector& received, int max_rounds);

struct ExpansionReport {
  bool satisfied = true;
  int max_subset_size = 0;
  std::uint64_t subsets_checked = 0;
  std::vector<int> worst_subset;
  int worst_neighborhood = 0;
  double worst_ratio = 0.0;  // |N(A)| / |A| minimised over the scanned subsets
  std::vector<int> first_violation;
};

// Every A on the left with 1 <= |A| <= floor(alpha n) must have
// |N(A)| > (3 k / 4) |A|.
ExpansionReport expansion_check(const BipartiteGraph& g, int left_degree, double alpha);

}  // namespace swlab
