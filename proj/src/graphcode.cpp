#include "swlab/graphcode.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>

#include "swlab/errors.hpp"

namespace swlab {

TannerCode::TannerCode(std::vector<BitVector> parity) : parity_(std::move(parity)) {
  if (parity_.empty()) throw PreconditionError("parity matrix has no rows");
  variables_ = static_cast<int>(parity_.front().size());
  graph_ = BipartiteGraph(variables_, static_cast<int>(parity_.size()));
  var_checks_.resize(variables_);
  check_vars_.resize(parity_.size());
  for (std::size_t c = 0; c < parity_.size(); ++c) {
    if (static_cast<int>(parity_[c].size()) != variables_) {
      throw PreconditionError("parity rows differ in length");
    }
    for (int v = 0; v < variables_; ++v) {
      if (parity_[c][v] > 1) throw PreconditionError("parity entries must be 0 or 1");
      if (parity_[c][v]) {
        graph_.add_edge(v, static_cast<int>(c));
        var_checks_[v].push_back(static_cast<int>(c));
        check_vars_[c].push_back(v);
      }
    }
  }
}

TannerCode TannerCode::parse(std::istream& in) {
  std::vector<BitVector> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    BitVector row;
    for (char ch : line) {
      if (ch == '0' || ch == '1') {
        row.push_back(static_cast<std::uint8_t>(ch - '0'));
      } else if (!std::isspace(static_cast<unsigned char>(ch)) && ch != ',') {
        throw PreconditionError(std::string("unexpected character in parity matrix: ") + ch);
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return TannerCode(std::move(rows));
}

TannerCode TannerCode::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open " + path);
  return parse(in);
}

int TannerCode::variable_degree() const {
  const int d = static_cast<int>(var_checks_.front().size());
  for (const auto& c : var_checks_)
    if (static_cast<int>(c.size()) != d) return -1;
  return d;
}

int unsatisfied_count(const TannerCode& code, const BitVector& x) {
  if (static_cast<int>(x.size()) != code.variables()) {
    throw DomainError("word length " + std::to_string(x.size()) + " != " +
                      std::to_string(code.variables()));
  }
  int bad = 0;
  for (int c = 0; c < code.constraints(); ++c) {
    int parity = 0;
    for (int v : code.check_variables(c)) parity ^= x[v];
    bad += parity;
  }
  return bad;
}

bool is_codeword(const TannerCode& code, const BitVector& x) {
  return unsatisfied_count(code, x) == 0;
}

std::vector<BitVector> enumerate_codewords(const TannerCode& code) {
  const int n = code.variables();
  if (n > 24) throw ResourceError("codeword enumeration limited to 24 variables");
  std::vector<BitVector> words;
  BitVector x(n);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    for (int i = 0; i < n; ++i) x[i] = mask >> i & 1u;
    if (is_codeword(code, x)) words.push_back(x);
  }
  return words;
}

DecodeResult flip_decode(const TannerCode& code, const BitVector& received, int max_rounds) {
  DecodeResult r;
  r.word = received;
  const int n = code.variables();
  if (static_cast<int>(received.size()) != n) throw DomainError("received word has wrong length");

  std::vector<int> syndrome(code.constraints(), 0);
  for (int c = 0; c < code.constraints(); ++c)
    for (int v : code.check_variables(c)) syndrome[c] ^= r.word[v];
  int bad = 0;
  for (int s : syndrome) bad += s;
  r.unsatisfied_trace.push_back(bad);

  for (int round = 0; round < max_rounds && bad > 0; ++round) {
    int pick = -1;
    for (int v = 0; v < n && pick < 0; ++v) {
      int unsat = 0;
      for (int c : code.variable_checks(v)) unsat += syndrome[c];
      const int sat = static_cast<int>(code.variable_checks(v).size()) - unsat;
      if (unsat > sat) pick = v;
    }
    if (pick < 0) break;
    r.word[pick] ^= 1;
    for (int c : code.variable_checks(pick)) {
      bad += syndrome[c] ? -1 : 1;
      syndrome[c] ^= 1;
    }
    r.flipped.push_back(pick);
    ++r.flips;
    r.unsatisfied_trace.push_back(bad);
  }
  r.success = bad == 0;
  return r;
}

ExpansionReport expansion_check(const BipartiteGraph& g, int left_degree, double alpha) {
  const int n = g.left_count();
  if (n > 20) throw ResourceError("expansion check limited to 20 left vertices");
  if (g.right_count() > 64) throw ResourceError("expansion check limited to 64 right vertices");
  if (!(alpha > 0.0)) throw DomainError("alpha must be positive");

  ExpansionReport rep;
  rep.max_subset_size = static_cast<int>(std::floor(alpha * n + 1e-12));
  rep.worst_ratio = std::numeric_limits<double>::infinity();
  std::vector<std::uint64_t> own(n, 0);
  for (const auto& e : g.edges()) own[e.left] |= std::uint64_t{1} << e.right;

  const double factor = 3.0 * left_degree / 4.0;
  std::uint32_t worst = 0, violation = 0;
  int worst_nbr = 0;
  std::vector<std::uint64_t> nbr(std::size_t{1} << n, 0);
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    nbr[mask] = nbr[mask & (mask - 1)] | own[std::countr_zero(mask)];
    const int size = std::popcount(mask);
    if (size > rep.max_subset_size) continue;
    ++rep.subsets_checked;
    const int nn = std::popcount(nbr[mask]);
    const double ratio = static_cast<double>(nn) / size;
    if (ratio < rep.worst_ratio) {
      rep.worst_ratio = ratio;
      worst = mask;
      worst_nbr = nn;
    }
    if (!(nn > factor * size) && violation == 0) violation = mask;
  }
  auto members = [n](std::uint32_t mask) {
    std::vector<int> out;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1u) out.push_back(i);
    return out;
  };
  rep.worst_subset = members(worst);
  rep.worst_neighborhood = worst_nbr;
  rep.satisfied = violation == 0;
  rep.first_violation = members(violation);
  if (rep.subsets_checked == 0) rep.worst_ratio = 0.0;
  return rep;
}

}  // namespace swlab
