#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "swlab/errors.hpp"
#include "swlab/graphcode.hpp"

using namespace swlab;

namespace {

TannerCode fixture(const std::string& name) {
  return TannerCode::load(std::string(SWLAB_DATA_DIR) + "/" + name);
}

BitVector bitwise_xor(const BitVector& a, const BitVector& b) {
  BitVector c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] ^ b[i];
  return c;
}

}  // namespace

TEST_CASE("eight-variable parity matrix") {
  const auto code = fixture("parity8.txt");
  CHECK(code.variables() == 8);
  CHECK(code.constraints() == 4);
  CHECK(is_codeword(code, BitVector(8, 0)));
  CHECK(is_codeword(code, BitVector(8, 1)));
  BitVector e1(8, 0);
  e1[0] = 1;
  CHECK_FALSE(is_codeword(code, e1));
  CHECK_THROWS_AS(is_codeword(code, BitVector(7, 0)), DomainError);
  for (const auto& row : code.parity()) {
    int ones = 0;
    for (auto b : row) ones += b;
    CHECK(ones == 4);
  }
  CHECK(code.variable_degree() == 2);
}

TEST_CASE("codewords are closed under xor") {
  for (const char* name : {"parity8.txt", "affine3.txt", "affine4.txt", "cycle8.txt"}) {
    const auto code = fixture(name);
    const auto words = enumerate_codewords(code);
    CHECK(!words.empty());
    for (const auto& a : words)
      for (const auto& b : words) CHECK(is_codeword(code, bitwise_xor(a, b)));
  }
}

TEST_CASE("parser") {
  std::istringstream in("# comment\n1 0 1\n011\n");
  const auto code = TannerCode::parse(in);
  CHECK(code.constraints() == 2);
  CHECK(code.variables() == 3);
  std::istringstream bad("1 0 2\n");
  CHECK_THROWS_AS(TannerCode::parse(bad), PreconditionError);
  std::istringstream ragged("1 0 1\n1 1\n");
  CHECK_THROWS_AS(TannerCode::parse(ragged), PreconditionError);
}

TEST_CASE("decoding a codeword is a no-op") {
  const auto code = fixture("affine3.txt");
  for (const auto& w : enumerate_codewords(code)) {
    const auto r = flip_decode(code, w, 100);
    CHECK(r.success);
    CHECK(r.flips == 0);
    CHECK(r.word == w);
  }
}

TEST_CASE("expansion check") {
  BipartiteGraph full(4, 5);
  for (int u = 0; u < 4; ++u)
    for (int v = 0; v < 5; ++v) full.add_edge(u, v);
  CHECK(expansion_check(full, 5, 0.25).satisfied);

  BipartiteGraph twins(3, 6);
  for (int v : {0, 1, 2, 3}) twins.add_edge(0, v), twins.add_edge(1, v);
  for (int v : {2, 3, 4, 5}) twins.add_edge(2, v);
  const auto t = expansion_check(twins, 4, 0.7);
  CHECK_FALSE(t.satisfied);
  CHECK(t.worst_subset == std::vector<int>{0, 1});
  CHECK(t.worst_ratio == doctest::Approx(2.0));

  const auto m = fixture("parity8.txt");
  const auto rep = expansion_check(m.graph(), 2, 0.25);
  CHECK(rep.max_subset_size == 2);
  CHECK(rep.worst_ratio == doctest::Approx(1.0));  // two variables share both checks
  CHECK_FALSE(rep.satisfied);

  CHECK_THROWS_AS(expansion_check(BipartiteGraph(21, 3), 1, 0.1), ResourceError);
}

TEST_CASE("expanding fixtures correct every single error") {
  struct Case {
    const char* name;
    int degree;
    double alpha;
  };
  for (const auto& c : {Case{"affine3.txt", 4, 2.0 / 9.0}, Case{"affine4.txt", 5, 3.0 / 16.0}}) {
    const auto code = fixture(c.name);
    CHECK(code.variable_degree() == c.degree);
    const auto rep = expansion_check(code.graph(), c.degree, c.alpha);
    REQUIRE(rep.satisfied);
    const int radius = static_cast<int>(std::floor(c.alpha * code.variables() / 2.0 + 1e-12));
    CHECK(radius >= 1);
    for (const auto& w : enumerate_codewords(code)) {
      for (int i = 0; i < code.variables(); ++i) {
        auto r = w;
        r[i] ^= 1;
        const auto d = flip_decode(code, r, 4 * code.variables());
        CHECK(d.success);
        CHECK(d.word == w);
        for (std::size_t s = 1; s < d.unsatisfied_trace.size(); ++s) {
          CHECK(d.unsatisfied_trace[s] < d.unsatisfied_trace[s - 1]);
        }
      }
    }
  }
}

TEST_CASE("every weight-limited error pattern on the order-3 plane") {
  const auto code = fixture("affine3.txt");
  const auto words = enumerate_codewords(code);
  const int n = code.variables();
  for (const auto& w : words) {
    for (int i = 0; i < n; ++i) {
      auto r = w;
      r[i] ^= 1;
      CHECK(flip_decode(code, r, 100).word == w);
    }
  }
  // all inputs: the trace is always strictly decreasing
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    BitVector r(n);
    for (int i = 0; i < n; ++i) r[i] = mask >> i & 1u;
    const auto d = flip_decode(code, r, 100);
    for (std::size_t s = 1; s < d.unsatisfied_trace.size(); ++s) {
      CHECK(d.unsatisfied_trace[s] < d.unsatisfied_trace[s - 1]);
    }
  }
}

TEST_CASE("non-expanding code gets stuck") {
  const auto code = fixture("cycle8.txt");
  BitVector r(8, 0);
  r[2] = r[3] = 1;
  const auto d = flip_decode(code, r, 50);
  CHECK_FALSE(d.success);
  CHECK(d.flips == 0);
  CHECK(d.unsatisfied_trace == std::vector<int>{2});
}
