#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "swlab/errors.hpp"
#include "swlab/pathswitch.hpp"
#include "swlab/sched.hpp"

using namespace swlab;

namespace {

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(SWLAB_DATA_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RationalMatrix worked_matrix() {
  const IntMatrix n = IntMatrix::from_rows({{6, 0, 1, 1}, {1, 4, 3, 0}, {1, 1, 4, 2}, {0, 3, 0, 5}});
  return CapacityMatrix::from_counts(n, 8, 1).c;
}

IntMatrix perm_matrix(std::initializer_list<int> cols) {
  const int n = static_cast<int>(cols.size());
  IntMatrix p(n, n, 0);
  int i = 0;
  for (int c : cols) p(i++, c) = 1;
  return p;
}

std::vector<IntMatrix> expand_frame(const std::vector<IntMatrix>& states, const FrameSequence& seq) {
  std::vector<IntMatrix> slots;
  for (int s : seq) slots.push_back(states[s]);
  return slots;
}

const WeightSet kTableFour = WeightSet::from_counts({4, 1, 1, 1, 1});

}  // namespace

TEST_CASE("weight sets") {
  const auto w = WeightSet::from_rationals({Rational(1, 2), Rational(1, 4), Rational(1, 8), Rational(1, 8)});
  CHECK(w.frame() == 8);
  CHECK(w.count(0) == 4);
  CHECK(WeightSet::from_decimals({0.1, 0.2, 0.3, 0.4}, 10).count(3) == 4);
  CHECK_THROWS_AS(WeightSet::from_counts({1, 0}), PreconditionError);
  CHECK_THROWS_AS(WeightSet::from_rationals({Rational(1, 2), Rational(1, 3)}), PreconditionError);
  CHECK_THROWS_AS(WeightSet::from_decimals({0.15, 0.85}, 10), PreconditionError);
}

TEST_CASE("fair queueing sequences") {
  CHECK(format_sequence(schedule_wfq(kTableFour)) == "P1P1P1P1P2P3P4P5");
  CHECK(format_sequence(schedule_wfq(WeightSet::from_counts({1, 3}))) == "P2P2P1P2");
  CHECK(format_sequence(schedule_wfq(WeightSet::from_counts({5}))) == "P1P1P1P1P1");
  // the larger-weight rule would put the light state last
  CHECK(format_sequence(schedule_wfq(WeightSet::from_counts({1, 3}), TieBreak::kLargerWeight)) ==
        "P2P2P2P1");

  std::vector<std::vector<Rational>> trace;
  schedule_wfq(kTableFour, TieBreak::kLowerIndex, &trace);
  CHECK(trace.size() == 8);
  CHECK(trace[0][0] == Rational(2));
  CHECK(trace[0][1] == Rational(8));
}

TEST_CASE("worst-case fair sequences and qualified sets") {
  for (auto elig : {Eligibility::kStartTime, Eligibility::kStrict}) {
    Wf2qTrace trace;
    const auto seq = schedule_wf2q(kTableFour, {elig, TieBreak::kMostRemaining}, &trace);
    CHECK(format_sequence(seq) == "P1P2P1P3P1P4P1P5");
    const std::vector<std::vector<int>> expected{{0, 1, 2, 3, 4}, {1, 2, 3, 4}, {0, 2, 3, 4}, {2, 3, 4},
                                                 {0, 3, 4},       {3, 4},       {0, 4},       {4}};
    CHECK(trace.qualified == expected);
  }
  const auto uniform = schedule_wf2q(WeightSet::from_counts({1, 1, 1, 1, 1, 1}));
  check_frame(uniform, WeightSet::from_counts({1, 1, 1, 1, 1, 1}));
}

TEST_CASE("Huffman round robin") {
  CHECK(format_sequence(schedule_hurr(kTableFour)) == "P1P2P1P4P1P3P1P5");
  const auto two = WeightSet::from_counts({1, 3});
  CHECK(schedule_hurr(two) == schedule_wfq(two));
  CHECK(format_sequence(schedule_hurr(WeightSet::from_counts({1, 1, 2, 4}))) == "P1P4P3P4P2P4P3P4");
  const auto tree = huffman_tree(kTableFour);
  CHECK(tree.size() == 9);
  CHECK(tree.back().count == 8);
}

TEST_CASE("smoothness of dyadic and uniform frames") {
  const auto w = WeightSet::from_counts({4, 2, 1, 1});
  const auto opt = parse_sequence("P1P2P1P3P1P2P1P4");
  const auto r = smoothness(opt, w);
  CHECK(r.average == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(r.entropy == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(r.kraft_sum == doctest::Approx(1.0));

  const auto wfq = smoothness(schedule_wfq(w), w);
  CHECK(std::abs(wfq.average - 1.8758) < 0.0005);

  const auto u = WeightSet::from_counts(std::vector<std::int64_t>(16, 1));
  const auto ur = smoothness(schedule_wfq(u), u);
  CHECK(ur.average == doctest::Approx(4.0));
  CHECK(ur.entropy == doctest::Approx(4.0));

  CHECK_THROWS_AS(smoothness(parse_sequence("P1P1P2"), WeightSet::from_counts({1, 2})), DomainError);
  CHECK(interstate_times(opt, 3, 8) == std::vector<std::int64_t>{8});
}

TEST_CASE("entropy") {
  CHECK(entropy(WeightSet::from_counts({4, 2, 1, 1})) == doctest::Approx(1.75));
  CHECK(std::abs(entropy(WeightSet::from_counts({1, 1, 1, 7})) - 1.357) < 0.0005);
  CHECK(entropy(WeightSet::from_counts({3})) == 0.0);
}

TEST_CASE("weight table rows") {
  struct Row {
    std::vector<std::int64_t> counts;
    double random, wfq, wf2q, hurr, entropy;
  };
  const std::vector<Row> rows{
      {{1, 1, 1, 7}, 1.628, 1.575, 1.414, 1.414, 1.357}, {{1, 1, 2, 6}, 1.894, 1.734, 1.626, 1.604, 1.571},
      {{1, 1, 3, 5}, 2.040, 1.784, 1.724, 1.702, 1.686}, {{1, 2, 2, 5}, 2.123, 1.882, 1.801, 1.772, 1.761},
      {{1, 1, 4, 4}, 2.086, 1.787, 1.745, 1.745, 1.722}, {{1, 2, 3, 4}, 2.229, 1.903, 1.903, 1.884, 1.847},
      {{2, 2, 2, 4}, 2.312, 2.011, 1.980, 1.933, 1.922}, {{1, 3, 3, 3}, 2.286, 1.908, 1.908, 1.908, 1.896},
      {{2, 2, 3, 3}, 2.370, 2.016, 2.016, 1.980, 1.971}};
  for (const auto& row : rows) {
    const auto w = WeightSet::from_counts(row.counts);
    const double h = entropy(w);
    const double rnd = h + random_schedule_excess(w);
    const double a = smoothness(schedule_wfq(w), w).average;
    const double b = smoothness(schedule_wf2q(w), w).average;
    const double c = smoothness(schedule_hurr(w), w).average;
    CHECK(std::abs(rnd - row.random) <= 0.02);
    CHECK(std::abs(a - row.wfq) <= 0.02);
    CHECK(std::abs(b - row.wf2q) <= 0.02);
    CHECK(std::abs(c - row.hurr) <= 0.02);
    CHECK(std::abs(h - row.entropy) <= 0.001);
    CHECK(rnd + 0.02 >= a);
    CHECK(a + 0.02 >= b);
    CHECK(b + 0.02 >= c);
    CHECK(c + 0.02 >= h);
  }
}

TEST_CASE("random schedules") {
  const auto w = WeightSet::from_counts({4, 2, 1, 1});
  const auto seq = schedule_random(w, 1'000'000, 12);
  const auto r = sequence_smoothness(seq, w);
  CHECK(std::abs((r.average - r.entropy) - random_schedule_excess(w)) < 0.02);

  const auto one = WeightSet::from_counts({1});
  const auto c = sequence_smoothness(schedule_random(one, 100, 1), one);
  CHECK(c.average == 0.0);
  CHECK(c.entropy == 0.0);

  for (int k = 1; k <= 12; ++k) {
    const auto u = WeightSet::from_counts(std::vector<std::int64_t>(k, 1));
    const double excess = random_schedule_excess(u);
    CHECK(excess == doctest::Approx(0.5 * std::log2(2.0 - 1.0 / k)));
    CHECK(excess < 0.5);
  }
  // uniform weights maximise the excess among samples on the simplex
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> cnt(1, 30);
  const double top = random_schedule_excess(WeightSet::from_counts({1, 1, 1, 1}));
  for (int trial = 0; trial < 500; ++trial) {
    const auto s = WeightSet::from_counts({cnt(rng), cnt(rng), cnt(rng), cnt(rng)});
    CHECK(random_schedule_excess(s) <= top + 1e-12);
  }
}

TEST_CASE("Kraft and entropy bounds on random frames") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    std::uniform_int_distribution<int> kk(1, 7), cnt(1, 9);
    std::vector<std::int64_t> counts(kk(rng));
    for (auto& c : counts) c = cnt(rng);
    const auto w = WeightSet::from_counts(counts);
    FrameSequence shuffled;
    for (int i = 0; i < w.size(); ++i)
      for (std::int64_t r = 0; r < w.count(i); ++r) shuffled.push_back(i);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (const auto& seq : {schedule_wfq(w), schedule_wf2q(w), schedule_hurr(w), shuffled}) {
      check_frame(seq, w);
      const auto r = smoothness(seq, w);
      CHECK(r.kraft_sum <= 1.0 + 1e-9);
      CHECK(r.average >= r.entropy - 1e-9);
    }
  }
}

TEST_CASE("sequence text round trip") {
  const auto s = parse_sequence("P1P12P3");
  CHECK(s == FrameSequence{0, 11, 2});
  CHECK(format_sequence(s) == "P1P12P3");
  CHECK_THROWS_AS(parse_sequence("Q1"), PreconditionError);
}

TEST_CASE("two-dimensional entropy") {
  const auto e = entropy_2d(worked_matrix());
  CHECK(std::abs(e.total - 5.1714) < 0.0005);
  const std::vector<double> hbar{1.0613, 1.4056, 1.7500, 0.9544};
  const std::vector<double> hlow{1.0613, 1.4056, 1.4056, 1.2988};
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(e.input[i] - hbar[i]) < 0.0005);
    CHECK(std::abs(e.output[i] - hlow[i]) < 0.0005);
  }
  CHECK(entropy_2d(to_real(CapacityMatrix::from_counts(perm_matrix({2, 0, 1}), 1, 1).c)).total == 0.0);
  const auto u = entropy_2d(RealMatrix(8, 8, 1.0 / 8));
  CHECK(u.total == doctest::Approx(8 * 3.0));
  CHECK_THROWS_AS(entropy_2d(RealMatrix(2, 2, 0.4)), DomainError);
}

TEST_CASE("token grids from the worked example") {
  const auto c = worked_matrix();
  struct Case {
    const char* file;
    double total;
  };
  for (const auto& k : {Case{"example4x4_grid_wfq.txt", 6.2522}, Case{"example4x4_grid_hurr.txt", 5.3794},
                        Case{"example4x4_grid_alt.txt", 5.3392}}) {
    const auto g = parse_token_grid(read_fixture(k.file), 4);
    CHECK(g.frame == 8);
    const auto s = smoothness_2d(g, c);
    CHECK(std::abs(s.total - k.total) < 0.001);
    const auto e = entropy_2d(c);
    for (int i = 0; i < 4; ++i) {
      CHECK(s.kraft_row_sums[i] <= 1 + 1e-9);
      CHECK(s.kraft_col_sums[i] <= 1 + 1e-9);
      CHECK(s.input[i] >= e.input[i] - 1e-9);
      CHECK(s.output[i] >= e.output[i] - 1e-9);
    }
    CHECK(format_token_grid(g) == read_fixture(k.file).substr(read_fixture(k.file).find('\n') + 1));
  }
  const auto wfq = smoothness_2d(parse_token_grid(read_fixture("example4x4_grid_wfq.txt"), 4), c);
  const std::vector<double> dbar{1.2084, 1.6997, 2.0323, 1.3118};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(wfq.input[i] - dbar[i]) < 0.0005);
  const auto alt = smoothness_2d(parse_token_grid(read_fixture("example4x4_grid_alt.txt"), 4), c);
  CHECK(std::abs(alt.input[2] - 1.75) < 0.0005);
}

TEST_CASE("grids regenerated from the fixture decompositions") {
  const std::vector<IntMatrix> first{perm_matrix({0, 1, 2, 3}), perm_matrix({0, 2, 1, 3}),
                                     perm_matrix({0, 2, 3, 1}), perm_matrix({2, 0, 3, 1}),
                                     perm_matrix({3, 2, 0, 1})};
  const auto w = WeightSet::from_counts({4, 1, 1, 1, 1});
  const auto wfq_grid = grid_from_schedule(expand_frame(first, schedule_wfq(w)));
  CHECK(format_token_grid(wfq_grid).substr(0, 9) == "aaaaaabc\n");
  const auto hurr_grid = grid_from_schedule(expand_frame(first, schedule_hurr(w)));
  CHECK(format_token_grid(hurr_grid).substr(0, 9) == "aaabaaac\n");

  const std::vector<IntMatrix> alt{perm_matrix({2, 0, 1, 3}), perm_matrix({3, 2, 0, 1}),
                                   perm_matrix({0, 2, 3, 1}), perm_matrix({0, 1, 2, 3})};
  const auto alt_grid = grid_from_schedule(expand_frame(alt, schedule_hurr(WeightSet::from_counts({1, 1, 2, 4}))));
  CHECK(format_token_grid(alt_grid) == read_fixture("example4x4_grid_alt.txt").substr(read_fixture("example4x4_grid_alt.txt").find('\n') + 1));

  std::vector<IntMatrix> constant(5, IntMatrix::identity(3));
  CHECK(format_token_grid(grid_from_schedule(constant)) == "aaaaa\nbbbbb\nccccc\n");

  std::vector<IntMatrix> broken{IntMatrix::identity(2), IntMatrix(2, 2, 1)};
  CHECK_THROWS_AS(grid_from_schedule(broken), DomainError);
}

TEST_CASE("one-by-one blocks reduce to the frame metric") {
  // a single path of a 1 x 1 matrix carries every slot
  const auto g = grid_from_schedule(std::vector<IntMatrix>(6, IntMatrix::identity(1)));
  RationalMatrix one(1, 1, Rational(1));
  const auto s = smoothness_2d(g, one);
  CHECK(s.total == doctest::Approx(0.0));
  // separable grid: output j serves inputs in a frame pattern of weights
  const auto w = WeightSet::from_counts({2, 1, 1});
  const auto seq = schedule_wfq(w);
  std::vector<IntMatrix> slots;
  for (int st : seq) {
    IntMatrix p(3, 3, 0);
    for (int j = 0; j < 3; ++j) p((j + st) % 3, j) = 1;
    slots.push_back(p);
  }
  const auto grid = grid_from_schedule(slots);
  RationalMatrix cm(3, 3);
  for (int j = 0; j < 3; ++j)
    for (int st = 0; st < 3; ++st) cm((j + st) % 3, j) = w.weight(st);
  const auto s2 = smoothness_2d(grid, cm);
  const auto one_d = smoothness(seq, w);
  for (int j = 0; j < 3; ++j) CHECK(s2.output[j] == doctest::Approx(one_d.average));
}

TEST_CASE("two-dimensional bounds on random schedules") {
  std::mt19937_64 rng(88);
  for (int trial = 0; trial < 150; ++trial) {
    std::uniform_int_distribution<int> nn(2, 6), ff(2, 12);
    const int n = nn(rng);
    const int f = ff(rng);
    IntMatrix counts(n, n, 0);
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    for (int r = 0; r < f; ++r) {
      std::shuffle(p.begin(), p.end(), rng);
      for (int i = 0; i < n; ++i) ++counts(i, p[i]);
    }
    const auto cap = CapacityMatrix::from_counts(counts, f, 1);
    const auto d = bvn_decompose(cap);
    std::vector<std::int64_t> mult;
    std::vector<IntMatrix> states;
    for (const auto& s : d.states) {
      mult.push_back(s.multiplicity);
      states.push_back(s.pattern);
    }
    const auto w = WeightSet::from_counts(mult);
    const auto e = entropy_2d(cap.c);
    for (const auto& seq : {schedule_wfq(w), schedule_hurr(w), schedule_wf2q(w)}) {
      const auto s = smoothness_2d(grid_from_schedule(expand_frame(states, seq)), cap.c);
      CHECK(s.total >= e.total - 1e-9);
      for (int i = 0; i < n; ++i) {
        CHECK(s.kraft_row_sums[i] <= 1 + 1e-9);
        CHECK(s.kraft_col_sums[i] <= 1 + 1e-9);
        CHECK(s.input[i] >= e.input[i] - 1e-9);
        CHECK(s.output[i] >= e.output[i] - 1e-9);
      }
    }
  }
}
