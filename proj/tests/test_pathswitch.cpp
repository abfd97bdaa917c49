#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "swlab/errors.hpp"
#include "swlab/pathswitch.hpp"

using namespace swlab;

namespace {

IntMatrix random_regular(std::mt19937_64& rng, int n, std::int64_t total) {
  IntMatrix m(n, n, 0);
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (std::int64_t r = 0; r < total; ++r) {
    std::shuffle(p.begin(), p.end(), rng);
    for (int i = 0; i < n; ++i) ++m(i, p[i]);
  }
  return m;
}

TrafficMatrix random_traffic(std::mt19937_64& rng, int k, int n, int m) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  RealMatrix lambda(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) lambda(i, j) = u(rng);
  // scale so the heaviest row or column sits below n
  double peak = 0.0;
  for (int i = 0; i < k; ++i) peak = std::max({peak, lambda.row_sum(i), lambda.col_sum(i)});
  std::uniform_real_distribution<double> load(0.3, 0.95);
  const double s = load(rng) * n / peak;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) lambda(i, j) *= s;
  return TrafficMatrix::make(lambda, ClosSpec::make(m, n, k));
}

}  // namespace

TEST_CASE("traffic admissibility") {
  RealMatrix heavy(2, 2, 1.0);
  CHECK_THROWS_AS(TrafficMatrix::make(heavy, ClosSpec::make(2, 2, 2)), PreconditionError);
  RealMatrix ok(2, 2, 0.4);
  CHECK_NOTHROW(TrafficMatrix::make(ok, ClosSpec::make(2, 1, 2)));
}

TEST_CASE("capacity allocation") {
  RealMatrix uniform(4, 4, 0.2);
  const auto r = allocate_capacity(TrafficMatrix::make(uniform, ClosSpec::make(8, 4, 4)));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(r.c(i, j) == doctest::Approx(2.0));

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> kk(2, 8);
    const int k = kk(rng);
    const auto t = random_traffic(rng, k, 4, 4 + trial % 5);
    const auto a = allocate_capacity(t);
    CHECK(a.monotone);
    for (int i = 0; i < k; ++i) {
      CHECK(std::abs(a.c.row_sum(i) - t.spec.m) < 1e-9);
      CHECK(std::abs(a.c.col_sum(i) - t.spec.m) < 1e-9);
      for (int j = 0; j < k; ++j) CHECK(a.c(i, j) > t.lambda(i, j));
    }
  }
}

TEST_CASE("zero arrival rates") {
  RealMatrix lambda = RealMatrix::from_rows({{0.5, 0.0}, {0.0, 0.5}});
  const auto t = TrafficMatrix::make(lambda, ClosSpec::make(1, 1, 2));
  AllocationOptions strict;
  strict.zero_policy = ZeroRatePolicy::kReject;
  CHECK_THROWS_AS(allocate_capacity(t, strict), PreconditionError);
  const auto r = allocate_capacity(t);
  CHECK(r.c(0, 1) > 0.0);
  CHECK(r.c.row_sum(0) == doctest::Approx(1.0));
}

TEST_CASE("weighted delay") {
  RealMatrix lambda = RealMatrix::from_rows({{0.1, 0.2}, {0.3, 0.4}});
  RealMatrix twice = lambda;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) twice(i, j) *= 2;
  CHECK(weighted_delay(twice, lambda) == doctest::Approx(4.0));
  CHECK(weighted_delay(RealMatrix(1, 1, 2.0), RealMatrix(1, 1, 1.0)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(weighted_delay(lambda, lambda), DomainError);
}

TEST_CASE("heuristic against the 2 x 2 grid optimum") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = random_traffic(rng, 2, 2, 2 + trial % 3);
    const auto a = allocate_capacity(t);
    const double heuristic = weighted_delay(a.c, t.lambda);
    const auto best = grid_search_delay_2x2(t.lambda, t.spec.m, 20000);
    CHECK(heuristic >= best.delay * (1 - 1e-9));
    CHECK(heuristic <= best.delay * 1.05);
  }
}

TEST_CASE("decomposition of simple matrices") {
  IntMatrix perm = IntMatrix::from_rows({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
  const auto d = bvn_decompose(CapacityMatrix::from_counts(perm, 1, 1));
  CHECK(d.states.size() == 1);
  CHECK(d.states[0].weight == Rational(1));

  const int n = 5;
  IntMatrix ones(n, n, 1);
  const auto u = bvn_decompose(CapacityMatrix::from_counts(ones, n, 1));
  CHECK(u.states.size() == static_cast<std::size_t>(n));
  for (const auto& s : u.states) CHECK(s.weight == Rational(1, n));
  CHECK(u.reconstruct() == CapacityMatrix::from_counts(ones, n, 1).c);
}

TEST_CASE("worked 4 x 4 decomposition") {
  const IntMatrix counts = IntMatrix::from_rows({{6, 0, 1, 1}, {1, 4, 3, 0}, {1, 1, 4, 2}, {0, 3, 0, 5}});
  const auto cap = CapacityMatrix::from_counts(counts, 8, 1);
  const auto d = bvn_decompose(cap);
  CHECK(d.permutations.size() == 8);
  for (const auto& p : d.permutations) CHECK(is_permutation_matrix(p));
  CHECK(d.reconstruct() == cap.c);
  CHECK(d.total_weight() == Rational(1));
  CHECK(d.states.size() <= 8);
  CHECK(d.states.size() <= 10);
}

TEST_CASE("random decompositions reconstruct exactly") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    std::uniform_int_distribution<int> nn(2, 8), ff(1, 16), mm(1, 3);
    const int n = nn(rng);
    const std::int64_t f = ff(rng);
    const int m = trial % 2 == 0 ? 1 : mm(rng);
    const auto cap = CapacityMatrix::from_counts(random_regular(rng, n, m * f), f, m);
    const auto d = bvn_decompose(cap);
    CHECK(d.reconstruct() == cap.c);
    CHECK(d.total_weight() == Rational(1));
    CHECK(d.permutations.size() == static_cast<std::size_t>(m * f));
    CHECK(d.slots.size() == static_cast<std::size_t>(f));
    for (const auto& p : d.permutations) CHECK(is_permutation_matrix(p));
    CHECK(d.states.size() <= static_cast<std::size_t>(f));
    if (m == 1) CHECK(d.states.size() <= static_cast<std::size_t>(n * n - 2 * n + 2));
  }
}

TEST_CASE("rational capacity input") {
  RationalMatrix c(2, 2);
  c(0, 0) = c(1, 1) = Rational(1, 3);
  c(0, 1) = c(1, 0) = Rational(2, 3);
  const auto cap = CapacityMatrix::from_rationals(c, 1);
  CHECK(cap.frame == 3);
  CHECK(cap.counts()(0, 1) == 2);
  IntMatrix bad = IntMatrix::from_rows({{1, 0}, {1, 1}});
  CHECK_THROWS_AS(CapacityMatrix::from_counts(bad, 1, 1), PreconditionError);
}

TEST_CASE("rounding onto a frame") {
  const IntMatrix counts = IntMatrix::from_rows({{3, 1}, {1, 3}});
  const auto cap = CapacityMatrix::from_counts(counts, 4, 1);
  const auto same = bandlimit_and_round(cap, 4);
  CHECK(same.max_error == 0.0);
  CHECK(same.c.c == cap.c);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = random_traffic(rng, 2 + trial % 6, 3, 3);
    const auto a = allocate_capacity(t);
    double prev_err = 1.0;
    for (std::int64_t f : {16, 32, 64, 128}) {
      const auto r = bandlimit_and_round(a.c, 3, f);
      CHECK(r.max_error < 1.0 / f);
      const auto k = r.c.counts();
      for (std::size_t i = 0; i < k.rows(); ++i) {
        CHECK(k.row_sum(i) == 3 * f);
        CHECK(k.col_sum(i) == 3 * f);
      }
      prev_err = r.max_error;
    }
    CHECK(prev_err < 1.0 / 128);
  }
  CHECK_THROWS_AS(bandlimit_and_round(RealMatrix(2, 2, 0.3), 1, 8), PreconditionError);
}

TEST_CASE("band-limited capacities keep few states") {
  // entries at most B / F: cyclic shifts used at most B times each
  std::mt19937_64 rng(77);
  const int n = 5, b = 3, m = 1;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> uses(n, 0);
    std::uniform_int_distribution<int> pick(0, b);
    std::int64_t f = 0;
    for (auto& u : uses) f += (u = pick(rng));
    if (f == 0) continue;
    IntMatrix counts(n, n, 0);
    for (int shift = 0; shift < n; ++shift)
      for (int i = 0; i < n; ++i) counts(i, (i + shift) % n) += uses[shift];
    for (auto v : counts.data()) CHECK(v <= b);
    const auto d = bvn_decompose(CapacityMatrix::from_counts(counts, f, m));
    CHECK(d.states.size() <= static_cast<std::size_t>(f));
    CHECK(f <= b * n / m);
  }
}
