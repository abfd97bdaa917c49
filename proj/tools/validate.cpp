#include <algorithm>
#include <cmath>
#include <sstream>

#include "csv.hpp"
#include "swlab/closmodel.hpp"
#include "swlab/experiments.hpp"
#include "swlab/matching.hpp"
#include "swlab/pathswitch.hpp"
#include "swlab/sched.hpp"

namespace swlab {

namespace {

namespace fs = std::filesystem;
using csv::num;

struct Check {
  const ValidateOptions& opt;
  Verdict v;
  int failures = 0;

  double tol(double def) const {
    char key[8];
    std::snprintf(key, sizeof key, "c%02d", v.criterion);
    auto it = opt.tolerance.find(key);
    return it == opt.tolerance.end() ? def : it->second;
  }

  std::optional<csv::Table> load(const std::string& file) {
    const auto p = opt.dir / file;
    if (!fs::exists(p)) {
      v.missing.push_back(file);
      return std::nullopt;
    }
    try {
      return csv::read(p);
    } catch (const std::exception& e) {
      fail(file + ": " + e.what());
      return std::nullopt;
    }
  }

  void fail(const std::string& msg) {
    ++failures;
    if (v.diffs.size() < 20) v.diffs.push_back(msg);
  }

  void expect_near(const std::string& where, double got, double want, double t) {
    if (!(std::abs(got - want) <= t))
      fail(where + ": got " + num(got) + ", expected " + num(want) + " +/- " + num(t));
  }

  void expect(bool ok, const std::string& msg) {
    if (!ok) fail(msg);
  }

  Verdict finish(std::string detail) {
    v.pass = failures == 0 && v.missing.empty();
    if (!v.missing.empty()) {
      detail = "missing outputs:";
      for (const auto& m : v.missing) detail += " " + m;
    } else if (failures > 0) {
      detail = std::to_string(failures) + " mismatch(es) [" + detail + "]; first: " + v.diffs.front();
    }
    v.detail = detail;
    return v;
  }
};

// Rows of a table whose `key` column matches `value` within 1e-9.
std::vector<std::size_t> rows_at(const csv::Table& t, const std::string& key, double value) {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < t.size(); ++r)
    if (std::abs(t.get(r, key) - value) < 1e-9) out.push_back(r);
  return out;
}

std::string where(const std::string& file, std::size_t row, const std::string& col) {
  return file + " row " + std::to_string(row + 1) + " " + col;
}

Verdict c01(Check& ck) {
  const double t = ck.tol(0.0005);
  auto pq = ck.load("fig10_pq.csv");
  auto ac = ck.load("fig10_ac.csv");
  if (pq && ac) {
    const auto a = rows_at(*pq, "rho", 1.0);
    const auto b = rows_at(*ac, "rho", 1.0);
    ck.expect(!a.empty() && !b.empty(), "no rho=1 row");
    if (!a.empty() && !b.empty()) {
      for (auto [col, want] : {std::pair{"p", 0.6321}, {"q", 0.3679}})
        ck.expect_near(where("fig10_pq.csv", a[0], col), pq->get(a[0], col), want, t);
      for (auto [col, want] : {std::pair{"slope", -0.3566}, {"intercept", 0.9683}, {"a", 1.4285}, {"c", 1.2906}})
        ck.expect_near(where("fig10_ac.csv", b[0], col), ac->get(b[0], col), want, t);
    }
  }
  return ck.finish("p, q, slope, intercept, a, c within " + num(t));
}

Verdict c02(Check& ck) {
  const double t = ck.tol(1e-9);
  auto mass = ck.load("fig10_mass.csv");
  auto tail = ck.load("fig10_tail.csv");
  int explicit_bad = 0, loglinear_bad = 0, checked = 0;
  if (mass && tail) {
    for (double rho : {0.2, 0.4, 0.6, 0.8, 1.0}) {
      const auto r = rows_at(*mass, "rho", rho);
      if (r.empty()) {
        ck.fail("fig10_mass.csv: no rho=" + num(rho));
        continue;
      }
      const double m = mass->get(r[0], "mass");
      ck.expect(mass->get(r[0], "terms") >= 500 && m >= 1 - t && m <= 1 + 1e-15,
                where("fig10_mass.csv", r[0], "mass") + ": " + num(m) + " outside [1-" + num(t) + ", 1]");
      int ls = 0;
      for (auto row : rows_at(*tail, "rho", rho)) {
        const double L = tail->get(row, "L");
        if (L > 100) continue;
        ++ls;
        ++checked;
        const double ex = tail->get(row, "exact_tail");
        const double slack = 1e-12 * ex;
        if (tail->get(row, "explicit_bound") < ex - slack) {
          ++explicit_bad;
          ck.fail(where("fig10_tail.csv", row, "explicit_bound") + ": below exact tail at L=" + num(L));
        }
        if (tail->get(row, "log_linear_bound") < ex - slack) {
          ++loglinear_bad;
          ck.fail(where("fig10_tail.csv", row, "log_linear_bound") + ": " + num(tail->get(row, "log_linear_bound")) +
                  " below exact tail " + num(ex) + " at rho=" + num(rho) + " L=" + num(L));
        }
      }
      ck.expect(ls >= 100, "fig10_tail.csv: fewer than 100 lengths at rho=" + num(rho));
    }
  }
  return ck.finish("mass within " + num(t) + "; " + std::to_string(checked) + " tail rows, explicit violations " +
                   std::to_string(explicit_bad) + ", log-linear violations " + std::to_string(loglinear_bad));
}

Verdict c03(Check& ck) {
  const double t = ck.tol(0.003);
  const double tv_tol = 0.01;
  auto cb = ck.load("montecarlo_crossbar.csv");
  auto occ = ck.load("montecarlo_occupancy.csv");
  double gap = 0.0, tv = 0.0;
  if (cb && occ) {
    bool found = false;
    for (std::size_t r = 0; r < cb->size(); ++r) {
      if (cb->get(r, "N") != 32 || std::abs(cb->get(r, "rho") - 1.0) > 1e-9) continue;
      found = true;
      ck.expect(cb->get(r, "slots") >= 1e6, "fewer than 1e6 slots");
      gap = std::abs(cb->get(r, "empirical") - cb->get(r, "analytic"));
      ck.expect(gap < t, "carried load gap " + num(gap) + " >= " + num(t));
    }
    ck.expect(found, "no N=32, rho=1 crossbar row");
    std::vector<double> emp, model;
    for (std::size_t r = 0; r < occ->size(); ++r) {
      if (occ->get(r, "N") != 32 || std::abs(occ->get(r, "rho") - 1.0) > 1e-9) continue;
      emp.push_back(occ->get(r, "empirical"));
      model.push_back(occ->get(r, "poisson"));
    }
    ck.expect(!emp.empty(), "no occupancy rows");
    for (std::size_t i = 0; i < emp.size(); ++i) tv += 0.5 * std::abs(emp[i] - model[i]);
    ck.expect(tv < tv_tol, "occupancy total variation " + num(tv) + " >= " + num(tv_tol));
  }
  return ck.finish("carried-load gap " + num(gap) + " < " + num(t) + ", TV " + num(tv) + " < " + num(tv_tol));
}

Verdict c04(Check& ck) {
  const double sigmas = ck.tol(4.0);
  auto df = ck.load("montecarlo_deflection.csv");
  std::string seen;
  if (df) {
    std::vector<int> lengths;
    for (std::size_t r = 0; r < df->size(); ++r) {
      if (df->get(r, "n") != 4 || std::abs(df->get(r, "rho") - 1.0) > 1e-9) continue;
      const double offered = df->get(r, "offered");
      const double bound = df->get(r, "bound");
      const double loss = df->get(r, "lost") / offered;
      const double limit = bound + sigmas * std::sqrt(bound * (1 - bound) / offered);
      const double L = df->get(r, "L");
      lengths.push_back(static_cast<int>(L));
      ck.expect(df->get(r, "slots") >= 1e4, where("montecarlo_deflection.csv", r, "slots") + ": fewer than 1e4");
      ck.expect(std::abs(loss - df->get(r, "loss")) < 1e-12, where("montecarlo_deflection.csv", r, "loss") + ": inconsistent with lost/offered");
      ck.expect(loss <= limit, "L=" + num(L) + ": loss " + num(loss) + " above " + num(limit));
      seen += " L=" + num(L) + ":" + num(loss) + "<=" + num(bound);
    }
    for (int L : {10, 20, 30})
      ck.expect(std::count(lengths.begin(), lengths.end(), L) > 0, "no row for L=" + std::to_string(L));
  }
  return ck.finish("loss within bound + " + num(sigmas) + " sigma;" + seen);
}

Verdict c05(Check& ck) {
  const double t = ck.tol(1e-9);
  auto rt = ck.load("fig6_roundtrip.csv");
  double worst = 0.0;
  if (rt) {
    int sig = 0;
    for (std::size_t r = 0; r < rt->size(); ++r) {
      const double want = rt->get(r, "sigma") * rt->get(r, "m");
      const double got = rt->get(r, "max_data_rate");
      worst = std::max(worst, std::abs(got - want));
      ck.expect_near(where("fig6_roundtrip.csv", r, "max_data_rate"), got, want, t);
      ++sig;
    }
    for (int i = 1; i <= 10; ++i)
      ck.expect(!rows_at(*rt, "sigma", i / 10.0).empty(), "no sigma=" + num(i / 10.0));
  }
  return ck.finish("worst round-trip error " + num(worst) + " <= " + num(t));
}

std::vector<RoutingTag> tags_of(Check& ck, const csv::Table& t, std::vector<CallRequest>& reqs,
                                const std::string& file) {
  std::vector<RoutingTag> tags;
  for (std::size_t r = 0; r < t.size(); ++r) {
    reqs.push_back({static_cast<int>(t.get(r, "S")), static_cast<int>(t.get(r, "D"))});
    tags.push_back({static_cast<int>(t.get(r, "G")), static_cast<int>(t.get(r, "Q")), static_cast<int>(t.get(r, "R"))});
  }
  ck.expect(!tags.empty(), file + ": no tags");
  return tags;
}

Verdict c06(Check& ck) {
  const auto spec = ClosSpec::make(3, 2, 4);
  const std::vector<int> perm{1, 3, 2, 0, 6, 4, 7, 5};
  const fs::path data = ck.opt.data_dir.empty() ? default_data_dir() : ck.opt.data_dir;
  std::uint64_t trials = 0;
  auto computed = ck.load("table2.csv");
  auto random = ck.load("route_random.csv");
  if (computed && random) {
    for (const auto& [file, table] : {std::pair<std::string, csv::Table>{"table2.csv", *computed},
                                      {"reference table2_tags.csv", csv::read(data / "table2_tags.csv")}}) {
      std::vector<CallRequest> reqs;
      const auto tags = tags_of(ck, table, reqs, file);
      std::string why;
      ck.expect(is_nonblocking_assignment(spec, reqs, tags, &why), file + ": " + why);
      ck.expect(reqs.size() == perm.size(), file + ": expected 8 requests");
      for (std::size_t i = 0; i < reqs.size() && i < perm.size(); ++i)
        ck.expect(reqs[i].source == static_cast<int>(i) && reqs[i].destination == perm[i],
                  file + ": request " + std::to_string(i) + " differs from the example permutation");
    }
    for (std::size_t r = 0; r < random->size(); ++r) {
      trials += static_cast<std::uint64_t>(random->get(r, "trials"));
      ck.expect(random->get(r, "failures") == 0, "route_random.csv: " + random->str(r, "failures") + " failures: " + random->str(r, "first_failure"));
      ck.expect(random->get(r, "m") == 4 && random->get(r, "n") == 4 && random->get(r, "k") == 8, "route_random.csv: expected C(4,4,8)");
    }
    ck.expect(trials >= 10000, "route_random.csv: fewer than 1e4 trials");
  }
  return ck.finish("example and reference tags valid; " + std::to_string(trials) + " random C(4,4,8) assignments valid");
}

Verdict c07(Check& ck) {
  auto flip = ck.load("benes_flip.csv");
  auto count = ck.load("benes_count.csv");
  auto full = ck.load("benes_full.csv");
  if (flip && count && full) {
    bool example = false;
    std::vector<int> sizes;
    std::uint64_t trials = 0;
    for (std::size_t r = 0; r < flip->size(); ++r) {
      ck.expect(flip->get(r, "max_unsatisfied") == 0, where("benes_flip.csv", r, "max_unsatisfied") + ": nonzero");
      if (flip->str(r, "case") == "example") example = true;
      else {
        sizes.push_back(static_cast<int>(flip->get(r, "N")));
        trials += static_cast<std::uint64_t>(flip->get(r, "trials"));
      }
    }
    ck.expect(example, "benes_flip.csv: no example row");
    for (int n : {4, 8, 16, 32}) ck.expect(std::count(sizes.begin(), sizes.end(), n) > 0, "benes_flip.csv: no N=" + std::to_string(n));
    ck.expect(trials >= 10000, "benes_flip.csv: fewer than 1e4 random permutations");
    for (std::size_t r = 0; r < count->size(); ++r) {
      const double g = count->get(r, "components");
      ck.expect(count->get(r, "exhaustive") == std::ldexp(1.0, static_cast<int>(g)) && count->get(r, "two_pow_components") == std::ldexp(1.0, static_cast<int>(g)),
                where("benes_count.csv", r, "exhaustive") + ": " + count->str(r, "exhaustive") + " != 2^" + num(g));
      ck.expect(count->get(r, "N") <= 12, where("benes_count.csv", r, "N") + ": above 12");
    }
    ck.expect(count->size() > 0, "benes_count.csv: empty");
    bool all4 = false, n8 = false, n16 = false;
    for (std::size_t r = 0; r < full->size(); ++r) {
      ck.expect(full->get(r, "link_conflicts") == 0 && full->get(r, "wrong_outputs") == 0,
                where("benes_full.csv", r, "link_conflicts") + ": conflicts or wrong outputs");
      const double n = full->get(r, "N");
      if (n == 4 && full->get(r, "cases") == 24) all4 = true;
      if (n == 8) n8 = true;
      if (n == 16) n16 = true;
    }
    ck.expect(all4 && n8 && n16, "benes_full.csv: need all 24 at N=4 and samples at N=8,16");
  }
  return ck.finish("zero unsatisfied constraints, 2^g solution counts, conflict-free full assignments");
}

Verdict c08(Check& ck) {
  const fs::path data = ck.opt.data_dir.empty() ? default_data_dir() : ck.opt.data_dir;
  auto st = ck.load("bvn_example4x4.csv");
  auto rnd = ck.load("bvn_random.csv");
  std::size_t k_states = 0;
  int single_module = 0;
  if (st && rnd) {
    RationalMatrix target(4, 4);
    {
      // the fixture has no header line, so its first row lands in `columns`
      const auto t = csv::read(data / "example4x4_matrix.csv");
      std::vector<std::vector<Rational>> rows;
      std::vector<std::vector<std::string>> text{t.columns};
      for (const auto& r : t.rows) text.push_back(r);
      for (const auto& r : text) {
        std::vector<Rational> row;
        for (const auto& cell : r) row.push_back(parse_rational(cell));
        rows.push_back(row);
      }
      target = RationalMatrix::from_rows(rows);
    }
    const int n = static_cast<int>(target.rows());
    RationalMatrix sum(n, n, Rational(0));
    std::int64_t perms = 0;
    k_states = st->size();
    for (std::size_t r = 0; r < st->size(); ++r) {
      const auto mult = static_cast<std::int64_t>(st->get(r, "multiplicity"));
      const Rational w = parse_rational(st->str(r, "weight"));
      ck.expect(w == Rational(mult, 8), where("bvn_example4x4.csv", r, "weight") + ": not multiplicity/8");
      std::istringstream in(st->str(r, "outputs"));
      std::string cell;
      IntMatrix p(n, n, 0);
      int i = 0;
      while (in >> cell && i < n) {
        for (const auto& j : csv::split(cell, '+')) p(i, std::stoi(j)) += 1;
        ++i;
      }
      ck.expect(i == n && is_permutation_matrix(p), where("bvn_example4x4.csv", r, "outputs") + ": not a permutation");
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) sum(a, b) += w * Rational(p(a, b));
      perms += mult;
    }
    ck.expect(sum == target, "bvn_example4x4.csv: weighted states do not reconstruct the matrix");
    ck.expect(perms == 8, "bvn_example4x4.csv: " + std::to_string(perms) + " permutations, expected 8");
    ck.expect(static_cast<int>(k_states) <= std::min(8, n * n - 2 * n + 2), "bvn_example4x4.csv: K above bound");
    for (std::size_t r = 0; r < rnd->size(); ++r) {
      ck.expect(rnd->get(r, "exact") == 1, where("bvn_random.csv", r, "exact") + ": reconstruction failed");
      ck.expect(rnd->get(r, "K") <= rnd->get(r, "bound"), where("bvn_random.csv", r, "K") + ": above bound");
      const double nn = rnd->get(r, "N"), f = rnd->get(r, "F");
      const bool single = rnd->get(r, "modules") == 1;
      single_module += single ? 1 : 0;
      ck.expect(rnd->get(r, "bound") == (single ? std::min(f, nn * nn - 2 * nn + 2) : f),
                where("bvn_random.csv", r, "bound") + ": wrong bound");
      ck.expect(nn <= 8 && f <= 16, where("bvn_random.csv", r, "N") + ": outside k <= 8, F <= 16");
    }
    ck.expect(single_module >= 500, "bvn_random.csv: fewer than 500 doubly stochastic matrices");
  }
  return ck.finish("4x4 example: " + std::to_string(k_states) + " states, exact; random matrices exact");
}

Verdict c09(Check& ck) {
  const double t = ck.tol(1e-9);
  const double gap = 0.05;
  auto rnd = ck.load("capacity_random.csv");
  auto two = ck.load("capacity_2x2.csv");
  double worst_ratio = 0.0;
  if (rnd && two) {
    for (std::size_t r = 0; r < rnd->size(); ++r) {
      ck.expect(rnd->get(r, "max_sum_error") <= t, where("capacity_random.csv", r, "max_sum_error") + ": " + rnd->str(r, "max_sum_error"));
      ck.expect(rnd->get(r, "min_margin") > 0, where("capacity_random.csv", r, "min_margin") + ": c not above lambda");
      ck.expect(rnd->get(r, "k") <= 8, where("capacity_random.csv", r, "k") + ": above 8");
    }
    ck.expect(rnd->size() >= 500, "capacity_random.csv: fewer than 500 matrices");
    for (std::size_t r = 0; r < two->size(); ++r) {
      const double ratio = two->get(r, "heuristic") / two->get(r, "optimum");
      worst_ratio = std::max(worst_ratio, ratio);
      ck.expect(ratio <= 1 + gap, where("capacity_2x2.csv", r, "ratio") + ": " + num(ratio));
    }
    ck.expect(two->size() > 0, "capacity_2x2.csv: empty");
  }
  return ck.finish("row/col sums within " + num(t) + ", c > lambda; worst 2x2 delay ratio " + num(worst_ratio));
}

Verdict c10(Check& ck) {
  auto t4 = ck.load("table4.csv");
  auto t5 = ck.load("table5.csv");
  auto more = ck.load("schedules.csv");
  if (t4 && t5 && more) {
    std::string s4, s5;
    for (std::size_t r = 0; r < t4->size(); ++r) s4 += t4->rows[r].back();
    ck.expect(s4 == "P1P1P1P1P2P3P4P5", "table4.csv selection column " + s4 + " != P1P1P1P1P2P3P4P5");
    const std::vector<std::string> qualified{"P1 P2 P3 P4 P5", "P2 P3 P4 P5", "P1 P3 P4 P5", "P3 P4 P5",
                                             "P1 P4 P5",       "P4 P5",       "P1 P5",       "P5"};
    for (std::size_t r = 0; r < t5->size(); ++r) {
      s5 += t5->str(r, "selected");
      if (r < qualified.size())
        ck.expect(t5->str(r, "qualified") == qualified[r],
                  where("table5.csv", r, "qualified") + ": " + t5->str(r, "qualified") + " != " + qualified[r]);
    }
    ck.expect(t5->size() == qualified.size(), "table5.csv: expected 8 slots");
    ck.expect(s5 == "P1P2P1P3P1P4P1P5", "table5.csv selection " + s5 + " != P1P2P1P3P1P4P1P5");
    const std::pair<std::string, std::string> want[] = {{"table4", "P1P1P1P1P2P3P4P5"},
                                                        {"hurr", "P1P2P1P4P1P3P1P5"},
                                                        {"two_state", "P2P2P1P2"}};
    for (const auto& [name, seq] : want) {
      bool found = false;
      for (std::size_t r = 0; r < more->size(); ++r)
        if (more->str(r, "case") == name) {
          found = true;
          ck.expect(more->str(r, "sequence") == seq, "schedules.csv " + name + ": " + more->str(r, "sequence") + " != " + seq);
        }
      ck.expect(found, "schedules.csv: no " + name + " row");
    }
  }
  return ck.finish("WFQ, WF2Q (with qualified sets), HuRR and two-state sequences match");
}

Verdict c11(Check& ck) {
  const double cell = ck.tol(0.02);
  const double ent_tol = 0.001;
  const double order_slack = 0.02;
  auto t6 = ck.load("table6.csv");
  auto dy = ck.load("table6_dyadic.csv");
  double worst = 0.0;
  if (t6 && dy) {
    static const double frozen[9][5] = {
        {1.628, 1.575, 1.414, 1.414, 1.357}, {1.894, 1.734, 1.626, 1.604, 1.571}, {2.040, 1.784, 1.724, 1.702, 1.686},
        {2.123, 1.882, 1.801, 1.772, 1.761}, {2.086, 1.787, 1.745, 1.745, 1.722}, {2.229, 1.903, 1.903, 1.884, 1.847},
        {2.312, 2.011, 1.980, 1.933, 1.922}, {2.286, 1.908, 1.908, 1.908, 1.896}, {2.370, 2.016, 2.016, 1.980, 1.971}};
    const char* cols[] = {"random", "wfq", "wf2q", "hurr", "entropy"};
    ck.expect(t6->size() == 9, "table6.csv: expected 9 rows");
    for (std::size_t r = 0; r < t6->size() && r < 9; ++r) {
      double v[5];
      for (int c = 0; c < 5; ++c) {
        v[c] = t6->get(r, cols[c]);
        const double tol = c == 4 ? ent_tol : cell;
        worst = std::max(worst, c == 4 ? 0.0 : std::abs(v[c] - frozen[r][c]));
        ck.expect_near(where("table6.csv", r, cols[c]), v[c], frozen[r][c], tol);
      }
      for (int c = 0; c + 1 < 5; ++c)
        ck.expect(v[c] + order_slack >= v[c + 1],
                  where("table6.csv", r, cols[c]) + ": ordering broken against " + cols[c + 1]);
    }
    for (std::size_t r = 0; r < dy->size(); ++r) {
      const auto& name = dy->str(r, "case");
      if (name == "optimal") {
        ck.expect_near(where("table6_dyadic.csv", r, "L"), dy->get(r, "L"), 1.75, 1e-12);
        ck.expect_near(where("table6_dyadic.csv", r, "H"), dy->get(r, "H"), 1.75, 1e-12);
      } else if (name == "wfq") {
        ck.expect_near(where("table6_dyadic.csv", r, "L"), dy->get(r, "L"), 1.8758, 0.0005);
      }
    }
    ck.expect(dy->size() == 2, "table6_dyadic.csv: expected optimal and wfq rows");
  }
  return ck.finish("dyadic L = H = 1.75, WFQ 1.8758; worst table cell deviation " + num(worst));
}

Verdict c12(Check& ck) {
  const double s = ck.tol(1e-9);
  auto one = ck.load("kraft_1d.csv");
  auto two = ck.load("kraft_2d.csv");
  if (one && two) {
    for (std::size_t r = 0; r < one->size(); ++r) {
      ck.expect(one->get(r, "kraft") <= 1 + s, where("kraft_1d.csv", r, "kraft") + ": above 1");
      ck.expect(one->get(r, "L") >= one->get(r, "H") - s, where("kraft_1d.csv", r, "L") + ": below H");
    }
    ck.expect(one->size() >= 1000, "kraft_1d.csv: fewer than 1000 schedules");
    for (std::size_t r = 0; r < two->size(); ++r) {
      ck.expect(two->get(r, "max_kraft_row") <= 1 + s && two->get(r, "max_kraft_col") <= 1 + s,
                where("kraft_2d.csv", r, "max_kraft_row") + ": Kraft row/col sum above 1");
      ck.expect(two->get(r, "D") >= two->get(r, "H") - s, where("kraft_2d.csv", r, "D") + ": below H(C)");
      ck.expect(two->get(r, "min_input_gap") >= -s && two->get(r, "min_output_gap") >= -s,
                where("kraft_2d.csv", r, "min_input_gap") + ": module smoothness below entropy");
    }
    ck.expect(two->size() >= 100, "kraft_2d.csv: fewer than 100 grids");
  }
  return ck.finish(std::to_string(one ? one->size() : 0) + " frames and " + std::to_string(two ? two->size() : 0) +
                   " grids within " + num(s));
}

Verdict c13(Check& ck) {
  const double he = ck.tol(0.0005);
  const double de = 0.001;
  auto ent = ck.load("example4x4_entropy.csv");
  auto tot = ck.load("example4x4_total.csv");
  if (ent && tot) {
    const double hbar[] = {1.0613, 1.4056, 1.7500, 0.9544};
    ck.expect(ent->size() == 4, "example4x4_entropy.csv: expected 4 modules");
    for (std::size_t r = 0; r < ent->size() && r < 4; ++r)
      ck.expect_near(where("example4x4_entropy.csv", r, "h_input"), ent->get(r, "h_input"), hbar[r], he);
    const std::pair<std::string, std::pair<double, double>> want[] = {
        {"H_C", {5.1714, he}}, {"D_wfq", {6.2522, de}}, {"D_hurr", {5.3794, de}}, {"D_alt", {5.3392, de}}};
    for (const auto& [name, vt] : want) {
      bool found = false;
      for (std::size_t r = 0; r < tot->size(); ++r)
        if (tot->str(r, "quantity") == name) {
          found = true;
          ck.expect_near("example4x4_total.csv " + name, tot->get(r, "value"), vt.first, vt.second);
        }
      ck.expect(found, "example4x4_total.csv: no " + name);
    }
  }
  return ck.finish("H(C), per-input entropies and the three grid totals match");
}

Verdict c14(Check& ck) {
  const double t = ck.tol(1e-12);
  auto b = ck.load("boltzmann.csv");
  auto p0 = ck.load("boltzmann_p0.csv");
  double worst = 0.0;
  if (b && p0) {
    int max_n = 0;
    for (std::size_t r = 0; r < b->size(); ++r) {
      const double n = b->get(r, "N");
      max_n = std::max(max_n, static_cast<int>(n));
      const double tol = std::max(2.0 / n, 0.1);
      const double dev = std::abs(b->get(r, "share") - b->get(r, "poisson"));
      worst = std::max(worst, dev / tol);
      ck.expect(dev <= tol, where("boltzmann.csv", r, "share") + ": deviation " + num(dev) + " > " + num(tol));
    }
    ck.expect(max_n >= 10, "boltzmann.csv: brute force stops below N=10");
    for (std::size_t r = 0; r < p0->size(); ++r)
      ck.expect_near(where("boltzmann_p0.csv", r, "one_minus_p0"), p0->get(r, "one_minus_p0"),
                     -std::expm1(-p0->get(r, "rho")), t);
    ck.expect(p0->size() > 0, "boltzmann_p0.csv: empty");
  }
  return ck.finish("worst share deviation " + num(worst) + " of the max(2/N, 0.1) allowance; busy probability within " + num(t));
}

Verdict c15(Check& ck) {
  auto cw = ck.load("graphcode_codewords.csv");
  auto dec = ck.load("graphcode_decode.csv");
  int corrected = 0;
  if (cw && dec) {
    bool zeros = false, ones = false;
    for (std::size_t r = 0; r < cw->size(); ++r) {
      const auto& w = cw->str(r, "word");
      ck.expect(cw->get(r, "codeword") == 1 && cw->get(r, "unsatisfied") == 0,
                where("graphcode_codewords.csv", r, "codeword") + ": " + w + " is not a codeword");
      if (!w.empty() && w.find_first_not_of('0') == std::string::npos) zeros = true;
      if (!w.empty() && w.find_first_not_of('1') == std::string::npos) ones = true;
    }
    ck.expect(zeros && ones, "graphcode_codewords.csv: need the all-zero and all-ones words");
    for (std::size_t r = 0; r < dec->size(); ++r) {
      ck.expect(dec->get(r, "nonmonotone") == 0, where("graphcode_decode.csv", r, "nonmonotone") + ": unsatisfied count did not drop");
      if (dec->get(r, "expansion_ok") == 1 && dec->get(r, "radius") >= 1) {
        ++corrected;
        ck.expect(dec->get(r, "failures") == 0 && dec->get(r, "trials") > 0,
                  where("graphcode_decode.csv", r, "failures") + ": " + dec->str(r, "failures") + " single errors left");
      }
    }
    ck.expect(corrected > 0, "graphcode_decode.csv: no fixture with verified expansion");
  }
  return ck.finish("codewords present; single errors corrected on " + std::to_string(corrected) +
                   " expanding fixtures; strictly decreasing traces");
}

using Validator = Verdict (*)(Check&);
constexpr Validator kValidators[kCriteria] = {c01, c02, c03, c04, c05, c06, c07, c08,
                                              c09, c10, c11, c12, c13, c14, c15};

}  // namespace

std::string criterion_name(int criterion) {
  static const char* names[kCriteria] = {"deflection constants at rho=1",
                                         "absorption mass and tail bounds",
                                         "crossbar Monte Carlo",
                                         "deflection simulator against the loss bound",
                                         "data-rate round trip",
                                         "Clos route assignment validity",
                                         "Benes flip algorithm",
                                         "capacity matrix decomposition",
                                         "capacity allocation",
                                         "scheduler traces",
                                         "smoothness numbers",
                                         "Kraft and entropy bounds",
                                         "worked 4x4 example",
                                         "entropy-maximizing occupancy",
                                         "graph code decoding"};
  if (criterion < 1 || criterion > kCriteria) throw UsageError("criterion out of range: " + std::to_string(criterion));
  return names[criterion - 1];
}

std::vector<std::string> experiments_for(int criterion) {
  switch (criterion) {
    case 1:
    case 2: return {"fig10"};
    case 3:
    case 4: return {"montecarlo"};
    case 5: return {"fig6"};
    case 6: return {"table2"};
    case 7: return {"benes"};
    case 8: return {"bvn"};
    case 9: return {"capacity"};
    case 10: return {"table4", "table5"};
    case 11: return {"table6"};
    case 12: return {"kraft"};
    case 13: return {"example4x4"};
    case 14: return {"boltzmann"};
    case 15: return {"graphcode"};
  }
  throw UsageError("criterion out of range: " + std::to_string(criterion));
}

std::vector<Verdict> validate(const ValidateOptions& opt) {
  std::vector<int> which = opt.criteria;
  if (which.empty())
    for (int k = 1; k <= kCriteria; ++k) which.push_back(k);
  std::vector<Verdict> out;
  for (int k : which) {
    Check ck{opt, {}, 0};
    ck.v.criterion = k;
    ck.v.name = criterion_name(k);
    try {
      out.push_back(kValidators[k - 1](ck));
    } catch (const std::exception& e) {
      ck.fail(e.what());
      out.push_back(ck.finish(""));
    }
  }
  return out;
}

std::string format_verdicts(const std::vector<Verdict>& verdicts) {
  std::string s = "criterion,name,status,detail\n";
  for (const auto& v : verdicts) {
    std::string detail = v.detail;
    std::replace(detail.begin(), detail.end(), ',', ';');
    char id[8];
    std::snprintf(id, sizeof id, "C%02d", v.criterion);
    s += std::string(id) + "," + v.name + "," + (v.pass ? "PASS" : "FAIL") + "," + detail + "\n";
  }
  return s;
}

}  // namespace swlab
