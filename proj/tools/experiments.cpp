#include "swlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "csv.hpp"
#include "swlab/closmodel.hpp"
#include "swlab/contention.hpp"
#include "swlab/deflection.hpp"
#include "swlab/errors.hpp"
#include "swlab/graphcode.hpp"
#include "swlab/matching.hpp"
#include "swlab/pathswitch.hpp"
#include "swlab/sched.hpp"

#ifndef SWLAB_DATA_DIR
#define SWLAB_DATA_DIR "data"
#endif

namespace swlab {

namespace {

namespace fs = std::filesystem;
using csv::num;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  std::uint64_t out = 0;
  try {
    out = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw UsageError(key + ": expected an unsigned integer, got '" + v + "'");
  return out;
}

void assign_key(ExperimentManifest& m, const std::string& key, const std::string& value) {
  if (key.empty()) throw UsageError("manifest: empty key");
  if (key == "experiment" || key == "id") {
    m.experiment = value;
  } else if (key == "seed") {
    m.seed = parse_u64(key, value);
  } else if (key == "output" || key == "output_dir") {
    m.output_dir = value;
  } else if (key == "data_dir") {
    m.data_dir = value;
  } else if (key == "jobs") {
    m.jobs = static_cast<int>(parse_u64(key, value));
  } else {
    m.parameters[key] = value;
  }
}

std::string json_scalar(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return num(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  throw UsageError("manifest: unsupported JSON value " + v.dump());
}

// Parameter access. A key that is present but empty yields an empty grid.
class Params {
 public:
  explicit Params(const ExperimentManifest& m) : m_(m) {}

  std::vector<double> reals(const std::string& key, std::vector<double> def) const {
    auto it = m_.parameters.find(key);
    if (it == m_.parameters.end()) return def;
    std::vector<double> out;
    for (const auto& tok : csv::split(it->second, ',')) {
      const auto t = trim(tok);
      if (t.empty()) continue;
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(t, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != t.size()) throw UsageError(key + ": bad number '" + t + "'");
      out.push_back(v);
    }
    return out;
  }

  std::vector<int> ints(const std::string& key, std::vector<int> def) const {
    std::vector<double> d(def.begin(), def.end());
    std::vector<int> out;
    for (double v : reals(key, d)) {
      if (v != std::floor(v)) throw UsageError(key + ": expected integers");
      out.push_back(static_cast<int>(v));
    }
    return out;
  }

  std::uint64_t count(const std::string& key, std::uint64_t def) const {
    auto it = m_.parameters.find(key);
    return it == m_.parameters.end() ? def : parse_u64(key, trim(it->second));
  }

 private:
  const ExperimentManifest& m_;
};

std::uint64_t derive_seed(std::uint64_t seed, const std::string& id) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : id) h = (h ^ ch) * 1099511628211ULL;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

struct Context {
  const ExperimentManifest& manifest;
  Params params;
  fs::path data;
  std::uint64_t seed;
  ExperimentSummary summary;

  void emit(const std::string& file, const csv::Table& t) {
    csv::write(manifest.output_dir / file, t);
    summary.files.push_back(file);
    summary.rows += t.rows.size();
  }
};

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ResourceError("cannot read fixture " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<int> random_permutation(std::mt19937_64& rng, int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

IntMatrix random_stochastic_counts(std::mt19937_64& rng, int n, int frame) {
  IntMatrix counts(n, n, 0);
  for (int r = 0; r < frame; ++r) {
    const auto p = random_permutation(rng, n);
    for (int i = 0; i < n; ++i) ++counts(i, p[i]);
  }
  return counts;
}

TrafficMatrix random_traffic(std::mt19937_64& rng, int k, int n, int m) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  RealMatrix lambda(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) lambda(i, j) = u(rng);
  double peak = 0.0;
  for (int i = 0; i < k; ++i) peak = std::max({peak, lambda.row_sum(i), lambda.col_sum(i)});
  std::uniform_real_distribution<double> load(0.3, 0.95);
  const double s = load(rng) * n / peak;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) lambda(i, j) *= s;
  return TrafficMatrix::make(lambda, ClosSpec::make(m, n, k));
}

RationalMatrix load_rational_csv(const fs::path& p) {
  std::vector<std::vector<Rational>> rows;
  std::istringstream in(read_text(p));
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<Rational> row;
    for (const auto& tok : csv::split(line, ',')) row.push_back(parse_rational(trim(tok)));
    rows.push_back(row);
  }
  return RationalMatrix::from_rows(rows);
}

std::vector<double> tenths() {
  std::vector<double> v;
  for (int i = 1; i <= 10; ++i) v.push_back(i / 10.0);
  return v;
}

void run_fig6(Context& ctx) {
  const auto ns = ctx.params.ints("n", {8});
  const int k = static_cast<int>(ctx.params.count("k", 8));
  csv::Table curve{"PSNR versus central modules m; natural log; nonblocking vs random routing",
                   {"m", "n", "k", "psnr_nonblocking", "psnr_random", "carried_random",
                    "carried_random_asymptotic"},
                   {}};
  for (int n : ns) {
    std::vector<int> def;
    for (int m = n; m <= 4 * n; ++m) def.push_back(m);
    for (int m : ctx.params.ints("m", def)) {
      const auto spec = ClosSpec::make(m, n, k);
      const double nb = m == n ? HUGE_VAL : nonblocking_psnr(spec);
      curve.rows.push_back({num(m), num(n), num(k), num(nb),
                            num(random_routing_psnr(spec, false)),
                            num(random_routing_carried_load(spec, false)),
                            num(random_routing_carried_load(spec, true))});
    }
  }
  ctx.emit("fig6.csv", curve);

  csv::Table trip{"max data rate from the PSNR of carried load 1-exp(-sigma); rate in ports",
                  {"m", "sigma", "psnr", "max_data_rate", "expected"},
                  {}};
  for (int m : ctx.params.ints("roundtrip_m", {4, 8, 16, 32}))
    for (double sigma : ctx.params.reals("sigma", tenths())) {
      const double snr = psnr(-std::expm1(-sigma));
      trip.rows.push_back({num(m), num(sigma), num(snr), num(max_data_rate(m, snr)), num(sigma * m)});
    }
  ctx.emit("fig6_roundtrip.csv", trip);
}

void run_fig10(Context& ctx) {
  const auto rhos = ctx.params.reals("rho", tenths());
  const int max_l = static_cast<int>(ctx.params.count("max_L", 100));
  const int mass_k = static_cast<int>(ctx.params.count("mass_terms", 500));
  csv::Table pq{"stage success p and deflection q versus offered load rho", {"rho", "p", "q"}, {}};
  csv::Table ac{"loss bound constants: ln P <= slope (L+2) + intercept = ln(c a^-L)",
                {"rho", "slope", "intercept", "a", "c"},
                {}};
  csv::Table mass{"absorption mass sum_{k<=K} G_Q(k)", {"rho", "terms", "mass"}, {}};
  csv::Table tail{"loss tail P(exit after stage L): exact recursion vs closed-form bounds; natural log",
                  {"rho", "L", "exact_tail", "explicit_bound", "log_linear_bound", "ln_exact", "ln_bound"},
                  {}};
  for (double rho : rhos) {
    const auto d = DeflectionParams::from_load(rho);
    pq.rows.push_back({num(rho), num(d.p), num(d.q)});
    ac.rows.push_back({num(rho), num(d.slope), num(d.intercept), num(d.a), num(d.c)});
    const auto s = absorption_series(d.p, d.q, mass_k);
    double total = 0.0;
    for (double g : s.g_q) total += g;
    mass.rows.push_back({num(rho), num(mass_k), num(total)});
    for (int L = 1; L <= max_l; ++L) {
      const double ex = exact_tail(d.p, d.q, L);
      const auto b = closed_form_tail(d.p, d.q, L);
      tail.rows.push_back({num(rho), num(L), num(ex), num(b.explicit_bound), num(b.log_linear_bound),
                           num(std::log(ex)), num(std::log(b.log_linear_bound))});
    }
  }
  ctx.emit("fig10_pq.csv", pq);
  ctx.emit("fig10_ac.csv", ac);
  ctx.emit("fig10_mass.csv", mass);
  ctx.emit("fig10_tail.csv", tail);
}

void run_table2(Context& ctx) {
  const auto spec = ClosSpec::make(3, 2, 4);
  const std::vector<int> perm{1, 3, 2, 0, 6, 4, 7, 5};
  const auto reqs = requests_from_permutation(perm);
  const auto tags = clos_route_assignment(spec, reqs);
  csv::Table t{"routing tags for C(3,2,4), 0-based: source, destination, central module, output module, output port",
               {"S", "D", "G", "Q", "R"},
               {}};
  for (std::size_t i = 0; i < reqs.size(); ++i)
    t.rows.push_back({num(reqs[i].source), num(reqs[i].destination), num(tags[i].central),
                      num(tags[i].out_module), num(tags[i].out_port)});
  ctx.emit("table2.csv", t);

  const int m = static_cast<int>(ctx.params.count("clos_m", 4));
  const int n = static_cast<int>(ctx.params.count("clos_n", 4));
  const int k = static_cast<int>(ctx.params.count("clos_k", 8));
  const std::uint64_t trials = ctx.params.count("trials", 10000);
  const auto big = ClosSpec::make(m, n, k);
  std::mt19937_64 rng(ctx.seed);
  std::uint64_t failures = 0;
  std::string first;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    const auto p = random_permutation(rng, big.ports());
    const auto r = requests_from_permutation(p);
    const auto a = clos_route_assignment(big, r);
    std::string why;
    if (!is_nonblocking_assignment(big, r, a, &why)) {
      if (failures++ == 0) first = why;
    }
  }
  csv::Table s{"random permutation routing on C(m,n,k) checked by the independent nonblocking test",
               {"m", "n", "k", "trials", "failures", "first_failure"},
               {{num(m), num(n), num(k), num(trials), num(failures), first}}};
  ctx.emit("route_random.csv", s);
}

void run_benes(Context& ctx) {
  const std::vector<int> example{1, 6, 0, 5, 7, 2, 4, 3};
  std::mt19937_64 rng(ctx.seed);
  const std::uint64_t trials = ctx.params.count("trials", 10000);

  csv::Table flip{"Benes outer-stage flip assignment: unsatisfied constraints after termination",
                  {"case", "N", "trials", "max_unsatisfied", "max_flips", "odd_cycles"},
                  {}};
  {
    const auto r = benes_flip_assign(example);
    flip.rows.push_back({"example", "8", "1", num(unsatisfied_constraints(benes_constraints(example), r.x)),
                         num(r.flips), num(r.even_unsatisfied_per_cycle ? 0 : 1)});
  }
  for (int n : ctx.params.ints("N", {4, 8, 16, 32})) {
    int worst = 0, flips = 0, odd = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      const auto p = random_permutation(rng, n);
      const auto r = benes_flip_assign(p);
      worst = std::max(worst, unsatisfied_constraints(benes_constraints(p), r.x));
      flips = std::max(flips, r.flips);
      odd += r.even_unsatisfied_per_cycle ? 0 : 1;
    }
    flip.rows.push_back({"random", num(n), num(trials), num(worst), num(flips), num(odd)});
  }
  ctx.emit("benes_flip.csv", flip);

  csv::Table count{"solutions of the outer-stage constraint system: 2^components vs exhaustive enumeration",
                   {"N", "trial", "components", "two_pow_components", "exhaustive"},
                   {}};
  {
    const auto sys = benes_constraints(example);
    const auto c = count_components(sys);
    count.rows.push_back({"8", "example", num(c.components), num(c.solutions),
                          num(count_solutions_exhaustive(sys))});
  }
  const std::uint64_t count_trials = ctx.params.count("count_trials", 20);
  for (int n : ctx.params.ints("count_N", {2, 4, 6, 8, 10, 12}))
    for (std::uint64_t t = 0; t < count_trials; ++t) {
      const auto sys = benes_constraints(random_permutation(rng, n));
      const auto c = count_components(sys);
      count.rows.push_back({num(n), num(t), num(c.components), num(c.solutions),
                            num(count_solutions_exhaustive(sys))});
    }
  ctx.emit("benes_count.csv", count);

  csv::Table full{"recursive Benes configuration walked stage by stage",
                  {"N", "cases", "link_conflicts", "wrong_outputs"},
                  {}};
  const auto walk_all = [&](int n, const std::vector<std::vector<int>>& perms) {
    int conflicts = 0, wrong = 0;
    for (const auto& p : perms) {
      const auto w = walk_benes(benes_full_assign(p));
      conflicts += w.link_conflict ? 1 : 0;
      wrong += w.realized == p ? 0 : 1;
    }
    full.rows.push_back({num(n), num(static_cast<long>(perms.size())), num(conflicts), num(wrong)});
  };
  walk_all(8, {example});
  std::vector<std::vector<int>> all4;
  std::vector<int> p4{0, 1, 2, 3};
  do all4.push_back(p4);
  while (std::next_permutation(p4.begin(), p4.end()));
  walk_all(4, all4);
  const std::uint64_t walk_trials = ctx.params.count("walk_trials", 1000);
  for (int n : ctx.params.ints("walk_N", {8, 16})) {
    std::vector<std::vector<int>> perms;
    for (std::uint64_t t = 0; t < walk_trials; ++t) perms.push_back(random_permutation(rng, n));
    walk_all(n, perms);
  }
  ctx.emit("benes_full.csv", full);
}

void run_table4(Context& ctx) {
  const auto w = WeightSet::from_counts({4, 1, 1, 1, 1});
  std::vector<std::vector<Rational>> trace;
  const auto seq = schedule_wfq(w, TieBreak::kLowerIndex, &trace);
  csv::Table t{"WFQ trace on weights (1/2,1/8,1/8,1/8,1/8); finish times in slots; last column is the selection",
               {"slot", "F1", "F2", "F3", "F4", "F5", "selected"},
               {}};
  for (std::size_t s = 0; s < seq.size(); ++s) {
    std::vector<std::string> row{num(static_cast<long>(s + 1))};
    for (const auto& f : trace[s]) row.push_back(to_string(f));
    row.push_back("P" + std::to_string(seq[s] + 1));
    t.rows.push_back(row);
  }
  ctx.emit("table4.csv", t);

  csv::Table more{"frame sequences from the fair queueing family", {"case", "counts", "algorithm", "sequence"}, {}};
  more.rows.push_back({"table4", "4 1 1 1 1", "wfq", format_sequence(seq)});
  more.rows.push_back({"hurr", "4 1 1 1 1", "hurr", format_sequence(schedule_hurr(w))});
  const auto two = WeightSet::from_counts({1, 3});
  more.rows.push_back({"two_state", "1 3", "wfq", format_sequence(schedule_wfq(two))});
  ctx.emit("schedules.csv", more);
}

void run_table5(Context& ctx) {
  const auto w = WeightSet::from_counts({4, 1, 1, 1, 1});
  Wf2qTrace trace;
  const auto seq = schedule_wf2q(w, {}, &trace);
  csv::Table t{"WF2Q trace on weights (1/2,1/8,1/8,1/8,1/8); qualified states per slot; last column is the selection",
               {"slot", "qualified", "selected"},
               {}};
  for (std::size_t s = 0; s < seq.size(); ++s) {
    std::string q;
    for (int i : trace.qualified[s]) q += (q.empty() ? "" : " ") + ("P" + std::to_string(i + 1));
    t.rows.push_back({num(static_cast<long>(s + 1)), q, "P" + std::to_string(seq[s] + 1)});
  }
  ctx.emit("table5.csv", t);
}

const std::vector<std::vector<std::int64_t>>& table6_rows() {
  static const std::vector<std::vector<std::int64_t>> rows{
      {1, 1, 1, 7}, {1, 1, 2, 6}, {1, 1, 3, 5}, {1, 2, 2, 5}, {1, 1, 4, 4},
      {1, 2, 3, 4}, {2, 2, 2, 4}, {1, 3, 3, 3}, {2, 2, 3, 3}};
  return rows;
}

void run_table6(Context& ctx) {
  csv::Table t{"average interstate time in log2 slots per scheduler on frame F=10; random is the i.i.d. expectation",
               {"row", "weights", "random", "wfq", "wf2q", "hurr", "entropy"},
               {}};
  int r = 0;
  for (const auto& counts : table6_rows()) {
    const auto w = WeightSet::from_counts(counts);
    std::string ws;
    for (int i = 0; i < w.size(); ++i) ws += (i ? " " : "") + to_string(w.weight(i));
    const double h = entropy(w);
    t.rows.push_back({num(++r), ws, num(h + random_schedule_excess(w)),
                      num(smoothness(schedule_wfq(w), w).average),
                      num(smoothness(schedule_wf2q(w), w).average),
                      num(smoothness(schedule_hurr(w), w).average), num(h)});
  }
  ctx.emit("table6.csv", t);

  const auto d = WeightSet::from_counts({4, 2, 1, 1});
  const auto opt = smoothness(parse_sequence("P1P2P1P3P1P2P1P4"), d);
  const auto wfq = smoothness(schedule_wfq(d), d);
  csv::Table dy{"dyadic weights (1/2,1/4,1/8,1/8); log2 slots",
                {"case", "sequence", "L", "H"},
                {{"optimal", "P1P2P1P3P1P2P1P4", num(opt.average), num(opt.entropy)},
                 {"wfq", format_sequence(schedule_wfq(d)), num(wfq.average), num(wfq.entropy)}}};
  ctx.emit("table6_dyadic.csv", dy);
}

void run_example4x4(Context& ctx) {
  const auto c = load_rational_csv(ctx.data / "example4x4_matrix.csv");
  const auto e = entropy_2d(c);
  csv::Table ent{"4x4 capacity matrix entropies in bits per module", {"module", "h_input", "h_output"}, {}};
  for (int i = 0; i < static_cast<int>(e.input.size()); ++i)
    ent.rows.push_back({num(i), num(e.input[i]), num(e.output[i])});
  ctx.emit("example4x4_entropy.csv", ent);

  csv::Table tot{"4x4 example totals in bits", {"quantity", "value"}, {{"H_C", num(e.total)}}};
  csv::Table per{"token grid smoothness per module in bits",
                 {"grid", "module", "d_input", "d_output", "kraft_row", "kraft_col"},
                 {}};
  for (const char* name : {"wfq", "hurr", "alt"}) {
    const auto g = parse_token_grid(read_text(ctx.data / ("example4x4_grid_" + std::string(name) + ".txt")), 4);
    const auto s = smoothness_2d(g, c);
    tot.rows.push_back({"D_" + std::string(name), num(s.total)});
    for (int i = 0; i < 4; ++i)
      per.rows.push_back({name, num(i), num(s.input[i]), num(s.output[i]), num(s.kraft_row_sums[i]),
                          num(s.kraft_col_sums[i])});
  }
  ctx.emit("example4x4_total.csv", tot);
  ctx.emit("example4x4_grids.csv", per);
}

void run_fig21(Context& ctx) {
  std::mt19937_64 rng(ctx.seed);
  const int k = static_cast<int>(ctx.params.count("k", 8));
  const int m = static_cast<int>(ctx.params.count("m", 4));
  const std::uint64_t trials = ctx.params.count("trials", 20);
  const auto frames = ctx.params.ints("F", {16, 32, 64, 128});
  std::vector<double> worst(frames.size(), 0.0), mean(frames.size(), 0.0);
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto a = allocate_capacity(random_traffic(rng, k, m, m));
    for (std::size_t f = 0; f < frames.size(); ++f) {
      const double err = bandlimit_and_round(a.c, m, frames[f]).max_error;
      worst[f] = std::max(worst[f], err);
      mean[f] += err / static_cast<double>(trials);
    }
  }
  csv::Table out{"round-off error of capacity matrices on frame size F; error in capacity units",
                 {"F", "trials", "mean_max_error", "worst_max_error", "F_times_worst"},
                 {}};
  for (std::size_t f = 0; f < frames.size(); ++f)
    out.rows.push_back({num(frames[f]), num(trials), num(mean[f]), num(worst[f]), num(frames[f] * worst[f])});
  ctx.emit("fig21.csv", out);
}

void run_montecarlo(Context& ctx) {
  const auto ports = ctx.params.ints("N", {32});
  const auto rhos = ctx.params.reals("rho", {1.0});
  const std::uint64_t slots = ctx.params.count("slots", 1000000);
  csv::Table cb{"crossbar Monte Carlo: busy output fraction vs finite-N formula", {"N", "rho", "slots", "empirical", "analytic", "busy_skewness"}, {}};
  csv::Table occ{"packets per output per slot: empirical vs Poisson folded at N", {"N", "rho", "level", "empirical", "poisson"}, {}};
  std::uint64_t salt = 0;
  for (int n : ports)
    for (double rho : rhos) {
      const auto sim = simulate_crossbar(n, rho, slots, ctx.seed + salt++);
      cb.rows.push_back({num(n), num(rho), num(slots), num(sim.load.carried_load), num(carried_load(rho, n)),
                         num(sim.busy_skewness)});
      const auto emp = sim.occupancy_pmf();
      const auto model = truncate_pmf(boltzmann_pmf(rho, OccupancyModel::kDistinguishable).pmf, n);
      for (int i = 0; i <= n; ++i)
        occ.rows.push_back({num(n), num(rho), num(i), num(i < static_cast<int>(emp.size()) ? emp[i] : 0.0),
                            num(i < static_cast<int>(model.size()) ? model[i] : 0.0)});
    }
  ctx.emit("montecarlo_crossbar.csv", cb);
  ctx.emit("montecarlo_occupancy.csv", occ);

  const int dn = static_cast<int>(ctx.params.count("deflect_n", 4));
  const std::uint64_t dslots = ctx.params.count("deflect_slots", 20000);
  csv::Table df{"deflection cascade loss vs bound c a^-L; loss is a fraction of offered packets",
                {"n", "rho", "L", "slots", "offered", "lost", "loss", "bound"},
                {}};
  for (double rho : ctx.params.reals("deflect_rho", {1.0}))
    for (int L : ctx.params.ints("L", {10, 20, 30})) {
      const auto sim = simulate_deflection(dn, L, rho, dslots, ctx.seed + salt++);
      df.rows.push_back({num(dn), num(rho), num(L), num(dslots), num(sim.offered), num(sim.lost),
                         num(sim.loss()), num(loss_bound(rho, L))});
    }
  ctx.emit("montecarlo_deflection.csv", df);
}

void run_boltzmann(Context& ctx) {
  csv::Table t{"entropy-maximizing occupancy shares n_i/N vs Poisson pmf at rho=M/N",
               {"model", "N", "M", "level", "share", "poisson"},
               {}};
  const int max_n = static_cast<int>(ctx.params.count("max_N", 10));
  for (auto [model, name] : {std::pair{StateCountModel::kSinglePacketInputs, "single"},
                             std::pair{StateCountModel::kDistinguishable, "distinguishable"}})
    for (int n = 1; n <= max_n; ++n)
      for (int m = 0; m <= n; ++m) {
        const auto r = maximize_entropy_bruteforce(n, m, model);
        const auto p = boltzmann_pmf(static_cast<double>(m) / n, OccupancyModel::kDistinguishable).pmf;
        for (int i = 0; i <= m; ++i) {
          const double share = i < static_cast<int>(r.occupancy.size()) ? static_cast<double>(r.occupancy[i]) / n : 0.0;
          t.rows.push_back({name, num(n), num(m), num(i), num(share),
                            num(i < static_cast<int>(p.size()) ? p[i] : 0.0)});
        }
      }
  ctx.emit("boltzmann.csv", t);

  csv::Table p0{"busy probability 1 - p_0 of the Poisson shape vs 1 - exp(-rho)",
                {"rho", "one_minus_p0", "one_minus_exp"},
                {}};
  for (int i = 1; i <= 20; ++i) {
    const double rho = i / 20.0;
    p0.rows.push_back({num(rho), num(1.0 - boltzmann_pmf(rho, OccupancyModel::kDistinguishable).pmf[0]),
                       num(-std::expm1(-rho))});
  }
  ctx.emit("boltzmann_p0.csv", p0);
}

std::string pattern_text(const IntMatrix& p) {
  std::string s;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    if (i) s += ' ';
    std::string cell;
    for (std::size_t j = 0; j < p.cols(); ++j)
      for (std::int64_t c = 0; c < p(i, j); ++c) cell += (cell.empty() ? "" : "+") + std::to_string(j);
    s += cell;
  }
  return s;
}

void run_bvn(Context& ctx) {
  const auto c = CapacityMatrix::from_rationals(load_rational_csv(ctx.data / "example4x4_matrix.csv"), 1);
  const auto d = bvn_decompose(c);
  csv::Table t{"decomposition states of the 4x4 capacity matrix; outputs per input, 0-based; weight = multiplicity/F",
               {"state", "multiplicity", "weight", "outputs"},
               {}};
  for (std::size_t s = 0; s < d.states.size(); ++s)
    t.rows.push_back({num(static_cast<long>(s)), num(d.states[s].multiplicity), to_string(d.states[s].weight),
                      pattern_text(d.states[s].pattern)});
  ctx.emit("bvn_example4x4.csv", t);

  std::mt19937_64 rng(ctx.seed);
  const std::uint64_t trials = ctx.params.count("trials", 500);
  const std::uint64_t multi = ctx.params.count("multi_module_trials", 100);
  std::uniform_int_distribution<int> nn(2, 8), ff(1, 16), mm(2, 3);
  csv::Table r{"random integer doubly stochastic matrices: states K vs min(F, N^2-2N+2), or F when modules > 1",
               {"trial", "N", "F", "modules", "permutations", "K", "bound", "exact"},
               {}};
  for (std::uint64_t trial = 0; trial < trials + multi; ++trial) {
    const int n = nn(rng), f = ff(rng), m = trial < trials ? 1 : mm(rng);
    const auto cap = CapacityMatrix::from_counts(random_stochastic_counts(rng, n, m * f), f, m);
    const auto dec = bvn_decompose(cap);
    bool perms_ok = true;
    for (const auto& p : dec.permutations) perms_ok = perms_ok && is_permutation_matrix(p);
    const bool exact = perms_ok && dec.reconstruct() == cap.c && dec.total_weight() == Rational(1);
    // sums of m > 1 permutations escape the Birkhoff count; only K <= F survives
    const std::int64_t bound = m == 1 ? std::min<std::int64_t>(f, static_cast<std::int64_t>(n) * n - 2 * n + 2) : f;
    r.rows.push_back({num(trial), num(n), num(f), num(m), num(static_cast<long>(dec.permutations.size())),
                      num(static_cast<long>(dec.states.size())), num(bound), exact ? "1" : "0"});
  }
  ctx.emit("bvn_random.csv", r);
}

void run_capacity(Context& ctx) {
  std::mt19937_64 rng(ctx.seed);
  const std::uint64_t trials = ctx.params.count("trials", 500);
  csv::Table t{"capacity allocation on random positive traffic; rates in packets per slot",
               {"trial", "k", "n", "m", "iterations", "max_sum_error", "min_margin", "monotone"},
               {}};
  std::uniform_int_distribution<int> kk(2, 8), nn(1, 6), extra(0, 4);
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    const int k = kk(rng), n = nn(rng), m = n + extra(rng);
    const auto tr = random_traffic(rng, k, n, m);
    const auto a = allocate_capacity(tr);
    double err = 0.0, margin = 1e300;
    for (int i = 0; i < k; ++i) {
      err = std::max({err, std::abs(a.c.row_sum(i) - m), std::abs(a.c.col_sum(i) - m)});
      for (int j = 0; j < k; ++j) margin = std::min(margin, a.c(i, j) - tr.lambda(i, j));
    }
    t.rows.push_back({num(trial), num(k), num(n), num(m), num(a.iterations), num(err), num(margin),
                      a.monotone ? "1" : "0"});
  }
  ctx.emit("capacity_random.csv", t);

  const std::uint64_t small = ctx.params.count("trials_2x2", 200);
  const int steps = static_cast<int>(ctx.params.count("grid_steps", 20000));
  csv::Table g{"2x2 weighted delay: heuristic allocation vs fine grid optimum; delay in slots",
               {"trial", "m", "heuristic", "optimum", "ratio"},
               {}};
  for (std::uint64_t trial = 0; trial < small; ++trial) {
    const auto tr = random_traffic(rng, 2, 2, 2 + static_cast<int>(trial % 3));
    const double h = weighted_delay(allocate_capacity(tr).c, tr.lambda);
    const auto best = grid_search_delay_2x2(tr.lambda, tr.spec.m, steps);
    g.rows.push_back({num(trial), num(tr.spec.m), num(h), num(best.delay), num(h / best.delay)});
  }
  ctx.emit("capacity_2x2.csv", g);
}

void run_kraft(Context& ctx) {
  std::mt19937_64 rng(ctx.seed);
  const std::uint64_t trials = ctx.params.count("trials", 300);
  csv::Table one{"frame schedules: smoothness L and entropy H in log2 slots, Kraft sum of 2^-gap",
                 {"trial", "K", "F", "algorithm", "L", "H", "kraft"},
                 {}};
  std::uniform_int_distribution<int> kk(1, 7), cnt(1, 9);
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    std::vector<std::int64_t> counts(kk(rng));
    for (auto& c : counts) c = cnt(rng);
    const auto w = WeightSet::from_counts(counts);
    FrameSequence shuffled;
    for (int i = 0; i < w.size(); ++i)
      for (std::int64_t r = 0; r < w.count(i); ++r) shuffled.push_back(i);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const std::pair<const char*, FrameSequence> runs[] = {
        {"wfq", schedule_wfq(w)}, {"wf2q", schedule_wf2q(w)}, {"hurr", schedule_hurr(w)}, {"shuffled", shuffled}};
    for (const auto& [name, seq] : runs) {
      const auto s = smoothness(seq, w);
      one.rows.push_back({num(trial), num(w.size()), num(w.frame()), name, num(s.average), num(s.entropy),
                          num(s.kraft_sum)});
    }
  }
  ctx.emit("kraft_1d.csv", one);

  const std::uint64_t grids = ctx.params.count("grids", 60);
  csv::Table two{"token grids: D vs H(C) in bits; worst Kraft row/column sums; min per-module gaps D-H",
                 {"trial", "N", "F", "algorithm", "D", "H", "max_kraft_row", "max_kraft_col", "min_input_gap",
                  "min_output_gap"},
                 {}};
  std::uniform_int_distribution<int> nn(2, 6), ff(2, 12);
  for (std::uint64_t trial = 0; trial < grids; ++trial) {
    const int n = nn(rng), f = ff(rng);
    const auto cap = CapacityMatrix::from_counts(random_stochastic_counts(rng, n, f), f, 1);
    const auto dec = bvn_decompose(cap);
    std::vector<std::int64_t> mult;
    for (const auto& s : dec.states) mult.push_back(s.multiplicity);
    const auto w = WeightSet::from_counts(mult);
    std::vector<int> shuffled = dec.slot_state;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto e = entropy_2d(cap.c);
    const std::pair<const char*, FrameSequence> runs[] = {
        {"wfq", schedule_wfq(w)}, {"wf2q", schedule_wf2q(w)}, {"hurr", schedule_hurr(w)}, {"shuffled", shuffled}};
    for (const auto& [name, seq] : runs) {
      std::vector<IntMatrix> slots;
      for (int st : seq) slots.push_back(dec.states[st].pattern);
      const auto s = smoothness_2d(grid_from_schedule(slots), cap.c);
      double kr = 0.0, kc = 0.0, gi = 1e300, go = 1e300;
      for (int i = 0; i < n; ++i) {
        kr = std::max(kr, s.kraft_row_sums[i]);
        kc = std::max(kc, s.kraft_col_sums[i]);
        gi = std::min(gi, s.input[i] - e.input[i]);
        go = std::min(go, s.output[i] - e.output[i]);
      }
      two.rows.push_back({num(trial), num(n), num(f), name, num(s.total), num(e.total), num(kr), num(kc), num(gi),
                          num(go)});
    }
  }
  ctx.emit("kraft_2d.csv", two);
}

void run_graphcode(Context& ctx) {
  const auto p8 = TannerCode::load((ctx.data / "parity8.txt").string());
  csv::Table cw{"codeword membership on the eight-variable parity matrix", {"code", "word", "codeword", "unsatisfied"}, {}};
  for (std::uint8_t bit : {std::uint8_t{0}, std::uint8_t{1}}) {
    const BitVector x(p8.variables(), bit);
    std::string word(x.size(), static_cast<char>('0' + bit));
    cw.rows.push_back({"parity8", word, is_codeword(p8, x) ? "1" : "0", num(unsatisfied_count(p8, x))});
  }
  ctx.emit("graphcode_codewords.csv", cw);

  csv::Table dec{"single-error flip decoding per code; expansion checked exhaustively",
                 {"code", "variables", "degree", "alpha", "expansion_ok", "worst_ratio", "radius", "trials", "failures",
                  "nonmonotone"},
                 {}};
  struct Fixture {
    const char* name;
    double alpha;
  };
  for (const auto& f : {Fixture{"parity8", 0.25}, Fixture{"affine3", 2.0 / 9.0}, Fixture{"affine4", 3.0 / 16.0},
                        Fixture{"cycle8", 0.25}}) {
    const auto code = TannerCode::load((ctx.data / (std::string(f.name) + ".txt")).string());
    const int deg = code.variable_degree();
    const auto rep = expansion_check(code.graph(), deg, f.alpha);
    int trials = 0, failures = 0, nonmono = 0;
    for (const auto& w : enumerate_codewords(code))
      for (int i = 0; i < code.variables(); ++i) {
        auto r = w;
        r[i] ^= 1;
        const auto d = flip_decode(code, r, 4 * code.variables());
        ++trials;
        if (!d.success || d.word != w) ++failures;
        for (std::size_t s = 1; s < d.unsatisfied_trace.size(); ++s)
          if (d.unsatisfied_trace[s] >= d.unsatisfied_trace[s - 1]) {
            ++nonmono;
            break;
          }
      }
    dec.rows.push_back({f.name, num(code.variables()), num(deg), num(f.alpha), rep.satisfied ? "1" : "0",
                        num(rep.worst_ratio),
                        num(static_cast<int>(std::floor(f.alpha * code.variables() / 2.0 + 1e-12))), num(trials), num(failures), num(nonmono)});
  }
  ctx.emit("graphcode_decode.csv", dec);
}

using Runner = void (*)(Context&);

const std::vector<std::pair<std::string, Runner>>& registry() {
  static const std::vector<std::pair<std::string, Runner>> r{
      {"fig6", run_fig6},        {"fig10", run_fig10},         {"table2", run_table2},   {"benes", run_benes},
      {"table4", run_table4},    {"table5", run_table5},       {"table6", run_table6},   {"example4x4", run_example4x4},
      {"fig21", run_fig21},      {"montecarlo", run_montecarlo}, {"boltzmann", run_boltzmann}, {"bvn", run_bvn},
      {"capacity", run_capacity}, {"kraft", run_kraft},        {"graphcode", run_graphcode}};
  return r;
}

ExperimentSummary run_one(const ExperimentManifest& m, const std::string& id, Runner fn) {
  Context ctx{m, Params(m), m.data_dir.empty() ? default_data_dir() : m.data_dir, derive_seed(m.seed, id), {}};
  ctx.summary.experiment = id;
  try {
    fn(ctx);
  } catch (const PreconditionError& e) {
    throw UsageError(id + ": " + e.what());
  } catch (const DomainError& e) {
    throw UsageError(id + ": " + e.what());
  }
  return ctx.summary;
}

}  // namespace

ExperimentManifest ExperimentManifest::parse(const std::string& text) {
  ExperimentManifest m;
  const auto body = trim(text);
  if (!body.empty() && body[0] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("manifest: ") + e.what());
    }
    if (!j.is_object()) throw UsageError("manifest: expected a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (value.is_array()) {
        std::string joined;
        for (const auto& v : value) joined += (joined.empty() ? "" : ",") + json_scalar(v);
        assign_key(m, key, joined);
      } else if (value.is_object() && key == "parameters") {
        for (const auto& [k2, v2] : value.items()) {
          if (v2.is_array()) {
            std::string joined;
            for (const auto& v : v2) joined += (joined.empty() ? "" : ",") + json_scalar(v);
            m.parameters[k2] = joined;
          } else {
            m.parameters[k2] = json_scalar(v2);
          }
        }
      } else {
        assign_key(m, key, json_scalar(value));
      }
    }
    return m;
  }
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("manifest line " + std::to_string(lineno) + ": expected key=value");
    assign_key(m, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return m;
}

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& [id, fn] : registry()) v.push_back(id);
    return v;
  }();
  return ids;
}

std::filesystem::path default_data_dir() { return SWLAB_DATA_DIR; }

std::vector<ExperimentSummary> run_experiment(const ExperimentManifest& manifest) {
  std::vector<std::pair<std::string, Runner>> todo;
  for (const auto& entry : registry())
    if (manifest.experiment == "all" || manifest.experiment == entry.first) todo.push_back(entry);
  if (todo.empty()) throw UsageError("unknown experiment id '" + manifest.experiment + "'");
  std::error_code ec;
  fs::create_directories(manifest.output_dir, ec);
  if (ec) throw UsageError("cannot create " + manifest.output_dir.string() + ": " + ec.message());

  std::vector<ExperimentSummary> out;
  if (manifest.jobs > 1 && todo.size() > 1) {
    std::vector<std::future<ExperimentSummary>> pending;
    for (const auto& [id, fn] : todo)
      pending.push_back(std::async(std::launch::async, run_one, std::cref(manifest), id, fn));
    for (auto& f : pending) out.push_back(f.get());
  } else {
    for (const auto& [id, fn] : todo) out.push_back(run_one(manifest, id, fn));
  }
  return out;
}

}  // namespace swlab
