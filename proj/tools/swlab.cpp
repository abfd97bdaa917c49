#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "csv.hpp"
#include "swlab/closmodel.hpp"
#include "swlab/contention.hpp"
#include "swlab/deflection.hpp"
#include "swlab/errors.hpp"
#include "swlab/experiments.hpp"
#include "swlab/matching.hpp"
#include "swlab/pathswitch.hpp"
#include "swlab/sched.hpp"

namespace {

using namespace swlab;
using csv::num;

constexpr int kOk = 0;
constexpr int kCriterionFailure = 1;
constexpr int kUsage = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\n' || ch == '[' || ch == ']') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<int> parse_permutation(const std::string& text) {
  std::vector<int> perm;
  const auto t = text.find_first_not_of(" \t");
  if (t != std::string::npos && text[t] == '[') {
    try {
      perm = nlohmann::json::parse(text).get<std::vector<int>>();
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("permutation: ") + e.what());
    }
    return perm;
  }
  for (const auto& tok : tokens(text)) {
    try {
      perm.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw UsageError("permutation: bad entry '" + tok + "'");
    }
  }
  return perm;
}

// Rationals or decimals; with frame > 0 every entry must land on 1/frame.
CapacityMatrix load_capacity(const std::string& path, int modules, std::int64_t frame) {
  std::vector<std::vector<Rational>> rows;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    std::vector<Rational> row;
    for (const auto& tok : tokens(line)) row.push_back(parse_rational(tok));
    rows.push_back(row);
  }
  const auto c = RationalMatrix::from_rows(rows);
  if (frame <= 0) return CapacityMatrix::from_rationals(c, modules);
  IntMatrix counts(c.rows(), c.cols());
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) {
      const Rational s = c(i, j) * frame;
      if (s.denominator() != 1) throw PreconditionError("entry " + to_string(c(i, j)) + " is not a multiple of 1/F");
      counts(i, j) = s.numerator();
    }
  return CapacityMatrix::from_counts(counts, frame, modules);
}

WeightSet parse_weights(const std::string& text, std::int64_t frame) {
  const auto toks = tokens(text);
  if (toks.empty()) throw UsageError("no weights given");
  bool integral = true, decimal = false;
  for (const auto& t : toks) {
    if (t.find('/') != std::string::npos) integral = false;
    if (t.find('.') != std::string::npos) integral = false, decimal = true;
  }
  if (integral) {
    std::vector<std::int64_t> counts;
    for (const auto& t : toks) counts.push_back(std::stoll(t));
    return WeightSet::from_counts(counts);
  }
  if (decimal && frame > 0) {
    std::vector<double> w;
    for (const auto& t : toks) w.push_back(std::stod(t));
    return WeightSet::from_decimals(w, frame);
  }
  std::vector<Rational> w;
  for (const auto& t : toks) w.push_back(parse_rational(t));
  return WeightSet::from_rationals(w);
}

FrameSequence run_scheduler(const std::string& algo, const WeightSet& w, std::uint64_t seed) {
  if (algo == "wfq") return schedule_wfq(w);
  if (algo == "wf2q") return schedule_wf2q(w);
  if (algo == "hurr") return schedule_hurr(w);
  if (algo == "random") return schedule_random(w, static_cast<std::uint64_t>(w.frame()), seed);
  throw UsageError("unknown algorithm " + algo);
}

// "multiplicity out_0 out_1 ..." per line.
std::vector<DecompositionState> load_decomposition(const std::string& path, std::int64_t frame) {
  std::vector<DecompositionState> states;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto toks = tokens(line);
    if (toks.size() < 2) throw UsageError("decomposition line needs a multiplicity and outputs");
    const int n = static_cast<int>(toks.size()) - 1;
    DecompositionState s;
    s.multiplicity = std::stoll(toks[0]);
    s.weight = Rational(s.multiplicity, frame);
    s.pattern = IntMatrix(n, n, 0);
    for (int i = 0; i < n; ++i) s.pattern(i, std::stoi(toks[i + 1])) = 1;
    if (!is_permutation_matrix(s.pattern)) throw UsageError("decomposition line is not a permutation: " + line);
    states.push_back(s);
  }
  return states;
}

std::string outputs_text(const IntMatrix& p) {
  std::string s;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    std::string cell;
    for (std::size_t j = 0; j < p.cols(); ++j)
      for (std::int64_t c = 0; c < p(i, j); ++c) cell += (cell.empty() ? "" : "+") + std::to_string(j);
    s += (i ? " " : "") + cell;
  }
  return s;
}

std::pair<std::string, double> split_assignment(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos) throw UsageError("expected key=value, got " + kv);
  try {
    return {kv.substr(0, eq), std::stod(kv.substr(eq + 1))};
  } catch (const std::exception&) {
    throw UsageError("bad value in " + kv);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"switching theory laboratory"};
  app.require_subcommand(1);

  auto* tradeoff = app.add_subcommand("tradeoff", "PSNR of nonblocking vs random routing over m");
  int t_n = 8, t_k = 8, t_mmax = 0;
  tradeoff->add_option("--n", t_n, "ports per input module");
  tradeoff->add_option("--k", t_k, "modules per outer stage");
  tradeoff->add_option("--m-max", t_mmax, "largest central module count (default 4n)");

  auto* deflect = app.add_subcommand("deflect", "deflection constants, loss bound and simulation");
  std::vector<double> d_rho;
  int d_maxl = 30, d_n = 4;
  std::uint64_t d_slots = 0, d_seed = 1;
  deflect->add_option("--rho", d_rho, "offered loads")->delimiter(',');
  deflect->add_option("--max-L", d_maxl, "largest cascade length");
  deflect->add_option("--n", d_n, "module size of the simulated cascade");
  deflect->add_option("--slots", d_slots, "simulated slots per length (0 skips simulation)");
  deflect->add_option("--seed", d_seed);

  auto* assign = app.add_subcommand("assign", "routing tags for a permutation on C(m,n,k)");
  int a_m = 3, a_n = 2, a_k = 4;
  std::string a_perm;
  assign->add_option("--m", a_m);
  assign->add_option("--n", a_n);
  assign->add_option("--k", a_k);
  assign->add_option("perm", a_perm, "JSON array or comma list of destinations")->required();

  auto* decompose = app.add_subcommand("decompose", "permutation states of a capacity matrix");
  std::string c_matrix;
  int c_modules = 1;
  std::int64_t c_frame = 0;
  decompose->add_option("matrix", c_matrix, "CSV of p/q or decimals")->required();
  decompose->add_option("--modules", c_modules, "central modules m");
  decompose->add_option("--frame", c_frame, "declared denominator F for decimal entries");

  auto* schedule = app.add_subcommand("schedule", "frame schedule and smoothness for a weight set");
  std::string s_weights, s_algo = "wfq";
  std::int64_t s_frame = 0;
  std::uint64_t s_seed = 1;
  schedule->add_option("weights", s_weights, "counts, p/q or decimals (with --frame)")->required();
  schedule->add_option("--algorithm", s_algo)->check(CLI::IsMember({"wfq", "wf2q", "hurr", "random"}));
  schedule->add_option("--frame", s_frame);
  schedule->add_option("--seed", s_seed);

  auto* schedule2d = app.add_subcommand("schedule2d", "token grid and 2-D smoothness for a capacity matrix");
  std::string g_matrix, g_decomp, g_algo = "hurr";
  std::uint64_t g_seed = 1;
  schedule2d->add_option("matrix", g_matrix)->required();
  schedule2d->add_option("--decomposition", g_decomp, "states file; default decomposes the matrix");
  schedule2d->add_option("--algorithm", g_algo)->check(CLI::IsMember({"wfq", "wf2q", "hurr", "random"}));
  schedule2d->add_option("--seed", g_seed);

  auto* experiment = app.add_subcommand("experiment", "run an experiment and write its CSV files");
  std::string e_id, e_manifest, e_output;
  std::vector<std::string> e_set;
  std::uint64_t e_seed = 0;
  int e_jobs = 0;
  experiment->add_option("id", e_id, "experiment id or 'all'");
  experiment->add_option("--manifest", e_manifest, "key=value or JSON manifest");
  experiment->add_option("--output", e_output, "output directory");
  experiment->add_option("--seed", e_seed);
  experiment->add_option("--set", e_set, "parameter override key=value");
  experiment->add_option("--jobs", e_jobs, "run independent experiments concurrently");

  auto* validate_cmd = app.add_subcommand("validate", "check experiment outputs against the acceptance criteria");
  std::string v_dir = ".", v_data;
  std::vector<int> v_criteria;
  std::vector<std::string> v_tol;
  validate_cmd->add_option("--dir", v_dir, "directory holding experiment CSV files");
  validate_cmd->add_option("--data-dir", v_data, "fixture directory");
  validate_cmd->add_option("--criterion", v_criteria)->check(CLI::Range(1, kCriteria));
  validate_cmd->add_option("--tolerance", v_tol, "override as cNN=value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*tradeoff) {
      const int mmax = t_mmax > 0 ? t_mmax : 4 * t_n;
      std::cout << "# PSNR versus central modules; natural log\nm,psnr_nonblocking,psnr_random\n";
      for (int m = t_n; m <= mmax; ++m) {
        const auto spec = ClosSpec::make(m, t_n, t_k);
        std::cout << m << ',' << num(m == t_n ? HUGE_VAL : nonblocking_psnr(spec)) << ',' << num(random_routing_psnr(spec, false)) << '\n';
      }
      return kOk;
    }
    if (*deflect) {
      if (d_rho.empty())
        for (int i = 1; i <= 10; ++i) d_rho.push_back(i / 10.0);
      std::cout << "# stage constants versus offered load\nrho,p,q,slope,intercept,a,c\n";
      for (double rho : d_rho) {
        const auto d = DeflectionParams::from_load(rho);
        std::cout << num(rho) << ',' << num(d.p) << ',' << num(d.q) << ',' << num(d.slope) << ','
                  << num(d.intercept) << ',' << num(d.a) << ',' << num(d.c) << '\n';
      }
      const double rho = d_rho.back();
      std::cout << "\n# loss versus cascade length at rho=" << num(rho) << "; natural log\nL,ln_bound,empirical\n";
      for (int L = 1; L <= d_maxl; ++L) {
        std::cout << L << ',' << num(std::log(loss_bound(rho, L))) << ',';
        if (d_slots > 0 && L >= 2) std::cout << num(simulate_deflection(d_n, L, rho, d_slots, d_seed + L).loss());
        std::cout << '\n';
      }
      return kOk;
    }
    if (*assign) {
      const auto spec = ClosSpec::make(a_m, a_n, a_k);
      const auto perm = parse_permutation(a_perm);
      const auto reqs = requests_from_permutation(perm);
      const auto tags = clos_route_assignment(spec, reqs);
      std::cout << "S,D,G,Q,R\n";
      for (std::size_t i = 0; i < reqs.size(); ++i)
        std::cout << reqs[i].source << ',' << reqs[i].destination << ',' << tags[i].central << ','
                  << tags[i].out_module << ',' << tags[i].out_port << '\n';
      std::string why;
      if (!is_nonblocking_assignment(spec, reqs, tags, &why)) {
        std::cerr << "assignment failed the nonblocking check: " << why << '\n';
        return kCriterionFailure;
      }
      return kOk;
    }
    if (*decompose) {
      const auto cap = load_capacity(c_matrix, c_modules, c_frame);
      const auto d = bvn_decompose(cap);
      std::cout << "# frame " << d.frame << ", modules " << d.modules << "\nstate,multiplicity,weight,outputs\n";
      for (std::size_t s = 0; s < d.states.size(); ++s)
        std::cout << s << ',' << d.states[s].multiplicity << ',' << to_string(d.states[s].weight) << ','
                  << outputs_text(d.states[s].pattern) << '\n';
      return d.reconstruct() == cap.c ? kOk : kCriterionFailure;
    }
    if (*schedule) {
      const auto w = parse_weights(s_weights, s_frame);
      const auto seq = run_scheduler(s_algo, w, s_seed);
      const auto r = smoothness(seq, w);
      std::cout << "sequence," << format_sequence(seq) << "\n\nstate,count,L_i\n";
      for (int i = 0; i < w.size(); ++i) std::cout << 'P' << i + 1 << ',' << w.count(i) << ',' << num(r.per_state[i]) << '\n';
      std::cout << "\nL,H,kraft\n" << num(r.average) << ',' << num(r.entropy) << ',' << num(r.kraft_sum) << '\n';
      return kOk;
    }
    if (*schedule2d) {
      const auto cap = load_capacity(g_matrix, 1, 0);
      std::vector<DecompositionState> states;
      if (g_decomp.empty()) states = bvn_decompose(cap).states;
      else states = load_decomposition(g_decomp, cap.frame);
      std::vector<std::int64_t> mult;
      for (const auto& s : states) mult.push_back(s.multiplicity);
      const auto w = WeightSet::from_counts(mult);
      if (w.frame() != cap.frame) throw UsageError("decomposition multiplicities do not sum to the frame");
      const auto seq = run_scheduler(g_algo, w, g_seed);
      std::vector<IntMatrix> slots;
      for (int s : seq) slots.push_back(states[s].pattern);
      const auto grid = grid_from_schedule(slots);
      const auto m = smoothness_2d(grid, cap.c);
      const auto e = entropy_2d(cap.c);
      std::cout << "# rows = output modules, letters = input modules; sequence " << format_sequence(seq) << '\n'
                << format_token_grid(grid) << "\nmodule,d_input,d_output,h_input,h_output\n";
      for (std::size_t i = 0; i < m.input.size(); ++i)
        std::cout << i << ',' << num(m.input[i]) << ',' << num(m.output[i]) << ',' << num(e.input[i]) << ','
                  << num(e.output[i]) << '\n';
      std::cout << "\nD,H\n" << num(m.total) << ',' << num(e.total) << '\n';
      return kOk;
    }
    if (*experiment) {
      ExperimentManifest man;
      if (!e_manifest.empty()) man = ExperimentManifest::parse(read_file(e_manifest));
      if (!e_id.empty()) man.experiment = e_id;
      if (man.experiment.empty()) throw UsageError("no experiment id");
      if (!e_output.empty()) man.output_dir = e_output;
      if (e_seed > 0) man.seed = e_seed;
      if (e_jobs > 0) man.jobs = e_jobs;
      for (const auto& kv : e_set) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--set expects key=value, got " + kv);
        man.parameters[kv.substr(0, eq)] = kv.substr(eq + 1);
      }
      std::cout << "experiment,files,rows\n";
      for (const auto& s : run_experiment(man)) {
        std::string files;
        for (const auto& f : s.files) files += (files.empty() ? "" : " ") + f;
        std::cout << s.experiment << ',' << files << ',' << s.rows << '\n';
      }
      return kOk;
    }
    if (*validate_cmd) {
      ValidateOptions opt;
      opt.dir = v_dir;
      opt.data_dir = v_data;
      opt.criteria = v_criteria;
      for (const auto& kv : v_tol) opt.tolerance.insert(split_assignment(kv));
      const auto verdicts = validate(opt);
      std::cout << format_verdicts(verdicts);
      bool ok = true;
      for (const auto& v : verdicts) {
        ok = ok && v.pass;
        char id[8];
        std::snprintf(id, sizeof id, "C%02d", v.criterion);
        for (const auto& m : v.missing) std::cerr << id << " missing " << (opt.dir / m).string() << '\n';
        for (const auto& d : v.diffs) std::cerr << id << " diff: " << d << '\n';
      }
      return ok ? kOk : kCriterionFailure;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCriterionFailure;
  }
  return kUsage;
}
