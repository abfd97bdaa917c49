#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "swlab/experiments.hpp"

using namespace swlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("swlab_cli_" + std::to_string(getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  int status = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(SWLAB_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::vector<ExperimentSummary> run(const std::string& id, const fs::path& dir,
                                   std::map<std::string, std::string> params = {}) {
  ExperimentManifest m;
  m.experiment = id;
  m.output_dir = dir;
  m.parameters = std::move(params);
  return run_experiment(m);
}

}  // namespace

TEST_CASE("manifest parsing") {
  const auto kv = ExperimentManifest::parse("# comment\nexperiment = fig6\nseed=7\nm = 8,9\noutput=/tmp/x\n");
  CHECK(kv.experiment == "fig6");
  CHECK(kv.seed == 7);
  CHECK(kv.parameters.at("m") == "8,9");
  CHECK(kv.output_dir == fs::path("/tmp/x"));

  const auto js = ExperimentManifest::parse(R"({"experiment": "fig10", "seed": 3, "rho": [0.5, 1], "parameters": {"max_L": 20}})");
  CHECK(js.experiment == "fig10");
  CHECK(js.seed == 3);
  CHECK(js.parameters.at("rho") == "0.5,1");
  CHECK(js.parameters.at("max_L") == "20");

  CHECK_THROWS_AS(ExperimentManifest::parse("experiment fig6"), UsageError);
  CHECK_THROWS_AS(ExperimentManifest::parse("seed=abc"), UsageError);
  CHECK_THROWS_AS(ExperimentManifest::parse("{\"seed\": "), UsageError);
}

TEST_CASE("unknown experiment and bad parameters") {
  const auto dir = scratch("bad");
  CHECK_THROWS_AS(run("fig99", dir), UsageError);
  CHECK_THROWS_AS(run("fig6", dir, {{"m", "x"}}), UsageError);
  CHECK(experiment_ids().size() == 15);
}

TEST_CASE("empty grid gives zero rows") {
  const auto dir = scratch("empty");
  const auto s = run("fig6", dir, {{"m", ""}, {"sigma", ""}});
  REQUIRE(s.size() == 1);
  CHECK(s[0].rows == 0);
  CHECK(s[0].files.size() == 2);
}

TEST_CASE("every file carries a note line and reruns are byte-identical") {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  const std::map<std::string, std::string> small{{"trials", "50"}, {"grids", "5"}};
  for (const char* id : {"kraft", "table6", "fig10", "table4"}) {
    const auto sa = run(id, a, small);
    run(id, b, small);
    for (const auto& f : sa[0].files) {
      const auto text = slurp(a / f);
      CHECK_MESSAGE(text.rfind("# ", 0) == 0, f);
      CHECK_MESSAGE(text == slurp(b / f), f);
    }
  }
  ExperimentManifest par;
  par.experiment = "all";
  par.jobs = 4;
  par.output_dir = scratch("par");
  par.parameters = {{"trials", "20"}, {"slots", "1000"}, {"deflect_slots", "100"}, {"grids", "3"},
                    {"count_trials", "2"}, {"walk_trials", "5"}, {"trials_2x2", "5"}, {"max_N", "5"}};
  ExperimentManifest seq = par;
  seq.jobs = 1;
  seq.output_dir = scratch("seq");
  const auto ps = run_experiment(par);
  run_experiment(seq);
  CHECK(ps.size() == 15);
  for (const auto& s : ps)
    for (const auto& f : s.files) CHECK_MESSAGE(slurp(par.output_dir / f) == slurp(seq.output_dir / f), f);
}

TEST_CASE("table4 last column and fig6 limit") {
  const auto dir = scratch("t4");
  run("table4", dir);
  std::istringstream in(slurp(dir / "table4.csv"));
  std::string line, seq;
  std::getline(in, line);
  std::getline(in, line);
  while (std::getline(in, line)) seq += line.substr(line.rfind(',') + 1);
  CHECK(seq == "P1P1P1P1P2P3P4P5");

  run("fig6", dir, {{"m", "8"}});
  const auto text = slurp(dir / "fig6.csv");
  CHECK(text.find(",0.632120558828558") != std::string::npos);
}

TEST_CASE("validation verdicts, tampering and tolerance overrides") {
  const auto dir = scratch("val");
  run("table6", dir);
  ValidateOptions opt;
  opt.dir = dir;
  opt.criteria = {11};
  auto v = validate(opt);
  REQUIRE(v.size() == 1);
  CHECK(v[0].pass);

  // push the first WFQ cell 0.05 high
  const auto path = dir / "table6.csv";
  auto text = slurp(path);
  const auto row = text.find("\n1,");
  REQUIRE(row != std::string::npos);
  auto line_end = text.find('\n', row + 1);
  std::string line = text.substr(row + 1, line_end - row - 1);
  std::vector<std::string> cells;
  std::stringstream ls(line);
  for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
  cells[3] = std::to_string(std::stod(cells[3]) + 0.05);
  std::string joined;
  for (std::size_t i = 0; i < cells.size(); ++i) joined += (i ? "," : "") + cells[i];
  text.replace(row + 1, line.size(), joined);
  std::ofstream(path, std::ios::binary) << text;

  v = validate(opt);
  CHECK_FALSE(v[0].pass);
  REQUIRE_FALSE(v[0].diffs.empty());
  CHECK(v[0].diffs[0].find("wfq") != std::string::npos);

  opt.tolerance["c11"] = 0.1;
  CHECK(validate(opt)[0].pass);

  const auto empty = scratch("none");
  opt.dir = empty;
  opt.criteria = {1, 13};
  v = validate(opt);
  for (const auto& x : v) {
    CHECK_FALSE(x.pass);
    CHECK_FALSE(x.missing.empty());
  }
  CHECK(format_verdicts(v).find("C13,worked 4x4 example,FAIL,missing outputs: example4x4_entropy.csv") != std::string::npos);
}

TEST_CASE("command line") {
  CHECK(cli("").status == 2);
  CHECK(cli("nonsense").status == 2);
  CHECK(cli("experiment fig99 --output " + scratch("x").string()).status == 2);
  CHECK(cli("validate --criterion 99").status == 2);
  CHECK(cli("schedule 1,0").status == 2);

  auto r = cli("schedule 4,1,1,1,1");
  CHECK(r.status == 0);
  CHECK(r.out.find("sequence,P1P1P1P1P2P3P4P5") != std::string::npos);
  r = cli("schedule 1/2,1/4,1/8,1/8 --algorithm hurr");
  CHECK(r.status == 0);
  CHECK(r.out.find("1.75,1.75,1") != std::string::npos);
  r = cli("schedule 0.25,0.75 --frame 4");
  CHECK(r.out.find("P2P2P1P2") != std::string::npos);

  r = cli("assign 1,3,2,0,6,4,7,5");
  CHECK(r.status == 0);
  CHECK(r.out.rfind("S,D,G,Q,R\n0,1,", 0) == 0);
  CHECK(cli("assign '[0,1,2,3]' --m 2 --n 2 --k 2").status == 0);
  CHECK(cli("assign 0,0,1,2").status == 2);

  const std::string data = SWLAB_DATA_DIR;
  r = cli("decompose " + data + "/example4x4_matrix.csv");
  CHECK(r.status == 0);
  CHECK(r.out.find("state,multiplicity,weight,outputs") != std::string::npos);

  r = cli("schedule2d " + data + "/example4x4_matrix.csv --decomposition " + data + "/example4x4_decomposition.txt --algorithm wfq");
  CHECK(r.status == 0);
  CHECK(r.out.find("aaaaaabc\nbbbbcddd\nccccbbab\ndddddcca\n") != std::string::npos);
  CHECK(r.out.find("6.2522") != std::string::npos);

  r = cli("tradeoff --n 4 --m-max 6");
  CHECK(r.status == 0);
  CHECK(r.out.find("\n4,inf,") != std::string::npos);
  r = cli("deflect --rho 1 --max-L 3");
  CHECK(r.status == 0);
  CHECK(r.out.find("\n1,-0.101504361691238,\n") != std::string::npos);
  CHECK(r.out.find("1,0.632120558828558,0.367879441171442") != std::string::npos);
  r = cli("deflect --rho 0.8 --max-L 4 --n 4 --slots 2000");
  CHECK(r.status == 0);
  CHECK(r.out.find("\n4,") != std::string::npos);

  const auto dir = scratch("cli_val");
  CHECK(cli("experiment example4x4 --output " + dir.string()).status == 0);
  CHECK(cli("validate --dir " + dir.string() + " --criterion 13").status == 0);
  std::ofstream(dir / "example4x4_total.csv") << "# tampered\nquantity,value\nH_C,5.0\nD_wfq,6.2522\nD_hurr,5.3794\nD_alt,5.3392\n";
  r = cli("validate --dir " + dir.string() + " --criterion 13");
  CHECK(r.status == 1);
  CHECK(r.out.find("C13,worked 4x4 example,FAIL") != std::string::npos);
  CHECK(cli("validate --dir " + dir.string() + " --criterion 13 --tolerance c13=0.2").status == 0);
  CHECK(cli("validate --dir " + dir.string() + " --criterion 12").status == 1);

  const auto man = scratch("man") / "m.txt";
  std::ofstream(man) << "experiment=table5\noutput=" << (man.parent_path() / "o").string() << "\n";
  CHECK(cli("experiment --manifest " + man.string()).status == 0);
  CHECK(fs::exists(man.parent_path() / "o" / "table5.csv"));
  std::ofstream(man) << "experiment table5\n";
  CHECK(cli("experiment --manifest " + man.string()).status == 2);
}
